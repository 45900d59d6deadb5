//! Experiment drivers on top of `couette-core`: configuration, initial data, runs,
//! inequality checks, threshold sweeps and the manifests they write.

pub mod checkpoint;
pub mod config;
pub mod drivers;
pub mod error;
pub mod fit;
pub mod init;
pub mod manifest;
pub mod random;
pub mod weights;

pub use config::SimConfig;
pub use error::{LabError, Result};
pub use manifest::{RunManifest, Status};
