pub mod linear;
pub mod simulate;
pub mod threshold;
pub mod verify;

pub use linear::run_linear_decay;
pub use simulate::{run_inviscid_damping, run_simulation};
pub use threshold::run_threshold_sweep;
pub use verify::verify_inequality_suite;
