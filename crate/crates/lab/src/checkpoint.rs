//! Restart files.
//!
//! A checkpoint is one JSON document:
//!
//! ```text
//! { format: "couette-checkpoint", version: 1, t, nu, dt, steps,
//!   omega: FieldFile,
//!   error: null | { t, steps, dt, omega_e, omega_1, omega_2, omega_2j: [FieldFile], partition } }
//! ```
//!
//! `FieldFile` is the core field container (interleaved re/im, row-major over `(row, y)`).
//! `dt` is the step size in force when the snapshot was taken, halvings included.

use std::path::Path;
use std::sync::Arc;

use couette_core::elliptic::HelmholtzSolver;
use couette_core::field::FieldFile;
use couette_core::linear::LinearState;
use couette_core::multipliers::DyadicPartition;
use couette_core::nonlinear::{ErrorState, SimState};
use couette_core::{Field, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const CHECKPOINT_FORMAT: &str = "couette-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCheckpoint {
    pub t: f64,
    pub steps: usize,
    pub dt: f64,
    pub omega_e: FieldFile,
    pub omega_1: FieldFile,
    pub omega_2: FieldFile,
    pub omega_2j: Vec<FieldFile>,
    pub partition: Option<DyadicPartition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimCheckpoint {
    pub format: String,
    pub version: u32,
    pub t: f64,
    pub nu: f64,
    pub dt: f64,
    pub steps: usize,
    pub omega: FieldFile,
    pub error: Option<ErrorCheckpoint>,
}

impl SimCheckpoint {
    pub fn capture(sim: &SimState, nu: f64) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            t: sim.t,
            nu,
            dt: sim.control.dt(),
            steps: sim.steps,
            omega: sim.omega.to_file(),
            error: None,
        }
    }

    pub fn with_error(mut self, es: &ErrorState) -> Self {
        self.error = Some(ErrorCheckpoint {
            t: es.t,
            steps: es.steps,
            dt: es.control.dt(),
            omega_e: es.omega_e.to_file(),
            omega_1: es.omega_1.to_file(),
            omega_2: es.omega_2.to_file(),
            omega_2j: es.omega_2j.iter().map(Field::to_file).collect(),
            partition: es.partition.clone(),
        });
        self
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Ok(Grid::new(self.omega.lx, self.omega.nx, self.omega.ny)?)
    }

    pub fn to_sim(&self, grid: &Arc<Grid>, solver: Arc<HelmholtzSolver>) -> Result<SimState> {
        let omega = Field::from_file(&self.omega, Some(grid))?;
        let mut sim = SimState::new(&omega, self.nu, Some(self.dt), solver)?;
        sim.t = self.t;
        sim.steps = self.steps;
        Ok(sim)
    }

    /// Rebuild the error state; `lin` must come from the same initial data.
    pub fn to_error(&self, lin: Arc<LinearState>, solver: Arc<HelmholtzSolver>) -> Result<Option<ErrorState>> {
        let Some(e) = &self.error else { return Ok(None) };
        let g = lin.grid().clone();
        let mut es = ErrorState::new(lin, solver, e.partition.clone(), Some(e.dt))?;
        if es.omega_2j.len() != e.omega_2j.len() {
            return Err(LabError::Checkpoint(format!(
                "{} companions stored, partition has {}",
                e.omega_2j.len(),
                es.omega_2j.len()
            )));
        }
        es.t = e.t;
        es.steps = e.steps;
        es.omega_e = Field::from_file(&e.omega_e, Some(&g))?;
        es.omega_1 = Field::from_file(&e.omega_1, Some(&g))?;
        es.omega_2 = Field::from_file(&e.omega_2, Some(&g))?;
        es.omega_2j = e
            .omega_2j
            .iter()
            .map(|f| Field::from_file(f, Some(&g)))
            .collect::<couette_core::Result<_>>()?;
        Ok(Some(es))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(LabError::Checkpoint(format!(
                "{}: expected {CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}, found {} v{}",
                path.display(),
                c.format,
                c.version
            )));
        }
        Ok(c)
    }
}
