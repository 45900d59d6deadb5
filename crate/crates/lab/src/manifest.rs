//! Run manifests: one JSON document per run plus one CSV per time series.
//!
//! JSON layout (`schema_version` 1):
//!
//! ```text
//! { schema_version, kind, config, series: [{name, time_unit, time, columns: [{name, unit, values}]}],
//!   fits: [{series, column, window, slope, intercept, residual, samples, target, accept, pass}],
//!   constants: [Check], checks: [Check], resolution, flags, wall_clock_s, notes }
//! Check = {name, value, limit: {max} | {range: [lo, hi]}, pass, detail}
//! ```
//!
//! CSV files are named `<stem>.<series>.csv` with header `t,<column>...`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{LabError, Result};
use crate::fit::PowerFit;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub time_unit: String,
    pub time: Vec<f64>,
    pub columns: Vec<Column>,
}

impl TimeSeries {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            time_unit: "advective time".into(),
            time: Vec::new(),
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: (*n).into(),
                    unit: (*u).into(),
                    values: Vec::new(),
                })
                .collect(),
        }
    }

    /// Append one row; times must increase strictly.
    pub fn push(&mut self, t: f64, row: &[f64]) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(LabError::Config(format!(
                "series `{}` has {} columns, got {}",
                self.name,
                self.columns.len(),
                row.len()
            )));
        }
        if let Some(&last) = self.time.last() {
            if t <= last {
                return Err(LabError::Config(format!("series `{}`: time {t} after {last}", self.name)));
            }
        }
        self.time.push(t);
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.values.push(*v);
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    /// `(t, value)` pairs of one column.
    pub fn pairs(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        self.column(name).map(|v| self.time.iter().copied().zip(v.iter().copied()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for (i, t) in self.time.iter().enumerate() {
            let mut rec = vec![format!("{t:e}")];
            rec.extend(self.columns.iter().map(|c| format!("{:e}", c.values[i])));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limit {
    Max(f64),
    Range([f64; 2]),
    /// Recorded only.
    None,
}

impl Limit {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Limit::Max(m) => v.is_finite() && v <= m,
            Limit::Range([lo, hi]) => v >= lo && v <= hi,
            Limit::None => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: Limit,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, value: f64, limit: Limit, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: limit.admits(value),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub series: String,
    pub column: String,
    pub window: [f64; 2],
    #[serde(flatten)]
    pub fit: PowerFit,
    pub target: Option<f64>,
    pub accept: Option<[f64; 2]>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub lx: f64,
    pub nx: usize,
    pub ny: usize,
    pub k_min: f64,
    pub k_max_active: f64,
    pub dt: Option<f64>,
    pub halvings: usize,
    pub steps: usize,
}

impl Resolution {
    pub fn of(cfg: &SimConfig) -> Self {
        let lx = cfg.lx;
        let kmin = 2.0 * std::f64::consts::PI / lx;
        Self {
            lx,
            nx: cfg.nx,
            ny: cfg.ny,
            k_min: kmin,
            k_max_active: ((cfg.nx as i64 - 1) / 3) as f64 * kmin,
            dt: cfg.dt,
            halvings: 0,
            steps: 0,
        }
    }

    /// Guard: the box must hold wavenumbers down to `ν`.
    pub fn k_min_flag(&self, nu: f64) -> Option<String> {
        (self.k_min > nu * (1.0 + 1e-9)).then(|| format!("k_min = {:e} exceeds ν = {nu:e}", self.k_min))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Flagged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Flagged => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub kind: String,
    pub config: Option<SimConfig>,
    pub series: Vec<TimeSeries>,
    pub fits: Vec<FitRecord>,
    pub constants: Vec<Check>,
    pub checks: Vec<Check>,
    pub resolution: Option<Resolution>,
    /// Resolution-guard warnings.
    pub flags: Vec<String>,
    pub wall_clock_s: f64,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(kind: &str, config: Option<&SimConfig>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            config: config.cloned(),
            series: Vec::new(),
            fits: Vec::new(),
            constants: Vec::new(),
            checks: Vec::new(),
            resolution: config.map(Resolution::of),
            flags: Vec::new(),
            wall_clock_s: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn series(&self, name: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn fit(&self, series: &str, column: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.series == series && f.column == column)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().chain(&self.constants).find(|c| c.name == name)
    }

    pub fn status(&self) -> Status {
        let failed = self.checks.iter().chain(&self.constants).any(|c| !c.pass)
            || self.fits.iter().any(|f| f.pass == Some(false));
        if failed {
            Status::Fail
        } else if !self.flags.is_empty() {
            Status::Flagged
        } else {
            Status::Pass
        }
    }

    /// Write `<stem>.json` and the series CSVs into `dir`; returns the paths written.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, serde_json::to_string_pretty(self)?)?;
        out.push(json);
        for s in &self.series {
            let p = dir.join(format!("{stem}.{}.csv", s.name));
            std::fs::write(&p, s.to_csv()?)?;
            out.push(p);
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
