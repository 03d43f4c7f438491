//! JSON instance and schedule files.
//!
//! Instance file:
//!
//! ```json
//! {"format_version": 1, "m": 2, "w": [0.5, 0.5], "z": [1.0], "tau": [0.0, 0.0],
//!  "loads": [{"vcomm": 1.0, "vcomp": 1.0}]}
//! ```
//!
//! with optional `latency` (one entry per link, seconds) and `meta` fields.
//! Schedule files carry `q`, `fractions[i][n][j]`, the four time arrays and
//! `makespan`; the time arrays may all be omitted, in which case times are
//! derived as early as possible.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_platform, Grid, InstallmentCounts, Load, ModelError, Platform, PlatformDesc, Schedule,
    Workload,
};
use crate::timing::earliest_schedule;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("schedule file has some time arrays but not all of them")]
    PartialTimes,
    #[error("latency has {found} entries, expected {expected}")]
    LatencyLength { expected: usize, found: usize },
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub m: usize,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency: Option<Vec<f64>>,
    pub loads: Vec<Load>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

/// A validated platform and workload, plus per-link message latencies used
/// only by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub platform: Platform,
    pub workload: Workload,
    pub latency: Option<Vec<f64>>,
    pub meta: Option<serde_json::Value>,
}

impl Instance {
    pub fn new(platform: Platform, workload: Workload) -> Self {
        Instance {
            platform,
            workload,
            latency: None,
            meta: None,
        }
    }

    pub fn from_file(f: InstanceFile) -> Result<Self, IoError> {
        if f.format_version != FORMAT_VERSION {
            return Err(IoError::UnsupportedVersion(f.format_version));
        }
        let platform = validate_platform(&PlatformDesc {
            m: f.m,
            w: f.w,
            z: f.z,
            tau: f.tau,
        })?;
        if let Some(lat) = &f.latency {
            if lat.len() != platform.links() {
                return Err(IoError::LatencyLength {
                    expected: platform.links(),
                    found: lat.len(),
                });
            }
        }
        Ok(Instance {
            workload: Workload::new(f.loads)?,
            platform,
            latency: f.latency,
            meta: f.meta,
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        let d = self.platform.to_desc();
        InstanceFile {
            format_version: FORMAT_VERSION,
            m: d.m,
            w: d.w,
            z: d.z,
            tau: d.tau,
            latency: self.latency.clone(),
            loads: self.workload.loads().to_vec(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_text(path, &self.to_json())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub q: InstallmentCounts,
    pub fractions: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comm_start: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comm_end: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comp_start: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comp_end: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub makespan: Option<f64>,
}

impl ScheduleFile {
    pub fn from_schedule(s: &Schedule) -> Self {
        ScheduleFile {
            format_version: FORMAT_VERSION,
            q: s.q.clone(),
            fractions: s.fractions.clone(),
            comm_start: Some(s.comm_start.clone()),
            comm_end: Some(s.comm_end.clone()),
            comp_start: Some(s.comp_start.clone()),
            comp_end: Some(s.comp_end.clone()),
            makespan: Some(s.makespan),
        }
    }

    pub fn fractions_only(q: InstallmentCounts, fractions: Grid) -> Self {
        ScheduleFile {
            format_version: FORMAT_VERSION,
            q,
            fractions,
            comm_start: None,
            comm_end: None,
            comp_start: None,
            comp_end: None,
            makespan: None,
        }
    }

    pub fn has_times(&self) -> bool {
        self.comm_start.is_some()
    }

    /// Returns the stored schedule, or derives as-early-as-possible times
    /// for a fractions-only file. A missing `makespan` is recomputed.
    pub fn into_schedule(self, p: &Platform, wl: &Workload) -> Result<Schedule, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::UnsupportedVersion(self.format_version));
        }
        crate::model::check_shape(&self.q, p, wl, &self.fractions, p.m(), "fractions")?;
        match (
            self.comm_start,
            self.comm_end,
            self.comp_start,
            self.comp_end,
        ) {
            (Some(comm_start), Some(comm_end), Some(comp_start), Some(comp_end)) => {
                let mut s = Schedule {
                    q: self.q,
                    fractions: self.fractions,
                    comm_start,
                    comm_end,
                    comp_start,
                    comp_end,
                    makespan: 0.0,
                };
                s.check_shape(p, wl)?;
                s.makespan = self
                    .makespan
                    .unwrap_or_else(|| crate::model::makespan_of(&s));
                Ok(s)
            }
            (None, None, None, None) => {
                Ok(earliest_schedule(p, wl, &self.q, self.fractions, false))
            }
            _ => Err(IoError::PartialTimes),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_text(path, &self.to_json())
    }
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
