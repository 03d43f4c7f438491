//! Platform, workload and schedule types for a linear chain of processors.
//!
//! Processor `P_i` computes a unit load in `w[i]` seconds and forwards a unit
//! load to `P_{i+1}` over link `l_i` in `z[i]` seconds. All loads start on
//! `P_1`; each processor keeps its share and forwards the rest downstream.
//!
//! Internally everything is 0-based. Reports and file formats use 1-based
//! indices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while constructing or checking model values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field}[{index}] must be strictly positive, got {value}")]
    NonPositiveRate {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{field} has length {found}, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("tau[{index}] must be nonnegative, got {value}")]
    NegativeAvailability { index: usize, value: f64 },
    #[error("platform needs at least one processor")]
    NoProcessors,
    #[error("workload needs at least one load")]
    EmptyWorkload,
    #[error("load {load}: {field} must be strictly positive, got {value}")]
    NonPositiveVolume {
        load: usize,
        field: &'static str,
        value: f64,
    },
    #[error("load {load}: installment count must be at least 1")]
    ZeroInstallments { load: usize },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
}

/// Raw platform description as read from an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformDesc {
    pub m: usize,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
    pub tau: Vec<f64>,
}

/// A validated linear chain of `m` processors.
#[derive(Debug, Clone, PartialEq)]
pub struct Platform {
    w: Vec<f64>,
    z: Vec<f64>,
    tau: Vec<f64>,
}

impl Platform {
    pub fn new(w: Vec<f64>, z: Vec<f64>, tau: Vec<f64>) -> Result<Self, ModelError> {
        validate_platform(&PlatformDesc {
            m: w.len(),
            w,
            z,
            tau,
        })
    }

    /// Platform with all availability dates set to zero.
    pub fn idle(w: Vec<f64>, z: Vec<f64>) -> Result<Self, ModelError> {
        let tau = vec![0.0; w.len()];
        Self::new(w, z, tau)
    }

    /// Processor count.
    pub fn m(&self) -> usize {
        self.w.len()
    }

    /// Link count, `m - 1`.
    pub fn links(&self) -> usize {
        self.z.len()
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Multiplies every rate and availability date by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Platform {
        Platform {
            w: self.w.iter().map(|v| v * factor).collect(),
            z: self.z.iter().map(|v| v * factor).collect(),
            tau: self.tau.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn to_desc(&self) -> PlatformDesc {
        PlatformDesc {
            m: self.m(),
            w: self.w.clone(),
            z: self.z.clone(),
            tau: self.tau.clone(),
        }
    }
}

/// Checks a raw description against every platform invariant.
pub fn validate_platform(desc: &PlatformDesc) -> Result<Platform, ModelError> {
    let m = desc.m;
    if m == 0 {
        return Err(ModelError::NoProcessors);
    }
    let check_len = |field, found, expected| {
        if found != expected {
            Err(ModelError::LengthMismatch {
                field,
                expected,
                found,
            })
        } else {
            Ok(())
        }
    };
    check_len("w", desc.w.len(), m)?;
    check_len("z", desc.z.len(), m - 1)?;
    check_len("tau", desc.tau.len(), m)?;
    for (field, values) in [("w", &desc.w), ("z", &desc.z)] {
        for (i, &v) in values.iter().enumerate() {
            // NaN fails this comparison as well.
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::NonPositiveRate {
                    field,
                    index: i + 1,
                    value: v,
                });
            }
        }
    }
    for (i, &v) in desc.tau.iter().enumerate() {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(ModelError::NegativeAvailability {
                index: i + 1,
                value: v,
            });
        }
    }
    Ok(Platform {
        w: desc.w.clone(),
        z: desc.z.clone(),
        tau: desc.tau.clone(),
    })
}

/// One divisible load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Load {
    /// Data volume, in unit loads.
    pub vcomm: f64,
    /// Computation volume, in unit loads.
    pub vcomp: f64,
}

/// Ordered list of loads; the order is the sending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    loads: Vec<Load>,
}

impl Workload {
    pub fn new(loads: Vec<Load>) -> Result<Self, ModelError> {
        if loads.is_empty() {
            return Err(ModelError::EmptyWorkload);
        }
        for (n, l) in loads.iter().enumerate() {
            for (field, v) in [("vcomm", l.vcomm), ("vcomp", l.vcomp)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ModelError::NonPositiveVolume {
                        load: n + 1,
                        field,
                        value: v,
                    });
                }
            }
        }
        Ok(Workload { loads })
    }

    /// `count` copies of the same load.
    pub fn uniform(count: usize, vcomm: f64, vcomp: f64) -> Result<Self, ModelError> {
        Self::new(vec![Load { vcomm, vcomp }; count])
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn loads(&self) -> &[Load] {
        &self.loads
    }

    pub fn get(&self, n: usize) -> Load {
        self.loads[n]
    }
}

/// Number of installments of every load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct InstallmentCounts(Vec<usize>);

impl InstallmentCounts {
    pub fn new(q: Vec<usize>) -> Result<Self, ModelError> {
        if let Some(n) = q.iter().position(|&v| v == 0) {
            return Err(ModelError::ZeroInstallments { load: n + 1 });
        }
        Ok(InstallmentCounts(q))
    }

    pub fn uniform(loads: usize, q: usize) -> Result<Self, ModelError> {
        Self::new(vec![q; loads])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: usize) -> usize {
        self.0[n]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Iterates `(load, installment)` pairs in sending order.
    pub fn rounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(n, &q)| (0..q).map(move |j| (n, j)))
    }

    /// The round sent just before `(n, j)`, if any.
    pub fn previous(&self, n: usize, j: usize) -> Option<(usize, usize)> {
        if j > 0 {
            Some((n, j - 1))
        } else if n > 0 {
            Some((n - 1, self.0[n - 1] - 1))
        } else {
            None
        }
    }
}

impl TryFrom<Vec<usize>> for InstallmentCounts {
    type Error = ModelError;
    fn try_from(v: Vec<usize>) -> Result<Self, ModelError> {
        InstallmentCounts::new(v)
    }
}

impl From<InstallmentCounts> for Vec<usize> {
    fn from(q: InstallmentCounts) -> Vec<usize> {
        q.0
    }
}

/// Ragged array indexed `[entity][load][installment]`.
pub type Grid = Vec<Vec<Vec<f64>>>;

/// Zero-filled grid for `entities` rows shaped by `q`.
pub fn grid(entities: usize, q: &InstallmentCounts) -> Grid {
    (0..entities)
        .map(|_| q.as_slice().iter().map(|&qn| vec![0.0; qn]).collect())
        .collect()
}

/// A fully timed multi-installment schedule.
///
/// `fractions`, `comp_start` and `comp_end` are indexed by processor; the
/// communication arrays are indexed by link (`m - 1` rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub q: InstallmentCounts,
    pub fractions: Grid,
    pub comm_start: Grid,
    pub comm_end: Grid,
    pub comp_start: Grid,
    pub comp_end: Grid,
    pub makespan: f64,
}

impl Schedule {
    pub fn processors(&self) -> usize {
        self.fractions.len()
    }

    /// Total fraction of load `n` assigned to processor `i`.
    pub fn share(&self, i: usize, n: usize) -> f64 {
        self.fractions[i][n].iter().sum()
    }

    /// Checks that every grid has the shape implied by `(p, wl, q)`.
    pub fn check_shape(&self, p: &Platform, wl: &Workload) -> Result<(), ModelError> {
        check_shape(&self.q, p, wl, &self.fractions, p.m(), "fractions")?;
        check_shape(&self.q, p, wl, &self.comp_start, p.m(), "comp_start")?;
        check_shape(&self.q, p, wl, &self.comp_end, p.m(), "comp_end")?;
        check_shape(&self.q, p, wl, &self.comm_start, p.links(), "comm_start")?;
        check_shape(&self.q, p, wl, &self.comm_end, p.links(), "comm_end")?;
        Ok(())
    }
}

pub(crate) fn check_shape(
    q: &InstallmentCounts,
    _p: &Platform,
    wl: &Workload,
    g: &Grid,
    rows: usize,
    name: &str,
) -> Result<(), ModelError> {
    if q.len() != wl.len() {
        return Err(ModelError::IndexMismatch(format!(
            "q has {} entries for {} loads",
            q.len(),
            wl.len()
        )));
    }
    if g.len() != rows {
        return Err(ModelError::IndexMismatch(format!(
            "{name} has {} rows, expected {rows}",
            g.len()
        )));
    }
    for (e, per_load) in g.iter().enumerate() {
        if per_load.len() != wl.len() {
            return Err(ModelError::IndexMismatch(format!(
                "{name}[{}] has {} loads, expected {}",
                e + 1,
                per_load.len(),
                wl.len()
            )));
        }
        for (n, inst) in per_load.iter().enumerate() {
            if inst.len() != q.get(n) {
                return Err(ModelError::IndexMismatch(format!(
                    "{name}[{}][{}] has {} installments, expected {}",
                    e + 1,
                    n + 1,
                    inst.len(),
                    q.get(n)
                )));
            }
        }
    }
    Ok(())
}

/// Latest computation end of the last installment of the last load.
pub fn makespan_of(s: &Schedule) -> f64 {
    let last = s.q.len() - 1;
    let qn = s.q.get(last) - 1;
    s.comp_end
        .iter()
        .map(|per_load| per_load[last][qn])
        .fold(f64::NEG_INFINITY, f64::max)
}
