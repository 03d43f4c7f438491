//! Constraint checker for fully timed schedules.
//!
//! Constraint families are numbered 1 to 13:
//!
//! | family | meaning |
//! |---|---|
//! | 1 | `S(l+1,n,j) >= E(l,n,j)`: forward only after receiving |
//! | 2 | `S(l,n,j+1) >= E(l+1,n,j)`: receive next installment after forwarding this one |
//! | 3 | `S(l,n+1,1) >= E(l+1,n,Q_n)`: same across loads |
//! | 4 | `S >= 0` |
//! | 5 | `E = S + z_l V_comm(n) sum_{k>l} gamma_k` |
//! | 6 | `Cs(i,n,j) >= E(i-1,n,j)`: compute after receiving |
//! | 7 | `Ce = Cs + w_i gamma_i V_comp(n)` |
//! | 8 | `Cs(i,n+1,1) >= Ce(i,n,Q_n)` |
//! | 9 | `Cs(i,n,j+1) >= Ce(i,n,j)` |
//! | 10 | `Cs(i,1,1) >= tau_i` |
//! | 11 | `gamma >= 0` |
//! | 12 | `sum_{i,j} gamma_i^j(n) = 1` |
//! | 13 | `makespan >= Ce(i,N,Q_N)` |
//!
//! Families 2 and 3 also cover the last link, where the receiving processor
//! forwards nothing: there `E(l+1,..)` is read as `E(l,..)`, which keeps
//! consecutive transfers on that link from overlapping.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, Platform, Schedule, Workload};
use crate::timing::{compute_time, transfer_time};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Absolute tolerance on times and fractions.
    pub tol: f64,
    /// Also require `Cs(i,n,j) >= E(i,n,j)` for `2 <= i <= m-1`.
    pub strict_forward: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            tol: DEFAULT_TOLERANCE,
            strict_forward: false,
        }
    }
}

impl ValidationOptions {
    pub fn with_tol(tol: f64) -> Self {
        ValidationOptions {
            tol,
            ..Default::default()
        }
    }
}

/// A single broken constraint. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub family: u8,
    /// Processor or link index, depending on the family.
    pub entity: Option<usize>,
    pub load: Option<usize>,
    pub installment: Option<usize>,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint family {}", self.family)?;
        let mut parts = Vec::new();
        if let Some(i) = self.entity {
            parts.push(format!("i={i}"));
        }
        if let Some(n) = self.load {
            parts.push(format!("n={n}"));
        }
        if let Some(j) = self.installment {
            parts.push(format!("j={j}"));
        }
        if !parts.is_empty() {
            write!(f, " at ({})", parts.join(", "))?;
        }
        write!(f, ": residual {:e}", self.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// Distinct families that have at least one violation.
    pub fn families(&self) -> Vec<u8> {
        let mut f: Vec<u8> = self.violations.iter().map(|v| v.family).collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    pub fn max_residual(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.residual)
            .fold(0.0, f64::max)
    }
}

struct Checker {
    tol: f64,
    violations: Vec<Violation>,
}

impl Checker {
    /// Records a violation when `lhs >= rhs` fails by more than the tolerance.
    fn ge(
        &mut self,
        family: u8,
        idx: (Option<usize>, Option<usize>, Option<usize>),
        lhs: f64,
        rhs: f64,
    ) {
        let residual = rhs - lhs;
        if !(residual <= self.tol) {
            self.push(family, idx, residual);
        }
    }

    fn eq(
        &mut self,
        family: u8,
        idx: (Option<usize>, Option<usize>, Option<usize>),
        lhs: f64,
        rhs: f64,
    ) {
        let residual = (lhs - rhs).abs();
        if !(residual <= self.tol) {
            self.push(family, idx, residual);
        }
    }

    fn push(
        &mut self,
        family: u8,
        idx: (Option<usize>, Option<usize>, Option<usize>),
        residual: f64,
    ) {
        self.violations.push(Violation {
            family,
            entity: idx.0,
            load: idx.1,
            installment: idx.2,
            residual: if residual.is_nan() {
                f64::INFINITY
            } else {
                residual
            },
        });
    }
}

fn at(e: usize, n: usize, j: usize) -> (Option<usize>, Option<usize>, Option<usize>) {
    (Some(e + 1), Some(n + 1), Some(j + 1))
}

/// Checks all thirteen constraint families on `s`.
pub fn validate_schedule(
    p: &Platform,
    wl: &Workload,
    s: &Schedule,
    opts: &ValidationOptions,
) -> Result<ValidationReport, ModelError> {
    s.check_shape(p, wl)?;
    let m = p.m();
    let links = p.links();
    let nloads = wl.len();
    let q = &s.q;
    let (cs, ce, ss, se) = (&s.comp_start, &s.comp_end, &s.comm_start, &s.comm_end);
    let mut c = Checker {
        tol: opts.tol,
        violations: Vec::new(),
    };

    for (n, j) in q.rounds() {
        let last_inst = j + 1 == q.get(n);
        for l in 0..links {
            if l + 1 < links {
                c.ge(1, at(l + 1, n, j), ss[l + 1][n][j], se[l][n][j]);
            }
            let upstream_of = if l + 1 < links { l + 1 } else { l };
            if !last_inst {
                c.ge(2, at(l, n, j), ss[l][n][j + 1], se[upstream_of][n][j]);
            } else if n + 1 < nloads {
                c.ge(3, at(l, n, j), ss[l][n + 1][0], se[upstream_of][n][j]);
            }
            c.ge(4, at(l, n, j), ss[l][n][j], 0.0);
            let expected = ss[l][n][j] + transfer_time(p, wl, &s.fractions, l, n, j);
            c.eq(5, at(l, n, j), se[l][n][j], expected);
        }
        for i in 0..m {
            if i > 0 {
                c.ge(6, at(i, n, j), cs[i][n][j], se[i - 1][n][j]);
                if opts.strict_forward && i < links {
                    c.ge(6, at(i, n, j), cs[i][n][j], se[i][n][j]);
                }
            }
            let expected = cs[i][n][j] + compute_time(p, wl, &s.fractions, i, n, j);
            c.eq(7, at(i, n, j), ce[i][n][j], expected);
            if !last_inst {
                c.ge(9, at(i, n, j), cs[i][n][j + 1], ce[i][n][j]);
            } else if n + 1 < nloads {
                c.ge(8, at(i, n, j), cs[i][n + 1][0], ce[i][n][j]);
            }
            if n == 0 && j == 0 {
                c.ge(10, (Some(i + 1), None, None), cs[i][0][0], p.tau()[i]);
            }
            c.ge(11, at(i, n, j), s.fractions[i][n][j], 0.0);
        }
    }
    for n in 0..nloads {
        let total: f64 = (0..m).map(|i| s.share(i, n)).sum();
        c.eq(12, (None, Some(n + 1), None), total, 1.0);
    }
    let last = nloads - 1;
    let qlast = q.get(last) - 1;
    for i in 0..m {
        c.ge(
            13,
            (Some(i + 1), None, None),
            s.makespan,
            ce[i][last][qlast],
        );
    }

    let violations = c.violations;
    Ok(ValidationReport {
        ok: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstallmentCounts;
    use crate::timing::earliest_schedule;

    fn half_lambda() -> (Platform, Workload, Schedule) {
        let p = Platform::idle(vec![0.5, 0.5], vec![1.0]).unwrap();
        let wl = Workload::uniform(2, 1.0, 1.0).unwrap();
        let q = InstallmentCounts::uniform(2, 1).unwrap();
        let fr = vec![vec![vec![0.6], vec![0.8]], vec![vec![0.4], vec![0.2]]];
        let s = earliest_schedule(&p, &wl, &q, fr, false);
        (p, wl, s)
    }

    #[test]
    fn accepts_valid_schedule() {
        let (p, wl, s) = half_lambda();
        let r = validate_schedule(&p, &wl, &s, &ValidationOptions::with_tol(0.0)).unwrap();
        assert!(r.ok, "{:?}", r.violations);
    }

    #[test]
    fn broken_normalization_hits_family_12() {
        let (p, wl, mut s) = half_lambda();
        s.fractions[0][0][0] = 0.5;
        let r = validate_schedule(&p, &wl, &s, &ValidationOptions::default()).unwrap();
        assert!(!r.ok);
        assert!(r.families().contains(&12));
    }

    #[test]
    fn early_computation_hits_family_6() {
        let (p, wl, mut s) = half_lambda();
        s.comp_start[1][0][0] = 0.3;
        s.comp_end[1][0][0] = 0.5;
        let r = validate_schedule(&p, &wl, &s, &ValidationOptions::default()).unwrap();
        assert_eq!(r.families(), vec![6]);
        assert!((r.violations[0].residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn overlapping_last_link_transfers_hit_family_3() {
        let (p, wl, mut s) = half_lambda();
        s.comm_start[0][1][0] = 0.3;
        s.comm_end[0][1][0] = 0.5;
        let r = validate_schedule(&p, &wl, &s, &ValidationOptions::default()).unwrap();
        assert!(r.families().contains(&3));
    }

    #[test]
    fn nan_is_a_violation() {
        let (p, wl, mut s) = half_lambda();
        s.makespan = f64::NAN;
        let r = validate_schedule(&p, &wl, &s, &ValidationOptions::default()).unwrap();
        assert_eq!(r.families(), vec![13]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let (p, wl, mut s) = half_lambda();
        s.comp_end[1].pop();
        assert!(matches!(
            validate_schedule(&p, &wl, &s, &ValidationOptions::default()),
            Err(ModelError::IndexMismatch(_))
        ));
    }

    #[test]
    fn strict_forward_flag_adds_rows() {
        // Three processors; P2 computes while it forwards to P3.
        let p = Platform::idle(vec![1.0, 1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let wl = Workload::uniform(1, 1.0, 1.0).unwrap();
        let q = InstallmentCounts::uniform(1, 1).unwrap();
        let fr = vec![vec![vec![0.5]], vec![vec![0.25]], vec![vec![0.25]]];
        let s = earliest_schedule(&p, &wl, &q, fr.clone(), false);
        let strict = ValidationOptions {
            strict_forward: true,
            ..Default::default()
        };
        assert!(
            validate_schedule(&p, &wl, &s, &ValidationOptions::default())
                .unwrap()
                .ok
        );
        assert!(!validate_schedule(&p, &wl, &s, &strict).unwrap().ok);
        let s2 = earliest_schedule(&p, &wl, &q, fr, true);
        assert!(validate_schedule(&p, &wl, &s2, &strict).unwrap().ok);
        assert!(s2.comp_start[1][0][0] > s.comp_start[1][0][0]);
    }
}
