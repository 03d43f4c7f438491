//! Brute-force vertex enumeration for tiny standard-form LPs.
//!
//! Shares nothing with the simplex path beyond [`StandardLp`]; it carries its
//! own elimination routine so the two can be checked against each other.

use thiserror::Error;

use super::{LpSolution, LpStatus, StandardLp};

/// Largest row or column count the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 12;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("problem has {rows} rows and {cols} columns; the oracle handles at most {ORACLE_MAX_DIM} of each")]
    TooLarge { rows: usize, cols: usize },
}

/// Row-reduces `[A | b]` in place. Returns the pivot columns, or `None` when
/// the system is inconsistent.
fn reduce(mat: &mut Vec<Vec<f64>>, ncols: usize) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == mat.len() {
            break;
        }
        let (best, val) = (row..mat.len())
            .map(|r| (r, mat[r][col].abs()))
            .fold((row, 0.0), |a, c| if c.1 > a.1 { c } else { a });
        if val <= EPS {
            continue;
        }
        mat.swap(row, best);
        let p = mat[row][col];
        for v in mat[row].iter_mut() {
            *v /= p;
        }
        for r in 0..mat.len() {
            if r != row {
                let f = mat[r][col];
                if f != 0.0 {
                    for c in 0..=ncols {
                        mat[r][c] -= f * mat[row][c];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..mat.len() {
        if mat[r][ncols].abs() > EPS {
            return None;
        }
    }
    mat.truncate(row);
    Some(pivots)
}

/// Solves the square system given as augmented rows; `None` if singular.
fn solve_square(mut aug: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = aug.len();
    let pivots = reduce(&mut aug, k)?;
    if pivots.len() < k {
        return None;
    }
    Some(aug.iter().map(|r| r[k]).collect())
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Enumerates every basic solution of `slp` and returns the best feasible
/// one, or an infeasible/unbounded verdict.
pub fn vertex_oracle(slp: &StandardLp) -> Result<LpSolution, OracleError> {
    if slp.rows > ORACLE_MAX_DIM || slp.cols > ORACLE_MAX_DIM {
        return Err(OracleError::TooLarge {
            rows: slp.rows,
            cols: slp.cols,
        });
    }
    let n = slp.cols;
    let mut mat: Vec<Vec<f64>> = (0..slp.rows)
        .map(|r| {
            let mut v = slp.row(r).to_vec();
            v.push(slp.b[r]);
            v
        })
        .collect();
    let verdict = |status, count| LpSolution::verdict(status, count, Vec::new(), false);
    if reduce(&mut mat, n).is_none() {
        return Ok(verdict(LpStatus::Infeasible, 0));
    }
    let k = mat.len();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut unbounded = false;
    let mut visited = 0;
    let mut check_basis = |basis: &[usize]| {
        visited += 1;
        let aug: Vec<Vec<f64>> = mat
            .iter()
            .map(|row| {
                let mut v: Vec<f64> = basis.iter().map(|&c| row[c]).collect();
                v.push(row[n]);
                v
            })
            .collect();
        let Some(xb) = solve_square(aug) else { return };
        if xb.iter().any(|&v| v < -EPS) {
            return;
        }
        let mut x = vec![0.0; n];
        for (&c, &v) in basis.iter().zip(&xb) {
            x[c] = v.max(0.0);
        }
        let obj: f64 = slp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b - 1e-12) {
            best = Some((obj, x));
        }
        // Edge directions leaving this vertex along each nonbasic column.
        for j in (0..n).filter(|j| !basis.contains(j)) {
            let aug: Vec<Vec<f64>> = mat
                .iter()
                .map(|row| {
                    let mut v: Vec<f64> = basis.iter().map(|&c| row[c]).collect();
                    v.push(row[j]);
                    v
                })
                .collect();
            let Some(u) = solve_square(aug) else { continue };
            if u.iter().all(|&v| v <= EPS) {
                let cost = slp.c[j]
                    - basis
                        .iter()
                        .zip(&u)
                        .map(|(&c, &v)| slp.c[c] * v)
                        .sum::<f64>();
                if cost < -EPS {
                    unbounded = true;
                }
            }
        }
    };
    combinations(n, k, &mut check_basis);

    if unbounded {
        return Ok(verdict(LpStatus::Unbounded, visited));
    }
    match best {
        None => Ok(verdict(LpStatus::Infeasible, visited)),
        Some((objective, mut x)) => {
            x.truncate(slp.n_original);
            let mut s = verdict(LpStatus::Optimal, visited);
            s.x = x;
            s.objective = objective;
            Ok(s)
        }
    }
}
