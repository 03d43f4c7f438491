//! Basis factorization for the revised simplex: dense LU with partial
//! pivoting plus a product-form eta file for rank-one basis updates.

use super::linalg::SingularMatrix;

#[derive(Debug, Clone)]
struct Eta {
    row: usize,
    pivot: f64,
    /// Off-pivot nonzeros of the entering column.
    entries: Vec<(usize, f64)>,
}

/// `P B = L U` with a unit-diagonal `L`, stored sparsely.
#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    n: usize,
    /// Below-diagonal nonzeros of each column of `L`.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Above-diagonal nonzeros of each row of `U`.
    u_rows: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// Row `k` of `P B` is row `perm[k]` of `B`.
    perm: Vec<usize>,
    etas: Vec<Eta>,
}

impl BasisFactor {
    /// Factors the `n x n` row-major matrix `b`.
    pub(crate) fn new(n: usize, mut lu: Vec<f64>) -> Result<Self, SingularMatrix> {
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |a, c| if c.1 > a.1 { c } else { a });
            if best <= 1e-13 * scale {
                return Err(SingularMatrix);
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let d = lu[k * n + k];
            for r in k + 1..n {
                let f = lu[r * n + k];
                if f == 0.0 {
                    continue;
                }
                let f = f / d;
                lu[r * n + k] = f;
                let (head, tail) = lu.split_at_mut(r * n);
                let pivot_row = &head[k * n..k * n + n];
                let row = &mut tail[..n];
                for c in k + 1..n {
                    let u = pivot_row[c];
                    if u != 0.0 {
                        row[c] -= f * u;
                    }
                }
            }
        }
        let l_cols = (0..n)
            .map(|k| {
                (k + 1..n)
                    .map(|r| (r, lu[r * n + k]))
                    .filter(|t| t.1 != 0.0)
                    .collect()
            })
            .collect();
        let u_rows = (0..n)
            .map(|k| {
                (k + 1..n)
                    .map(|c| (c, lu[k * n + c]))
                    .filter(|t| t.1 != 0.0)
                    .collect()
            })
            .collect();
        let u_diag = (0..n).map(|k| lu[k * n + k]).collect();
        Ok(BasisFactor {
            n,
            l_cols,
            u_rows,
            u_diag,
            perm,
            etas: Vec::new(),
        })
    }

    pub(crate) fn updates(&self) -> usize {
        self.etas.len()
    }

    /// Overwrites `x` with `B^-1 x`.
    pub(crate) fn ftran(&self, x: &mut [f64]) {
        let mut v: Vec<f64> = self.perm.iter().map(|&p| x[p]).collect();
        for (k, col) in self.l_cols.iter().enumerate() {
            let vk = v[k];
            if vk != 0.0 {
                for &(r, l) in col {
                    v[r] -= l * vk;
                }
            }
        }
        for k in (0..self.n).rev() {
            let mut s = v[k];
            for &(c, u) in &self.u_rows[k] {
                s -= u * v[c];
            }
            v[k] = s / self.u_diag[k];
        }
        x.copy_from_slice(&v);
        for eta in &self.etas {
            let xr = x[eta.row] / eta.pivot;
            x[eta.row] = xr;
            if xr != 0.0 {
                for &(i, a) in &eta.entries {
                    x[i] -= a * xr;
                }
            }
        }
    }

    /// Overwrites `x` with `B^-T x`, i.e. solves `y^T B = x^T`.
    pub(crate) fn btran(&self, x: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = x[eta.row];
            for &(i, a) in &eta.entries {
                s -= x[i] * a;
            }
            x[eta.row] = s / eta.pivot;
        }
        let mut w = x.to_vec();
        for k in 0..self.n {
            let wk = w[k] / self.u_diag[k];
            w[k] = wk;
            if wk != 0.0 {
                for &(c, u) in &self.u_rows[k] {
                    w[c] -= u * wk;
                }
            }
        }
        for k in (0..self.n).rev() {
            let mut s = w[k];
            for &(r, l) in &self.l_cols[k] {
                s -= l * w[r];
            }
            w[k] = s;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = w[k];
        }
    }

    /// Records the replacement of basis position `row` by a column whose
    /// representation in the current basis is `alpha`.
    pub(crate) fn update(&mut self, row: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != row && a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            row,
            pivot: alpha[row],
            entries,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
        (0..n)
            .map(|r| (0..n).map(|c| a[r * n + c] * x[c]).sum())
            .collect()
    }

    #[test]
    fn solves_and_updates() {
        let n = 3;
        let b = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let mut f = BasisFactor::new(n, b.clone()).unwrap();
        let rhs = vec![1.0, 2.0, 3.0];
        let mut x = rhs.clone();
        f.ftran(&mut x);
        let back = matvec(n, &b, &x);
        for (u, v) in back.iter().zip(&rhs) {
            assert!((u - v).abs() < 1e-12);
        }
        // y^T B = rhs^T
        let mut y = rhs.clone();
        f.btran(&mut y);
        for c in 0..n {
            let s: f64 = (0..n).map(|r| y[r] * b[r * n + c]).sum();
            assert!((s - rhs[c]).abs() < 1e-12);
        }
        // Replace column 1 of B by a = (1, 1, 1).
        let a = vec![1.0, 1.0, 1.0];
        let mut alpha = a.clone();
        f.ftran(&mut alpha);
        f.update(1, &alpha);
        let mut b2 = b.clone();
        for r in 0..n {
            b2[r * n + 1] = a[r];
        }
        let mut x = rhs.clone();
        f.ftran(&mut x);
        let back = matvec(n, &b2, &x);
        for (u, v) in back.iter().zip(&rhs) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut y = rhs.clone();
        f.btran(&mut y);
        for c in 0..n {
            let s: f64 = (0..n).map(|r| y[r] * b2[r * n + c]).sum();
            assert!((s - rhs[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_basis_is_rejected() {
        assert!(BasisFactor::new(2, vec![1.0, 2.0, 2.0, 4.0]).is_err());
    }
}
