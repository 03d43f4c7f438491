//! Revised two-phase primal simplex.
//!
//! The basis inverse is kept as an LU factorization plus an eta file and is
//! refactored from the original columns every [`REFACTOR_EVERY`] updates and
//! before optimality is accepted, so rounding errors do not accumulate.
//!
//! Inequality rows are loosened by tiny distinct amounts while pivoting, which
//! keeps heavily degenerate problems away from tiny pivots. Once the perturbed
//! problem is optimal the true right-hand side is restored and a few dual
//! simplex pivots repair any basic variable that went out of bounds.

use std::collections::HashSet;

use log::{log_enabled, trace, Level};

use super::linalg::solve_dense;
use super::lu::BasisFactor;
use super::{LpSolution, LpStatus, PivotRule, SlackKind, SolverConfig, StandardLp};

/// Smallest column entry accepted as a pivot.
const PIVOT_TOL: f64 = 1e-7;
/// Pivot floor for the fallback step taken when every improving column was
/// rejected with the regular tolerance.
const SMALL_PIVOT_TOL: f64 = 1e-11;
/// A pivot whose step length is below this is a zero-step pivot.
const ZERO_STEP: f64 = 1e-12;
const REFACTOR_EVERY: usize = 64;
/// Relative size of the right-hand-side perturbation on inequality rows.
const PERTURB: f64 = 1e-7;

/// Deterministic per-column key for the incremental basis hash.
fn column_key(col: usize) -> u64 {
    let mut x = (col as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic value in `[0, 1)` for row `r`.
fn unit(r: usize) -> f64 {
    (column_key(r) >> 11) as f64 / (1u64 << 53) as f64
}

fn pow2(v: f64) -> f64 {
    2f64.powi(v.log2().round() as i32)
}

/// Power of two closest to `1 / sqrt(min * max)` over the positive values.
fn geometric_scale(vals: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = vals
        .filter(|&v| v > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if hi > 0.0 {
        pow2(1.0 / (lo * hi).sqrt())
    } else {
        1.0
    }
}

/// Geometric-mean row and column scale factors for the structural part of
/// `slp`, rounded to powers of two. Slack and surplus columns get the inverse
/// of their row factor so they stay unit columns.
fn equilibrate(slp: &StandardLp) -> (Vec<f64>, Vec<f64>) {
    let n = slp.n_original;
    let mut rs = vec![1.0; slp.rows];
    let mut cs = vec![1.0; slp.cols];
    for _ in 0..4 {
        for (r, scale) in rs.iter_mut().enumerate() {
            *scale = geometric_scale((0..n).map(|c| (slp.at(r, c) * cs[c]).abs()));
        }
        for (c, scale) in cs.iter_mut().enumerate().take(n) {
            *scale = geometric_scale((0..slp.rows).map(|r| (slp.at(r, c) * rs[r]).abs()));
        }
    }
    for s in &slp.slack_meta {
        cs[s.column] = 1.0 / rs[s.row];
    }
    (rs, cs)
}

/// Column-compressed scaled constraint matrix, artificial columns last.
struct Columns {
    start: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl Columns {
    fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.entries[self.start[j]..self.start[j + 1]]
    }
}

enum Ratio {
    Row(usize),
    /// No row limits the step.
    Unbounded,
    /// The step would push a row with a negligible entry out of bounds.
    Reject,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Limit,
}

struct Simplex<'a> {
    cfg: &'a SolverConfig,
    rows: usize,
    ncols: usize,
    /// First artificial column.
    art_start: usize,
    /// Artificial variables are ordinary columns in phase one; afterwards a
    /// basic artificial is pinned at zero.
    phase_one: bool,
    a: Columns,
    b: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    enterable: Vec<bool>,
    /// Pricing tolerance per column, so that it holds in unscaled units.
    dual_tol: Vec<f64>,
    /// Column scale factors; a basic value times its factor is in unscaled units.
    col_scale: Vec<f64>,
    factor: BasisFactor,
    x_b: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    max_iterations: usize,
    iterations: usize,
    bland: bool,
    switched: bool,
    /// Basis hashes seen since the last pivot with a positive step.
    zero_steps: HashSet<u64>,
    basis_hash: u64,
    pivots: Vec<(usize, usize)>,
}

impl Simplex<'_> {
    /// Rebuilds the factorization from the basis columns and recomputes the
    /// basic values. A numerically singular basis keeps the old factors.
    fn refactor(&mut self) {
        let n = self.rows;
        let mut dense = vec![0.0; n * n];
        for (k, &col) in self.basis.iter().enumerate() {
            for &(r, v) in self.a.col(col) {
                dense[r * n + k] = v;
            }
        }
        if let Ok(f) = BasisFactor::new(n, dense) {
            self.factor = f;
            let mut x = self.b.clone();
            self.factor.ftran(&mut x);
            self.x_b = x;
        }
    }

    fn price(&mut self) {
        let mut y: Vec<f64> = self.basis.iter().map(|&c| self.cost[c]).collect();
        self.factor.btran(&mut y);
        for j in 0..self.ncols {
            self.d[j] = if self.is_basic[j] {
                0.0
            } else {
                self.cost[j] - self.a.col(j).iter().map(|&(r, v)| y[r] * v).sum::<f64>()
            };
        }
        self.y = y;
    }

    fn entering(&self) -> Option<usize> {
        let mut candidates = (0..self.ncols)
            .filter(|&j| self.enterable[j] && !self.is_basic[j] && self.d[j] < -self.dual_tol[j]);
        if self.bland {
            return candidates.next();
        }
        candidates.fold(None, |best: Option<usize>, j| match best {
            Some(b) if self.d[b] <= self.d[j] => Some(b),
            _ => Some(j),
        })
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.rows];
        for &(r, v) in self.a.col(j) {
            alpha[r] = v;
        }
        self.factor.ftran(&mut alpha);
        alpha
    }

    fn is_artificial_row(&self, r: usize) -> bool {
        self.basis[r] >= self.art_start
    }

    fn is_pinned_row(&self, r: usize) -> bool {
        !self.phase_one && self.is_artificial_row(r)
    }

    /// Ratio test. After phase one a basic artificial variable blocks at step zero whenever
    /// the entering column touches its row. Bland mode takes the exact
    /// minimum ratio with ties going to the smallest basic variable.
    /// Otherwise a two-pass test admits every row whose ratio is within
    /// `feas_tol / 100` of the minimum and keeps the largest pivot among them, then
    /// the smallest row index.
    fn leaving(&self, alpha: &[f64], pivot_tol: f64) -> Ratio {
        self.pick_row(alpha, pivot_tol)
            .map_or(Ratio::Unbounded, |r| {
                let theta = self.step(r, alpha);
                let breaks = (0..self.rows).any(|i| {
                    alpha[i] > 0.0
                        && alpha[i] <= pivot_tol
                        && !self.is_pinned_row(i)
                        && self.x_b[i] - theta * alpha[i] < -self.cfg.feas_tol
                });
                if breaks {
                    Ratio::Reject
                } else {
                    Ratio::Row(r)
                }
            })
    }

    fn pick_row(&self, alpha: &[f64], pivot_tol: f64) -> Option<usize> {
        let blocked = (0..self.rows)
            .filter(|&r| self.is_pinned_row(r) && alpha[r].abs() > pivot_tol)
            .fold(None, |best: Option<usize>, r| match best {
                Some(b) if alpha[b].abs() >= alpha[r].abs() => Some(b),
                _ => Some(r),
            });
        if blocked.is_some() {
            return blocked;
        }
        let eligible = |r: usize| alpha[r] > pivot_tol && !self.is_pinned_row(r);
        if self.bland {
            let mut best: Option<(usize, f64)> = None;
            for r in (0..self.rows).filter(|&r| eligible(r)) {
                let ratio = self.x_b[r].max(0.0) / alpha[r];
                match best {
                    None => best = Some((r, ratio)),
                    Some((br, bv)) => {
                        let tie = (ratio - bv).abs() <= 1e-12 * (1.0 + bv.abs());
                        if (!tie && ratio < bv) || (tie && self.basis[r] < self.basis[br]) {
                            best = Some((r, ratio));
                        }
                    }
                }
            }
            return best.map(|(r, _)| r);
        }
        let delta = 0.01 * self.cfg.feas_tol;
        let bound = (0..self.rows)
            .filter(|&r| eligible(r))
            .map(|r| (self.x_b[r].max(0.0) + delta) / alpha[r])
            .fold(f64::INFINITY, f64::min);
        (0..self.rows)
            .filter(|&r| eligible(r) && self.x_b[r].max(0.0) / alpha[r] <= bound)
            .fold(None, |best: Option<usize>, r| match best {
                Some(b) if alpha[b] >= alpha[r] => Some(b),
                _ => Some(r),
            })
    }

    fn step(&self, r: usize, alpha: &[f64]) -> f64 {
        if self.is_pinned_row(r) {
            0.0
        } else {
            self.x_b[r].max(0.0) / alpha[r]
        }
    }

    fn pivot(&mut self, r: usize, e: usize, alpha: &[f64]) {
        let theta = self.step(r, alpha);
        self.pivot_by(r, e, alpha, theta);
    }

    /// Swaps `e` into basis position `r`, moving along `alpha` by `theta`.
    fn pivot_by(&mut self, r: usize, e: usize, alpha: &[f64], theta: f64) {
        if theta != 0.0 {
            for (x, &a) in self.x_b.iter_mut().zip(alpha) {
                *x -= theta * a;
            }
        }
        self.x_b[r] = theta;
        self.basis_hash ^= column_key(self.basis[r]) ^ column_key(e);
        self.is_basic[self.basis[r]] = false;
        self.is_basic[e] = true;
        self.basis[r] = e;
        self.factor.update(r, alpha);
        self.iterations += 1;
        self.pivots.push((e, r));
        if self.factor.updates() >= REFACTOR_EVERY {
            self.refactor();
        }
        if self.cfg.dump_tableau {
            self.dump();
        }
    }

    fn dump(&self) {
        if !log_enabled!(Level::Trace) {
            return;
        }
        trace!("iteration {}: basis {:?}", self.iterations, self.basis);
        trace!("  x_B {:?}", self.x_b);
        trace!("  d {:?}", self.d);
    }

    fn phase(&mut self) -> PhaseEnd {
        let phase_one = self.phase_one;
        let mut fresh = false;
        // Columns whose step would break a row with a negligible entry; they
        // come back after the next pivot.
        let mut rejected = Vec::new();
        let mut small_pivots = false;
        // Phase-one columns that only look improving through rounding noise.
        let mut noise = Vec::new();
        let end = loop {
            if self.iterations >= self.max_iterations {
                break PhaseEnd::Limit;
            }
            self.price();
            let Some(e) = self.entering() else {
                if !fresh && self.factor.updates() > 0 {
                    // Confirm optimality on a fresh factorization.
                    self.refactor();
                    fresh = true;
                    continue;
                }
                if !rejected.is_empty() && !small_pivots {
                    for e in rejected.drain(..) {
                        self.enterable[e] = true;
                    }
                    small_pivots = true;
                    continue;
                }
                break PhaseEnd::Optimal;
            };
            let alpha = self.column(e);
            let tol = if small_pivots {
                SMALL_PIVOT_TOL
            } else {
                PIVOT_TOL
            };
            let r = match self.leaving(&alpha, tol) {
                Ratio::Row(r) => r,
                Ratio::Reject => {
                    self.enterable[e] = false;
                    rejected.push(e);
                    continue;
                }
                Ratio::Unbounded => {
                    if !fresh && self.factor.updates() > 0 {
                        self.refactor();
                        fresh = true;
                        continue;
                    }
                    if phase_one {
                        // The phase-one objective is bounded below, so this is
                        // numerical noise in the column; leave it out.
                        self.enterable[e] = false;
                        noise.push(e);
                        continue;
                    }
                    break PhaseEnd::Unbounded;
                }
            };
            fresh = false;
            if !self.bland && self.cfg.pivot_rule == PivotRule::DantzigBlandFallback {
                if self.step(r, &alpha) <= ZERO_STEP {
                    // A degenerate pivot returning to a basis already visited
                    // in this stall means Dantzig pricing is cycling.
                    self.zero_steps.insert(self.basis_hash);
                    let next = self.basis_hash ^ column_key(self.basis[r]) ^ column_key(e);
                    if self.zero_steps.contains(&next) {
                        self.bland = true;
                        self.switched = true;
                        continue;
                    }
                } else {
                    self.zero_steps.clear();
                }
            }
            self.pivot(r, e, &alpha);
            small_pivots = false;
            for e in rejected.drain(..) {
                self.enterable[e] = true;
            }
        };
        for e in rejected.into_iter().chain(noise) {
            self.enterable[e] = true;
        }
        end
    }

    /// Dual simplex pivots that drive the basic solution back to
    /// feasibility once the unperturbed right-hand side is restored. Returns
    /// a status when the solve has to stop here.
    fn restore_feasibility(&mut self) -> Option<LpStatus> {
        let mut fresh = false;
        loop {
            if self.iterations >= self.max_iterations {
                return Some(LpStatus::IterationLimit);
            }
            // A pinned artificial must return to zero from either side.
            let infeasibility = |r: usize| {
                let v = self.x_b[r] * self.col_scale[self.basis[r]];
                if self.is_artificial_row(r) {
                    v.abs()
                } else {
                    -v
                }
            };
            let r = (0..self.rows)
                .filter(|&r| infeasibility(r) > 0.1 * self.cfg.feas_tol)
                .fold(None, |best: Option<usize>, r| match best {
                    Some(b) if infeasibility(b) >= infeasibility(r) => Some(b),
                    _ => Some(r),
                })?;
            self.price();
            let mut rho = vec![0.0; self.rows];
            rho[r] = 1.0;
            self.factor.btran(&mut rho);
            let sign = if self.x_b[r] < 0.0 { -1.0 } else { 1.0 };
            let mut best: Option<(usize, f64, f64)> = None;
            for j in (0..self.ncols).filter(|&j| self.enterable[j] && !self.is_basic[j]) {
                let a = sign * self.a.col(j).iter().map(|&(i, v)| rho[i] * v).sum::<f64>();
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.d[j].max(0.0) / a;
                let better = match best {
                    None => true,
                    Some((_, br, ba)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                        (!tie && ratio < br) || (tie && a > ba)
                    }
                };
                if better {
                    best = Some((j, ratio, a));
                }
            }
            let Some((e, _, _)) = best else {
                if !fresh && self.factor.updates() > 0 {
                    self.refactor();
                    fresh = true;
                    continue;
                }
                return Some(LpStatus::Infeasible);
            };
            fresh = false;
            let alpha = self.column(e);
            let theta = self.x_b[r] / alpha[r];
            self.pivot_by(r, e, &alpha, theta);
        }
    }

    /// Pivots basic artificial variables out wherever some structural column
    /// has a usable entry in their row.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if !self.is_artificial_row(r) {
                continue;
            }
            let mut rho = vec![0.0; self.rows];
            rho[r] = 1.0;
            self.factor.btran(&mut rho);
            let best = (0..self.art_start)
                .filter(|&j| !self.is_basic[j])
                .map(|j| {
                    (
                        j,
                        self.a
                            .col(j)
                            .iter()
                            .map(|&(i, v)| rho[i] * v)
                            .sum::<f64>()
                            .abs(),
                    )
                })
                .filter(|&(_, v)| v > PIVOT_TOL)
                .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                    Some(a) if a.1 >= cur.1 => Some(a),
                    _ => Some(cur),
                });
            if let Some((j, _)) = best {
                let alpha = self.column(j);
                self.pivot(r, j, &alpha);
            }
        }
    }
}

/// Solves `slp` with the two-phase simplex method.
///
/// Phase one minimizes the sum of artificial variables added to rows that
/// have no slack able to start in the basis. Pivoting runs on an
/// equilibrated, perturbed copy of the problem; on optimality the basic
/// solution and the duals are recomputed from the original columns.
pub fn solve(slp: &StandardLp, cfg: &SolverConfig) -> LpSolution {
    let rows = slp.rows;
    let (rs, cs) = equilibrate(slp);
    let mut initial: Vec<Option<usize>> = vec![None; rows];
    for s in &slp.slack_meta {
        if s.kind == SlackKind::Slack {
            initial[s.row] = Some(s.column);
        }
    }
    let art_rows: Vec<usize> = (0..rows).filter(|&r| initial[r].is_none()).collect();
    let ncols = slp.cols + art_rows.len();

    let mut start = Vec::with_capacity(ncols + 1);
    let mut entries = Vec::new();
    for c in 0..slp.cols {
        start.push(entries.len());
        for r in 0..rows {
            let v = slp.at(r, c);
            if v != 0.0 {
                entries.push((r, v * rs[r] * cs[c]));
            }
        }
    }
    for &r in &art_rows {
        start.push(entries.len());
        entries.push((r, 1.0));
    }
    start.push(entries.len());

    let mut basis = vec![0; rows];
    for (k, &r) in art_rows.iter().enumerate() {
        basis[r] = slp.cols + k;
    }
    for (r, init) in initial.iter().enumerate() {
        if let Some(s) = *init {
            basis[r] = s;
        }
    }
    let mut is_basic = vec![false; ncols];
    for &c in &basis {
        is_basic[c] = true;
    }
    let b: Vec<f64> = slp.b.iter().zip(&rs).map(|(b, s)| b * s).collect();
    // Loosening every inequality by a small distinct amount breaks the ties
    // that otherwise force degenerate pivots on tiny entries.
    let mut perturbed = b.clone();
    for s in &slp.slack_meta {
        let r = s.row;
        let eps = PERTURB * (1.0 + b[r]) * (0.5 + 0.5 * unit(r));
        match s.kind {
            SlackKind::Slack => perturbed[r] += eps,
            SlackKind::Surplus => perturbed[r] -= eps.min(0.5 * b[r]),
        }
    }
    let mut identity = vec![0.0; rows * rows];
    for r in 0..rows {
        identity[r * rows + r] = 1.0;
    }
    let mut sx = Simplex {
        cfg,
        rows,
        ncols,
        art_start: slp.cols,
        phase_one: !art_rows.is_empty(),
        a: Columns { start, entries },
        b: perturbed.clone(),
        cost: vec![0.0; ncols],
        basis_hash: basis.iter().fold(0, |h, &c| h ^ column_key(c)),
        basis,
        is_basic,
        enterable: vec![true; ncols],
        dual_tol: (0..ncols)
            .map(|j| 0.01 * cfg.opt_tol * cs.get(j).map_or(1.0, |&c| c.max(1e-4)))
            .collect(),
        col_scale: (0..ncols)
            .map(|j| cs.get(j).copied().unwrap_or(1.0))
            .collect(),
        factor: BasisFactor::new(rows, identity).expect("identity is nonsingular"),
        x_b: perturbed,
        y: vec![0.0; rows],
        d: vec![0.0; ncols],
        max_iterations: cfg.max_iterations.unwrap_or(50 * (rows + slp.cols)),
        iterations: 0,
        bland: cfg.pivot_rule == PivotRule::Bland,
        switched: false,
        zero_steps: HashSet::new(),
        pivots: Vec::new(),
    };
    let finish =
        |sx: Simplex, status| LpSolution::verdict(status, sx.iterations, sx.pivots, sx.switched);

    if !art_rows.is_empty() {
        for c in sx.cost.iter_mut().skip(slp.cols) {
            *c = 1.0;
        }
        match sx.phase() {
            PhaseEnd::Limit => return finish(sx, LpStatus::IterationLimit),
            PhaseEnd::Unbounded => unreachable!("phase one never reports unboundedness"),
            PhaseEnd::Optimal => {}
        }
        let infeasibility: f64 = (0..rows)
            .filter(|&r| sx.is_artificial_row(r))
            .map(|r| sx.x_b[r])
            .sum();
        if infeasibility > cfg.feas_tol {
            return finish(sx, LpStatus::Infeasible);
        }
        sx.phase_one = false;
        sx.drive_out_artificials();
        for j in slp.cols..ncols {
            sx.enterable[j] = false;
        }
        sx.zero_steps.clear();
    }

    for (j, cost) in sx.cost.iter_mut().enumerate() {
        *cost = if j < slp.cols { slp.c[j] * cs[j] } else { 0.0 };
    }
    match sx.phase() {
        PhaseEnd::Limit => return finish(sx, LpStatus::IterationLimit),
        PhaseEnd::Unbounded => return finish(sx, LpStatus::Unbounded),
        PhaseEnd::Optimal => {}
    }
    sx.b = b;
    sx.refactor();
    if let Some(status) = sx.restore_feasibility() {
        return finish(sx, status);
    }
    match sx.phase() {
        PhaseEnd::Limit => return finish(sx, LpStatus::IterationLimit),
        PhaseEnd::Unbounded => return finish(sx, LpStatus::Unbounded),
        PhaseEnd::Optimal => {}
    }

    // Recompute the basic solution and duals from the original data.
    let column = |col: usize, r: usize| -> f64 {
        if col < slp.cols {
            slp.at(r, col)
        } else if art_rows[col - slp.cols] == r {
            1.0
        } else {
            0.0
        }
    };
    let mut bmat = vec![0.0; rows * rows];
    let mut bt = vec![0.0; rows * rows];
    for (k, &col) in sx.basis.iter().enumerate() {
        for r in 0..rows {
            let v = column(col, r);
            bmat[r * rows + k] = v;
            bt[k * rows + r] = v;
        }
    }
    let x_b = solve_dense(bmat, slp.b.clone()).unwrap_or_else(|_| {
        sx.basis
            .iter()
            .zip(&sx.x_b)
            .map(|(&col, &v)| if col < slp.cols { v * cs[col] } else { 0.0 })
            .collect()
    });
    let c_b: Vec<f64> = sx
        .basis
        .iter()
        .map(|&col| if col < slp.cols { slp.c[col] } else { 0.0 })
        .collect();
    let y =
        solve_dense(bt, c_b).unwrap_or_else(|_| sx.y.iter().zip(&rs).map(|(v, s)| v * s).collect());

    let mut x = vec![0.0; slp.cols];
    for (k, &col) in sx.basis.iter().enumerate() {
        if col < slp.cols {
            x[col] = x_b[k];
        }
    }
    let objective: f64 = slp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    let mut cs_residual: f64 = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        let reduced = slp.c[j] - (0..rows).map(|r| y[r] * slp.at(r, j)).sum::<f64>();
        cs_residual = cs_residual.max((xj * reduced).abs());
    }
    x.truncate(slp.n_original);
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        iterations: sx.iterations,
        duals: y.iter().zip(&slp.row_sign).map(|(v, s)| v * s).collect(),
        cs_residual,
        pivots: sx.pivots,
        switched_to_bland: sx.switched,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{to_standard_form, LinearProgram, Relation};
    use super::*;

    type TestRow = (Vec<(usize, f64)>, Relation, f64);

    fn lp(nvars: usize, objective: Vec<f64>, rows: Vec<TestRow>) -> LinearProgram {
        let mut p = LinearProgram::new(nvars);
        p.objective = objective;
        for (c, rel, b) in rows {
            p.add_row(c, rel, b);
        }
        p
    }

    #[test]
    fn unique_vertex_optimum() {
        let p = lp(
            2,
            vec![-1.0, -2.0],
            vec![(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0)],
        );
        let s = solve(&to_standard_form(&p), &SolverConfig::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![0.0, 1.0]);
        assert_eq!(s.objective, -2.0);
        assert!(s.cs_residual <= 1e-12);
    }

    #[test]
    fn infeasible_toy() {
        let p = lp(1, vec![0.0], vec![(vec![(0, 1.0)], Relation::Le, -1.0)]);
        let s = solve(&to_standard_form(&p), &SolverConfig::default());
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_toy() {
        let p = lp(1, vec![-1.0], vec![]);
        let s = solve(&to_standard_form(&p), &SolverConfig::default());
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_ge_rows_use_phase_one() {
        // min x + y  s.t. x + 2y = 4, x >= 1
        let p = lp(
            2,
            vec![1.0, 1.0],
            vec![
                (vec![(0, 1.0), (1, 2.0)], Relation::Eq, 4.0),
                (vec![(0, 1.0)], Relation::Ge, 1.0),
            ],
        );
        let s = solve(&to_standard_form(&p), &SolverConfig::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.5).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let p = lp(
            2,
            vec![1.0, 0.0],
            vec![
                (vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0),
                (vec![(0, 2.0), (1, 2.0)], Relation::Eq, 2.0),
            ],
        );
        let s = solve(&to_standard_form(&p), &SolverConfig::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-12);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let p = lp(
            2,
            vec![-1.0, -2.0],
            vec![(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0)],
        );
        let cfg = SolverConfig {
            max_iterations: Some(0),
            ..Default::default()
        };
        assert_eq!(
            solve(&to_standard_form(&p), &cfg).status,
            LpStatus::IterationLimit
        );
    }

    #[test]
    fn bland_only_rule_agrees() {
        let p = lp(
            3,
            vec![-3.0, -1.0, -2.0],
            vec![
                (vec![(0, 1.0), (1, 1.0), (2, 3.0)], Relation::Le, 30.0),
                (vec![(0, 2.0), (1, 2.0), (2, 5.0)], Relation::Le, 24.0),
                (vec![(0, 4.0), (1, 1.0), (2, 2.0)], Relation::Le, 36.0),
            ],
        );
        let slp = to_standard_form(&p);
        let a = solve(&slp, &SolverConfig::default());
        let b = solve(
            &slp,
            &SolverConfig {
                pivot_rule: PivotRule::Bland,
                ..Default::default()
            },
        );
        assert!((a.objective - b.objective).abs() < 1e-9);
        assert!((a.objective + 28.0).abs() < 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic example that cycles under textbook Dantzig pricing.
        let p = lp(
            4,
            vec![-0.75, 150.0, -0.02, 6.0],
            vec![
                (
                    vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)],
                    Relation::Le,
                    0.0,
                ),
                (
                    vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)],
                    Relation::Le,
                    0.0,
                ),
                (vec![(2, 1.0)], Relation::Le, 1.0),
            ],
        );
        for pivot_rule in [PivotRule::DantzigBlandFallback, PivotRule::Bland] {
            let cfg = SolverConfig {
                pivot_rule,
                ..Default::default()
            };
            let s = solve(&to_standard_form(&p), &cfg);
            assert_eq!(s.status, LpStatus::Optimal);
            assert!((s.objective + 0.05).abs() < 1e-9);
        }
    }
}
