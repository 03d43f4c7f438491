//! Load-by-load comparison strategies: proportional split, equal-completion
//! single installment, and greedy multi-installment.
//!
//! All strategies fix fractions round by round and then time the result with
//! [`earliest_schedule`], so their schedules are checked by the validator with
//! the same arithmetic as every other schedule in the crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{InstallmentCounts, Load, Platform, Schedule, Workload};
use crate::solver::solve_dense;
use crate::timing::earliest_schedule;

/// Fractions below this are treated as infeasible rather than round-off.
pub const NEGATIVE_TOL: f64 = -1e-12;
/// Safety stop for the uncapped greedy.
pub const UNCAPPED_MAX_INSTALLMENTS: usize = 10_000;
/// The uncapped greedy gives up once an installment is this small.
pub const UNCAPPED_MIN_SIZE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("installment cap must be at least 1")]
    ZeroCap,
    #[error("outside the two-processor example configuration: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeuristicStatus {
    Ok,
    NoSolution,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Installments used per load, for the loads that were scheduled.
    pub installments: Vec<usize>,
    pub failed_load: Option<usize>,
    pub reason: Option<String>,
    /// Fraction of the failed load that could be distributed.
    pub covered: Option<f64>,
    /// Limit of the greedy installment series on the two-processor example.
    pub coverage_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub status: HeuristicStatus,
    pub schedule: Option<Schedule>,
    pub diagnostics: Diagnostics,
}

impl HeuristicOutcome {
    pub fn is_ok(&self) -> bool {
        self.status == HeuristicStatus::Ok
    }

    pub fn makespan(&self) -> Option<f64> {
        self.schedule.as_ref().map(|s| s.makespan)
    }

    fn failed(mut diagnostics: Diagnostics, load: usize, reason: String) -> Self {
        diagnostics.failed_load = Some(load);
        diagnostics.reason = Some(reason);
        HeuristicOutcome {
            status: HeuristicStatus::NoSolution,
            schedule: None,
            diagnostics,
        }
    }
}

/// Timing state left behind by the previous round.
#[derive(Debug, Clone)]
struct RoundState {
    /// Completion of the previous computation on each processor.
    ready: Vec<f64>,
    /// End of the previous transfer on each link (0 before the first round).
    link_end: Vec<f64>,
}

impl RoundState {
    fn new(p: &Platform) -> Self {
        RoundState {
            ready: p.tau().to_vec(),
            link_end: vec![0.0; p.links()],
        }
    }

    /// Earliest start of the next transfer on link `l` from the previous round.
    fn link_free(&self, l: usize) -> f64 {
        let own = self.link_end[l];
        match self.link_end.get(l + 1) {
            Some(&next) => own.max(next),
            None => own,
        }
    }

    /// Times one round of `alpha` (fractions of `load`) as early as possible.
    /// Returns the transfer end times of this round.
    fn advance(&mut self, p: &Platform, load: Load, alpha: &[f64]) -> Vec<f64> {
        let links = p.links();
        let mut ends = Vec::with_capacity(links);
        for l in 0..links {
            let mut s = self.link_free(l);
            if l > 0 {
                s = s.max(ends[l - 1]);
            }
            let below: f64 = alpha[l + 1..].iter().sum();
            ends.push(s + p.z()[l] * load.vcomm * below);
        }
        for (i, a) in alpha.iter().enumerate() {
            let mut c = self.ready[i];
            if i > 0 {
                c = c.max(ends[i - 1]);
            }
            self.ready[i] = c + p.w()[i] * a * load.vcomp;
        }
        self.link_end.clone_from(&ends);
        ends
    }
}

#[derive(Debug)]
enum SplitError {
    Singular,
    Negative(usize, f64),
}

/// Fractions `alpha` summing to `amount` such that every processor finishes
/// this round at the same time, plus that time.
fn equal_completion(
    p: &Platform,
    load: Load,
    state: &RoundState,
    amount: f64,
) -> Result<(Vec<f64>, f64), SplitError> {
    let m = p.m();
    let w = p.w();
    let z = p.z();
    if m == 1 {
        return Ok((vec![amount], state.ready[0] + w[0] * amount * load.vcomp));
    }

    // Sequential evaluation for a trial finish time: alpha_0 is fixed by T,
    // which fixes the first transfer, then alpha_1, and so on.
    let eval = |t: f64| -> Vec<f64> {
        let mut alpha = Vec::with_capacity(m);
        alpha.push((t - state.ready[0]) / (w[0] * load.vcomp));
        let mut sent = alpha[0];
        let mut prev_end = f64::NEG_INFINITY;
        for i in 1..m {
            let l = i - 1;
            let e = state.link_free(l).max(prev_end) + z[l] * load.vcomm * (amount - sent);
            prev_end = e;
            let start = state.ready[i].max(e);
            let a = (t - start) / (w[i] * load.vcomp);
            sent += a;
            alpha.push(a);
        }
        alpha
    };
    let excess = |t: f64| eval(t).iter().sum::<f64>() - amount;

    // Every alpha is <= 0 at the earliest ready time, so the root is above it.
    let mut lo = state.ready.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut step = w
        .iter()
        .map(|wi| wi * amount * load.vcomp)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut hi = lo + step;
    let mut guard = 0;
    while excess(hi) < 0.0 && guard < 2000 {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        guard += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_root = 0.5 * (lo + hi);
    let approx = eval(t_root);

    // Freeze which bound is active in each max() and solve the resulting
    // affine system exactly.
    let mut from_free = vec![false; m - 1];
    let mut waits_data = vec![false; m];
    {
        let mut sent = approx[0];
        let mut prev_end = f64::NEG_INFINITY;
        for i in 1..m {
            let l = i - 1;
            from_free[l] = state.link_free(l) >= prev_end;
            let e = state.link_free(l).max(prev_end) + z[l] * load.vcomm * (amount - sent);
            prev_end = e;
            waits_data[i] = e > state.ready[i];
            sent += approx[i];
        }
    }
    // Unknowns are alpha and (T - t_root) / unit, with every row scaled to a
    // unit max-norm; link and compute coefficients can differ by many orders
    // of magnitude.
    let unit = w[0] * load.vcomp;
    let n = m + 1;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..m {
        let row = &mut a[i * n..(i + 1) * n];
        row[m] = -unit;
        row[i] += w[i] * load.vcomp;
        if waits_data[i] {
            // start_i = free(k) + sum_{q=k}^{i-1} z_q Vc sum_{r>q} alpha_r
            let mut k = i - 1;
            while !from_free[k] {
                k -= 1;
            }
            b[i] = t_root - state.link_free(k);
            for q in k..i {
                for r in q + 1..m {
                    row[r] += z[q] * load.vcomm;
                }
            }
        } else {
            b[i] = t_root - state.ready[i];
        }
        let norm = row.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for v in row.iter_mut() {
            *v /= norm;
        }
        b[i] /= norm;
    }
    for v in &mut a[m * n..m * n + m] {
        *v = 1.0;
    }
    b[m] = amount;
    let sol = solve_dense(a, b).map_err(|_| SplitError::Singular)?;
    let t_exact = t_root + unit * sol[m];
    let mut alpha = sol[..m].to_vec();
    // Re-time the solved fractions forward, which is well conditioned, and
    // confirm the frozen branches hold: everyone finishes at t_exact.
    let mut check = state.clone();
    check.advance(p, load, &alpha);
    let tol = 1e-9 * t_exact.abs().max(f64::MIN_POSITIVE);
    let consistent = check.ready.iter().all(|f| (f - t_exact).abs() <= tol);
    let scale = amount.abs().max(f64::MIN_POSITIVE);
    let t = if consistent {
        t_exact
    } else {
        alpha = approx;
        t_root
    };
    if let Some((i, &v)) = alpha
        .iter()
        .enumerate()
        .find(|(_, &v)| v < NEGATIVE_TOL * scale)
    {
        return Err(SplitError::Negative(i, v));
    }
    for v in &mut alpha {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok((alpha, t))
}

fn split_reason(e: &SplitError) -> String {
    match e {
        SplitError::Singular => "equal-completion system is singular".to_string(),
        SplitError::Negative(i, v) => {
            format!("processor {} would get a negative fraction {v:e}", i + 1)
        }
    }
}

/// Installments of each load, each a vector of per-processor fractions.
type Plan = Vec<Vec<Vec<f64>>>;

fn assemble(p: &Platform, wl: &Workload, plan: Plan) -> Schedule {
    let counts: Vec<usize> = plan.iter().map(Vec::len).collect();
    let q = InstallmentCounts::new(counts).expect("every load has an installment");
    let fractions = (0..p.m())
        .map(|i| {
            plan.iter()
                .map(|load| load.iter().map(|inst| inst[i]).collect())
                .collect()
        })
        .collect();
    earliest_schedule(p, wl, &q, fractions, false)
}

fn finish(
    p: &Platform,
    wl: &Workload,
    plan: Plan,
    mut diagnostics: Diagnostics,
) -> HeuristicOutcome {
    diagnostics.installments = plan.iter().map(Vec::len).collect();
    HeuristicOutcome {
        status: HeuristicStatus::Ok,
        schedule: Some(assemble(p, wl, plan)),
        diagnostics,
    }
}

/// One installment per load, split in proportion to processor speed.
pub fn simple_schedule(p: &Platform, wl: &Workload) -> HeuristicOutcome {
    let speed: Vec<f64> = p.w().iter().map(|w| 1.0 / w).collect();
    let total: f64 = speed.iter().sum();
    let share: Vec<f64> = speed.iter().map(|s| s / total).collect();
    let plan = vec![vec![share]; wl.len()];
    finish(p, wl, plan, Diagnostics::default())
}

/// Relative slack allowed when checking that a transfer arrives in time.
const BUSY_TOL: f64 = 1e-11;

fn arrives_in_time(arrival: f64, ready: f64) -> bool {
    arrival <= ready + BUSY_TOL * ready.abs().max(arrival.abs())
}

/// One installment per load, sized so all processors finish it together.
///
/// From the second load on, each processor must receive its data before it
/// finishes the previous load; otherwise the strategy reports no solution.
pub fn single_inst(p: &Platform, wl: &Workload) -> HeuristicOutcome {
    let mut state = RoundState::new(p);
    let mut plan = Vec::with_capacity(wl.len());
    let mut diag = Diagnostics::default();
    for (n, &load) in wl.loads().iter().enumerate() {
        let (alpha, _) = match equal_completion(p, load, &state, 1.0) {
            Ok(r) => r,
            Err(e) => {
                diag.installments = plan.iter().map(Vec::len).collect();
                return HeuristicOutcome::failed(diag, n, split_reason(&e));
            }
        };
        let before = state.ready.clone();
        let ends = state.advance(p, load, &alpha);
        if n > 0 {
            if let Some(i) = (1..p.m()).find(|&i| !arrives_in_time(ends[i - 1], before[i])) {
                diag.installments = plan.iter().map(Vec::len).collect();
                return HeuristicOutcome::failed(
                    diag,
                    n,
                    format!(
                        "processor {} would idle waiting for load {} (data at {:.6e}, free at {:.6e})",
                        i + 1,
                        n + 1,
                        ends[i - 1],
                        before[i]
                    ),
                );
            }
        }
        plan.push(vec![alpha]);
    }
    finish(p, wl, plan, diag)
}

/// Largest finish time for an installment that keeps every processor busy:
/// each processor starts computing it the moment its previous work ends.
/// `None` means the links never constrain it.
fn keep_busy_finish(p: &Platform, load: Load, state: &RoundState) -> Option<f64> {
    let m = p.m();
    let w = p.w();
    let z = p.z();
    // With alpha_r(T) = (T - ready_r) / (w_r Vp), the transfer on link q
    // carries slope(q) * T - offset(q) units.
    let slope: Vec<f64> = (0..p.links())
        .map(|q| (q + 1..m).map(|r| 1.0 / (w[r] * load.vcomp)).sum())
        .collect();
    let offset: Vec<f64> = (0..p.links())
        .map(|q| {
            (q + 1..m)
                .map(|r| state.ready[r] / (w[r] * load.vcomp))
                .sum()
        })
        .collect();
    let mut best: Option<f64> = None;
    for l in 0..p.links() {
        let mut s = 0.0;
        let mut o = 0.0;
        for k in (0..=l).rev() {
            s += z[k] * load.vcomm * slope[k];
            o += z[k] * load.vcomm * offset[k];
            if s <= 0.0 {
                continue;
            }
            let t = (state.ready[l + 1] - state.link_free(k) + o) / s;
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cap {
    Limit(usize),
    Unlimited,
}

fn greedy(p: &Platform, wl: &Workload, cap: Cap) -> HeuristicOutcome {
    let mut diag = Diagnostics {
        coverage_bound: example_ratio(p, wl)
            .ok()
            .and_then(|l| uncapped_feasibility_bound(l).ok()),
        ..Diagnostics::default()
    };
    let mut state = RoundState::new(p);
    let mut plan: Plan = Vec::with_capacity(wl.len());
    for (n, &load) in wl.loads().iter().enumerate() {
        let mut installments = Vec::new();
        let mut remaining = 1.0;
        if n > 0 {
            loop {
                let last = match cap {
                    Cap::Limit(c) => installments.len() + 1 >= c,
                    Cap::Unlimited => false,
                };
                if last {
                    break;
                }
                let latest = state
                    .ready
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let t = match keep_busy_finish(p, load, &state) {
                    Some(t) if t > latest => t,
                    // Links are free enough to send everything at once, or so
                    // busy that no positive installment keeps processors busy.
                    _ => break,
                };
                let alpha: Vec<f64> = (0..p.m())
                    .map(|i| ((t - state.ready[i]) / (p.w()[i] * load.vcomp)).max(0.0))
                    .collect();
                let size: f64 = alpha.iter().sum();
                if size >= remaining {
                    break;
                }
                if cap == Cap::Unlimited
                    && (size < UNCAPPED_MIN_SIZE
                        || installments.len() + 1 >= UNCAPPED_MAX_INSTALLMENTS)
                {
                    diag.covered = Some(1.0 - remaining);
                    diag.installments = plan.iter().map(Vec::len).collect();
                    let bound = diag
                        .coverage_bound
                        .map(|b| format!("; coverage bound {b}"))
                        .unwrap_or_default();
                    return HeuristicOutcome::failed(
                        diag,
                        n,
                        format!(
                            "installments of load {} shrink without covering it (covered {:.6}{bound})",
                            n + 1,
                            1.0 - remaining
                        ),
                    );
                }
                state.advance(p, load, &alpha);
                remaining -= size;
                installments.push(alpha);
            }
        }
        match equal_completion(p, load, &state, remaining) {
            Ok((alpha, _)) => {
                state.advance(p, load, &alpha);
                installments.push(alpha);
            }
            Err(e) => {
                diag.covered = Some(1.0 - remaining);
                diag.installments = plan.iter().map(Vec::len).collect();
                return HeuristicOutcome::failed(diag, n, split_reason(&e));
            }
        }
        plan.push(installments);
    }
    finish(p, wl, plan, diag)
}

/// Greedy multi-installment strategy with at most `cap` installments per
/// load; the last one carries whatever is left.
///
/// The first load goes out in a single equal-completion installment. Each
/// later installment is the largest one whose data reaches every processor
/// before it finishes its previous work, with all processors finishing the
/// installment together.
pub fn multi_inst(
    p: &Platform,
    wl: &Workload,
    cap: usize,
) -> Result<HeuristicOutcome, HeuristicError> {
    if cap == 0 {
        return Err(HeuristicError::ZeroCap);
    }
    Ok(greedy(p, wl, Cap::Limit(cap)))
}

/// [`multi_inst`] without a cap: fails when installments shrink towards zero
/// before a load is covered.
pub fn multi_inst_uncapped(p: &Platform, wl: &Workload) -> HeuristicOutcome {
    greedy(p, wl, Cap::Unlimited)
}

/// Share of the second load the greedy can distribute in `q` installments on
/// the two-processor example with computation/communication ratio `lambda`.
pub fn coverage_after(lambda: f64, q: u32) -> Result<f64, HeuristicError> {
    check_lambda(lambda)?;
    let denom = 2.0 * lambda * lambda - lambda - 1.0;
    if (lambda - 1.0).abs() < 1e-12 {
        return Ok(2.0 * q as f64 / 3.0);
    }
    Ok(2.0 * (lambda.powi(q as i32) - 1.0) * lambda * lambda / denom)
}

/// Limit of [`coverage_after`] as `q` grows; below 1 the uncapped greedy
/// cannot finish the second load.
pub fn uncapped_feasibility_bound(lambda: f64) -> Result<f64, HeuristicError> {
    check_lambda(lambda)?;
    if lambda >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * lambda * lambda / ((1.0 - lambda) * (2.0 * lambda + 1.0)))
}

/// Installment count the greedy uses for the second load on the example, or
/// `None` when no finite count suffices.
pub fn example_installments(lambda: f64) -> Result<Option<u32>, HeuristicError> {
    check_lambda(lambda)?;
    if (lambda - 1.0).abs() < 1e-12 {
        return Ok(Some(2));
    }
    let arg = (4.0 * lambda * lambda - lambda - 1.0) / (2.0 * lambda * lambda);
    if arg <= 0.0 {
        return Ok(None);
    }
    let q = (arg.ln() / lambda.ln()).ceil();
    Ok(Some(q.max(1.0) as u32))
}

fn check_lambda(lambda: f64) -> Result<(), HeuristicError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(HeuristicError::Domain(format!(
            "ratio must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Computation/communication ratio of a two-processor instance with equal
/// processors, two identical loads and no start-up delays.
pub fn example_ratio(p: &Platform, wl: &Workload) -> Result<f64, HeuristicError> {
    let bad = |what: &str| Err(HeuristicError::Domain(what.to_string()));
    if p.m() != 2 {
        return bad("needs exactly two processors");
    }
    if p.w()[0] != p.w()[1] {
        return bad("processors must be identical");
    }
    if p.tau().iter().any(|&t| t != 0.0) {
        return bad("processors must be available at time 0");
    }
    if wl.len() != 2 || wl.get(0) != wl.get(1) {
        return bad("needs two identical loads");
    }
    let load = wl.get(0);
    let comm = p.z()[0] * load.vcomm;
    if comm <= 0.0 {
        return bad("link must have a positive cost");
    }
    Ok(p.w()[0] * load.vcomp / comm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstallmentBound {
    Finite(u64),
    /// No start-up cost, so any number of installments is free.
    Unbounded,
}

/// Largest installment count whose start-up overhead keeps the ratio of
/// actual to estimated communication volume at or below `rho_max`.
pub fn min_installments_for_overhead(
    vcomm: f64,
    m: usize,
    startup: f64,
    rho_max: f64,
) -> Result<InstallmentBound, HeuristicError> {
    if !(vcomm > 0.0 && vcomm.is_finite()) {
        return Err(HeuristicError::InvalidArgument(format!(
            "communication volume must be positive, got {vcomm}"
        )));
    }
    if m < 2 {
        return Err(HeuristicError::InvalidArgument(
            "needs at least two processors".to_string(),
        ));
    }
    if !(startup >= 0.0 && startup.is_finite()) {
        return Err(HeuristicError::InvalidArgument(format!(
            "start-up cost must be non-negative, got {startup}"
        )));
    }
    if !(rho_max >= 1.0 && rho_max.is_finite()) {
        return Err(HeuristicError::InvalidArgument(format!(
            "overhead ratio must be at least 1, got {rho_max}"
        )));
    }
    if startup == 0.0 {
        return Ok(InstallmentBound::Unbounded);
    }
    let q = (rho_max - 1.0) * vcomm / ((m - 1) as f64 * startup);
    // Absorb round-off when q lands on an integer.
    let q = (q * (1.0 + 1e-9)).floor();
    Ok(InstallmentBound::Finite(q.max(0.0) as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate_schedule, ValidationOptions};

    fn example(lambda: f64) -> (Platform, Workload) {
        (
            Platform::idle(vec![lambda, lambda], vec![1.0]).unwrap(),
            Workload::uniform(2, 1.0, 1.0).unwrap(),
        )
    }

    fn valid(p: &Platform, wl: &Workload, s: &Schedule) -> bool {
        validate_schedule(p, wl, s, &ValidationOptions::with_tol(1e-9))
            .map(|r| r.ok)
            .unwrap_or(false)
    }

    #[test]
    fn single_inst_at_two() {
        let (p, wl) = example(2.0);
        let out = single_inst(&p, &wl);
        let s = out.schedule.as_ref().unwrap();
        assert!((s.fractions[0][0][0] - 0.6).abs() < 1e-12);
        assert!((s.fractions[1][0][0] - 0.4).abs() < 1e-12);
        assert!((s.fractions[0][1][0] - 0.5).abs() < 1e-12);
        assert!((s.makespan - 2.2).abs() < 1e-12);
        assert!(valid(&p, &wl, s));
    }

    #[test]
    fn single_inst_fails_below_threshold() {
        let (p, wl) = example(1.0);
        let out = single_inst(&p, &wl);
        assert_eq!(out.status, HeuristicStatus::NoSolution);
        assert_eq!(out.diagnostics.failed_load, Some(1));
    }

    #[test]
    fn greedy_at_three_quarters() {
        let (p, wl) = example(0.75);
        let out = multi_inst(&p, &wl, 100).unwrap();
        assert_eq!(out.diagnostics.installments, vec![1, 3]);
        let s = out.schedule.as_ref().unwrap();
        assert!((s.makespan - 0.9).abs() < 1e-12);
        assert!(valid(&p, &wl, s));
    }

    #[test]
    fn uncapped_greedy_stalls_at_half() {
        let (p, wl) = example(0.5);
        let out = multi_inst_uncapped(&p, &wl);
        assert_eq!(out.status, HeuristicStatus::NoSolution);
        assert!((out.diagnostics.covered.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(out.diagnostics.coverage_bound, Some(0.5));
        assert!(multi_inst(&p, &wl, 5).unwrap().is_ok());
    }

    #[test]
    fn simple_is_proportional() {
        let p = Platform::idle(vec![1.0, 3.0], vec![0.5]).unwrap();
        let wl = Workload::uniform(3, 1.0, 1.0).unwrap();
        let s = simple_schedule(&p, &wl).schedule.unwrap();
        for n in 0..3 {
            assert!((s.fractions[0][n][0] - 0.75).abs() < 1e-15);
        }
        assert!(valid(&p, &wl, &s));
    }

    #[test]
    fn installment_formula_and_overhead() {
        assert_eq!(example_installments(0.75).unwrap(), Some(3));
        assert_eq!(example_installments(1.0).unwrap(), Some(2));
        assert_eq!(example_installments(0.5).unwrap(), None);
        assert_eq!(
            min_installments_for_overhead(1000.0, 10, 10.0, 1.9).unwrap(),
            InstallmentBound::Finite(10)
        );
        assert_eq!(
            min_installments_for_overhead(1000.0, 10, 0.0, 1.9).unwrap(),
            InstallmentBound::Unbounded
        );
        assert!(coverage_after(0.0, 1).is_err());
    }
}
