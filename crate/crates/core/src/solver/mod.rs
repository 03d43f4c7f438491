//! Linear programs in row form, their standard form, an in-repo two-phase
//! simplex solver and a brute-force vertex oracle.

mod linalg;
mod lu;
mod oracle;
mod simplex;

use serde::{Deserialize, Serialize};

pub use linalg::{solve_dense, SingularMatrix};
pub use oracle::{vertex_oracle, OracleError, ORACLE_MAX_DIM};
pub use simplex::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// A constraint `sum coeffs[k].1 * x[coeffs[k].0]  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Row {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Minimize `objective . x` subject to `rows` and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub nvars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            nvars,
            objective: vec![0.0; nvars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row::new(coeffs, relation, rhs));
    }

    /// Largest row violation and most negative entry of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlackKind {
    /// `+s` on a `<=` row.
    Slack,
    /// `-s` on a `>=` row.
    Surplus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackInfo {
    pub column: usize,
    pub row: usize,
    pub kind: SlackKind,
}

/// `min c.x` s.t. `A x = b`, `x >= 0`, `b >= 0`.
///
/// Columns `0..n_original` are the original variables, followed by one slack
/// or surplus column per inequality row.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub n_original: usize,
    pub slack_meta: Vec<SlackInfo>,
    /// Relation of each row after sign normalization.
    pub relations: Vec<Relation>,
    /// `-1.0` for rows that were negated.
    pub row_sign: Vec<f64>,
}

impl StandardLp {
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.a[r * self.cols..(r + 1) * self.cols]
    }

    /// Column that can start in the basis for row `r`, if any.
    pub fn initial_slack(&self, r: usize) -> Option<usize> {
        self.slack_meta
            .iter()
            .find(|s| s.row == r && s.kind == SlackKind::Slack)
            .map(|s| s.column)
    }
}

/// Folds every inequality into an equality with a slack or surplus column.
///
/// Rows with a negative right-hand side are negated first; `>=` rows with a
/// zero right-hand side are negated too, so that they get a slack that can
/// start in the basis instead of needing an artificial variable.
pub fn to_standard_form(lp: &LinearProgram) -> StandardLp {
    let rows = lp.rows.len();
    let n = lp.nvars;
    let mut relations = Vec::with_capacity(rows);
    let mut row_sign = Vec::with_capacity(rows);
    let mut b = Vec::with_capacity(rows);
    for r in &lp.rows {
        let negate = r.rhs < 0.0 || (r.rhs == 0.0 && r.relation == Relation::Ge);
        let sign = if negate { -1.0 } else { 1.0 };
        row_sign.push(sign);
        relations.push(if negate {
            r.relation.flipped()
        } else {
            r.relation
        });
        // Avoid a negative zero rhs.
        b.push(if r.rhs == 0.0 { 0.0 } else { sign * r.rhs });
    }
    let n_slack = relations.iter().filter(|&&r| r != Relation::Eq).count();
    let cols = n + n_slack;
    let mut a = vec![0.0; rows * cols];
    let mut slack_meta = Vec::with_capacity(n_slack);
    let mut next = n;
    for (ri, r) in lp.rows.iter().enumerate() {
        for &(j, v) in &r.coeffs {
            a[ri * cols + j] += row_sign[ri] * v;
        }
        let kind = match relations[ri] {
            Relation::Le => Some(SlackKind::Slack),
            Relation::Ge => Some(SlackKind::Surplus),
            Relation::Eq => None,
        };
        if let Some(kind) = kind {
            a[ri * cols + next] = if kind == SlackKind::Slack { 1.0 } else { -1.0 };
            slack_meta.push(SlackInfo {
                column: next,
                row: ri,
                kind,
            });
            next += 1;
        }
    }
    let mut c = lp.objective.clone();
    c.resize(cols, 0.0);
    StandardLp {
        rows,
        cols,
        a,
        b,
        c,
        n_original: n,
        slack_meta,
        relations,
        row_sign,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotRule {
    Bland,
    /// Most negative reduced cost until a zero-step pivot repeats, then
    /// Bland's rule for the rest of the solve.
    DantzigBlandFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Defaults to `50 * (rows + cols)` when `None`.
    pub max_iterations: Option<usize>,
    pub pivot_rule: PivotRule,
    /// Dump the tableau at `trace` log level after every pivot.
    pub dump_tableau: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            max_iterations: None,
            pivot_rule: PivotRule::DantzigBlandFallback,
            dump_tableau: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the original variables (empty unless optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Dual estimate per standard-form row, from the final basis.
    pub duals: Vec<f64>,
    /// `max_j |x_j (c_j - y . A_j)|` over all standard-form columns.
    pub cs_residual: f64,
    /// `(entering column, leaving row)` for every pivot, in order.
    pub pivots: Vec<(usize, usize)>,
    pub switched_to_bland: bool,
}

impl LpSolution {
    pub(crate) fn verdict(
        status: LpStatus,
        iterations: usize,
        pivots: Vec<(usize, usize)>,
        bland: bool,
    ) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            iterations,
            duals: Vec::new(),
            cs_residual: f64::NAN,
            pivots,
            switched_to_bland: bland,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn le_row_gets_one_slack() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![-1.0];
        lp.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        let s = to_standard_form(&lp);
        assert_eq!(s.cols, 2);
        assert_eq!(s.b, vec![1.0]);
        assert_eq!(s.slack_meta[0].kind, SlackKind::Slack);
        assert_eq!(s.initial_slack(0), Some(1));
    }

    #[test]
    fn negative_rhs_le_row_becomes_ge_with_surplus() {
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![(0, 1.0), (1, -3.0)], Relation::Le, -2.0);
        let s = to_standard_form(&lp);
        assert_eq!(s.relations, vec![Relation::Ge]);
        assert_eq!(s.b, vec![2.0]);
        assert_eq!(s.row(0), &[-1.0, 3.0, -1.0]);
        assert_eq!(s.slack_meta[0].kind, SlackKind::Surplus);
        assert_eq!(s.initial_slack(0), None);
    }

    #[test]
    fn zero_rhs_ge_row_is_flipped() {
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Ge, 0.0);
        let s = to_standard_form(&lp);
        assert_eq!(s.relations, vec![Relation::Le]);
        assert_eq!(s.b, vec![0.0]);
        assert!(s.b[0].is_sign_positive());
        assert_eq!(s.row(0), &[-1.0, 1.0, 1.0]);
    }

    #[test]
    fn equality_rows_get_no_slack() {
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        let s = to_standard_form(&lp);
        assert_eq!(s.cols, 2);
        assert!(s.slack_meta.is_empty());
    }
}
