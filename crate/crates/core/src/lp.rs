//! The exact linear program for a prescribed number of installments per load.
//!
//! Every start/end time, every fraction and the makespan are LP variables;
//! rates, availability dates and volumes are coefficients. Variables are laid
//! out load by load, then installment by installment, with processors (or
//! links) innermost. Rows follow the same order, families in increasing
//! number within each round, then one normalization row per load and the
//! makespan rows last.
//!
//! The reduced form substitutes the equality-defined end times
//! `E = S + z V_comm sum gamma` and `Ce = Cs + w gamma V_comp` into every row
//! where they appear, which removes families 5 and 7 and their variables.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{grid, InstallmentCounts, ModelError, Platform, Schedule, Workload};
use crate::solver::{
    solve, to_standard_form, LinearProgram, LpSolution, LpStatus, Relation, SolverConfig,
};
use crate::timing::{earliest_schedule, normalize_fractions};

#[derive(Debug, Error)]
pub enum LpError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no variable or substitution for {0}")]
    MissingVariable(String),
    #[error("solver stopped with status {0:?}")]
    Solver(LpStatus),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Semantic tag of an LP variable. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarTag {
    CommStart {
        link: usize,
        load: usize,
        inst: usize,
    },
    CommEnd {
        link: usize,
        load: usize,
        inst: usize,
    },
    CompStart {
        proc: usize,
        load: usize,
        inst: usize,
    },
    CompEnd {
        proc: usize,
        load: usize,
        inst: usize,
    },
    Fraction {
        proc: usize,
        load: usize,
        inst: usize,
    },
    Makespan,
}

impl fmt::Display for VarTag {
    /// LP-file name, 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarTag::CommStart { link, load, inst } => {
                write!(f, "S_{}_{}_{}", link + 1, load + 1, inst + 1)
            }
            VarTag::CommEnd { link, load, inst } => {
                write!(f, "E_{}_{}_{}", link + 1, load + 1, inst + 1)
            }
            VarTag::CompStart { proc, load, inst } => {
                write!(f, "Cs_{}_{}_{}", proc + 1, load + 1, inst + 1)
            }
            VarTag::CompEnd { proc, load, inst } => {
                write!(f, "Ce_{}_{}_{}", proc + 1, load + 1, inst + 1)
            }
            VarTag::Fraction { proc, load, inst } => {
                write!(f, "g_{}_{}_{}", proc + 1, load + 1, inst + 1)
            }
            VarTag::Makespan => write!(f, "makespan"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LpForm {
    /// One variable per symbol, families 5 and 7 as equality rows.
    #[default]
    Full,
    /// End times substituted away.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub form: LpForm,
    /// Also require `Cs(i,n,j) >= E(i,n,j)` for `2 <= i <= m-1`.
    pub strict_forward: bool,
}

impl BuildOptions {
    pub fn reduced() -> Self {
        BuildOptions {
            form: LpForm::Reduced,
            ..Default::default()
        }
    }
}

/// A quantity defined as a linear combination of LP variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub tag: VarTag,
    pub terms: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub program: LinearProgram,
    pub var_meta: Vec<VarTag>,
    /// Constraint family (1..=13) of every row.
    pub row_families: Vec<u8>,
    /// End times that the reduced form expresses through other variables.
    pub derived: Vec<Derived>,
    pub processors: usize,
    pub q: InstallmentCounts,
    pub form: LpForm,
}

impl LpProblem {
    pub fn nvars(&self) -> usize {
        self.program.nvars
    }

    pub fn nrows(&self) -> usize {
        self.program.rows.len()
    }

    pub fn makespan_var(&self) -> usize {
        self.program.nvars - 1
    }

    pub fn rows_of_family(&self, family: u8) -> usize {
        self.row_families.iter().filter(|&&f| f == family).count()
    }
}

#[derive(Debug, Clone, Default)]
struct Expr {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl Expr {
    fn var(v: usize) -> Self {
        Expr {
            terms: vec![(v, 1.0)],
            constant: 0.0,
        }
    }

    fn constant(c: f64) -> Self {
        Expr {
            terms: Vec::new(),
            constant: c,
        }
    }
}

/// Sorts by variable, sums duplicates and drops zero coefficients.
fn merge(mut terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (v, a) in terms {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += a,
            _ => out.push((v, a)),
        }
    }
    out.retain(|t| t.1 != 0.0);
    out
}

struct Layout {
    m: usize,
    links: usize,
    form: LpForm,
    /// First variable of each round, in round order.
    offsets: Vec<Vec<usize>>,
    per_round: usize,
}

impl Layout {
    fn new(m: usize, q: &InstallmentCounts, form: LpForm) -> Self {
        let links = m - 1;
        let per_round = match form {
            LpForm::Full => 3 * m + 2 * links,
            LpForm::Reduced => 2 * m + links,
        };
        let mut offsets = Vec::with_capacity(q.len());
        let mut next = 0;
        for &qn in q.as_slice() {
            offsets.push((0..qn).map(|j| next + j * per_round).collect());
            next += qn * per_round;
        }
        Layout {
            m,
            links,
            form,
            offsets,
            per_round,
        }
    }

    fn gamma(&self, i: usize, n: usize, j: usize) -> usize {
        self.offsets[n][j] + i
    }

    fn cs(&self, i: usize, n: usize, j: usize) -> usize {
        self.offsets[n][j] + self.m + i
    }

    fn ce_var(&self, i: usize, n: usize, j: usize) -> usize {
        self.offsets[n][j] + 2 * self.m + i
    }

    fn s(&self, l: usize, n: usize, j: usize) -> usize {
        let base = match self.form {
            LpForm::Full => 3 * self.m,
            LpForm::Reduced => 2 * self.m,
        };
        self.offsets[n][j] + base + l
    }

    fn e_var(&self, l: usize, n: usize, j: usize) -> usize {
        self.offsets[n][j] + 3 * self.m + self.links + l
    }

    fn tags(&self, q: &InstallmentCounts) -> Vec<VarTag> {
        let mut tags = Vec::new();
        for (load, inst) in q.rounds() {
            for proc in 0..self.m {
                tags.push(VarTag::Fraction { proc, load, inst });
            }
            for proc in 0..self.m {
                tags.push(VarTag::CompStart { proc, load, inst });
            }
            if self.form == LpForm::Full {
                for proc in 0..self.m {
                    tags.push(VarTag::CompEnd { proc, load, inst });
                }
            }
            for link in 0..self.links {
                tags.push(VarTag::CommStart { link, load, inst });
            }
            if self.form == LpForm::Full {
                for link in 0..self.links {
                    tags.push(VarTag::CommEnd { link, load, inst });
                }
            }
        }
        debug_assert_eq!(tags.len(), q.total() * self.per_round);
        tags.push(VarTag::Makespan);
        tags
    }
}

struct Builder<'a> {
    p: &'a Platform,
    wl: &'a Workload,
    layout: Layout,
    program: LinearProgram,
    families: Vec<u8>,
}

impl Builder<'_> {
    /// `S + z_l V_comm(n) sum_{k>l} gamma_k` as terms, without `S`.
    fn transfer_terms(&self, l: usize, n: usize, j: usize) -> Vec<(usize, f64)> {
        let coef = self.p.z()[l] * self.wl.get(n).vcomm;
        (l + 1..self.layout.m)
            .map(|k| (self.layout.gamma(k, n, j), coef))
            .collect()
    }

    fn compute_term(&self, i: usize, n: usize, j: usize) -> (usize, f64) {
        let coef = self.p.w()[i] * self.wl.get(n).vcomp;
        (self.layout.gamma(i, n, j), coef)
    }

    fn comm_end(&self, l: usize, n: usize, j: usize) -> Expr {
        match self.layout.form {
            LpForm::Full => Expr::var(self.layout.e_var(l, n, j)),
            LpForm::Reduced => {
                let mut terms = vec![(self.layout.s(l, n, j), 1.0)];
                terms.extend(self.transfer_terms(l, n, j));
                Expr {
                    terms,
                    constant: 0.0,
                }
            }
        }
    }

    fn comp_end(&self, i: usize, n: usize, j: usize) -> Expr {
        match self.layout.form {
            LpForm::Full => Expr::var(self.layout.ce_var(i, n, j)),
            LpForm::Reduced => Expr {
                terms: vec![(self.layout.cs(i, n, j), 1.0), self.compute_term(i, n, j)],
                constant: 0.0,
            },
        }
    }

    /// Emits `lhs (rel) rhs`.
    fn row(&mut self, family: u8, lhs: Expr, rel: Relation, rhs: Expr) {
        let mut terms = lhs.terms;
        terms.extend(rhs.terms.into_iter().map(|(v, a)| (v, -a)));
        let terms = merge(terms);
        self.program
            .add_row(terms, rel, rhs.constant - lhs.constant);
        self.families.push(family);
    }

    fn ge(&mut self, family: u8, lhs: Expr, rhs: Expr) {
        self.row(family, lhs, Relation::Ge, rhs);
    }

    fn build(mut self, q: &InstallmentCounts, strict_forward: bool) -> (LinearProgram, Vec<u8>) {
        let m = self.layout.m;
        let links = self.layout.links;
        let nloads = self.wl.len();
        for (n, j) in q.rounds() {
            let last_inst = j + 1 == q.get(n);
            let s = |b: &Self, l: usize, n: usize, j: usize| Expr::var(b.layout.s(l, n, j));
            let cs = |b: &Self, i: usize, n: usize, j: usize| Expr::var(b.layout.cs(i, n, j));
            for l in 0..links.saturating_sub(1) {
                let (lhs, rhs) = (s(&self, l + 1, n, j), self.comm_end(l, n, j));
                self.ge(1, lhs, rhs);
            }
            for l in 0..links {
                let up = if l + 1 < links { l + 1 } else { l };
                if !last_inst {
                    let (lhs, rhs) = (s(&self, l, n, j + 1), self.comm_end(up, n, j));
                    self.ge(2, lhs, rhs);
                } else if n + 1 < nloads {
                    let (lhs, rhs) = (s(&self, l, n + 1, 0), self.comm_end(up, n, j));
                    self.ge(3, lhs, rhs);
                }
            }
            if self.layout.form == LpForm::Full {
                for l in 0..links {
                    let mut terms = vec![
                        (self.layout.e_var(l, n, j), 1.0),
                        (self.layout.s(l, n, j), -1.0),
                    ];
                    terms.extend(
                        self.transfer_terms(l, n, j)
                            .into_iter()
                            .map(|(v, a)| (v, -a)),
                    );
                    self.program.add_row(merge(terms), Relation::Eq, 0.0);
                    self.families.push(5);
                }
            }
            for i in 1..m {
                let (lhs, rhs) = (cs(&self, i, n, j), self.comm_end(i - 1, n, j));
                self.ge(6, lhs, rhs);
                if strict_forward && i < links {
                    let (lhs, rhs) = (cs(&self, i, n, j), self.comm_end(i, n, j));
                    self.ge(6, lhs, rhs);
                }
            }
            if self.layout.form == LpForm::Full {
                for i in 0..m {
                    let (g, a) = self.compute_term(i, n, j);
                    let terms = vec![
                        (self.layout.ce_var(i, n, j), 1.0),
                        (self.layout.cs(i, n, j), -1.0),
                        (g, -a),
                    ];
                    self.program.add_row(merge(terms), Relation::Eq, 0.0);
                    self.families.push(7);
                }
            }
            if last_inst && n + 1 < nloads {
                for i in 0..m {
                    let (lhs, rhs) = (cs(&self, i, n + 1, 0), self.comp_end(i, n, j));
                    self.ge(8, lhs, rhs);
                }
            }
            if !last_inst {
                for i in 0..m {
                    let (lhs, rhs) = (cs(&self, i, n, j + 1), self.comp_end(i, n, j));
                    self.ge(9, lhs, rhs);
                }
            }
            if n == 0 && j == 0 {
                for i in 0..m {
                    let (lhs, rhs) = (cs(&self, i, 0, 0), Expr::constant(self.p.tau()[i]));
                    self.ge(10, lhs, rhs);
                }
            }
            if last_inst {
                let terms: Vec<(usize, f64)> = (0..m)
                    .flat_map(|i| (0..q.get(n)).map(move |jj| (i, jj)))
                    .map(|(i, jj)| (self.layout.gamma(i, n, jj), 1.0))
                    .collect();
                self.program.add_row(merge(terms), Relation::Eq, 1.0);
                self.families.push(12);
            }
        }
        let last = nloads - 1;
        let qlast = q.get(last) - 1;
        let makespan = self.program.nvars - 1;
        for i in 0..m {
            let rhs = self.comp_end(i, last, qlast);
            self.ge(13, Expr::var(makespan), rhs);
        }
        self.program.objective[makespan] = 1.0;
        (self.program, self.families)
    }
}

/// Builds the scheduling LP for `(p, wl, q)`.
pub fn build_lp(
    p: &Platform,
    wl: &Workload,
    q: &InstallmentCounts,
    opts: &BuildOptions,
) -> Result<LpProblem, LpError> {
    if q.len() != wl.len() {
        return Err(ModelError::IndexMismatch(format!(
            "q has {} entries for {} loads",
            q.len(),
            wl.len()
        ))
        .into());
    }
    let layout = Layout::new(p.m(), q, opts.form);
    let var_meta = layout.tags(q);
    let nvars = var_meta.len();
    let mut derived = Vec::new();
    if opts.form == LpForm::Reduced {
        for (load, inst) in q.rounds() {
            for link in 0..layout.links {
                let mut terms = vec![(layout.s(link, load, inst), 1.0)];
                let coef = p.z()[link] * wl.get(load).vcomm;
                terms.extend((link + 1..layout.m).map(|k| (layout.gamma(k, load, inst), coef)));
                derived.push(Derived {
                    tag: VarTag::CommEnd { link, load, inst },
                    terms,
                });
            }
            for proc in 0..layout.m {
                derived.push(Derived {
                    tag: VarTag::CompEnd { proc, load, inst },
                    terms: vec![
                        (layout.cs(proc, load, inst), 1.0),
                        (
                            layout.gamma(proc, load, inst),
                            p.w()[proc] * wl.get(load).vcomp,
                        ),
                    ],
                });
            }
        }
    }
    let builder = Builder {
        p,
        wl,
        layout,
        program: LinearProgram::new(nvars),
        families: Vec::new(),
    };
    let (program, row_families) = builder.build(q, opts.strict_forward);
    Ok(LpProblem {
        program,
        var_meta,
        row_families,
        derived,
        processors: p.m(),
        q: q.clone(),
        form: opts.form,
    })
}

/// Maps LP variable values back onto schedule fields.
pub fn extract_schedule(prob: &LpProblem, x: &[f64]) -> Result<Schedule, LpError> {
    if x.len() != prob.nvars() {
        return Err(LpError::Internal(format!(
            "solution has {} values for {} variables",
            x.len(),
            prob.nvars()
        )));
    }
    let m = prob.processors;
    let q = &prob.q;
    let mut fractions = grid(m, q);
    let mut comp_start = grid(m, q);
    let mut comp_end = grid(m, q);
    let mut comm_start = grid(m - 1, q);
    let mut comm_end = grid(m - 1, q);
    let mut seen = std::collections::HashSet::new();
    let mut makespan = None;
    let assignments = prob
        .var_meta
        .iter()
        .enumerate()
        .map(|(v, tag)| (*tag, x[v]))
        .chain(
            prob.derived
                .iter()
                .map(|d| (d.tag, d.terms.iter().map(|&(v, a)| a * x[v]).sum())),
        );
    for (tag, value) in assignments {
        seen.insert(tag);
        match tag {
            VarTag::Fraction { proc, load, inst } => fractions[proc][load][inst] = value,
            VarTag::CompStart { proc, load, inst } => comp_start[proc][load][inst] = value,
            VarTag::CompEnd { proc, load, inst } => comp_end[proc][load][inst] = value,
            VarTag::CommStart { link, load, inst } => comm_start[link][load][inst] = value,
            VarTag::CommEnd { link, load, inst } => comm_end[link][load][inst] = value,
            VarTag::Makespan => makespan = Some(value),
        }
    }
    for (load, inst) in q.rounds() {
        for proc in 0..m {
            for tag in [
                VarTag::Fraction { proc, load, inst },
                VarTag::CompStart { proc, load, inst },
                VarTag::CompEnd { proc, load, inst },
            ] {
                if !seen.contains(&tag) {
                    return Err(LpError::MissingVariable(tag.to_string()));
                }
            }
        }
        for link in 0..m - 1 {
            for tag in [
                VarTag::CommStart { link, load, inst },
                VarTag::CommEnd { link, load, inst },
            ] {
                if !seen.contains(&tag) {
                    return Err(LpError::MissingVariable(tag.to_string()));
                }
            }
        }
    }
    let makespan = makespan.ok_or_else(|| LpError::MissingVariable("makespan".into()))?;
    Ok(Schedule {
        q: q.clone(),
        fractions,
        comm_start,
        comm_end,
        comp_start,
        comp_end,
        makespan,
    })
}

fn push_term(line: &mut String, first: bool, coef: f64, name: &str) {
    let (sign, mag) = if coef < 0.0 {
        ("-", -coef)
    } else {
        ("+", coef)
    };
    if !(first && sign == "+") {
        line.push_str(sign);
        line.push(' ');
    }
    if mag != 1.0 {
        let _ = write!(line, "{mag} ");
    }
    line.push_str(name);
}

/// Renders the problem in CPLEX LP text format.
///
/// Rows are named `c1..cK` in build order and every variable gets an explicit
/// `>= 0` bound, so equal problems always produce identical text.
pub fn export_lp_text(prob: &LpProblem) -> String {
    const TERMS_PER_LINE: usize = 8;
    let names: Vec<String> = prob.var_meta.iter().map(|t| t.to_string()).collect();
    let mut out = String::new();
    out.push_str("\\ divisible-load multi-installment schedule\n");
    let _ = writeln!(
        out,
        "\\ {} variables, {} constraints, {:?} form",
        prob.nvars(),
        prob.nrows(),
        prob.form
    );
    out.push_str("Minimize\n obj:");
    let obj: Vec<(usize, f64)> = prob
        .program
        .objective
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(v, &c)| (v, c))
        .collect();
    write_terms(&mut out, &obj, &names, TERMS_PER_LINE);
    out.push('\n');
    out.push_str("Subject To\n");
    for (k, row) in prob.program.rows.iter().enumerate() {
        let _ = write!(out, " c{}:", k + 1);
        write_terms(&mut out, &row.coeffs, &names, TERMS_PER_LINE);
        let rhs = if row.rhs == 0.0 { 0.0 } else { row.rhs };
        let _ = writeln!(out, " {} {}", row.relation.symbol(), rhs);
    }
    out.push_str("Bounds\n");
    for name in &names {
        let _ = writeln!(out, " {name} >= 0");
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String], per_line: usize) {
    if terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(&names[0]);
        return;
    }
    for (k, &(v, a)) in terms.iter().enumerate() {
        if k > 0 && k % per_line == 0 {
            out.push_str("\n   ");
        }
        let mut t = String::new();
        push_term(&mut t, k == 0, a, &names[v]);
        out.push(' ');
        out.push_str(&t);
    }
}

/// Makespan of the first processor computing every load alone. It bounds
/// the optimum from above, so solving in units of this value keeps the LP
/// optimum in `(0, 1]` and the solver tolerances relative to it.
pub fn time_scale(p: &Platform, wl: &Workload) -> f64 {
    let total: f64 = wl.loads().iter().map(|l| l.vcomp).sum();
    p.tau()[0] + p.w()[0] * total
}

/// Result of [`optimal_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSchedule {
    /// LP fractions, timed as early as possible in the original time unit.
    pub schedule: Schedule,
    /// The LP optimum, in the original time unit.
    pub lp_makespan: f64,
    /// The LP point itself, rescaled to the original time unit.
    pub raw: Schedule,
    pub iterations: usize,
    pub rows: usize,
    pub vars: usize,
}

impl OptimalSchedule {
    pub fn makespan(&self) -> f64 {
        self.schedule.makespan
    }
}

/// Solves the LP for `(p, wl, q)` with the in-repo simplex.
///
/// Times are rescaled by [`time_scale`] before solving, which leaves the
/// optimum unchanged up to that factor. The returned schedule keeps the LP
/// fractions (clamped at zero and renormalized) and re-times them as early as
/// possible, so it validates with the same expressions the checker uses.
pub fn optimal_schedule(
    p: &Platform,
    wl: &Workload,
    q: &InstallmentCounts,
    opts: &BuildOptions,
    cfg: &SolverConfig,
) -> Result<OptimalSchedule, LpError> {
    let scale = time_scale(p, wl);
    let scaled = p.scaled(1.0 / scale);
    let prob = build_lp(&scaled, wl, q, opts)?;
    let slp = to_standard_form(&prob.program);
    let sol: LpSolution = solve(&slp, cfg);
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible | LpStatus::Unbounded => {
            return Err(LpError::Internal(format!(
                "scheduling LP reported {:?}; it is always feasible and bounded",
                sol.status
            )))
        }
        LpStatus::IterationLimit => return Err(LpError::Solver(sol.status)),
    }
    let mut raw = extract_schedule(&prob, &sol.x)?;
    for g in [
        &mut raw.comm_start,
        &mut raw.comm_end,
        &mut raw.comp_start,
        &mut raw.comp_end,
    ] {
        for v in g.iter_mut().flatten().flatten() {
            *v *= scale;
        }
    }
    raw.makespan *= scale;
    let mut fractions = raw.fractions.clone();
    normalize_fractions(&mut fractions);
    let schedule = earliest_schedule(p, wl, q, fractions, opts.strict_forward);
    Ok(OptimalSchedule {
        schedule,
        lp_makespan: sol.objective * scale,
        raw,
        iterations: sol.iterations,
        rows: prob.nrows(),
        vars: prob.nvars(),
    })
}
