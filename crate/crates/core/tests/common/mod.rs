#![allow(dead_code, clippy::needless_range_loop)]

use divload_core::lp::{LpProblem, VarTag};
use divload_core::{Grid, Load, Platform, Schedule, Workload};
use proptest::prelude::*;

/// Two identical processors with `w = lambda`, one unit-cost link, two unit
/// loads.
pub fn example(lambda: f64) -> (Platform, Workload) {
    (
        Platform::idle(vec![lambda, lambda], vec![1.0]).unwrap(),
        Workload::uniform(2, 1.0, 1.0).unwrap(),
    )
}

/// The hand-built two-installment schedule at lambda = 3/4, in 653ths.
pub fn three_quarters_fractions() -> Grid {
    let d = 653.0;
    vec![
        vec![vec![0.0, 317.0 / d], vec![0.0, 464.0 / d]],
        vec![vec![192.0 / d, 144.0 / d], vec![108.0 / d, 81.0 / d]],
    ]
}

pub fn three_quarters_makespan() -> f64 {
    781.0 / 653.0 * 0.75
}

/// Single-installment makespan formula for the example.
pub fn single_round_optimum(lambda: f64) -> f64 {
    2.0 * lambda * (lambda * lambda + lambda + 1.0) / (2.0 * lambda * lambda + 2.0 * lambda + 1.0)
}

/// LP point holding the values of `s` for every variable of `prob`.
pub fn pack(prob: &LpProblem, s: &Schedule) -> Vec<f64> {
    prob.var_meta
        .iter()
        .map(|t| match *t {
            VarTag::CommStart { link, load, inst } => s.comm_start[link][load][inst],
            VarTag::CommEnd { link, load, inst } => s.comm_end[link][load][inst],
            VarTag::CompStart { proc, load, inst } => s.comp_start[proc][load][inst],
            VarTag::CompEnd { proc, load, inst } => s.comp_end[proc][load][inst],
            VarTag::Fraction { proc, load, inst } => s.fractions[proc][load][inst],
            VarTag::Makespan => s.makespan,
        })
        .collect()
}

/// Terms, relation and right-hand side of one row.
pub type ParsedRow = (Vec<(usize, f64)>, String, f64);

/// A problem read back from LP text.
#[derive(Debug, Default)]
pub struct ParsedLp {
    pub names: Vec<String>,
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<ParsedRow>,
    pub bounded_below_by_zero: usize,
}

impl ParsedLp {
    fn var(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }
}

/// Minimal reader for the subset of the CPLEX LP format the exporter writes.
pub fn parse_lp_text(text: &str) -> ParsedLp {
    let mut lp = ParsedLp::default();
    let body: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('\\'))
        .collect();
    let mut section = "";
    let mut tokens: Vec<(String, String)> = Vec::new();
    for line in body {
        let t = line.trim();
        match t {
            "Minimize" | "Subject To" | "Bounds" | "End" => {
                section = match t {
                    "Minimize" => "obj",
                    "Subject To" => "st",
                    "Bounds" => "bounds",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        for tok in t.split_whitespace() {
            tokens.push((section.to_string(), tok.to_string()));
        }
    }
    let mut i = 0;
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut current: Vec<(usize, f64)> = Vec::new();
    while i < tokens.len() {
        let (sec, tok) = (&tokens[i].0.clone(), tokens[i].1.clone());
        i += 1;
        match sec.as_str() {
            "obj" | "st" => {
                if tok.ends_with(':') {
                    current.clear();
                    sign = 1.0;
                    coef = None;
                } else if tok == "+" {
                    sign = 1.0;
                } else if tok == "-" {
                    sign = -1.0;
                } else if tok == "<=" || tok == ">=" || tok == "=" {
                    let rhs: f64 = tokens[i].1.parse().unwrap();
                    i += 1;
                    lp.rows.push((std::mem::take(&mut current), tok, rhs));
                } else if let Ok(v) = tok.parse::<f64>() {
                    coef = Some(v);
                } else {
                    let v = lp.var(&tok);
                    let c = sign * coef.take().unwrap_or(1.0);
                    sign = 1.0;
                    if sec == "obj" {
                        lp.objective.push((v, c));
                    } else {
                        current.push((v, c));
                    }
                }
            }
            "bounds" => {
                // name >= 0
                let name = tok;
                assert_eq!(tokens[i].1, ">=");
                assert_eq!(tokens[i + 1].1.parse::<f64>().unwrap(), 0.0);
                i += 2;
                lp.var(&name);
                lp.bounded_below_by_zero += 1;
            }
            _ => {}
        }
    }
    lp
}

/// Solves parsed LP text with microlp; returns the optimal objective.
pub fn external_optimum(lp: &ParsedLp) -> f64 {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    let mut obj = vec![0.0; lp.names.len()];
    for &(v, c) in &lp.objective {
        obj[v] += c;
    }
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = obj
        .iter()
        .map(|&c| pb.add_var(c, (0.0, f64::INFINITY)))
        .collect();
    for (terms, rel, rhs) in &lp.rows {
        let op = match rel.as_str() {
            "<=" => ComparisonOp::Le,
            ">=" => ComparisonOp::Ge,
            _ => ComparisonOp::Eq,
        };
        let expr: Vec<_> = terms.iter().map(|&(v, a)| (vars[v], a)).collect();
        pb.add_constraint(expr, op, *rhs);
    }
    pb.solve()
        .expect("external solver finds an optimum")
        .objective()
}

/// Random platform and workload with `1..=max_m` processors and
/// `1..=max_n` loads; rates and volumes within two orders of magnitude.
pub fn instance(max_m: usize, max_n: usize) -> impl Strategy<Value = (Platform, Workload)> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(0.1f64..10.0, m),
            proptest::collection::vec(0.1f64..10.0, m - 1),
            proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], m),
            proptest::collection::vec((0.1f64..5.0, 0.1f64..5.0), n),
        )
            .prop_map(|(w, z, tau, loads)| {
                let loads = loads
                    .into_iter()
                    .map(|(vcomm, vcomp)| Load { vcomm, vcomp })
                    .collect();
                (
                    Platform::new(w, z, tau).unwrap(),
                    Workload::new(loads).unwrap(),
                )
            })
    })
}

/// Random fractions for the given shape, each load summing to one.
pub fn fractions_for(m: usize, q: &[usize]) -> impl Strategy<Value = Grid> {
    let cells: usize = m * q.iter().sum::<usize>();
    let q = q.to_vec();
    proptest::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], cells).prop_map(
        move |raw| {
            let mut g: Grid = (0..m)
                .map(|_| q.iter().map(|&qn| vec![0.0; qn]).collect())
                .collect();
            let mut k = 0;
            for i in 0..m {
                for (n, &qn) in q.iter().enumerate() {
                    for j in 0..qn {
                        g[i][n][j] = raw[k];
                        k += 1;
                    }
                }
            }
            for (n, &qn) in q.iter().enumerate() {
                let total: f64 = (0..m).map(|i| g[i][n].iter().sum::<f64>()).sum();
                if total == 0.0 {
                    g[0][n][qn - 1] = 1.0;
                } else {
                    for row in g.iter_mut() {
                        for v in row[n].iter_mut() {
                            *v /= total;
                        }
                    }
                }
            }
            g
        },
    )
}
