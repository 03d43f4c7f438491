//! Strategy comparison by relative performance: each makespan divided by the
//! best makespan any strategy reached on the same instance.

use std::fmt;
use std::str::FromStr;

use divload_core::heuristics::{multi_inst, simple_schedule, single_inst, HeuristicOutcome};
use divload_core::io::Instance;
use divload_core::lp::{optimal_schedule, BuildOptions, LpError};
use divload_core::solver::SolverConfig;
use divload_core::{InstallmentCounts, Schedule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen::GenConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("instance {instance}: {strategy} failed: {source}")]
    SolverFailure {
        instance: usize,
        strategy: Strategy,
        source: LpError,
    },
    #[error("no strategies given")]
    NoStrategies,
    #[error("unknown strategy `{0}` (expected simple, single-inst, multi-inst:CAP or lp:Q)")]
    UnknownStrategy(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Simple,
    SingleInst,
    MultiInst(usize),
    /// LP optimum with this many installments for every load.
    Lp(usize),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Simple => write!(f, "simple"),
            Strategy::SingleInst => write!(f, "single-inst"),
            Strategy::MultiInst(c) => write!(f, "multi-inst:{c}"),
            Strategy::Lp(q) => write!(f, "lp:{q}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::UnknownStrategy(s.to_string());
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("simple", None) => Ok(Strategy::Simple),
            ("single-inst", None) => Ok(Strategy::SingleInst),
            ("multi-inst", Some(c)) if c >= 1 => Ok(Strategy::MultiInst(c)),
            ("multi-inst", None) => Ok(Strategy::MultiInst(100)),
            ("lp", Some(q)) if (1..=6).contains(&q) => Ok(Strategy::Lp(q)),
            _ => Err(bad()),
        }
    }
}

/// Parses a comma-separated strategy list.
pub fn parse_strategies(list: &str) -> Result<Vec<Strategy>, BenchError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// The strategies compared on the desk grid.
pub fn default_strategies() -> Vec<Strategy> {
    vec![
        Strategy::Simple,
        Strategy::SingleInst,
        Strategy::MultiInst(100),
        Strategy::Lp(1),
        Strategy::Lp(2),
        Strategy::Lp(3),
    ]
}

fn from_outcome(o: HeuristicOutcome) -> Option<Schedule> {
    o.schedule
}

/// Runs one strategy; `Ok(None)` when the strategy finds no solution.
pub fn run_strategy(inst: &Instance, strategy: Strategy) -> Result<Option<Schedule>, LpError> {
    let (p, wl) = (&inst.platform, &inst.workload);
    Ok(match strategy {
        Strategy::Simple => from_outcome(simple_schedule(p, wl)),
        Strategy::SingleInst => from_outcome(single_inst(p, wl)),
        Strategy::MultiInst(cap) => {
            from_outcome(multi_inst(p, wl, cap).expect("cap is at least 1"))
        }
        Strategy::Lp(q) => {
            let counts = InstallmentCounts::uniform(wl.len(), q).expect("q is at least 1");
            let opt = optimal_schedule(
                p,
                wl,
                &counts,
                &BuildOptions::reduced(),
                &SolverConfig::default(),
            )?;
            Some(opt.schedule)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub avg_rel: f64,
    /// Population standard deviation.
    pub std_rel: f64,
    pub max_rel: f64,
    pub failures: usize,
    pub n_instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub format_version: u32,
    pub strategies: Vec<String>,
    pub rows: Vec<StrategyRow>,
    /// `makespans[k][s]`: makespan of strategy `s` on instance `k`, `None`
    /// when it found no solution.
    pub makespans: Vec<Vec<Option<f64>>>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config: Option<GenConfig>,
}

impl BenchReport {
    /// Relative performance of every strategy on instance `k`.
    pub fn relative(&self, k: usize) -> Vec<Option<f64>> {
        relative(&self.makespans[k])
    }

    pub fn row(&self, strategy: Strategy) -> Option<&StrategyRow> {
        let name = strategy.to_string();
        self.rows.iter().find(|r| r.strategy == name)
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn relative(makespans: &[Option<f64>]) -> Vec<Option<f64>> {
    let best = makespans
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    makespans.iter().map(|m| m.map(|v| v / best)).collect()
}

/// Evaluates every strategy on every instance (in parallel) and aggregates
/// relative performance per strategy.
pub fn run_bench(
    instances: &[Instance],
    strategies: &[Strategy],
    config: Option<GenConfig>,
) -> Result<BenchReport, BenchError> {
    if strategies.is_empty() {
        return Err(BenchError::NoStrategies);
    }
    let makespans = instances
        .par_iter()
        .enumerate()
        .map(|(k, inst)| {
            strategies
                .iter()
                .map(|&s| {
                    run_strategy(inst, s)
                        .map(|o| o.map(|sch| sch.makespan))
                        .map_err(|source| BenchError::SolverFailure {
                            instance: k,
                            strategy: s,
                            source,
                        })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(strategies, makespans, config))
}

/// Builds the report from a precomputed makespan matrix.
pub fn aggregate(
    strategies: &[Strategy],
    makespans: Vec<Vec<Option<f64>>>,
    config: Option<GenConfig>,
) -> BenchReport {
    let rels: Vec<Vec<Option<f64>>> = makespans.iter().map(|m| relative(m)).collect();
    let rows = strategies
        .iter()
        .enumerate()
        .map(|(s, strat)| {
            let samples: Vec<f64> = rels.iter().filter_map(|r| r[s]).collect();
            let n = samples.len() as f64;
            let (avg, std, max) = if samples.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let avg = samples.iter().sum::<f64>() / n;
                let var = samples.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / n;
                let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (avg, var.sqrt(), max)
            };
            StrategyRow {
                strategy: strat.to_string(),
                avg_rel: avg,
                std_rel: std,
                max_rel: max,
                failures: makespans.len() - samples.len(),
                n_instances: makespans.len(),
            }
        })
        .collect();
    BenchReport {
        format_version: FORMAT_VERSION,
        strategies: strategies.iter().map(Strategy::to_string).collect(),
        rows,
        makespans,
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        },
    }
}
