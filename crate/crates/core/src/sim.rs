//! Discrete-event replay of a schedule on the chain, with per-message link
//! latency and a per-message start-up cost.
//!
//! Every transfer and computation is an activity. An activity becomes ready
//! when all activities it depends on have finished (the same ordering rules
//! used by [`crate::timing::earliest_schedule`]); ready activities start at
//! once, or no earlier than their planned start in [`SimMode::ReplayExact`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{grid, makespan_of, ModelError, Platform, Schedule, Workload};
use crate::timing::downstream;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("one-port conflict on processor {processor}: {first} overlaps {second}")]
    OnePortConflict {
        processor: usize,
        first: String,
        second: String,
    },
    #[error("negative payload {payload:e} on link {link}, load {load}, installment {installment}")]
    NegativePayload {
        link: usize,
        load: usize,
        installment: usize,
        payload: f64,
    },
    #[error("invalid simulator configuration: {0}")]
    Config(String),
    #[error("ideal makespan is zero")]
    DivisionByZero,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("trace export failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimMode {
    /// Keep planned start times unless a dependency finishes later.
    #[default]
    ReplayExact,
    /// Ignore planned times and start everything as soon as possible.
    Earliest,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimConfig {
    /// Per-link message latency in seconds; empty means zero everywhere.
    pub link_latency: Vec<f64>,
    /// Fixed cost added to every message, in the same units as a payload.
    pub startup: f64,
    pub mode: SimMode,
    /// Do not send messages that carry no data.
    pub skip_empty: bool,
}

impl SimConfig {
    pub fn earliest() -> Self {
        SimConfig {
            mode: SimMode::Earliest,
            ..SimConfig::default()
        }
    }

    fn latency(&self, l: usize) -> f64 {
        self.link_latency.get(l).copied().unwrap_or(0.0)
    }

    fn check(&self, p: &Platform) -> Result<(), SimError> {
        if !self.link_latency.is_empty() && self.link_latency.len() != p.links() {
            return Err(SimError::Config(format!(
                "{} latencies for {} links",
                self.link_latency.len(),
                p.links()
            )));
        }
        if self
            .link_latency
            .iter()
            .any(|&l| !(l >= 0.0 && l.is_finite()))
        {
            return Err(SimError::Config("latencies must be non-negative".into()));
        }
        if !(self.startup >= 0.0 && self.startup.is_finite()) {
            return Err(SimError::Config(
                "start-up cost must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Entity {
    Processor(usize),
    Link(usize),
}

impl Entity {
    fn index(self) -> usize {
        match self {
            Entity::Processor(i) | Entity::Link(i) => i,
        }
    }

    pub fn label(self) -> String {
        match self {
            Entity::Processor(i) => format!("P{}", i + 1),
            Entity::Link(l) => format!("L{}", l + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    CommStart,
    CommEnd,
    CompStart,
    CompEnd,
}

impl EventKind {
    fn is_comm(self) -> bool {
        matches!(self, EventKind::CommStart | EventKind::CommEnd)
    }

    pub fn name(self) -> &'static str {
        match self {
            EventKind::CommStart => "comm_start",
            EventKind::CommEnd => "comm_end",
            EventKind::CompStart => "comp_start",
            EventKind::CompEnd => "comp_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    pub entity: Entity,
    pub kind: EventKind,
    /// 0-based load and installment.
    pub load: usize,
    pub installment: usize,
    /// Data units moved or computed.
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub realized_makespan: f64,
    pub trace: Vec<TraceEvent>,
    /// Total computation time per processor.
    pub per_processor_busy: Vec<f64>,
    /// One-port conflicts found on the realized trace.
    pub violations: Vec<String>,
    /// The input fractions with realized times.
    pub realized: Schedule,
}

impl SimReport {
    /// Sum of transfer durations over all links.
    pub fn total_comm_time(&self) -> f64 {
        let s = &self.realized;
        let mut total = 0.0;
        for l in 0..s.comm_start.len() {
            for (a, b) in s.comm_start[l].iter().zip(&s.comm_end[l]) {
                total += b.iter().zip(a).map(|(e, s)| e - s).sum::<f64>();
            }
        }
        total
    }

    /// Writes the trace as CSV with a header row.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "entity", "kind", "load", "installment", "detail"])?;
        for e in &self.trace {
            w.write_record([
                format!("{:e}", e.time),
                e.entity.label(),
                e.kind.name().to_string(),
                (e.load + 1).to_string(),
                (e.installment + 1).to_string(),
                format!("amount={:e}", e.amount),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Realized makespan ratio between a costed and an ideal replay.
pub fn overhead_ratio(ideal: &SimReport, costed: &SimReport) -> Result<f64, SimError> {
    if ideal.realized_makespan == 0.0 {
        return Err(SimError::DivisionByZero);
    }
    Ok(costed.realized_makespan / ideal.realized_makespan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Act {
    entity: Entity,
    load: usize,
    inst: usize,
}

/// Finish event, popped earliest first; transfers before computations, then
/// by entity index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Finish {
    time: f64,
    act: usize,
    is_comp: bool,
    entity: usize,
}

impl Eq for Finish {}

impl Ord for Finish {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.is_comp.cmp(&self.is_comp))
            .then(other.entity.cmp(&self.entity))
            .then(other.act.cmp(&self.act))
    }
}

impl PartialOrd for Finish {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Replays `s` on `p` under `cfg`.
pub fn replay(
    p: &Platform,
    wl: &Workload,
    s: &Schedule,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    cfg.check(p)?;
    s.check_shape(p, wl)?;
    let m = p.m();
    let links = p.links();
    let q = &s.q;

    if cfg.mode == SimMode::ReplayExact {
        if let Some(c) =
            one_port_conflicts(p, &s.comm_start, &s.comm_end, q, planned_tol(s)).first()
        {
            return Err(c.clone().into_error());
        }
    }

    // Activities in round order: links first, then processors.
    let mut acts = Vec::new();
    let mut id = |entities: usize, make: fn(usize) -> Entity| -> Vec<Vec<Vec<usize>>> {
        (0..entities)
            .map(|e| {
                (0..q.len())
                    .map(|n| {
                        (0..q.get(n))
                            .map(|j| {
                                acts.push(Act {
                                    entity: make(e),
                                    load: n,
                                    inst: j,
                                });
                                acts.len() - 1
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    let comm_id = id(links, Entity::Link);
    let comp_id = id(m, Entity::Processor);

    let count = acts.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut pending = vec![0usize; count];
    let mut edge = |from: usize, to: usize| {
        succ[from].push(to);
        pending[to] += 1;
    };
    for (n, j) in q.rounds() {
        let prev = q.previous(n, j);
        for l in 0..links {
            let me = comm_id[l][n][j];
            if l > 0 {
                edge(comm_id[l - 1][n][j], me);
            }
            if let Some((pn, pj)) = prev {
                edge(comm_id[l][pn][pj], me);
                if l + 1 < links {
                    edge(comm_id[l + 1][pn][pj], me);
                }
            }
        }
        for i in 0..m {
            let me = comp_id[i][n][j];
            if let Some((pn, pj)) = prev {
                edge(comp_id[i][pn][pj], me);
            }
            if i > 0 {
                edge(comm_id[i - 1][n][j], me);
            }
        }
    }

    // Durations and release times.
    let mut duration = vec![0.0; count];
    let mut release = vec![0.0; count];
    let mut amount = vec![0.0; count];
    let mut skipped = vec![false; count];
    for (n, j) in q.rounds() {
        let load = wl.get(n);
        for l in 0..links {
            let a = comm_id[l][n][j];
            let payload = load.vcomm * downstream(&s.fractions, l, n, j);
            if payload < 0.0 {
                return Err(SimError::NegativePayload {
                    link: l + 1,
                    load: n + 1,
                    installment: j + 1,
                    payload,
                });
            }
            amount[a] = payload;
            if cfg.skip_empty && payload == 0.0 {
                skipped[a] = true;
            } else {
                duration[a] = cfg.latency(l) + p.z()[l] * (payload + cfg.startup);
            }
            if cfg.mode == SimMode::ReplayExact {
                release[a] = s.comm_start[l][n][j];
            }
        }
        for i in 0..m {
            let a = comp_id[i][n][j];
            amount[a] = s.fractions[i][n][j] * load.vcomp;
            duration[a] = p.w()[i] * amount[a];
            release[a] = match cfg.mode {
                SimMode::ReplayExact => s.comp_start[i][n][j],
                SimMode::Earliest => p.tau()[i],
            };
        }
    }

    let mut ready_at = release.clone();
    let mut start = vec![f64::NAN; count];
    let mut end = vec![f64::NAN; count];
    let mut heap = BinaryHeap::new();
    let mut trace = Vec::with_capacity(4 * count);
    let launch = |a: usize, heap: &mut BinaryHeap<Finish>, start: &mut [f64], ready_at: &[f64]| {
        start[a] = ready_at[a];
        heap.push(Finish {
            time: ready_at[a] + duration[a],
            act: a,
            is_comp: matches!(acts[a].entity, Entity::Processor(_)),
            entity: acts[a].entity.index(),
        });
    };
    for a in 0..count {
        if pending[a] == 0 {
            launch(a, &mut heap, &mut start, &ready_at);
        }
    }
    while let Some(f) = heap.pop() {
        let a = f.act;
        end[a] = f.time;
        for &b in &succ[a] {
            ready_at[b] = ready_at[b].max(f.time);
            pending[b] -= 1;
            if pending[b] == 0 {
                launch(b, &mut heap, &mut start, &ready_at);
            }
        }
    }

    for (a, act) in acts.iter().enumerate() {
        if skipped[a] {
            continue;
        }
        let (ks, ke) = match act.entity {
            Entity::Link(_) => (EventKind::CommStart, EventKind::CommEnd),
            Entity::Processor(_) => (EventKind::CompStart, EventKind::CompEnd),
        };
        for (time, kind) in [(start[a], ks), (end[a], ke)] {
            trace.push(TraceEvent {
                time,
                entity: act.entity,
                kind,
                load: act.load,
                installment: act.inst,
                amount: amount[a],
            });
        }
    }
    trace.sort_by(|x, y| {
        x.time
            .total_cmp(&y.time)
            .then(y.kind.is_comm().cmp(&x.kind.is_comm()))
            .then(x.entity.index().cmp(&y.entity.index()))
    });

    let mut realized = Schedule {
        q: q.clone(),
        fractions: s.fractions.clone(),
        comm_start: grid(links, q),
        comm_end: grid(links, q),
        comp_start: grid(m, q),
        comp_end: grid(m, q),
        makespan: 0.0,
    };
    let mut busy = vec![0.0; m];
    for (n, j) in q.rounds() {
        for l in 0..links {
            let a = comm_id[l][n][j];
            realized.comm_start[l][n][j] = start[a];
            realized.comm_end[l][n][j] = end[a];
        }
        for i in 0..m {
            let a = comp_id[i][n][j];
            realized.comp_start[i][n][j] = start[a];
            realized.comp_end[i][n][j] = end[a];
            busy[i] += duration[a];
        }
    }
    realized.makespan = makespan_of(&realized);

    let tol = planned_tol(&realized);
    let violations = one_port_conflicts(p, &realized.comm_start, &realized.comm_end, q, tol)
        .into_iter()
        .map(|c| c.into_error().to_string())
        .collect();

    Ok(SimReport {
        realized_makespan: realized.makespan,
        trace,
        per_processor_busy: busy,
        violations,
        realized,
    })
}

fn planned_tol(s: &Schedule) -> f64 {
    1e-9 * s.makespan.abs().max(1e-300)
}

#[derive(Debug, Clone)]
struct Conflict {
    processor: usize,
    first: String,
    second: String,
}

impl Conflict {
    fn into_error(self) -> SimError {
        SimError::OnePortConflict {
            processor: self.processor,
            first: self.first,
            second: self.second,
        }
    }
}

/// Transfers touching the same processor (its incoming and outgoing link)
/// whose intervals overlap by more than `tol`.
fn one_port_conflicts(
    p: &Platform,
    comm_start: &crate::model::Grid,
    comm_end: &crate::model::Grid,
    q: &crate::model::InstallmentCounts,
    tol: f64,
) -> Vec<Conflict> {
    let mut out = Vec::new();
    for i in 0..p.m() {
        let mut iv: Vec<(f64, f64, String)> = Vec::new();
        for l in [i.wrapping_sub(1), i] {
            if l >= p.links() {
                continue;
            }
            for (n, j) in q.rounds() {
                let (a, b) = (comm_start[l][n][j], comm_end[l][n][j]);
                if b > a {
                    iv.push((
                        a,
                        b,
                        format!("link {} load {} installment {}", l + 1, n + 1, j + 1),
                    ));
                }
            }
        }
        iv.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut reach: Option<(f64, usize)> = None;
        for (k, cur) in iv.iter().enumerate() {
            if let Some((e, who)) = reach {
                if cur.0 < e - tol {
                    out.push(Conflict {
                        processor: i + 1,
                        first: iv[who].2.clone(),
                        second: cur.2.clone(),
                    });
                }
                if cur.1 > e {
                    reach = Some((cur.1, k));
                }
            } else {
                reach = Some((cur.1, k));
            }
        }
    }
    out
}
