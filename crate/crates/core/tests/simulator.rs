mod common;

use common::{example, instance, three_quarters_fractions, three_quarters_makespan};
use divload_core::heuristics::{multi_inst, simple_schedule, single_inst};
use divload_core::lp::{optimal_schedule, BuildOptions};
use divload_core::sim::{overhead_ratio, replay, SimConfig, SimError, SimMode, SimReport};
use divload_core::solver::SolverConfig;
use divload_core::timing::earliest_schedule;
use divload_core::{
    validate_schedule, InstallmentCounts, Platform, Schedule, ValidationOptions, Workload,
};
use proptest::prelude::*;

fn half_lambda() -> (Platform, Workload, Schedule) {
    let (p, wl) = example(0.5);
    let q = InstallmentCounts::uniform(2, 1).unwrap();
    let fr = vec![vec![vec![0.6], vec![0.8]], vec![vec![0.4], vec![0.2]]];
    let s = earliest_schedule(&p, &wl, &q, fr, false);
    (p, wl, s)
}

/// Transfers touching a processor, taken from the realized times.
fn assert_one_port(p: &Platform, r: &SimReport) {
    let s = &r.realized;
    for i in 0..p.m() {
        let mut spans = Vec::new();
        for l in [i.wrapping_sub(1), i] {
            if l < p.links() {
                for (a, b) in s.comm_start[l].iter().zip(&s.comm_end[l]) {
                    spans.extend(
                        a.iter()
                            .zip(b)
                            .filter(|(x, y)| y > x)
                            .map(|(x, y)| (*x, *y)),
                    );
                }
            }
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in spans.windows(2) {
            let tol = 1e-9 * r.realized_makespan.max(1.0);
            assert!(w[1].0 >= w[0].1 - tol, "P{} overlap {:?}", i + 1, w);
        }
    }
}

#[test]
fn half_lambda_replay() {
    let (p, wl, s) = half_lambda();
    let r = replay(&p, &wl, &s, &SimConfig::default()).unwrap();
    assert!((r.realized_makespan - 0.7).abs() < 1e-12);
    assert!(r.violations.is_empty());
    assert_one_port(&p, &r);

    let costed = SimConfig {
        startup: 0.1,
        ..SimConfig::default()
    };
    let r2 = replay(&p, &wl, &s, &costed).unwrap();
    assert!(r2.realized_makespan > 0.7);
}

#[test]
fn three_quarters_schedule_from_fractions() {
    let (p, wl) = example(0.75);
    let q = InstallmentCounts::uniform(2, 2).unwrap();
    let mut s = earliest_schedule(&p, &wl, &q, three_quarters_fractions(), false);
    // Scramble the planned times; earliest mode must ignore them.
    for v in s.comp_start.iter_mut().flatten().flatten() {
        *v += 3.0;
    }
    let r = replay(&p, &wl, &s, &SimConfig::earliest()).unwrap();
    assert!((r.realized_makespan - three_quarters_makespan()).abs() < 1e-9);
}

#[test]
fn trace_is_ordered_and_exports() {
    let (p, wl, s) = half_lambda();
    let r = replay(&p, &wl, &s, &SimConfig::default()).unwrap();
    assert!(r.trace.windows(2).all(|w| w[0].time <= w[1].time));
    let mut out = Vec::new();
    r.write_trace_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("time,entity,kind,load,installment,detail\n"));
    assert_eq!(text.lines().count(), r.trace.len() + 1);
}

#[test]
fn overlapping_plan_is_a_conflict() {
    let (p, wl, mut s) = half_lambda();
    s.comm_start[0][1][0] = 0.3;
    s.comm_end[0][1][0] = 0.5;
    assert!(matches!(
        replay(&p, &wl, &s, &SimConfig::default()),
        Err(SimError::OnePortConflict { .. })
    ));
    // The same fractions replayed as early as possible are fine.
    assert!(replay(&p, &wl, &s, &SimConfig::earliest()).is_ok());
}

#[test]
fn negative_payload_is_rejected() {
    let (p, wl, mut s) = half_lambda();
    s.fractions[1][0][0] = -0.1;
    s.fractions[0][0][0] = 1.1;
    assert!(matches!(
        replay(&p, &wl, &s, &SimConfig::earliest()),
        Err(SimError::NegativePayload { .. })
    ));
}

#[test]
fn bad_config_is_rejected() {
    let (p, wl, s) = half_lambda();
    let cfg = SimConfig {
        link_latency: vec![0.1, 0.2],
        ..SimConfig::default()
    };
    assert!(matches!(
        replay(&p, &wl, &s, &cfg),
        Err(SimError::Config(_))
    ));
}

#[test]
fn overhead_ratio_cases() {
    let (p, wl, s) = half_lambda();
    let ideal = replay(&p, &wl, &s, &SimConfig::default()).unwrap();
    assert_eq!(overhead_ratio(&ideal, &ideal).unwrap(), 1.0);
    let slow = SimConfig {
        link_latency: vec![0.05],
        ..SimConfig::default()
    };
    let costed = replay(&p, &wl, &s, &slow).unwrap();
    assert!(overhead_ratio(&ideal, &costed).unwrap() > 1.0);
}

#[test]
fn overhead_ratio_tracks_startup_formula() {
    // One load sent entirely to P2 in five installments; computation is
    // negligible so the makespan is all communication.
    let vcomm = 1000.0;
    let (m, q, rho) = (2usize, 5usize, 1.5);
    let startup = (rho - 1.0) * vcomm / ((m - 1) as f64 * q as f64);
    let p = Platform::idle(vec![1e-9, 1e-9], vec![1e-3]).unwrap();
    let wl = Workload::uniform(1, vcomm, 1.0).unwrap();
    let counts = InstallmentCounts::uniform(1, q).unwrap();
    let fr = vec![vec![vec![0.0; q]], vec![vec![1.0 / q as f64; q]]];
    let s = earliest_schedule(&p, &wl, &counts, fr, false);
    let ideal = replay(&p, &wl, &s, &SimConfig::default()).unwrap();
    let costed = replay(
        &p,
        &wl,
        &s,
        &SimConfig {
            startup,
            ..SimConfig::default()
        },
    )
    .unwrap();
    let comm_ratio = costed.total_comm_time() / ideal.total_comm_time();
    assert!((comm_ratio - rho).abs() <= 0.1 * rho, "{comm_ratio}");
    let mk_ratio = overhead_ratio(&ideal, &costed).unwrap();
    assert!((mk_ratio - rho).abs() <= 0.1 * rho, "{mk_ratio}");
}

fn candidate_schedules(p: &Platform, wl: &Workload) -> Vec<Schedule> {
    let mut out = vec![simple_schedule(p, wl).schedule.unwrap()];
    out.extend(single_inst(p, wl).schedule);
    out.extend(multi_inst(p, wl, 4).unwrap().schedule);
    for q in 1..=2 {
        let counts = InstallmentCounts::uniform(wl.len(), q).unwrap();
        let opt = optimal_schedule(
            p,
            wl,
            &counts,
            &BuildOptions::reduced(),
            &SolverConfig::default(),
        )
        .unwrap();
        out.push(opt.schedule);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zero_cost_replay_is_faithful((p, wl) in instance(5, 3)) {
        for s in candidate_schedules(&p, &wl) {
            let v = validate_schedule(&p, &wl, &s, &ValidationOptions::default()).unwrap();
            prop_assert!(v.ok);
            for cfg in [SimConfig::default(), SimConfig::earliest()] {
                let r = replay(&p, &wl, &s, &cfg).unwrap();
                let rel = (r.realized_makespan - s.makespan).abs() / s.makespan;
                prop_assert!(rel <= 1e-6, "{:?}: {} vs {}", cfg.mode, r.realized_makespan, s.makespan);
                prop_assert!(r.violations.is_empty());
                assert_one_port(&p, &r);
            }
        }
    }

    #[test]
    fn computation_is_conserved((p, wl) in instance(5, 3), lat in 0.0f64..0.5, k in 0.0f64..0.5) {
        let s = simple_schedule(&p, &wl).schedule.unwrap();
        let cfg = SimConfig {
            link_latency: vec![lat; p.links()],
            startup: k,
            mode: SimMode::ReplayExact,
            skip_empty: false,
        };
        let r = replay(&p, &wl, &s, &cfg).unwrap();
        for n in 0..wl.len() {
            let expect: f64 = (0..p.m()).map(|i| p.w()[i] * s.share(i, n) * wl.get(n).vcomp).sum();
            let got: f64 = (0..p.m())
                .map(|i| {
                    let rs = &r.realized;
                    rs.comp_end[i][n].iter().zip(&rs.comp_start[i][n]).map(|(e, b)| e - b).sum::<f64>()
                })
                .sum();
            prop_assert!((got - expect).abs() <= 1e-9 * expect.max(1.0), "{} vs {}", got, expect);
        }
        let busy: f64 = r.per_processor_busy.iter().sum();
        let total: f64 = (0..wl.len())
            .map(|n| (0..p.m()).map(|i| p.w()[i] * s.share(i, n) * wl.get(n).vcomp).sum::<f64>())
            .sum();
        prop_assert!((busy - total).abs() <= 1e-9 * total.max(1.0));
        assert_one_port(&p, &r);
    }

    #[test]
    fn costs_never_shorten_the_run(
        (p, wl) in instance(5, 3),
        lat in proptest::collection::vec(0.0f64..0.3, 4),
        extra in 0.0f64..0.3,
        k in 0.0f64..0.3,
        dk in 0.0f64..0.3,
        which in 0usize..4,
        earliest in any::<bool>(),
    ) {
        let counts = InstallmentCounts::uniform(wl.len(), 2).unwrap();
        let s = optimal_schedule(&p, &wl, &counts, &BuildOptions::reduced(), &SolverConfig::default())
            .unwrap()
            .schedule;
        let mode = if earliest { SimMode::Earliest } else { SimMode::ReplayExact };
        let base_lat: Vec<f64> = lat[..p.links()].to_vec();
        let base = SimConfig { link_latency: base_lat.clone(), startup: k, mode, skip_empty: false };
        let mut more_lat = base_lat;
        if !more_lat.is_empty() {
            let l = which % more_lat.len();
            more_lat[l] += extra;
        }
        let slower = SimConfig { link_latency: more_lat, ..base.clone() };
        let costlier = SimConfig { startup: k + dk, ..base.clone() };
        let a = replay(&p, &wl, &s, &base).unwrap().realized_makespan;
        let b = replay(&p, &wl, &s, &slower).unwrap().realized_makespan;
        let c = replay(&p, &wl, &s, &costlier).unwrap().realized_makespan;
        prop_assert!(b >= a * (1.0 - 1e-12), "{} < {}", b, a);
        prop_assert!(c >= a * (1.0 - 1e-12), "{} < {}", c, a);
    }
}
