mod common;

use common::{example, instance, single_round_optimum};
use divload_core::heuristics::{
    coverage_after, example_installments, example_ratio, min_installments_for_overhead, multi_inst,
    multi_inst_uncapped, simple_schedule, single_inst, uncapped_feasibility_bound, HeuristicError,
    HeuristicOutcome, HeuristicStatus, InstallmentBound,
};
use divload_core::lp::{optimal_schedule, BuildOptions};
use divload_core::solver::SolverConfig;
use divload_core::{
    validate_schedule, InstallmentCounts, Platform, Schedule, ValidationOptions, Workload,
};
use proptest::prelude::*;

fn threshold() -> f64 {
    (3f64.sqrt() + 1.0) / 2.0
}

fn lp_optimum(p: &Platform, wl: &Workload, q: Vec<usize>) -> f64 {
    let q = InstallmentCounts::new(q).unwrap();
    optimal_schedule(
        p,
        wl,
        &q,
        &BuildOptions::reduced(),
        &SolverConfig::default(),
    )
    .unwrap()
    .lp_makespan
}

fn valid(p: &Platform, wl: &Workload, s: &Schedule) -> bool {
    let r = validate_schedule(p, wl, s, &ValidationOptions::with_tol(1e-9)).unwrap();
    if !r.ok {
        eprintln!("{:?}", r.violations);
    }
    r.ok
}

#[test]
fn single_inst_at_lambda_two() {
    let (p, wl) = example(2.0);
    let s = single_inst(&p, &wl).schedule.unwrap();
    let expect = [[0.6, 0.5], [0.4, 0.5]];
    for (got, want) in s.fractions.iter().zip(expect) {
        for (g, w) in got.iter().zip(want) {
            assert!((g[0] - w).abs() < 1e-9);
        }
    }
    assert!((s.makespan - 2.2).abs() < 1e-9);
    // Both strategies coincide when every load fits in one keep-busy round.
    let g = multi_inst(&p, &wl, 7).unwrap();
    assert_eq!(g.diagnostics.installments, vec![1, 1]);
    assert!((g.makespan().unwrap() - 2.2).abs() < 1e-9);
}

#[test]
fn single_inst_at_the_boundary() {
    let lambda = threshold();
    let (p, wl) = example(lambda);
    let out = single_inst(&p, &wl);
    assert!(out.is_ok(), "{:?}", out.diagnostics);
    let mk = out.makespan().unwrap();
    assert!((mk - single_round_optimum(lambda)).abs() < 1e-9, "{mk}");
}

#[test]
fn single_inst_succeeds_exactly_above_the_threshold() {
    let t = threshold();
    assert!(!single_inst(&example(t - 1e-9).0, &example(t - 1e-9).1).is_ok());
    assert!(single_inst(&example(t + 1e-9).0, &example(t + 1e-9).1).is_ok());
    for k in 1..200 {
        let lambda = 0.02 * k as f64;
        if (lambda - t).abs() < 1e-9 {
            continue;
        }
        let (p, wl) = example(lambda);
        let out = single_inst(&p, &wl);
        assert_eq!(out.is_ok(), lambda >= t, "lambda {lambda}");
        if let Some(s) = &out.schedule {
            assert!(valid(&p, &wl, s));
        }
    }
}

#[test]
fn single_processor_takes_everything() {
    let p = Platform::new(vec![2.0], vec![], vec![0.5]).unwrap();
    let wl = Workload::uniform(3, 1.0, 1.5).unwrap();
    let s = single_inst(&p, &wl).schedule.unwrap();
    assert!(s.fractions[0].iter().all(|f| f == &vec![1.0]));
    assert!((s.makespan - (0.5 + 2.0 * 4.5)).abs() < 1e-12);
}

#[test]
fn greedy_at_three_quarters() {
    let (p, wl) = example(0.75);
    for cap in [3, 4, 100] {
        let out = multi_inst(&p, &wl, cap).unwrap();
        assert_eq!(out.diagnostics.installments, vec![1, 3]);
        assert!((out.makespan().unwrap() - 0.9).abs() < 1e-9);
        assert!(valid(&p, &wl, out.schedule.as_ref().unwrap()));
    }
    assert_eq!(example_installments(0.75).unwrap(), Some(3));
}

#[test]
fn uncapped_greedy_fails_at_one_half() {
    let (p, wl) = example(0.5);
    assert_eq!(uncapped_feasibility_bound(0.5).unwrap(), 0.5);
    let out = multi_inst_uncapped(&p, &wl);
    assert_eq!(out.status, HeuristicStatus::NoSolution);
    assert!(out.schedule.is_none());
    assert_eq!(out.diagnostics.failed_load, Some(1));
    assert!((out.diagnostics.coverage_bound.unwrap() - 0.5).abs() < 1e-12);
    assert!(out.diagnostics.covered.unwrap() <= 0.5 + 1e-9);
    let capped = multi_inst(&p, &wl, 10).unwrap();
    assert!(capped.is_ok());
    assert!(valid(&p, &wl, capped.schedule.as_ref().unwrap()));
    assert_eq!(example_installments(0.5).unwrap(), None);
}

#[test]
fn coverage_series() {
    let critical = (17f64.sqrt() + 1.0) / 8.0;
    assert!((uncapped_feasibility_bound(critical).unwrap() - 1.0).abs() < 1e-12);
    for q in 1..6 {
        assert!((coverage_after(1.0, q).unwrap() - 2.0 * q as f64 / 3.0).abs() < 1e-12);
        // Partial sums of the installment series approach the bound from below.
        let c = coverage_after(0.5, q).unwrap();
        assert!(c < 0.5 && c >= coverage_after(0.5, q.saturating_sub(1).max(1)).unwrap());
    }
    assert_eq!(uncapped_feasibility_bound(1.0).unwrap(), f64::INFINITY);
    assert_eq!(example_installments(1.0).unwrap(), Some(2));
    assert!(matches!(
        uncapped_feasibility_bound(-1.0),
        Err(HeuristicError::Domain(_))
    ));
}

#[test]
fn example_ratio_requires_the_example_shape() {
    let (p, wl) = example(0.75);
    assert_eq!(example_ratio(&p, &wl).unwrap(), 0.75);
    let p3 = Platform::idle(vec![1.0; 3], vec![1.0; 2]).unwrap();
    assert!(example_ratio(&p3, &wl).is_err());
    let odd = Workload::uniform(3, 1.0, 1.0).unwrap();
    assert!(example_ratio(&p, &odd).is_err());
}

#[test]
fn simple_examples() {
    let (p, wl) = example(0.5);
    let s = simple_schedule(&p, &wl).schedule.unwrap();
    assert!(s.fractions.iter().flatten().all(|f| f == &vec![0.5]));
    assert!(s.makespan > lp_optimum(&p, &wl, vec![1, 1]) + 1e-9);
    assert!(valid(&p, &wl, &s));

    let p = Platform::idle(vec![1.0, 3.0], vec![1.0]).unwrap();
    let s = simple_schedule(&p, &wl).schedule.unwrap();
    assert!((s.fractions[0][0][0] - 0.75).abs() < 1e-15);
    assert!((s.fractions[1][0][0] - 0.25).abs() < 1e-15);
}

#[test]
fn overhead_chooser() {
    assert_eq!(
        min_installments_for_overhead(1000.0, 10, 10.0, 1.9).unwrap(),
        InstallmentBound::Finite(10)
    );
    assert_eq!(
        min_installments_for_overhead(1000.0, 10, 0.0, 1.9).unwrap(),
        InstallmentBound::Unbounded
    );
    for (vcomm, m, k) in [(1000.0, 10, 10.0), (7.0, 3, 0.3), (1e9, 5, 1024.0)] {
        let rho = 1.0 + (m - 1) as f64 * k / vcomm;
        assert_eq!(
            min_installments_for_overhead(vcomm, m, k, rho).unwrap(),
            InstallmentBound::Finite(1)
        );
    }
    assert!(min_installments_for_overhead(1000.0, 1, 10.0, 1.9).is_err());
    assert!(multi_inst(&example(1.0).0, &example(1.0).1, 0).is_err());
}

fn check_ok(p: &Platform, wl: &Workload, out: &HeuristicOutcome) -> Result<(), TestCaseError> {
    if let Some(s) = &out.schedule {
        prop_assert!(out.is_ok());
        prop_assert!(valid(p, wl, s));
        for n in 0..wl.len() {
            let total: f64 = (0..p.m()).map(|i| s.share(i, n)).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "load {} sums to {}", n, total);
        }
    } else {
        prop_assert!(!out.is_ok());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcomes_validate((p, wl) in instance(5, 4), cap in 1usize..6) {
        check_ok(&p, &wl, &simple_schedule(&p, &wl))?;
        prop_assert!(simple_schedule(&p, &wl).is_ok());
        check_ok(&p, &wl, &single_inst(&p, &wl))?;
        check_ok(&p, &wl, &multi_inst(&p, &wl, cap).unwrap())?;
        check_ok(&p, &wl, &multi_inst_uncapped(&p, &wl))?;
    }

    #[test]
    fn lp_dominates_single_inst((p, wl) in instance(4, 3)) {
        let out = single_inst(&p, &wl);
        if let Some(mk) = out.makespan() {
            let best = lp_optimum(&p, &wl, vec![1; wl.len()]);
            prop_assert!(best <= mk + 1e-9 * mk, "{} > {}", best, mk);
        }
    }

    #[test]
    fn lp_dominates_the_greedy_with_its_own_counts((p, wl) in instance(4, 3), cap in 1usize..4) {
        let out = multi_inst(&p, &wl, cap).unwrap();
        if let Some(mk) = out.makespan() {
            let best = lp_optimum(&p, &wl, out.diagnostics.installments.clone());
            prop_assert!(best <= mk + 1e-9 * mk, "{} > {}", best, mk);
        }
    }

    #[test]
    fn cap_one_is_single_inst((p, wl) in instance(5, 4)) {
        let a = single_inst(&p, &wl);
        let b = multi_inst(&p, &wl, 1).unwrap();
        if let (Some(x), Some(y)) = (&a.schedule, &b.schedule) {
            prop_assert_eq!(&x.q, &y.q);
            for (u, v) in x.fractions.iter().flatten().flatten().zip(y.fractions.iter().flatten().flatten()) {
                prop_assert!((u - v).abs() <= 1e-12);
            }
        }
    }
}
