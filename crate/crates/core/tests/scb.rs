mod common;

use proptest::prelude::*;

use common::*;
use scb_admm::baseline::{baseline_config, direct_admm_solve_with, BASELINE_TAU};
use scb_admm::instances::build_random_qsdp;
use scb_admm::linops::MajorizerStrategy;
use scb_admm::model::{constraint_residual, BlockProblem, ProxBlock};
use scb_admm::scb::{
    build_block_majorizers, scb_equivalence_check, scb_spadmm_solve, scb_spadmm_solve_with, schur_pd_check,
    ScbSolver, SolverConfig, Termination, GOLDEN_RATIO,
};
use scb_admm::solver2::spadmm2_solve;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_sweep_iteration_equals_the_grouped_step(seed in any::<u64>(), p in 0usize..4, q in 0usize..4, sigma in 0.2f64..5.0, tau in 0.3f64..1.95, scaled in any::<bool>()) {
        let problem = random_multi_block(seed, p, q, 20);
        let state = random_state(&problem, seed.wrapping_add(1));
        let config = SolverConfig {
            sigma,
            tau,
            majorizer_strategy: if scaled { MajorizerStrategy::ScaledIdentity } else { MajorizerStrategy::Exact },
            ..Default::default()
        };
        let rep = scb_equivalence_check(&problem, &state, &config).unwrap();
        prop_assert!(rep.max_deviation <= 1e-9, "{:?}", rep);
    }

    #[test]
    fn without_quadratic_blocks_the_sweep_is_two_block_admm(seed in any::<u64>()) {
        let problem = random_multi_block(seed, 0, 0, 8);
        let config = SolverConfig { max_iter: 30, stagnation_window: 0, ..Default::default() };
        let a = scb_spadmm_solve(&problem, &config).unwrap();
        let b = spadmm2_solve(&problem, &config).unwrap();
        prop_assert!(rel_dev(&a.state.u, &b.state.u) <= 1e-12);
        prop_assert!(rel_dev(&a.state.v, &b.state.v) <= 1e-12);
        prop_assert!(rel_dev(&a.state.x, &b.state.x) <= 1e-12);
    }

    #[test]
    fn pd_flags_agree_on_both_sides(seed in any::<u64>(), p in 0usize..4, q in 0usize..4, singular in any::<bool>()) {
        let mut problem = random_multi_block(seed, p, q, 24);
        let mut r = rng(seed ^ 0x5d);
        let (nu, nv, m) = (problem.f.dim(), problem.g.dim(), problem.constraint_dim());
        if singular {
            let rank = (seed as usize) % nu.min(m);
            let fm = gaussian_matrix(&mut r, nu, rank) * gaussian_matrix(&mut r, rank, m);
            problem.f = ProxBlock::new("u", problem.f.func.clone(), scb_admm::linops::MatrixMap::shared(fm)).unwrap();
        }
        let zero_f = nalgebra::DMatrix::zeros(nu, nu);
        let (sf, tf) = if singular { (zero_f.clone(), zero_f) } else { (psd_matrix(&mut r, nu, 1), psd_matrix(&mut r, nu, 1)) };
        let (sg, tg) = (psd_matrix(&mut r, nv, 1), psd_matrix(&mut r, nv, nv));
        let majs = build_block_majorizers(&problem, &SolverConfig::default()).unwrap();
        let flags = schur_pd_check(&problem, 1.0, &sf, &sg, &tf, &tg, &majs).unwrap();
        prop_assert_eq!(flags.f_lhs, flags.f_rhs);
        prop_assert_eq!(flags.g_lhs, flags.g_rhs);
        if singular {
            prop_assert!(!flags.f_rhs);
        }
    }
}

fn small_qsdp() -> (scb_admm::instances::QsdpInstance, BlockProblem) {
    let inst = build_random_qsdp(8, 5, 3, 21).unwrap();
    let problem = inst.block_problem().unwrap();
    (inst, problem)
}

#[test]
fn trace_records_start_cadence_and_final_iterate() {
    let (inst, problem) = small_qsdp();
    let config = SolverConfig {
        log_every: 7,
        ..Default::default()
    };
    let res = scb_spadmm_solve_with(&problem, &config, &inst).unwrap();
    assert_eq!(res.termination, Termination::ToleranceMet);
    assert_eq!(res.trace[0].iter, 0);
    let last = res.trace.last().unwrap();
    assert_eq!(last.iter, res.iterations);
    assert_eq!(last, &res.final_report);
    for r in &res.trace[1..res.trace.len() - 1] {
        assert_eq!(r.iter % 7, 0);
    }
    assert!(res.final_report.eta <= config.tol);
    assert_eq!(res.block_order, problem.block_names());
    assert!(res.trace.windows(2).all(|w| w[0].elapsed_s <= w[1].elapsed_s));
}

#[test]
fn summability_is_tracked_only_above_the_golden_ratio() {
    let (inst, problem) = small_qsdp();
    let below = scb_spadmm_solve_with(&problem, &SolverConfig::default(), &inst).unwrap();
    assert!(below.summability_partial_sum.is_none());
    let config = SolverConfig {
        tau: GOLDEN_RATIO + 0.05,
        max_iter: 200,
        ..Default::default()
    };
    let above = scb_spadmm_solve_with(&problem, &config, &inst).unwrap();
    let sum = above.summability_partial_sum.unwrap();
    assert!(sum.is_finite() && sum > 0.0);
}

#[test]
fn stopping_rules() {
    let (inst, problem) = small_qsdp();
    let capped = SolverConfig {
        max_iter: 3,
        ..Default::default()
    };
    let res = scb_spadmm_solve_with(&problem, &capped, &inst).unwrap();
    assert_eq!((res.termination, res.iterations), (Termination::MaxIter, 3));

    let impatient = SolverConfig {
        stagnation_window: 5,
        stagnation_ratio: 0.999,
        ..Default::default()
    };
    let res = scb_spadmm_solve_with(&problem, &impatient, &inst).unwrap();
    assert_eq!(res.termination, Termination::Stagnation);

    let fragile = SolverConfig {
        divergence_threshold: 1e-12,
        ..Default::default()
    };
    let res = scb_spadmm_solve_with(&problem, &fragile, &inst).unwrap();
    assert_eq!((res.termination, res.iterations), (Termination::Diverged, 1));
}

#[test]
fn scaled_identity_majorizers_also_converge() {
    let (inst, problem) = small_qsdp();
    let config = SolverConfig {
        majorizer_strategy: MajorizerStrategy::ScaledIdentity,
        ..Default::default()
    };
    let res = scb_spadmm_solve_with(&problem, &config, &inst).unwrap();
    assert_eq!(res.termination, Termination::ToleranceMet);
    let gap = res.final_report.eta_gap.unwrap().abs();
    assert!(gap < 1e-4, "gap {gap}");
}

#[test]
fn solves_are_deterministic() {
    let (inst, problem) = small_qsdp();
    let a = scb_spadmm_solve_with(&problem, &SolverConfig::default(), &inst).unwrap();
    let b = scb_spadmm_solve_with(&problem, &SolverConfig::default(), &inst).unwrap();
    assert_eq!(a.state, b.state);
    assert_eq!(a.final_report.eta.to_bits(), b.final_report.eta.to_bits());
}

#[test]
fn stepping_by_hand_matches_the_driver() {
    let (inst, problem) = small_qsdp();
    let config = SolverConfig {
        max_iter: 10,
        ..Default::default()
    };
    let solver = ScbSolver::new(&problem, &config).unwrap();
    let mut state = scb_admm::model::IterateState::initial(&problem);
    for _ in 0..10 {
        let out = solver.step(&mut state).unwrap();
        let gamma = constraint_residual(&problem, &state).unwrap();
        assert!((out.gamma_norm - gamma.norm()).abs() <= 1e-12 * (1.0 + gamma.norm()));
    }
    let res = scb_spadmm_solve_with(&problem, &config, &inst).unwrap();
    assert!(rel_dev(&res.state.x, &state.x) <= 1e-14);
}

#[test]
fn baseline_runs_with_unit_step() {
    let (inst, problem) = small_qsdp();
    let config = baseline_config(&SolverConfig::default());
    assert_eq!(config.tau, BASELINE_TAU);
    let res = direct_admm_solve_with(&problem, &config, &inst).unwrap();
    assert_eq!(res.termination, Termination::ToleranceMet);
}
