//! Directly extended multi-block ADMM: one forward Gauss–Seidel pass over
//! `f, θ_1..θ_p, g, φ_1..φ_q` per iteration, with no backward sweeps and no
//! correction term. It carries no convergence guarantee for three or more
//! blocks and is kept as the comparison baseline.

use crate::diagnostics::{GeneralResidual, ResidualMeasure};
use crate::error::Result;
use crate::kernels::{prox_update, quad_update};
use crate::model::{constraint_residual, BlockProblem, IterateState};
use crate::scb::{build_block_majorizers, drive, BlockMajorizers, SolveResult, SolverConfig, StepOutcome};

/// Step length the baseline uses unless told otherwise.
pub const BASELINE_TAU: f64 = 1.0;

/// `config` with `τ = 1`, the baseline's customary step length.
pub fn baseline_config(config: &SolverConfig) -> SolverConfig {
    SolverConfig {
        tau: BASELINE_TAU,
        ..config.clone()
    }
}

/// One forward pass followed by `x ← x + τσΓ`.
pub fn direct_admm_step(
    problem: &BlockProblem,
    majorizers: &BlockMajorizers,
    sigma: f64,
    tau: f64,
    state: &mut IterateState,
) -> Result<StepOutcome> {
    let x = state.x.clone();
    let mut gamma = constraint_residual(problem, state)?;

    let u = prox_update(&problem.f, problem.f.scale, &state.u, &state.u, &gamma, &x, sigma, None);
    gamma += problem.f.map.adjoint(&(&u - &state.u));
    state.u = u;
    for (i, b) in problem.theta.iter().enumerate() {
        let y = quad_update(b, &majorizers.theta[i], &state.y[i], &state.y[i], &gamma, &x, sigma);
        gamma += b.map.adjoint(&(&y - &state.y[i]));
        state.y[i] = y;
    }

    let v = prox_update(&problem.g, problem.g.scale, &state.v, &state.v, &gamma, &x, sigma, None);
    let mut second_move = problem.g.map.adjoint(&(&v - &state.v));
    for (j, b) in problem.phi.iter().enumerate() {
        let z = quad_update(b, &majorizers.phi[j], &state.z[j], &state.z[j], &(&gamma + &second_move), &x, sigma);
        second_move += b.map.adjoint(&(&z - &state.z[j]));
        state.z[j] = z;
    }
    gamma += &second_move;
    state.v = v;
    state.y_bar = state.y.clone();
    state.z_bar = state.z.clone();
    state.x += &gamma * (tau * sigma);
    Ok(StepOutcome::new(
        gamma.norm(),
        second_move.norm_squared() + gamma.norm_squared() / tau,
    ))
}

/// Runs the baseline with `config` as given (callers wanting the customary
/// `τ = 1` pass [`baseline_config`]).
pub fn direct_admm_solve(problem: &BlockProblem, config: &SolverConfig) -> Result<SolveResult> {
    direct_admm_solve_with(problem, config, &GeneralResidual)
}

pub fn direct_admm_solve_with(
    problem: &BlockProblem,
    config: &SolverConfig,
    measure: &dyn ResidualMeasure,
) -> Result<SolveResult> {
    config.validate()?;
    let majorizers = build_block_majorizers(problem, config)?;
    drive(problem, config, measure, IterateState::initial(problem), |s| {
        direct_admm_step(problem, &majorizers, config.sigma, config.tau, s)
    })
}
