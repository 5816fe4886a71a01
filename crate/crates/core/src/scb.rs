//! Schur-complement based semi-proximal ADMM for the multi-block model.
//!
//! Each iteration sweeps the quadratic blocks backward, updates the prox
//! block, sweeps them forward again, repeats for the second group, and
//! finishes with the multiplier update. The dense oracles at the bottom of
//! the module assemble the grouped 2-block step explicitly and are used to
//! certify that the sweeps reproduce it exactly.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dense::{block_diagonal, hstack, joint_prox};
use crate::diagnostics::{GeneralResidual, ResidualMeasure, ResidualReport};
use crate::error::{check_dim, Error, Result};
use crate::kernels::{prox_update, quad_update};
use crate::linops::{build_majorizer, dense_map, dense_op, is_positive_definite, LinearMap, Majorizer, MajorizerStrategy};
pub use crate::model::IterateState;
use crate::model::{constraint_residual, BlockProblem, ProxBlock, QuadraticBlock};

/// `(1 + √5)/2`, the step-length threshold above which the summability
/// condition is tracked.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Largest total primal dimension the dense equivalence oracle accepts.
pub const EQUIVALENCE_ORACLE_LIMIT: usize = 20;

/// Largest total primal dimension [`schur_pd_check`] assembles.
pub const PD_CHECK_LIMIT: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub sigma: f64,
    pub tau: f64,
    /// Stop once `η ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Strategy for every quadratic block without an entry in `block_strategies`.
    pub majorizer_strategy: MajorizerStrategy,
    /// Per-block overrides, `θ` blocks first, then `φ` blocks.
    pub block_strategies: Option<Vec<MajorizerStrategy>>,
    /// Trace cadence; the final report is always recorded.
    pub log_every: usize,
    pub seed: u64,
    /// Stop when the best `η` improved by less than `stagnation_ratio`
    /// (relative) over this many iterations. `0` disables the check.
    pub stagnation_window: usize,
    pub stagnation_ratio: f64,
    /// Abort with [`Termination::Diverged`] once `‖Γ‖` exceeds this.
    pub divergence_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            tau: 1.618,
            tol: 1e-6,
            max_iter: 25_000,
            majorizer_strategy: MajorizerStrategy::Auto,
            block_strategies: None,
            log_every: 50,
            seed: 0,
            stagnation_window: 1000,
            stagnation_ratio: 1e-3,
            divergence_threshold: 1e10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Configuration(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("sigma", self.sigma)?;
        positive("tau", self.tau)?;
        positive("tol", self.tol)?;
        positive("divergence_threshold", self.divergence_threshold)?;
        if self.max_iter == 0 {
            return Err(Error::Configuration("max_iter must be at least 1".into()));
        }
        if self.log_every == 0 {
            return Err(Error::Configuration("log_every must be at least 1".into()));
        }
        if !(self.stagnation_ratio >= 0.0 && self.stagnation_ratio < 1.0) {
            return Err(Error::Configuration(format!(
                "stagnation_ratio must lie in [0, 1), got {}",
                self.stagnation_ratio
            )));
        }
        Ok(())
    }

    fn strategy_for(&self, index: usize) -> MajorizerStrategy {
        self.block_strategies
            .as_ref()
            .and_then(|s| s.get(index).copied())
            .unwrap_or(self.majorizer_strategy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    MaxIter,
    Stagnation,
    Diverged,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ToleranceMet => "tolerance_met",
            Self::MaxIter => "max_iter",
            Self::Stagnation => "stagnation",
            Self::Diverged => "diverged",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub state: IterateState,
    pub termination: Termination,
    /// Reports at every `log_every` iterations plus the final one.
    pub trace: Vec<ResidualReport>,
    pub final_report: ResidualReport,
    /// Seconds spent in the iteration loop.
    pub wall_time: f64,
    pub iterations: usize,
    /// Block update order used by the solver.
    pub block_order: Vec<String>,
    /// Partial sum of the summability series, tracked when `τ ≥ (1+√5)/2`.
    pub summability_partial_sum: Option<f64>,
}

/// What one solver step reports back to the driver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// `‖Γ‖` after the step.
    pub gamma_norm: f64,
    /// Term of the summability series for this step.
    pub summability_term: f64,
}

impl StepOutcome {
    pub fn new(gamma_norm: f64, summability_term: f64) -> Self {
        Self {
            gamma_norm,
            summability_term,
        }
    }
}

/// Shared iteration loop: runs `step` until the measure reports `η ≤ tol`,
/// the iteration cap, stagnation or divergence.
pub(crate) fn drive<S>(
    problem: &BlockProblem,
    config: &SolverConfig,
    measure: &dyn ResidualMeasure,
    start: IterateState,
    mut step: S,
) -> Result<SolveResult>
where
    S: FnMut(&mut IterateState) -> Result<StepOutcome>,
{
    config.validate()?;
    start.check_shape(problem)?;
    let block_order = problem.block_names();
    let track_sum = config.tau >= GOLDEN_RATIO;
    let mut partial_sum = 0.0;
    let clock = Instant::now();

    let mut state = start;
    state.iter = 0;
    let mut report = measure.report(problem, &state)?;
    report.iter = 0;
    let mut trace = vec![report.clone()];
    let mut termination = if report.eta <= config.tol {
        Some(Termination::ToleranceMet)
    } else {
        None
    };
    let mut best = report.eta;
    let mut best_history = vec![best];

    let mut k = 0;
    while termination.is_none() {
        k += 1;
        let outcome = step(&mut state)?;
        state.iter = k;
        if !state.is_finite() || !outcome.gamma_norm.is_finite() {
            return Err(Error::NonFinite { iter: k });
        }
        if track_sum {
            partial_sum += outcome.summability_term;
        }
        report = measure.report(problem, &state)?;
        report.iter = k;
        report.elapsed_s = clock.elapsed().as_secs_f64();
        if !report.eta.is_finite() {
            return Err(Error::NonFinite { iter: k });
        }
        best = best.min(report.eta);
        best_history.push(best);
        if k % config.log_every == 0 {
            trace.push(report.clone());
        }
        termination = if report.eta <= config.tol {
            Some(Termination::ToleranceMet)
        } else if outcome.gamma_norm > config.divergence_threshold {
            Some(Termination::Diverged)
        } else if config.stagnation_window > 0
            && k >= config.stagnation_window
            && best > best_history[k - config.stagnation_window] * (1.0 - config.stagnation_ratio)
        {
            Some(Termination::Stagnation)
        } else if k >= config.max_iter {
            Some(Termination::MaxIter)
        } else {
            None
        };
    }
    if trace.last().map(|r| r.iter) != Some(report.iter) {
        trace.push(report.clone());
    }
    if track_sum {
        log::info!("summability partial sum after {k} iterations: {partial_sum:.6e}");
    }
    Ok(SolveResult {
        state,
        termination: termination.expect("loop exits with a reason"),
        trace,
        final_report: report,
        wall_time: clock.elapsed().as_secs_f64(),
        iterations: k,
        block_order,
        summability_partial_sum: track_sum.then_some(partial_sum),
    })
}

/// Majorizers of the `θ` and `φ` blocks.
#[derive(Clone, Debug)]
pub struct BlockMajorizers {
    pub theta: Vec<Majorizer>,
    pub phi: Vec<Majorizer>,
}

fn block_majorizer(block: &QuadraticBlock, sigma: f64, strategy: MajorizerStrategy) -> Result<Majorizer> {
    match (strategy, &block.structured) {
        (MajorizerStrategy::Auto, Some(factory)) => factory(sigma),
        (MajorizerStrategy::Auto, None) => build_majorizer(sigma, &block.hessian, &block.map, MajorizerStrategy::Exact),
        (s, _) => build_majorizer(sigma, &block.hessian, &block.map, s),
    }
}

/// Builds every quadratic block's majorizer as the config requests.
pub fn build_block_majorizers(problem: &BlockProblem, config: &SolverConfig) -> Result<BlockMajorizers> {
    if let Some(s) = &config.block_strategies {
        check_dim("per-block majorizer strategies", problem.p() + problem.q(), s.len())?;
    }
    let theta = problem
        .theta
        .iter()
        .enumerate()
        .map(|(i, b)| block_majorizer(b, config.sigma, config.strategy_for(i)))
        .collect::<Result<Vec<_>>>()?;
    let phi = problem
        .phi
        .iter()
        .enumerate()
        .map(|(j, b)| block_majorizer(b, config.sigma, config.strategy_for(problem.p() + j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockMajorizers { theta, phi })
}

fn check_majorizers(blocks: &[QuadraticBlock], majs: &[Majorizer], sigma: f64) -> Result<()> {
    check_dim("majorizer count", blocks.len(), majs.len())?;
    for (b, e) in blocks.iter().zip(majs) {
        check_dim(&format!("majorizer for {}", b.name), b.dim(), e.dim())?;
        if (e.sigma() - sigma).abs() > 1e-15 * sigma {
            return Err(Error::Configuration(format!(
                "majorizer for {} built for σ = {}, solver uses σ = {sigma}",
                b.name,
                e.sigma()
            )));
        }
    }
    Ok(())
}

/// Backward sweep: updates blocks last to first, each centred at its own
/// value, with later blocks already replaced. `gamma` tracks the residual.
fn backward_sweep(
    blocks: &[QuadraticBlock],
    majs: &[Majorizer],
    values: &[DVector<f64>],
    gamma: &mut DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
) -> Vec<DVector<f64>> {
    let mut out = values.to_vec();
    for i in (0..blocks.len()).rev() {
        let b = &blocks[i];
        let next = quad_update(b, &majs[i], &values[i], &values[i], gamma, x, sigma);
        *gamma += b.map.adjoint(&(&next - &values[i]));
        out[i] = next;
    }
    out
}

/// Forward sweep: block `i` is centred at `centers[i]` while the residual
/// still holds `currents[i]` (the backward-sweep value).
fn forward_sweep(
    blocks: &[QuadraticBlock],
    majs: &[Majorizer],
    centers: &[DVector<f64>],
    currents: &[DVector<f64>],
    gamma: &mut DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(blocks.len());
    for i in 0..blocks.len() {
        let b = &blocks[i];
        let next = quad_update(b, &majs[i], &centers[i], &currents[i], gamma, x, sigma);
        *gamma += b.map.adjoint(&(&next - &currents[i]));
        out.push(next);
    }
    out
}

/// Prox-block update followed by the residual bookkeeping.
fn prox_sweep(
    block: &ProxBlock,
    value: &DVector<f64>,
    gamma: &mut DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
    extra: Option<&DVector<f64>>,
) -> DVector<f64> {
    let next = prox_update(block, block.scale, value, value, gamma, x, sigma, extra);
    *gamma += block.map.adjoint(&(&next - value));
    next
}

/// The iteration engine with its majorizers fixed.
#[derive(Clone, Debug)]
pub struct ScbSolver<'a> {
    problem: &'a BlockProblem,
    sigma: f64,
    tau: f64,
    majorizers: BlockMajorizers,
}

impl<'a> ScbSolver<'a> {
    pub fn new(problem: &'a BlockProblem, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let majorizers = build_block_majorizers(problem, config)?;
        Self::with_majorizers(problem, config.sigma, config.tau, majorizers)
    }

    pub fn with_majorizers(
        problem: &'a BlockProblem,
        sigma: f64,
        tau: f64,
        majorizers: BlockMajorizers,
    ) -> Result<Self> {
        check_majorizers(&problem.theta, &majorizers.theta, sigma)?;
        check_majorizers(&problem.phi, &majorizers.phi, sigma)?;
        Ok(Self {
            problem,
            sigma,
            tau,
            majorizers,
        })
    }

    pub fn majorizers(&self) -> &BlockMajorizers {
        &self.majorizers
    }

    /// One full iteration in place: backward `ȳ`, `u`, forward `y`,
    /// backward `z̄`, `v`, forward `z`, then `x ← x + τσΓ`.
    pub fn step(&self, state: &mut IterateState) -> Result<StepOutcome> {
        let p = self.problem;
        let (sigma, x) = (self.sigma, state.x.clone());
        let mut gamma = constraint_residual(p, state)?;

        let y_bar = backward_sweep(&p.theta, &self.majorizers.theta, &state.y, &mut gamma, &x, sigma);
        let u = prox_sweep(&p.f, &state.u, &mut gamma, &x, sigma, None);
        let y = forward_sweep(&p.theta, &self.majorizers.theta, &state.y, &y_bar, &mut gamma, &x, sigma);

        let z_bar = backward_sweep(&p.phi, &self.majorizers.phi, &state.z, &mut gamma, &x, sigma);
        let v = prox_sweep(&p.g, &state.v, &mut gamma, &x, sigma, None);
        let z = forward_sweep(&p.phi, &self.majorizers.phi, &state.z, &z_bar, &mut gamma, &x, sigma);

        let mut second_move = p.g.map.adjoint(&(&v - &state.v));
        for (b, (new, old)) in p.phi.iter().zip(z.iter().zip(&state.z)) {
            second_move += b.map.adjoint(&(new - old));
        }
        state.u = u;
        state.y = y;
        state.y_bar = y_bar;
        state.v = v;
        state.z = z;
        state.z_bar = z_bar;
        state.x += &gamma * (self.tau * sigma);
        Ok(StepOutcome::new(
            gamma.norm(),
            second_move.norm_squared() + gamma.norm_squared() / self.tau,
        ))
    }

    /// Iterates [`ScbSolver::step`] from `start` under `config`'s stopping rules.
    pub fn solve(&self, config: &SolverConfig, measure: &dyn ResidualMeasure, start: IterateState) -> Result<SolveResult> {
        if config.sigma != self.sigma || config.tau != self.tau {
            return Err(Error::Configuration("config σ/τ differ from the solver's".into()));
        }
        drive(self.problem, config, measure, start, |s| self.step(s))
    }
}

/// Solves with the general residual as stopping measure.
pub fn scb_spadmm_solve(problem: &BlockProblem, config: &SolverConfig) -> Result<SolveResult> {
    scb_spadmm_solve_with(problem, config, &GeneralResidual)
}

/// Solves from the default start with a problem-specific residual.
pub fn scb_spadmm_solve_with(
    problem: &BlockProblem,
    config: &SolverConfig,
    measure: &dyn ResidualMeasure,
) -> Result<SolveResult> {
    let solver = ScbSolver::new(problem, config)?;
    solver.solve(config, measure, IterateState::initial(problem))
}

/// The `β̄` table of the first group together with `δ̄_θ` and `γ̄`.
#[derive(Clone, Debug)]
pub struct BetaTable {
    /// `δ̄_θ = Σ_i β̄_{i,1}`, a vector in the `u` space.
    pub delta_theta: DVector<f64>,
    /// `beta[i][j]` for `j ≤ i` (0-based): the term of block `i` mapped by
    /// `F` when `j = 0` and by the map of block `j − 1` otherwise.
    pub beta: Vec<Vec<DVector<f64>>>,
    /// `γ̄ = −Γ(ū, ȳ, v̄, z̄)`.
    pub gamma_bar: DVector<f64>,
}

/// Runs the downward `β̄` recursion at `state` (read as `(ū, ȳ, v̄, z̄, x̄)`).
pub fn beta_recursion(
    problem: &BlockProblem,
    state: &IterateState,
    sigma: f64,
    theta_majorizers: &[Majorizer],
) -> Result<BetaTable> {
    check_majorizers(&problem.theta, theta_majorizers, sigma)?;
    let gamma_bar = -constraint_residual(problem, state)?;
    let p = problem.p();
    let target_map = |j: usize| -> &LinearMap {
        if j == 0 {
            &problem.f.map
        } else {
            &problem.theta[j - 1].map
        }
    };
    let mut beta: Vec<Vec<DVector<f64>>> = vec![Vec::new(); p];
    for i in (0..p).rev() {
        let b = &problem.theta[i];
        let mut w = &b.linear - b.map.apply(&state.x) + b.map.apply(&gamma_bar) * sigma;
        if !b.hessian.is_zero() {
            w -= b.hessian.apply(&state.y[i]);
        }
        for row in beta.iter().skip(i + 1) {
            w -= &row[i + 1];
        }
        let lifted = b.map.adjoint(&theta_majorizers[i].solve(&w));
        beta[i] = (0..=i).map(|j| target_map(j).apply(&lifted)).collect();
    }
    let mut delta_theta = DVector::zeros(problem.f.dim());
    for row in &beta {
        delta_theta += &row[0];
    }
    Ok(BetaTable {
        delta_theta,
        beta,
        gamma_bar,
    })
}

/// The first-group update realized with the auxiliary linear term:
/// `u⁺` minimizes the augmented Lagrangian at `ȳ` plus `⟨δ̄_θ, u⟩`, then the
/// forward sweep runs against the backward values `y′`.
pub fn linear_term_step(
    problem: &BlockProblem,
    state: &IterateState,
    sigma: f64,
    theta_majorizers: &[Majorizer],
) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
    let table = beta_recursion(problem, state, sigma, theta_majorizers)?;
    let x = &state.x;
    let gamma = -table.gamma_bar.clone();
    let u = prox_update(&problem.f, problem.f.scale, &state.u, &state.u, &gamma, x, sigma, Some(&table.delta_theta));
    let mut swept = gamma;
    let y_prime = backward_sweep(&problem.theta, theta_majorizers, &state.y, &mut swept, x, sigma);
    swept += problem.f.map.adjoint(&(&u - &state.u));
    let y = forward_sweep(&problem.theta, theta_majorizers, &state.y, &y_prime, &mut swept, x, sigma);
    Ok((u, y))
}

fn dense_model_of(block: &ProxBlock) -> Result<crate::prox::DenseModel> {
    block.func.dense_model().ok_or_else(|| {
        Error::Configuration(format!(
            "block {}: the dense oracle supports only zero, nonnegativity and quadratic functions",
            block.name
        ))
    })
}

/// `T̂` of a group: starting from `t_first`, each quadratic block adds
/// `M_i A_i* E_i⁻¹ A_i M_i*` where `M_i*` stacks the adjoints of the prox
/// map and the earlier blocks, and the running operator is extended by the
/// previous block's `T`. Returns the operator over `(w, y_1, …, y_{k−1})`.
fn t_hat_chain(
    first_map: &DMatrix<f64>,
    t_first: &DMatrix<f64>,
    blocks: &[DMatrix<f64>],
    majs: &[Majorizer],
) -> DMatrix<f64> {
    let mut t_hat = t_first.clone();
    let mut stacked = vec![first_map.transpose()];
    for (i, (a, e)) in blocks.iter().zip(majs).enumerate() {
        if i > 0 {
            t_hat = block_diagonal(&[t_hat, majs[i - 1].dense_t()]);
            stacked.push(blocks[i - 1].transpose());
        }
        let k = hstack(&stacked);
        let lift = a * &k;
        t_hat += lift.transpose() * e.dense_inverse() * lift;
    }
    t_hat
}

/// Dense joint minimizer of one group — the prox block plus its quadratic
/// blocks — with the other group fixed at `(fixed_prox, fixed_quads)`
/// and proximal term `diag(T̂, T_last)` centred at the given values.
#[allow(clippy::too_many_arguments)]
fn grouped_prox(
    problem: &BlockProblem,
    prox: &ProxBlock,
    quads: &[QuadraticBlock],
    majs: &[Majorizer],
    center_prox: &DVector<f64>,
    center_quads: &[DVector<f64>],
    other_adjoint: &DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
    let model = dense_model_of(prox)?;
    let prox_map = dense_map(prox.map.as_ref());
    let maps: Vec<DMatrix<f64>> = quads.iter().map(|b| dense_map(b.map.as_ref())).collect();
    let t = if quads.is_empty() {
        prox.dense_t()
    } else {
        let t_hat = t_hat_chain(&prox_map, &prox.dense_t(), &maps, majs);
        block_diagonal(&[t_hat, majs[quads.len() - 1].dense_t()])
    };
    let mut hessians = vec![model.hessian];
    hessians.extend(quads.iter().map(|b| dense_op(b.hessian.as_ref())));
    let hessian = block_diagonal(&hessians);
    let mut linear_parts = vec![model.linear];
    linear_parts.extend(quads.iter().map(|b| -&b.linear));
    let linear = crate::linops::concat_vectors(&linear_parts);
    let mut nonneg = model.nonneg;
    for b in quads {
        nonneg.extend(std::iter::repeat(false).take(b.dim()));
    }
    let mut cols = vec![prox_map.transpose()];
    cols.extend(maps.iter().map(|a| a.transpose()));
    let k = hstack(&cols);
    let mut centers = vec![center_prox.clone()];
    centers.extend(center_quads.iter().cloned());
    let center = crate::linops::concat_vectors(&centers);
    let c_bar = &problem.c - other_adjoint;
    let w = joint_prox(&hessian, &linear, &nonneg, &k, x, &c_bar, sigma, &t, &center)?;
    let mut dims = vec![prox.dim()];
    dims.extend(quads.iter().map(|b| b.dim()));
    let mut parts = crate::linops::split_vector(&w, &dims).into_iter();
    let first = parts.next().expect("prox part present");
    Ok((first, parts.collect()))
}

fn adjoint_sum(prox: &ProxBlock, value: &DVector<f64>, quads: &[QuadraticBlock], values: &[DVector<f64>]) -> DVector<f64> {
    let mut out = prox.map.adjoint(value);
    for (b, v) in quads.iter().zip(values) {
        out += b.map.adjoint(v);
    }
    out
}

/// Dense joint minimizer of the first group `(u, y)` with the second group
/// fixed at `(v̄, z̄)`, proximal term `diag(T̂_f, T_θ_p)` centred at `(ū, ȳ)`.
pub fn first_group_oracle(
    problem: &BlockProblem,
    state: &IterateState,
    sigma: f64,
    theta_majorizers: &[Majorizer],
) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
    state.check_shape(problem)?;
    check_majorizers(&problem.theta, theta_majorizers, sigma)?;
    check_oracle_scale(problem)?;
    let other = adjoint_sum(&problem.g, &state.v, &problem.phi, &state.z);
    grouped_prox(problem, &problem.f, &problem.theta, theta_majorizers, &state.u, &state.y, &other, &state.x, sigma)
}

fn check_oracle_scale(problem: &BlockProblem) -> Result<()> {
    let total = problem.total_dim();
    if total > EQUIVALENCE_ORACLE_LIMIT {
        return Err(Error::OracleScale {
            dims: total,
            limit: EQUIVALENCE_ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// One grouped 2-block iteration computed by dense joint solves: group
/// `(u, y)` with `v, z` at the current values, then group `(v, z)` with the
/// new `(u, y)`, then the multiplier update.
pub fn grouped_step_oracle(
    problem: &BlockProblem,
    state: &IterateState,
    sigma: f64,
    tau: f64,
    majorizers: &BlockMajorizers,
) -> Result<IterateState> {
    let (u, y) = first_group_oracle(problem, state, sigma, &majorizers.theta)?;
    check_majorizers(&problem.phi, &majorizers.phi, sigma)?;
    let first = adjoint_sum(&problem.f, &u, &problem.theta, &y);
    let (v, z) = grouped_prox(problem, &problem.g, &problem.phi, &majorizers.phi, &state.v, &state.z, &first, &state.x, sigma)?;
    let mut next = state.clone();
    next.u = u;
    next.y = y;
    next.v = v;
    next.z = z;
    let gamma = constraint_residual(problem, &next)?;
    next.x += gamma * (tau * sigma);
    next.iter = state.iter + 1;
    Ok(next)
}

/// Outcome of comparing one sweep iteration with the grouped dense step.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Largest relative deviation `‖a − b‖/(1 + ‖b‖)` over all blocks and `x`.
    pub max_deviation: f64,
    /// The same per block in storage order, then `x`.
    pub deviations: Vec<(String, f64)>,
}

fn relative_deviation(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Runs one SCB iteration and one grouped dense iteration from `state` and
/// reports how far apart they land.
pub fn scb_equivalence_check(
    problem: &BlockProblem,
    state: &IterateState,
    config: &SolverConfig,
) -> Result<EquivalenceReport> {
    check_oracle_scale(problem)?;
    let solver = ScbSolver::new(problem, config)?;
    let mut swept = state.clone();
    solver.step(&mut swept)?;
    let oracle = grouped_step_oracle(problem, state, config.sigma, config.tau, solver.majorizers())?;
    let mut deviations = vec![(problem.f.name.clone(), relative_deviation(&swept.u, &oracle.u))];
    for (b, (a, o)) in problem.theta.iter().zip(swept.y.iter().zip(&oracle.y)) {
        deviations.push((b.name.clone(), relative_deviation(a, o)));
    }
    deviations.push((problem.g.name.clone(), relative_deviation(&swept.v, &oracle.v)));
    for (b, (a, o)) in problem.phi.iter().zip(swept.z.iter().zip(&oracle.z)) {
        deviations.push((b.name.clone(), relative_deviation(a, o)));
    }
    deviations.push(("x".into(), relative_deviation(&swept.x, &oracle.x)));
    let max_deviation = deviations.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        max_deviation,
        deviations,
    })
}

/// Positive-definiteness flags of both sides of the Schur-complement
/// equivalence for each group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchurPdFlags {
    /// `F_{p+1}F_{p+1}* + σ⁻¹Σ_{f_{p+1}} + diag(T̂_{f_p}, T_θ_p) ≻ 0`.
    pub f_lhs: bool,
    /// `F F* + σ⁻¹Σ_f + T_f ≻ 0`.
    pub f_rhs: bool,
    pub g_lhs: bool,
    pub g_rhs: bool,
}

/// Tolerance of the `λ_min > tol` test in [`schur_pd_check`].
pub const PD_TOL: f64 = 1e-10;

#[allow(clippy::too_many_arguments)]
fn group_pd_flags(
    prox_map: &DMatrix<f64>,
    sigma_prox: &DMatrix<f64>,
    t_prox: &DMatrix<f64>,
    quads: &[QuadraticBlock],
    majs: &[Majorizer],
    sigma: f64,
) -> Result<(bool, bool)> {
    check_dim("Σ of the prox block", prox_map.nrows(), sigma_prox.nrows())?;
    check_dim("T of the prox block", prox_map.nrows(), t_prox.nrows())?;
    let rhs = prox_map * prox_map.transpose() + sigma_prox / sigma + t_prox;
    let maps: Vec<DMatrix<f64>> = quads.iter().map(|b| dense_map(b.map.as_ref())).collect();
    let lhs = if quads.is_empty() {
        rhs.clone()
    } else {
        let t_hat = t_hat_chain(prox_map, t_prox, &maps, majs);
        let t = block_diagonal(&[t_hat, majs[quads.len() - 1].dense_t()]);
        let mut cols = vec![prox_map.transpose()];
        cols.extend(maps.iter().map(|a| a.transpose()));
        let k = hstack(&cols);
        let mut sigmas = vec![sigma_prox.clone()];
        sigmas.extend(quads.iter().map(|b| dense_op(b.hessian.as_ref())));
        k.transpose() * &k + block_diagonal(&sigmas) / sigma + t
    };
    Ok((is_positive_definite(&lhs, PD_TOL), is_positive_definite(&rhs, PD_TOL)))
}

/// Assembles both sides of the positive-definiteness equivalence for the
/// `(f, θ)` and `(g, φ)` groups. `sigma_f`, `sigma_g` are the curvature
/// operators of `f`, `g`; `t_f`, `t_g` their proximal terms.
#[allow(clippy::too_many_arguments)]
pub fn schur_pd_check(
    problem: &BlockProblem,
    sigma: f64,
    sigma_f: &DMatrix<f64>,
    sigma_g: &DMatrix<f64>,
    t_f: &DMatrix<f64>,
    t_g: &DMatrix<f64>,
    majorizers: &BlockMajorizers,
) -> Result<SchurPdFlags> {
    let total = problem.total_dim();
    if total > PD_CHECK_LIMIT {
        return Err(Error::OracleScale {
            dims: total,
            limit: PD_CHECK_LIMIT,
        });
    }
    check_majorizers(&problem.theta, &majorizers.theta, sigma)?;
    check_majorizers(&problem.phi, &majorizers.phi, sigma)?;
    let (f_lhs, f_rhs) = group_pd_flags(
        &dense_map(problem.f.map.as_ref()),
        sigma_f,
        t_f,
        &problem.theta,
        &majorizers.theta,
        sigma,
    )?;
    let (g_lhs, g_rhs) = group_pd_flags(
        &dense_map(problem.g.map.as_ref()),
        sigma_g,
        t_g,
        &problem.phi,
        &majorizers.phi,
        sigma,
    )?;
    Ok(SchurPdFlags {
        f_lhs,
        f_rhs,
        g_lhs,
        g_rhs,
    })
}
