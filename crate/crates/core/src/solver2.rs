//! Two-block semi-proximal ADMM and its Schur-complement (augmented
//! Lagrangian) variant for a quadratic second block.

use nalgebra::{DMatrix, DVector};

use crate::dense::{block_diagonal, hstack, joint_prox};
use crate::diagnostics::{GeneralResidual, ResidualMeasure};
use crate::error::{check_dim, Error, Result};
use crate::kernels::{prox_update, quad_update};
use crate::linops::{dense_map, dense_op, Majorizer, ZeroMap};
use crate::model::{BlockProblem, IterateState, ProxBlock, QuadraticBlock};
use crate::prox::ProxFriendlyFunction;
use crate::scb::{drive, SolveResult, SolverConfig, StepOutcome};

/// Largest total dimension the dense joint oracle accepts.
pub const JOINT_ORACLE_LIMIT: usize = 12;

/// Second block of a 2-block problem.
#[derive(Clone, Debug)]
pub enum SecondBlock {
    Prox(ProxBlock),
    Quadratic(QuadraticBlock),
}

/// `min f(u) + g(v)  s.t.  F*u + G*v = c`.
#[derive(Clone, Debug)]
pub struct TwoBlockProblem {
    pub f: ProxBlock,
    pub g: SecondBlock,
    pub c: DVector<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoBlockState {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub x: DVector<f64>,
}

/// Semi-proximal term attached to one block.
#[derive(Clone, Debug)]
pub enum ProximalTerm {
    /// `T = λI − M M*` for a prox block (requires `λI ⪰ M M*`).
    ScaledComplement(f64),
    /// `T = E − σ⁻¹P − A A*` for a quadratic block.
    Majorized(Majorizer),
}

impl TwoBlockProblem {
    pub fn new(f: ProxBlock, g: SecondBlock, c: DVector<f64>) -> Result<Self> {
        check_dim("f map domain", c.len(), f.map.dom_dim())?;
        check_dim("g map domain", c.len(), g.map().dom_dim())?;
        Ok(Self { f, g, c })
    }

    /// Views a block problem without quadratic blocks as a 2-block problem.
    pub fn from_block_problem(problem: &BlockProblem) -> Result<Self> {
        if problem.p() != 0 || problem.q() != 0 {
            return Err(Error::Configuration(format!(
                "2-block solver needs p = q = 0, got p = {}, q = {}",
                problem.p(),
                problem.q()
            )));
        }
        Self::new(problem.f.clone(), SecondBlock::Prox(problem.g.clone()), problem.c.clone())
    }

    /// Embeds into the multi-block model. A quadratic `g` becomes the single
    /// `θ` block and the nonsmooth second slot is an empty block.
    pub fn to_block_problem(&self) -> Result<BlockProblem> {
        match &self.g {
            SecondBlock::Prox(g) => BlockProblem::new(self.f.clone(), vec![], g.clone(), vec![], self.c.clone()),
            SecondBlock::Quadratic(g) => {
                let empty = ProxBlock::with_scale(
                    "empty",
                    ProxFriendlyFunction::Zero { dim: 0 },
                    ZeroMap::shared(self.c.len(), 0),
                    1.0,
                )?;
                BlockProblem::new(self.f.clone(), vec![g.clone()], empty, vec![], self.c.clone())
            }
        }
    }

    pub fn zero_state(&self) -> TwoBlockState {
        TwoBlockState {
            u: DVector::zeros(self.f.dim()),
            v: DVector::zeros(self.g.dim()),
            x: DVector::zeros(self.c.len()),
        }
    }

    pub fn residual(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.f.map.adjoint(u) + self.g.map().adjoint(v) - &self.c
    }
}

impl SecondBlock {
    pub fn map(&self) -> &crate::linops::LinearMap {
        match self {
            Self::Prox(b) => &b.map,
            Self::Quadratic(b) => &b.map,
        }
    }

    pub fn dim(&self) -> usize {
        self.map().cod_dim()
    }
}

impl TwoBlockState {
    pub fn to_iterate(&self, problem: &TwoBlockProblem) -> IterateState {
        match &problem.g {
            SecondBlock::Prox(_) => IterateState {
                u: self.u.clone(),
                y: vec![],
                v: self.v.clone(),
                z: vec![],
                x: self.x.clone(),
                y_bar: vec![],
                z_bar: vec![],
                iter: 0,
            },
            SecondBlock::Quadratic(_) => IterateState {
                u: self.u.clone(),
                y: vec![self.v.clone()],
                v: DVector::zeros(0),
                z: vec![],
                x: self.x.clone(),
                y_bar: vec![self.v.clone()],
                z_bar: vec![],
                iter: 0,
            },
        }
    }

    pub fn from_iterate(problem: &TwoBlockProblem, s: &IterateState) -> Self {
        let v = match &problem.g {
            SecondBlock::Prox(_) => s.v.clone(),
            SecondBlock::Quadratic(_) => s.y[0].clone(),
        };
        Self {
            u: s.u.clone(),
            v,
            x: s.x.clone(),
        }
    }
}

fn check_state(problem: &TwoBlockProblem, s: &TwoBlockState) -> Result<()> {
    check_dim("state u", problem.f.dim(), s.u.len())?;
    check_dim("state v", problem.g.dim(), s.v.len())?;
    check_dim("state x", problem.c.len(), s.x.len())
}

fn scaled(term: &ProximalTerm, what: &str) -> Result<f64> {
    match term {
        ProximalTerm::ScaledComplement(l) if *l > 0.0 && l.is_finite() => Ok(*l),
        ProximalTerm::ScaledComplement(l) => Err(Error::Configuration(format!(
            "{what}: proximal scale must be positive, got {l}"
        ))),
        ProximalTerm::Majorized(_) => Err(Error::Configuration(format!(
            "{what}: a nonsmooth block needs T = λI − M M* so its subproblem is a prox"
        ))),
    }
}

fn majorized<'a>(term: &'a ProximalTerm, block: &QuadraticBlock, sigma: f64) -> Result<&'a Majorizer> {
    match term {
        ProximalTerm::Majorized(e) => {
            check_dim(&format!("majorizer for {}", block.name), block.dim(), e.dim())?;
            if (e.sigma() - sigma).abs() > 1e-15 * sigma {
                return Err(Error::Configuration(format!(
                    "majorizer for {} built for σ = {}, step uses σ = {sigma}",
                    block.name,
                    e.sigma()
                )));
            }
            Ok(e)
        }
        ProximalTerm::ScaledComplement(_) => Err(Error::Configuration(format!(
            "quadratic block {} needs a majorizer so its subproblem is one linear solve",
            block.name
        ))),
    }
}

fn check_params(sigma: f64, tau: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Configuration(format!("σ must be positive, got {sigma}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Configuration(format!("τ must be positive, got {tau}")));
    }
    Ok(())
}

/// One semi-proximal ADMM step: `u`-update, `v`-update, then
/// `x⁺ = x + τσ(F*u⁺ + G*v⁺ − c)`.
pub fn spadmm2_step(
    problem: &TwoBlockProblem,
    state: &TwoBlockState,
    sigma: f64,
    tau: f64,
    t_f: &ProximalTerm,
    t_g: &ProximalTerm,
) -> Result<TwoBlockState> {
    check_params(sigma, tau)?;
    check_state(problem, state)?;
    let lf = scaled(t_f, &problem.f.name)?;
    let gamma = problem.residual(&state.u, &state.v);
    let u = prox_update(&problem.f, lf, &state.u, &state.u, &gamma, &state.x, sigma, None);
    let gamma = &gamma + problem.f.map.adjoint(&(&u - &state.u));
    let v = match &problem.g {
        SecondBlock::Prox(g) => {
            let lg = scaled(t_g, &g.name)?;
            prox_update(g, lg, &state.v, &state.v, &gamma, &state.x, sigma, None)
        }
        SecondBlock::Quadratic(g) => {
            let e = majorized(t_g, g, sigma)?;
            quad_update(g, e, &state.v, &state.v, &gamma, &state.x, sigma)
        }
    };
    let r = problem.residual(&u, &v);
    Ok(TwoBlockState {
        u,
        v,
        x: &state.x + r * (tau * sigma),
    })
}

fn quadratic_g(problem: &TwoBlockProblem) -> Result<&QuadraticBlock> {
    match &problem.g {
        SecondBlock::Quadratic(g) => Ok(g),
        SecondBlock::Prox(_) => Err(Error::Configuration("this step needs a quadratic g block".into())),
    }
}

/// `δ_g(u, v, x) = F G* E_g⁻¹(b − G x − Σ_g v + σ G(c − F*u − G*v))`.
pub fn delta_g_term(
    problem: &TwoBlockProblem,
    u: &DVector<f64>,
    v: &DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
    e_g: &Majorizer,
) -> Result<DVector<f64>> {
    let g = quadratic_g(problem)?;
    check_dim("δ_g majorizer", g.dim(), e_g.dim())?;
    let inner = &problem.c - problem.f.map.adjoint(u) - g.map.adjoint(v);
    let mut w = &g.linear - g.map.apply(x) + g.map.apply(&inner) * sigma;
    if !g.hessian.is_zero() {
        w -= g.hessian.apply(v);
    }
    Ok(problem.f.map.apply(&g.map.adjoint(&e_g.solve(&w))))
}

/// Which split procedure realizes the joint proximal step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpalmVariant {
    /// `u`-update with the extra linear term `⟨δ̄_g, u⟩`, then `v`.
    M1,
    /// Backward `v′`, plain `u`-update against `v′`, then `v`.
    M2,
}

/// `ᾱ = σ⁻¹b + T_g v̄ + G(c − σ⁻¹x̄)`.
fn alpha_bar(problem: &TwoBlockProblem, g: &QuadraticBlock, e_g: &Majorizer, state: &TwoBlockState, sigma: f64) -> DVector<f64> {
    &g.linear / sigma + e_g.apply_t(&state.v) + g.map.apply(&(&problem.c - &state.x / sigma))
}

/// One step of the Schur-complement based augmented Lagrangian scheme: the
/// `(u, v)` pair minimizes `L_σ + σ/2‖u − ū‖²_{T̂_f} + σ/2‖v − v̄‖²_{T_g}`
/// jointly, realized by either split procedure; then the multiplier update.
pub fn scb_spalm_step(
    problem: &TwoBlockProblem,
    state: &TwoBlockState,
    sigma: f64,
    tau: f64,
    t_f: &ProximalTerm,
    e_g: &Majorizer,
    variant: SpalmVariant,
) -> Result<TwoBlockState> {
    check_params(sigma, tau)?;
    check_state(problem, state)?;
    let g = quadratic_g(problem)?;
    check_dim("g majorizer", g.dim(), e_g.dim())?;
    let lf = scaled(t_f, &problem.f.name)?;
    let alpha = alpha_bar(problem, g, e_g, state, sigma);
    let u = match variant {
        SpalmVariant::M1 => {
            let delta = delta_g_term(problem, &state.u, &state.v, &state.x, sigma, e_g)?;
            let gamma = problem.residual(&state.u, &state.v);
            prox_update(&problem.f, lf, &state.u, &state.u, &gamma, &state.x, sigma, Some(&delta))
        }
        SpalmVariant::M2 => {
            let v_prime = e_g.solve(&(&alpha - g.map.apply(&problem.f.map.adjoint(&state.u))));
            let gamma = problem.residual(&state.u, &v_prime);
            prox_update(&problem.f, lf, &state.u, &state.u, &gamma, &state.x, sigma, None)
        }
    };
    let v = e_g.solve(&(&alpha - g.map.apply(&problem.f.map.adjoint(&u))));
    let r = problem.residual(&u, &v);
    Ok(TwoBlockState {
        u,
        v,
        x: &state.x + r * (tau * sigma),
    })
}

fn dense_f_model(f: &ProxBlock) -> Result<crate::prox::DenseModel> {
    f.func.dense_model().ok_or_else(|| {
        Error::Configuration(format!(
            "block {}: the dense oracle supports only zero, nonnegativity and quadratic functions",
            f.name
        ))
    })
}

/// Exact joint minimizer of `L_σ(u, v; x̄) + σ/2‖u − ū‖²_{T̂_f} + σ/2‖v − v̄‖²_{T_g}`
/// with `T̂_f = T_f + F G* E_g⁻¹ G F*`, by a dense solve.
pub fn scb_spalm_joint_oracle(
    problem: &TwoBlockProblem,
    state: &TwoBlockState,
    sigma: f64,
    t_f: &ProximalTerm,
    e_g: &Majorizer,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_state(problem, state)?;
    let g = quadratic_g(problem)?;
    let lf = scaled(t_f, &problem.f.name)?;
    let (nu, nv) = (problem.f.dim(), g.dim());
    if nu + nv > JOINT_ORACLE_LIMIT {
        return Err(Error::OracleScale {
            dims: nu + nv,
            limit: JOINT_ORACLE_LIMIT,
        });
    }
    let fm = dense_map(problem.f.map.as_ref());
    let gm = dense_map(g.map.as_ref());
    let t_f_dense = DMatrix::identity(nu, nu) * lf - &fm * fm.transpose();
    let fg = &fm * gm.transpose();
    let t_hat = t_f_dense + &fg * e_g.dense_inverse() * fg.transpose();
    let model = dense_f_model(&problem.f)?;
    let hessian = block_diagonal(&[model.hessian, dense_op(g.hessian.as_ref())]);
    let mut linear = DVector::zeros(nu + nv);
    linear.rows_mut(0, nu).copy_from(&model.linear);
    linear.rows_mut(nu, nv).copy_from(&-&g.linear);
    let mut nonneg = model.nonneg;
    nonneg.extend(std::iter::repeat(false).take(nv));
    let k = hstack(&[fm.transpose(), gm.transpose()]);
    let t = block_diagonal(&[t_hat, e_g.dense_t()]);
    let mut center = DVector::zeros(nu + nv);
    center.rows_mut(0, nu).copy_from(&state.u);
    center.rows_mut(nu, nv).copy_from(&state.v);
    let w = joint_prox(&hessian, &linear, &nonneg, &k, &state.x, &problem.c, sigma, &t, &center)?;
    Ok((w.rows(0, nu).into_owned(), w.rows(nu, nv).into_owned()))
}

/// Runs [`spadmm2_step`] on a block problem with `p = q = 0`, using each
/// block's own proximal scale.
pub fn spadmm2_solve(problem: &BlockProblem, config: &SolverConfig) -> Result<SolveResult> {
    spadmm2_solve_with(problem, config, &GeneralResidual)
}

pub fn spadmm2_solve_with(
    problem: &BlockProblem,
    config: &SolverConfig,
    measure: &dyn ResidualMeasure,
) -> Result<SolveResult> {
    config.validate()?;
    let two = TwoBlockProblem::from_block_problem(problem)?;
    let t_f = ProximalTerm::ScaledComplement(problem.f.scale);
    let t_g = ProximalTerm::ScaledComplement(problem.g.scale);
    let start = IterateState::initial(problem);
    drive(problem, config, measure, start, |s| {
        let cur = TwoBlockState::from_iterate(&two, s);
        let next = spadmm2_step(&two, &cur, config.sigma, config.tau, &t_f, &t_g)?;
        let dv = problem.g.map.adjoint(&(&next.v - &cur.v)).norm_squared();
        let gamma = two.residual(&next.u, &next.v);
        s.u = next.u;
        s.v = next.v;
        s.x = next.x;
        Ok(StepOutcome::new(gamma.norm(), dv + gamma.norm_squared() / config.tau))
    })
}

/// Iterates [`scb_spalm_step`] from the zero state; `η` is the general
/// residual of the embedded block problem.
pub fn scb_spalm_solve(
    problem: &TwoBlockProblem,
    config: &SolverConfig,
    e_g: &Majorizer,
    variant: SpalmVariant,
) -> Result<SolveResult> {
    config.validate()?;
    let embedded = problem.to_block_problem()?;
    let t_f = ProximalTerm::ScaledComplement(problem.f.scale);
    let mut start = problem.zero_state();
    start.u = problem.f.func.prox(&start.u, 1.0);
    let start = start.to_iterate(problem);
    drive(&embedded, config, &GeneralResidual, start, |s| {
        let cur = TwoBlockState::from_iterate(problem, s);
        let next = scb_spalm_step(problem, &cur, config.sigma, config.tau, &t_f, e_g, variant)?;
        let gamma = problem.residual(&next.u, &next.v);
        s.u = next.u;
        s.y[0] = next.v.clone();
        s.y_bar[0] = next.v;
        s.x = next.x;
        Ok(StepOutcome::new(gamma.norm(), gamma.norm_squared() / config.tau))
    })
}
