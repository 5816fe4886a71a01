//! Block-structured convex programs
//!
//! ```text
//! min f(u) + Σ θ_i(y_i) + g(v) + Σ φ_j(z_j)
//! s.t. F*u + Σ A_i* y_i + G*v + Σ B_j* z_j = c
//! ```
//!
//! where `f`, `g` are prox-friendly and `θ_i`, `φ_j` are convex quadratics.
//! All coupling maps go from the constraint space `X` to the block space,
//! so the constraint uses their adjoints.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linops::{
    conjugate_gradient, dense_map, estimate_lambda_max, gram_op, BlockMap, LinearMap, Majorizer,
    PsdOp,
};
use crate::prox::{ProxFriendlyFunction, FEASIBILITY_TOL};

/// A nonsmooth block `f(u)` coupled through `F*u`.
///
/// The block is updated with the semi-proximal term `T = λI − F F*`, which
/// turns its subproblem into a single proximal step; `scale` is `λ`.
#[derive(Clone, Debug)]
pub struct ProxBlock {
    pub name: String,
    pub func: ProxFriendlyFunction,
    pub map: LinearMap,
    pub scale: f64,
}

impl ProxBlock {
    /// Uses the structural `F F* = λI` when the map reports it, otherwise an
    /// inflated power-iteration bound on `‖F F*‖`.
    pub fn new(name: &str, func: ProxFriendlyFunction, map: LinearMap) -> Result<Self> {
        let scale = match map.gram_scale() {
            Some(s) if s > 0.0 => s,
            _ => {
                let est = estimate_lambda_max(gram_op(&map).as_ref(), 0xb10c) * 1.001;
                if est > 0.0 {
                    est
                } else {
                    1.0
                }
            }
        };
        Self::with_scale(name, func, map, scale)
    }

    /// Explicit `λ`; the caller guarantees `λI ⪰ F F*`.
    pub fn with_scale(name: &str, func: ProxFriendlyFunction, map: LinearMap, scale: f64) -> Result<Self> {
        check_dim(&format!("block {name}: function vs map codomain"), func.dim(), map.cod_dim())?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidInput(format!("block {name}: proximal scale must be positive")));
        }
        Ok(Self {
            name: name.to_string(),
            func,
            map,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.map.cod_dim()
    }

    /// Dense `T = λI − F F*`.
    pub fn dense_t(&self) -> DMatrix<f64> {
        let f = dense_map(self.map.as_ref());
        DMatrix::identity(self.dim(), self.dim()) * self.scale - &f * f.transpose()
    }
}

/// Builds a structured majorizer for a given penalty `σ`.
pub type MajorizerFactory = Arc<dyn Fn(f64) -> Result<Majorizer> + Send + Sync>;

/// A quadratic block `θ(y) = ½⟨y, P y⟩ − ⟨b, y⟩` coupled through `A*y`.
#[derive(Clone)]
pub struct QuadraticBlock {
    pub name: String,
    pub hessian: PsdOp,
    pub linear: DVector<f64>,
    pub map: LinearMap,
    pub structured: Option<MajorizerFactory>,
}

impl std::fmt::Debug for QuadraticBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticBlock")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("structured", &self.structured.is_some())
            .finish()
    }
}

impl QuadraticBlock {
    pub fn new(name: &str, hessian: PsdOp, linear: DVector<f64>, map: LinearMap) -> Result<Self> {
        check_dim(&format!("block {name}: Hessian"), map.cod_dim(), hessian.dim())?;
        check_dim(&format!("block {name}: linear term"), map.cod_dim(), linear.len())?;
        Ok(Self {
            name: name.to_string(),
            hessian,
            linear,
            map,
            structured: None,
        })
    }

    /// Attaches a closed-form majorizer used by [`MajorizerStrategy::Auto`](crate::linops::MajorizerStrategy).
    pub fn with_structured_majorizer(mut self, factory: MajorizerFactory) -> Self {
        self.structured = Some(factory);
        self
    }

    pub fn dim(&self) -> usize {
        self.map.cod_dim()
    }

    pub fn value(&self, y: &DVector<f64>) -> f64 {
        let quad = if self.hessian.is_zero() {
            0.0
        } else {
            0.5 * y.dot(&self.hessian.apply(y))
        };
        quad - self.linear.dot(y)
    }

    /// `argmin_y θ(y) + ½‖y − w‖² = (I + P)⁻¹(w + b)`.
    pub fn prox_unit(&self, w: &DVector<f64>) -> DVector<f64> {
        let rhs = w + &self.linear;
        if self.hessian.is_zero() {
            return rhs;
        }
        let h = self.hessian.clone();
        let (sol, _) = conjugate_gradient(&|v| v + h.apply(v), &rhs, 1e-14, 20 * rhs.len().max(10));
        sol
    }

    /// `θ*(r) = ½⟨r + b, P⁺(r + b)⟩` when `r + b ∈ range P` (up to tolerance),
    /// `+∞` otherwise.
    pub fn conjugate(&self, r: &DVector<f64>) -> f64 {
        let w = r + &self.linear;
        let tol = FEASIBILITY_TOL * (1.0 + r.norm());
        if self.hessian.is_zero() {
            return if w.norm() <= tol { 0.0 } else { f64::INFINITY };
        }
        let h = self.hessian.clone();
        let (sol, _) = conjugate_gradient(&|v| h.apply(v), &w, 1e-13, 20 * w.len().max(10));
        if (self.hessian.apply(&sol) - &w).norm() <= tol {
            0.5 * w.dot(&sol)
        } else {
            f64::INFINITY
        }
    }
}

/// The full multi-block problem.
#[derive(Clone, Debug)]
pub struct BlockProblem {
    pub f: ProxBlock,
    pub theta: Vec<QuadraticBlock>,
    pub g: ProxBlock,
    pub phi: Vec<QuadraticBlock>,
    pub c: DVector<f64>,
}

impl BlockProblem {
    pub fn new(
        f: ProxBlock,
        theta: Vec<QuadraticBlock>,
        g: ProxBlock,
        phi: Vec<QuadraticBlock>,
        c: DVector<f64>,
    ) -> Result<Self> {
        let m = c.len();
        check_dim(&format!("block {} map domain", f.name), m, f.map.dom_dim())?;
        check_dim(&format!("block {} map domain", g.name), m, g.map.dom_dim())?;
        for b in theta.iter().chain(&phi) {
            check_dim(&format!("block {} map domain", b.name), m, b.map.dom_dim())?;
        }
        Ok(Self { f, theta, g, phi, c })
    }

    /// Dimension of the constraint space `X`.
    pub fn constraint_dim(&self) -> usize {
        self.c.len()
    }

    pub fn p(&self) -> usize {
        self.theta.len()
    }

    pub fn q(&self) -> usize {
        self.phi.len()
    }

    /// Block names in storage order `f, θ_1..θ_p, g, φ_1..φ_q`.
    pub fn block_names(&self) -> Vec<String> {
        let mut out = vec![self.f.name.clone()];
        out.extend(self.theta.iter().map(|b| b.name.clone()));
        out.push(self.g.name.clone());
        out.extend(self.phi.iter().map(|b| b.name.clone()));
        out
    }

    /// Total number of primal coordinates.
    pub fn total_dim(&self) -> usize {
        self.f.dim()
            + self.g.dim()
            + self.theta.iter().map(|b| b.dim()).sum::<usize>()
            + self.phi.iter().map(|b| b.dim()).sum::<usize>()
    }
}

/// Primal–dual iterate `(u, y, v, z; x)` plus the auxiliary backward-sweep
/// values `ȳ`, `z̄` of the last iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub u: DVector<f64>,
    pub y: Vec<DVector<f64>>,
    pub v: DVector<f64>,
    pub z: Vec<DVector<f64>>,
    pub x: DVector<f64>,
    pub y_bar: Vec<DVector<f64>>,
    pub z_bar: Vec<DVector<f64>>,
    pub iter: usize,
}

impl IterateState {
    /// All zeros.
    pub fn zeros(problem: &BlockProblem) -> Self {
        let y: Vec<_> = problem.theta.iter().map(|b| DVector::zeros(b.dim())).collect();
        let z: Vec<_> = problem.phi.iter().map(|b| DVector::zeros(b.dim())).collect();
        Self {
            u: DVector::zeros(problem.f.dim()),
            v: DVector::zeros(problem.g.dim()),
            x: DVector::zeros(problem.constraint_dim()),
            y_bar: y.clone(),
            z_bar: z.clone(),
            y,
            z,
            iter: 0,
        }
    }

    /// Default start: `u⁰ = Prox_f(0)`, `v⁰ = Prox_g(0)`, everything else zero.
    pub fn initial(problem: &BlockProblem) -> Self {
        let mut s = Self::zeros(problem);
        s.u = problem.f.func.prox(&DVector::zeros(problem.f.dim()), 1.0);
        s.v = problem.g.func.prox(&DVector::zeros(problem.g.dim()), 1.0);
        s
    }

    pub fn is_finite(&self) -> bool {
        let fin = |v: &DVector<f64>| v.iter().all(|a| a.is_finite());
        fin(&self.u) && fin(&self.v) && fin(&self.x) && self.y.iter().all(fin) && self.z.iter().all(fin)
    }

    pub(crate) fn check_shape(&self, problem: &BlockProblem) -> Result<()> {
        check_dim("state u", problem.f.dim(), self.u.len())?;
        check_dim("state v", problem.g.dim(), self.v.len())?;
        check_dim("state x", problem.constraint_dim(), self.x.len())?;
        check_dim("state y blocks", problem.p(), self.y.len())?;
        check_dim("state z blocks", problem.q(), self.z.len())?;
        for (b, y) in problem.theta.iter().zip(&self.y) {
            check_dim(&format!("state block {}", b.name), b.dim(), y.len())?;
        }
        for (b, z) in problem.phi.iter().zip(&self.z) {
            check_dim(&format!("state block {}", b.name), b.dim(), z.len())?;
        }
        Ok(())
    }
}

/// `Γ = F*u + Σ A_i* y_i + G*v + Σ B_j* z_j − c`.
pub fn constraint_residual(problem: &BlockProblem, state: &IterateState) -> Result<DVector<f64>> {
    state.check_shape(problem)?;
    let mut r = problem.f.map.adjoint(&state.u) + problem.g.map.adjoint(&state.v) - &problem.c;
    for (b, y) in problem.theta.iter().zip(&state.y) {
        r += b.map.adjoint(y);
    }
    for (b, z) in problem.phi.iter().zip(&state.z) {
        r += b.map.adjoint(z);
    }
    Ok(r)
}

/// Primal objective and dual objective
/// `−⟨c, x⟩ − f*(−Fx) − Σ θ_i*(−A_i x) − g*(−Gx) − Σ φ_j*(−B_j x)`.
///
/// The dual value is that of the Lagrangian dual (a maximization), so the
/// two agree at a KKT point. Either may be `±∞`.
pub fn objective_values(problem: &BlockProblem, state: &IterateState) -> Result<(f64, f64)> {
    state.check_shape(problem)?;
    let mut primal = problem.f.func.value(&state.u) + problem.g.func.value(&state.v);
    for (b, y) in problem.theta.iter().zip(&state.y) {
        primal += b.value(y);
    }
    for (b, z) in problem.phi.iter().zip(&state.z) {
        primal += b.value(z);
    }
    let x = &state.x;
    let mut conj = problem.c.dot(x)
        + problem.f.func.conjugate(&-problem.f.map.apply(x))
        + problem.g.func.conjugate(&-problem.g.map.apply(x));
    for b in problem.theta.iter().chain(&problem.phi) {
        conj += b.conjugate(&-b.map.apply(x));
    }
    Ok((primal, -conj))
}

/// Inequality multipliers `y_I ≥ 0` entering as `−⟨b_I, y_I⟩` with
/// constraint term `A_I* y_I`.
#[derive(Clone, Debug)]
pub struct InequalityBlock {
    pub map: LinearMap,
    pub linear: DVector<f64>,
}

/// A block problem extended with a nonnegative inequality-multiplier block.
#[derive(Clone, Debug)]
pub struct InequalityProblem {
    pub base: BlockProblem,
    pub inequalities: Option<InequalityBlock>,
}

/// Moves the nonnegativity of `y_I` onto a new component of the nonsmooth
/// block: introduces `u' ≥ 0` with `D*u' − D*y_I = 0`, after which `y_I`
/// is a purely linear (quadratic) block. `d` defaults to the identity and
/// must be nonsingular.
pub fn reformulate_inequalities(
    problem: &InequalityProblem,
    d: Option<LinearMap>,
) -> Result<BlockProblem> {
    let Some(ineq) = &problem.inequalities else {
        return Ok(problem.base.clone());
    };
    let base = &problem.base;
    let m = base.constraint_dim();
    let mi = ineq.linear.len();
    check_dim("inequality map domain", m, ineq.map.dom_dim())?;
    check_dim("inequality map codomain", mi, ineq.map.cod_dim())?;
    let d = d.unwrap_or_else(|| crate::linops::identity_map(mi));
    check_dim("inequality transform domain", mi, d.dom_dim())?;
    check_dim("inequality transform codomain", mi, d.cod_dim())?;
    let dd = dense_map(d.as_ref());
    let lu = dd.clone().lu();
    let probe = DVector::from_fn(mi, |i, _| 1.0 + i as f64);
    let inverted = lu.solve(&probe);
    match inverted {
        Some(w) if (&dd * &w - &probe).norm() <= 1e-10 * probe.norm() => {}
        _ => return Err(Error::Singular("inequality transform D is singular".into())),
    }

    let col_dims = vec![m, mi];
    let extend = |map: &LinearMap| -> Result<LinearMap> {
        BlockMap::shared(vec![map.cod_dim()], col_dims.clone(), vec![vec![Some(map.clone()), None]])
    };

    let f_map = BlockMap::diagonal(vec![base.f.map.clone(), d.clone()])?;
    let f_func = ProxFriendlyFunction::Separable(vec![
        base.f.func.clone(),
        ProxFriendlyFunction::NonnegIndicator { dim: mi },
    ]);
    let d_norm = estimate_lambda_max(gram_op(&d).as_ref(), 0xd) * 1.001;
    let scale = match f_map.gram_scale() {
        Some(s) => s,
        None => base.f.scale.max(d_norm),
    };
    let f = ProxBlock::with_scale(&base.f.name, f_func, f_map, scale)?;

    let neg_d = crate::linops::FnMap::shared(
        mi,
        mi,
        {
            let d = d.clone();
            move |x| -d.apply(x)
        },
        {
            let d = d.clone();
            move |w| -d.adjoint(w)
        },
    );
    let ineq_map = BlockMap::shared(vec![mi], col_dims.clone(), vec![vec![Some(ineq.map.clone()), Some(neg_d)]])?;
    let mut theta = Vec::with_capacity(base.p() + 1);
    for b in &base.theta {
        theta.push(QuadraticBlock::new(&b.name, b.hessian.clone(), b.linear.clone(), extend(&b.map)?)?);
    }
    theta.push(QuadraticBlock::new(
        "y_I",
        crate::linops::zero_op(mi),
        ineq.linear.clone(),
        ineq_map,
    )?);
    let g = ProxBlock::with_scale(&base.g.name, base.g.func.clone(), extend(&base.g.map)?, base.g.scale)?;
    let mut phi = Vec::with_capacity(base.q());
    for b in &base.phi {
        phi.push(QuadraticBlock::new(&b.name, b.hessian.clone(), b.linear.clone(), extend(&b.map)?)?);
    }
    let mut c = DVector::zeros(m + mi);
    c.rows_mut(0, m).copy_from(&base.c);
    BlockProblem::new(f, theta, g, phi, c)
}
