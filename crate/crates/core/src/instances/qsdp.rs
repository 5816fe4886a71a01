//! Convex quadratic SDPs
//!
//! ```text
//! min ½⟨X, QX⟩ + ⟨C, X⟩  s.t.  A_E X = b_E,  X ⪰ 0,  X ∈ K
//! ```
//!
//! solved through their dual in block form: `Z` (support of `K`), `Ξ`
//! (quadratic, coupled through the factor `B` of `Q = B*B`), `S` (PSD cone)
//! and `y_E` (linear). The constraint-space multiplier is the primal `X`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{eta_qsdp, relative_gap, QsdpPoint, QsdpResidualData, ResidualMeasure, ResidualReport};
use crate::error::{check_dim, Error, Result};
use crate::linops::svec::{smat, svec, svec_len, symmetrize};
use crate::linops::{identity_map, zero_op, DiagonalOp, LinearMap, Majorizer, MatrixMap, ScaledIdentityOp};
use crate::model::{BlockProblem, IterateState, ProxBlock, QuadraticBlock};
use crate::prox::{BoxSet, ProxFriendlyFunction, QuadraticOperator};

/// A quadratic SDP with its data in matrix form. `a_e` holds one row
/// `svec(A_i)ᵀ` per equality constraint.
#[derive(Clone, Debug)]
pub struct QsdpInstance {
    pub name: String,
    pub n: usize,
    pub q: QuadraticOperator,
    pub c: DMatrix<f64>,
    pub a_e: DMatrix<f64>,
    pub b_e: DVector<f64>,
    pub k: BoxSet,
    /// Constant added to both objectives.
    pub constant: f64,
    /// A point with `A_E X = b_E`, `X ⪰ 0`, `X ∈ K` when known.
    pub x_feas: Option<DMatrix<f64>>,
    pub seed: Option<u64>,
}

impl QsdpInstance {
    pub fn new(
        name: &str,
        q: QuadraticOperator,
        c: DMatrix<f64>,
        a_e: DMatrix<f64>,
        b_e: DVector<f64>,
        k: BoxSet,
    ) -> Result<Self> {
        let n = q.order();
        check_dim("cost matrix order", n, c.nrows())?;
        check_dim("cost matrix columns", n, c.ncols())?;
        check_dim("constraint row length", svec_len(n), a_e.ncols())?;
        check_dim("right-hand side", a_e.nrows(), b_e.len())?;
        check_dim("box order", n, k.order())?;
        if (&c - c.transpose()).norm() > 1e-12 * (1.0 + c.norm()) {
            return Err(Error::InvalidInput("cost matrix must be symmetric".into()));
        }
        Ok(Self {
            name: name.to_string(),
            n,
            q,
            c,
            a_e,
            b_e,
            k,
            constant: 0.0,
            x_feas: None,
            seed: None,
        })
    }

    pub fn m_e(&self) -> usize {
        self.a_e.nrows()
    }

    /// Whether the dual carries a `Ξ` block (`Q ≢ 0`).
    pub fn has_quadratic(&self) -> bool {
        !self.q.is_zero()
    }

    pub fn a_e_apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        &self.a_e * svec(x)
    }

    pub fn a_e_adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        smat(&(self.a_e.transpose() * y))
    }

    /// `½⟨X, QX⟩ + ⟨C, X⟩ + constant`.
    pub fn primal_objective(&self, x: &DMatrix<f64>) -> f64 {
        0.5 * x.dot(&self.q.apply(x)) + self.c.dot(x) + self.constant
    }

    /// The dual in block form.
    pub fn block_problem(&self) -> Result<BlockProblem> {
        let len = svec_len(self.n);
        let f = ProxBlock::new("Z", ProxFriendlyFunction::BoxSupport(self.k.clone()), identity_map(len))?;
        let g = ProxBlock::new("S", ProxFriendlyFunction::PsdIndicator { n: self.n }, identity_map(len))?;
        let mut theta = Vec::new();
        if self.has_quadratic() {
            let map = self
                .q
                .factor_map()
                .ok_or_else(|| Error::Configuration("quadratic term needs a closed-form factor".into()))?;
            let gram = self.q.factor_gram_diagonal().expect("factor exists");
            theta.push(shadow_block(map, gram)?);
        }
        let mut phi = Vec::new();
        if self.m_e() > 0 {
            phi.push(QuadraticBlock::new(
                "y_E",
                zero_op(self.m_e()),
                self.b_e.clone(),
                MatrixMap::shared(self.a_e.clone()),
            )?);
        }
        BlockProblem::new(f, theta, g, phi, svec(&self.c))
    }

    /// Splits a block iterate into matrix form. `Υ = −B*Ξ`.
    pub fn point(&self, problem: &BlockProblem, state: &IterateState) -> QsdpPoint {
        let upsilon = match (problem.theta.first(), state.y.first()) {
            (Some(b), Some(xi)) => -smat(&b.map.adjoint(xi)),
            _ => DMatrix::zeros(self.n, self.n),
        };
        QsdpPoint {
            x: smat(&state.x),
            z: smat(&state.u),
            upsilon,
            s: smat(&state.v),
            y_e: state.z.first().cloned().unwrap_or_else(|| DVector::zeros(0)),
        }
    }

    /// `−δ*_K(−Z) − ½‖Ξ‖² + ⟨b_E, y_E⟩ + constant`.
    pub fn dual_objective(&self, problem: &BlockProblem, state: &IterateState) -> f64 {
        let mut d = -problem.f.func.value(&state.u) + self.constant;
        if let Some(xi) = state.y.first() {
            d -= 0.5 * xi.norm_squared();
        }
        if let Some(y) = state.z.first() {
            d += self.b_e.dot(y);
        }
        d
    }
}

/// The `Ξ` block: `½‖Ξ‖²` coupled through `B`, with the closed-form
/// majorizer `E = σ⁻¹I + B B*`, diagonal in `svec` coordinates.
fn shadow_block(map: LinearMap, gram: DVector<f64>) -> Result<QuadraticBlock> {
    let len = gram.len();
    let factory_map = map.clone();
    let block = QuadraticBlock::new("Xi", ScaledIdentityOp::shared(len, 1.0), DVector::zeros(len), map)?;
    let hessian = block.hessian.clone();
    Ok(block.with_structured_majorizer(Arc::new(move |sigma| {
        let diag = gram.map(|h| 1.0 / sigma + h);
        let inv = diag.map(|d| 1.0 / d);
        Majorizer::structured(
            sigma,
            hessian.clone(),
            factory_map.clone(),
            DiagonalOp::shared(diag),
            move |r| r.component_mul(&inv),
            "diagonal",
        )
    })))
}

impl ResidualMeasure for QsdpInstance {
    fn report(&self, problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport> {
        let pt = self.point(problem, state);
        let a_e = |x: &DMatrix<f64>| self.a_e_apply(x);
        let a_e_adj = |y: &DVector<f64>| self.a_e_adjoint(y);
        let data = QsdpResidualData {
            a_e: &a_e,
            a_e_adjoint: &a_e_adj,
            b_e: &self.b_e,
            c: &self.c,
            k: &self.k,
        };
        let mut r = eta_qsdp(&data, &pt);
        r.iter = state.iter;
        r.obj_p = self.primal_objective(&pt.x);
        r.obj_d = self.dual_objective(problem, state);
        r.eta_gap = relative_gap(r.obj_p, r.obj_d);
        Ok(r)
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, n, n).qr().q()
}

/// Random PSD `B = P diag(λ) Pᵀ` of the given rank, eigenvalues in `[0.5, 2]`.
pub fn random_lyapunov(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Result<QuadraticOperator> {
    if rank > n {
        return Err(Error::InvalidInput(format!("rank {rank} exceeds order {n}")));
    }
    let p = random_orthogonal(rng, n);
    let vals = DVector::from_fn(n, |i, _| if i < rank { rng.gen_range(0.5..2.0) } else { 0.0 });
    Ok(QuadraticOperator::from_eigen(p, vals))
}

/// Random instance with `m_E` equality constraints and `rank(B) = rank_b`.
///
/// `K = {X ≥ −0.5}`. The first constraint fixes the normalized trace (which
/// keeps the feasible set bounded); the others are random symmetric
/// matrices of unit Frobenius norm. `b_E = A_E(X_feas)` for
/// `X_feas = I + WWᵀ/(2n)`, which is positive definite and inside `K`.
pub fn build_random_qsdp(n: usize, m_e: usize, rank_b: usize, seed: u64) -> Result<QsdpInstance> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix order must be positive".into()));
    }
    if m_e == 0 {
        return Err(Error::InvalidInput("at least one equality constraint is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_lyapunov(&mut rng, n, rank_b)?;
    let k = BoxSet::uniform(n, -0.5, f64::INFINITY)?;
    let x_feas = loop {
        let w = gaussian_matrix(&mut rng, n, n);
        let x = DMatrix::identity(n, n) + &w * w.transpose() / (2.0 * n as f64);
        if x.min() > -0.5 {
            break symmetrize(&x);
        }
    };
    let len = svec_len(n);
    let mut a_e = DMatrix::zeros(m_e, len);
    a_e.set_row(0, &(svec(&DMatrix::identity(n, n)) / (n as f64).sqrt()).transpose());
    for i in 1..m_e {
        let s = symmetrize(&gaussian_matrix(&mut rng, n, n));
        a_e.set_row(i, &(svec(&s) / s.norm()).transpose());
    }
    let b_e = &a_e * svec(&x_feas);
    let c = symmetrize(&gaussian_matrix(&mut rng, n, n)) / (n as f64).sqrt();
    let mut inst = QsdpInstance::new(&format!("qsdp-n{n}-m{m_e}-r{rank_b}-s{seed}"), q, c, a_e, b_e, k)?;
    inst.x_feas = Some(x_feas);
    inst.seed = Some(seed);
    Ok(inst)
}

/// `min ½ b x² + c x  s.t.  x ≥ 0` as a 1 × 1 quadratic SDP with `K = ℝ`
/// and no equality constraints.
pub fn scalar_qsdp(b: f64, c: f64) -> Result<QsdpInstance> {
    if !(b.is_finite() && b >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("invalid scalar data b = {b}, c = {c}")));
    }
    let q = QuadraticOperator::lyapunov(&DMatrix::from_element(1, 1, b))?;
    QsdpInstance::new(
        "qsdp-scalar",
        q,
        DMatrix::from_element(1, 1, c),
        DMatrix::zeros(0, 1),
        DVector::zeros(0),
        BoxSet::whole(1),
    )
}

/// Binary-quadratic relaxation of order `n₀ + 1`:
/// `min ½⟨X, QX⟩ + ½⟨Q₀, X₀⟩ + ⟨c, x⟩` over `X = [X₀ x; xᵀ α] ⪰ 0`,
/// `X ≥ 0`, with `diag(X₀) − x = 0` and `α = 1`. `Q` has a random factor
/// of rank `rank_b` as in [`build_random_qsdp`].
pub fn build_biq(q_data: &DMatrix<f64>, c_data: &DVector<f64>, rank_b: usize, seed: u64) -> Result<QsdpInstance> {
    let n0 = q_data.nrows();
    if n0 == 0 || q_data.ncols() != n0 {
        return Err(Error::InvalidInput("BIQ data must be a nonempty square matrix".into()));
    }
    if (q_data - q_data.transpose()).norm() > 1e-12 * (1.0 + q_data.norm()) {
        return Err(Error::InvalidInput("BIQ data matrix must be symmetric".into()));
    }
    check_dim("BIQ cost vector", n0, c_data.len())?;
    let n = n0 + 1;
    let mut c = DMatrix::zeros(n, n);
    c.view_mut((0, 0), (n0, n0)).copy_from(&(q_data * 0.5));
    for i in 0..n0 {
        c[(i, n0)] = 0.5 * c_data[i];
        c[(n0, i)] = 0.5 * c_data[i];
    }
    let len = svec_len(n);
    let mut a_e = DMatrix::zeros(n, len);
    for i in 0..n0 {
        let mut a = DMatrix::zeros(n, n);
        a[(i, i)] = 1.0;
        a[(i, n0)] = -0.5;
        a[(n0, i)] = -0.5;
        a_e.set_row(i, &svec(&a).transpose());
    }
    let mut corner = DMatrix::zeros(n, n);
    corner[(n0, n0)] = 1.0;
    a_e.set_row(n0, &svec(&corner).transpose());
    let mut b_e = DVector::zeros(n);
    b_e[n0] = 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_lyapunov(&mut rng, n, rank_b)?;
    let k = BoxSet::uniform(n, 0.0, f64::INFINITY)?;
    // [0.25 I + 0.25 11ᵀ, ½1; ½1ᵀ, 1] is positive definite with positive entries.
    let mut x_feas = DMatrix::from_element(n, n, 0.25);
    for i in 0..n0 {
        x_feas[(i, i)] = 0.5;
        x_feas[(i, n0)] = 0.5;
        x_feas[(n0, i)] = 0.5;
    }
    x_feas[(n0, n0)] = 1.0;
    let mut inst = QsdpInstance::new(&format!("biq-n{n0}-r{rank_b}-s{seed}"), q, c, a_e, b_e, k)?;
    inst.x_feas = Some(x_feas);
    inst.seed = Some(seed);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instance_is_feasible_by_construction() {
        let inst = build_random_qsdp(8, 5, 3, 11).unwrap();
        let x = inst.x_feas.clone().unwrap();
        assert!((inst.a_e_apply(&x) - &inst.b_e).norm() < 1e-12);
        assert!(x.clone().symmetric_eigenvalues().min() > 0.0);
        assert!(inst.k.contains(&x, 0.0));
        let p = inst.block_problem().unwrap();
        assert_eq!(p.block_names(), vec!["Z", "Xi", "S", "y_E"]);
    }

    #[test]
    fn rank_zero_drops_quadratic_block() {
        let inst = build_random_qsdp(4, 2, 0, 1).unwrap();
        assert_eq!(inst.block_problem().unwrap().p(), 0);
    }

    #[test]
    fn rank_out_of_range_rejected() {
        assert!(build_random_qsdp(3, 1, 4, 0).is_err());
    }

    #[test]
    fn biq_feasible_point() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]);
        let inst = build_biq(&q, &DVector::from_vec(vec![0.5, -1.0]), 1, 3).unwrap();
        assert_eq!(inst.m_e(), 3);
        let x = inst.x_feas.clone().unwrap();
        assert!((inst.a_e_apply(&x) - &inst.b_e).norm() < 1e-12);
        assert!(x.clone().symmetric_eigenvalues().min() > 0.0);
    }
}
