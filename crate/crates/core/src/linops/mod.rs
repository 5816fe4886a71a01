//! Abstract linear maps between finite-dimensional real inner-product spaces.
//!
//! Every space is represented by `DVector<f64>` coordinates in an orthonormal
//! basis, so adjoints are plain transposes of the coordinate matrices. Symmetric
//! matrix spaces use the scaled vectorization in [`svec`].

mod majorizer;
pub mod svec;

pub use majorizer::{build_majorizer, Majorizer, MajorizerStrategy};

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};

/// A linear map `M: dom -> cod` together with its adjoint.
pub trait LinearOperator: Send + Sync {
    fn dom_dim(&self) -> usize;
    fn cod_dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
    fn adjoint(&self, w: &DVector<f64>) -> DVector<f64>;

    /// `Some(λ)` when `M M* = λ I` is known structurally.
    fn gram_scale(&self) -> Option<f64> {
        None
    }
}

/// Shared handle to a linear map.
pub type LinearMap = Arc<dyn LinearOperator>;

/// A self-adjoint positive semidefinite operator on one space.
pub trait SymmetricOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;

    /// True when the operator is identically zero (lets callers skip work).
    fn is_zero(&self) -> bool {
        false
    }
}

/// Shared handle to a self-adjoint PSD operator.
pub type PsdOp = Arc<dyn SymmetricOperator>;

impl fmt::Debug for dyn LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap({} -> {})", self.dom_dim(), self.cod_dim())
    }
}

impl fmt::Debug for dyn SymmetricOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PsdOp({})", self.dim())
    }
}

/// Dense matrix map; `apply` is `m * x`.
pub struct MatrixMap {
    m: DMatrix<f64>,
}

impl MatrixMap {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self { m }
    }

    pub fn shared(m: DMatrix<f64>) -> LinearMap {
        Arc::new(Self::new(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

impl LinearOperator for MatrixMap {
    fn dom_dim(&self) -> usize {
        self.m.ncols()
    }
    fn cod_dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m * x
    }
    fn adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        self.m.tr_mul(w)
    }
}

/// `x ↦ s·x` on a space of dimension `dim`.
pub struct ScaledIdentityMap {
    dim: usize,
    scale: f64,
}

impl ScaledIdentityMap {
    pub fn shared(dim: usize, scale: f64) -> LinearMap {
        Arc::new(Self { dim, scale })
    }
}

pub fn identity_map(dim: usize) -> LinearMap {
    ScaledIdentityMap::shared(dim, 1.0)
}

impl LinearOperator for ScaledIdentityMap {
    fn dom_dim(&self) -> usize {
        self.dim
    }
    fn cod_dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        x * self.scale
    }
    fn adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        w * self.scale
    }
    fn gram_scale(&self) -> Option<f64> {
        Some(self.scale * self.scale)
    }
}

/// The zero map between two spaces.
pub struct ZeroMap {
    dom: usize,
    cod: usize,
}

impl ZeroMap {
    pub fn shared(dom: usize, cod: usize) -> LinearMap {
        Arc::new(Self { dom, cod })
    }
}

impl LinearOperator for ZeroMap {
    fn dom_dim(&self) -> usize {
        self.dom
    }
    fn cod_dim(&self) -> usize {
        self.cod
    }
    fn apply(&self, _x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(self.cod)
    }
    fn adjoint(&self, _w: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(self.dom)
    }
}

type VecFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Map defined by a pair of closures (forward and adjoint).
pub struct FnMap {
    dom: usize,
    cod: usize,
    forward: VecFn,
    backward: VecFn,
    gram: Option<f64>,
}

impl FnMap {
    pub fn shared<A, B>(dom: usize, cod: usize, forward: A, backward: B) -> LinearMap
    where
        A: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        B: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Arc::new(Self {
            dom,
            cod,
            forward: Arc::new(forward),
            backward: Arc::new(backward),
            gram: None,
        })
    }

    /// Same as [`FnMap::shared`] but records a known `M M* = λ I`.
    pub fn shared_with_gram<A, B>(
        dom: usize,
        cod: usize,
        gram: f64,
        forward: A,
        backward: B,
    ) -> LinearMap
    where
        A: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        B: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Arc::new(Self {
            dom,
            cod,
            forward: Arc::new(forward),
            backward: Arc::new(backward),
            gram: Some(gram),
        })
    }
}

impl LinearOperator for FnMap {
    fn dom_dim(&self) -> usize {
        self.dom
    }
    fn cod_dim(&self) -> usize {
        self.cod
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.forward)(x)
    }
    fn adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        (self.backward)(w)
    }
    fn gram_scale(&self) -> Option<f64> {
        self.gram
    }
}

/// Block-structured map between product spaces: row `r` of the output is
/// `Σ_c M[r][c] x_c`; missing blocks are zero.
pub struct BlockMap {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    blocks: Vec<Vec<Option<LinearMap>>>,
}

impl BlockMap {
    pub fn new(
        row_dims: Vec<usize>,
        col_dims: Vec<usize>,
        blocks: Vec<Vec<Option<LinearMap>>>,
    ) -> Result<Self> {
        check_dim("block map rows", row_dims.len(), blocks.len())?;
        for (r, row) in blocks.iter().enumerate() {
            check_dim("block map columns", col_dims.len(), row.len())?;
            for (c, b) in row.iter().enumerate() {
                if let Some(m) = b {
                    check_dim("block map domain", col_dims[c], m.dom_dim())?;
                    check_dim("block map codomain", row_dims[r], m.cod_dim())?;
                }
            }
        }
        Ok(Self {
            row_dims,
            col_dims,
            blocks,
        })
    }

    pub fn shared(
        row_dims: Vec<usize>,
        col_dims: Vec<usize>,
        blocks: Vec<Vec<Option<LinearMap>>>,
    ) -> Result<LinearMap> {
        Ok(Arc::new(Self::new(row_dims, col_dims, blocks)?))
    }

    /// Block-diagonal map `(x_1, .., x_k) ↦ (M_1 x_1, .., M_k x_k)`.
    pub fn diagonal(maps: Vec<LinearMap>) -> Result<LinearMap> {
        let k = maps.len();
        let row_dims = maps.iter().map(|m| m.cod_dim()).collect();
        let col_dims = maps.iter().map(|m| m.dom_dim()).collect();
        let blocks = maps
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                let mut row: Vec<Option<LinearMap>> = vec![None; k];
                row[i] = Some(m);
                row
            })
            .collect();
        Self::shared(row_dims, col_dims, blocks)
    }
}

fn split(x: &DVector<f64>, dims: &[usize]) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(dims.len());
    let mut off = 0;
    for &d in dims {
        out.push(x.rows(off, d).into_owned());
        off += d;
    }
    out
}

fn concat(parts: &[DVector<f64>]) -> DVector<f64> {
    let n = parts.iter().map(|p| p.len()).sum();
    let mut out = DVector::zeros(n);
    let mut off = 0;
    for p in parts {
        out.rows_mut(off, p.len()).copy_from(p);
        off += p.len();
    }
    out
}

/// Splits a product-space vector into its components.
pub fn split_vector(x: &DVector<f64>, dims: &[usize]) -> Vec<DVector<f64>> {
    split(x, dims)
}

/// Concatenates component vectors into a product-space vector.
pub fn concat_vectors(parts: &[DVector<f64>]) -> DVector<f64> {
    concat(parts)
}

impl LinearOperator for BlockMap {
    fn dom_dim(&self) -> usize {
        self.col_dims.iter().sum()
    }
    fn cod_dim(&self) -> usize {
        self.row_dims.iter().sum()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let xs = split(x, &self.col_dims);
        let rows: Vec<DVector<f64>> = self
            .blocks
            .iter()
            .zip(&self.row_dims)
            .map(|(row, &d)| {
                let mut acc = DVector::zeros(d);
                for (b, xc) in row.iter().zip(&xs) {
                    if let Some(m) = b {
                        acc += m.apply(xc);
                    }
                }
                acc
            })
            .collect();
        concat(&rows)
    }
    fn adjoint(&self, w: &DVector<f64>) -> DVector<f64> {
        let ws = split(w, &self.row_dims);
        let cols: Vec<DVector<f64>> = (0..self.col_dims.len())
            .map(|c| {
                let mut acc = DVector::zeros(self.col_dims[c]);
                for (row, wr) in self.blocks.iter().zip(&ws) {
                    if let Some(m) = &row[c] {
                        acc += m.adjoint(wr);
                    }
                }
                acc
            })
            .collect();
        concat(&cols)
    }
    fn gram_scale(&self) -> Option<f64> {
        // Known only for block-diagonal layouts whose blocks share one scale.
        let mut scale = None;
        for (r, row) in self.blocks.iter().enumerate() {
            for (c, b) in row.iter().enumerate() {
                match b {
                    Some(m) if r == c => {
                        let s = m.gram_scale()?;
                        match scale {
                            None => scale = Some(s),
                            Some(t) if (t - s).abs() <= 1e-15 * t.abs().max(1.0) => {}
                            _ => return None,
                        }
                    }
                    Some(_) => return None,
                    None if r == c && self.row_dims[r] > 0 => return None,
                    None => {}
                }
            }
        }
        scale
    }
}

/// Stacks maps sharing one domain: `x ↦ (M_1 x, .., M_k x)`, adjoint
/// `(w_1, .., w_k) ↦ Σ M_i* w_i`.
pub fn stack_maps(maps: &[LinearMap]) -> Result<LinearMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot stack an empty list of maps".into()))?;
    let dom = first.dom_dim();
    for m in maps {
        check_dim("stacked map domain", dom, m.dom_dim())?;
    }
    let row_dims = maps.iter().map(|m| m.cod_dim()).collect();
    let blocks = maps.iter().map(|m| vec![Some(m.clone())]).collect();
    BlockMap::shared(row_dims, vec![dom], blocks)
}

/// Dense symmetric operator.
pub struct DenseSymOp {
    m: DMatrix<f64>,
}

impl DenseSymOp {
    pub fn shared(m: DMatrix<f64>) -> PsdOp {
        Arc::new(Self { m })
    }
}

impl SymmetricOperator for DenseSymOp {
    fn dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m * x
    }
}

/// Diagonal operator `x ↦ d ∘ x`.
pub struct DiagonalOp {
    d: DVector<f64>,
}

impl DiagonalOp {
    pub fn shared(d: DVector<f64>) -> PsdOp {
        Arc::new(Self { d })
    }
}

impl SymmetricOperator for DiagonalOp {
    fn dim(&self) -> usize {
        self.d.len()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.d.component_mul(x)
    }
    fn is_zero(&self) -> bool {
        self.d.iter().all(|&v| v == 0.0)
    }
}

/// `x ↦ s·x`; `s = 0` gives the zero operator.
pub struct ScaledIdentityOp {
    dim: usize,
    scale: f64,
}

impl ScaledIdentityOp {
    pub fn shared(dim: usize, scale: f64) -> PsdOp {
        Arc::new(Self { dim, scale })
    }
}

pub fn zero_op(dim: usize) -> PsdOp {
    ScaledIdentityOp::shared(dim, 0.0)
}

impl SymmetricOperator for ScaledIdentityOp {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        x * self.scale
    }
    fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

/// Symmetric operator defined by a closure.
pub struct FnSymOp {
    dim: usize,
    f: VecFn,
}

impl FnSymOp {
    pub fn shared<A>(dim: usize, f: A) -> PsdOp
    where
        A: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Arc::new(Self { dim, f: Arc::new(f) })
    }
}

impl SymmetricOperator for FnSymOp {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
}

/// Block-diagonal symmetric operator over a product space.
pub fn block_diag_op(ops: Vec<PsdOp>) -> PsdOp {
    let dims: Vec<usize> = ops.iter().map(|o| o.dim()).collect();
    let total = dims.iter().sum();
    FnSymOp::shared(total, move |x| {
        let parts = split(x, &dims);
        let out: Vec<DVector<f64>> = ops.iter().zip(&parts).map(|(o, p)| o.apply(p)).collect();
        concat(&out)
    })
}

/// Coordinate matrix of a linear map (columns are images of unit vectors).
pub fn dense_map(m: &dyn LinearOperator) -> DMatrix<f64> {
    let (n, k) = (m.dom_dim(), m.cod_dim());
    let mut out = DMatrix::zeros(k, n);
    let mut e = DVector::zeros(n);
    for j in 0..n {
        e[j] = 1.0;
        out.set_column(j, &m.apply(&e));
        e[j] = 0.0;
    }
    out
}

/// Coordinate matrix of a symmetric operator, symmetrized to remove rounding.
pub fn dense_op(op: &dyn SymmetricOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut e = DVector::zeros(n);
    for j in 0..n {
        e[j] = 1.0;
        out.set_column(j, &op.apply(&e));
        e[j] = 0.0;
    }
    (&out + out.transpose()) * 0.5
}

/// Deterministic Gaussian vector stream used for probes and power iteration.
pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Verifies `⟨M x, w⟩ = ⟨x, M* w⟩` on random probes to relative tolerance 1e-10.
pub fn check_adjoint(m: &dyn LinearOperator, trials: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x = gaussian_vector(&mut rng, m.dom_dim());
        let w = gaussian_vector(&mut rng, m.cod_dim());
        let mx = m.apply(&x);
        let mw = m.adjoint(&w);
        check_dim("adjoint check forward image", m.cod_dim(), mx.len())?;
        check_dim("adjoint check adjoint image", m.dom_dim(), mw.len())?;
        let lhs = mx.dot(&w);
        let rhs = x.dot(&mw);
        let scale = mx.norm() * w.norm() + x.norm() * mw.norm();
        if (lhs - rhs).abs() > 1e-10 * scale.max(1e-300) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Power-iteration estimate of the largest eigenvalue of a PSD operator.
///
/// Uses a deterministic start, at most 200 iterations and relative tolerance
/// 1e-8 on the Rayleigh quotient.
pub fn estimate_lambda_max(op: &dyn SymmetricOperator, seed: u64) -> f64 {
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = gaussian_vector(&mut rng, n);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..200 {
        let w = op.apply(&v);
        let rq = v.dot(&w);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / nw;
        let converged = (rq - lambda).abs() <= 1e-8 * rq.abs().max(1e-300);
        lambda = rq;
        if converged {
            break;
        }
    }
    // The final normalized image also bounds λ_max from below; keep the larger.
    lambda.max(v.dot(&op.apply(&v)))
}

/// The operator `M M*` on the codomain of `m`.
pub fn gram_op(m: &LinearMap) -> PsdOp {
    let m = m.clone();
    FnSymOp::shared(m.cod_dim(), move |w| m.apply(&m.adjoint(w)))
}

/// Conjugate gradients for SPD `op`. Returns the solution and whether the
/// relative residual reached `tol`.
pub fn conjugate_gradient(
    op: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    rhs: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> (DVector<f64>, bool) {
    let n = rhs.len();
    let mut x = DVector::zeros(n);
    let bnorm = rhs.norm();
    if bnorm == 0.0 {
        return (x, true);
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * bnorm {
            return (x, true);
        }
        let ap = op(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            return (x, false);
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    (x, rr.sqrt() <= tol * bnorm)
}

/// Smallest eigenvalue of a dense symmetric matrix (`+∞` for empty input).
pub fn lambda_min(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// Positive definiteness test `λ_min > tol` on a dense symmetric matrix.
pub fn is_positive_definite(m: &DMatrix<f64>, tol: f64) -> bool {
    lambda_min(m) > tol
}

/// Dense form of the operator in the 2-block positive-definiteness equivalence:
///
/// `W = [F F* + σ⁻¹Σ_f + T̂_f, F G*; G F*, G G* + σ⁻¹Σ_g + T_g]` with
/// `T̂_f = T_f + F G* E_g⁻¹ G F*`, together with the reduced operator
/// `F F* + σ⁻¹Σ_f + T_f`. Matrices `f` and `g` are the coordinate matrices of
/// `F: X → U` and `G: X → V`.
pub struct TwoBlockPdForms {
    pub full: DMatrix<f64>,
    pub reduced: DMatrix<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn two_block_pd_forms(
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    sigma: f64,
    sigma_f: &DMatrix<f64>,
    sigma_g: &DMatrix<f64>,
    t_f: &DMatrix<f64>,
    t_g: &DMatrix<f64>,
    e_g: &DMatrix<f64>,
) -> Result<TwoBlockPdForms> {
    check_dim("F/G constraint space", f.ncols(), g.ncols())?;
    let (nu, nv) = (f.nrows(), g.nrows());
    let e_inv = e_g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("E_g is not positive definite".into()))?
        .inverse();
    let fg = f * g.transpose();
    let t_hat = t_f + &fg * &e_inv * fg.transpose();
    let reduced = f * f.transpose() + sigma_f / sigma + t_f;
    let mut full = DMatrix::zeros(nu + nv, nu + nv);
    full.view_mut((0, 0), (nu, nu))
        .copy_from(&(f * f.transpose() + sigma_f / sigma + t_hat));
    full.view_mut((0, nu), (nu, nv)).copy_from(&fg);
    full.view_mut((nu, 0), (nv, nu)).copy_from(&fg.transpose());
    full.view_mut((nu, nu), (nv, nv))
        .copy_from(&(g * g.transpose() + sigma_g / sigma + t_g));
    Ok(TwoBlockPdForms { full, reduced })
}
