//! Closed-form proximal maps and projections used by the block updates.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linops::svec::{smat, svec, svec_len, svec_weights};
use crate::linops::{conjugate_gradient, FnMap, LinearMap, Majorizer, PsdOp};

/// Relative tolerance used when an indicator (or indicator-valued conjugate)
/// is evaluated at a point that is feasible only up to solver accuracy.
pub const FEASIBILITY_TOL: f64 = 1e-5;

fn check_square_symmetric(x: &DMatrix<f64>, what: &str) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::InvalidInput(format!("{what}: matrix is not square")));
    }
    let asym = (x - x.transpose()).norm();
    if asym > 1e-12 * (1.0 + x.norm()) {
        return Err(Error::InvalidInput(format!(
            "{what}: matrix is not symmetric (‖X − Xᵀ‖ = {asym:.3e})"
        )));
    }
    Ok(())
}

fn eigh(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let e = nalgebra::SymmetricEigen::new((x + x.transpose()) * 0.5);
    (e.eigenvalues, e.eigenvectors)
}

fn reassemble(vals: &DVector<f64>, vecs: &DMatrix<f64>) -> DMatrix<f64> {
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * vals[j]);
    let m = scaled * vecs.transpose();
    (&m + m.transpose()) * 0.5
}

/// Projection onto the PSD cone.
pub fn proj_psd(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square_symmetric(x, "proj_psd")?;
    let (vals, vecs) = eigh(x);
    if vals.iter().all(|&v| v >= 0.0) {
        return Ok((x + x.transpose()) * 0.5);
    }
    Ok(reassemble(&vals.map(|v| v.max(0.0)), &vecs))
}

/// An entrywise box `{W : L ≤ W ≤ U}` in the space of symmetric matrices.
/// Bounds may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet {
    lower: DMatrix<f64>,
    upper: DMatrix<f64>,
    lo: DVector<f64>,
    hi: DVector<f64>,
}

impl BoxSet {
    pub fn new(lower: DMatrix<f64>, upper: DMatrix<f64>) -> Result<Self> {
        check_square_symmetric(&lower.map(|v| if v.is_finite() { v } else { 0.0 }), "box lower bound")?;
        check_square_symmetric(&upper.map(|v| if v.is_finite() { v } else { 0.0 }), "box upper bound")?;
        if lower.shape() != upper.shape() {
            return Err(Error::InvalidInput("box bounds differ in shape".into()));
        }
        for (l, u) in lower.iter().zip(upper.iter()) {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("empty box: lower {l} > upper {u}")));
            }
        }
        let scale = |m: &DMatrix<f64>| {
            let n = m.nrows();
            let mut out = DVector::zeros(svec_len(n));
            let mut k = 0;
            for j in 0..n {
                for i in 0..=j {
                    out[k] = if i == j { m[(i, j)] } else { m[(i, j)] * SQRT_2 };
                    k += 1;
                }
            }
            out
        };
        let (lo, hi) = (scale(&lower), scale(&upper));
        Ok(Self {
            lower,
            upper,
            lo,
            hi,
        })
    }

    /// Same scalar bounds for every entry of an `n × n` matrix.
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(
            DMatrix::from_element(n, n, lower),
            DMatrix::from_element(n, n, upper),
        )
    }

    /// The whole space.
    pub fn whole(n: usize) -> Self {
        Self::uniform(n, f64::NEG_INFINITY, f64::INFINITY).expect("unbounded box is valid")
    }

    pub fn order(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DMatrix<f64> {
        &self.upper
    }

    /// Bounds in [`svec`] coordinates.
    pub fn svec_bounds(&self) -> (&DVector<f64>, &DVector<f64>) {
        (&self.lo, &self.hi)
    }

    pub fn contains(&self, w: &DMatrix<f64>, tol: f64) -> bool {
        w.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }
}

fn clamp_vec(v: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(v.len(), |k, _| v[k].max(lo[k]).min(hi[k]))
}

/// Projection onto a box.
pub fn proj_box(x: &DMatrix<f64>, k: &BoxSet) -> Result<DMatrix<f64>> {
    if x.shape() != k.lower.shape() {
        return Err(Error::DimensionMismatch {
            context: "proj_box".into(),
            expected: k.order(),
            found: x.nrows(),
        });
    }
    Ok(x.zip_zip_map(&k.lower, &k.upper, |v, l, u| v.max(l).min(u)))
}

/// Proximal map of `h(Z) = δ*_K(−Z)` with prox parameter `1/λ`:
/// `Z⁺ = Z̄ + (1/λ) Π_K(−λ Z̄)`.
pub fn prox_support(z_bar: &DMatrix<f64>, lambda: f64, k: &BoxSet) -> Result<DMatrix<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput(format!("prox_support needs λ > 0, got {lambda}")));
    }
    let scaled = z_bar * lambda;
    let p = proj_box(&(-&scaled), k)?;
    // (λZ̄ + Π)/λ rather than Z̄ + Π/λ: entries where the projection is
    // inactive cancel to an exact zero.
    Ok((scaled + p) / lambda)
}

/// Euclidean projection of nonnegative `s` onto `{t ≥ 0 : Σ t ≤ r}`.
fn project_simplex_ball(s: &[f64], r: f64) -> Vec<f64> {
    let total: f64 = s.iter().sum();
    if total <= r {
        return s.to_vec();
    }
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - r) / (i + 1) as f64;
        if v > t {
            theta = t;
        }
    }
    s.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projection onto the nuclear-norm ball `{X : ‖X‖_* ≤ r}` (rectangular input).
pub fn proj_nuclear_ball(x: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidInput(format!("nuclear ball radius must be ≥ 0, got {r}")));
    }
    if x.is_empty() {
        return Ok(x.clone());
    }
    let svd = x.clone().svd(true, true);
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().sum::<f64>() <= r {
        return Ok(x.clone());
    }
    let shrunk = project_simplex_ball(&s, r);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let k = shrunk.len();
    let scaled = DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, j)] * shrunk[j]);
    Ok(scaled * vt.rows(0, k))
}

/// Nuclear-ball projection specialised to symmetric input (stays symmetric).
pub fn proj_nuclear_ball_sym(x: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    check_square_symmetric(x, "proj_nuclear_ball_sym")?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidInput(format!("nuclear ball radius must be ≥ 0, got {r}")));
    }
    let (vals, vecs) = eigh(x);
    let mags: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    if mags.iter().sum::<f64>() <= r {
        return Ok((x + x.transpose()) * 0.5);
    }
    let shrunk = project_simplex_ball(&mags, r);
    let new_vals = DVector::from_fn(vals.len(), |i, _| shrunk[i] * vals[i].signum());
    Ok(reassemble(&new_vals, &vecs))
}

/// Self-adjoint PSD quadratic `Q` on symmetric matrices with a factor
/// `Q = B* B` available in closed form.
#[derive(Clone)]
pub enum QuadraticOperator {
    /// `Q(X) = ½(BX + XB)` with `B = P diag(λ) Pᵀ ⪰ 0`. The factor is
    /// `B X = H ∘ (Pᵀ X P)` with `H_ij = √((λ_i + λ_j)/2)`.
    Lyapunov {
        eigvecs: DMatrix<f64>,
        eigvals: DVector<f64>,
        weights: DMatrix<f64>,
    },
    /// `Q(X) = H ∘ H ∘ X`, factor `B X = H ∘ X`.
    Hadamard { weights: DMatrix<f64> },
    /// Any PSD operator on `svec` coordinates (no closed-form factor).
    General { n: usize, op: PsdOp },
}

impl std::fmt::Debug for QuadraticOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Lyapunov { eigvals, .. } => write!(f, "Lyapunov(n={})", eigvals.len()),
            Self::Hadamard { weights } => write!(f, "Hadamard(n={})", weights.nrows()),
            Self::General { n, .. } => write!(f, "General(n={n})"),
        }
    }
}

impl QuadraticOperator {
    /// `Q(X) = ½(BX + XB)` for a symmetric PSD `B`.
    pub fn lyapunov(b: &DMatrix<f64>) -> Result<Self> {
        check_square_symmetric(b, "Lyapunov factor")?;
        let (vals, vecs) = eigh(b);
        let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if vals.iter().any(|&v| v < -1e-10 * (1.0 + scale)) {
            return Err(Error::NotPsd("B must be positive semidefinite".into()));
        }
        Ok(Self::from_eigen(vecs, vals.map(|v| v.max(0.0))))
    }

    /// Same as [`QuadraticOperator::lyapunov`] from an eigendecomposition.
    pub fn from_eigen(eigvecs: DMatrix<f64>, eigvals: DVector<f64>) -> Self {
        let n = eigvals.len();
        let weights = DMatrix::from_fn(n, n, |i, j| ((eigvals[i] + eigvals[j]) / 2.0).max(0.0).sqrt());
        Self::Lyapunov {
            eigvecs,
            eigvals,
            weights,
        }
    }

    pub fn hadamard(weights: DMatrix<f64>) -> Result<Self> {
        check_square_symmetric(&weights, "Hadamard weights")?;
        Ok(Self::Hadamard { weights })
    }

    pub fn order(&self) -> usize {
        match self {
            Self::Lyapunov { eigvals, .. } => eigvals.len(),
            Self::Hadamard { weights } => weights.nrows(),
            Self::General { n, .. } => *n,
        }
    }

    /// `Q(X)`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Lyapunov { eigvecs, weights, .. } => {
                let hat = eigvecs.transpose() * x * eigvecs;
                let w2 = weights.component_mul(weights);
                eigvecs * w2.component_mul(&hat) * eigvecs.transpose()
            }
            Self::Hadamard { weights } => weights.component_mul(weights).component_mul(x),
            Self::General { op, .. } => smat(&op.apply(&svec(x))),
        }
    }

    /// Squared factor weights `H ∘ H` as they act in the factor's basis.
    fn factor_weights(&self) -> Option<&DMatrix<f64>> {
        match self {
            Self::Lyapunov { weights, .. } | Self::Hadamard { weights } => Some(weights),
            Self::General { .. } => None,
        }
    }

    /// True when `Q ≡ 0`.
    pub fn is_zero(&self) -> bool {
        match self.factor_weights() {
            Some(w) => w.iter().all(|&v| v == 0.0),
            None => false,
        }
    }

    /// The factor `B` as a map on `svec` coordinates, with `Q = B* B`.
    pub fn factor_map(&self) -> Option<LinearMap> {
        let n = self.order();
        let len = svec_len(n);
        match self {
            Self::Lyapunov { eigvecs, weights, .. } => {
                let (p1, p2) = (eigvecs.clone(), eigvecs.clone());
                let (w1, w2) = (svec_weights(weights), svec_weights(weights));
                Some(FnMap::shared(
                    len,
                    len,
                    move |x| w1.component_mul(&svec(&(p1.transpose() * smat(x) * &p1))),
                    move |y| svec(&(&p2 * smat(&w2.component_mul(y)) * p2.transpose())),
                ))
            }
            Self::Hadamard { weights } => {
                let (w1, w2) = (svec_weights(weights), svec_weights(weights));
                Some(FnMap::shared(
                    len,
                    len,
                    move |x| w1.component_mul(x),
                    move |y| w2.component_mul(y),
                ))
            }
            Self::General { .. } => None,
        }
    }

    /// Diagonal of `B B*` in `svec` coordinates of the factor's range space.
    pub fn factor_gram_diagonal(&self) -> Option<DVector<f64>> {
        self.factor_weights()
            .map(|w| svec_weights(&w.component_mul(w)))
    }
}

/// Shadow update `Υ = (I + σQ)⁻¹ Q R̄`, the image `−B*Ξ` of the exact
/// quadratic-block minimizer, computed without forming `Ξ`.
pub fn quad_shadow_update(
    q: &QuadraticOperator,
    sigma: f64,
    r_bar: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidInput(format!("σ must be positive, got {sigma}")));
    }
    check_dim("shadow update", q.order(), r_bar.nrows())?;
    check_square_symmetric(r_bar, "shadow update input")?;
    let filter = |w: &DMatrix<f64>| w.map(|h| {
        let h2 = h * h;
        h2 / (1.0 + sigma * h2)
    });
    match q {
        QuadraticOperator::Lyapunov { eigvecs, weights, .. } => {
            let hat = eigvecs.transpose() * r_bar * eigvecs;
            let out = eigvecs * filter(weights).component_mul(&hat) * eigvecs.transpose();
            Ok((&out + out.transpose()) * 0.5)
        }
        QuadraticOperator::Hadamard { weights } => Ok(filter(weights).component_mul(r_bar)),
        QuadraticOperator::General { op, .. } => {
            let rhs = op.apply(&svec(r_bar));
            let dim = rhs.len();
            let (sol, ok) = conjugate_gradient(
                &|v| v + op.apply(v) * sigma,
                &rhs,
                1e-14,
                10 * dim.max(10),
            );
            if !ok {
                return Err(Error::Singular("shadow update: CG did not converge".into()));
            }
            Ok(smat(&sol))
        }
    }
}

/// Solves `E x = rhs` for a quadratic block update.
pub fn prox_quadratic_block(e: &Majorizer, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim("quadratic block solve", e.dim(), rhs.len())?;
    Ok(e.solve(rhs))
}

/// Closed proper convex functions whose proximal maps are available in
/// closed form. Matrix-valued kinds act on [`svec`] coordinates.
#[derive(Clone, Debug)]
pub enum ProxFriendlyFunction {
    Zero { dim: usize },
    PsdIndicator { n: usize },
    BoxIndicator(BoxSet),
    /// `u ↦ δ*_K(−u)`, the support function of `K` at `−u`.
    BoxSupport(BoxSet),
    NonnegIndicator { dim: usize },
    /// Indicator of `{X symmetric : ‖X‖_* ≤ radius}`.
    NuclearBallIndicator { n: usize, radius: f64 },
    /// `½⟨u, P u⟩ − ⟨b, u⟩` with dense `P ⪰ 0` (small problems only).
    DenseQuadratic { p: DMatrix<f64>, b: DVector<f64> },
    /// Sum over consecutive coordinate groups.
    Separable(Vec<ProxFriendlyFunction>),
}

/// Dense description of a function usable by the small-scale joint oracles:
/// `½⟨u, H u⟩ + ⟨q, u⟩` plus nonnegativity on flagged coordinates.
#[derive(Clone, Debug)]
pub struct DenseModel {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub nonneg: Vec<bool>,
}

fn dist_tol(norm: f64) -> f64 {
    FEASIBILITY_TOL * (1.0 + norm)
}

/// Support-type sum `Σ_k sup_{w_k ∈ [lo_k, hi_k]} s_k w_k`, ignoring the
/// unbounded directions when their total violation is within tolerance.
fn box_support_value(s: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> f64 {
    let mut value = 0.0;
    let mut violation = 0.0;
    for k in 0..s.len() {
        let sk = s[k];
        if sk > 0.0 {
            if hi[k].is_finite() {
                value += sk * hi[k];
            } else {
                violation += sk * sk;
            }
        } else if sk < 0.0 {
            if lo[k].is_finite() {
                value += sk * lo[k];
            } else {
                violation += sk * sk;
            }
        }
    }
    if violation.sqrt() <= dist_tol(s.norm()) {
        value
    } else {
        f64::INFINITY
    }
}

impl ProxFriendlyFunction {
    pub fn dim(&self) -> usize {
        match self {
            Self::Zero { dim } | Self::NonnegIndicator { dim } => *dim,
            Self::PsdIndicator { n } | Self::NuclearBallIndicator { n, .. } => svec_len(*n),
            Self::BoxIndicator(k) | Self::BoxSupport(k) => svec_len(k.order()),
            Self::DenseQuadratic { b, .. } => b.len(),
            Self::Separable(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    fn part_dims(parts: &[ProxFriendlyFunction]) -> Vec<usize> {
        parts.iter().map(|p| p.dim()).collect()
    }

    /// `argmin_u t·f(u) + ½‖u − v‖²`.
    pub fn prox(&self, v: &DVector<f64>, t: f64) -> DVector<f64> {
        match self {
            Self::Zero { .. } => v.clone(),
            Self::PsdIndicator { .. } => {
                svec(&proj_psd(&smat(v)).expect("smat output is symmetric"))
            }
            Self::BoxIndicator(k) => {
                let (lo, hi) = k.svec_bounds();
                clamp_vec(v, lo, hi)
            }
            Self::BoxSupport(k) => {
                // v + t Π_K(−v/t), written to stay finite for infinite bounds.
                let (lo, hi) = k.svec_bounds();
                DVector::from_fn(v.len(), |i, _| v[i] + (-v[i]).max(t * lo[i]).min(t * hi[i]))
            }
            Self::NonnegIndicator { .. } => v.map(|a| a.max(0.0)),
            Self::NuclearBallIndicator { radius, .. } => svec(
                &proj_nuclear_ball_sym(&smat(v), *radius).expect("smat output is symmetric"),
            ),
            Self::DenseQuadratic { p, b } => {
                let n = b.len();
                let m = DMatrix::identity(n, n) + p * t;
                m.cholesky()
                    .expect("I + tP is positive definite")
                    .solve(&(v + b * t))
            }
            Self::Separable(parts) => {
                let dims = Self::part_dims(parts);
                let pieces = crate::linops::split_vector(v, &dims);
                let out: Vec<DVector<f64>> =
                    parts.iter().zip(&pieces).map(|(f, p)| f.prox(p, t)).collect();
                crate::linops::concat_vectors(&out)
            }
        }
    }

    /// `f(u)`; indicators are evaluated with a relative feasibility tolerance.
    pub fn value(&self, u: &DVector<f64>) -> f64 {
        let tol = dist_tol(u.norm());
        let indicator = |dist: f64| if dist <= tol { 0.0 } else { f64::INFINITY };
        match self {
            Self::Zero { .. } => 0.0,
            Self::PsdIndicator { .. } => {
                let (vals, _) = eigh(&smat(u));
                let neg: f64 = vals.iter().map(|v| v.min(0.0).powi(2)).sum();
                indicator(neg.sqrt())
            }
            Self::BoxIndicator(k) => {
                let (lo, hi) = k.svec_bounds();
                indicator((clamp_vec(u, lo, hi) - u).norm())
            }
            Self::BoxSupport(k) => {
                let (lo, hi) = k.svec_bounds();
                box_support_value(&(-u), lo, hi)
            }
            Self::NonnegIndicator { .. } => indicator(u.map(|a| a.min(0.0)).norm()),
            Self::NuclearBallIndicator { radius, .. } => {
                let (vals, _) = eigh(&smat(u));
                let nuc: f64 = vals.iter().map(|v| v.abs()).sum();
                indicator((nuc - radius).max(0.0))
            }
            Self::DenseQuadratic { p, b } => 0.5 * u.dot(&(p * u)) - b.dot(u),
            Self::Separable(parts) => {
                let pieces = crate::linops::split_vector(u, &Self::part_dims(parts));
                parts.iter().zip(&pieces).map(|(f, p)| f.value(p)).sum()
            }
        }
    }

    /// Fenchel conjugate `f*(s)`, with the same feasibility tolerance for
    /// indicator-valued pieces.
    pub fn conjugate(&self, s: &DVector<f64>) -> f64 {
        let tol = dist_tol(s.norm());
        let indicator = |dist: f64| if dist <= tol { 0.0 } else { f64::INFINITY };
        match self {
            Self::Zero { .. } => indicator(s.norm()),
            Self::PsdIndicator { .. } => {
                let (vals, _) = eigh(&smat(s));
                let pos: f64 = vals.iter().map(|v| v.max(0.0).powi(2)).sum();
                indicator(pos.sqrt())
            }
            Self::BoxIndicator(k) => {
                let (lo, hi) = k.svec_bounds();
                box_support_value(s, lo, hi)
            }
            Self::BoxSupport(k) => {
                let (lo, hi) = k.svec_bounds();
                let m = -s;
                indicator((clamp_vec(&m, lo, hi) - m).norm())
            }
            Self::NonnegIndicator { .. } => indicator(s.map(|a| a.max(0.0)).norm()),
            Self::NuclearBallIndicator { radius, .. } => {
                let (vals, _) = eigh(&smat(s));
                radius * vals.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            }
            Self::DenseQuadratic { p, b } => {
                let w = s + b;
                let (vals, vecs) = eigh(p);
                let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let coords = vecs.transpose() * &w;
                let mut value = 0.0;
                let mut off_range = 0.0;
                for i in 0..vals.len() {
                    if vals[i] > 1e-12 * top.max(1e-300) {
                        value += 0.5 * coords[i] * coords[i] / vals[i];
                    } else {
                        off_range += coords[i] * coords[i];
                    }
                }
                if off_range.sqrt() <= tol {
                    value
                } else {
                    f64::INFINITY
                }
            }
            Self::Separable(parts) => {
                let pieces = crate::linops::split_vector(s, &Self::part_dims(parts));
                parts.iter().zip(&pieces).map(|(f, p)| f.conjugate(p)).sum()
            }
        }
    }

    /// Dense Hessian of the smooth part (zero for nonsmooth kinds); this is
    /// the monotonicity modulus `Σ` used in positive-definiteness checks.
    pub fn hessian_dense(&self) -> DMatrix<f64> {
        match self {
            Self::DenseQuadratic { p, .. } => p.clone(),
            Self::Separable(parts) => {
                let n = self.dim();
                let mut out = DMatrix::zeros(n, n);
                let mut off = 0;
                for part in parts {
                    let d = part.dim();
                    out.view_mut((off, off), (d, d)).copy_from(&part.hessian_dense());
                    off += d;
                }
                out
            }
            _ => DMatrix::zeros(self.dim(), self.dim()),
        }
    }

    /// Dense model for small-scale oracles; `None` for kinds the oracles
    /// cannot represent exactly.
    pub fn dense_model(&self) -> Option<DenseModel> {
        let n = self.dim();
        match self {
            Self::Zero { .. } => Some(DenseModel {
                hessian: DMatrix::zeros(n, n),
                linear: DVector::zeros(n),
                nonneg: vec![false; n],
            }),
            Self::NonnegIndicator { .. } => Some(DenseModel {
                hessian: DMatrix::zeros(n, n),
                linear: DVector::zeros(n),
                nonneg: vec![true; n],
            }),
            Self::DenseQuadratic { p, b } => Some(DenseModel {
                hessian: p.clone(),
                linear: -b,
                nonneg: vec![false; n],
            }),
            Self::Separable(parts) => {
                let models: Option<Vec<DenseModel>> = parts.iter().map(|p| p.dense_model()).collect();
                let models = models?;
                let mut hessian = DMatrix::zeros(n, n);
                let mut linear = DVector::zeros(n);
                let mut nonneg = Vec::with_capacity(n);
                let mut off = 0;
                for m in models {
                    let d = m.linear.len();
                    hessian.view_mut((off, off), (d, d)).copy_from(&m.hessian);
                    linear.rows_mut(off, d).copy_from(&m.linear);
                    nonneg.extend(m.nonneg);
                    off += d;
                }
                Some(DenseModel {
                    hessian,
                    linear,
                    nonneg,
                })
            }
            _ => None,
        }
    }
}

/// Shared handle used by model blocks.
pub type SharedFunction = Arc<ProxFriendlyFunction>;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn sym(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn psd_projection_of_diagonal() {
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0]));
        let p = proj_psd(&x).unwrap();
        assert!((p - DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]))).norm() < 1e-14);
    }

    #[test]
    fn psd_projection_rejects_asymmetric() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(proj_psd(&x).is_err());
    }

    #[test]
    fn box_projection_clips() {
        let k = BoxSet::uniform(1, 0.0, 1.0).unwrap();
        let x = DMatrix::from_element(1, 1, -3.0);
        assert_eq!(proj_box(&x, &k).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn empty_box_rejected() {
        assert!(BoxSet::uniform(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn support_prox_whole_space_is_zero() {
        let k = BoxSet::whole(1);
        let z = DMatrix::from_element(1, 1, 5.0);
        assert_eq!(prox_support(&z, 1.0, &k).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn support_prox_rejects_nonpositive_lambda() {
        let k = BoxSet::whole(1);
        assert!(prox_support(&DMatrix::zeros(1, 1), 0.0, &k).is_err());
    }

    #[test]
    fn nuclear_ball_projection_of_diagonal() {
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0]));
        let p = proj_nuclear_ball(&x, 1.0).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((p - expect).norm() < 1e-12);
    }

    #[test]
    fn nuclear_ball_symmetric_matches_general() {
        for seed in 0..10 {
            let x = sym(5, seed) * 2.0;
            let a = proj_nuclear_ball(&x, 1.5).unwrap();
            let b = proj_nuclear_ball_sym(&x, 1.5).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn nuclear_ball_negative_radius_rejected() {
        assert!(proj_nuclear_ball(&DMatrix::zeros(2, 2), -1.0).is_err());
    }

    #[test]
    fn shadow_of_identity_halves() {
        let q = QuadraticOperator::hadamard(DMatrix::from_element(3, 3, 1.0)).unwrap();
        let r = sym(3, 4);
        let y = quad_shadow_update(&q, 1.0, &r).unwrap();
        assert!((y - &r * 0.5).norm() < 1e-14);
        let l = QuadraticOperator::lyapunov(&DMatrix::identity(3, 3)).unwrap();
        let y = quad_shadow_update(&l, 1.0, &r).unwrap();
        assert!((y - r * 0.5).norm() < 1e-13);
    }

    #[test]
    fn shadow_rejects_nonpositive_sigma() {
        let q = QuadraticOperator::hadamard(DMatrix::from_element(2, 2, 1.0)).unwrap();
        assert!(quad_shadow_update(&q, -1.0, &DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn factor_reproduces_q() {
        let b = {
            let s = sym(4, 8);
            &s * &s
        };
        let q = QuadraticOperator::lyapunov(&b).unwrap();
        let x = sym(4, 9);
        let direct = (&b * &x + &x * &b) * 0.5;
        assert!((q.apply(&x) - &direct).norm() < 1e-10);
        let bmap = q.factor_map().unwrap();
        let via = smat(&bmap.adjoint(&bmap.apply(&svec(&x))));
        assert!((via - direct).norm() < 1e-10);
    }

    #[test]
    fn support_value_and_conjugate() {
        // K = {w ≥ 0} in one dimension: δ*_K(−u) = 0 for u ≥ 0, +∞ otherwise.
        let f = ProxFriendlyFunction::BoxSupport(BoxSet::uniform(1, 0.0, f64::INFINITY).unwrap());
        assert_eq!(f.value(&DVector::from_vec(vec![2.0])), 0.0);
        assert_eq!(f.value(&DVector::from_vec(vec![-2.0])), f64::INFINITY);
        // f*(s) = δ_K(−s).
        assert_eq!(f.conjugate(&DVector::from_vec(vec![-1.0])), 0.0);
        assert_eq!(f.conjugate(&DVector::from_vec(vec![1.0])), f64::INFINITY);
    }

    #[test]
    fn quadratic_conjugate_closed_form() {
        let f = ProxFriendlyFunction::DenseQuadratic {
            p: DMatrix::from_element(1, 1, 2.0),
            b: DVector::from_vec(vec![1.0]),
        };
        // f*(s) = (s + 1)² / 4.
        assert!((f.conjugate(&DVector::from_vec(vec![1.0])) - 1.0).abs() < 1e-14);
        let g = ProxFriendlyFunction::DenseQuadratic {
            p: DMatrix::zeros(1, 1),
            b: DVector::from_vec(vec![1.0]),
        };
        assert_eq!(g.conjugate(&DVector::from_vec(vec![-1.0])), 0.0);
        assert_eq!(g.conjugate(&DVector::from_vec(vec![0.0])), f64::INFINITY);
    }
}
