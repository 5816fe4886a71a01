use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dense_map, dense_op, estimate_lambda_max, gaussian_vector, FnSymOp, LinearMap, PsdOp};
use crate::error::{check_dim, Error, Result};

/// Largest block dimension for which the exact strategy assembles and factors
/// a dense matrix.
const EXACT_DENSE_LIMIT: usize = 4000;

/// How a quadratic block's majorizer `E ⪰ σ⁻¹Σ + A A*` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorizerStrategy {
    /// `E = σ⁻¹Σ + A A* + εI`, factored once (`T ≈ 0`).
    Exact,
    /// `E = λI` with `λ` a slightly inflated power-iteration estimate of `λ_max`.
    ScaledIdentity,
    /// Use the closed form supplied by the block if any, else `Exact`.
    Auto,
}

type SolveFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// A PSD operator `E ⪰ σ⁻¹Σ + A A*` with an efficient solve.
///
/// The induced semi-proximal term is `T = E − σ⁻¹Σ − A A*`.
#[derive(Clone)]
pub struct Majorizer {
    sigma: f64,
    hessian: PsdOp,
    map: LinearMap,
    e: PsdOp,
    solver: SolveFn,
    label: String,
}

impl fmt::Debug for Majorizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Majorizer")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("sigma", &self.sigma)
            .finish()
    }
}

impl Majorizer {
    /// Builds a majorizer from a caller-supplied closed form for `E` and `E⁻¹`.
    pub fn structured<S>(
        sigma: f64,
        hessian: PsdOp,
        map: LinearMap,
        e: PsdOp,
        solve: S,
        label: &str,
    ) -> Result<Self>
    where
        S: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        validate(sigma, &hessian, &map)?;
        check_dim("majorizer operator", hessian.dim(), e.dim())?;
        Ok(Self {
            sigma,
            hessian,
            map,
            e,
            solver: Arc::new(solve),
            label: label.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `E⁻¹ r`.
    pub fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        (self.solver)(r)
    }

    /// `E v`.
    pub fn apply_e(&self, v: &DVector<f64>) -> DVector<f64> {
        self.e.apply(v)
    }

    /// `T v = E v − σ⁻¹Σ v − A A* v`.
    pub fn apply_t(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut t = self.e.apply(v);
        if !self.hessian.is_zero() {
            t -= self.hessian.apply(v) / self.sigma;
        }
        t -= self.map.apply(&self.map.adjoint(v));
        t
    }

    pub fn dense_e(&self) -> DMatrix<f64> {
        dense_op(self.e.as_ref())
    }

    pub fn dense_t(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = DVector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            out.set_column(j, &self.apply_t(&e));
            e[j] = 0.0;
        }
        (&out + out.transpose()) * 0.5
    }

    pub fn dense_inverse(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = DVector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            out.set_column(j, &self.solve(&e));
            e[j] = 0.0;
        }
        (&out + out.transpose()) * 0.5
    }
}

fn validate(sigma: f64, hessian: &PsdOp, map: &LinearMap) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidInput(format!("penalty must be positive, got {sigma}")));
    }
    check_dim("majorizer map codomain", hessian.dim(), map.cod_dim())
}

/// Rejects operators with a clearly negative Rayleigh quotient on random probes.
fn probe_psd(hessian: &PsdOp) -> Result<()> {
    if hessian.is_zero() || hessian.dim() == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..16 {
        let v = gaussian_vector(&mut rng, hessian.dim());
        let hv = hessian.apply(&v);
        let rq = v.dot(&hv);
        if rq < -1e-10 * v.norm() * hv.norm().max(v.norm()) {
            return Err(Error::NotPsd(format!("Rayleigh quotient {rq:.3e} on a probe")));
        }
    }
    Ok(())
}

/// Builds `E` for a quadratic block with Hessian `Σ` and coupling map `A`.
pub fn build_majorizer(
    sigma: f64,
    hessian: &PsdOp,
    map: &LinearMap,
    strategy: MajorizerStrategy,
) -> Result<Majorizer> {
    validate(sigma, hessian, map)?;
    probe_psd(hessian)?;
    let n = hessian.dim();
    match strategy {
        MajorizerStrategy::Exact | MajorizerStrategy::Auto => {
            if n > EXACT_DENSE_LIMIT {
                return Err(Error::Configuration(format!(
                    "exact majorizer needs a dense factorization of size {n}; use scaled_identity"
                )));
            }
            let h = dense_op(hessian.as_ref());
            let eig_min = if n > 0 { h.clone().symmetric_eigenvalues().min() } else { 0.0 };
            let h_scale = if n > 0 { h.abs().max() } else { 0.0 };
            if eig_min < -1e-10 * (1.0 + h_scale) {
                return Err(Error::NotPsd(format!("smallest eigenvalue {eig_min:.3e}")));
            }
            let a = dense_map(map.as_ref());
            let mut e = h / sigma + &a * a.transpose();
            let mean_diag = if n > 0 { e.diagonal().abs().mean() } else { 0.0 };
            let eps = 1e-12 * (1.0 + mean_diag);
            for i in 0..n {
                e[(i, i)] += eps;
            }
            e = (&e + e.transpose()) * 0.5;
            let chol = e
                .clone()
                .cholesky()
                .ok_or_else(|| Error::Singular("majorizer factorization failed".into()))?;
            let e_op: PsdOp = super::DenseSymOp::shared(e);
            Ok(Majorizer {
                sigma,
                hessian: hessian.clone(),
                map: map.clone(),
                e: e_op,
                solver: Arc::new(move |r| chol.solve(r)),
                label: "exact".into(),
            })
        }
        MajorizerStrategy::ScaledIdentity => {
            let h = hessian.clone();
            let m = map.clone();
            let op = FnSymOp::shared(n, move |v| {
                let mut out = m.apply(&m.adjoint(v));
                if !h.is_zero() {
                    out += h.apply(v) / sigma;
                }
                out
            });
            let lambda = estimate_lambda_max(op.as_ref(), 0x1ead) * 1.001;
            if !(lambda > 0.0) {
                return Err(Error::Singular(
                    "σ⁻¹Σ + A A* vanishes; the block subproblem is unbounded".into(),
                ));
            }
            Ok(Majorizer {
                sigma,
                hessian: hessian.clone(),
                map: map.clone(),
                e: super::ScaledIdentityOp::shared(n, lambda),
                solver: Arc::new(move |r| r / lambda),
                label: format!("scaled_identity({lambda:.6e})"),
            })
        }
    }
}
