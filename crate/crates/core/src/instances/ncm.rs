//! Weighted nearest-correlation-matrix problems
//!
//! ```text
//! min ‖H ∘ (X − G)‖  s.t.  diag(X) = 1,  X ⪰ 0,  X ∈ K
//! ```
//!
//! in the Frobenius norm (squared and halved, a quadratic SDP) or the
//! spectral norm (a five-block dual with the nuclear-ball block `Γ` and the
//! splitting row `Γ − Ξ = 0`).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::qsdp::QsdpInstance;
use crate::diagnostics::{eta_sncm, relative_gap, QsdpResidualData, ResidualMeasure, ResidualReport, SncmPoint};
use crate::error::{check_dim, Error, Result};
use crate::linops::svec::{smat, svec, svec_len, svec_weights, symmetrize};
use crate::linops::{identity_map, zero_op, BlockMap, DiagonalOp, FnMap, LinearMap, Majorizer, MatrixMap, ScaledIdentityMap};
use crate::model::{BlockProblem, IterateState, ProxBlock, QuadraticBlock};
use crate::prox::{BoxSet, ProxFriendlyFunction, QuadraticOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Frobenius,
    Spectral,
}

/// Source of the weight matrix `H`.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    /// Tiled synthetic stand-in for the 93 × 93 weight pattern, normalized
    /// to unit largest entry.
    Surrogate,
    Ones,
    Custom(DMatrix<f64>),
}

/// Order of the tile used by the surrogate weights.
pub const SURROGATE_TILE: usize = 93;

/// Synthetic weight tile: about 24% of entries at `1e-5`, the rest
/// log-uniform in `[2, 1280]`, symmetrized.
pub fn surrogate_weight_tile(seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (2.0f64.ln(), 1280.0f64.ln());
    let raw = DMatrix::from_fn(SURROGATE_TILE, SURROGATE_TILE, |_, _| {
        if rng.gen_bool(0.24) {
            1e-5
        } else {
            rng.gen_range(lo..hi).exp()
        }
    });
    symmetrize(&raw)
}

/// Tiles the surrogate to order `n` and rescales to unit largest entry.
pub fn surrogate_weights(n: usize, seed: u64) -> DMatrix<f64> {
    let tile = surrogate_weight_tile(seed);
    let h = DMatrix::from_fn(n, n, |i, j| tile[(i % SURROGATE_TILE, j % SURROGATE_TILE)]);
    let h = symmetrize(&h);
    let top = h.max();
    h / top
}

#[derive(Clone, Debug)]
pub struct NcmInstance {
    pub name: String,
    pub n: usize,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub kind: NormKind,
    pub k: BoxSet,
    pub seed: Option<u64>,
}

fn unit_diagonal_rows(n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, svec_len(n));
    for i in 0..n {
        let mut e = DMatrix::zeros(n, n);
        e[(i, i)] = 1.0;
        a.set_row(i, &svec(&e).transpose());
    }
    a
}

/// Random correlation matrix: `W Wᵀ` rescaled to unit diagonal.
fn random_correlation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let w = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let m = &w * w.transpose();
    let d = m.diagonal().map(|v| 1.0 / v.sqrt());
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { m[(i, j)] * d[i] * d[j] })
}

/// `G = (1 − α)Ĝ + αE` with `Ĝ` a random correlation matrix, `E` symmetric
/// with entries uniform in `[−1, 1]`, and the diagonal reset to 1.
pub fn perturbed_correlation(n: usize, alpha: f64, seed: u64) -> Result<DMatrix<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("α must lie in (0, 1), got {alpha}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_hat = random_correlation(&mut rng, n);
    let e = symmetrize(&DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0)));
    let mut g = g_hat * (1.0 - alpha) + e * alpha;
    for i in 0..n {
        g[(i, i)] = 1.0;
    }
    Ok(g)
}

/// Random instance with `K = {X ≥ −0.5}`.
pub fn build_ncm(n: usize, alpha: f64, kind: NormKind, weights: Weights, seed: u64) -> Result<NcmInstance> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix order must be positive".into()));
    }
    let g = perturbed_correlation(n, alpha, seed)?;
    let h = match weights {
        Weights::Surrogate => surrogate_weights(n, seed.wrapping_add(1)),
        Weights::Ones => DMatrix::from_element(n, n, 1.0),
        Weights::Custom(h) => h,
    };
    let mut inst = NcmInstance::new(g, h, kind, BoxSet::uniform(n, -0.5, f64::INFINITY)?)?;
    inst.name = format!("ncm-{}-n{n}-s{seed}", match kind {
        NormKind::Frobenius => "f",
        NormKind::Spectral => "s",
    });
    inst.seed = Some(seed);
    Ok(inst)
}

impl NcmInstance {
    pub fn new(g: DMatrix<f64>, h: DMatrix<f64>, kind: NormKind, k: BoxSet) -> Result<Self> {
        let n = g.nrows();
        check_dim("target columns", n, g.ncols())?;
        check_dim("weight order", n, h.nrows())?;
        check_dim("weight columns", n, h.ncols())?;
        check_dim("box order", n, k.order())?;
        if h.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        for (m, what) in [(&g, "target"), (&h, "weights")] {
            if (m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()) {
                return Err(Error::InvalidInput(format!("{what} must be symmetric")));
            }
        }
        Ok(Self {
            name: "ncm".into(),
            n,
            g,
            h,
            kind,
            k,
            seed: None,
        })
    }

    /// Frobenius model as a quadratic SDP: `Q = H∘H∘·`, `C = −H∘H∘G`,
    /// constant `½‖H∘G‖²`.
    pub fn as_qsdp(&self) -> Result<QsdpInstance> {
        let h2 = self.h.component_mul(&self.h);
        let n = self.n;
        let mut q = QsdpInstance::new(
            &self.name,
            QuadraticOperator::hadamard(self.h.clone())?,
            -h2.component_mul(&self.g),
            unit_diagonal_rows(n),
            DVector::from_element(n, 1.0),
            self.k.clone(),
        )?;
        q.constant = 0.5 * self.h.component_mul(&self.g).norm_squared();
        q.x_feas = Some(DMatrix::identity(n, n));
        q.seed = self.seed;
        Ok(q)
    }

    /// The dual in block form for either norm.
    pub fn block_problem(&self) -> Result<BlockProblem> {
        match self.kind {
            NormKind::Frobenius => self.as_qsdp()?.block_problem(),
            NormKind::Spectral => self.spectral_problem(),
        }
    }

    fn spectral_problem(&self) -> Result<BlockProblem> {
        let n = self.n;
        let len = svec_len(n);
        let cols = vec![len, len];
        let f = ProxBlock::with_scale(
            "Z,Gamma",
            ProxFriendlyFunction::Separable(vec![
                ProxFriendlyFunction::BoxSupport(self.k.clone()),
                ProxFriendlyFunction::NuclearBallIndicator { n, radius: 1.0 },
            ]),
            identity_map(2 * len),
            1.0,
        )?;
        let g = ProxBlock::with_scale(
            "S",
            ProxFriendlyFunction::PsdIndicator { n },
            BlockMap::shared(vec![len], cols.clone(), vec![vec![Some(identity_map(len)), None]])?,
            1.0,
        )?;
        let w = svec_weights(&self.h);
        let (w1, w2) = (w.clone(), w.clone());
        let hadamard: LinearMap = FnMap::shared(len, len, move |x| w1.component_mul(x), move |y| w2.component_mul(y));
        let xi_map = BlockMap::shared(
            vec![len],
            cols.clone(),
            vec![vec![Some(hadamard), Some(ScaledIdentityMap::shared(len, -1.0))]],
        )?;
        let xi = QuadraticBlock::new("Xi", zero_op(len), svec(&self.h.component_mul(&self.g)), xi_map.clone())?;
        let hessian = xi.hessian.clone();
        let gram = w.map(|h| h * h + 1.0);
        let xi = xi.with_structured_majorizer(Arc::new(move |sigma| {
            let inv = gram.map(|d| 1.0 / d);
            Majorizer::structured(
                sigma,
                hessian.clone(),
                xi_map.clone(),
                DiagonalOp::shared(gram.clone()),
                move |r| r.component_mul(&inv),
                "diagonal",
            )
        }));
        let diag_map = BlockMap::shared(
            vec![n],
            cols,
            vec![vec![Some(MatrixMap::shared(unit_diagonal_rows(n))), None]],
        )?;
        let y_e = QuadraticBlock::new("y_E", zero_op(n), DVector::from_element(n, 1.0), diag_map)?;
        BlockProblem::new(f, vec![xi], g, vec![y_e], DVector::zeros(2 * len))
    }

    /// The primal matrix `X` carried by the multiplier.
    pub fn primal_matrix(&self, state: &IterateState) -> DMatrix<f64> {
        let len = svec_len(self.n);
        smat(&state.x.rows(0, len).into_owned())
    }

    /// `½‖H∘(X−G)‖²_F` or `‖H∘(X−G)‖₂`.
    pub fn primal_objective(&self, x: &DMatrix<f64>) -> f64 {
        let r = self.h.component_mul(&(x - &self.g));
        match self.kind {
            NormKind::Frobenius => 0.5 * r.norm_squared(),
            NormKind::Spectral => {
                let vals = symmetrize(&r).symmetric_eigenvalues();
                vals.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            }
        }
    }

    fn sncm_report(&self, _problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport> {
        let len = svec_len(self.n);
        let a_rows = unit_diagonal_rows(self.n);
        let x = self.primal_matrix(state);
        let pt = SncmPoint {
            x: x.clone(),
            z: smat(&state.u.rows(0, len).into_owned()),
            xi: smat(&state.y[0]),
            s: smat(&state.v),
            y_e: state.z[0].clone(),
        };
        let a_e = |m: &DMatrix<f64>| &a_rows * svec(m);
        let a_e_adj = |y: &DVector<f64>| smat(&(a_rows.transpose() * y));
        let b_e = DVector::from_element(self.n, 1.0);
        let zero = DMatrix::zeros(self.n, self.n);
        let data = QsdpResidualData {
            a_e: &a_e,
            a_e_adjoint: &a_e_adj,
            b_e: &b_e,
            c: &zero,
            k: &self.k,
        };
        let mut r = eta_sncm(&data, &self.h, &self.g, &pt);
        r.iter = state.iter;
        r.obj_p = self.primal_objective(&x);
        let z_part = ProxFriendlyFunction::BoxSupport(self.k.clone());
        r.obj_d = -z_part.value(&state.u.rows(0, len).into_owned())
            + svec(&self.h.component_mul(&self.g)).dot(&state.y[0])
            + b_e.dot(&state.z[0]);
        r.eta_gap = relative_gap(r.obj_p, r.obj_d);
        Ok(r)
    }
}

impl ResidualMeasure for NcmInstance {
    fn report(&self, problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport> {
        match self.kind {
            NormKind::Frobenius => self.as_qsdp()?.report(problem, state),
            NormKind::Spectral => self.sncm_report(problem, state),
        }
    }
}
