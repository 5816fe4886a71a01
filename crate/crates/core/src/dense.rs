//! Small dense solvers backing the step-equivalence oracles.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Most sign-constrained coordinates the active-set enumeration accepts.
const MAX_SIGN_CONSTRAINED: usize = 16;

/// Minimizes `½ wᵀ M w + qᵀ w` subject to `w_i ≥ 0` for flagged `i`, with
/// `M` positive definite, by enumerating active sets and returning the one
/// that satisfies the KKT conditions.
pub fn solve_nonneg_qp(m: &DMatrix<f64>, q: &DVector<f64>, nonneg: &[bool]) -> Result<DVector<f64>> {
    let n = q.len();
    check_dim("QP Hessian", n, m.nrows())?;
    check_dim("QP sign flags", n, nonneg.len())?;
    let flagged: Vec<usize> = (0..n).filter(|&i| nonneg[i]).collect();
    if flagged.len() > MAX_SIGN_CONSTRAINED {
        return Err(Error::OracleScale {
            dims: flagged.len(),
            limit: MAX_SIGN_CONSTRAINED,
        });
    }
    let scale = 1.0 + m.abs().max() + q.abs().max();
    let tol = 1e-11 * scale;
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1u32 << flagged.len()) {
        let mut active = vec![false; n];
        for (bit, &i) in flagged.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                active[i] = true;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let k = free.len();
        let mut w = DVector::zeros(n);
        if k > 0 {
            let sub = DMatrix::from_fn(k, k, |a, b| m[(free[a], free[b])]);
            let rhs = DVector::from_fn(k, |a, _| -q[free[a]]);
            let sol = match sub.cholesky() {
                Some(c) => c.solve(&rhs),
                None => return Err(Error::Singular("oracle QP Hessian is not positive definite".into())),
            };
            for (a, &i) in free.iter().enumerate() {
                w[i] = sol[a];
            }
        }
        let grad = m * &w + q;
        let primal_ok = flagged.iter().all(|&i| w[i] >= -tol);
        let dual_ok = flagged.iter().all(|&i| !active[i] || grad[i] >= -tol);
        if primal_ok && dual_ok {
            let obj = 0.5 * w.dot(&(m * &w)) + q.dot(&w);
            if best.as_ref().map_or(true, |(b, _)| obj < *b) {
                best = Some((obj, w));
            }
        }
    }
    best.map(|(_, w)| w)
        .ok_or_else(|| Error::Singular("no active set satisfied the KKT conditions".into()))
}

/// Minimizer of a block-separable model plus the augmented-Lagrangian and
/// proximal terms:
///
/// `½wᵀHw + qᵀw + ⟨x, K w − c⟩ + σ/2‖K w − c‖² + σ/2‖w − w̄‖²_T`
///
/// with sign constraints on flagged coordinates; `K` is the coordinate
/// matrix of `w ↦ Σ (block map)* w_block`.
#[allow(clippy::too_many_arguments)]
pub fn joint_prox(
    hessian: &DMatrix<f64>,
    linear: &DVector<f64>,
    nonneg: &[bool],
    k: &DMatrix<f64>,
    x: &DVector<f64>,
    c: &DVector<f64>,
    sigma: f64,
    t: &DMatrix<f64>,
    center: &DVector<f64>,
) -> Result<DVector<f64>> {
    let m = hessian + (k.transpose() * k + t) * sigma;
    let q = linear + k.transpose() * (x - c * sigma) - t * center * sigma;
    solve_nonneg_qp(&((&m + m.transpose()) * 0.5), &q, nonneg)
}

/// Places square blocks along a diagonal.
pub fn block_diagonal(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let d = b.nrows();
        out.view_mut((off, off), (d, d)).copy_from(b);
        off += d;
    }
    out
}

/// Places matrices with a common row count side by side.
pub fn hstack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        out.view_mut((0, off), (rows, b.ncols())).copy_from(b);
        off += b.ncols();
    }
    out
}
