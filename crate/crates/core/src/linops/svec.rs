//! Isometric vectorization of symmetric matrices.
//!
//! The upper triangle is stored column by column with off-diagonal entries
//! scaled by √2, so `⟨svec A, svec B⟩ = ⟨A, B⟩_F`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Length of the vectorization of an `n × n` symmetric matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Recovers `n` from a vectorization length.
pub fn svec_order(len: usize) -> Result<usize> {
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    if svec_len(n) == len {
        Ok(n)
    } else {
        Err(Error::InvalidInput(format!(
            "{len} is not a triangular number"
        )))
    }
}

/// Vectorizes the symmetric part of `m`.
pub fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut out = DVector::zeros(svec_len(n));
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            out[k] = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * std::f64::consts::SQRT_2
            };
            k += 1;
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &DVector<f64>) -> DMatrix<f64> {
    let n = svec_order(v.len()).expect("svec length must be triangular");
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                let a = v[k] * std::f64::consts::FRAC_1_SQRT_2;
                m[(i, j)] = a;
                m[(j, i)] = a;
            }
            k += 1;
        }
    }
    m
}

/// Upper-triangular entries of a symmetric weight matrix in [`svec`] order,
/// without the √2 scaling. Entrywise products `W ∘ M` act on `svec M` as
/// multiplication by this vector.
pub fn svec_weights(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.nrows();
    let mut out = DVector::zeros(svec_len(n));
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            out[k] = w[(i, j)];
            k += 1;
        }
    }
    out
}

/// Symmetric part `(m + mᵀ)/2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
