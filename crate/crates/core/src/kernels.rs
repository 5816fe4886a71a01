//! Exact block minimizations shared by every solver.
//!
//! Each kernel minimizes the augmented Lagrangian in one block, all other
//! blocks fixed, plus that block's semi-proximal term centred at `center`.
//! `gamma` is the constraint residual with the block currently holding
//! `current` (which may differ from `center` inside a sweep).

use nalgebra::DVector;

use crate::linops::Majorizer;
use crate::model::{ProxBlock, QuadraticBlock};

fn shifted_residual(
    map_adjoint: impl Fn(&DVector<f64>) -> DVector<f64>,
    center: &DVector<f64>,
    current: &DVector<f64>,
    gamma: &DVector<f64>,
) -> DVector<f64> {
    if center == current {
        gamma.clone()
    } else {
        gamma + map_adjoint(&(center - current))
    }
}

/// `argmin_u f(u) + ⟨extra, u⟩ + ⟨x, F*u⟩ + σ/2‖F*u + r‖² + σ/2‖u − center‖²_T`
/// with `T = λI − F F*`, which is `Prox_{f/(σλ)}(center − g/(σλ))` where
/// `g = extra + F x + σ F Γ(center)`.
pub(crate) fn prox_update(
    block: &ProxBlock,
    scale: f64,
    center: &DVector<f64>,
    current: &DVector<f64>,
    gamma: &DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
    extra: Option<&DVector<f64>>,
) -> DVector<f64> {
    let gc = shifted_residual(|d| block.map.adjoint(d), center, current, gamma);
    let mut grad = block.map.apply(&(x + gc * sigma));
    if let Some(e) = extra {
        grad += e;
    }
    let step = sigma * scale;
    block.func.prox(&(center - grad / step), 1.0 / step)
}

/// `argmin_y θ(y) + ⟨x, A*y⟩ + σ/2‖A*y + r‖² + σ/2‖y − center‖²_T` with
/// `T = E − σ⁻¹P − A A*`:
/// `y = center + E⁻¹(σ⁻¹(b − A x − P·center) − A Γ(center))`.
pub(crate) fn quad_update(
    block: &QuadraticBlock,
    maj: &Majorizer,
    center: &DVector<f64>,
    current: &DVector<f64>,
    gamma: &DVector<f64>,
    x: &DVector<f64>,
    sigma: f64,
) -> DVector<f64> {
    let gc = shifted_residual(|d| block.map.adjoint(d), center, current, gamma);
    let mut rhs = &block.linear - block.map.apply(x);
    if !block.hessian.is_zero() {
        rhs -= block.hessian.apply(center);
    }
    rhs /= sigma;
    rhs -= block.map.apply(&gc);
    center + maj.solve(&rhs)
}
