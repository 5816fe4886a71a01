//! Relative KKT residuals used for stopping and reporting.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::Result;
use crate::model::{objective_values, BlockProblem, IterateState};
use crate::prox::{proj_box, proj_nuclear_ball, proj_psd, BoxSet};

/// One evaluation of the residuals at an iterate. Components that do not
/// apply to the residual family in use are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub iter: usize,
    pub eta: f64,
    pub eta_p: f64,
    pub eta_d: Option<f64>,
    pub eta_f: Option<f64>,
    pub eta_g: Option<f64>,
    pub eta_theta: Option<f64>,
    pub eta_phi: Option<f64>,
    pub eta_z: Option<f64>,
    pub eta_s1: Option<f64>,
    pub eta_s2: Option<f64>,
    pub eta_xi: Option<f64>,
    /// `None` when either objective is infinite.
    pub eta_gap: Option<f64>,
    pub obj_p: f64,
    pub obj_d: f64,
    /// Seconds since the iteration loop started; stamped by the solver driver.
    pub elapsed_s: f64,
}

impl ResidualReport {
    /// Populated components in a fixed order.
    pub fn components(&self) -> Vec<f64> {
        let mut out = vec![self.eta_p];
        for c in [
            self.eta_d,
            self.eta_f,
            self.eta_g,
            self.eta_theta,
            self.eta_phi,
            self.eta_z,
            self.eta_s1,
            self.eta_s2,
            self.eta_xi,
        ]
        .into_iter()
        .flatten()
        {
            out.push(c);
        }
        out
    }

    /// Recomputes `eta` as the maximum of the populated components.
    pub fn refresh_eta(&mut self) {
        self.eta = self.components().into_iter().fold(0.0, f64::max);
    }

    /// Dual-side summary: `eta_d` when present, else the largest of the
    /// per-block stationarity components.
    pub fn dual_summary(&self) -> f64 {
        self.eta_d.unwrap_or_else(|| {
            [self.eta_f, self.eta_g, self.eta_theta, self.eta_phi]
                .into_iter()
                .flatten()
                .fold(0.0, f64::max)
        })
    }
}

/// `(obj_P − obj_D)/(1 + |obj_P| + |obj_D|)`, undefined for infinite values.
pub fn relative_gap(obj_p: f64, obj_d: f64) -> Option<f64> {
    if obj_p.is_finite() && obj_d.is_finite() {
        Some((obj_p - obj_d) / (1.0 + obj_p.abs() + obj_d.abs()))
    } else {
        None
    }
}

/// A residual family evaluated by the solvers at every iteration.
pub trait ResidualMeasure: Send + Sync {
    fn report(&self, problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport>;
}

/// The general residual of the multi-block model.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneralResidual;

impl ResidualMeasure for GeneralResidual {
    fn report(&self, problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport> {
        eta_general(problem, state)
    }
}

fn stacked_norm<'a>(parts: impl Iterator<Item = &'a DVector<f64>>) -> f64 {
    parts.map(|p| p.norm_squared()).sum::<f64>().sqrt()
}

/// General relative residual
/// `η = max{η_P, η_f, η_θ, η_g, η_φ}` with
/// `η_P = ‖Γ‖/(1+‖c‖)`, `η_f = ‖u − Prox_f(u − Fx)‖/(1+‖u‖+‖Fx‖)` and the
/// analogous block terms (the `θ`/`φ` terms stack all blocks of the group).
pub fn eta_general(problem: &BlockProblem, state: &IterateState) -> Result<ResidualReport> {
    let gamma = crate::model::constraint_residual(problem, state)?;
    let x = &state.x;
    let eta_p = gamma.norm() / (1.0 + problem.c.norm());

    let fx = problem.f.map.apply(x);
    let pf = problem.f.func.prox(&(&state.u - &fx), 1.0);
    let eta_f = (&state.u - pf).norm() / (1.0 + state.u.norm() + fx.norm());

    let gx = problem.g.map.apply(x);
    let pg = problem.g.func.prox(&(&state.v - &gx), 1.0);
    let eta_g = (&state.v - pg).norm() / (1.0 + state.v.norm() + gx.norm());

    let quad_eta = |blocks: &[crate::model::QuadraticBlock], vals: &[DVector<f64>]| -> Option<f64> {
        if blocks.is_empty() {
            return None;
        }
        let ax: Vec<DVector<f64>> = blocks.iter().map(|b| b.map.apply(x)).collect();
        let diffs: Vec<DVector<f64>> = blocks
            .iter()
            .zip(vals)
            .zip(&ax)
            .map(|((b, y), a)| y - b.prox_unit(&(y - a)))
            .collect();
        Some(stacked_norm(diffs.iter()) / (1.0 + stacked_norm(vals.iter()) + stacked_norm(ax.iter())))
    };
    let eta_theta = quad_eta(&problem.theta, &state.y);
    let eta_phi = quad_eta(&problem.phi, &state.z);

    let (obj_p, obj_d) = objective_values(problem, state)?;
    let mut report = ResidualReport {
        iter: state.iter,
        eta_p,
        eta_f: Some(eta_f),
        eta_g: Some(eta_g),
        eta_theta,
        eta_phi,
        eta_gap: relative_gap(obj_p, obj_d),
        obj_p,
        obj_d,
        ..Default::default()
    };
    report.refresh_eta();
    Ok(report)
}

/// Data of the equality/box/PSD constrained quadratic SDP needed by its
/// residual: `A_E`, `b_E`, `C` and `K`.
pub struct QsdpResidualData<'a> {
    pub a_e: &'a dyn Fn(&DMatrix<f64>) -> DVector<f64>,
    pub a_e_adjoint: &'a dyn Fn(&DVector<f64>) -> DMatrix<f64>,
    pub b_e: &'a DVector<f64>,
    pub c: &'a DMatrix<f64>,
    pub k: &'a BoxSet,
}

/// Primal–dual point of the quadratic SDP with the shadow `Υ = −B*Ξ`.
#[derive(Clone, Debug)]
pub struct QsdpPoint {
    pub x: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub upsilon: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub y_e: DVector<f64>,
}

fn psd_violation(x: &DMatrix<f64>) -> f64 {
    (x - proj_psd(x).expect("symmetric input")).norm()
}

/// Shared `η_P, η_Z, η_S1, η_S2` of both matrix residual families.
fn conic_components(
    data: &QsdpResidualData<'_>,
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> (f64, f64, f64, f64) {
    let eta_p = ((data.a_e)(x) - data.b_e).norm() / (1.0 + data.b_e.norm());
    let pk = proj_box(&(x - z), data.k).expect("box matches matrix order");
    let eta_z = (x - pk).norm() / (1.0 + x.norm() + z.norm());
    let eta_s1 = s.dot(x).abs() / (1.0 + s.norm() + x.norm());
    let eta_s2 = psd_violation(x) / (1.0 + x.norm());
    (eta_p, eta_z, eta_s1, eta_s2)
}

/// `η_qsdp = max{η_P, η_D, η_Z, η_S1, η_S2}` with
/// `η_D = ‖Z − Υ + S + A_E* y_E − C‖/(1+‖C‖)`. Objective fields are left at
/// zero; callers fill them in.
pub fn eta_qsdp(data: &QsdpResidualData<'_>, pt: &QsdpPoint) -> ResidualReport {
    let (eta_p, eta_z, eta_s1, eta_s2) = conic_components(data, &pt.x, &pt.z, &pt.s);
    let dual = &pt.z - &pt.upsilon + &pt.s + (data.a_e_adjoint)(&pt.y_e) - data.c;
    let eta_d = dual.norm() / (1.0 + data.c.norm());
    let mut r = ResidualReport {
        eta_p,
        eta_d: Some(eta_d),
        eta_z: Some(eta_z),
        eta_s1: Some(eta_s1),
        eta_s2: Some(eta_s2),
        ..Default::default()
    };
    r.refresh_eta();
    r
}

/// Primal–dual point of the spectral-norm weighted correlation problem.
#[derive(Clone, Debug)]
pub struct SncmPoint {
    pub x: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub xi: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub y_e: DVector<f64>,
}

/// `η_sncm = max{η_P, η_D, η_Z, η_S1, η_S2, η_Ξ}` with
/// `η_D = ‖Z + H∘Ξ + S + A_E* y_E‖/(1+‖Z‖+‖S‖)` and
/// `η_Ξ = ‖Ξ − Π_{‖·‖_*≤1}(Ξ − H∘(X−G))‖/(1+‖Ξ‖+‖H∘(X−G)‖)`.
pub fn eta_sncm(
    data: &QsdpResidualData<'_>,
    h: &DMatrix<f64>,
    g: &DMatrix<f64>,
    pt: &SncmPoint,
) -> ResidualReport {
    let (eta_p, eta_z, eta_s1, eta_s2) = conic_components(data, &pt.x, &pt.z, &pt.s);
    let dual = &pt.z + h.component_mul(&pt.xi) + &pt.s + (data.a_e_adjoint)(&pt.y_e);
    let eta_d = dual.norm() / (1.0 + pt.z.norm() + pt.s.norm());
    let w = h.component_mul(&(&pt.x - g));
    let proj = proj_nuclear_ball(&(&pt.xi - &w), 1.0).expect("radius is valid");
    let eta_xi = (&pt.xi - proj).norm() / (1.0 + pt.xi.norm() + w.norm());
    let mut r = ResidualReport {
        eta_p,
        eta_d: Some(eta_d),
        eta_z: Some(eta_z),
        eta_s1: Some(eta_s1),
        eta_s2: Some(eta_s2),
        eta_xi: Some(eta_xi),
        ..Default::default()
    };
    r.refresh_eta();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_undefined_for_infinite_objectives() {
        assert_eq!(relative_gap(f64::INFINITY, 0.0), None);
        assert_eq!(relative_gap(1.0, 1.0), Some(0.0));
    }

    #[test]
    fn eta_is_max_of_components() {
        let mut r = ResidualReport {
            eta_p: 0.1,
            eta_d: Some(0.3),
            eta_z: Some(0.2),
            ..Default::default()
        };
        r.refresh_eta();
        assert_eq!(r.eta, 0.3);
        r.eta_d = Some(0.0);
        r.refresh_eta();
        assert_eq!(r.eta, 0.2);
    }
}
