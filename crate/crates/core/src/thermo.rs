//! Steady-state energy bookkeeping, efficiencies and entropy production.

use serde::Serialize;

use crate::model::number_operator;
use crate::superop::{DensityMatrix, Superoperator};
use crate::{Operator, C64};

/// Relative size below which a denominator is treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Steady-state flows of the refrigerator. Positive heat flows enter the dots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowReport {
    pub j_l: f64,
    pub j_r: f64,
    pub e_dot_m: f64,
    /// Electric power into the detector; zero without a microscopic detector.
    pub p_m: f64,
    pub j_s: Option<f64>,
    pub j_d: Option<f64>,
    /// Heat drawn from the detector reservoirs; absent for the ideal model.
    pub j_m: Option<f64>,
    pub eta_app: Option<f64>,
    pub eta_hybrid: Option<f64>,
    pub eta_carnot: Option<f64>,
    pub xi: Option<f64>,
    pub sigma: Option<f64>,
    pub first_law_residual: f64,
    /// Magnitude used for relative tolerances.
    pub scale: f64,
}

/// Temperatures of the three reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperatures {
    pub t_l: f64,
    pub t_r: f64,
    pub t_m: Option<f64>,
}

/// Detector-side flows available only for a microscopic detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorFlows {
    pub p_m: f64,
    pub j_s: f64,
    pub j_d: f64,
}

impl FlowReport {
    pub fn new(
        j_l: f64,
        j_r: f64,
        e_dot_m: f64,
        detector: Option<DetectorFlows>,
        temps: Temperatures,
        rate_scale: f64,
    ) -> Self {
        let scale = flow_scale(j_l, j_r, e_dot_m, rate_scale);
        let (p_m, j_s, j_d, j_m) = match detector {
            Some(d) => (d.p_m, Some(d.j_s), Some(d.j_d), Some(d.j_s + d.j_d)),
            None => (0.0, None, None, None),
        };
        let eta_hybrid = match (j_m, temps.t_m) {
            (Some(j_m), Some(t_m)) => hybrid_cop(j_l, p_m, j_m, temps.t_r, t_m),
            _ => None,
        };
        let sigma = match (j_m, temps.t_m) {
            (Some(j_m), Some(t_m)) => {
                Some(entropy_production(j_l, j_r, j_m, temps.t_l, temps.t_r, t_m))
            }
            _ => None,
        };
        let xi = j_m.and_then(|j_m| fuel_ratio(j_m, p_m, scale));
        Self {
            j_l,
            j_r,
            e_dot_m,
            p_m,
            j_s,
            j_d,
            j_m,
            eta_app: apparent_efficiency(j_l, e_dot_m, scale),
            eta_hybrid,
            eta_carnot: carnot_cop(temps.t_l, temps.t_r),
            xi,
            sigma,
            first_law_residual: j_l + j_r + e_dot_m,
            scale,
        }
    }

    /// Relative violation of `Ė_M = J_S + J_D + P_M`, when defined.
    pub fn energy_identity_residual(&self) -> Option<f64> {
        let (j_s, j_d) = (self.j_s?, self.j_d?);
        let scale = [j_s, j_d, self.p_m, self.e_dot_m, self.scale]
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        Some((self.e_dot_m - (j_s + j_d + self.p_m)).abs() / scale)
    }
}

/// `max(|J_L|, |J_R|, |Ė_M|, 1e−6 γ g)`.
pub fn flow_scale(j_l: f64, j_r: f64, e_dot_m: f64, rate_scale: f64) -> f64 {
    j_l.abs()
        .max(j_r.abs())
        .max(e_dot_m.abs())
        .max(1e-6 * rate_scale)
}

/// `Tr{(H − μ N) L_α ρ}`.
pub fn lead_heat_flow(h: &Operator, mu: f64, l_alpha: &Superoperator, rho: &DensityMatrix) -> f64 {
    let x = h - number_operator() * C64::from(mu);
    (x * l_alpha.apply(rho.matrix())).trace().re
}

/// `Tr{H L_M ρ}`.
pub fn measurement_energy_flow(h: &Operator, l_m: &Superoperator, rho: &DensityMatrix) -> f64 {
    (h * l_m.apply(rho.matrix())).trace().re
}

pub fn apparent_efficiency(j_l: f64, e_dot_m: f64, scale: f64) -> Option<f64> {
    (e_dot_m.abs() >= DENOMINATOR_FLOOR * scale && e_dot_m != 0.0).then(|| j_l / e_dot_m)
}

/// Cooling power over the work plus Carnot-weighted heat actually consumed.
pub fn hybrid_cop(j_l: f64, p_m: f64, j_m: f64, t_r: f64, t_m: f64) -> Option<f64> {
    let work = if p_m > 0.0 { p_m } else { 0.0 };
    let heat = if j_m > 0.0 {
        j_m * (1.0 - t_r / t_m)
    } else {
        0.0
    };
    let denom = work + heat;
    (denom > 0.0).then(|| j_l / denom)
}

/// `T_L / (T_R − T_L)`, absent unless the right lead is hotter.
pub fn carnot_cop(t_l: f64, t_r: f64) -> Option<f64> {
    (t_r > t_l).then(|| t_l / (t_r - t_l))
}

pub fn entropy_production(j_l: f64, j_r: f64, j_m: f64, t_l: f64, t_r: f64, t_m: f64) -> f64 {
    -j_l / t_l - j_r / t_r - j_m / t_m
}

pub fn fuel_ratio(j_m: f64, p_m: f64, scale: f64) -> Option<f64> {
    (p_m.abs() >= DENOMINATOR_FLOOR * scale && p_m != 0.0).then(|| j_m / p_m)
}

/// Upper bound on the cooling power allowed by the second law.
pub fn cooling_bound(p_m: f64, j_m: f64, t_l: f64, t_r: f64, t_m: f64) -> Option<f64> {
    carnot_cop(t_l, t_r).map(|c| c * (p_m + j_m * (t_m - t_r) / t_m))
}
