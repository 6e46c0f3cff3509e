//! Weak inter-dot coupling: local master equation, closed-form flows,
//! refrigeration threshold and the size of the neglected corrections.

use serde::Serialize;

use crate::error::{require_non_negative, FridgeError, Result};
use crate::liouvillian::{
    assemble_liouvillian, lead_lindbladian_local, measurement_lindbladian_local, steady_state,
    LeadParams, Side,
};
use crate::model::{Basis, DotParams};
use crate::thermo::{lead_heat_flow, measurement_energy_flow};

/// Lead occupations and tunnelling rates at the bare dot energy.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LocalRates {
    f_l: f64,
    f_r: f64,
    out_l: f64,
    out_r: f64,
    rate_l: f64,
    rate_r: f64,
}

impl LocalRates {
    fn new(p: &DotParams, left: &LeadParams, right: &LeadParams) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let f_l = left.occupancy(p.epsilon());
        let f_r = right.occupancy(p.epsilon());
        Ok(Self {
            f_l,
            f_r,
            out_l: left.gamma * (1.0 - f_l),
            out_r: right.gamma * (1.0 - f_r),
            rate_l: left.gamma,
            rate_r: right.gamma,
        })
    }

    fn out_total(&self) -> f64 {
        self.out_l + self.out_r
    }

    fn in_total(&self) -> f64 {
        self.rate_l * self.f_l + self.rate_r * self.f_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalFlowReport {
    pub j_l: f64,
    pub j_r: f64,
    pub e_dot_m: f64,
    pub a_const: f64,
    /// Minimum measurement rate for cooling; absent when undefined.
    pub gamma_m_threshold: Option<f64>,
    pub error_scale: f64,
}

/// Closed-form steady-state flows of the local master equation.
pub fn local_flows_analytic(
    p: &DotParams,
    left: &LeadParams,
    right: &LeadParams,
    gamma_m: f64,
) -> Result<LocalFlowReport> {
    require_non_negative("measurement.gamma_m", gamma_m)?;
    if left.mu != right.mu {
        return Err(crate::error::invalid(
            "leads.mu",
            "left and right chemical potentials must agree",
        ));
    }
    let r = LocalRates::new(p, left, right)?;
    let mu = left.mu;
    let (g, delta) = (p.g(), p.delta());
    let e_plus = p.epsilon() + 0.5 * delta - mu;
    let e_minus = p.epsilon() - 0.5 * delta - mu;
    let damping = gamma_m + r.out_total();
    let a_const = g * g * damping * (r.out_total() + 2.0 * r.in_total()) / (r.rate_l * r.rate_r)
        + (1.0 - r.f_l * r.f_r) * (damping * damping + 4.0 * delta * delta);
    let lead_part = r.out_l * e_minus + r.out_r * e_plus;
    let j_plus = gamma_m * e_plus + lead_part;
    let j_minus = -gamma_m * e_minus - lead_part;
    let drive = (r.f_l - r.f_r) * g * g / a_const;
    Ok(LocalFlowReport {
        j_l: drive * j_plus,
        j_r: drive * j_minus,
        e_dot_m: -drive * gamma_m * delta,
        a_const,
        gamma_m_threshold: refrigeration_threshold_local(p, left, right).ok(),
        error_scale: local_error_diagnostic(p, left, right)?,
    })
}

/// Measurement rate at which the left heat flow changes sign.
pub fn refrigeration_threshold_local(
    p: &DotParams,
    left: &LeadParams,
    right: &LeadParams,
) -> Result<f64> {
    let r = LocalRates::new(p, left, right)?;
    let detuning = p.delta();
    let offset = p.epsilon() - left.mu;
    let denom = detuning + 2.0 * offset;
    if detuning * offset >= 0.0 || denom == 0.0 {
        return Err(FridgeError::SignConditionViolated);
    }
    Ok((detuning * (r.out_l - r.out_r) - 2.0 * offset * r.out_total()) / denom)
}

/// Leading-order size of the terms dropped by evaluating lead occupations at
/// the bare dot energy instead of the hybridized levels.
pub fn local_error_diagnostic(p: &DotParams, left: &LeadParams, right: &LeadParams) -> Result<f64> {
    let r = LocalRates::new(p, left, right)?;
    let om = p.omega();
    let term = |rate: f64, f: f64, t: f64| rate * om / (2.0 * t) * f * (1.0 - f);
    Ok(term(r.rate_l, r.f_l, left.temperature).max(term(r.rate_r, r.f_r, right.temperature)))
}

/// Flows from the numerically solved local master equation.
pub fn local_flows_numeric(
    p: &DotParams,
    left: &LeadParams,
    right: &LeadParams,
    gamma_m: f64,
) -> Result<(f64, f64, f64)> {
    let h = p.hamiltonian(Basis::Eigen);
    let ll = lead_lindbladian_local(p, left, Side::Left)?;
    let lr = lead_lindbladian_local(p, right, Side::Right)?;
    let lm = measurement_lindbladian_local(p, gamma_m)?;
    let rho = steady_state(&assemble_liouvillian(&h, &[ll, lr, lm]))?;
    Ok((
        lead_heat_flow(&h, left.mu, &ll, &rho),
        lead_heat_flow(&h, right.mu, &lr, &rho),
        measurement_energy_flow(&h, &lm, &rho),
    ))
}
