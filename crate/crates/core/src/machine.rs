//! End-to-end steady-state evaluation of the measurement-fueled refrigerator.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, require_non_negative, require_positive, Result};
use crate::liouvillian::{
    assemble_liouvillian, lead_lindbladian_global, lead_lindbladian_local,
    measurement_lindbladian_ideal, measurement_lindbladian_local, steady_state, LeadParams, Side,
};
use crate::model::{Basis, DotParams};
use crate::noise::{regression_generator, signal_to_noise, NoiseReport};
use crate::qpc::{ApparatusFlows, QpcParams, QpcSpectrum, RateTable};
use crate::quadrature::Tolerance;
use crate::superop::{DensityMatrix, Superoperator};
use crate::thermo::{
    lead_heat_flow, measurement_energy_flow, DetectorFlows, FlowReport, Temperatures,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    #[default]
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum MeasurementModel {
    Ideal { gamma_m: f64 },
    Qpc(QpcParams),
}

impl MeasurementModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            MeasurementModel::Ideal { gamma_m } => {
                require_non_negative("measurement.gamma_m", *gamma_m)
            }
            MeasurementModel::Qpc(q) => q.validate(),
        }
    }
}

/// The two fermionic leads. Both share one chemical potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leads {
    pub left: LeadParams,
    pub right: LeadParams,
}

impl Leads {
    pub fn new(mu: f64, t_l: f64, t_r: f64, gamma: f64) -> Result<Self> {
        require_finite("leads.mu", mu)?;
        require_positive("leads.t_l", t_l)?;
        require_positive("leads.t_r", t_r)?;
        require_positive("leads.gamma", gamma)?;
        let lead = |temperature| LeadParams {
            mu,
            temperature,
            gamma,
        };
        Ok(Self {
            left: lead(t_l),
            right: lead(t_r),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        if self.left.mu != self.right.mu {
            return Err(invalid(
                "leads.mu",
                "left and right chemical potentials must be equal",
            ));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.left.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refrigerator {
    pub dot: DotParams,
    pub leads: Leads,
    pub measurement: MeasurementModel,
    pub regime: Regime,
    pub tolerance: Tolerance,
}

/// Everything computed at one parameter point.
#[derive(Debug, Clone)]
pub struct Solution {
    pub rho: DensityMatrix,
    pub liouvillian: Superoperator,
    pub flows: FlowReport,
    pub rates: Option<RateTable>,
    pub apparatus: Option<ApparatusFlows>,
    pub spectrum: Option<QpcSpectrum>,
}

impl Solution {
    /// Detector noise; `None` without a microscopic detector.
    pub fn noise(&self) -> Option<Result<NoiseReport>> {
        let spec = self.spectrum.as_ref()?;
        Some(
            regression_generator(&self.liouvillian).map(|pd| signal_to_noise(spec, &pd, &self.rho)),
        )
    }
}

impl Refrigerator {
    pub fn new(dot: DotParams, leads: Leads, measurement: MeasurementModel) -> Self {
        Self {
            dot,
            leads,
            measurement,
            regime: Regime::Global,
            tolerance: Tolerance::default(),
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn solve(&self) -> Result<Solution> {
        self.leads.validate()?;
        self.measurement.validate()?;
        let p = &self.dot;
        let h = p.hamiltonian(Basis::Eigen);
        let (ll, lr) = match self.regime {
            Regime::Global => (
                lead_lindbladian_global(p, &self.leads.left, Side::Left)?,
                lead_lindbladian_global(p, &self.leads.right, Side::Right)?,
            ),
            Regime::Local => (
                lead_lindbladian_local(p, &self.leads.left, Side::Left)?,
                lead_lindbladian_local(p, &self.leads.right, Side::Right)?,
            ),
        };
        let (lm, spectrum) = match (self.measurement, self.regime) {
            (MeasurementModel::Ideal { gamma_m }, Regime::Global) => {
                (measurement_lindbladian_ideal(p, gamma_m)?, None)
            }
            (MeasurementModel::Ideal { gamma_m }, Regime::Local) => {
                (measurement_lindbladian_local(p, gamma_m)?, None)
            }
            (MeasurementModel::Qpc(q), Regime::Global) => {
                let spec = QpcSpectrum::new(p, &q, &self.tolerance)?;
                (spec.lindbladian()?, Some(spec))
            }
            (MeasurementModel::Qpc(_), Regime::Local) => {
                return Err(invalid(
                    "regime",
                    "the detector model requires the global regime",
                ));
            }
        };
        let l = assemble_liouvillian(&h, &[ll, lr, lm]);
        let rho = steady_state(&l)?;
        let j_l = lead_heat_flow(&h, self.leads.left.mu, &ll, &rho);
        let j_r = lead_heat_flow(&h, self.leads.right.mu, &lr, &rho);
        let e_dot_m = measurement_energy_flow(&h, &lm, &rho);
        let apparatus = spectrum.as_ref().map(|s| s.flows(&rho));
        let temps = Temperatures {
            t_l: self.leads.left.temperature,
            t_r: self.leads.right.temperature,
            t_m: match self.measurement {
                MeasurementModel::Qpc(q) => Some(q.t_m),
                MeasurementModel::Ideal { .. } => None,
            },
        };
        let detector = apparatus.map(|a| DetectorFlows {
            p_m: a.p_m,
            j_s: a.j_s,
            j_d: a.j_d,
        });
        let rate_scale = self.leads.left.gamma.max(self.leads.right.gamma) * p.g();
        let flows = FlowReport::new(j_l, j_r, e_dot_m, detector, temps, rate_scale);
        Ok(Solution {
            rho,
            liouvillian: l,
            flows,
            rates: spectrum.as_ref().map(QpcSpectrum::rates),
            apparatus,
            spectrum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2(gamma_m: f64, t_r: f64) -> Refrigerator {
        Refrigerator::new(
            DotParams::new(5.4, 4.3, 1.0).unwrap(),
            Leads::new(10.0, 2.0, t_r, 0.01).unwrap(),
            MeasurementModel::Ideal { gamma_m },
        )
    }

    #[test]
    fn reference_point_refrigerates() {
        let s = fig2(1.0, 4.0).solve().unwrap();
        assert!(s.flows.j_l > 0.0);
        assert!(s.flows.e_dot_m > 0.0);
        assert!(s.flows.first_law_residual.abs() < 1e-10 * s.flows.scale);
        assert!(s.noise().is_none());
    }

    #[test]
    fn unmeasured_heat_flows_hot_to_cold() {
        let f = fig2(0.0, 4.0).solve().unwrap().flows;
        assert!(f.j_r > 0.0 && f.j_l < 0.0);
        assert!((f.j_l + f.j_r).abs() < 1e-12 * f.scale);
        assert_eq!(f.e_dot_m, 0.0);
        let eq = fig2(0.0, 2.0).solve().unwrap().flows;
        assert!(eq.j_l.abs() < 1e-16 && eq.j_r.abs() < 1e-16);
    }

    #[test]
    fn measurement_energy_matches_eigenoperator_sum() {
        let s = fig2(0.7, 4.0).solve().unwrap();
        let p = DotParams::new(5.4, 4.3, 1.0).unwrap();
        let sum: f64 = p
            .charge_components()
            .with_frequencies(p.omega())
            .iter()
            .map(|(w, n)| w * 0.7 * s.rho.expectation(&(n.adjoint() * n)).re)
            .sum();
        assert!((sum - s.flows.e_dot_m).abs() < 1e-12 * s.flows.scale);
    }

    #[test]
    fn nearly_commuting_measurement_supplies_little_energy() {
        // Ė_M ∝ Ω c² s² ~ g²/Δ as the measured charge approaches an eigenoperator.
        let e_dot = |delta: f64| {
            Refrigerator::new(
                DotParams::new(5.4, delta, 1.0).unwrap(),
                Leads::new(10.0, 2.0, 4.0, 0.01).unwrap(),
                MeasurementModel::Ideal { gamma_m: 3.0 },
            )
            .solve()
            .unwrap()
            .flows
            .e_dot_m
        };
        let (near, far) = (e_dot(100.0), e_dot(1000.0));
        assert!(far.abs() < 0.2 * near.abs());
        assert!(far.abs() < 3.0 / 1000.0);
    }

    #[test]
    fn unequal_potentials_rejected() {
        let leads = Leads {
            left: LeadParams::new(1.0, 1.0, 0.01).unwrap(),
            right: LeadParams::new(2.0, 1.0, 0.01).unwrap(),
        };
        let r = Refrigerator::new(
            DotParams::new(5.4, 4.3, 1.0).unwrap(),
            leads,
            MeasurementModel::Ideal { gamma_m: 1.0 },
        );
        assert!(r.solve().is_err());
        let err = Leads::new(1.0, -1.0, 1.0, 0.01).unwrap_err();
        assert_eq!(err.to_string(), "leads.t_l: must be > 0");
    }

    #[test]
    fn local_regime_rejects_detector() {
        let r = Refrigerator::new(
            DotParams::new(5.4, 4.3, 1.0).unwrap(),
            Leads::new(10.0, 2.0, 4.0, 0.01).unwrap(),
            MeasurementModel::Qpc(QpcParams::new(0.5, 0.3, 10.0, 4.0).unwrap()),
        )
        .with_regime(Regime::Local);
        assert!(r.solve().is_err());
    }
}
