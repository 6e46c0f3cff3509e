//! Quantum point contact detector: energy-resolved rates, current, power and
//! heat delivered to its source and drain.
//!
//! The source sits at chemical potential `mu_m`, the drain at zero, both at
//! temperature `t_m`. Transparencies are energy independent.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, require_non_negative, require_positive, Result};
use crate::liouvillian::measurement_lindbladian_rates;
use crate::model::DotParams;
use crate::quadrature::{integrate, Tolerance};
use crate::superop::{DensityMatrix, Superoperator};
use crate::{Operator, C64};

/// Fermi–Dirac occupation, saturating to exactly 0 or 1 far from `mu`.
pub fn fermi_occupancy(energy: f64, mu: f64, temperature: f64) -> Result<f64> {
    require_positive("temperature", temperature)?;
    require_finite("energy", energy)?;
    Ok(fermi((energy - mu) / temperature))
}

#[inline]
pub(crate) fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpcParams {
    /// Transparency with the right dot empty.
    pub t0: f64,
    /// Transparency with the right dot occupied.
    pub t1: f64,
    /// Source–drain bias.
    pub mu_m: f64,
    /// Common source and drain temperature.
    pub t_m: f64,
}

impl QpcParams {
    pub fn new(t0: f64, t1: f64, mu_m: f64, t_m: f64) -> Result<Self> {
        let q = Self { t0, t1, mu_m, t_m };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("measurement.t0", self.t0)?;
        require_non_negative("measurement.t1", self.t1)?;
        require_non_negative("measurement.mu_m", self.mu_m)?;
        require_positive("measurement.t_m", self.t_m)?;
        if self.t0 > 1.0 {
            return Err(invalid("measurement.t0", "must be <= 1"));
        }
        if self.t1 > self.t0 {
            return Err(invalid("measurement.t1", "must be <= t0"));
        }
        Ok(())
    }

    /// Measurement transparency `(√t0 − √t1)²`.
    pub fn t_meas(&self) -> f64 {
        (self.t0.sqrt() - self.t1.sqrt()).powi(2)
    }

    /// Integration window `[−W, W + μ_M + |ω|]`, `W = 40 max(T_M, |ω|, μ_M)`.
    pub fn window(&self, omega: f64) -> (f64, f64) {
        let w = 40.0 * self.t_m.max(omega.abs()).max(self.mu_m);
        (-w, w + self.mu_m + omega.abs())
    }

    fn source(&self, e: f64) -> f64 {
        fermi((e - self.mu_m) / self.t_m)
    }

    fn drain(&self, e: f64) -> f64 {
        fermi(e / self.t_m)
    }

    /// Electron passes source → drain, handing `omega` to the dots.
    pub fn forward(&self, e: f64, omega: f64) -> f64 {
        self.source(e) * (1.0 - self.drain(e - omega))
    }

    /// Electron passes drain → source, handing `omega` to the dots.
    pub fn backward(&self, e: f64, omega: f64) -> f64 {
        (1.0 - self.source(e)) * self.drain(e + omega)
    }

    /// `forward − backward`; the elastic channel uses
    /// `f_S − f_D = f_S (1 − f_D)(1 − e^{−μ_M/T_M})` to avoid cancellation.
    pub fn net(&self, e: f64, omega: f64) -> f64 {
        if omega == 0.0 {
            -self.forward(e, 0.0) * (-self.mu_m / self.t_m).exp_m1()
        } else {
            self.forward(e, omega) - self.backward(e, omega)
        }
    }
}

/// Energy integrals of one Bohr-frequency channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelIntegrals {
    pub omega: f64,
    /// `∫ f_S(E)(1 − f_D(E−ω)) dE`.
    pub forward: f64,
    /// `∫ (1 − f_S(E)) f_D(E+ω) dE`.
    pub backward: f64,
    /// `∫ (E − μ_M)[forward − backward] dE`, heat drawn from the source per unit weight.
    pub source_heat: f64,
    /// `−∫ [(E−ω) forward − (E+ω) backward] dE`, heat drawn from the drain per unit weight.
    pub drain_heat: f64,
}

impl ChannelIntegrals {
    pub fn compute(q: &QpcParams, omega: f64, tol: &Tolerance) -> Result<Self> {
        let (a, b) = q.window(omega);
        let forward = integrate(|e| q.forward(e, omega), a, b, tol)?.value;
        let backward = integrate(|e| q.backward(e, omega), a, b, tol)?.value;
        let mu = q.mu_m;
        let source_heat = integrate(|e| (e - mu) * q.net(e, omega), a, b, tol)?.value;
        let drain_heat = -integrate(
            |e| e * q.net(e, omega) - omega * (q.forward(e, omega) + q.backward(e, omega)),
            a,
            b,
            tol,
        )?
        .value;
        Ok(Self {
            omega,
            forward,
            backward,
            source_heat,
            drain_heat,
        })
    }

    /// Net particle flux per unit weight.
    pub fn net(&self) -> f64 {
        self.forward - self.backward
    }

    /// Total transfer rate per unit weight.
    pub fn total(&self) -> f64 {
        self.forward + self.backward
    }
}

/// `∫ f_S(E)(1 − f_D(E−ω)) + (1 − f_S(E)) f_D(E+ω) dE` times the measurement transparency.
pub fn qpc_rate(q: &QpcParams, omega: f64) -> Result<f64> {
    q.validate()?;
    let tol = Tolerance::default();
    let (a, b) = q.window(omega);
    let fwd = integrate(|e| q.forward(e, omega), a, b, &tol)?.value;
    let bwd = integrate(|e| q.backward(e, omega), a, b, &tol)?.value;
    Ok(q.t_meas() * (fwd + bwd))
}

/// Measurement rates at Bohr frequencies `0, +Ω, −Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateTable {
    pub zero: f64,
    pub plus: f64,
    pub minus: f64,
}

impl RateTable {
    pub fn as_array(&self) -> [f64; 3] {
        [self.zero, self.plus, self.minus]
    }
}

/// Steady-state power and heat exchanged with the detector reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApparatusFlows {
    pub current: f64,
    pub p_m: f64,
    pub j_s: f64,
    pub j_d: f64,
    pub j_m: f64,
}

/// All channel integrals for one dot/detector pair, ordered `0, +Ω, −Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpcSpectrum {
    pub params: QpcParams,
    pub dot: DotParams,
    pub channels: [ChannelIntegrals; 3],
}

impl QpcSpectrum {
    pub fn new(p: &DotParams, q: &QpcParams, tol: &Tolerance) -> Result<Self> {
        q.validate()?;
        let om = p.omega();
        Ok(Self {
            params: *q,
            dot: *p,
            channels: [
                ChannelIntegrals::compute(q, 0.0, tol)?,
                ChannelIntegrals::compute(q, om, tol)?,
                ChannelIntegrals::compute(q, -om, tol)?,
            ],
        })
    }

    pub fn rates(&self) -> RateTable {
        let t = self.params.t_meas();
        RateTable {
            zero: t * self.channels[0].total(),
            plus: t * self.channels[1].total(),
            minus: t * self.channels[2].total(),
        }
    }

    pub fn lindbladian(&self) -> Result<Superoperator> {
        measurement_lindbladian_rates(&self.dot, self.rates().as_array())
    }

    /// Kraus-like amplitudes of the three channels, ordered `0, +Ω, −Ω`.
    pub fn amplitudes(&self) -> [Operator; 3] {
        let n = self.dot.charge_components();
        let root = C64::from(self.params.t_meas().sqrt());
        [
            Operator::identity() * C64::from(self.params.t0.sqrt()) - n.n_0 * root,
            n.n_plus * root,
            n.n_minus * root,
        ]
    }

    /// Channel weights `⟨K_ω† K_ω⟩` in state `rho`.
    pub fn weights(&self, rho: &DensityMatrix) -> [f64; 3] {
        self.amplitudes()
            .map(|k| rho.expectation(&(k.adjoint() * k)).re)
    }

    pub fn current(&self, rho: &DensityMatrix) -> f64 {
        self.weights(rho)
            .iter()
            .zip(&self.channels)
            .map(|(w, c)| w * c.net())
            .sum()
    }

    pub fn flows(&self, rho: &DensityMatrix) -> ApparatusFlows {
        let w = self.weights(rho);
        let current: f64 = w.iter().zip(&self.channels).map(|(w, c)| w * c.net()).sum();
        let j_s: f64 = w
            .iter()
            .zip(&self.channels)
            .map(|(w, c)| w * c.source_heat)
            .sum();
        let j_d: f64 = w
            .iter()
            .zip(&self.channels)
            .map(|(w, c)| w * c.drain_heat)
            .sum();
        ApparatusFlows {
            current,
            p_m: self.params.mu_m * current,
            j_s,
            j_d,
            j_m: j_s + j_d,
        }
    }

    /// `Σ_ω ω γ(ω) ⟨n_ω† n_ω⟩`.
    pub fn energy_to_dots(&self, rho: &DensityMatrix) -> f64 {
        let rates = self.rates().as_array();
        self.dot
            .charge_components()
            .with_frequencies(self.dot.omega())
            .iter()
            .zip(rates)
            .map(|((w, n), r)| w * r * rho.expectation(&(n.adjoint() * n)).re)
            .sum()
    }
}

pub fn rate_table(p: &DotParams, q: &QpcParams) -> Result<RateTable> {
    let om = p.omega();
    Ok(RateTable {
        zero: qpc_rate(q, 0.0)?,
        plus: qpc_rate(q, om)?,
        minus: qpc_rate(q, -om)?,
    })
}

pub fn qpc_lindbladian(p: &DotParams, q: &QpcParams) -> Result<Superoperator> {
    measurement_lindbladian_rates(p, rate_table(p, q)?.as_array())
}

pub fn qpc_current(p: &DotParams, q: &QpcParams, rho: &DensityMatrix) -> Result<f64> {
    Ok(QpcSpectrum::new(p, q, &Tolerance::default())?.current(rho))
}

pub fn qpc_power_and_heat(
    p: &DotParams,
    q: &QpcParams,
    rho: &DensityMatrix,
) -> Result<ApparatusFlows> {
    Ok(QpcSpectrum::new(p, q, &Tolerance::default())?.flows(rho))
}

/// Occupied-state transparency `t1` for which the elastic rate at
/// `(mu_m, t_m)` equals `target`. The rate is linear in `(√t0 − √t1)²`.
pub fn calibrate_t1(t0: f64, target: f64, mu_m: f64, t_m: f64) -> Result<f64> {
    require_positive("calibration.target", target)?;
    let probe = QpcParams::new(t0, 0.0, mu_m, t_m)?;
    let per_unit = qpc_rate(&probe, 0.0)? / probe.t_meas();
    let root = (target / per_unit).sqrt();
    if root > t0.sqrt() {
        return Err(invalid(
            "calibration.target",
            format!(
                "unreachable with t0 = {t0}: maximum rate {:.6e}",
                per_unit * t0
            ),
        ));
    }
    Ok((t0.sqrt() - root).powi(2))
}
