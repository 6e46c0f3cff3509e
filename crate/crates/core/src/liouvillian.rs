//! Lead and measurement dissipators, Liouvillian assembly and steady states.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_non_negative, require_positive, FridgeError, Result};
use crate::model::{
    ket_bra, projector, DotParams, EMPTY, LEFT_OCCUPIED, MINUS, PLUS, RIGHT_OCCUPIED,
};
use crate::qpc::fermi_occupancy;
use crate::superop::{dissipator, unvectorize, DensityMatrix, Superoperator};
use crate::{Operator, SuperMatrix, C64};

/// Relative singular-value gap below which the null space is treated as degenerate.
pub const NULL_SPACE_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Fermionic reservoir tunnel-coupled to one dot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadParams {
    pub mu: f64,
    pub temperature: f64,
    pub gamma: f64,
}

impl LeadParams {
    pub fn new(mu: f64, temperature: f64, gamma: f64) -> Result<Self> {
        let lead = Self {
            mu,
            temperature,
            gamma,
        };
        lead.validate()?;
        Ok(lead)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("lead.mu", self.mu)?;
        require_positive("lead.temperature", self.temperature)?;
        require_positive("lead.gamma", self.gamma)
    }

    pub fn occupancy(&self, energy: f64) -> f64 {
        fermi_occupancy(energy, self.mu, self.temperature).expect("validated temperature")
    }
}

/// A tunnelling channel `Γ↓ D[X] + Γ↑ D[X†]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub operator: Operator,
    pub rate_out: f64,
    pub rate_in: f64,
}

impl Channel {
    pub fn superoperator(&self) -> Superoperator {
        dissipator(&self.operator) * self.rate_out
            + dissipator(&self.operator.adjoint()) * self.rate_in
    }
}

/// Eigenbasis jump channels of one lead when the inter-dot splitting is resolved.
pub fn global_channels(p: &DotParams, lead: &LeadParams, side: Side) -> Result<[Channel; 2]> {
    lead.validate()?;
    let (c, s) = p.cos_sin();
    let [_, e_plus, e_minus] = p.energies();
    let (a_plus, a_minus) = match side {
        Side::Left => (c, -s),
        Side::Right => (s, c),
    };
    let f_plus = lead.occupancy(e_plus);
    let f_minus = lead.occupancy(e_minus);
    Ok([
        Channel {
            operator: ket_bra(EMPTY, PLUS) * C64::from(a_plus),
            rate_out: lead.gamma * (1.0 - f_plus),
            rate_in: lead.gamma * f_plus,
        },
        Channel {
            operator: ket_bra(EMPTY, MINUS) * C64::from(a_minus),
            rate_out: lead.gamma * (1.0 - f_minus),
            rate_in: lead.gamma * f_minus,
        },
    ])
}

/// Single-dot channel with occupations taken at the bare dot energy.
pub fn local_channel(p: &DotParams, lead: &LeadParams, side: Side) -> Result<Channel> {
    lead.validate()?;
    let local = match side {
        Side::Left => ket_bra(EMPTY, LEFT_OCCUPIED),
        Side::Right => ket_bra(EMPTY, RIGHT_OCCUPIED),
    };
    let f = lead.occupancy(p.epsilon());
    Ok(Channel {
        operator: p.to_eigen(&local),
        rate_out: lead.gamma * (1.0 - f),
        rate_in: lead.gamma * f,
    })
}

pub fn lead_lindbladian_global(
    p: &DotParams,
    lead: &LeadParams,
    side: Side,
) -> Result<Superoperator> {
    Ok(global_channels(p, lead, side)?
        .iter()
        .map(Channel::superoperator)
        .sum())
}

pub fn lead_lindbladian_local(
    p: &DotParams,
    lead: &LeadParams,
    side: Side,
) -> Result<Superoperator> {
    Ok(local_channel(p, lead, side)?.superoperator())
}

/// `Σ_ω γ(ω) D[n_ω]` with rates ordered `0, +Ω, −Ω`.
pub fn measurement_lindbladian_rates(p: &DotParams, rates: [f64; 3]) -> Result<Superoperator> {
    for r in rates {
        require_non_negative("measurement.rate", r)?;
    }
    let n = p.charge_components();
    Ok(dissipator(&n.n_0) * rates[0]
        + dissipator(&n.n_plus) * rates[1]
        + dissipator(&n.n_minus) * rates[2])
}

/// Frequency-independent dephasing in the eigenoperator decomposition.
pub fn measurement_lindbladian_ideal(p: &DotParams, gamma_m: f64) -> Result<Superoperator> {
    require_non_negative("measurement.gamma_m", gamma_m)?;
    measurement_lindbladian_rates(p, [gamma_m; 3])
}

/// `γ_M D[n_R]` with the undecomposed right-dot charge.
pub fn measurement_lindbladian_local(p: &DotParams, gamma_m: f64) -> Result<Superoperator> {
    require_non_negative("measurement.gamma_m", gamma_m)?;
    Ok(dissipator(&p.to_eigen(&projector(RIGHT_OCCUPIED))) * gamma_m)
}

pub fn assemble_liouvillian(h: &Operator, parts: &[Superoperator]) -> Superoperator {
    parts
        .iter()
        .fold(Superoperator::coherent(h), |acc, p| acc + *p)
}

const TRACE_ROWS: [usize; 3] = [0, 4, 8];

/// Unique trace-one null vector of `l`.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let m = *l.matrix();
    let svd = m.svd(false, true);
    let mut sv: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    sv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let largest = sv[8].0;
    if largest == 0.0 || sv[1].0 < NULL_SPACE_GAP * largest {
        let ratio = if largest == 0.0 {
            0.0
        } else {
            sv[1].0 / largest
        };
        return Err(FridgeError::NonUniqueSteadyState { ratio });
    }

    let drop = TRACE_ROWS
        .iter()
        .copied()
        .min_by(|&a, &b| m.row(a).norm().total_cmp(&m.row(b).norm()))
        .unwrap_or(0);
    let mut a = m;
    let mut rhs = SVector::<C64, 9>::zeros();
    for j in 0..9 {
        a[(drop, j)] = C64::from(0.0);
    }
    for &j in &TRACE_ROWS {
        a[(drop, j)] = C64::from(1.0);
    }
    rhs[drop] = C64::from(1.0);

    let residual_bound = 1e-12 * l.norm_inf().max(f64::MIN_POSITIVE);
    if let Some(x) = a.lu().solve(&rhs) {
        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            let rho = DensityMatrix::from_operator(unvectorize(&x));
            if residual(&m, &rho) <= residual_bound {
                return Ok(rho);
            }
        }
    }

    let v_t = svd.v_t.expect("requested right singular vectors");
    let null_row = sv[0].1;
    let x: SVector<C64, 9> = v_t.row(null_row).adjoint();
    Ok(DensityMatrix::from_operator(unvectorize(&x)))
}

/// `‖L vec(ρ)‖∞`.
pub fn residual(m: &SuperMatrix, rho: &DensityMatrix) -> f64 {
    let v = crate::superop::vectorize(rho.matrix());
    (m * v).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `e^{L t}` acting on vectorized states.
pub fn propagator(l: &Superoperator, t: f64) -> SMatrix<C64, 9, 9> {
    (l.matrix() * C64::from(t)).exp()
}
