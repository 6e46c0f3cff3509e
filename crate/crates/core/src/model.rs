//! Double-dot Hamiltonian, hybridized eigenbasis and charge decomposition.
//!
//! States are ordered `|00⟩, |10⟩, |01⟩` in the local basis and
//! `|00⟩, |+⟩, |−⟩` in the eigenbasis. Energies are in units of the
//! inter-dot coupling.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Result};
use crate::{Operator, C64};

/// Index of the empty state in both bases.
pub const EMPTY: usize = 0;
/// Index of `|+⟩` (eigenbasis) or `|10⟩` (local basis).
pub const PLUS: usize = 1;
/// Index of `|−⟩` (eigenbasis) or `|01⟩` (local basis).
pub const MINUS: usize = 2;
/// Index of `|10⟩`, the left dot occupied.
pub const LEFT_OCCUPIED: usize = 1;
/// Index of `|01⟩`, the right dot occupied.
pub const RIGHT_OCCUPIED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Local,
    Eigen,
}

/// Dot parameters together with the derived splitting and mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DotSpec", into = "DotSpec")]
pub struct DotParams {
    epsilon: f64,
    delta: f64,
    g: f64,
    omega: f64,
    theta: f64,
}

/// Raw, unvalidated dot parameters as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub g: f64,
}

impl TryFrom<DotSpec> for DotParams {
    type Error = crate::FridgeError;

    fn try_from(s: DotSpec) -> Result<Self> {
        DotParams::new(s.epsilon, s.delta, s.g)
    }
}

impl From<DotParams> for DotSpec {
    fn from(p: DotParams) -> Self {
        DotSpec {
            epsilon: p.epsilon,
            delta: p.delta,
            g: p.g,
        }
    }
}

impl DotParams {
    pub fn new(epsilon: f64, delta: f64, g: f64) -> Result<Self> {
        require_finite("dot.epsilon", epsilon)?;
        require_finite("dot.delta", delta)?;
        require_positive("dot.g", g)?;
        let omega = delta.hypot(g);
        // Ω − Δ written without cancellation for large positive detuning.
        let gap = if delta > 0.0 {
            g * g / (omega + delta)
        } else {
            omega - delta
        };
        let theta = if delta == 0.0 {
            std::f64::consts::FRAC_PI_4
        } else {
            gap.atan2(g)
        };
        Ok(Self {
            epsilon,
            delta,
            g,
            omega,
            theta,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Level splitting `√(Δ² + g²)`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Mixing angle in `[0, π/2)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cos_sin(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// Eigenenergies of `|00⟩, |+⟩, |−⟩`.
    pub fn energies(&self) -> [f64; 3] {
        [
            0.0,
            self.epsilon + 0.5 * self.omega,
            self.epsilon - 0.5 * self.omega,
        ]
    }

    /// Orthogonal matrix whose columns are the eigenvectors in the local basis.
    pub fn change_of_basis(&self) -> Matrix3<f64> {
        let (c, s) = self.cos_sin();
        Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
    }

    pub fn hamiltonian(&self, basis: Basis) -> Operator {
        match basis {
            Basis::Eigen => {
                let e = self.energies();
                Operator::from_diagonal(&nalgebra::Vector3::new(
                    C64::from(e[0]),
                    C64::from(e[1]),
                    C64::from(e[2]),
                ))
            }
            Basis::Local => {
                let mut h = Operator::zeros();
                let (l, r) = (LEFT_OCCUPIED, RIGHT_OCCUPIED);
                h[(l, l)] = C64::from(self.epsilon + 0.5 * self.delta);
                h[(r, r)] = C64::from(self.epsilon - 0.5 * self.delta);
                h[(l, r)] = C64::from(0.5 * self.g);
                h[(r, l)] = C64::from(0.5 * self.g);
                h
            }
        }
    }

    /// Rotates an operator given in the local basis into the eigenbasis.
    pub fn to_eigen(&self, local: &Operator) -> Operator {
        let u = self.change_of_basis().map(C64::from);
        u.transpose() * local * u
    }

    /// Rotates an operator given in the eigenbasis into the local basis.
    pub fn to_local(&self, eigen: &Operator) -> Operator {
        let u = self.change_of_basis().map(C64::from);
        u * eigen * u.transpose()
    }

    /// Eigenoperator components of the right-dot charge `|01⟩⟨01|`.
    pub fn charge_components(&self) -> ChargeComponents {
        let (c, s) = self.cos_sin();
        let mut n_0 = Operator::zeros();
        n_0[(PLUS, PLUS)] = C64::from(s * s);
        n_0[(MINUS, MINUS)] = C64::from(c * c);
        let mut n_plus = Operator::zeros();
        n_plus[(PLUS, MINUS)] = C64::from(c * s);
        let n_minus = n_plus.adjoint();
        ChargeComponents {
            n_0,
            n_plus,
            n_minus,
        }
    }
}

/// Electron number `diag(0, 1, 1)`, identical in both bases.
pub fn number_operator() -> Operator {
    projector(PLUS) + projector(MINUS)
}

/// `|k⟩⟨k|`.
pub fn projector(k: usize) -> Operator {
    let mut p = Operator::zeros();
    p[(k, k)] = C64::from(1.0);
    p
}

/// `|i⟩⟨j|`.
pub fn ket_bra(i: usize, j: usize) -> Operator {
    let mut p = Operator::zeros();
    p[(i, j)] = C64::from(1.0);
    p
}

/// Components of the measured charge oscillating at Bohr frequencies `0, +Ω, −Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeComponents {
    pub n_0: Operator,
    pub n_plus: Operator,
    pub n_minus: Operator,
}

impl ChargeComponents {
    pub fn sum(&self) -> Operator {
        self.n_0 + self.n_plus + self.n_minus
    }

    /// Components paired with their Bohr frequency, in the order `0, +Ω, −Ω`.
    pub fn with_frequencies(&self, omega: f64) -> [(f64, Operator); 3] {
        [
            (0.0, self.n_0),
            (omega, self.n_plus),
            (-omega, self.n_minus),
        ]
    }
}
