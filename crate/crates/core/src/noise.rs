//! Zero-frequency detector current noise from population regression, signal
//! separation between the two charge configurations and the resulting SNR.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{FridgeError, Result};
use crate::model::{projector, EMPTY, LEFT_OCCUPIED, MINUS, PLUS, RIGHT_OCCUPIED};
use crate::qpc::QpcSpectrum;
use crate::superop::{DensityMatrix, Superoperator};

/// Ratio between the closed-form noise and the two-sided correlator integral.
pub const NOISE_CONVENTION_FACTOR: f64 = 1.0;

/// Coupling from coherences into populations above which regression is refused.
pub const CLOSURE_TOLERANCE: f64 = 1e-12;

/// Net and total jump rates out of each eigenstate, split by channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentActivityCoefficients {
    pub i0: f64,
    pub i_plus: f64,
    pub i_minus: f64,
    pub a0: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    /// Net-current part of the inelastic jump `|+⟩ → |−⟩`.
    pub i_transfer_plus: f64,
    /// Net-current part of the inelastic jump `|−⟩ → |+⟩`.
    pub i_transfer_minus: f64,
}

/// Charge-resolved jump superoperators of the detector.
pub fn jump_superoperators(spec: &QpcSpectrum) -> (Superoperator, Superoperator) {
    let k = spec.amplitudes();
    let mut current = Superoperator::zero();
    let mut activity = Superoperator::zero();
    for (amp, ch) in k.iter().zip(&spec.channels) {
        let jump = Superoperator::jump(amp);
        current += jump * ch.net();
        activity += jump * ch.total();
    }
    (current, activity)
}

pub fn current_activity_coefficients(spec: &QpcSpectrum) -> CurrentActivityCoefficients {
    let (c, s) = spec.dot.cos_sin();
    let q = spec.params;
    let t = q.t_meas();
    let [elastic, up, down] = spec.channels;
    let w_plus = (q.t0.sqrt() * c * c + q.t1.sqrt() * s * s).powi(2);
    let w_minus = (q.t0.sqrt() * s * s + q.t1.sqrt() * c * c).powi(2);
    let inelastic = t * c * c * s * s;
    CurrentActivityCoefficients {
        i0: q.t0 * elastic.net(),
        i_plus: w_plus * elastic.net() + inelastic * down.net(),
        i_minus: w_minus * elastic.net() + inelastic * up.net(),
        a0: q.t0 * elastic.total(),
        a_plus: w_plus * elastic.total() + inelastic * down.total(),
        a_minus: w_minus * elastic.total() + inelastic * up.total(),
        i_transfer_plus: inelastic * down.net(),
        i_transfer_minus: inelastic * up.net(),
    }
}

/// Closed population dynamics `ṗ = A p + B` for `(p₊, p₋)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationDynamics {
    pub a_matrix: Matrix2<f64>,
    pub b_vector: Vector2<f64>,
}

impl PopulationDynamics {
    pub fn stationary(&self) -> Vector2<f64> {
        -self.solve(&self.b_vector)
    }

    /// `A⁻¹ x`.
    pub fn solve(&self, x: &Vector2<f64>) -> Vector2<f64> {
        self.a_matrix
            .lu()
            .solve(x)
            .expect("stability check guarantees invertibility")
    }
}

pub fn regression_generator(l: &Superoperator) -> Result<PopulationDynamics> {
    let m = l.matrix();
    let diag = [0, 4, 8];
    let scale = l.norm_inf().max(f64::MIN_POSITIVE);
    let mut coupling = 0.0_f64;
    for &row in &diag {
        for col in 0..9 {
            let z = m[(row, col)];
            if diag.contains(&col) {
                coupling = coupling.max(z.im.abs());
            } else {
                coupling = coupling.max(z.norm());
            }
        }
    }
    if coupling > CLOSURE_TOLERANCE * scale {
        return Err(FridgeError::Structure { coupling });
    }
    let p = |i: usize, j: usize| m[(diag[i], diag[j])].re;
    let a = Matrix2::new(
        p(PLUS, PLUS) - p(PLUS, EMPTY),
        p(PLUS, MINUS) - p(PLUS, EMPTY),
        p(MINUS, PLUS) - p(MINUS, EMPTY),
        p(MINUS, MINUS) - p(MINUS, EMPTY),
    );
    let b = Vector2::new(p(PLUS, EMPTY), p(MINUS, EMPTY));
    let tr = a.trace();
    let det = a.determinant();
    let floor = 1e-14 * scale;
    if !(tr < -floor && det > floor * floor) {
        return Err(FridgeError::Unstable(format!(
            "population generator has trace {tr:.3e} and determinant {det:.3e}"
        )));
    }
    Ok(PopulationDynamics {
        a_matrix: a,
        b_vector: b,
    })
}

/// Mean current, activity and zero-frequency noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotNoise {
    pub s_ii_0: f64,
    pub i_ss: f64,
    pub a_ss: f64,
}

/// Two-sided zero-frequency noise `A_ss + 2 ∫₀^∞ [⟨I(τ)I(0)⟩ − I²] dτ` evaluated in
/// closed form through the population generator.
pub fn shot_noise_zero_frequency(
    pd: &PopulationDynamics,
    coeffs: &CurrentActivityCoefficients,
    rho: &DensityMatrix,
) -> ShotNoise {
    let pop = rho.populations();
    let p = Vector2::new(pop[PLUS], pop[MINUS]);
    let i_hat = Vector2::new(coeffs.i_plus - coeffs.i0, coeffs.i_minus - coeffs.i0);
    let a_hat = Vector2::new(coeffs.a_plus - coeffs.a0, coeffs.a_minus - coeffs.a0);
    let i_ss = coeffs.i0 + i_hat.dot(&p);
    let a_ss = coeffs.a0 + a_hat.dot(&p);
    // Populations of the state right after a current-weighted jump.
    let kicked = Vector2::new(
        (coeffs.i_plus - coeffs.i_transfer_plus) * p[0] + coeffs.i_transfer_minus * p[1],
        (coeffs.i_minus - coeffs.i_transfer_minus) * p[1] + coeffs.i_transfer_plus * p[0],
    );
    let correlation = -i_hat.dot(&pd.solve(&(kicked - p * i_ss)));
    ShotNoise {
        s_ii_0: (a_ss + 2.0 * correlation) / NOISE_CONVENTION_FACTOR,
        i_ss,
        a_ss,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    pub i_ss: f64,
    pub a_ss: f64,
    pub s_ii_0: f64,
    pub delta_i: f64,
    pub snr: f64,
    pub convention_factor: f64,
}

/// Current difference between the right-occupied and left-occupied dot.
pub fn signal_separation(spec: &QpcSpectrum) -> f64 {
    let dot = &spec.dot;
    let occupied = DensityMatrix::from_operator(dot.to_eigen(&projector(RIGHT_OCCUPIED)));
    let empty = DensityMatrix::from_operator(dot.to_eigen(&projector(LEFT_OCCUPIED)));
    spec.current(&occupied) - spec.current(&empty)
}

pub fn signal_to_noise(
    spec: &QpcSpectrum,
    pd: &PopulationDynamics,
    rho: &DensityMatrix,
) -> NoiseReport {
    let coeffs = current_activity_coefficients(spec);
    let noise = shot_noise_zero_frequency(pd, &coeffs, rho);
    let delta_i = signal_separation(spec);
    let snr = if noise.s_ii_0 > 0.0 {
        delta_i * delta_i / noise.s_ii_0
    } else {
        0.0
    };
    NoiseReport {
        i_ss: noise.i_ss,
        a_ss: noise.a_ss,
        s_ii_0: noise.s_ii_0,
        delta_i,
        snr,
        convention_factor: NOISE_CONVENTION_FACTOR,
    }
}

/// `Tr{J ρ}` for a jump superoperator `J`.
pub fn jump_expectation(j: &Superoperator, rho: &DensityMatrix) -> f64 {
    j.apply(rho.matrix()).trace().re
}

/// `Tr{J Π_k}` for each eigenstate.
pub fn jump_rates_from_states(j: &Superoperator) -> [f64; 3] {
    [EMPTY, PLUS, MINUS].map(|k| j.apply(&projector(k)).trace().re)
}
