//! Superoperators on 3×3 density matrices, column-major vectorization.

use std::ops::{Add, AddAssign, Mul};

use nalgebra::SVector;

use crate::{Operator, SuperMatrix, C64};

pub type StateVector = SVector<C64, 9>;

pub fn vectorize(op: &Operator) -> StateVector {
    StateVector::from_column_slice(op.as_slice())
}

pub fn unvectorize(v: &StateVector) -> Operator {
    Operator::from_column_slice(v.as_slice())
}

/// Linear map `ρ ↦ X ρ X† − ½{X†X, ρ}` as a 9×9 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(SuperMatrix);

impl Superoperator {
    pub fn zero() -> Self {
        Self(SuperMatrix::zeros())
    }

    pub fn from_matrix(m: SuperMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.0
    }

    /// Superoperator for `ρ ↦ A ρ B`.
    pub fn sandwich(a: &Operator, b: &Operator) -> Self {
        let mut m = SuperMatrix::zeros();
        for j in 0..3 {
            for i in 0..3 {
                for l in 0..3 {
                    for k in 0..3 {
                        m[(i + 3 * j, k + 3 * l)] = a[(i, k)] * b[(l, j)];
                    }
                }
            }
        }
        Self(m)
    }

    /// `ρ ↦ X ρ X†`.
    pub fn jump(x: &Operator) -> Self {
        Self::sandwich(x, &x.adjoint())
    }

    /// Coherent part `ρ ↦ −i[H, ρ]`.
    pub fn coherent(h: &Operator) -> Self {
        let id = Operator::identity();
        let minus_i = C64::new(0.0, -1.0);
        (Self::sandwich(h, &id) + Self::sandwich(&id, h) * C64::from(-1.0)) * minus_i
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        unvectorize(&(self.0 * vectorize(rho)))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 2-norm (largest singular value).
    pub fn norm_2(&self) -> f64 {
        self.0.singular_values().iter().copied().fold(0.0, f64::max)
    }
}

impl Add for Superoperator {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl AddAssign for Superoperator {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Mul<C64> for Superoperator {
    type Output = Self;

    fn mul(self, rhs: C64) -> Self {
        Self(self.0 * rhs)
    }
}

impl Mul<f64> for Superoperator {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * C64::from(rhs))
    }
}

impl std::iter::Sum for Superoperator {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), Add::add)
    }
}

pub fn dissipator(x: &Operator) -> Superoperator {
    let xdx = x.adjoint() * x;
    let id = Operator::identity();
    let half = C64::from(-0.5);
    Superoperator::jump(x)
        + (Superoperator::sandwich(&xdx, &id) + Superoperator::sandwich(&id, &xdx)) * half
}

/// Normalized, Hermitian 3×3 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Hermitizes and trace-normalizes `op`.
    pub fn from_operator(op: Operator) -> Self {
        let h = (op + op.adjoint()) * C64::from(0.5);
        let tr = h.trace().re;
        Self(h / C64::from(tr))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p: [f64; 3]) -> Self {
        Self::from_operator(Operator::from_diagonal(&nalgebra::Vector3::new(
            C64::from(p[0]),
            C64::from(p[1]),
            C64::from(p[2]),
        )))
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// `Tr{X ρ}`.
    pub fn expectation(&self, x: &Operator) -> C64 {
        (x * self.0).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest modulus of an off-diagonal element.
    pub fn max_coherence(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    m = m.max(self.0[(i, j)].norm());
                }
            }
        }
        m
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let d = self.0 - other.0;
        0.5 * d
            .symmetric_eigenvalues()
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    }
}
