//! Steady-state thermodynamics of a double quantum dot cooled by continuous
//! charge measurement, with a microscopic point-contact detector.
//!
//! Units: `ħ = k_B = e = 1`, energies and rates in units of the inter-dot
//! coupling `g`.

pub mod error;
pub mod liouvillian;
pub mod local;
pub mod machine;
pub mod model;
pub mod noise;
pub mod qpc;
pub mod quadrature;
pub mod superop;
pub mod thermo;

pub use nalgebra;
use nalgebra::{Matrix3, SMatrix};
pub use num_complex::Complex64 as C64;

/// Operator on the three-state dot space.
pub type Operator = Matrix3<C64>;
/// Matrix of a superoperator acting on column-major vectorized operators.
pub type SuperMatrix = SMatrix<C64, 9, 9>;

pub use error::{FridgeError, Result};
pub use liouvillian::{LeadParams, Side};
pub use local::LocalFlowReport;
pub use machine::{Leads, MeasurementModel, Refrigerator, Regime, Solution};
pub use model::{Basis, ChargeComponents, DotParams};
pub use noise::{NoiseReport, PopulationDynamics};
pub use qpc::{QpcParams, RateTable};
pub use superop::{DensityMatrix, Superoperator};
pub use thermo::FlowReport;
