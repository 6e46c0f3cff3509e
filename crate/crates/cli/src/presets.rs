//! Built-in configurations.
//!
//! `fig2`: the cooling sweep over the ideal measurement rate.
//! `fig3`: the (T_M, μ_M) map with a tunnel-junction detector whose
//! occupied-state transparency is calibrated so that the elastic rate is
//! one at μ_M = 20Ω, T_M = T_R.

use fridge_core::quadrature::Tolerance;
use fridge_core::{DotParams, Regime};

use crate::config::{Axis, Calibration, Field, Measurement, PointParams, RunConfig, Scale, Sweep};
use crate::output::format_number;

pub const PRESETS: [&str; 2] = ["fig2", "fig3"];

const EPSILON: f64 = 5.4;
const DELTA: f64 = 4.3;
const G: f64 = 1.0;
const MU: f64 = 10.0;
const T_L: f64 = 2.0;
const T_R_RATIO: f64 = 2.0;
const GAMMA: f64 = 0.01;

pub const FIG3_T0: f64 = 0.5;
pub const FIG3_RATE: f64 = 1.0;

fn dot_leads(measurement: Measurement) -> PointParams {
    PointParams {
        epsilon: EPSILON,
        delta: DELTA,
        g: G,
        mu: MU,
        t_l: T_L,
        t_r: T_R_RATIO,
        t_r_is_ratio: true,
        gamma: GAMMA,
        measurement,
    }
}

pub fn fig2() -> RunConfig {
    RunConfig {
        base: dot_leads(Measurement::Ideal { gamma_m: 1.0 }),
        regime: Regime::Global,
        sweep: Some(Sweep {
            axis1: Axis {
                field: Field::GammaM,
                from: 1e-3,
                to: 10.0,
                points: 200,
                scale: Scale::Log,
            },
            axis2: None,
        }),
        output_path: None,
        format: Default::default(),
        tolerance: Tolerance::default(),
        notes: vec![("preset".into(), "fig2".into())],
    }
}

/// Calibration point of the fig3 detector for a given dot.
pub fn fig3_calibration(omega: f64) -> Calibration {
    Calibration {
        rate: FIG3_RATE,
        mu_m: 20.0 * omega,
        t_m: T_L * T_R_RATIO,
    }
}

pub fn fig3() -> RunConfig {
    let omega = DotParams::new(EPSILON, DELTA, G)
        .expect("preset dot")
        .omega();
    let cal = fig3_calibration(omega);
    let t1 = fridge_core::qpc::calibrate_t1(FIG3_T0, cal.rate, cal.mu_m, cal.t_m)
        .expect("preset calibration");
    RunConfig {
        base: dot_leads(Measurement::Qpc {
            t0: FIG3_T0,
            t1,
            mu_m: 20.0 * omega,
            t_m: T_L * T_R_RATIO,
            calibration: Some(cal),
        }),
        regime: Regime::Global,
        sweep: Some(Sweep {
            axis1: Axis {
                field: Field::MuM,
                from: 0.05,
                to: 20.0,
                points: 50,
                scale: Scale::Linear,
            },
            axis2: Some(Axis {
                field: Field::TM,
                from: 2.0,
                to: 20.0,
                points: 50,
                scale: Scale::Linear,
            }),
        }),
        output_path: None,
        format: Default::default(),
        tolerance: Tolerance::default(),
        notes: vec![
            ("preset".into(), "fig3".into()),
            (
                "calibration".into(),
                format!(
                    "t1 chosen so the elastic detector rate is {} at mu_m = {} (20 Omega), t_m = {}; t0 = {}, t1 = {}",
                    cal.rate,
                    format_number(cal.mu_m),
                    cal.t_m,
                    FIG3_T0,
                    format_number(t1)
                ),
            ),
        ],
    }
}

pub fn preset(name: &str) -> Option<RunConfig> {
    match name {
        "fig2" => Some(fig2()),
        "fig3" => Some(fig3()),
        _ => None,
    }
}
