//! Run configuration: TOML documents, presets, validation and sweep axes.
//!
//! ```toml
//! preset = "fig2"            # optional base configuration
//! regime = "global"          # or "local"
//!
//! [dot]
//! epsilon = 5.4
//! delta = 4.3
//! g = 1.0
//!
//! [leads]
//! mu = 10.0
//! t_l = 2.0
//! t_r = 4.0                  # or t_r_ratio = 2.0
//! gamma = 0.01
//!
//! [measurement]
//! model = "ideal"            # or "qpc" with t0, t1 | calibrate, mu_m, t_m
//! gamma_m = 1.0
//!
//! [sweep.axis1]
//! name = "measurement.gamma_m"
//! from = 1e-3
//! to = 10.0
//! points = 200
//! scale = "log"
//!
//! [output]
//! path = "fig2.csv"
//! format = "csv"
//! ```

use std::path::PathBuf;

use fridge_core::quadrature::Tolerance;
use fridge_core::Regime;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// A parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Epsilon,
    Delta,
    G,
    Mu,
    TL,
    TR,
    TRRatio,
    Gamma,
    GammaM,
    T0,
    T1,
    MuM,
    TM,
}

impl Field {
    pub const ALL: [Field; 13] = [
        Field::Epsilon,
        Field::Delta,
        Field::G,
        Field::Mu,
        Field::TL,
        Field::TR,
        Field::TRRatio,
        Field::Gamma,
        Field::GammaM,
        Field::T0,
        Field::T1,
        Field::MuM,
        Field::TM,
    ];

    pub fn path(&self) -> &'static str {
        match self {
            Field::Epsilon => "dot.epsilon",
            Field::Delta => "dot.delta",
            Field::G => "dot.g",
            Field::Mu => "leads.mu",
            Field::TL => "leads.t_l",
            Field::TR => "leads.t_r",
            Field::TRRatio => "leads.t_r_ratio",
            Field::Gamma => "leads.gamma",
            Field::GammaM => "measurement.gamma_m",
            Field::T0 => "measurement.t0",
            Field::T1 => "measurement.t1",
            Field::MuM => "measurement.mu_m",
            Field::TM => "measurement.t_m",
        }
    }

    pub fn from_path(path: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.path() == path)
    }

    /// CSV column name for a swept field.
    pub fn column(&self) -> &'static str {
        self.path().rsplit('.').next().unwrap_or_default()
    }

    fn needs_qpc(&self) -> Option<bool> {
        match self {
            Field::GammaM => Some(false),
            Field::T0 | Field::T1 | Field::MuM | Field::TM => Some(true),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub field: Field,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                if k == 0 {
                    return self.from;
                }
                if k == n - 1 {
                    return self.to;
                }
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * s,
                    Scale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * s).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl Sweep {
    pub fn fields(&self) -> Vec<Field> {
        std::iter::once(self.axis1.field)
            .chain(self.axis2.map(|a| a.field))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub rate: f64,
    pub mu_m: f64,
    pub t_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measurement {
    Ideal {
        gamma_m: f64,
    },
    Qpc {
        t0: f64,
        t1: f64,
        mu_m: f64,
        t_m: f64,
        calibration: Option<Calibration>,
    },
}

impl Measurement {
    pub fn is_qpc(&self) -> bool {
        matches!(self, Measurement::Qpc { .. })
    }
}

/// One fully specified parameter point before physical validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub epsilon: f64,
    pub delta: f64,
    pub g: f64,
    pub mu: f64,
    pub t_l: f64,
    /// Right-lead temperature, or its ratio to `t_l` when `t_r_is_ratio`.
    pub t_r: f64,
    pub t_r_is_ratio: bool,
    pub gamma: f64,
    pub measurement: Measurement,
}

impl PointParams {
    pub fn t_r_absolute(&self) -> f64 {
        if self.t_r_is_ratio {
            self.t_r * self.t_l
        } else {
            self.t_r
        }
    }

    pub fn with(mut self, field: Field, value: f64) -> Self {
        match field {
            Field::Epsilon => self.epsilon = value,
            Field::Delta => self.delta = value,
            Field::G => self.g = value,
            Field::Mu => self.mu = value,
            Field::TL => self.t_l = value,
            Field::TR => {
                self.t_r = value;
                self.t_r_is_ratio = false;
            }
            Field::TRRatio => {
                self.t_r = value;
                self.t_r_is_ratio = true;
            }
            Field::Gamma => self.gamma = value,
            Field::GammaM => {
                if let Measurement::Ideal { gamma_m } = &mut self.measurement {
                    *gamma_m = value;
                }
            }
            Field::T0 | Field::T1 | Field::MuM | Field::TM => {
                if let Measurement::Qpc {
                    t0, t1, mu_m, t_m, ..
                } = &mut self.measurement
                {
                    match field {
                        Field::T0 => *t0 = value,
                        Field::T1 => *t1 = value,
                        Field::MuM => *mu_m = value,
                        _ => *t_m = value,
                    }
                }
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub base: PointParams,
    pub regime: Regime,
    pub sweep: Option<Sweep>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub tolerance: Tolerance,
    /// Extra `key = value` lines for the output header.
    pub notes: Vec<(String, String)>,
}

// ---- raw document -------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    regime: Option<Regime>,
    dot: Option<RawDot>,
    leads: Option<RawLeads>,
    measurement: Option<RawMeasurement>,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
    tolerance: Option<RawTolerance>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDot {
    epsilon: Option<f64>,
    delta: Option<f64>,
    g: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLeads {
    mu: Option<f64>,
    mu_l: Option<f64>,
    mu_r: Option<f64>,
    t_l: Option<f64>,
    t_r: Option<f64>,
    t_r_ratio: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    model: Option<String>,
    gamma_m: Option<f64>,
    t0: Option<f64>,
    t1: Option<f64>,
    mu_m: Option<f64>,
    t_m: Option<f64>,
    calibrate: Option<RawCalibration>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    rate: f64,
    mu_m: f64,
    t_m: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis1: Option<RawAxis>,
    axis2: Option<RawAxis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    name: String,
    from: f64,
    to: f64,
    points: usize,
    #[serde(default)]
    scale: Scale,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerance {
    rel: Option<f64>,
    abs: Option<f64>,
    max_subdivisions: Option<usize>,
}

fn config_err(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config_err(field, "missing"))
}

/// Parses a TOML document, applying the preset it names, if any.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config {
        field: "document".to_string(),
        reason: e.message().to_string(),
    })?;
    let base = match &raw.preset {
        Some(name) => Some(
            crate::presets::preset(name)
                .ok_or_else(|| config_err("preset", format!("unknown preset `{name}`")))?,
        ),
        None => None,
    };
    apply(raw, base)
}

/// Parses `text` on top of an explicit base configuration.
pub fn parse_config_over(text: &str, base: RunConfig) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config {
        field: "document".to_string(),
        reason: e.message().to_string(),
    })?;
    if raw.preset.is_some() {
        return Err(config_err(
            "preset",
            "not allowed when the subcommand selects a preset",
        ));
    }
    apply(raw, Some(base))
}

fn apply(raw: RawConfig, base: Option<RunConfig>) -> Result<RunConfig, CliError> {
    let prior = base.as_ref().map(|b| b.base);
    let dot = raw.dot.unwrap_or_default();
    let epsilon = require(dot.epsilon.or(prior.map(|p| p.epsilon)), "dot.epsilon")?;
    let delta = require(dot.delta.or(prior.map(|p| p.delta)), "dot.delta")?;
    let g = require(dot.g.or(prior.map(|p| p.g)).or(Some(1.0)), "dot.g")?;

    let leads = raw.leads.unwrap_or_default();
    if let (Some(l), Some(r)) = (leads.mu_l, leads.mu_r) {
        if l != r {
            return Err(config_err(
                "leads.mu_r",
                "must equal leads.mu_l (common lead chemical potential)",
            ));
        }
    }
    let explicit_mu = leads.mu.or(leads.mu_l).or(leads.mu_r);
    if let (Some(m), Some(other)) = (leads.mu, leads.mu_l.or(leads.mu_r)) {
        if m != other {
            return Err(config_err("leads.mu_l", "must equal leads.mu"));
        }
    }
    let mu = require(explicit_mu.or(prior.map(|p| p.mu)), "leads.mu")?;
    let t_l = require(leads.t_l.or(prior.map(|p| p.t_l)), "leads.t_l")?;
    let (t_r, t_r_is_ratio) = match (leads.t_r, leads.t_r_ratio) {
        (Some(_), Some(_)) => {
            return Err(config_err(
                "leads.t_r_ratio",
                "give either t_r or t_r_ratio",
            ))
        }
        (Some(t), None) => (t, false),
        (None, Some(r)) => (r, true),
        (None, None) => {
            let p = require(prior, "leads.t_r")?;
            (p.t_r, p.t_r_is_ratio)
        }
    };
    let gamma = require(leads.gamma.or(prior.map(|p| p.gamma)), "leads.gamma")?;

    let measurement = parse_measurement(raw.measurement, prior.map(|p| p.measurement))?;

    let mut point = PointParams {
        epsilon,
        delta,
        g,
        mu,
        t_l,
        t_r,
        t_r_is_ratio,
        gamma,
        measurement,
    };

    let regime = raw
        .regime
        .or(base.as_ref().map(|b| b.regime))
        .unwrap_or_default();
    let sweep = match raw.sweep {
        Some(s) => {
            let axis1 = match s.axis1 {
                Some(a) => parse_axis(a, "sweep.axis1")?,
                None => return Err(config_err("sweep.axis1", "missing")),
            };
            let axis2 = s.axis2.map(|a| parse_axis(a, "sweep.axis2")).transpose()?;
            Some(Sweep { axis1, axis2 })
        }
        None => base.as_ref().and_then(|b| b.sweep),
    };
    if let Some(s) = &sweep {
        if let Some(a2) = s.axis2 {
            if a2.field == s.axis1.field {
                return Err(config_err(
                    "sweep.axis2.name",
                    "must differ from sweep.axis1.name",
                ));
            }
        }
        for (i, f) in s.fields().iter().enumerate() {
            let key = if i == 0 {
                "sweep.axis1.name"
            } else {
                "sweep.axis2.name"
            };
            if let Some(q) = f.needs_qpc() {
                if q != point.measurement.is_qpc() {
                    return Err(config_err(
                        key,
                        format!("`{}` does not apply to this measurement model", f.path()),
                    ));
                }
            }
            if *f == Field::TRRatio && !point.t_r_is_ratio {
                point.t_r /= point.t_l;
                point.t_r_is_ratio = true;
            }
        }
    }

    let out = raw.output.unwrap_or_default();
    let tol_raw = raw.tolerance.unwrap_or_default();
    let prior_tol = base.as_ref().map(|b| b.tolerance).unwrap_or_default();
    let tolerance = Tolerance {
        rel: tol_raw.rel.unwrap_or(prior_tol.rel),
        abs: tol_raw.abs.unwrap_or(prior_tol.abs),
        max_subdivisions: tol_raw
            .max_subdivisions
            .unwrap_or(prior_tol.max_subdivisions),
    };
    if !(tolerance.rel > 0.0 && tolerance.abs > 0.0 && tolerance.max_subdivisions > 0) {
        return Err(config_err(
            "tolerance",
            "rel, abs and max_subdivisions must be > 0",
        ));
    }

    let cfg = RunConfig {
        base: point,
        regime,
        sweep,
        output_path: out
            .path
            .or(base.as_ref().and_then(|b| b.output_path.clone())),
        format: out
            .format
            .or(base.as_ref().map(|b| b.format))
            .unwrap_or_default(),
        tolerance,
        notes: base.map(|b| b.notes).unwrap_or_default(),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn parse_measurement(
    raw: Option<RawMeasurement>,
    prior: Option<Measurement>,
) -> Result<Measurement, CliError> {
    let raw = raw.unwrap_or_default();
    let model = match raw.model.as_deref() {
        Some("ideal") => "ideal",
        Some("qpc") => "qpc",
        Some(other) => {
            return Err(config_err(
                "measurement.model",
                format!("unknown model `{other}` (ideal | qpc)"),
            ))
        }
        None => match prior {
            Some(Measurement::Qpc { .. }) => "qpc",
            Some(Measurement::Ideal { .. }) => "ideal",
            None if raw.t0.is_some() || raw.mu_m.is_some() => "qpc",
            None => "ideal",
        },
    };
    match model {
        "ideal" => {
            for (v, name) in [
                (raw.t0, "t0"),
                (raw.t1, "t1"),
                (raw.mu_m, "mu_m"),
                (raw.t_m, "t_m"),
            ] {
                if v.is_some() {
                    return Err(config_err(
                        &format!("measurement.{name}"),
                        "only valid for model = \"qpc\"",
                    ));
                }
            }
            let prior_gm = match prior {
                Some(Measurement::Ideal { gamma_m }) => Some(gamma_m),
                _ => None,
            };
            Ok(Measurement::Ideal {
                gamma_m: require(raw.gamma_m.or(prior_gm), "measurement.gamma_m")?,
            })
        }
        _ => {
            if raw.gamma_m.is_some() {
                return Err(config_err(
                    "measurement.gamma_m",
                    "only valid for model = \"ideal\"",
                ));
            }
            let prior_q = match prior {
                Some(Measurement::Qpc {
                    t0,
                    t1,
                    mu_m,
                    t_m,
                    calibration,
                }) => Some((t0, t1, mu_m, t_m, calibration)),
                _ => None,
            };
            let t0 = require(raw.t0.or(prior_q.map(|q| q.0)), "measurement.t0")?;
            let mu_m = require(raw.mu_m.or(prior_q.map(|q| q.2)), "measurement.mu_m")?;
            let t_m = require(raw.t_m.or(prior_q.map(|q| q.3)), "measurement.t_m")?;
            let (t1, calibration) = match (raw.t1, raw.calibrate) {
                (Some(_), Some(_)) => {
                    return Err(config_err(
                        "measurement.calibrate",
                        "give either t1 or calibrate",
                    ))
                }
                (Some(t1), None) => (t1, None),
                (None, Some(c)) => {
                    let cal = Calibration {
                        rate: c.rate,
                        mu_m: c.mu_m,
                        t_m: c.t_m,
                    };
                    let t1 = fridge_core::qpc::calibrate_t1(t0, cal.rate, cal.mu_m, cal.t_m)
                        .map_err(|e| config_err("measurement.calibrate", e.to_string()))?;
                    (t1, Some(cal))
                }
                (None, None) => match prior_q {
                    Some((p_t0, _, _, _, Some(cal)))
                        if raw.t0.is_some() && raw.t0 != Some(p_t0) =>
                    {
                        let t1 = fridge_core::qpc::calibrate_t1(t0, cal.rate, cal.mu_m, cal.t_m)
                            .map_err(|e| config_err("measurement.calibrate", e.to_string()))?;
                        (t1, Some(cal))
                    }
                    Some((_, t1, _, _, cal)) => (t1, cal),
                    None => {
                        return Err(config_err(
                            "measurement.t1",
                            "missing (or give [measurement.calibrate])",
                        ))
                    }
                },
            };
            Ok(Measurement::Qpc {
                t0,
                t1,
                mu_m,
                t_m,
                calibration,
            })
        }
    }
}

fn parse_axis(raw: RawAxis, key: &str) -> Result<Axis, CliError> {
    let field = Field::from_path(&raw.name).ok_or_else(|| {
        let names: Vec<&str> = Field::ALL.iter().map(Field::path).collect();
        config_err(
            &format!("{key}.name"),
            format!("unknown field `{}` (one of {})", raw.name, names.join(", ")),
        )
    })?;
    if raw.points < 2 {
        return Err(config_err(&format!("{key}.points"), "must be >= 2"));
    }
    if !(raw.from.is_finite() && raw.to.is_finite()) {
        return Err(config_err(&format!("{key}.from"), "must be finite"));
    }
    if raw.from >= raw.to {
        return Err(config_err(&format!("{key}.to"), "must be > from"));
    }
    if raw.scale == Scale::Log && raw.from <= 0.0 {
        return Err(config_err(
            &format!("{key}.from"),
            "must be > 0 for a log axis",
        ));
    }
    Ok(Axis {
        field,
        from: raw.from,
        to: raw.to,
        points: raw.points,
        scale: raw.scale,
    })
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let swept = cfg.sweep.map(|s| s.fields()).unwrap_or_default();
    let check = |field: Field, value: f64, positive: bool| -> Result<(), CliError> {
        if swept.contains(&field) {
            return Ok(());
        }
        if !value.is_finite() {
            return Err(config_err(field.path(), "must be finite"));
        }
        if positive && value <= 0.0 {
            return Err(config_err(field.path(), "must be > 0"));
        }
        Ok(())
    };
    let p = &cfg.base;
    check(Field::Epsilon, p.epsilon, false)?;
    check(Field::Delta, p.delta, false)?;
    check(Field::G, p.g, true)?;
    check(Field::Mu, p.mu, false)?;
    check(Field::TL, p.t_l, true)?;
    let tr_field = if p.t_r_is_ratio {
        Field::TRRatio
    } else {
        Field::TR
    };
    check(tr_field, p.t_r, true)?;
    check(Field::Gamma, p.gamma, true)?;
    match p.measurement {
        Measurement::Ideal { gamma_m } => {
            if !swept.contains(&Field::GammaM) && !(gamma_m >= 0.0 && gamma_m.is_finite()) {
                return Err(config_err("measurement.gamma_m", "must be >= 0"));
            }
        }
        Measurement::Qpc {
            t0, t1, mu_m, t_m, ..
        } => {
            check(Field::T0, t0, true)?;
            check(Field::TM, t_m, true)?;
            if !swept.contains(&Field::T0) && t0 > 1.0 {
                return Err(config_err("measurement.t0", "must be <= 1"));
            }
            if !swept.contains(&Field::T1) && !(0.0..=t0).contains(&t1) {
                return Err(config_err("measurement.t1", "must lie in [0, t0]"));
            }
            if !swept.contains(&Field::MuM) && !(mu_m >= 0.0 && mu_m.is_finite()) {
                return Err(config_err("measurement.mu_m", "must be >= 0"));
            }
        }
    }
    if cfg.regime == Regime::Local && p.measurement.is_qpc() {
        return Err(config_err(
            "regime",
            "the local regime supports only model = \"ideal\"",
        ));
    }
    Ok(())
}
