//! Point and grid evaluation.

use fridge_core::local::{local_flows_analytic, local_flows_numeric};
use fridge_core::noise::NOISE_CONVENTION_FACTOR;
use fridge_core::{
    DotParams, FridgeError, Leads, MeasurementModel, QpcParams, Refrigerator, Regime,
};
use rayon::prelude::*;

use crate::config::{Field, Measurement, PointParams, RunConfig};
use crate::error::CliError;
use crate::output::format_number;

/// What is computed at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Steady-state flows, plus detector noise when the detector is a QPC.
    Flows,
    /// Like `Flows` but requires a QPC detector.
    Noise,
    /// Closed-form local flows against the numerically solved local model.
    LocalCheck,
}

pub const FLOW_COLUMNS: [&str; 11] = [
    "j_l",
    "j_r",
    "e_dot_m",
    "p_m",
    "j_m",
    "xi",
    "eta_app",
    "eta_hybrid",
    "eta_carnot",
    "sigma",
    "first_law_residual",
];

pub const NOISE_COLUMNS: [&str; 5] = ["i_qpc", "a_qpc", "s_ii0", "delta_i", "snr"];

pub const LOCAL_COLUMNS: [&str; 9] = [
    "j_l_analytic",
    "j_l_numeric",
    "j_r_analytic",
    "j_r_numeric",
    "e_dot_m_analytic",
    "e_dot_m_numeric",
    "max_rel_error",
    "error_scale",
    "gamma_m_threshold",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// `ok` or `failed:<reason>`.
    pub status: String,
    pub axes: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub axis_columns: Vec<String>,
    pub value_columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn columns(&self) -> Vec<String> {
        std::iter::once("status".to_string())
            .chain(self.axis_columns.iter().cloned())
            .chain(self.value_columns.iter().cloned())
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }

    /// At least 99% of the points succeeded.
    pub fn acceptable(&self) -> bool {
        100 * (self.rows.len() - self.failures()) >= 99 * self.rows.len()
    }

    /// Values of a named column (axis or value); `None` for absent entries.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        if let Some(k) = self.axis_columns.iter().position(|c| c == name) {
            return Some(self.rows.iter().map(|r| Some(r.axes[k])).collect());
        }
        let k = self.value_columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r.values.get(k).copied().flatten())
                .collect(),
        )
    }
}

pub fn value_columns(cfg: &RunConfig, mode: Mode) -> Vec<String> {
    let names: Vec<&str> = match mode {
        Mode::LocalCheck => LOCAL_COLUMNS.to_vec(),
        _ if cfg.base.measurement.is_qpc() => FLOW_COLUMNS
            .iter()
            .chain(NOISE_COLUMNS.iter())
            .copied()
            .collect(),
        _ => FLOW_COLUMNS.to_vec(),
    };
    names.into_iter().map(String::from).collect()
}

fn check_mode(cfg: &RunConfig, mode: Mode) -> Result<(), CliError> {
    let err = |field: &str, reason: &str| CliError::Config {
        field: field.into(),
        reason: reason.into(),
    };
    match mode {
        Mode::Noise if !cfg.base.measurement.is_qpc() => {
            Err(err("measurement.model", "noise requires model = \"qpc\""))
        }
        Mode::LocalCheck if cfg.base.measurement.is_qpc() => Err(err(
            "measurement.model",
            "local-check requires model = \"ideal\"",
        )),
        _ => Ok(()),
    }
}

fn build(p: &PointParams, cfg: &RunConfig, regime: Regime) -> Result<Refrigerator, FridgeError> {
    let dot = DotParams::new(p.epsilon, p.delta, p.g)?;
    let leads = Leads::new(p.mu, p.t_l, p.t_r_absolute(), p.gamma)?;
    let measurement = match p.measurement {
        Measurement::Ideal { gamma_m } => MeasurementModel::Ideal { gamma_m },
        Measurement::Qpc {
            t0, t1, mu_m, t_m, ..
        } => MeasurementModel::Qpc(QpcParams::new(t0, t1, mu_m, t_m)?),
    };
    let mut fridge = Refrigerator::new(dot, leads, measurement).with_regime(regime);
    fridge.tolerance = cfg.tolerance;
    Ok(fridge)
}

/// Evaluates one parameter point; the values follow [`value_columns`].
pub fn evaluate(
    p: &PointParams,
    cfg: &RunConfig,
    mode: Mode,
) -> Result<Vec<Option<f64>>, FridgeError> {
    if mode == Mode::LocalCheck {
        return local_check(p, cfg);
    }
    let sol = build(p, cfg, cfg.regime)?.solve()?;
    let f = &sol.flows;
    let mut values = vec![
        Some(f.j_l),
        Some(f.j_r),
        Some(f.e_dot_m),
        Some(f.p_m),
        f.j_m,
        f.xi,
        f.eta_app,
        f.eta_hybrid,
        f.eta_carnot,
        f.sigma,
        Some(f.first_law_residual),
    ];
    if let Some(noise) = sol.noise() {
        let n = noise?;
        values.extend([
            Some(n.i_ss),
            Some(n.a_ss),
            Some(n.s_ii_0),
            Some(n.delta_i),
            Some(n.snr),
        ]);
    }
    Ok(values)
}

fn local_check(p: &PointParams, cfg: &RunConfig) -> Result<Vec<Option<f64>>, FridgeError> {
    let fridge = build(p, cfg, Regime::Local)?;
    let gamma_m = match p.measurement {
        Measurement::Ideal { gamma_m } => gamma_m,
        Measurement::Qpc { .. } => unreachable!("rejected by check_mode"),
    };
    let (left, right) = (&fridge.leads.left, &fridge.leads.right);
    let exact = local_flows_analytic(&fridge.dot, left, right, gamma_m)?;
    let (j_l, j_r, e_m) = local_flows_numeric(&fridge.dot, left, right, gamma_m)?;
    let scale = exact
        .j_l
        .abs()
        .max(exact.j_r.abs())
        .max(exact.e_dot_m.abs())
        .max(f64::MIN_POSITIVE);
    let err = [(exact.j_l, j_l), (exact.j_r, j_r), (exact.e_dot_m, e_m)]
        .iter()
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max);
    Ok(vec![
        Some(exact.j_l),
        Some(j_l),
        Some(exact.j_r),
        Some(j_r),
        Some(exact.e_dot_m),
        Some(e_m),
        Some(err),
        Some(exact.error_scale),
        exact.gamma_m_threshold,
    ])
}

/// Sweep grid in output order: axis2 outer, axis1 inner.
pub fn grid(cfg: &RunConfig) -> Vec<(Vec<f64>, PointParams)> {
    let Some(sweep) = cfg.sweep else {
        return vec![(Vec::new(), cfg.base)];
    };
    let inner = sweep.axis1.values();
    let outer: Vec<Option<f64>> = match sweep.axis2 {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::with_capacity(inner.len() * outer.len());
    for o in &outer {
        for &x in &inner {
            let mut p = cfg.base.with(sweep.axis1.field, x);
            let mut axes = vec![x];
            if let (Some(a2), Some(y)) = (sweep.axis2, o) {
                p = p.with(a2.field, *y);
                axes.push(*y);
            }
            points.push((axes, p));
        }
    }
    points
}

fn failure_reason(e: &FridgeError) -> String {
    let kind = match e {
        FridgeError::InvalidParameter { .. } => "invalid_parameter",
        FridgeError::NonUniqueSteadyState { .. } => "non_unique_steady_state",
        FridgeError::QuadratureFailure { .. } => "quadrature",
        FridgeError::Unstable(_) => "unstable",
        FridgeError::Structure { .. } => "structure",
        FridgeError::SignConditionViolated => "sign_condition",
    };
    let detail: String = e
        .to_string()
        .chars()
        .map(|c| {
            if matches!(c, ',' | '"' | '\n' | '\r') {
                ' '
            } else {
                c
            }
        })
        .collect();
    format!("failed:{kind} ({detail})")
}

pub fn metadata(cfg: &RunConfig, mode: Mode) -> Vec<(String, String)> {
    let p = &cfg.base;
    let mut m = vec![
        (
            "program".to_string(),
            format!("fridge-qpc {}", env!("CARGO_PKG_VERSION")),
        ),
        (
            "mode".to_string(),
            match mode {
                Mode::Flows => "flows",
                Mode::Noise => "noise",
                Mode::LocalCheck => "local-check",
            }
            .to_string(),
        ),
    ];
    m.extend(cfg.notes.iter().cloned());
    let regime = match (mode, cfg.regime) {
        (Mode::LocalCheck, _) | (_, Regime::Local) => "local",
        _ => "global",
    };
    m.push(("regime".into(), regime.into()));
    let mut put = |field: Field, v: f64| m.push((field.path().to_string(), format_number(v)));
    put(Field::Epsilon, p.epsilon);
    put(Field::Delta, p.delta);
    put(Field::G, p.g);
    put(Field::Mu, p.mu);
    put(Field::TL, p.t_l);
    if p.t_r_is_ratio {
        put(Field::TRRatio, p.t_r);
    } else {
        put(Field::TR, p.t_r);
    }
    put(Field::Gamma, p.gamma);
    match p.measurement {
        Measurement::Ideal { gamma_m } => {
            m.push(("measurement.model".into(), "ideal".into()));
            m.push((Field::GammaM.path().into(), format_number(gamma_m)));
        }
        Measurement::Qpc {
            t0,
            t1,
            mu_m,
            t_m,
            calibration,
        } => {
            m.push(("measurement.model".into(), "qpc".into()));
            for (f, v) in [
                (Field::T0, t0),
                (Field::T1, t1),
                (Field::MuM, mu_m),
                (Field::TM, t_m),
            ] {
                m.push((f.path().into(), format_number(v)));
            }
            if let Some(c) = calibration {
                m.push((
                    "measurement.calibrate".into(),
                    format!(
                        "rate={} mu_m={} t_m={}",
                        format_number(c.rate),
                        format_number(c.mu_m),
                        format_number(c.t_m)
                    ),
                ));
            }
            m.push((
                "noise_convention_factor".into(),
                format_number(NOISE_CONVENTION_FACTOR),
            ));
        }
    }
    if let Some(s) = cfg.sweep {
        for (k, a) in std::iter::once(Some(s.axis1))
            .chain(std::iter::once(s.axis2))
            .flatten()
            .enumerate()
        {
            m.push((
                format!("sweep.axis{}", k + 1),
                format!(
                    "{} {}..{} points={} scale={}",
                    a.field.path(),
                    format_number(a.from),
                    format_number(a.to),
                    a.points,
                    match a.scale {
                        crate::config::Scale::Linear => "linear",
                        crate::config::Scale::Log => "log",
                    }
                ),
            ));
        }
    }
    m.push((
        "tolerance".into(),
        format!(
            "rel={} abs={} max_subdivisions={}",
            format_number(cfg.tolerance.rel),
            format_number(cfg.tolerance.abs),
            cfg.tolerance.max_subdivisions
        ),
    ));
    m
}

/// Evaluates every grid point. Failed points become `failed:` rows.
///
/// `threads = None` uses the global rayon pool.
pub fn run(cfg: &RunConfig, mode: Mode, threads: Option<usize>) -> Result<Table, CliError> {
    check_mode(cfg, mode)?;
    let points = grid(cfg);
    let width = value_columns(cfg, mode).len();
    let eval = || -> Vec<Row> {
        points
            .par_iter()
            .map(|(axes, p)| match evaluate(p, cfg, mode) {
                Ok(values) => Row {
                    status: "ok".into(),
                    axes: axes.clone(),
                    values,
                },
                Err(e) => Row {
                    status: failure_reason(&e),
                    axes: axes.clone(),
                    values: vec![None; width],
                },
            })
            .collect()
    };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config {
                field: "threads".into(),
                reason: e.to_string(),
            })?
            .install(eval),
        None => eval(),
    };
    Ok(Table {
        metadata: metadata(cfg, mode),
        axis_columns: cfg
            .sweep
            .map(|s| s.fields().iter().map(|f| f.column().to_string()).collect())
            .unwrap_or_default(),
        value_columns: value_columns(cfg, mode),
        rows,
    })
}

/// Single point without a sweep; a failure is an error rather than a row.
pub fn run_point(cfg: &RunConfig, mode: Mode) -> Result<Table, CliError> {
    check_mode(cfg, mode)?;
    if cfg.sweep.is_some() {
        return Err(CliError::Config {
            field: "sweep".into(),
            reason: "not allowed for a single point".into(),
        });
    }
    let values = evaluate(&cfg.base, cfg, mode).map_err(|source| CliError::Numerical {
        point: describe(&cfg.base),
        source,
    })?;
    Ok(Table {
        metadata: metadata(cfg, mode),
        axis_columns: Vec::new(),
        value_columns: value_columns(cfg, mode),
        rows: vec![Row {
            status: "ok".into(),
            axes: Vec::new(),
            values,
        }],
    })
}

fn describe(p: &PointParams) -> String {
    let m = match p.measurement {
        Measurement::Ideal { gamma_m } => format!("gamma_m={gamma_m}"),
        Measurement::Qpc {
            t0, t1, mu_m, t_m, ..
        } => format!("t0={t0} t1={t1} mu_m={mu_m} t_m={t_m}"),
    };
    format!(
        "epsilon={} delta={} g={} mu={} t_l={} t_r={} gamma={} {m}",
        p.epsilon,
        p.delta,
        p.g,
        p.mu,
        p.t_l,
        p.t_r_absolute(),
        p.gamma
    )
}
