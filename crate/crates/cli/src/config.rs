//! Scenario files: TOML with sections `[params] [grid] [time] [initial]
//! [observers] [output]` plus a top-level `seed`.
//!
//! Parsing is two-stage. The file is read into `Raw*` structs where every key
//! is optional, command-line overrides are written into that raw form, and
//! only then is everything validated into a [`ScenarioConfig`]. Validation
//! errors name the offending key as `section.key`.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use laxlab_core::charges::Connection;
use laxlab_core::dynamics::{InitialCondition, ScalarProfile, SpinorProfile, CFL_LIMIT};
use laxlab_core::fields::{GridSpec, ModelParams, Stencil};
use laxlab_core::lax::TimeDerivative;
use laxlab_core::sl2::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation { key: key.to_string(), reason: reason.into() }
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: RawParams,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub time: RawTime,
    #[serde(default)]
    pub initial: RawInitial,
    #[serde(default)]
    pub observers: RawObservers,
    #[serde(default)]
    pub output: RawOutput,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stencil: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawTime {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observer_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_cfl_violation: Option<bool>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minus_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_width: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawObservers {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charges_n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fermion_substitution: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monodromy_zetas: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_zetas: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_check: Option<bool>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

/// How the curvature observer obtains time derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureMode {
    Analytic,
    /// RK4 probe steps of size `dt`.
    FdTime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialPreset {
    Vacuum,
    /// Gaussian spinor packet, optionally on a Gaussian scalar bump.
    Packet {
        amplitude: f64,
        center: f64,
        width: f64,
        momentum: f64,
        minus_fraction: f64,
        scalar_amplitude: f64,
        scalar_width: f64,
    },
    /// Homogeneous static φ with `ψ₊ = ψ₋`.
    Constrained {
        phi0: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Scalar Gaussian at rest, no fermions.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

impl InitialPreset {
    pub fn name(&self) -> &'static str {
        match self {
            InitialPreset::Vacuum => "vacuum",
            InitialPreset::Packet { .. } => "packet",
            InitialPreset::Constrained { .. } => "constrained",
            InitialPreset::Gaussian { .. } => "gaussian",
        }
    }

    pub fn condition(&self) -> InitialCondition {
        match *self {
            InitialPreset::Vacuum => InitialCondition::vacuum(),
            InitialPreset::Packet {
                amplitude,
                center,
                width,
                momentum,
                minus_fraction,
                scalar_amplitude,
                scalar_width,
            } => InitialCondition {
                scalar: if scalar_amplitude == 0.0 {
                    ScalarProfile::Zero
                } else {
                    ScalarProfile::Gaussian { amplitude: scalar_amplitude, center, width: scalar_width }
                },
                spinor: SpinorProfile::Packet { amplitude, center, width, momentum, minus_fraction },
            },
            InitialPreset::Constrained { phi0, amplitude, center, width } => {
                InitialCondition::constrained(phi0, amplitude, center, width)
            }
            InitialPreset::Gaussian { amplitude, center, width } => InitialCondition {
                scalar: ScalarProfile::Gaussian { amplitude, center, width },
                spinor: SpinorProfile::None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observers {
    /// 0 disables the charge columns.
    pub charges_n_max: usize,
    pub fermion_substitution: bool,
    pub monodromy_zetas: Vec<C64>,
    pub connection: Connection,
    pub curvature_zetas: Vec<C64>,
    pub curvature_mode: CurvatureMode,
    pub continuity: bool,
    pub gauge_check: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub observer_stride: usize,
    pub allow_cfl_violation: bool,
    pub initial: InitialPreset,
    pub observers: Observers,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn n_steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }

    pub fn time_derivative(&self) -> TimeDerivative {
        match self.observers.curvature_mode {
            CurvatureMode::Analytic => TimeDerivative::Analytic,
            CurvatureMode::FdTime => TimeDerivative::FdTime { dt_probe: self.dt },
        }
    }
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUTPUT_DIR: &str = "laxlab_out";
pub const DEFAULT_OBSERVER_STRIDE: usize = 10;
pub const DEFAULT_CHARGES_N_MAX: usize = 3;

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub theta0: Option<f64>,
    pub seed: Option<u64>,
    pub n_max: Option<usize>,
    pub output_dir: Option<String>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, raw: &mut RawConfig) {
        if let Some(v) = self.theta0 {
            raw.params.theta0 = Some(v);
        }
        if let Some(v) = self.seed {
            raw.seed = Some(v);
        }
        if let Some(v) = self.n_max {
            raw.observers.charges_n_max = Some(v);
        }
        if let Some(v) = &self.output_dir {
            raw.output.dir = Some(v.clone());
        }
        if let Some(v) = self.dt {
            raw.time.dt = Some(v);
        }
        if let Some(v) = self.t_end {
            raw.time.t_end = Some(v);
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_with_overrides(text, &Overrides::default())
}

pub fn parse_with_overrides(text: &str, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let mut raw = parse_raw(text)?;
    overrides.apply(&mut raw);
    validate(&raw)
}

pub fn load(path: &std::path::Path, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_with_overrides(&text, overrides)
}

fn required<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| invalid(key, "required key is missing"))
}

fn finite(v: f64, key: &str) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be a finite number"))
    }
}

fn positive(v: f64, key: &str) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn zetas(list: &[[f64; 2]], key: &str) -> Result<Vec<C64>, ConfigError> {
    list.iter()
        .map(|&[re, im]| {
            let z = C64::new(finite(re, key)?, finite(im, key)?);
            if z == C64::new(0.0, 0.0) {
                Err(invalid(key, "spectral parameter must be non-zero"))
            } else {
                Ok(z)
            }
        })
        .collect()
}

fn validate_params(raw: &RawParams) -> Result<ModelParams, ConfigError> {
    let m_s = positive(required(raw.m_s, "params.m_s")?, "params.m_s")?;
    let beta = positive(required(raw.beta, "params.beta")?, "params.beta")?;
    let m_f = finite(raw.m_f.unwrap_or(1.0), "params.m_f")?;
    if m_f < 0.0 {
        return Err(invalid("params.m_f", format!("must be non-negative, got {m_f}")));
    }
    let g = finite(raw.g.unwrap_or(0.0), "params.g")?;
    let theta0 = finite(raw.theta0.unwrap_or(0.0), "params.theta0")?;
    let bound = FRAC_PI_2 + laxlab_core::fields::THETA_ENDPOINT_SNAP;
    if !(-laxlab_core::fields::THETA_ENDPOINT_SNAP..=bound).contains(&theta0) {
        return Err(invalid("params.theta0", format!("{theta0} is outside [0, pi/2]")));
    }
    let lambda = positive(raw.lambda.unwrap_or(m_s / beta), "params.lambda")?;
    let mu = positive(raw.mu.unwrap_or(m_s / beta), "params.mu")?;
    ModelParams::with_lambda_mu(m_s, m_f, beta, g, theta0, lambda, mu).map_err(|e| invalid("params", e.to_string()))
}

fn validate_grid(raw: &RawGrid) -> Result<GridSpec, ConfigError> {
    let n = required(raw.n, "grid.n")?;
    let length = positive(required(raw.length, "grid.length")?, "grid.length")?;
    let stencil = match raw.stencil.as_deref().unwrap_or("second") {
        "second" => Stencil::Second,
        "fourth" => Stencil::Fourth,
        other => return Err(invalid("grid.stencil", format!("expected \"second\" or \"fourth\", got {other:?}"))),
    };
    GridSpec::new(n, length).map(|g| g.with_stencil(stencil)).map_err(|e| invalid("grid.n", e.to_string()))
}

fn validate_initial(raw: &RawInitial, length: f64) -> Result<InitialPreset, ConfigError> {
    let preset = raw.preset.as_deref().unwrap_or("vacuum");
    let allowed: &[&str] = match preset {
        "vacuum" => &[],
        "packet" => &["amplitude", "center", "width", "momentum", "minus_fraction", "scalar_amplitude", "scalar_width"],
        "constrained" => &["phi0", "amplitude", "center", "width"],
        "gaussian" => &["amplitude", "center", "width"],
        other => {
            return Err(invalid(
                "initial.preset",
                format!("unknown preset {other:?}; expected vacuum, packet, constrained or gaussian"),
            ))
        }
    };
    let present = [
        ("amplitude", raw.amplitude),
        ("center", raw.center),
        ("width", raw.width),
        ("momentum", raw.momentum),
        ("minus_fraction", raw.minus_fraction),
        ("phi0", raw.phi0),
        ("scalar_amplitude", raw.scalar_amplitude),
        ("scalar_width", raw.scalar_width),
    ];
    for (key, value) in present {
        if let Some(v) = value {
            let full = format!("initial.{key}");
            if !allowed.contains(&key) {
                return Err(invalid(&full, format!("not used by preset {preset:?}")));
            }
            finite(v, &full)?;
        }
    }
    let amplitude = raw.amplitude.unwrap_or(1.0);
    let center = raw.center.unwrap_or(0.5 * length);
    let width = positive(raw.width.unwrap_or(1.0), "initial.width")?;
    Ok(match preset {
        "vacuum" => InitialPreset::Vacuum,
        "packet" => InitialPreset::Packet {
            amplitude,
            center,
            width,
            momentum: raw.momentum.unwrap_or(0.0),
            minus_fraction: raw.minus_fraction.unwrap_or(0.0),
            scalar_amplitude: raw.scalar_amplitude.unwrap_or(0.0),
            scalar_width: positive(raw.scalar_width.unwrap_or(1.0), "initial.scalar_width")?,
        },
        "constrained" => InitialPreset::Constrained { phi0: raw.phi0.unwrap_or(0.0), amplitude, center, width },
        _ => InitialPreset::Gaussian { amplitude, center, width },
    })
}

fn validate_observers(raw: &RawObservers) -> Result<Observers, ConfigError> {
    let one = [[1.0, 0.0]];
    let connection = match raw.connection.as_deref() {
        None => Connection::default(),
        Some(s) => Connection::parse(s)
            .ok_or_else(|| invalid("observers.connection", format!("expected \"a_x\" or \"a_plus\", got {s:?}")))?,
    };
    let curvature_mode = match raw.curvature_mode.as_deref().unwrap_or("analytic") {
        "analytic" => CurvatureMode::Analytic,
        "fd_time" => CurvatureMode::FdTime,
        other => {
            return Err(invalid(
                "observers.curvature_mode",
                format!("expected \"analytic\" or \"fd_time\", got {other:?}"),
            ))
        }
    };
    Ok(Observers {
        charges_n_max: raw.charges_n_max.unwrap_or(DEFAULT_CHARGES_N_MAX),
        fermion_substitution: raw.fermion_substitution.unwrap_or(true),
        monodromy_zetas: zetas(raw.monodromy_zetas.as_deref().unwrap_or(&one), "observers.monodromy_zetas")?,
        connection,
        curvature_zetas: zetas(raw.curvature_zetas.as_deref().unwrap_or(&one), "observers.curvature_zetas")?,
        curvature_mode,
        continuity: raw.continuity.unwrap_or(true),
        gauge_check: raw.gauge_check.unwrap_or(true),
    })
}

pub fn validate(raw: &RawConfig) -> Result<ScenarioConfig, ConfigError> {
    let params = validate_params(&raw.params)?;
    let grid = validate_grid(&raw.grid)?;
    let dt = positive(required(raw.time.dt, "time.dt")?, "time.dt")?;
    let t_end = positive(required(raw.time.t_end, "time.t_end")?, "time.t_end")?;
    let allow_cfl_violation = raw.time.allow_cfl_violation.unwrap_or(false);
    let limit = CFL_LIMIT * grid.dx();
    if dt > limit && !allow_cfl_violation {
        return Err(invalid(
            "time.dt",
            format!("{dt} exceeds the CFL bound {limit:.6e} (set time.allow_cfl_violation = true to override)"),
        ));
    }
    let observer_stride = raw.time.observer_stride.unwrap_or(DEFAULT_OBSERVER_STRIDE);
    if observer_stride == 0 {
        return Err(invalid("time.observer_stride", "must be at least 1"));
    }
    Ok(ScenarioConfig {
        params,
        grid,
        dt,
        t_end,
        observer_stride,
        allow_cfl_violation,
        initial: validate_initial(&raw.initial, grid.length)?,
        observers: validate_observers(&raw.observers)?,
        output_dir: PathBuf::from(raw.output.dir.clone().unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_string())),
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
    })
}

/// Fully explicit raw form of a validated config.
pub fn to_raw(c: &ScenarioConfig) -> RawConfig {
    let p = &c.params;
    let pairs = |zs: &[C64]| zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let mut initial = RawInitial { preset: Some(c.initial.name().to_string()), ..Default::default() };
    match c.initial {
        InitialPreset::Vacuum => {}
        InitialPreset::Packet {
            amplitude,
            center,
            width,
            momentum,
            minus_fraction,
            scalar_amplitude,
            scalar_width,
        } => {
            initial.amplitude = Some(amplitude);
            initial.center = Some(center);
            initial.width = Some(width);
            initial.momentum = Some(momentum);
            initial.minus_fraction = Some(minus_fraction);
            initial.scalar_amplitude = Some(scalar_amplitude);
            initial.scalar_width = Some(scalar_width);
        }
        InitialPreset::Constrained { phi0, amplitude, center, width } => {
            initial.phi0 = Some(phi0);
            initial.amplitude = Some(amplitude);
            initial.center = Some(center);
            initial.width = Some(width);
        }
        InitialPreset::Gaussian { amplitude, center, width } => {
            initial.amplitude = Some(amplitude);
            initial.center = Some(center);
            initial.width = Some(width);
        }
    }
    RawConfig {
        seed: Some(c.seed),
        params: RawParams {
            m_s: Some(p.m_s),
            m_f: Some(p.m_f),
            beta: Some(p.beta),
            g: Some(p.g),
            theta0: Some(p.theta0),
            lambda: Some(p.lambda),
            mu: Some(p.mu),
        },
        grid: RawGrid {
            n: Some(c.grid.n),
            length: Some(c.grid.length),
            stencil: Some(match c.grid.stencil {
                Stencil::Second => "second".into(),
                Stencil::Fourth => "fourth".into(),
            }),
        },
        time: RawTime {
            dt: Some(c.dt),
            t_end: Some(c.t_end),
            observer_stride: Some(c.observer_stride),
            allow_cfl_violation: Some(c.allow_cfl_violation),
        },
        initial,
        observers: RawObservers {
            charges_n_max: Some(c.observers.charges_n_max),
            fermion_substitution: Some(c.observers.fermion_substitution),
            monodromy_zetas: Some(pairs(&c.observers.monodromy_zetas)),
            connection: Some(c.observers.connection.name().to_string()),
            curvature_zetas: Some(pairs(&c.observers.curvature_zetas)),
            curvature_mode: Some(
                match c.observers.curvature_mode {
                    CurvatureMode::Analytic => "analytic",
                    CurvatureMode::FdTime => "fd_time",
                }
                .into(),
            ),
            continuity: Some(c.observers.continuity),
            gauge_check: Some(c.observers.gauge_check),
        },
        output: RawOutput { dir: Some(c.output_dir.display().to_string()) },
    }
}

pub fn emit(c: &ScenarioConfig) -> String {
    toml::to_string(&to_raw(c)).expect("config is always representable as TOML")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[params]\nm_s = 2.0\nbeta = 0.5\n\n[grid]\nn = 64\nlength = 10.0\n\n[time]\ndt = 0.02\nt_end = 1.0\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.params.lambda, 4.0);
        assert_eq!(c.params.mu, 4.0);
        assert_eq!(c.params.m_f, 1.0);
        assert_eq!(c.params.g, 0.0);
        assert_eq!(c.params.theta0, 0.0);
        assert_eq!(c.grid.stencil, Stencil::Second);
        assert_eq!(c.initial, InitialPreset::Vacuum);
        assert_eq!(c.observers.charges_n_max, DEFAULT_CHARGES_N_MAX);
        assert_eq!(c.observers.connection, Connection::AX);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.n_steps(), 50);
    }

    #[test]
    fn theta_out_of_range_names_key() {
        let text = MINIMAL.replace("beta = 0.5", "beta = 0.5\ntheta0 = 2.0");
        match parse_config(&text) {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "params.theta0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_bad_keys() {
        let text = MINIMAL.replace("dt = 0.02\n", "");
        assert!(matches!(parse_config(&text), Err(ConfigError::Validation { key, .. }) if key == "time.dt"));
        let text = MINIMAL.replace("dt = 0.02", "dt = 0.2");
        assert!(matches!(parse_config(&text), Err(ConfigError::Validation { key, .. }) if key == "time.dt"));
        let text = MINIMAL.replace("dt = 0.02", "dt = 0.2\nallow_cfl_violation = true");
        assert!(parse_config(&text).is_ok());
        let text = format!("{MINIMAL}\n[initial]\npreset = \"vacuum\"\nphi0 = 1.0\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Validation { key, .. }) if key == "initial.phi0"));
        let text = format!("{MINIMAL}\n[observers]\nmonodromy_zetas = [[0.0, 0.0]]\n");
        assert!(
            matches!(parse_config(&text), Err(ConfigError::Validation { key, .. }) if key == "observers.monodromy_zetas")
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "[params]\nm_s = 1.0\nbeta = = 2\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse { line: 3, .. })));
        let text = "[params]\nm_s = 1.0\nbeta = 1.0\n[grid]\nn = 64\nlength = 10.0\nbogus = 1\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse { line: 7, .. })));
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let text = format!(
            "seed = 7\n{MINIMAL}\n[initial]\npreset = \"packet\"\namplitude = 0.5\nmomentum = 1.3\n\n[observers]\nmonodromy_zetas = [[1.0, 0.0], [0.5, -0.25]]\ncurvature_mode = \"fd_time\"\n\n[output]\ndir = \"runs/a\"\n"
        );
        let c = parse_config(&text).unwrap();
        let again = parse_config(&emit(&c)).unwrap();
        assert_eq!(c, again);
        assert_eq!(emit(&c), emit(&again));
        let d = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&emit(&d)).unwrap(), d);
    }

    #[test]
    fn overrides_take_precedence() {
        let text = MINIMAL.replace("beta = 0.5", "beta = 0.5\ntheta0 = 0.3");
        let o = Overrides { theta0: Some(0.7), n_max: Some(6), seed: Some(9), ..Default::default() };
        let c = parse_with_overrides(&text, &o).unwrap();
        assert_eq!(c.params.theta0, 0.7);
        assert_eq!(c.observers.charges_n_max, 6);
        assert_eq!(c.seed, 9);
        assert_eq!(parse_config(&text).unwrap().params.theta0, 0.3);
    }

    #[test]
    fn presets_build() {
        let text = format!("{MINIMAL}\n[initial]\npreset = \"constrained\"\nphi0 = 0.4\n");
        let c = parse_config(&text).unwrap();
        let s = c.initial.condition().build(&c.grid);
        assert!(s.phi.iter().all(|&v| v == 0.4));
        assert_eq!(s.psi_plus, s.psi_minus);
    }
}
