use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use laxlab_core::charges::{
    akns_build, closed_form_density, densities_text, drift_statistics, phase_pattern_probe, render_diff, ChargeProbe,
    MonodromyProbe,
};
use laxlab_core::continuity::{continuity_block, growth_law_check};
use laxlab_core::dynamics::{simulate, CflPolicy, Probe, Simulation, SimulationSettings};
use laxlab_core::fields::{write_snapshot_csv, FieldState};
use laxlab_core::gauge::verify_gauge_lemma;
use laxlab_core::lax::{curvature_report, SIGN_FLIPPED_PAIR, STANDARD_PAIR};
use laxlab_core::verify::{run_verify, VerifySettings};
use laxlab_core::C64;
use log::info;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] laxlab_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Core(laxlab_core::Error::NumericalBlowup { .. }) => EXIT_BLOWUP,
            _ => EXIT_FAILURE,
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

/// What a subcommand produced: files written and whether all checks held.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.display().to_string(), source }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> RunResult<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(path)
}

fn header(cfg: &ScenarioConfig) -> String {
    let p = &cfg.params;
    format!(
        "seed = {}\ntheta0 = {}\nparams: m_s = {}, m_f = {}, beta = {}, g = {}, lambda = {}, mu = {}\ngrid: n = {}, length = {}, stencil = {:?}\n",
        cfg.seed, p.theta0, p.m_s, p.m_f, p.beta, p.g, p.lambda, p.mu, cfg.grid.n, cfg.grid.length, cfg.grid.stencil
    )
}

pub fn verify(cfg: &ScenarioConfig, inject_sign_error: bool) -> RunResult<Outcome> {
    info!("verify: seed = {}", cfg.seed);
    let pair = if inject_sign_error { SIGN_FLIPPED_PAIR } else { STANDARD_PAIR };
    let settings = VerifySettings { pair, ..VerifySettings::new(cfg.seed, cfg.params) };
    let report = run_verify(&settings)?;
    print!("{}", report.text);
    let path = write_file(&cfg.output_dir, "verify_report.txt", report.text.as_bytes())?;
    Ok(Outcome { files: vec![path], passed: report.passed() })
}

fn initial_state(cfg: &ScenarioConfig) -> FieldState {
    cfg.initial.condition().build(&cfg.grid)
}

fn column_series(sim: &Simulation, re: &str, im: &str) -> Option<Vec<C64>> {
    let base = laxlab_core::dynamics::BASE_COLUMNS.len();
    let col = |name: &str| sim.columns.iter().position(|c| c == name).map(|k| k - base);
    let (r, i) = (col(re)?, col(im)?);
    Some(sim.records.iter().map(|rec| C64::new(rec.extra[r], rec.extra[i])).collect())
}

pub fn simulate_run(cfg: &ScenarioConfig) -> RunResult<Outcome> {
    info!("simulate: seed = {}, theta0 = {}, steps = {}", cfg.seed, cfg.params.theta0, cfg.n_steps());
    let p = &cfg.params;
    let spec = &cfg.grid;
    let obs = &cfg.observers;
    let mut probes: Vec<Box<dyn Probe>> = Vec::new();
    if obs.charges_n_max > 0 {
        let series = akns_build(p, obs.charges_n_max)?;
        probes.push(Box::new(ChargeProbe::from_series(&series, obs.fermion_substitution)));
    }
    if !obs.monodromy_zetas.is_empty() {
        probes.push(Box::new(MonodromyProbe::new(obs.monodromy_zetas.clone(), obs.connection)));
    }
    let settings = SimulationSettings {
        dt: cfg.dt,
        n_steps: cfg.n_steps(),
        observer_stride: cfg.observer_stride,
        cfl: if cfg.allow_cfl_violation { CflPolicy::Warn } else { CflPolicy::Error },
    };
    let sim = simulate(&initial_state(cfg), p, spec, &settings, &mut probes)?;

    let mut csv = Vec::new();
    sim.write_csv(&mut csv).expect("writing to memory");
    let mut snapshot = Vec::new();
    write_snapshot_csv(&sim.final_state, spec, &mut snapshot).expect("writing to memory");

    let mut report = header(cfg);
    let _ = writeln!(
        report,
        "t_end = {}\nsteps = {}\nconnection = {}",
        sim.final_state.t,
        cfg.n_steps(),
        obs.connection.name()
    );
    let numbers: Vec<C64> = sim.records.iter().map(|r| C64::new(r.n_total, 0.0)).collect();
    let n_drift = drift_statistics(&numbers)?;
    let _ = writeln!(report, "number_drift_rel_max = {:.6e}", n_drift.max_rel);
    let single = obs.monodromy_zetas.len() == 1;
    for (k, z) in obs.monodromy_zetas.iter().enumerate() {
        let suffix = if single { String::new() } else { format!("_z{k}") };
        if let Some(series) = column_series(&sim, &format!("re_trT{suffix}"), &format!("im_trT{suffix}")) {
            let d = drift_statistics(&series)?;
            let _ = writeln!(
                report,
                "trace_drift{suffix} (zeta = {} {:+}i): max_abs = {:.6e} max_rel = {:.6e} final_rel = {:.6e}",
                z.re, z.im, d.max_abs, d.max_rel, d.final_rel
            );
        }
    }
    if obs.continuity {
        let growth = if sim.records.len() >= 3 { Some(growth_law_check(&sim.records, p)?) } else { None };
        report.push_str(&continuity_block(&sim.final_state, p, spec, growth.as_ref())?);
    }
    report.push_str(&static_diagnostics(cfg, &sim.final_state)?);

    let dir = &cfg.output_dir;
    let files = vec![
        write_file(dir, "timeseries.csv", &csv)?,
        write_file(dir, "final_state.csv", &snapshot)?,
        write_file(dir, "report.txt", report.as_bytes())?,
    ];
    Ok(Outcome { files, passed: true })
}

/// Curvature summary and gauge-lemma defect on one snapshot.
fn static_diagnostics(cfg: &ScenarioConfig, state: &FieldState) -> RunResult<String> {
    let mut s = String::new();
    let (p, spec, obs) = (&cfg.params, &cfg.grid, &cfg.observers);
    if !obs.curvature_zetas.is_empty() {
        let r = curvature_report(state, p, spec, &obs.curvature_zetas, cfg.time_derivative())?;
        s.push_str(&r.summary());
    }
    if obs.gauge_check {
        let mut worst: f64 = 0.0;
        let zetas = if obs.curvature_zetas.is_empty() { vec![C64::new(1.0, 0.0)] } else { obs.curvature_zetas.clone() };
        for z in zetas {
            worst = worst.max(verify_gauge_lemma(state, p, spec, z)?);
        }
        let _ = writeln!(s, "gauge_lemma_defect = {worst:.6e}");
    }
    Ok(s)
}

/// `densities_theta45.txt` for θ₀ = π/4.
pub fn densities_file_name(theta0: f64) -> String {
    format!("densities_theta{:02}.txt", theta0.to_degrees().round() as u32)
}

pub fn charges(cfg: &ScenarioConfig) -> RunResult<Outcome> {
    let p = &cfg.params;
    let n_max = cfg.observers.charges_n_max.max(1);
    info!("charges: seed = {}, n_max = {n_max}", cfg.seed);
    let series = akns_build(p, n_max)?;
    let mut text = densities_text(&series);
    for n in 1..=n_max.min(3) {
        let _ = writeln!(text, "rho_{n} recursion vs closed form:");
        text.push_str(&render_diff(&series.rho[n - 1], &closed_form_density(n, p)?));
    }
    if p.theta0 > 0.0 {
        let phases = phase_pattern_probe(n_max.max(2), p.lambda, p.mu, p.beta, p.theta0, cfg.seed)?;
        let _ = writeln!(text, "density phases (measured | overall-phase law -(n-1)theta0/2):");
        for m in &phases {
            let _ = writeln!(text, "  rho_{}: {:+.12e} | {:+.12e}", m.n, m.measured, m.predicted_overall);
        }
    }
    let mut probe = ChargeProbe::from_series(&series, cfg.observers.fermion_substitution);
    let values = probe.sample(&initial_state(cfg), p, &cfg.grid)?;
    let _ = writeln!(text, "charges on the initial state:");
    for (n, pair) in values.chunks(2).enumerate() {
        let _ = writeln!(text, "  I{} = {:+.12e} {:+.12e}i", n + 1, pair[0], pair[1]);
    }
    print!("{text}");
    let path = write_file(&cfg.output_dir, &densities_file_name(p.theta0), text.as_bytes())?;
    Ok(Outcome { files: vec![path], passed: true })
}

/// Static diagnostics on the initial state: `curvature.csv` and
/// `diagnostics.txt`.
pub fn report(cfg: &ScenarioConfig) -> RunResult<Outcome> {
    let state = initial_state(cfg);
    let (p, spec) = (&cfg.params, &cfg.grid);
    let mut files = Vec::new();
    let mut text = header(cfg);
    if !cfg.observers.curvature_zetas.is_empty() {
        let r = curvature_report(&state, p, spec, &cfg.observers.curvature_zetas, cfg.time_derivative())?;
        let mut csv = Vec::new();
        r.write_csv(spec, &mut csv).expect("writing to memory");
        files.push(write_file(&cfg.output_dir, "curvature.csv", &csv)?);
    }
    text.push_str(&continuity_block(&state, p, spec, None)?);
    text.push_str(&static_diagnostics(cfg, &state)?);
    print!("{text}");
    files.push(write_file(&cfg.output_dir, "diagnostics.txt", text.as_bytes())?);
    Ok(Outcome { files, passed: true })
}
