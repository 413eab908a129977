//! Seeded randomized identity suites with a deterministic text report.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charges::{akns_build, closed_form_density, phase_pattern_probe, render_diff, structurally_equal};
use crate::continuity::{continuity_residual, linf, ContinuityVariant, EXACT_VARIANT};
use crate::error::Result;
use crate::fields::{FieldState, GridSpec, ModelParams};
use crate::gauge::verify_gauge_lemma_with;
use crate::lax::{
    curvature_field, grade_zero_commutator_h, laurent_grade_split, LaxPair, TimeDerivative, STANDARD_PAIR,
};
use crate::sl2::C64;

pub const ENDPOINT_THETAS: [f64; 5] = [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2];

#[derive(Clone, Copy)]
pub struct VerifySettings {
    pub seed: u64,
    pub triples: usize,
    pub params: ModelParams,
    pub pair: LaxPair,
}

impl VerifySettings {
    pub fn new(seed: u64, params: ModelParams) -> Self {
        VerifySettings { seed, triples: 100, params, pair: STANDARD_PAIR }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub text: String,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A random nonzero spectral parameter with modulus in `[0.3, 3]`.
pub fn random_zeta(rng: &mut impl Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.3..=3.0), rng.gen_range(-PI..PI))
}

/// Max gauge-lemma defect over `count` random (state, θ₀, ζ) triples.
pub fn gauge_lemma_suite(seed: u64, count: usize, base: &ModelParams, pair: &LaxPair) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = GridSpec::new(32, 2.0 * PI)?;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let state = FieldState::random_smooth(&spec, &mut rng, 3, 0.5);
        let p = base.with_theta0(rng.gen_range(0.0..=FRAC_PI_2))?;
        let zeta = random_zeta(&mut rng);
        worst = worst.max(verify_gauge_lemma_with(&state, &p, &spec, zeta, pair)?);
    }
    Ok(worst)
}

/// Spread across θ₀ of the H-coefficient of `[A₊, A₋]` on fixed data.
pub fn theta_cancellation_spread(state: &FieldState, base: &ModelParams, spec: &GridSpec, zeta: C64) -> Result<f64> {
    let reference = grade_zero_commutator_h(state, &base.with_theta0(0.0)?, spec, zeta)?;
    let mut worst: f64 = 0.0;
    for theta in ENDPOINT_THETAS {
        let h = grade_zero_commutator_h(state, &base.with_theta0(theta)?, spec, zeta)?;
        for (a, b) in h.iter().zip(&reference) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Max entry of the vacuum curvature over the endpoint θ₀ set and
/// ζ ∈ {0.5, 1, 2, i}, with `λ = μ`.
pub fn vacuum_curvature_max(base: &ModelParams) -> Result<f64> {
    let spec = GridSpec::new(32, 2.0 * PI)?;
    let vac = FieldState::vacuum(&spec);
    let mut worst: f64 = 0.0;
    for theta in ENDPOINT_THETAS {
        let p = ModelParams { lambda: base.mu, ..base.with_theta0(theta)? };
        for zeta in [C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 1.0)] {
            let f = curvature_field(&vac, &p, &spec, zeta, TimeDerivative::Analytic)?;
            worst = worst.max(f.iter().map(|m| m.max_abs()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

fn record(
    checks: &mut Vec<CheckOutcome>,
    text: &mut String,
    name: &'static str,
    value: f64,
    tolerance: f64,
    above: bool,
) {
    let passed = if above { value > tolerance } else { value <= tolerance };
    let rel = if above { ">" } else { "<=" };
    let _ =
        writeln!(text, "{name} = {value:.6e}  (require {rel} {tolerance:.0e})  {}", if passed { "ok" } else { "FAIL" });
    checks.push(CheckOutcome { name, value, tolerance, passed });
}

pub fn run_verify(settings: &VerifySettings) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut text = String::new();
    let base = settings.params;
    let _ = writeln!(text, "seed = {}", settings.seed);
    let _ = writeln!(
        text,
        "params: m_s = {}, m_f = {}, beta = {}, g = {}, lambda = {}, mu = {}",
        base.m_s, base.m_f, base.beta, base.g, base.lambda, base.mu
    );

    let gauge = gauge_lemma_suite(settings.seed, settings.triples, &base, &settings.pair)?;
    record(&mut checks, &mut text, "gauge_lemma_defect", gauge, 1e-12, false);

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0x5eed);
    let spec = GridSpec::new(48, 2.0 * PI)?;
    let mut reassembly: f64 = 0.0;
    let mut cancellation: f64 = 0.0;
    for _ in 0..8 {
        let state = FieldState::random_smooth(&spec, &mut rng, 3, 0.5);
        let p = base.with_theta0(rng.gen_range(0.0..=FRAC_PI_2))?;
        let zeta = C64::new(3.0, 0.0);
        let split = laurent_grade_split(&state, &p, &spec, TimeDerivative::Analytic)?;
        let direct = curvature_field(&state, &p, &spec, zeta, TimeDerivative::Analytic)?;
        for (a, b) in split.reassemble(zeta).iter().zip(&direct) {
            reassembly = reassembly.max(a.max_abs_diff(b));
        }
        cancellation = cancellation.max(theta_cancellation_spread(&state, &base, &spec, random_zeta(&mut rng))?);
    }
    record(&mut checks, &mut text, "grade_split_reassembly_defect", reassembly, 1e-10, false);
    record(&mut checks, &mut text, "theta_cancellation_spread", cancellation, 1e-13, false);
    record(&mut checks, &mut text, "vacuum_curvature_max", vacuum_curvature_max(&base)?, 1e-13, false);

    let p0 = base.with_theta0(0.0)?;
    let series = akns_build(&p0, 3)?;
    let rho1_ok = structurally_equal(&series.rho[0], &closed_form_density(1, &p0)?);
    let rho2_ok = structurally_equal(&series.rho[1], &closed_form_density(2, &p0)?);
    record(&mut checks, &mut text, "akns_rho1_rho2_mismatches", (!rho1_ok as u8 + !rho2_ok as u8) as f64, 0.0, false);

    let theta_star = 0.6;
    let tilted = base.with_theta0(theta_star)?;
    let tilted_series = akns_build(&tilted, 3)?;
    let _ = writeln!(text, "rho_3 recursion vs printed form at theta0 = {theta_star}:");
    text.push_str(&render_diff(&tilted_series.rho[2], &closed_form_density(3, &tilted)?));

    let phases = phase_pattern_probe(4, base.lambda, base.mu, base.beta, theta_star, settings.seed)?;
    let _ = writeln!(text, "density phases at theta* = {theta_star} (measured | overall-phase law -(n-1)theta*/2):");
    for m in &phases {
        let _ = writeln!(text, "  rho_{}: {:+.12e} | {:+.12e}", m.n, m.measured, m.predicted_overall);
    }
    record(&mut checks, &mut text, "rho2_phase_error", (phases[1].measured + theta_star).abs(), 1e-10, false);

    let continuity_spec = |n| GridSpec::new(n, 2.0 * PI);
    let mut coarse_fine = [0.0; 2];
    let mut bilinear = 0.0;
    let mut crng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0xc0de);
    let coeffs: Vec<f64> = (0..8).map(|_| crng.gen_range(-0.5..=0.5)).collect();
    let p = base.with_theta0(FRAC_PI_4)?;
    for (slot, n) in [64usize, 128].into_iter().enumerate() {
        let spec = continuity_spec(n)?;
        let s = trig_state(&spec, &coeffs);
        coarse_fine[slot] = linf(&continuity_residual(&s, &p, &spec, EXACT_VARIANT)?);
        bilinear = linf(&continuity_residual(&s, &p, &spec, ContinuityVariant::Bilinear)?);
    }
    let order = (coarse_fine[0] / coarse_fine[1]).log2();
    let _ = writeln!(text, "continuity_bilinear_residual_Linf = {bilinear:.6e}");
    let _ = writeln!(text, "continuity_adjoint_residual_Linf = {:.6e}", coarse_fine[1]);
    record(&mut checks, &mut text, "continuity_adjoint_order_error", (order - 2.0).abs(), 0.3, false);

    let verdict = if checks.iter().all(|c| c.passed) { "PASS" } else { "FAIL" };
    let _ = writeln!(text, "verdict = {verdict}");
    Ok(VerifyReport { checks, text })
}

/// Smooth deterministic data with one Fourier mode per field component.
fn trig_state(spec: &GridSpec, c: &[f64]) -> FieldState {
    let k = 2.0 * PI / spec.length;
    FieldState::from_fn(
        spec,
        |x| c[0] * (k * x).sin() + c[1],
        |x| c[2] * (k * x).cos(),
        |x| C64::new(c[3] * (k * x).cos() + 0.3, c[4] * (2.0 * k * x).sin()),
        |x| C64::new(c[5] * (k * x).sin(), c[6] * (k * x).cos() + c[7]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::SIGN_FLIPPED_PAIR;

    fn base() -> ModelParams {
        ModelParams::with_lambda_mu(1.0, 0.8, 0.9, 0.4, 0.0, 1.2, 0.7).unwrap()
    }

    #[test]
    fn default_suite_passes_and_is_reproducible() {
        let s = VerifySettings::new(42, base());
        let a = run_verify(&s).unwrap();
        assert!(a.passed(), "{}", a.text);
        assert_eq!(a, run_verify(&s).unwrap());
        assert!(a.text.contains("gauge_lemma_defect = "));
        assert!(a.text.contains("MISMATCH"));
    }

    #[test]
    fn mutant_fails_gauge_check() {
        let s = VerifySettings { pair: SIGN_FLIPPED_PAIR, ..VerifySettings::new(42, base()) };
        let r = run_verify(&s).unwrap();
        assert!(!r.passed());
        assert!(r.check("gauge_lemma_defect").unwrap().value > 1e-6);
    }

    #[test]
    fn vacuum_is_flat_for_equal_couplings() {
        assert!(vacuum_curvature_max(&base()).unwrap() <= 1e-13);
    }
}
