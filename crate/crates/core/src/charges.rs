//! Conserved densities from the AKNS-type recursion, their evaluation on
//! field data, the monodromy matrix and conservation monitoring.
//!
//! With `κ = L = λe^{iθ₀/2}` and `R = μe^{−iθ₀/2}E[1]` the recursion is
//!
//! ```text
//! r₁     = R / (2κ)
//! r_{n+1} = −(1/2κ) [∂₊r_n + L Σ_{k=1}^{n−1} r_k r_{n−k}]
//! ρ_n    = L r_n
//! ```
//!
//! run symbolically in the jet ring of [`crate::jetcalc`].

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{rhs, Probe};
use crate::error::{Error, Result};
use crate::fields::{derivative, second_derivative, FieldState, GridSpec, ModelParams};
use crate::jetcalc::{d_plus, format_key, je_eval, JetExpr, MonomialKey};
use crate::lax::{bilinear_rate, curvature_field, LaxPair, LightconeFields, TimeDerivative, STANDARD_PAIR};
use crate::sl2::{mat_exp, Mat2, C64, I, ONE, ZERO};

/// Highest jet `u_k = ∂₊ᵏφ` reconstructible from a snapshot.
pub const MAX_JET_ORDER: u32 = 3;

/// Relative spread above which a θ₀-ratio is not a constant phase.
pub const PHASE_RATIO_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct AknsSeries {
    pub theta0: f64,
    pub kappa: C64,
    pub l: C64,
    pub r_seed: JetExpr,
    pub r: Vec<JetExpr>,
    pub rho: Vec<JetExpr>,
}

pub fn akns_build(p: &ModelParams, n_max: usize) -> Result<AknsSeries> {
    if n_max == 0 {
        return Err(Error::InvalidParameter { name: "n_max", reason: "must be at least 1".into() });
    }
    let kappa = p.phase(0.5) * p.lambda;
    let l = kappa;
    let r_seed = JetExpr::monomial(p.phase(-0.5) * p.mu, 1, &[]);
    let inv_two_kappa = (kappa * 2.0).inv();

    let mut r = vec![r_seed.scale(inv_two_kappa)];
    while r.len() < n_max {
        let n = r.len();
        let mut bracket = d_plus(&r[n - 1], p.beta);
        let mut quad = JetExpr::zero();
        for k in 1..n {
            quad = &quad + &(&r[k - 1] * &r[n - k - 1]);
        }
        bracket = &bracket + &quad.scale(l);
        r.push(bracket.scale(-inv_two_kappa));
    }
    let rho = r.iter().map(|rn| rn.scale(l)).collect();
    Ok(AknsSeries { theta0: p.theta0, kappa, l, r_seed, r, rho })
}

/// Literal transcriptions of the commonly quoted ρ₁, ρ₂, ρ₃.
pub fn closed_form_density(n: usize, p: &ModelParams) -> Result<JetExpr> {
    let (lam, mu, beta) = (p.lambda, p.mu, p.beta);
    match n {
        1 => Ok(JetExpr::monomial(C64::new(mu / 2.0, 0.0), 1, &[])),
        2 => Ok(JetExpr::monomial(-p.phase(-1.0) * (mu * beta / (4.0 * lam)), 1, &[(1, 1)])),
        3 => {
            let c = p.phase(-1.0) * (mu * beta) / (p.phase(0.5) * (8.0 * lam));
            let kinetic =
                JetExpr::from_terms([(MonomialKey::new(1, &[(1, 2)]), c * beta), (MonomialKey::new(1, &[(2, 1)]), c)]);
            let potential = JetExpr::monomial(-p.phase(-2.0) * (mu * mu / (8.0 * lam)), 2, &[]);
            Ok(&kinetic + &potential)
        }
        _ => Err(Error::InvalidIndex(n)),
    }
}

/// Same monomials and coefficients equal to rounding (`1e-14` relative).
pub fn structurally_equal(a: &JetExpr, b: &JetExpr) -> bool {
    a.len() == b.len() && a.monomials().iter().zip(b.monomials()).all(|(x, y)| x.key == y.key) && a.approx_eq(b, 1e-14)
}

/// Per-monomial comparison rendered one key per line, mismatches flagged.
pub fn render_diff(left: &JetExpr, right: &JetExpr) -> String {
    let mut s = String::new();
    for d in left.diff(right) {
        let tag = if d.matches(1e-12) { "ok      " } else { "MISMATCH" };
        let _ = writeln!(s, "{tag} {d}");
    }
    s
}

/// Checks that `num / den` is the same complex number at every sample and
/// returns it. Samples are `(φ, [u₁, u₂, …])`.
pub fn constant_phase_ratio(
    n: usize,
    num: &JetExpr,
    den: &JetExpr,
    beta: f64,
    samples: &[(f64, Vec<C64>)],
) -> Result<C64> {
    let mut ratios = Vec::with_capacity(samples.len());
    for (phi, u) in samples {
        let d = je_eval(den, beta, *phi, u)?;
        if d.norm() < 1e-12 {
            continue;
        }
        ratios.push(je_eval(num, beta, *phi, u)? / d);
    }
    let first = *ratios.first().ok_or(Error::InsufficientSamples(0))?;
    let spread = ratios.iter().map(|r| (r - first).norm()).fold(0.0, f64::max) / first.norm().max(1e-300);
    if spread > PHASE_RATIO_TOL {
        return Err(Error::NonConstantRatio { n, spread });
    }
    Ok(first)
}

/// Phase of each monomial's coefficient ratio `num/den`.
pub fn monomial_phases(num: &JetExpr, den: &JetExpr) -> Vec<(MonomialKey, Option<f64>)> {
    num.diff(den)
        .into_iter()
        .map(|d| {
            let phase = if d.right.norm() > 0.0 && d.left.norm() > 0.0 { Some((d.left / d.right).arg()) } else { None };
            (d.key, phase)
        })
        .collect()
}

/// Random real scalar jet data `(φ, [u₁, …, u_order])` in `[-1, 1]`.
pub fn random_jet_samples(seed: u64, count: usize, order: usize) -> Vec<(f64, Vec<C64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let phi = rng.gen_range(-1.0..=1.0);
            let u = (0..order).map(|_| C64::new(rng.gen_range(-1.0..=1.0), 0.0)).collect();
            (phi, u)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMeasurement {
    pub n: usize,
    /// `arg(ρ_n(θ*) / ρ_n(0))`
    pub measured: f64,
    /// The overall-phase law `−(n−1)θ*/2`.
    pub predicted_overall: f64,
}

/// Measures how each `ρ_n` picks up θ₀ by evaluating it at θ₀ = 0 and θ₀ = θ*
/// on identical random jet data.
pub fn phase_pattern_probe(
    n_max: usize,
    lambda: f64,
    mu: f64,
    beta: f64,
    theta_star: f64,
    seed: u64,
) -> Result<Vec<PhaseMeasurement>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter { name: "n_max", reason: "must be at least 2".into() });
    }
    let base = ModelParams::with_lambda_mu(lambda * beta, 1.0, beta, 0.0, 0.0, lambda, mu)?;
    let zero = akns_build(&base, n_max)?;
    let star = akns_build(&base.with_theta0(theta_star)?, n_max)?;
    let order = zero.rho.iter().map(|r| r.max_order()).max().unwrap_or(0) as usize;
    let samples = random_jet_samples(seed, 16, order.max(1));
    (1..=n_max)
        .map(|n| {
            let ratio = constant_phase_ratio(n, &star.rho[n - 1], &zero.rho[n - 1], beta, &samples)?;
            Ok(PhaseMeasurement { n, measured: ratio.arg(), predicted_overall: -((n - 1) as f64) * theta_star / 2.0 })
        })
        .collect()
}

/// Golden-file text: each `ρ_n` in the jet pretty-printed grammar.
pub fn densities_text(series: &AknsSeries) -> String {
    let mut s = format!("theta0 = {:.15e}\n", series.theta0);
    for (n, rho) in series.rho.iter().enumerate() {
        let _ = writeln!(s, "rho_{} ({} monomials):", n + 1, rho.len());
        s.push_str(&rho.to_string());
    }
    s
}

/// Jets `u₁..u_order` on the grid, with `φ_tt` and `φ_ttt` from the equations
/// of motion. With `fermion_substitution`, `u₁ += iψ̄ψ` and `u₂ += i∂₊ψ̄ψ`.
pub fn jet_grids(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    order: u32,
    fermion_substitution: bool,
) -> Result<Vec<Vec<C64>>> {
    if order > MAX_JET_ORDER {
        return Err(Error::JetOrderTooLow { needed: order, available: MAX_JET_ORDER });
    }
    let lc = LightconeFields::from_state(state, spec)?;
    let mut out: Vec<Vec<C64>> = Vec::new();
    if order >= 1 {
        out.push(lc.dplus_phi.iter().map(|&v| C64::new(v, 0.0)).collect());
    }
    if order >= 2 {
        let d = rhs(state, p, spec)?;
        let phi_tx = derivative(&state.phi_t, spec)?;
        let phi_xx = second_derivative(&state.phi, spec)?;
        out.push((0..spec.n).map(|i| C64::new(0.25 * (d.d_phi_t[i] + 2.0 * phi_tx[i] + phi_xx[i]), 0.0)).collect());
        if order >= 3 {
            let rho_t = bilinear_rate(state, p, spec)?;
            let phi_txx = second_derivative(&state.phi_t, spec)?;
            let phi_ttx = derivative(&d.d_phi_t, spec)?;
            let phi_xxx = derivative(&phi_xx, spec)?;
            let m2 = p.m_s * p.m_s;
            out.push(
                (0..spec.n)
                    .map(|i| {
                        let phi_ttt = phi_txx[i] - m2 * (p.beta * state.phi[i]).cosh() * state.phi_t[i]
                            + p.backreaction() * rho_t[i];
                        C64::new(0.125 * (phi_ttt + 3.0 * phi_ttx[i] + 3.0 * phi_txx[i] + phi_xxx[i]), 0.0)
                    })
                    .collect(),
            );
        }
    }
    if fermion_substitution && order >= 1 {
        for (u, r) in out[0].iter_mut().zip(&lc.rho) {
            *u += I * r;
        }
        if order >= 2 {
            let rho_t = bilinear_rate(state, p, spec)?;
            let rho_x = derivative(&lc.rho, spec)?;
            for i in 0..spec.n {
                out[1][i] += I * (0.5 * (rho_t[i] + rho_x[i]));
            }
        }
    }
    Ok(out)
}

/// `I = dx Σ ρ(x_i)`, the periodic trapezoid rule.
pub fn evaluate_charge(
    rho_n: &JetExpr,
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    fermion_substitution: bool,
) -> Result<C64> {
    let order = rho_n.max_order();
    let jets = jet_grids(state, p, spec, order, fermion_substitution)?;
    let mut total = ZERO;
    let mut u = vec![ZERO; order as usize];
    for (i, &phi) in state.phi.iter().enumerate() {
        for (slot, jet) in u.iter_mut().zip(&jets) {
            *slot = jet[i];
        }
        total += je_eval(rho_n, p.beta, phi, &u)?;
    }
    Ok(total * spec.dx())
}

/// Which component of the connection is transported along x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Connection {
    APlus,
    /// `A₊ − A₋`, the spatial component.
    #[default]
    AX,
}

impl Connection {
    pub fn name(self) -> &'static str {
        match self {
            Connection::APlus => "a_plus",
            Connection::AX => "a_x",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a_plus" => Some(Connection::APlus),
            "a_x" => Some(Connection::AX),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonodromyResult {
    pub t_matrix: Mat2,
    pub trace: C64,
    pub zeta: C64,
    pub connection: Connection,
}

/// Cells per block of the parallel ordered product. Fixed so the result
/// does not depend on the thread count.
const PRODUCT_BLOCK: usize = 64;

/// `exp(A dx)` per cell, with `A` built from fields averaged to the cell midpoint.
fn cell_factors(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    connection: Connection,
    pair: &LaxPair,
) -> Result<Vec<Mat2>> {
    let lc = LightconeFields::from_state(state, spec)?;
    let n = spec.n;
    let dx = spec.dx();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let j = (i + 1) % n;
            let mid = |v: &[f64]| 0.5 * (v[i] + v[j]);
            let (phi, rho) = (mid(&lc.phi), mid(&lc.rho));
            let ap = (pair.a_plus)(phi, mid(&lc.dplus_phi).into(), rho, zeta, p)?;
            let a = match connection {
                Connection::APlus => ap,
                Connection::AX => ap - (pair.a_minus)(phi, mid(&lc.dminus_phi).into(), rho, zeta, p)?,
            };
            Ok(mat_exp(&(a * dx)))
        })
        .collect()
}

/// `E_{n−1} ⋯ E_1 E_0`, later factors on the left.
fn ordered_product(factors: &[Mat2]) -> Mat2 {
    let blocks: Vec<Mat2> =
        factors.par_chunks(PRODUCT_BLOCK).map(|chunk| chunk.iter().fold(Mat2::identity(), |acc, f| *f * acc)).collect();
    blocks.iter().fold(Mat2::identity(), |acc, b| *b * acc)
}

pub fn monodromy(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    connection: Connection,
) -> Result<MonodromyResult> {
    monodromy_with(state, p, spec, zeta, connection, &STANDARD_PAIR)
}

pub fn monodromy_with(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    connection: Connection,
    pair: &LaxPair,
) -> Result<MonodromyResult> {
    let t_matrix = ordered_product(&cell_factors(state, p, spec, zeta, connection, pair)?);
    Ok(MonodromyResult { t_matrix, trace: t_matrix.trace(), zeta, connection })
}

/// Transport along the reversed orientation: cells from right to left with
/// `exp(−A dx)`. Equals the inverse of [`monodromy`].
pub fn monodromy_reversed(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    connection: Connection,
) -> Result<MonodromyResult> {
    let mut factors = cell_factors(state, p, spec, zeta, connection, &STANDARD_PAIR)?;
    factors.reverse();
    for f in factors.iter_mut() {
        *f = f.inverse()?;
    }
    let t_matrix = ordered_product(&factors);
    Ok(MonodromyResult { t_matrix, trace: t_matrix.trace(), zeta, connection })
}

/// Upper bound on `|d Tr T / dt|` from the local zero-curvature residual:
/// `2 dx Σ_i ‖T_{>i}‖ ‖F_i‖ ‖T_{<i}‖` (Frobenius norms).
pub fn residual_rate(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    connection: Connection,
) -> Result<f64> {
    let factors = cell_factors(state, p, spec, zeta, connection, &STANDARD_PAIR)?;
    let f = curvature_field(state, p, spec, zeta, TimeDerivative::Analytic)?;
    let n = spec.n;
    let mut prefix = vec![0.0; n];
    let mut acc = Mat2::identity();
    for i in 0..n {
        prefix[i] = acc.frobenius_norm();
        acc = factors[i] * acc;
    }
    let mut suffix = vec![0.0; n];
    let mut acc = Mat2::identity();
    for i in (0..n).rev() {
        acc = acc * factors[i];
        suffix[i] = acc.frobenius_norm();
    }
    Ok(2.0 * spec.dx() * (0..n).map(|i| suffix[i] * f[i].frobenius_norm() * prefix[i]).sum::<f64>())
}

/// Drift of a complex time series relative to its first value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftStats {
    pub max_abs: f64,
    pub max_rel: f64,
    pub final_rel: f64,
}

pub fn drift_statistics(series: &[C64]) -> Result<DriftStats> {
    let first = *series.first().ok_or(Error::InsufficientSamples(0))?;
    let scale = first.norm().max(f64::MIN_POSITIVE);
    let max_abs = series.iter().map(|z| (z - first).norm()).fold(0.0, f64::max);
    let last = series[series.len() - 1];
    Ok(DriftStats { max_abs, max_rel: max_abs / scale, final_rel: (last - first).norm() / scale })
}

/// Observer columns `re_I{n}, im_I{n}` for the given densities.
pub struct ChargeProbe {
    pub densities: Vec<JetExpr>,
    pub fermion_substitution: bool,
}

impl ChargeProbe {
    pub fn from_series(series: &AknsSeries, fermion_substitution: bool) -> Self {
        // densities needing jets beyond u₃ cannot be evaluated on a snapshot
        let densities = series.rho.iter().take_while(|r| r.max_order() <= MAX_JET_ORDER).cloned().collect();
        ChargeProbe { densities, fermion_substitution }
    }
}

impl Probe for ChargeProbe {
    fn columns(&self) -> Vec<String> {
        (1..=self.densities.len()).flat_map(|n| [format!("re_I{n}"), format!("im_I{n}")]).collect()
    }

    fn sample(&mut self, state: &FieldState, p: &ModelParams, spec: &GridSpec) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(2 * self.densities.len());
        for rho in &self.densities {
            let q = evaluate_charge(rho, state, p, spec, self.fermion_substitution)?;
            out.push(q.re);
            out.push(q.im);
        }
        Ok(out)
    }
}

/// Observer columns `re_trT, im_trT, detT_err, residual_budget` per ζ.
/// `residual_budget` is the time integral (trapezoid over samples) of
/// [`residual_rate`], i.e. how much Tr T may move because `F ≠ 0`.
pub struct MonodromyProbe {
    pub zetas: Vec<C64>,
    pub connection: Connection,
    last: Vec<Option<(f64, f64)>>,
    budget: Vec<f64>,
}

impl MonodromyProbe {
    pub fn new(zetas: Vec<C64>, connection: Connection) -> Self {
        let k = zetas.len();
        MonodromyProbe { zetas, connection, last: vec![None; k], budget: vec![0.0; k] }
    }
}

impl Probe for MonodromyProbe {
    fn columns(&self) -> Vec<String> {
        let single = self.zetas.len() == 1;
        let mut cols = Vec::new();
        for k in 0..self.zetas.len() {
            let suffix = if single { String::new() } else { format!("_z{k}") };
            for base in ["re_trT", "im_trT", "detT_err", "residual_budget"] {
                cols.push(format!("{base}{suffix}"));
            }
        }
        cols
    }

    fn sample(&mut self, state: &FieldState, p: &ModelParams, spec: &GridSpec) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(4 * self.zetas.len());
        for (k, &zeta) in self.zetas.iter().enumerate() {
            let m = monodromy(state, p, spec, zeta, self.connection)?;
            let rate = residual_rate(state, p, spec, zeta, self.connection)?;
            if let Some((t_prev, r_prev)) = self.last[k] {
                self.budget[k] += 0.5 * (state.t - t_prev) * (rate + r_prev);
            }
            self.last[k] = Some((state.t, rate));
            out.extend([m.trace.re, m.trace.im, (m.t_matrix.det() - ONE).norm(), self.budget[k]]);
        }
        Ok(out)
    }
}

/// One line per monomial: key and the phase of its coefficient ratio.
pub fn render_phases(num: &JetExpr, den: &JetExpr) -> String {
    let mut s = String::new();
    for (key, phase) in monomial_phases(num, den) {
        match phase {
            Some(ph) => {
                let _ = writeln!(s, "  {}: phase {ph:+.12e}", format_key(&key));
            }
            None => {
                let _ = writeln!(s, "  {}: present on one side only", format_key(&key));
            }
        }
    }
    s
}
