//! The number-growth law for a complex fermion mass.
//!
//! Substituting the Dirac equations into the product rule gives
//!
//! ```text
//! ∂_t(ψ†ψ) + ∂ₓJ = 2 Im M (|ψ₊|² − |ψ₋|²) = 2 m_f sin θ₀ e^{βφ} ψ̄ψ
//! ```
//!
//! with `J = 2 Re(ψ₊*ψ₋)`. The other candidate, with `ψ̄ψ` as density and
//! `ψ†ψ` in the source, misses the transport term `4 Re(ψ₋* ∂ₓψ₊)`.
//! Both residuals are evaluated here, time derivatives from the right-hand
//! side so that only spatial truncation error remains.

use std::fmt::Write as _;

use crate::dynamics::{rhs, ObserverRecord};
use crate::error::{Error, Result};
use crate::fields::{bilinear, derivative, number_density, vector_current, FieldState, GridSpec, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuityVariant {
    /// `∂_t(ψ̄ψ) + ∂ₓJ − 2m_f sin θ₀ e^{βφ} ψ†ψ`
    Bilinear,
    /// `∂_t(ψ†ψ) + ∂ₓJ − 2m_f sin θ₀ e^{βφ} ψ̄ψ`
    Adjoint,
}

/// The variant that is an identity up to spatial truncation.
pub const EXACT_VARIANT: ContinuityVariant = ContinuityVariant::Adjoint;

pub fn continuity_residual(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    variant: ContinuityVariant,
) -> Result<Vec<f64>> {
    state.check(spec)?;
    let d = rhs(state, p, spec)?;
    let j_x = derivative(&vector_current(state), spec)?;
    let (rho, n) = (bilinear(state), number_density(state));
    let coeff = 2.0 * p.m_f * p.sin_theta0();
    Ok((0..spec.n)
        .map(|i| {
            let plus = 2.0 * (state.psi_plus[i].conj() * d.d_psi_plus[i]).re;
            let minus = 2.0 * (state.psi_minus[i].conj() * d.d_psi_minus[i]).re;
            let weight = coeff * (p.beta * state.phi[i]).exp();
            match variant {
                ContinuityVariant::Bilinear => plus - minus + j_x[i] - weight * n[i],
                ContinuityVariant::Adjoint => plus + minus + j_x[i] - weight * rho[i],
            }
        })
        .collect())
}

pub fn linf(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Measured `d/dt ∫ψ†ψ` against `2 m_f sin θ₀ ∫e^{βφ}ψ̄ψ` at interior samples.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthLawReport {
    pub times: Vec<f64>,
    pub measured: Vec<f64>,
    pub predicted: Vec<f64>,
    /// `max |measured − predicted| / max(max|predicted|, mean N / duration)`
    pub max_rel_mismatch: f64,
    /// `max |N(t) − N(0)| / N(0)`
    pub number_drift_rel: f64,
}

pub fn growth_law_check(records: &[ObserverRecord], p: &ModelParams) -> Result<GrowthLawReport> {
    if records.len() < 3 {
        return Err(Error::InsufficientSamples(records.len()));
    }
    let coeff = 2.0 * p.m_f * p.sin_theta0();
    let mut times = Vec::new();
    let mut measured = Vec::new();
    let mut predicted = Vec::new();
    for w in records.windows(3) {
        let dt = w[2].t - w[0].t;
        times.push(w[1].t);
        measured.push((w[2].n_total - w[0].n_total) / dt);
        predicted.push(coeff * w[1].anomaly_source);
    }
    let duration = records[records.len() - 1].t - records[0].t;
    let mean_n = records.iter().map(|r| r.n_total).sum::<f64>() / records.len() as f64;
    let scale = predicted.iter().map(|v| v.abs()).fold(0.0, f64::max).max(mean_n / duration);
    let worst = measured.iter().zip(&predicted).map(|(m, q)| (m - q).abs()).fold(0.0, f64::max);
    let n0 = records[0].n_total;
    let drift = records.iter().map(|r| (r.n_total - n0).abs()).fold(0.0, f64::max) / n0.abs().max(f64::MIN_POSITIVE);
    Ok(GrowthLawReport { times, measured, predicted, max_rel_mismatch: worst / scale, number_drift_rel: drift })
}

/// Report block with both residual norms and, when available, the growth law.
pub fn continuity_block(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    growth: Option<&GrowthLawReport>,
) -> Result<String> {
    let bilinear = linf(&continuity_residual(state, p, spec, ContinuityVariant::Bilinear)?);
    let adjoint = linf(&continuity_residual(state, p, spec, ContinuityVariant::Adjoint)?);
    let mut s = String::new();
    let _ = writeln!(s, "continuity_bilinear_residual_Linf = {bilinear:.6e}");
    let _ = writeln!(s, "continuity_adjoint_residual_Linf = {adjoint:.6e}");
    if let Some(g) = growth {
        let _ = writeln!(s, "growth_law_mismatch_rel = {:.6e}", g.max_rel_mismatch);
    }
    Ok(s)
}
