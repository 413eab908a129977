//! The constant gauge transformation `h_θ = diag(e^{−iθ/4}, e^{+iθ/4})`.
//!
//! Conjugation by `h_θ` multiplies `E₊` by `e^{+iθ/2}`, `E₋` by `e^{−iθ/2}`
//! and fixes `H`, which is exactly how θ₀ enters the Lax pair:
//! `A±(ζ; θ₀) = h_θ₀⁻¹ A±(ζ; 0) h_θ₀`.

use crate::error::Result;
use crate::fields::{FieldState, GridSpec, ModelParams};
use crate::lax::{lax_matrices, LaxPair, STANDARD_PAIR};
use crate::sl2::{Mat2, C64};

pub fn h_matrix(theta: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, -theta / 4.0), C64::from_polar(1.0, theta / 4.0))
}

/// `h⁻¹ m h`.
pub fn conjugate(h: &Mat2, m: &Mat2) -> Result<Mat2> {
    Ok(h.inverse()? * *m * *h)
}

/// Max entrywise defect of `A±(ζ;θ₀)` against `h⁻¹A±(ζ;0)h` over the grid.
pub fn verify_gauge_lemma(state: &FieldState, p: &ModelParams, spec: &GridSpec, zeta: C64) -> Result<f64> {
    verify_gauge_lemma_with(state, p, spec, zeta, &STANDARD_PAIR)
}

pub fn verify_gauge_lemma_with(
    state: &FieldState,
    p: &ModelParams,
    spec: &GridSpec,
    zeta: C64,
    pair: &LaxPair,
) -> Result<f64> {
    let h = h_matrix(p.theta0);
    let (ap, am) = lax_matrices(state, p, spec, zeta, pair)?;
    let (bp, bm) = lax_matrices(state, &p.with_theta0(0.0)?, spec, zeta, pair)?;
    let mut worst: f64 = 0.0;
    for i in 0..spec.n {
        worst = worst.max(ap[i].max_abs_diff(&conjugate(&h, &bp[i])?));
        worst = worst.max(am[i].max_abs_diff(&conjugate(&h, &bm[i])?));
    }
    Ok(worst)
}

/// `ψ₊ ↦ e^{−iθ/4}ψ₊`, `ψ₋ ↦ e^{+iθ/4}ψ₋`; the scalar is untouched.
pub fn transform_spinor(state: &FieldState, theta: f64) -> FieldState {
    let (a, d) = (C64::from_polar(1.0, -theta / 4.0), C64::from_polar(1.0, theta / 4.0));
    FieldState {
        psi_plus: state.psi_plus.iter().map(|z| a * z).collect(),
        psi_minus: state.psi_minus.iter().map(|z| d * z).collect(),
        ..state.clone()
    }
}

/// The Dirac mass and the scalar backreaction coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Couplings {
    pub dirac_mass: C64,
    pub backreaction: f64,
}

/// Couplings before and after removing the phase by the gauge map:
/// `(m_f e^{iθ₀}, g cos θ₀) → (m_f, g cos θ₀)`.
pub fn coupling_map(p: &ModelParams) -> (Couplings, Couplings) {
    let before = Couplings { dirac_mass: p.phase(1.0) * p.m_f, backreaction: p.backreaction() };
    let after = Couplings { dirac_mass: C64::new(p.m_f, 0.0), backreaction: p.backreaction() };
    (before, after)
}
