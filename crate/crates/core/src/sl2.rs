//! Complex 2×2 matrices and the fundamental representation of sl(2,ℂ).
//!
//! Everything here is a plain `Copy` value. The Lax matrices, the constant
//! gauge element and the cell transfer matrices of the monodromy are all
//! [`Mat2`]s.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major complex 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

/// Basis element names for sl(2,ℂ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    H,
    EPlus,
    EMinus,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::H, Generator::EPlus, Generator::EMinus];

    /// Grade under `ad H / 2`.
    pub fn grade(self) -> i32 {
        match self {
            Generator::H => 0,
            Generator::EPlus => 1,
            Generator::EMinus => -1,
        }
    }
}

pub fn generator(name: Generator) -> Mat2 {
    match name {
        Generator::H => Mat2::new(ONE, ZERO, ZERO, -ONE),
        Generator::EPlus => Mat2::new(ZERO, ONE, ZERO, ZERO),
        Generator::EMinus => Mat2::new(ZERO, ZERO, ONE, ZERO),
    }
}

impl Mat2 {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-300 || det.norm() <= f64::EPSILON * 1e-4 * scale * scale {
            return Err(Error::SingularMatrix { det: det.norm() });
        }
        let inv = det.inv();
        Ok(Mat2::new(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale_re(s)
    }
}

impl Default for Mat2 {
    fn default() -> Self {
        Mat2::zero()
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    *a * *b - *b * *a
}

/// Coefficients of a traceless matrix in the `H, E₊, E₋` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradedElement {
    pub h: C64,
    pub ep: C64,
    pub em: C64,
}

impl GradedElement {
    pub fn new(h: C64, ep: C64, em: C64) -> Self {
        GradedElement { h, ep, em }
    }

    pub fn reconstruct(&self) -> Mat2 {
        Mat2::new(self.h, self.ep, self.em, -self.h)
    }

    pub fn component(&self, g: Generator) -> C64 {
        match g {
            Generator::H => self.h,
            Generator::EPlus => self.ep,
            Generator::EMinus => self.em,
        }
    }
}

/// Default tracelessness tolerance: `1e-10 · max(max |entry|, 1)`.
pub fn default_trace_tol(m: &Mat2) -> f64 {
    1e-10 * m.max_abs().max(1.0)
}

pub fn grade_decompose(m: &Mat2, tol: f64) -> Result<GradedElement> {
    let trace = m.trace().norm();
    if trace > tol {
        return Err(Error::NonTraceless { trace, tol });
    }
    Ok(GradedElement::new(m.a11, m.a12, m.a21))
}

/// The involution family `E± ↦ e^{±2iθ} E±`, `H ↦ H`.
pub fn twisted_involution(theta: f64, g: &GradedElement) -> GradedElement {
    let phase = C64::from_polar(1.0, 2.0 * theta);
    GradedElement::new(g.h, g.ep * phase, g.em * phase.conj())
}

/// Relative eigenvalue gap below which `mat_exp` switches to the series form.
pub const EXP_SERIES_GAP: f64 = 1e-6;

/// Matrix exponential through the 2×2 closed form.
///
/// Writing `m = (tr/2)·1 + N` with `N` traceless, `N² = δ²·1` where
/// `δ² = -det N`, so `exp N = cosh δ · 1 + (sinh δ / δ) · N`. The eigenvalues
/// of `m` are `tr/2 ± δ`; when the gap `2|δ|` is small compared with `‖m‖`
/// the two even functions are summed as power series in `δ²` instead.
pub fn mat_exp(m: &Mat2) -> Mat2 {
    let half_tr = m.trace() * 0.5;
    let n = Mat2::new(m.a11 - half_tr, m.a12, m.a21, m.a22 - half_tr);
    let delta_sq = -n.det();
    let delta = delta_sq.sqrt();
    let scale = m.frobenius_norm();

    let (c, s) = if 2.0 * delta.norm() < EXP_SERIES_GAP * scale || delta.norm() < 1e-8 {
        even_series(delta_sq)
    } else {
        (delta.cosh(), delta.sinh() / delta)
    };
    let core = Mat2::new(c + s * n.a11, s * n.a12, s * n.a21, c + s * n.a22);
    core.scale(half_tr.exp())
}

/// `(cosh δ, sinh δ / δ)` from their Taylor series in `x = δ²`.
fn even_series(x: C64) -> (C64, C64) {
    let mut cosh = ONE;
    let mut sinhc = ONE;
    let mut term_c = ONE;
    let mut term_s = ONE;
    for k in 1..=12u32 {
        let k = k as f64;
        term_c = term_c * x / ((2.0 * k - 1.0) * (2.0 * k));
        term_s = term_s * x / ((2.0 * k) * (2.0 * k + 1.0));
        cosh += term_c;
        sinhc += term_s;
        if term_c.norm() < 1e-18 * cosh.norm() && term_s.norm() < 1e-18 * sinhc.norm() {
            break;
        }
    }
    (cosh, sinhc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h() -> Mat2 {
        generator(Generator::H)
    }
    fn ep() -> Mat2 {
        generator(Generator::EPlus)
    }
    fn em() -> Mat2 {
        generator(Generator::EMinus)
    }

    fn random_mat(rng: &mut impl Rng, scale: f64) -> Mat2 {
        let mut z = || C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
        Mat2::new(z(), z(), z(), z())
    }

    #[test]
    fn generators_match_fundamental_representation() {
        assert_eq!(h(), Mat2::from_real(1.0, 0.0, 0.0, -1.0));
        assert_eq!(ep(), Mat2::from_real(0.0, 1.0, 0.0, 0.0));
        assert_eq!(em(), Mat2::from_real(0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn structure_constants() {
        assert_eq!(commutator(&h(), &ep()), ep().scale_re(2.0));
        assert_eq!(commutator(&h(), &em()), em().scale_re(-2.0));
        assert_eq!(commutator(&ep(), &em()), h());
    }

    #[test]
    fn commutator_matches_entrywise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_mat(&mut rng, 2.0);
            let b = random_mat(&mut rng, 2.0);
            // ab - ba written out entry by entry
            let e11 = a.a12 * b.a21 - b.a12 * a.a21;
            let e12 = a.a11 * b.a12 + a.a12 * b.a22 - b.a11 * a.a12 - b.a12 * a.a22;
            let e21 = a.a21 * b.a11 + a.a22 * b.a21 - b.a21 * a.a11 - b.a22 * a.a21;
            let e22 = a.a21 * b.a12 - b.a21 * a.a12;
            let c = commutator(&a, &b);
            let oracle = Mat2::new(e11, e12, e21, e22);
            assert!(c.max_abs_diff(&oracle) < 1e-13, "{c} vs {oracle}");
            assert_eq!(commutator(&a, &a), Mat2::zero());
        }
    }

    #[test]
    fn grade_decompose_basis_and_errors() {
        let g = grade_decompose(&h(), 1e-10).unwrap();
        assert_eq!(g, GradedElement::new(ONE, ZERO, ZERO));
        let off = Mat2::from_real(0.0, 1.0, 1.0, 0.0);
        let g = grade_decompose(&off, 1e-10).unwrap();
        assert_eq!((g.h, g.ep, g.em), (ZERO, ONE, ONE));
        let err = grade_decompose(&Mat2::identity(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonTraceless { .. }));
    }

    #[test]
    fn involution_examples() {
        let g = GradedElement::new(C64::new(0.3, 0.1), C64::new(1.0, -2.0), C64::new(0.5, 0.5));
        assert_eq!(twisted_involution(0.0, &g), g);

        let theta = 0.37;
        let e = GradedElement::new(ZERO, ONE, ZERO);
        let twice = twisted_involution(theta, &twisted_involution(theta, &e));
        assert!((twice.ep - C64::from_polar(1.0, 4.0 * theta)).norm() < 1e-15);
        assert!((twice.ep - ONE).norm() > 1e-3);
        let quarter = std::f64::consts::FRAC_PI_2;
        let back = twisted_involution(quarter, &twisted_involution(quarter, &e));
        assert!((back.ep - ONE).norm() < 1e-15);

        let f = GradedElement::new(ZERO, ZERO, ONE);
        let out = twisted_involution(std::f64::consts::FRAC_PI_4, &f);
        assert!((out.em - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    /// 30-term Taylor sum after scaling by 2^-s, then s squarings.
    fn exp_oracle(m: &Mat2) -> Mat2 {
        let s = (m.frobenius_norm().log2().ceil().max(0.0) as i32) + 4;
        let scaled = m.scale_re(0.5f64.powi(s));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..=30 {
            term = (term * scaled).scale_re(1.0 / k as f64);
            sum += term;
        }
        for _ in 0..s {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn mat_exp_closed_cases() {
        assert_eq!(mat_exp(&Mat2::zero()), Mat2::identity());
        let a = C64::new(0.7, -0.2);
        let e = mat_exp(&Mat2::diag(a, -a));
        assert!(e.max_abs_diff(&Mat2::diag(a.exp(), (-a).exp())) < 1e-14);
        let len = 3.0;
        let e = mat_exp(&Mat2::from_real(0.0, len, len, 0.0));
        let oracle = Mat2::from_real(len.cosh(), len.sinh(), len.sinh(), len.cosh());
        assert!(e.max_abs_diff(&oracle) < 1e-13 * len.cosh());
        // nilpotent: exp(N) = 1 + N exactly
        let e = mat_exp(&ep().scale_re(5.0));
        assert!(e.max_abs_diff(&(Mat2::identity() + ep().scale_re(5.0))) < 1e-15);
    }

    #[test]
    fn mat_exp_matches_series_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut m = random_mat(&mut rng, 1.0);
            let norm = m.frobenius_norm();
            if norm > 1.0 {
                m = m.scale_re(1.0 / norm);
            }
            let e = mat_exp(&m);
            let o = exp_oracle(&m);
            let rel = e.max_abs_diff(&o) / o.max_abs();
            assert!(rel <= 1e-12, "relative error {rel:e} for {m}");
        }
    }

    #[test]
    fn mat_exp_near_degenerate_eigenvalues() {
        // gap ~1e-9, well inside the series branch
        let m = Mat2::new(C64::new(0.5, 0.0), C64::new(1e-9, 0.0), C64::new(1e-9, 0.0), C64::new(0.5, 0.0));
        let rel = mat_exp(&m).max_abs_diff(&exp_oracle(&m)) / exp_oracle(&m).max_abs();
        assert!(rel < 1e-13);
        // just above the switch
        let m = Mat2::from_real(0.1, 1e-5, 1e-5, -0.1);
        let rel = mat_exp(&m).max_abs_diff(&exp_oracle(&m)) / exp_oracle(&m).max_abs();
        assert!(rel < 1e-13);
    }

    fn c64() -> impl Strategy<Value = C64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(r, i)| C64::new(r, i))
    }

    fn traceless() -> impl Strategy<Value = Mat2> {
        (c64(), c64(), c64()).prop_map(|(h, e, f)| Mat2::new(h, e, f, -h))
    }

    proptest! {
        #[test]
        fn decompose_reconstruct_roundtrip(m in traceless()) {
            let g = grade_decompose(&m, default_trace_tol(&m)).unwrap();
            prop_assert_eq!(g.reconstruct(), m);
        }

        #[test]
        fn commutator_of_traceless_is_traceless(a in traceless(), b in traceless()) {
            let c = commutator(&a, &b);
            let scale = a.max_abs().max(b.max_abs()).max(1.0);
            prop_assert!(c.trace().norm() <= 1e-14 * scale * scale);
        }

        #[test]
        fn involution_preserves_h(theta in -10.0..10.0f64, h in c64(), e in c64(), f in c64()) {
            let g = GradedElement::new(h, e, f);
            prop_assert_eq!(twisted_involution(theta, &g).h, h);
        }

        #[test]
        fn exp_of_traceless_has_unit_det(m in traceless()) {
            let m = m.scale_re(0.3);
            let d = mat_exp(&m).det();
            let scale = mat_exp(&m).max_abs().powi(2).max(1.0);
            prop_assert!((d - ONE).norm() <= 1e-13 * scale);
        }
    }
}
