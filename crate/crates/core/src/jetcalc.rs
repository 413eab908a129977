//! Symbolic differential algebra over the jet variables `u_k = ∂₊ᵏφ` and
//! the exponentials `E[q] = e^{qβφ}`.
//!
//! A [`JetExpr`] is a finite sum of monomials `c · E[q] · u₁^{a₁} u₂^{a₂} …`
//! kept in a canonical order, so two expressions are mathematically equal
//! exactly when their monomial lists are equal. Coefficients are complex
//! floats; `β` never appears symbolically and is supplied to [`d_plus`] and
//! [`je_eval`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::sl2::{C64, ONE, ZERO};

/// Relative threshold below which merged coefficients are dropped.
pub const MERGE_THRESHOLD: f64 = 1e-14;

/// Exponent vector of a monomial: `(k, a_k)` pairs with `k ≥ 1`, `a_k ≥ 1`,
/// sorted by `k`.
pub type Powers = Vec<(u32, u32)>;

/// Canonical key of a monomial: exponential weight, then jet powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    pub q: i32,
    pub powers: Powers,
}

impl MonomialKey {
    pub fn new(q: i32, powers: &[(u32, u32)]) -> Self {
        let mut map = BTreeMap::new();
        for &(k, a) in powers {
            assert!(k >= 1, "jet index starts at 1");
            if a > 0 {
                *map.entry(k).or_insert(0) += a;
            }
        }
        MonomialKey { q, powers: map.into_iter().collect() }
    }

    pub fn max_order(&self) -> u32 {
        self.powers.last().map(|&(k, _)| k).unwrap_or(0)
    }

    fn times(&self, other: &MonomialKey) -> MonomialKey {
        let mut all = self.powers.clone();
        all.extend_from_slice(&other.powers);
        MonomialKey::new(self.q + other.q, &all)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetMonomial {
    pub coeff: C64,
    pub key: MonomialKey,
}

impl JetMonomial {
    pub fn q(&self) -> i32 {
        self.key.q
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.key.powers
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct JetExpr {
    monomials: Vec<JetMonomial>,
}

impl JetExpr {
    pub fn zero() -> Self {
        JetExpr::default()
    }

    pub fn constant(c: C64) -> Self {
        JetExpr::monomial(c, 0, &[])
    }

    /// `c · E[q] · Π u_k^{a_k}`.
    pub fn monomial(c: C64, q: i32, powers: &[(u32, u32)]) -> Self {
        JetExpr::from_terms(vec![(MonomialKey::new(q, powers), c)])
    }

    /// `E[q]`.
    pub fn exp(q: i32) -> Self {
        JetExpr::monomial(ONE, q, &[])
    }

    /// `u_k`.
    pub fn jet(k: u32) -> Self {
        JetExpr::monomial(ONE, 0, &[(k, 1)])
    }

    /// Builds the canonical form from unsorted, possibly repeated terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (MonomialKey, C64)>) -> Self {
        let mut acc: BTreeMap<MonomialKey, C64> = BTreeMap::new();
        for (key, c) in terms {
            *acc.entry(key).or_insert(ZERO) += c;
        }
        let max = acc.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = MERGE_THRESHOLD * max;
        let monomials = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > cut && *c != ZERO)
            .map(|(key, coeff)| JetMonomial { coeff, key })
            .collect();
        JetExpr { monomials }
    }

    pub fn monomials(&self) -> &[JetMonomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Highest jet index referenced (0 for pure exponentials).
    pub fn max_order(&self) -> u32 {
        self.monomials.iter().map(|m| m.key.max_order()).max().unwrap_or(0)
    }

    pub fn coeff_of(&self, key: &MonomialKey) -> C64 {
        self.monomials.iter().find(|m| &m.key == key).map(|m| m.coeff).unwrap_or(ZERO)
    }

    pub fn scale(&self, s: C64) -> JetExpr {
        JetExpr::from_terms(self.monomials.iter().map(|m| (m.key.clone(), m.coeff * s)))
    }

    fn terms(&self) -> impl Iterator<Item = (MonomialKey, C64)> + '_ {
        self.monomials.iter().map(|m| (m.key.clone(), m.coeff))
    }

    /// Coefficient-wise comparison with a relative tolerance on each key.
    pub fn approx_eq(&self, other: &JetExpr, rel_tol: f64) -> bool {
        self.diff(other).iter().all(|d| {
            let scale = d.left.norm().max(d.right.norm());
            (d.left - d.right).norm() <= rel_tol * scale
        })
    }

    /// Per-monomial comparison over the union of both key sets.
    pub fn diff(&self, other: &JetExpr) -> Vec<MonomialDiff> {
        let mut keys: Vec<MonomialKey> =
            self.monomials.iter().chain(other.monomials.iter()).map(|m| m.key.clone()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|key| MonomialDiff { left: self.coeff_of(&key), right: other.coeff_of(&key), key })
            .collect()
    }
}

/// One row of [`JetExpr::diff`].
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialDiff {
    pub key: MonomialKey,
    pub left: C64,
    pub right: C64,
}

impl MonomialDiff {
    pub fn matches(&self, rel_tol: f64) -> bool {
        let scale = self.left.norm().max(self.right.norm());
        (self.left - self.right).norm() <= rel_tol * scale
    }
}

impl fmt::Display for MonomialDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} | {}", format_key(&self.key), format_coeff(self.left), format_coeff(self.right))
    }
}

pub fn je_add(a: &JetExpr, b: &JetExpr) -> JetExpr {
    JetExpr::from_terms(a.terms().chain(b.terms()))
}

pub fn je_mul(a: &JetExpr, b: &JetExpr) -> JetExpr {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for x in &a.monomials {
        for y in &b.monomials {
            terms.push((x.key.times(&y.key), x.coeff * y.coeff));
        }
    }
    JetExpr::from_terms(terms)
}

/// Total `∂₊` derivative: `∂₊u_k = u_{k+1}`, `∂₊E[q] = qβ·u₁·E[q]`, Leibniz.
pub fn d_plus(a: &JetExpr, beta: f64) -> JetExpr {
    let mut terms = Vec::new();
    for m in &a.monomials {
        let q = m.key.q;
        if q != 0 {
            let mut p = m.key.powers.clone();
            p.push((1, 1));
            terms.push((MonomialKey::new(q, &p), m.coeff * (q as f64 * beta)));
        }
        for (idx, &(k, power)) in m.key.powers.iter().enumerate() {
            let mut p = m.key.powers.clone();
            p[idx].1 = power - 1;
            p.push((k + 1, 1));
            terms.push((MonomialKey::new(q, &p), m.coeff * power as f64));
        }
    }
    JetExpr::from_terms(terms)
}

/// Numerical value with `φ` and `u = [u₁, …, u_K]` substituted.
///
/// Summation runs over monomials in canonical order.
pub fn je_eval(a: &JetExpr, beta: f64, phi: f64, u: &[C64]) -> Result<C64> {
    let needed = a.max_order();
    if needed as usize > u.len() {
        return Err(Error::JetOrderTooLow { needed, available: u.len() as u32 });
    }
    let mut total = ZERO;
    for m in &a.monomials {
        total += eval_monomial(m, beta, phi, u);
    }
    Ok(total)
}

pub(crate) fn eval_monomial(m: &JetMonomial, beta: f64, phi: f64, u: &[C64]) -> C64 {
    let mut v = m.coeff * (m.key.q as f64 * beta * phi).exp();
    for &(k, a) in &m.key.powers {
        v *= u[(k - 1) as usize].powu(a);
    }
    v
}

impl Add for &JetExpr {
    type Output = JetExpr;
    fn add(self, o: &JetExpr) -> JetExpr {
        je_add(self, o)
    }
}

impl Sub for &JetExpr {
    type Output = JetExpr;
    fn sub(self, o: &JetExpr) -> JetExpr {
        je_add(self, &-o)
    }
}

impl Neg for &JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        self.scale(-ONE)
    }
}

impl Mul for &JetExpr {
    type Output = JetExpr;
    fn mul(self, o: &JetExpr) -> JetExpr {
        je_mul(self, o)
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn format_coeff(c: C64) -> String {
    format!("({:.15e}{:+.15e}i)", clean(c.re), clean(c.im))
}

pub fn format_key(key: &MonomialKey) -> String {
    let mut s = format!("E[{}]", key.q);
    for &(k, a) in &key.powers {
        s.push_str(&format!(" * u{k}^{a}"));
    }
    s
}

/// One monomial per line, `coeff * E[q] * u1^a1 * u2^a2 ...`; `0` when empty.
impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return writeln!(f, "0");
        }
        for m in &self.monomials {
            writeln!(f, "{} * {}", format_coeff(m.coeff), format_key(&m.key))?;
        }
        Ok(())
    }
}
