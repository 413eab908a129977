//! Model parameters, the periodic grid, field snapshots, fermion bilinears
//! and finite-difference operators.

use std::f64::consts::FRAC_PI_2;
use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::sl2::{C64, ZERO};

/// θ₀ closer than this to 0 or π/2 is snapped onto the endpoint.
pub const THETA_ENDPOINT_SNAP: f64 = 1e-10;

/// Couplings of one member of the deformed family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub m_s: f64,
    pub m_f: f64,
    pub beta: f64,
    pub g: f64,
    pub theta0: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ModelParams {
    /// Standard normalisation `λ = μ = m_s / β`.
    pub fn new(m_s: f64, m_f: f64, beta: f64, g: f64, theta0: f64) -> Result<Self> {
        let mu = m_s / beta;
        ModelParams::with_lambda_mu(m_s, m_f, beta, g, theta0, mu, mu)
    }

    pub fn with_lambda_mu(m_s: f64, m_f: f64, beta: f64, g: f64, theta0: f64, lambda: f64, mu: f64) -> Result<Self> {
        let p = ModelParams { m_s, m_f, beta, g, theta0: snap_theta(theta0), lambda, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("m_s", self.m_s)?;
        if !(self.m_f.is_finite() && self.m_f >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "m_f",
                reason: format!("must be non-negative, got {}", self.m_f),
            });
        }
        positive("beta", self.beta)?;
        positive("lambda", self.lambda)?;
        positive("mu", self.mu)?;
        if !self.g.is_finite() {
            return Err(Error::InvalidParameter { name: "g", reason: "must be finite".into() });
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta0) {
            return Err(Error::InvalidParameter {
                name: "theta0",
                reason: format!("{} is outside [0, π/2]", self.theta0),
            });
        }
        Ok(())
    }

    /// Copy with a different θ₀, keeping every other coupling.
    pub fn with_theta0(&self, theta0: f64) -> Result<Self> {
        let p = ModelParams { theta0: snap_theta(theta0), ..*self };
        p.validate()?;
        Ok(p)
    }

    /// `cos θ₀`, exactly zero at the sine-Gordon endpoint.
    pub fn cos_theta0(&self) -> f64 {
        if self.theta0 == FRAC_PI_2 {
            0.0
        } else {
            self.theta0.cos()
        }
    }

    pub fn sin_theta0(&self) -> f64 {
        self.theta0.sin()
    }

    /// Coefficient `g cos θ₀` of the scalar backreaction.
    pub fn backreaction(&self) -> f64 {
        self.g * self.cos_theta0()
    }

    /// `e^{iθ}` for the given multiple of θ₀.
    pub fn phase(&self, multiple: f64) -> C64 {
        C64::from_polar(1.0, multiple * self.theta0)
    }
}

fn snap_theta(theta: f64) -> f64 {
    if (theta - FRAC_PI_2).abs() <= THETA_ENDPOINT_SNAP {
        FRAC_PI_2
    } else if theta.abs() <= THETA_ENDPOINT_SNAP {
        0.0
    } else {
        theta
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") })
    }
}

/// Finite-difference stencil used for spatial derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

/// Uniform periodic grid `x_i = i·dx`, `i = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
    pub stencil: Stencil,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter { name: "grid.n", reason: format!("need n ≥ 8, got {n}") });
        }
        positive("grid.length", length)?;
        Ok(GridSpec { n, length, stencil: Stencil::Second })
    }

    pub fn with_stencil(self, stencil: Stencil) -> Self {
        GridSpec { stencil, ..self }
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.n, found: len })
        }
    }
}

/// One time slice of the coupled system.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub phi_t: Vec<f64>,
    pub psi_plus: Vec<C64>,
    pub psi_minus: Vec<C64>,
}

impl FieldState {
    pub fn new(t: f64, phi: Vec<f64>, phi_t: Vec<f64>, psi_plus: Vec<C64>, psi_minus: Vec<C64>) -> Result<Self> {
        let n = phi.len();
        for len in [phi_t.len(), psi_plus.len(), psi_minus.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, found: len });
            }
        }
        Ok(FieldState { t, phi, phi_t, psi_plus, psi_minus })
    }

    pub fn vacuum(spec: &GridSpec) -> Self {
        FieldState {
            t: 0.0,
            phi: vec![0.0; spec.n],
            phi_t: vec![0.0; spec.n],
            psi_plus: vec![ZERO; spec.n],
            psi_minus: vec![ZERO; spec.n],
        }
    }

    /// Samples the four profiles at the grid nodes.
    pub fn from_fn(
        spec: &GridSpec,
        phi: impl Fn(f64) -> f64,
        phi_t: impl Fn(f64) -> f64,
        psi_plus: impl Fn(f64) -> C64,
        psi_minus: impl Fn(f64) -> C64,
    ) -> Self {
        let xs = spec.xs();
        FieldState {
            t: 0.0,
            phi: xs.iter().map(|&x| phi(x)).collect(),
            phi_t: xs.iter().map(|&x| phi_t(x)).collect(),
            psi_plus: xs.iter().map(|&x| psi_plus(x)).collect(),
            psi_minus: xs.iter().map(|&x| psi_minus(x)).collect(),
        }
    }

    /// Random band-limited periodic data: each field is a sum of the lowest
    /// `modes` Fourier modes with coefficients uniform in `[-amplitude, amplitude]`.
    /// Not a solution of anything; used to probe algebraic identities.
    pub fn random_smooth(spec: &GridSpec, rng: &mut impl Rng, modes: usize, amplitude: f64) -> Self {
        let k0 = 2.0 * std::f64::consts::PI / spec.length;
        let mut series = || -> Vec<f64> {
            let coeffs: Vec<(f64, f64)> = (0..=modes)
                .map(|_| (rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude)))
                .collect();
            spec.xs()
                .iter()
                .map(|&x| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| a * (k as f64 * k0 * x).cos() + b * (k as f64 * k0 * x).sin())
                        .sum()
                })
                .collect()
        };
        let phi = series();
        let phi_t = series();
        let (pr, pi, mr, mi) = (series(), series(), series(), series());
        FieldState {
            t: 0.0,
            phi,
            phi_t,
            psi_plus: pr.iter().zip(&pi).map(|(a, b)| C64::new(*a, *b)).collect(),
            psi_minus: mr.iter().zip(&mi).map(|(a, b)| C64::new(*a, *b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn check(&self, spec: &GridSpec) -> Result<()> {
        spec.check_len(self.phi.len())?;
        spec.check_len(self.phi_t.len())?;
        spec.check_len(self.psi_plus.len())?;
        spec.check_len(self.psi_minus.len())
    }

    /// Largest magnitude over all four grids (NaN propagates).
    pub fn max_magnitude(&self) -> f64 {
        let mut m: f64 = 0.0;
        for v in self.phi.iter().chain(self.phi_t.iter()) {
            if v.is_nan() {
                return f64::NAN;
            }
            m = m.max(v.abs());
        }
        for z in self.psi_plus.iter().chain(self.psi_minus.iter()) {
            let a = z.norm();
            if a.is_nan() {
                return f64::NAN;
            }
            m = m.max(a);
        }
        m
    }
}

/// `ψ̄ψ = |ψ₊|² − |ψ₋|²`.
pub fn bilinear(state: &FieldState) -> Vec<f64> {
    state.psi_plus.iter().zip(&state.psi_minus).map(|(p, m)| p.norm_sqr() - m.norm_sqr()).collect()
}

/// `J = ψ₊*ψ₋ + ψ₋*ψ₊ = 2 Re(ψ₊*ψ₋)`.
pub fn vector_current(state: &FieldState) -> Vec<f64> {
    state.psi_plus.iter().zip(&state.psi_minus).map(|(p, m)| 2.0 * (p.conj() * m).re).collect()
}

/// `ψ†ψ = |ψ₊|² + |ψ₋|²`.
pub fn number_density(state: &FieldState) -> Vec<f64> {
    state.psi_plus.iter().zip(&state.psi_minus).map(|(p, m)| p.norm_sqr() + m.norm_sqr()).collect()
}

/// `Ñ = ψ₊*ψ₋ − ψ₋*ψ₊`, purely imaginary.
pub fn axial_combination(state: &FieldState) -> Vec<C64> {
    state.psi_plus.iter().zip(&state.psi_minus).map(|(p, m)| C64::new(0.0, 2.0 * (p.conj() * m).im)).collect()
}

/// Periodic trapezoid rule, summed left to right.
pub fn integrate<T>(values: &[T], spec: &GridSpec) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default,
{
    let mut acc = T::default();
    for &v in values {
        acc = acc + v;
    }
    acc * spec.dx()
}

/// Second-order centred first derivative with periodic wrap-around.
pub fn dx_central<T>(values: &[T], spec: &GridSpec) -> Result<Vec<T>>
where
    T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
{
    spec.check_len(values.len())?;
    let n = values.len();
    let inv = 0.5 / spec.dx();
    Ok((0..n).map(|i| (values[(i + 1) % n] - values[(i + n - 1) % n]) * inv).collect())
}

/// First derivative with the grid's configured stencil.
pub fn derivative<T>(values: &[T], spec: &GridSpec) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    match spec.stencil {
        Stencil::Second => dx_central(values, spec),
        Stencil::Fourth => {
            spec.check_len(values.len())?;
            let n = values.len();
            let inv = 1.0 / (12.0 * spec.dx());
            Ok((0..n)
                .map(|i| {
                    let p1 = values[(i + 1) % n];
                    let p2 = values[(i + 2) % n];
                    let m1 = values[(i + n - 1) % n];
                    let m2 = values[(i + n - 2) % n];
                    ((p1 - m1) * 8.0 - (p2 - m2)) * inv
                })
                .collect())
        }
    }
}

/// Compact second derivative matching the grid's stencil order.
pub fn second_derivative<T>(values: &[T], spec: &GridSpec) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    spec.check_len(values.len())?;
    let n = values.len();
    let dx = spec.dx();
    match spec.stencil {
        Stencil::Second => {
            let inv = 1.0 / (dx * dx);
            Ok((0..n)
                .map(|i| {
                    let c = values[i];
                    ((values[(i + 1) % n] - c) - (c - values[(i + n - 1) % n])) * inv
                })
                .collect())
        }
        Stencil::Fourth => {
            let inv = 1.0 / (12.0 * dx * dx);
            Ok((0..n)
                .map(|i| {
                    let c = values[i];
                    let p1 = values[(i + 1) % n] - c;
                    let m1 = values[(i + n - 1) % n] - c;
                    let p2 = values[(i + 2) % n] - c;
                    let m2 = values[(i + n - 2) % n] - c;
                    ((p1 + m1) * 16.0 - (p2 + m2)) * inv
                })
                .collect())
        }
    }
}

/// `(∂₊, ∂₋) = (½(∂_t + ∂_x), ½(∂_t − ∂_x))`.
pub fn lightcone_pair<T>(dt_grid: &[T], dx_grid: &[T]) -> Result<(Vec<T>, Vec<T>)>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    if dt_grid.len() != dx_grid.len() {
        return Err(Error::LengthMismatch { expected: dt_grid.len(), found: dx_grid.len() });
    }
    let plus = dt_grid.iter().zip(dx_grid).map(|(&t, &x)| (t + x) * 0.5).collect();
    let minus = dt_grid.iter().zip(dx_grid).map(|(&t, &x)| (t - x) * 0.5).collect();
    Ok((plus, minus))
}

pub const SNAPSHOT_HEADER: &str = "x,phi,phi_t,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus";

/// Writes the snapshot as CSV with [`SNAPSHOT_HEADER`].
pub fn write_snapshot_csv(state: &FieldState, spec: &GridSpec, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for i in 0..state.len() {
        let (p, m) = (state.psi_plus[i], state.psi_minus[i]);
        writeln!(out, "{},{},{},{},{},{},{}", spec.x(i), state.phi[i], state.phi_t[i], p.re, p.im, m.re, m.im)?;
    }
    Ok(())
}

pub fn read_snapshot_csv(input: impl BufRead, t: f64) -> Result<FieldState> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Snapshot("empty input".into()))?
        .map_err(|e| Error::Snapshot(e.to_string()))?;
    if header.trim() != SNAPSHOT_HEADER {
        return Err(Error::Snapshot(format!("unexpected header `{header}`")));
    }
    let mut state = FieldState { t, phi: vec![], phi_t: vec![], psi_plus: vec![], psi_minus: vec![] };
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Snapshot(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Snapshot(format!("line {}: {e}", lineno + 2)))?;
        if cols.len() != 7 {
            return Err(Error::Snapshot(format!("line {}: expected 7 columns", lineno + 2)));
        }
        state.phi.push(cols[1]);
        state.phi_t.push(cols[2]);
        state.psi_plus.push(C64::new(cols[3], cols[4]));
        state.psi_minus.push(C64::new(cols[5], cols[6]));
    }
    Ok(state)
}
