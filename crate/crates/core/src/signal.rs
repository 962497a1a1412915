//! Signal classes and exact Gaussian-class arithmetic.
//!
//! A [`GeneralizedGaussian`] is the function
//! `t ↦ c·exp(−π a |t−μ|² + 2πi ν·t)` on `ℝ^d` with a complex isotropic
//! spread `a`, `Re(a) > 0`. Finite sums of them ([`GaussianMixture`]) are
//! closed under time-frequency shifts and fractional Fourier transforms, and
//! every inner product between them is a Gaussian integral with a closed
//! form. [`SampledSignal`] covers the discrete, one-dimensional case.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point `z = (x, ω)` of the time-frequency plane `ℝ^{2d}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Domain("phase point needs d >= 1".into()));
        }
        if x.len() != omega.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: omega.len(),
            });
        }
        if x.iter().chain(&omega).any(|v| !v.is_finite()) {
            return Err(Error::Domain("phase point entries must be finite".into()));
        }
        Ok(Self { x, omega })
    }

    /// One-dimensional point `(x, ω)`.
    pub fn new1(x: f64, omega: f64) -> Self {
        Self {
            x: vec![x],
            omega: vec![omega],
        }
    }

    pub fn origin(d: usize) -> Self {
        Self {
            x: vec![0.0; d],
            omega: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn norm(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.omega)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a - b).collect(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> PhasePoint {
        PhasePoint {
            x: self.x.iter().map(|v| -v).collect(),
            omega: self.omega.iter().map(|v| -v).collect(),
        }
    }

    /// `(x, −ω)`, the reflection appearing in the Bargmann/STFT relations.
    pub fn conj(&self) -> PhasePoint {
        PhasePoint {
            x: self.x.clone(),
            omega: self.omega.iter().map(|v| -v).collect(),
        }
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.x.len() != d || self.omega.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.x.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={:?}, omega={:?})", self.x, self.omega)
    }
}

/// `t ↦ c·exp(−π a |t−μ|² + 2πi ν·t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedGaussian {
    pub c: Complex64,
    pub a: Complex64,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl GeneralizedGaussian {
    pub fn new(c: Complex64, a: Complex64, mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if !(a.re > 0.0) || !a.im.is_finite() {
            return Err(Error::InvalidSpread { re: a.re, im: a.im });
        }
        if mu.is_empty() {
            return Err(Error::Domain("a Gaussian term needs d >= 1".into()));
        }
        if mu.len() != nu.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len(),
                found: nu.len(),
            });
        }
        if !c.re.is_finite() || !c.im.is_finite() || mu.iter().chain(&nu).any(|v| !v.is_finite()) {
            return Err(Error::Domain("Gaussian parameters must be finite".into()));
        }
        Ok(Self { c, a, mu, nu })
    }

    /// The analysis window `g(t) = e^{−π|t|²}`.
    pub fn standard(d: usize) -> Self {
        Self {
            c: Complex64::new(1.0, 0.0),
            a: Complex64::new(1.0, 0.0),
            mu: vec![0.0; d],
            nu: vec![0.0; d],
        }
    }

    /// `f_λ(t) = e^{−πλ²|t|²}`.
    pub fn dilated(lambda: f64, d: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("dilation must be positive, got {lambda}")));
        }
        Ok(Self {
            a: Complex64::new(lambda * lambda, 0.0),
            ..Self::standard(d)
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn evaluate(&self, t: &[f64]) -> Complex64 {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for ((tj, mj), nj) in t.iter().zip(&self.mu).zip(&self.nu) {
            r2 += (tj - mj) * (tj - mj);
            phase += nj * tj;
        }
        self.c * (-PI * self.a * r2 + 2.0 * PI * phase * I).exp()
    }

    /// `π(z)` applied to this term: `μ → μ+x`, `ν → ν+ω`, `c → c·e^{−2πi ν·x}`.
    pub fn shifted(&self, z: &PhasePoint) -> Self {
        let nu_x: f64 = self.nu.iter().zip(&z.x).map(|(n, x)| n * x).sum();
        Self {
            c: self.c * Complex64::from_polar(1.0, -2.0 * PI * nu_x),
            a: self.a,
            mu: self.mu.iter().zip(&z.x).map(|(m, x)| m + x).collect(),
            nu: self.nu.iter().zip(&z.omega).map(|(n, w)| n + w).collect(),
        }
    }

    /// Coefficients of the exponent `−π a t² + 2π b·t + κ` with the
    /// amplitude kept outside: `self = c · exp(−π a t² + 2π b·t + κ)`.
    pub(crate) fn exponent_form(&self) -> (Complex64, Vec<Complex64>, Complex64) {
        let b = self
            .mu
            .iter()
            .zip(&self.nu)
            .map(|(&m, &n)| self.a * m + I * n)
            .collect();
        let mu2: f64 = self.mu.iter().map(|m| m * m).sum();
        (self.a, b, -PI * self.a * mu2)
    }

    /// Rebuilds a term from `amp · exp(−π a t² + 2π b·t + κ)`.
    pub(crate) fn from_exponent_form(
        amp: Complex64,
        a: Complex64,
        b: &[Complex64],
        kappa: Complex64,
    ) -> Result<Self> {
        if !(a.re > 0.0) {
            return Err(Error::InvalidSpread { re: a.re, im: a.im });
        }
        let mu: Vec<f64> = b.iter().map(|bj| bj.re / a.re).collect();
        let nu: Vec<f64> = b
            .iter()
            .zip(&mu)
            .map(|(bj, m)| bj.im - a.im * m)
            .collect();
        let mu2: f64 = mu.iter().map(|m| m * m).sum();
        let c = amp * (kappa + PI * a * mu2).exp();
        Self::new(c, a, mu, nu)
    }

    /// `∫ self(t)·conj(other(t)) dt` by completing the square.
    pub fn inner(&self, other: &GeneralizedGaussian) -> Complex64 {
        let alpha = self.a;
        let beta = other.a.conj();
        let big_a = alpha + beta;
        let inv_a = big_a.inv();
        let mut expo = Complex64::new(0.0, 0.0);
        for j in 0..self.mu.len() {
            let (m1, m2) = (self.mu[j], other.mu[j]);
            let dmu = m1 - m2;
            let dnu = self.nu[j] - other.nu[j];
            let center = (alpha * m1 + beta * m2) * inv_a;
            expo += -alpha * beta * dmu * dmu * inv_a + 2.0 * I * dnu * center - dnu * dnu * inv_a;
        }
        let d = self.mu.len() as i32;
        self.c * other.c.conj() * big_a.sqrt().powi(-d) * (PI * expo).exp()
    }
}

/// `∫_{ℝ^d} exp(−π A |t|² + 2π B·t + K) dt = A^{−d/2} exp(π B·B / A + K)`,
/// valid for `Re(A) > 0`. `B·B` is the bilinear (not Hermitian) square.
pub(crate) fn gaussian_integral(a: Complex64, b: &[Complex64], k: Complex64) -> Complex64 {
    let bb: Complex64 = b.iter().map(|v| v * v).sum();
    let d = b.len() as i32;
    a.sqrt().powi(-d) * (PI * bb / a + k).exp()
}

/// A finite sum of [`GeneralizedGaussian`] terms sharing one dimension.
/// The empty mixture is the zero signal.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    d: usize,
    terms: Vec<GeneralizedGaussian>,
}

impl GaussianMixture {
    pub fn new(d: usize, terms: Vec<GeneralizedGaussian>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("signal dimension must be >= 1".into()));
        }
        for term in &terms {
            if term.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: term.dim(),
                });
            }
        }
        Ok(Self { d, terms })
    }

    pub fn zero(d: usize) -> Self {
        Self { d, terms: Vec::new() }
    }

    pub fn single(term: GeneralizedGaussian) -> Self {
        Self {
            d: term.dim(),
            terms: vec![term],
        }
    }

    pub fn standard(d: usize) -> Self {
        Self::single(GeneralizedGaussian::standard(d))
    }

    pub fn dilated(lambda: f64, d: usize) -> Result<Self> {
        Ok(Self::single(GeneralizedGaussian::dilated(lambda, d)?))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[GeneralizedGaussian] {
        &self.terms
    }

    /// True for the empty mixture or when every amplitude vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.c == Complex64::new(0.0, 0.0))
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.d != d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: d,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, t: &[f64]) -> Result<Complex64> {
        self.check_dim(t.len())?;
        Ok(self.evaluate_unchecked(t))
    }

    pub(crate) fn evaluate_unchecked(&self, t: &[f64]) -> Complex64 {
        self.terms.iter().map(|term| term.evaluate(t)).sum()
    }

    /// `π(z)f = M_ω T_x f`.
    pub fn time_frequency_shift(&self, z: &PhasePoint) -> Result<Self> {
        z.check_dim(self.d)?;
        Ok(Self {
            d: self.d,
            terms: self.terms.iter().map(|t| t.shifted(z)).collect(),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|t| GeneralizedGaussian { c: t.c * factor, ..t.clone() })
                .collect(),
        }
    }

    /// Termwise sum `self + other`.
    pub fn plus(&self, other: &GaussianMixture) -> Result<Self> {
        self.check_dim(other.d)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { d: self.d, terms })
    }

    /// `⟨self, other⟩ = ∫ self(t)·conj(other(t)) dt` in closed form.
    pub fn inner_product(&self, other: &GaussianMixture) -> Result<Complex64> {
        self.check_dim(other.d)?;
        Ok(self
            .terms
            .iter()
            .flat_map(|f| other.terms.iter().map(move |h| f.inner(h)))
            .sum())
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: f64 = self
            .terms
            .iter()
            .flat_map(|f| self.terms.iter().map(move |h| f.inner(h)))
            .sum::<Complex64>()
            .re;
        sq.max(0.0).sqrt()
    }

    /// Samples a one-dimensional mixture at `t0 + k·dt`, `k = 0..n`.
    pub fn sample(&self, t0: f64, dt: f64, n: usize) -> Result<SampledSignal> {
        if self.d != 1 {
            return Err(Error::Unsupported(format!(
                "sampling requires d = 1, got d = {}",
                self.d
            )));
        }
        let samples = (0..n)
            .map(|k| self.evaluate_unchecked(&[t0 + k as f64 * dt]))
            .collect();
        SampledSignal::new(samples, t0, dt)
    }
}

/// Uniformly sampled one-dimensional signal `samples[k] ≈ f(t0 + k·dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    t0: f64,
    dt: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<Complex64>, t0: f64, dt: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("a sampled signal needs at least 2 samples".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::Domain(format!("invalid sampling grid t0={t0}, dt={dt}")));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Domain("samples must be finite".into()));
        }
        Ok(Self { samples, t0, dt })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Discrete norm `sqrt(dt·Σ|f_k|²)`.
    pub fn l2_norm(&self) -> f64 {
        (self.dt * self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>()).sqrt()
    }
}

// JSON signal specification: {"d": 1, "terms": [{"c": [re, im], "a": [re, im], "mu": [..], "nu": [..]}]}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: [f64; 2],
    pub a: [f64; 2],
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub d: usize,
    pub terms: Vec<TermSpec>,
}

impl TryFrom<MixtureSpec> for GaussianMixture {
    type Error = Error;

    fn try_from(spec: MixtureSpec) -> Result<Self> {
        if spec.d == 0 {
            return Err(Error::InvalidSignal("field `d` must be >= 1".into()));
        }
        let mut terms = Vec::with_capacity(spec.terms.len());
        for (k, t) in spec.terms.into_iter().enumerate() {
            if t.mu.len() != spec.d {
                return Err(Error::InvalidSignal(format!(
                    "terms[{k}].mu has length {}, expected d = {}",
                    t.mu.len(),
                    spec.d
                )));
            }
            if t.nu.len() != spec.d {
                return Err(Error::InvalidSignal(format!(
                    "terms[{k}].nu has length {}, expected d = {}",
                    t.nu.len(),
                    spec.d
                )));
            }
            let term = GeneralizedGaussian::new(
                Complex64::new(t.c[0], t.c[1]),
                Complex64::new(t.a[0], t.a[1]),
                t.mu,
                t.nu,
            )
            .map_err(|e| Error::InvalidSignal(format!("terms[{k}]: {e}")))?;
            terms.push(term);
        }
        GaussianMixture::new(spec.d, terms)
    }
}

impl From<&GaussianMixture> for MixtureSpec {
    fn from(f: &GaussianMixture) -> Self {
        MixtureSpec {
            d: f.d,
            terms: f
                .terms
                .iter()
                .map(|t| TermSpec {
                    c: [t.c.re, t.c.im],
                    a: [t.a.re, t.a.im],
                    mu: t.mu.clone(),
                    nu: t.nu.clone(),
                })
                .collect(),
        }
    }
}

impl GaussianMixture {
    /// Parses the signal JSON format. Syntax errors carry line and column.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: MixtureSpec = serde_json::from_str(text).map_err(|e| {
            Error::InvalidSignal(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        spec.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MixtureSpec::from(self)).expect("mixture spec serializes")
    }
}
