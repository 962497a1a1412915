//! Bargmann transform `Bf(z) = 2^{d/4} ∫ f(t) e^{2πt·z − πt² − πz²/2} dt`,
//! the Gaussian-kernel transform `Φf(z) = ∫ e^{−π(t−z)²} f(t) dt`, their
//! relations with the STFT, and Fock-space diagnostics.
//!
//! Both transforms are evaluated by completing the square in `t` with
//! complex coefficients, independently of the STFT code path, so the
//! relations below compare two separate closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::envelope::MixtureBound;
use crate::error::{Error, Result};
use crate::signal::{gaussian_integral, GaussianMixture, GeneralizedGaussian, PhasePoint};
use crate::stft::stft_unchecked;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const DEFAULT_FOCK_RADIUS: f64 = 6.0;
pub const DEFAULT_FOCK_STEP: f64 = 0.02;
/// Tail mass of `‖f‖²` allowed outside the truncation disk before warning.
pub const FOCK_TAIL_TOL: f64 = 1e-9;

/// `z = x + iω ∈ ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint {
    pub z: Vec<Complex64>,
}

impl ComplexPoint {
    pub fn new(z: Vec<Complex64>) -> Self {
        Self { z }
    }

    pub fn new1(x: f64, omega: f64) -> Self {
        Self {
            z: vec![Complex64::new(x, omega)],
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Hermitian norm squared `|x|² + |ω|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.z.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn to_phase(&self) -> PhasePoint {
        PhasePoint {
            x: self.z.iter().map(|v| v.re).collect(),
            omega: self.z.iter().map(|v| v.im).collect(),
        }
    }

    fn bilinear_sqr(&self) -> Complex64 {
        self.z.iter().map(|v| v * v).sum()
    }
}

impl From<&PhasePoint> for ComplexPoint {
    fn from(p: &PhasePoint) -> Self {
        Self {
            z: p.x.iter().zip(&p.omega).map(|(&x, &w)| Complex64::new(x, w)).collect(),
        }
    }
}

fn check(f: &GaussianMixture, z: &ComplexPoint) -> Result<()> {
    if f.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: z.dim(),
        });
    }
    Ok(())
}

/// `∫ term(t)·exp(2π t·z − π|t|²) dt · exp(extra)`; shared by `B` and `Φ`.
fn kernel_integral(term: &GeneralizedGaussian, z: &ComplexPoint, extra: Complex64) -> Complex64 {
    let big_a = term.a + 1.0;
    let b: Vec<Complex64> = term
        .mu
        .iter()
        .zip(&term.nu)
        .zip(&z.z)
        .map(|((&m, &n), &zj)| term.a * m + I * n + zj)
        .collect();
    let mu2: f64 = term.mu.iter().map(|m| m * m).sum();
    term.c * gaussian_integral(big_a, &b, -PI * term.a * mu2 + extra)
}

pub(crate) fn bargmann_unchecked(f: &GaussianMixture, z: &ComplexPoint) -> Complex64 {
    let extra = -PI * z.bilinear_sqr() / 2.0;
    let norm = 2f64.powf(f.dim() as f64 / 4.0);
    f.terms().iter().map(|t| kernel_integral(t, z, extra)).sum::<Complex64>() * norm
}

pub fn bargmann(f: &GaussianMixture, z: &ComplexPoint) -> Result<Complex64> {
    check(f, z)?;
    Ok(bargmann_unchecked(f, z))
}

pub fn phi_transform(f: &GaussianMixture, z: &ComplexPoint) -> Result<Complex64> {
    check(f, z)?;
    let extra = -PI * z.bilinear_sqr();
    Ok(f.terms().iter().map(|t| kernel_integral(t, z, extra)).sum())
}

/// `|V_g f(x,−ω) − 2^{−d/4} e^{πi x·ω} Bf(z) e^{−π|z|²/2}|` with `z = x + iω`.
pub fn verify_bargmann_relation(f: &GaussianMixture, z: &ComplexPoint) -> Result<f64> {
    check(f, z)?;
    let p = z.to_phase();
    let g = GeneralizedGaussian::standard(f.dim());
    let lhs = stft_unchecked(f, &g, &p.conj());
    let xw: f64 = p.x.iter().zip(&p.omega).map(|(x, w)| x * w).sum();
    let d = f.dim() as f64;
    let rhs = 2f64.powf(-d / 4.0)
        * Complex64::from_polar(1.0, PI * xw)
        * bargmann_unchecked(f, z)
        * (-PI * z.norm_sqr() / 2.0).exp();
    Ok((lhs - rhs).norm())
}

/// `| |V_g f(x,−ω)| − e^{−π|ω|²}|Φf(x+iω)| |`.
pub fn phi_identity_residual(f: &GaussianMixture, z: &ComplexPoint) -> Result<f64> {
    check(f, z)?;
    let p = z.to_phase();
    let g = GeneralizedGaussian::standard(f.dim());
    let lhs = stft_unchecked(f, &g, &p.conj()).norm();
    let w2: f64 = p.omega.iter().map(|w| w * w).sum();
    let rhs = (-PI * w2).exp() * phi_transform(f, z)?.norm();
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct FockNorm {
    pub value: f64,
    pub radius: f64,
    pub step: f64,
    /// Upper bound on the squared-norm mass outside the disk.
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// `(∫_ℂ |Bf(z)|² e^{−π|z|²} dA)^{1/2}` by a uniform grid over the disk
/// `|z| ≤ radius` (d = 1).
pub fn fock_norm(f: &GaussianMixture, radius: f64, step: f64) -> Result<FockNorm> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("fock_norm is implemented for d = 1".into()));
    }
    if !(radius > 0.0) || !(step > 0.0) {
        return Err(Error::Domain(format!(
            "radius and step must be positive, got radius={radius}, step={step}"
        )));
    }
    let n = (radius / step).floor() as i64;
    let r2 = radius * radius;
    let mut sum = 0.0;
    for i in -n..=n {
        let x = i as f64 * step;
        for j in -n..=n {
            let w = j as f64 * step;
            let q = x * x + w * w;
            if q > r2 {
                continue;
            }
            let b = bargmann_unchecked(f, &ComplexPoint::new1(x, w));
            sum += b.norm_sqr() * (-PI * q).exp();
        }
    }
    let value = (sum * step * step).max(0.0).sqrt();

    // |Bf|² e^{−π|z|²} = √2·|V_g f(x,−ω)|² for d = 1.
    let bound = MixtureBound::radial(f, &GeneralizedGaussian::standard(1));
    let far = bound.radius_below(1e-30).max(radius);
    let samples = 4000;
    let h = (far - radius) / samples as f64;
    let mut tail = 0.0;
    if h > 0.0 {
        for k in 0..=samples {
            let r = radius + k as f64 * h;
            let w = if k == 0 || k == samples { 0.5 } else { 1.0 };
            let e = bound.eval(r);
            tail += w * 2f64.sqrt() * e * e * 2.0 * PI * r;
        }
        tail *= h;
        // Envelope beyond `far` contributes below 1e−60 per unit area.
    }
    let warning = (tail > FOCK_TAIL_TOL).then(|| {
        format!("truncation radius {radius} leaves tail mass up to {tail:e} outside the disk")
    });
    Ok(FockNorm {
        value,
        radius,
        step,
        tail_bound: tail,
        warning,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryMax {
    pub interior_max: f64,
    pub boundary_max: f64,
    pub interior_argmax: PhasePoint,
    pub boundary_argmax: PhasePoint,
}

/// Samples `|Bf|` on a polar grid over the disk `|z| ≤ radius` and returns
/// the maxima over interior rings and over the rim (d = 1).
pub fn boundary_max_diagnostic(f: &GaussianMixture, radius: f64, rings: usize, angles: usize) -> Result<BoundaryMax> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("boundary_max_diagnostic is implemented for d = 1".into()));
    }
    if !(radius > 0.0) || rings == 0 || angles == 0 {
        return Err(Error::Domain("radius, rings and angles must be positive".into()));
    }
    let eval = |r: f64, th: f64| {
        let (x, w) = (r * th.cos(), r * th.sin());
        (bargmann_unchecked(f, &ComplexPoint::new1(x, w)).norm(), PhasePoint::new1(x, w))
    };
    let (mut interior_max, mut interior_argmax) = eval(0.0, 0.0);
    for k in 1..rings {
        let r = radius * k as f64 / rings as f64;
        for a in 0..angles {
            let (v, p) = eval(r, 2.0 * PI * a as f64 / angles as f64);
            if v > interior_max {
                interior_max = v;
                interior_argmax = p;
            }
        }
    }
    let (mut boundary_max, mut boundary_argmax) = eval(radius, 0.0);
    for a in 1..angles {
        let (v, p) = eval(radius, 2.0 * PI * a as f64 / angles as f64);
        if v > boundary_max {
            boundary_max = v;
            boundary_argmax = p;
        }
    }
    Ok(BoundaryMax {
        interior_max,
        boundary_max,
        interior_argmax,
        boundary_argmax,
    })
}

/// Central-difference Cauchy–Riemann residual `|∂ₓB + i∂_ωB|` at `z` (d = 1).
pub fn cauchy_riemann_residual(f: &GaussianMixture, z: Complex64, h: f64) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("cauchy_riemann_residual is implemented for d = 1".into()));
    }
    let b = |w: Complex64| bargmann_unchecked(f, &ComplexPoint::new(vec![w]));
    let dx = (b(z + h) - b(z - h)) / (2.0 * h);
    let dw = (b(z + I * h) - b(z - I * h)) / (2.0 * h);
    Ok((dx + I * dw).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::stft_closed_form;

    fn fock_ground() -> GaussianMixture {
        GaussianMixture::standard(1).scaled(Complex64::new(2f64.powf(0.25), 0.0))
    }

    #[test]
    fn ground_state_maps_to_one() {
        let f = fock_ground();
        for (x, w) in [(0.0, 0.0), (1.0, -2.0), (-3.0, 0.5)] {
            let b = bargmann(&f, &ComplexPoint::new1(x, w)).unwrap();
            assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{b}");
        }
        let f2 = GaussianMixture::standard(2).scaled(Complex64::new(2f64.sqrt(), 0.0));
        let z = ComplexPoint::new(vec![Complex64::new(0.4, 0.1), Complex64::new(-1.0, 0.7)]);
        assert!((bargmann(&f2, &z).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn zero_signal() {
        let z = GaussianMixture::zero(1);
        assert_eq!(bargmann(&z, &ComplexPoint::new1(1.0, 1.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(fock_norm(&z, 6.0, 0.05).unwrap().value, 0.0);
    }

    #[test]
    fn phi_at_origin_is_inner_product() {
        let f = GaussianMixture::new(
            1,
            vec![GeneralizedGaussian::new(
                Complex64::new(0.3, 0.9),
                Complex64::new(0.7, -0.2),
                vec![0.5],
                vec![-0.8],
            )
            .unwrap()],
        )
        .unwrap();
        let g = GaussianMixture::standard(1);
        let phi0 = phi_transform(&f, &ComplexPoint::new1(0.0, 0.0)).unwrap();
        assert!((phi0 - f.inner_product(&g).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn phi_of_window_on_real_axis() {
        let g = GaussianMixture::standard(1);
        for x in [-1.0, 0.0, 0.6, 2.0] {
            let v = phi_transform(&g, &ComplexPoint::new1(x, 0.0)).unwrap();
            let expected = 0.5f64.sqrt() * (-PI * x * x / 2.0).exp();
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn relation_at_simple_points() {
        let g = GaussianMixture::standard(1);
        assert!(verify_bargmann_relation(&g, &ComplexPoint::new1(0.0, 0.0)).unwrap() < 1e-15);
        assert!(verify_bargmann_relation(&g, &ComplexPoint::new1(1.0, 0.0)).unwrap() < 1e-10);
        assert!(phi_identity_residual(&g, &ComplexPoint::new1(0.7, -1.2)).unwrap() < 1e-12);
    }

    #[test]
    fn fock_norm_matches_l2() {
        for f in [GaussianMixture::standard(1), GaussianMixture::dilated(0.5, 1).unwrap()] {
            let n = fock_norm(&f, DEFAULT_FOCK_RADIUS, DEFAULT_FOCK_STEP).unwrap();
            assert!((n.value - f.l2_norm()).abs() < 1e-4);
            assert!(n.warning.is_none());
        }
    }

    #[test]
    fn fock_norm_warns_on_small_radius() {
        let n = fock_norm(&GaussianMixture::standard(1), 1.0, 0.05).unwrap();
        assert!(n.warning.is_some());
        assert!(n.tail_bound > FOCK_TAIL_TOL);
    }

    #[test]
    fn boundary_diagnostic_for_constant_transform() {
        let d = boundary_max_diagnostic(&fock_ground(), 2.0, 20, 64).unwrap();
        assert!((d.interior_max - d.boundary_max).abs() < 1e-12);
        let d = boundary_max_diagnostic(&GaussianMixture::standard(1), 2.0, 20, 64).unwrap();
        assert!(d.interior_max <= d.boundary_max + 1e-12);
    }

    #[test]
    fn cauchy_riemann_converges_quadratically() {
        let f = GaussianMixture::dilated(0.6, 1)
            .unwrap()
            .time_frequency_shift(&PhasePoint::new1(0.3, -0.4))
            .unwrap();
        let z = Complex64::new(0.4, 0.2);
        let r1 = cauchy_riemann_residual(&f, z, 1e-2).unwrap();
        let r2 = cauchy_riemann_residual(&f, z, 5e-3).unwrap();
        assert!(r1 > 0.0);
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn cross_check_phi_and_bargmann() {
        let f = GaussianMixture::dilated(1.3, 1).unwrap();
        let z = ComplexPoint::new1(0.8, -0.5);
        let lhs = (-PI * 0.25f64).exp() * phi_transform(&f, &z).unwrap().norm();
        let rhs = 2f64.powf(-0.25) * bargmann(&f, &z).unwrap().norm() * (-PI * z.norm_sqr() / 2.0).exp();
        assert!((lhs - rhs).abs() < 1e-12);
        let v = stft_closed_form(&f, &GeneralizedGaussian::standard(1), &z.to_phase().conj()).unwrap();
        assert!((v.norm() - lhs).abs() < 1e-12);
    }
}
