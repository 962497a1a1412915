//! Phase-space rotations in one dimension and their metaplectic
//! realization, the fractional Fourier transform `F_θ`.
//!
//! `F_θ` acts on each term `amp · exp(−π a t² + 2π b t + κ)` in closed form
//! with `D = cos θ + i a sin θ`:
//!
//! ```text
//! a' = (a cos θ + i sin θ) / D,   b' = b / D,   κ' = κ + iπ b² sin θ / D,
//! amp' = amp · e^{iθ/2} · D^{−1/2}
//! ```
//!
//! `F_{π/2}` is the Fourier transform `f̂(ω) = ∫ f(t) e^{−2πitω} dt` and
//! `F_θ F_φ = F_{θ+φ}` exactly once `D^{−1/2}` follows `θ` continuously.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};
use crate::stft::stft_unchecked;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation {
    pub theta: f64,
}

impl Rotation {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    /// `[[cos θ, sin θ], [−sin θ, cos θ]]` acting on `(x, ω)`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [[c, s], [-s, c]]
    }

    pub fn inverse(&self) -> Self {
        Self { theta: -self.theta }
    }

    pub fn apply(&self, z: &PhasePoint) -> Result<PhasePoint> {
        if z.dim() != 1 {
            return Err(Error::Unsupported(format!(
                "phase-space rotations are implemented for d = 1 (got d = {})",
                z.dim()
            )));
        }
        let m = self.matrix();
        let (x, w) = (z.x[0], z.omega[0]);
        Ok(PhasePoint::new1(m[0][0] * x + m[0][1] * w, m[1][0] * x + m[1][1] * w))
    }
}

pub fn rotate(z: &PhasePoint, theta: f64) -> Result<PhasePoint> {
    Rotation::new(theta).apply(z)
}

/// Transformed signal plus the branch of `D^{−1/2}` that was used:
/// `θ = θ₀ + branch·π` with `θ₀ ∈ (−π/2, π/2]`.
#[derive(Clone, Debug)]
pub struct Frft {
    pub signal: GaussianMixture,
    pub theta: f64,
    pub branch: i64,
}

/// Continuous argument of `D(θ) = cos θ + i a sin θ` with `arg D(0) = 0`.
///
/// `D(θ + π) = −D(θ)`, and on `(−π/2, π/2)` the curve `D/cos θ` is the line
/// `1 + i a tan θ`, which meets the real axis only at 1.
fn continuous_arg(a: Complex64, theta: f64) -> (f64, i64) {
    let k = ((theta - FRAC_PI_2) / PI).ceil();
    let theta0 = theta - k * PI;
    let base = if (theta0 - FRAC_PI_2).abs() < 1e-300 {
        (I * a).arg()
    } else {
        (1.0 + I * a * theta0.tan()).arg()
    };
    (base + k * PI, k as i64)
}

fn frft_term(t: &GeneralizedGaussian, theta: f64) -> Result<GeneralizedGaussian> {
    let (a, b, kappa) = t.exponent_form();
    let (s, c) = theta.sin_cos();
    let d = c + I * a * s;
    let (arg, _) = continuous_arg(a, theta);
    let root_inv = Complex64::from_polar(d.norm().powf(-0.5), -arg / 2.0);
    let amp = t.c * Complex64::from_polar(1.0, theta / 2.0) * root_inv;
    let a2 = (a * c + I * s) / d;
    let b2: Vec<Complex64> = b.iter().map(|bj| bj / d).collect();
    let k2 = kappa + I * PI * b[0] * b[0] * s / d;
    if !(a2.re > 0.0) {
        return Err(Error::Domain(format!(
            "transformed spread {a2} left the right half-plane"
        )));
    }
    GeneralizedGaussian::from_exponent_form(amp, a2, &b2, k2)
}

pub fn frft_with_branch(f: &GaussianMixture, theta: f64) -> Result<Frft> {
    if f.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "the fractional Fourier transform is implemented for d = 1 (got d = {})",
            f.dim()
        )));
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("angle must be finite, got {theta}")));
    }
    let terms = f.terms().iter().map(|t| frft_term(t, theta)).collect::<Result<Vec<_>>>()?;
    Ok(Frft {
        signal: GaussianMixture::new(1, terms)?,
        theta,
        branch: continuous_arg(Complex64::new(1.0, 0.0), theta).1,
    })
}

pub fn frft(f: &GaussianMixture, theta: f64) -> Result<GaussianMixture> {
    Ok(frft_with_branch(f, theta)?.signal)
}

/// `| |V_g f(R_{−θ} z)| − |V_g F_θ f(z)| |` for the standard window.
pub fn verify_covariance(f: &GaussianMixture, theta: f64, z: &PhasePoint) -> Result<f64> {
    let g = GeneralizedGaussian::standard(1);
    f.check_dim(z.dim())?;
    let back = rotate(z, -theta)?;
    let lhs = stft_unchecked(f, &g, &back).norm();
    let rhs = stft_unchecked(&frft(f, theta)?, &g, z).norm();
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureOptions};

    fn sample_signal() -> GaussianMixture {
        GaussianMixture::new(
            1,
            vec![
                GeneralizedGaussian::new(Complex64::new(0.7, 0.2), Complex64::new(0.8, 0.3), vec![0.4], vec![-0.6])
                    .unwrap(),
                GeneralizedGaussian::new(Complex64::new(-0.3, 0.5), Complex64::new(1.6, -0.4), vec![-1.0], vec![0.9])
                    .unwrap(),
            ],
        )
        .unwrap()
    }

    fn max_diff(f: &GaussianMixture, h: &GaussianMixture) -> f64 {
        (-40..=40)
            .map(|k| {
                let t = k as f64 * 0.1;
                (f.evaluate(&[t]).unwrap() - h.evaluate(&[t]).unwrap()).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn rotation_matrix_conventions() {
        let r = Rotation::new(0.83);
        let m = r.matrix();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).abs() < 1e-14);
        let z = rotate(&PhasePoint::new1(1.0, 0.0), FRAC_PI_2).unwrap();
        assert!(z.x[0].abs() < 1e-15 && (z.omega[0] + 1.0).abs() < 1e-15);
        let p = PhasePoint::new1(0.3, -1.7);
        let back = rotate(&rotate(&p, 2.1).unwrap(), -2.1).unwrap();
        assert!(back.sub(&p).norm() < 1e-14);
        assert!((rotate(&p, 2.1).unwrap().norm() - p.norm()).abs() < 1e-14);
        assert!(rotate(&PhasePoint::origin(2), 1.0).is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let f = sample_signal();
        assert!(max_diff(&frft(&f, 0.0).unwrap(), &f) < 1e-15);
    }

    #[test]
    fn window_is_an_eigenfunction() {
        let g = GaussianMixture::standard(1);
        for theta in [0.3, FRAC_PI_2, 2.0, -1.2, 7.5] {
            let h = frft(&g, theta).unwrap();
            let t = &h.terms()[0];
            assert!((t.a - 1.0).norm() < 1e-14);
            assert!((t.c.norm() - 1.0).abs() < 1e-14);
            assert!(t.mu[0].abs() < 1e-14 && t.nu[0].abs() < 1e-14);
        }
    }

    #[test]
    fn quarter_turn_is_the_fourier_transform() {
        let f = sample_signal();
        let fh = frft(&f, FRAC_PI_2).unwrap();
        let opts = QuadratureOptions::with_tol(1e-12);
        for w in [-1.5f64, -0.2, 0.0, 0.7, 2.0] {
            let exact = integrate(
                |t| f.evaluate(&[t]).unwrap() * Complex64::from_polar(1.0, -2.0 * PI * t * w),
                0.0,
                2.0,
                &opts.oscillating(w.abs() + 1.0),
            )
            .unwrap()
            .value;
            assert!((fh.evaluate(&[w]).unwrap() - exact).norm() < 1e-9, "ω={w}");
        }
    }

    #[test]
    fn dilated_fourier_transform() {
        let lambda = 0.6;
        let f = GaussianMixture::dilated(lambda, 1).unwrap();
        let fh = frft(&f, FRAC_PI_2).unwrap();
        let t = &fh.terms()[0];
        assert!((t.a - Complex64::new(1.0 / (lambda * lambda), 0.0)).norm() < 1e-13);
        assert!((t.c - Complex64::new(1.0 / lambda, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn half_turn_is_parity_and_full_turn_is_identity() {
        let f = sample_signal();
        let p = frft(&f, PI).unwrap();
        for s in [-1.3, 0.2, 2.2] {
            assert!((p.evaluate(&[s]).unwrap() - f.evaluate(&[-s]).unwrap()).norm() < 1e-13);
        }
        assert!(max_diff(&frft(&f, 2.0 * PI).unwrap(), &f) < 1e-13);
    }

    #[test]
    fn group_law_and_unitarity() {
        let f = sample_signal();
        for (t1, t2) in [(0.4, 0.9), (1.2, 2.5), (-0.7, 3.3), (3.0, 3.0)] {
            let twice = frft(&frft(&f, t1).unwrap(), t2).unwrap();
            let once = frft(&f, t1 + t2).unwrap();
            assert!(max_diff(&twice, &once) < 1e-12, "θ1={t1} θ2={t2}");
            assert!((once.l2_norm() - f.l2_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_records_half_turns() {
        let f = GaussianMixture::standard(1);
        assert_eq!(frft_with_branch(&f, 0.5).unwrap().branch, 0);
        assert_eq!(frft_with_branch(&f, FRAC_PI_2).unwrap().branch, 0);
        assert_eq!(frft_with_branch(&f, 2.0).unwrap().branch, 1);
        assert_eq!(frft_with_branch(&f, -2.0).unwrap().branch, -1);
    }

    #[test]
    fn covariance_residuals() {
        let f = sample_signal();
        let z = PhasePoint::new1(0.5, -0.9);
        assert_eq!(verify_covariance(&f, 0.0, &z).unwrap(), 0.0);
        for theta in [0.3, 1.1, FRAC_PI_2, 2.9, -2.2] {
            assert!(verify_covariance(&f, theta, &z).unwrap() < 1e-12);
            let g = GaussianMixture::standard(1);
            assert!(verify_covariance(&g, theta, &z).unwrap() < 1e-14);
        }
    }
}
