use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tfbound_core::quadrature::{integrate, QuadratureOptions};

/// `p(t)·e^{−πa(t−c)² + 2πiωt}` with its exact integral.
struct GaussianPolynomial {
    coeffs: Vec<f64>,
    a: f64,
    c: f64,
    omega: f64,
}

impl GaussianPolynomial {
    fn random(rng: &mut StdRng) -> Self {
        let degree = rng.gen_range(0..=4);
        Self {
            coeffs: (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            a: rng.gen_range(0.3..3.0),
            c: rng.gen_range(-2.0..2.0),
            omega: rng.gen_range(-5.0..5.0),
        }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let p = self.coeffs.iter().rev().fold(0.0, |acc, &k| acc * t + k);
        let phase = Complex64::from_polar(1.0, 2.0 * PI * self.omega * t);
        p * (-PI * self.a * (t - self.c).powi(2)).exp() * phase
    }

    /// Completing the square gives `e^{K}·∫ p(t) e^{−πa(t−s)²}` with the
    /// complex center `s = c + iω/a`; central moments are those of a real Gaussian.
    fn exact(&self) -> Complex64 {
        let a = self.a;
        let s = Complex64::new(self.c, self.omega / a);
        let k = PI * a * (s * s - self.c * self.c);
        let m0 = a.powf(-0.5);
        let var = 1.0 / (2.0 * PI * a);
        let central = [m0, 0.0, m0 * var, 0.0, 3.0 * m0 * var * var];
        let binom = |n: usize, r: usize| (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        let mut total = Complex64::new(0.0, 0.0);
        for (n, &coef) in self.coeffs.iter().enumerate() {
            let mut moment = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                moment += binom(n, j) * s.powu((n - j) as u32) * central[j];
            }
            total += coef * moment;
        }
        total * k.exp()
    }

    fn scale(&self) -> f64 {
        1.0 / self.a.sqrt()
    }
}

#[test]
fn error_estimate_bounds_true_error() {
    let mut rng = StdRng::seed_from_u64(2024);
    let opts = QuadratureOptions::with_tol(1e-10);
    let mut worst_ratio = 0.0f64;
    for _ in 0..1000 {
        let g = GaussianPolynomial::random(&mut rng);
        let r = integrate(|t| g.eval(t), g.c, g.scale(), &opts.oscillating(g.omega)).unwrap();
        let err = (r.value - g.exact()).norm();
        assert!(err <= r.error_estimate, "error {err:e} above estimate {:e}", r.error_estimate);
        assert!(r.error_estimate <= 1e-10);
        worst_ratio = worst_ratio.max(err / r.error_estimate);
    }
    assert!(worst_ratio <= 1.0);
}

#[test]
fn halving_tolerance_does_not_increase_error() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let g = GaussianPolynomial::random(&mut rng);
        let exact = g.exact();
        let mut previous = f64::INFINITY;
        for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6] {
            let r = integrate(|t| g.eval(t), g.c, g.scale(), &QuadratureOptions::with_tol(tol).oscillating(g.omega)).unwrap();
            let err = (r.value - exact).norm();
            assert!(err <= tol);
            // Errors far below the tolerance are at roundoff level and may jitter.
            assert!(err <= previous.max(1e-13), "tol {tol}: {err:e} > {previous:e}");
            previous = err;
        }
    }
}

#[test]
fn linearity_within_error_estimates() {
    let mut rng = StdRng::seed_from_u64(99);
    let opts = QuadratureOptions::with_tol(1e-11);
    for _ in 0..20 {
        let f = GaussianPolynomial::random(&mut rng);
        let h = GaussianPolynomial { c: f.c, ..GaussianPolynomial::random(&mut rng) };
        let (alpha, beta) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4));
        let w = f.omega.abs().max(h.omega.abs());
        let scale = f.scale().max(h.scale());
        let rf = integrate(|t| f.eval(t), f.c, scale, &opts.oscillating(w)).unwrap();
        let rh = integrate(|t| h.eval(t), f.c, scale, &opts.oscillating(w)).unwrap();
        let rs = integrate(|t| alpha * f.eval(t) + beta * h.eval(t), f.c, scale, &opts.oscillating(w)).unwrap();
        let bound = alpha.norm() * rf.error_estimate + beta.norm() * rh.error_estimate + rs.error_estimate;
        assert!((rs.value - (alpha * rf.value + beta * rh.value)).norm() <= bound);
    }
}

#[test]
fn strong_modulation() {
    let g = GaussianPolynomial { coeffs: vec![1.0], a: 1.0, c: 0.0, omega: 50.0 };
    let r = integrate(|t| g.eval(t), 0.0, 1.0, &QuadratureOptions::with_tol(1e-12).oscillating(50.0)).unwrap();
    assert!((r.value - g.exact()).norm() < 1e-12);
}
