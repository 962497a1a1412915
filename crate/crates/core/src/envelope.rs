//! Quantitative decay of `|V_g f|` for Gaussian-class signals.
//!
//! For a single term, `log|V_g f(x, ω)|` is a real quadratic polynomial in
//! `(x, ω)` whose quadratic part is negative definite. Bounding that
//! polynomial radially (or in `|x|` after maximizing over `ω`) gives
//! explicit truncation radii for searches and tail estimates.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exact `log|V_h f(x, ω)|` for one term `f` against window `h`:
/// `log_amp + Σ_j [qxx x_j² + qxw x_j ω_j + qww ω_j² + lx_j x_j + lw_j ω_j] + k`.
#[derive(Clone, Debug)]
pub struct TermEnvelope {
    pub log_amp: f64,
    pub qxx: f64,
    pub qxw: f64,
    pub qww: f64,
    pub lx: Vec<f64>,
    pub lw: Vec<f64>,
    pub k: f64,
}

impl TermEnvelope {
    pub fn new(term: &GeneralizedGaussian, window: &GeneralizedGaussian) -> Self {
        let a = term.a;
        let b = window.a.conj();
        let big_a = a + b;
        let inv_a = big_a.inv();
        let d = term.dim();

        let qxx = PI * (b * b * inv_a - b).re;
        let qww = -PI * inv_a.re;
        let qxw = 2.0 * PI * (b * inv_a).im;

        let mut lx = Vec::with_capacity(d);
        let mut lw = Vec::with_capacity(d);
        let mut k = 0.0;
        for j in 0..d {
            let mg = window.mu[j];
            let beta = a * term.mu[j] + b * mg + I * (term.nu[j] - window.nu[j]);
            lx.push(PI * (2.0 * beta * b * inv_a - 2.0 * b * mg).re);
            lw.push(2.0 * PI * (beta * inv_a).im);
            k += PI * (beta * beta * inv_a - a * term.mu[j] * term.mu[j] - b * mg * mg).re;
        }
        let log_amp = (term.c.norm() * window.c.norm()).ln() - 0.5 * d as f64 * big_a.norm().ln();
        Self {
            log_amp,
            qxx,
            qxw,
            qww,
            lx,
            lw,
            k,
        }
    }

    pub fn log_abs(&self, z: &PhasePoint) -> f64 {
        let mut s = self.log_amp + self.k;
        for j in 0..self.lx.len() {
            let (x, w) = (z.x[j], z.omega[j]);
            s += self.qxx * x * x + self.qxw * x * w + self.qww * w * w + self.lx[j] * x + self.lw[j] * w;
        }
        s
    }

    /// Smallest eigenvalue of the negated quadratic form (positive).
    pub fn curvature(&self) -> f64 {
        let (p, q, r) = (-self.qxx, -0.5 * self.qxw, -self.qww);
        let mean = 0.5 * (p + r);
        let dev = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        mean - dev
    }

    /// `|V| ≤ exp(−α|z|² + β|z| + γ)` over all of `ℝ^{2d}`.
    pub fn radial_bound(&self) -> GaussianBound {
        let beta = self
            .lx
            .iter()
            .chain(&self.lw)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        GaussianBound {
            alpha: self.curvature(),
            beta,
            gamma: self.log_amp + self.k,
        }
    }

    /// `sup_ω |V(x, ω)| ≤ exp(−κ|x|² + β|x| + γ)`.
    pub fn time_bound(&self) -> GaussianBound {
        let kappa = -(self.qxx - self.qxw * self.qxw / (4.0 * self.qww));
        let mut beta2 = 0.0;
        let mut gamma = self.log_amp + self.k;
        for j in 0..self.lx.len() {
            let l = self.lx[j] - self.qxw * self.lw[j] / (2.0 * self.qww);
            beta2 += l * l;
            gamma -= self.lw[j] * self.lw[j] / (4.0 * self.qww);
        }
        GaussianBound {
            alpha: kappa,
            beta: beta2.sqrt(),
            gamma,
        }
    }
}

/// `r ↦ exp(−α r² + β r + γ)` for `r ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBound {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GaussianBound {
    pub fn eval(&self, r: f64) -> f64 {
        (-self.alpha * r * r + self.beta * r + self.gamma).exp()
    }

    /// Smallest `r` beyond which the bound stays below `eps`.
    pub fn radius_below(&self, eps: f64) -> f64 {
        if !(self.alpha > 0.0) {
            return f64::INFINITY;
        }
        let target = eps.ln();
        let disc = self.beta * self.beta + 4.0 * self.alpha * (self.gamma - target);
        if disc <= 0.0 {
            return 0.0;
        }
        ((self.beta + disc.sqrt()) / (2.0 * self.alpha)).max(0.0)
    }
}

/// Sum of per-term bounds for a mixture.
#[derive(Clone, Debug)]
pub struct MixtureBound {
    pub terms: Vec<GaussianBound>,
}

impl MixtureBound {
    pub fn radial(f: &GaussianMixture, window: &GeneralizedGaussian) -> Self {
        Self {
            terms: f
                .terms()
                .iter()
                .map(|t| TermEnvelope::new(t, window).radial_bound())
                .collect(),
        }
    }

    pub fn time(f: &GaussianMixture, window: &GeneralizedGaussian) -> Self {
        Self {
            terms: f
                .terms()
                .iter()
                .map(|t| TermEnvelope::new(t, window).time_bound())
                .collect(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|b| b.eval(r)).sum()
    }

    pub fn radius_below(&self, eps: f64) -> f64 {
        let n = self.terms.len().max(1) as f64;
        self.terms
            .iter()
            .map(|b| b.radius_below(eps / n))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::stft_closed_form;

    fn term(c: (f64, f64), a: (f64, f64), mu: f64, nu: f64) -> GeneralizedGaussian {
        GeneralizedGaussian::new(
            Complex64::new(c.0, c.1),
            Complex64::new(a.0, a.1),
            vec![mu],
            vec![nu],
        )
        .unwrap()
    }

    #[test]
    fn log_abs_is_exact_for_single_terms() {
        let windows = [
            GeneralizedGaussian::standard(1),
            term((0.7, 0.2), (1.4, -0.3), 0.4, -0.6),
        ];
        let terms = [
            term((1.0, 0.0), (1.0, 0.0), 0.0, 0.0),
            term((0.3, -0.8), (0.25, 0.4), 1.2, -0.7),
            term((-0.5, 0.1), (2.5, -1.0), -0.9, 1.8),
        ];
        for w in &windows {
            for t in &terms {
                let env = TermEnvelope::new(t, w);
                let f = GaussianMixture::single(t.clone());
                for (x, om) in [(0.0, 0.0), (1.1, -0.4), (-2.0, 1.5), (0.3, 2.2)] {
                    let z = PhasePoint::new1(x, om);
                    let exact = stft_closed_form(&f, w, &z).unwrap().norm().ln();
                    assert!((env.log_abs(&z) - exact).abs() < 1e-12, "{exact} vs {}", env.log_abs(&z));
                }
            }
        }
    }

    #[test]
    fn standard_gaussian_form() {
        let g = GeneralizedGaussian::standard(1);
        let env = TermEnvelope::new(&g, &g);
        assert!((env.qxx + PI / 2.0).abs() < 1e-15);
        assert!((env.qww + PI / 2.0).abs() < 1e-15);
        assert!(env.qxw.abs() < 1e-15);
        assert!((env.curvature() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_dominate_samples() {
        let f = GaussianMixture::new(
            1,
            vec![
                term((0.3, -0.8), (0.25, 0.4), 1.2, -0.7),
                term((-0.5, 0.1), (2.5, -1.0), -0.9, 1.8),
            ],
        )
        .unwrap();
        let g = GeneralizedGaussian::standard(1);
        let radial = MixtureBound::radial(&f, &g);
        let time = MixtureBound::time(&f, &g);
        for i in -30..=30 {
            for j in -30..=30 {
                let z = PhasePoint::new1(0.2 * i as f64, 0.2 * j as f64);
                let v = stft_closed_form(&f, &g, &z).unwrap().norm();
                assert!(v <= radial.eval(z.norm()) * (1.0 + 1e-12));
                assert!(v <= time.eval(z.x[0].abs()) * (1.0 + 1e-12));
            }
        }
        let r = radial.radius_below(1e-12);
        assert!(radial.eval(r) <= 1e-12 * (1.0 + 1e-9));
        assert!(radial.eval(r + 1.0) < 1e-12);
    }
}
