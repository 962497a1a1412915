//! Random signals and phase-space points for property runs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};

/// Mixtures of `1..=max_terms` terms with `Re a = λ²`, `λ` uniform in
/// `lambda`, `Im a` uniform in `[−chirp, chirp]`, centers `μ, ν` uniform in
/// `[−center, center]` and amplitudes of modulus uniform in `amplitude`
/// with uniform phase.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureDistribution {
    pub d: usize,
    pub max_terms: usize,
    pub lambda: (f64, f64),
    pub chirp: f64,
    pub center: f64,
    pub amplitude: (f64, f64),
}

impl Default for MixtureDistribution {
    fn default() -> Self {
        Self {
            d: 1,
            max_terms: 4,
            lambda: (0.2, 2.0),
            chirp: 0.5,
            center: 1.5,
            amplitude: (0.2, 1.0),
        }
    }
}

impl MixtureDistribution {
    pub fn with_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    pub fn with_dim(mut self, d: usize) -> Self {
        self.d = d.max(1);
        self
    }

    pub fn term<R: Rng + ?Sized>(&self, rng: &mut R) -> GeneralizedGaussian {
        let lambda = rng.gen_range(self.lambda.0..=self.lambda.1);
        let a = Complex64::new(lambda * lambda, rng.gen_range(-self.chirp..=self.chirp));
        let c = Complex64::from_polar(
            rng.gen_range(self.amplitude.0..=self.amplitude.1),
            rng.gen_range(0.0..TAU),
        );
        let mu = (0..self.d).map(|_| rng.gen_range(-self.center..=self.center)).collect();
        let nu = (0..self.d).map(|_| rng.gen_range(-self.center..=self.center)).collect();
        GeneralizedGaussian::new(c, a, mu, nu).expect("sampled spread has positive real part")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GaussianMixture {
        let n = rng.gen_range(1..=self.max_terms);
        let terms = (0..n).map(|_| self.term(rng)).collect();
        GaussianMixture::new(self.d, terms).expect("terms share the distribution dimension")
    }
}

/// Uniform point in the box `|x_j|, |ω_j| ≤ half_width`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, d: usize, half_width: f64) -> PhasePoint {
    let x = (0..d).map(|_| rng.gen_range(-half_width..=half_width)).collect();
    let omega = (0..d).map(|_| rng.gen_range(-half_width..=half_width)).collect();
    PhasePoint { x, omega }
}

/// `n` points in the box with pairwise distance at least `min_separation`,
/// by rejection. Panics if 10⁶ draws are not enough.
pub fn separated_points<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n: usize,
    half_width: f64,
    min_separation: f64,
) -> Vec<PhasePoint> {
    let mut points: Vec<PhasePoint> = Vec::with_capacity(n);
    for _ in 0..1_000_000 {
        if points.len() == n {
            break;
        }
        let p = random_point(rng, d, half_width);
        if points.iter().all(|q| q.sub(&p).norm() >= min_separation) {
            points.push(p);
        }
    }
    assert_eq!(points.len(), n, "could not place {n} separated points");
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn samples_respect_ranges() {
        let dist = MixtureDistribution::default();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let f = dist.sample(&mut rng);
            assert!((1..=4).contains(&f.terms().len()));
            for t in f.terms() {
                assert!((0.04..=4.0).contains(&t.a.re));
                assert!(t.a.im.abs() <= 0.5);
                assert!(t.mu[0].abs() <= 1.5 && t.nu[0].abs() <= 1.5);
                assert!((0.2 - 1e-12..=1.0 + 1e-12).contains(&t.c.norm()));
            }
        }
    }

    #[test]
    fn separated_points_are_separated() {
        let mut rng = StdRng::seed_from_u64(3);
        let pts = separated_points(&mut rng, 1, 5, 2.0, 0.1);
        for j in 0..5 {
            for k in j + 1..5 {
                assert!(pts[j].sub(&pts[k]).norm() >= 0.1);
            }
        }
    }
}
