#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use tfbound_core::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};

pub fn term() -> impl Strategy<Value = GeneralizedGaussian> {
    (
        0.2f64..2.0,
        -0.5f64..0.5,
        0.2f64..1.0,
        0.0f64..std::f64::consts::TAU,
        -1.5f64..1.5,
        -1.5f64..1.5,
    )
        .prop_map(|(lambda, chirp, r, phase, mu, nu)| {
            GeneralizedGaussian::new(
                Complex64::from_polar(r, phase),
                Complex64::new(lambda * lambda, chirp),
                vec![mu],
                vec![nu],
            )
            .unwrap()
        })
}

pub fn mixture(max_terms: usize) -> impl Strategy<Value = GaussianMixture> {
    prop::collection::vec(term(), 1..=max_terms).prop_map(|terms| GaussianMixture::new(1, terms).unwrap())
}

pub fn point(half_width: f64) -> impl Strategy<Value = PhasePoint> {
    (-half_width..half_width, -half_width..half_width).prop_map(|(x, w)| PhasePoint::new1(x, w))
}

pub fn window() -> GeneralizedGaussian {
    GeneralizedGaussian::standard(1)
}
