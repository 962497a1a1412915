//! Uncertainty bounds for the STFT with the Gaussian window `g(t) = e^{−π|t|²}`.
//!
//! If `|V_g f| ≤ |⟨f,g⟩|/N` on the cylinder `|ω| = R`, then
//! `R > sqrt(log N / π)`; on the sphere `|z| = R` the bound improves to
//! `R ≥ sqrt(2 log N / π)`, with equality only for `f = c·g`. This module
//! computes the suprema of `|V_g f|` on both geometries, the effective `N`
//! they certify, and the comparison against the bounds.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::envelope::{MixtureBound, TermEnvelope};
use crate::error::{Error, Result};
use crate::search::scan_and_refine;
use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};
use crate::stft::stft_unchecked;

/// Tolerance used for `>` / `≥` comparisons against the bounds.
pub const COMPARISON_TOL: f64 = 1e-9;
pub const DEFAULT_SEARCH_TOL: f64 = 1e-10;
/// Coarse grid spacing (in x, or in arc length on the circle).
pub const GRID_STEP: f64 = 0.005;
const MAX_GRID: usize = 400_000;
const TOP_K: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Cylinder,
    Sphere,
}

impl Geometry {
    pub fn as_str(&self) -> &'static str {
        match self {
            Geometry::Cylinder => "cylinder",
            Geometry::Sphere => "sphere",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    GridGolden,
    ClosedForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupReport {
    pub geometry: Geometry,
    #[serde(rename = "R")]
    pub r: f64,
    pub sup_value: f64,
    pub argmax: PhasePoint,
    /// Half-width of the searched x-box (cylinder only).
    pub x_truncation: Option<f64>,
    pub grid_resolution: f64,
    pub refined: bool,
    pub tolerance: f64,
    pub evaluations: usize,
    pub method: SearchMethod,
}

fn validate(f: &GaussianMixture, r: f64, tol: f64) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroSignal);
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// A single term centered at the origin with no modulation: `|V_g f|` is
/// `exp` of a pure quadratic form, so both suprema are explicit in any `d`.
fn centered_single_term(f: &GaussianMixture) -> Option<&GeneralizedGaussian> {
    match f.terms() {
        [t] if t.mu.iter().chain(&t.nu).all(|v| *v == 0.0) => Some(t),
        _ => None,
    }
}

fn closed_form_sup(term: &GeneralizedGaussian, r: f64, geometry: Geometry, tol: f64) -> SupReport {
    let d = term.dim();
    let env = TermEnvelope::new(term, &GeneralizedGaussian::standard(d));
    let mut x = vec![0.0; d];
    let mut omega = vec![0.0; d];
    let log_peak = env.log_amp + env.k;
    let value = match geometry {
        Geometry::Cylinder => {
            x[0] = -env.qxw * r / (2.0 * env.qxx);
            omega[0] = r;
            log_peak + (env.qww - env.qxw * env.qxw / (4.0 * env.qxx)) * r * r
        }
        Geometry::Sphere => {
            // Largest eigenvalue of [[qxx, qxw/2], [qxw/2, qww]] and its eigenvector.
            let (p, q, s) = (env.qxx, 0.5 * env.qxw, env.qww);
            let top = 0.5 * (p + s) + (0.25 * (p - s) * (p - s) + q * q).sqrt();
            let (u, v) = if q.abs() > 0.0 {
                (q, top - p)
            } else if p >= s {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            };
            let n = (u * u + v * v).sqrt();
            x[0] = r * u / n;
            omega[0] = r * v / n;
            log_peak + top * r * r
        }
    };
    SupReport {
        geometry,
        r,
        sup_value: value.exp(),
        argmax: PhasePoint { x, omega },
        x_truncation: None,
        grid_resolution: 0.0,
        refined: false,
        tolerance: tol,
        evaluations: 0,
        method: SearchMethod::ClosedForm,
    }
}

/// `sup_{|ω| = R} |V_g f(x, ω)|`.
///
/// For d = 1 the cylinder is the pair of lines `ω = ±R`; `x` is truncated
/// where the time envelope of `|V_g f|` drops below `tol/10`, scanned on a
/// grid and refined by golden-section search around the best grid maxima.
pub fn cylinder_sup(f: &GaussianMixture, r: f64, tol: f64) -> Result<SupReport> {
    validate(f, r, tol)?;
    let d = f.dim();
    let g = GeneralizedGaussian::standard(d);
    if d != 1 {
        return match centered_single_term(f) {
            Some(t) => Ok(closed_form_sup(t, r, Geometry::Cylinder, tol)),
            None => Err(Error::Unsupported(format!(
                "numerical cylinder search is implemented for d = 1 (got d = {d})"
            ))),
        };
    }

    let half_width = MixtureBound::time(f, &g).radius_below(tol / 10.0).max(1.0);
    let cells = if f.terms().len() == 1 {
        // One Gaussian term: |V| is log-concave along each line.
        ((2.0 * half_width / GRID_STEP).ceil() as usize).min(4000)
    } else {
        ((2.0 * half_width / GRID_STEP).ceil() as usize).min(MAX_GRID)
    };

    let mut best: Option<(f64, f64, crate::search::Maximum)> = None;
    let mut evaluations = 0;
    for omega in [r, -r] {
        let line = |x: f64| stft_unchecked(f, &g, &PhasePoint::new1(x, omega)).norm();
        let m = scan_and_refine(&line, -half_width, half_width, cells, false, TOP_K, 1e-12 * half_width);
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value > b.2.value) {
            best = Some((m.arg, omega, m));
        }
    }
    let (x, omega, m) = best.expect("two lines searched");
    Ok(SupReport {
        geometry: Geometry::Cylinder,
        r,
        sup_value: m.value,
        argmax: PhasePoint::new1(x, omega),
        x_truncation: Some(half_width),
        grid_resolution: m.step,
        refined: m.refined,
        tolerance: tol,
        evaluations,
        method: SearchMethod::GridGolden,
    })
}

/// `sup_{|z| = R} |V_g f(z)|`, searched over the angle of the circle (d = 1).
pub fn sphere_sup(f: &GaussianMixture, r: f64, tol: f64) -> Result<SupReport> {
    validate(f, r, tol)?;
    let d = f.dim();
    let g = GeneralizedGaussian::standard(d);
    if d != 1 {
        return match centered_single_term(f) {
            Some(t) => Ok(closed_form_sup(t, r, Geometry::Sphere, tol)),
            None => Err(Error::Unsupported(format!(
                "numerical sphere search is implemented for d = 1 (got d = {d})"
            ))),
        };
    }
    let cells = ((TAU * r / GRID_STEP).ceil() as usize).clamp(1024, MAX_GRID);
    let circle = |th: f64| stft_unchecked(f, &g, &PhasePoint::new1(r * th.cos(), r * th.sin())).norm();
    let m = scan_and_refine(&circle, 0.0, TAU, cells, true, TOP_K, 1e-13);
    Ok(SupReport {
        geometry: Geometry::Sphere,
        r,
        sup_value: m.value,
        argmax: PhasePoint::new1(r * m.arg.cos(), r * m.arg.sin()),
        x_truncation: None,
        grid_resolution: m.step * r,
        refined: m.refined,
        tolerance: tol,
        evaluations: m.evaluations,
        method: SearchMethod::GridGolden,
    })
}

fn check_n(n: f64) -> Result<()> {
    if !(n > 1.0) || !n.is_finite() {
        return Err(Error::Domain(format!("N must be a finite number > 1, got {n}")));
    }
    Ok(())
}

/// `sqrt(log N / π)`.
pub fn bound_cylinder(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok((n.ln() / PI).sqrt())
}

/// `sqrt(2 log N / π)`.
pub fn bound_sphere(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok((2.0 * n.ln() / PI).sqrt())
}

pub fn sup_on(f: &GaussianMixture, r: f64, geometry: Geometry, tol: f64) -> Result<SupReport> {
    match geometry {
        Geometry::Cylinder => cylinder_sup(f, r, tol),
        Geometry::Sphere => sphere_sup(f, r, tol),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub theorem: Geometry,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N_effective")]
    pub n_effective: f64,
    /// NaN (JSON null) when `N_effective ≤ 1`.
    pub bound: f64,
    pub holds: bool,
    /// `R − bound`; NaN (JSON null) when not applicable.
    pub margin: f64,
    pub sup: f64,
    pub inner_product_abs: f64,
    /// False when `N_effective ≤ 1`, where the hypothesis `N > 1` fails.
    pub applicable: bool,
    pub comparison: &'static str,
    pub comparison_tolerance: f64,
    pub search_tolerance: f64,
    pub x_truncation: Option<f64>,
    pub argmax: PhasePoint,
}

/// Evaluates the bound for the largest `N` the signal satisfies on the
/// given geometry, `N_effective = |⟨f,g⟩| / sup |V_g f|`.
pub fn verify_theorem(f: &GaussianMixture, r: f64, geometry: Geometry, tol: f64) -> Result<TheoremReport> {
    let sup = sup_on(f, r, geometry, tol)?;
    let ip = f
        .inner_product(&GaussianMixture::standard(f.dim()))?
        .norm();
    let n_eff = ip / sup.sup_value;
    let applicable = n_eff > 1.0;
    let (bound, margin, holds) = if applicable {
        let bound = match geometry {
            Geometry::Cylinder => (n_eff.ln() / PI).sqrt(),
            Geometry::Sphere => (2.0 * n_eff.ln() / PI).sqrt(),
        };
        let margin = r - bound;
        let holds = match geometry {
            Geometry::Cylinder => r > bound - COMPARISON_TOL,
            Geometry::Sphere => r >= bound - COMPARISON_TOL,
        };
        (bound, margin, holds)
    } else {
        (f64::NAN, f64::NAN, true)
    };
    Ok(TheoremReport {
        theorem: geometry,
        r,
        n_effective: n_eff,
        bound,
        holds,
        margin,
        sup: sup.sup_value,
        inner_product_abs: ip,
        applicable,
        comparison: match geometry {
            Geometry::Cylinder => "R > bound - tol",
            Geometry::Sphere => "R >= bound - tol",
        },
        comparison_tolerance: COMPARISON_TOL,
        search_tolerance: tol,
        x_truncation: sup.x_truncation,
        argmax: sup.argmax,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessRow {
    pub lambda: f64,
    pub r_min_numeric: f64,
    pub r_min_formula: f64,
    pub residual: f64,
}

/// Smallest `R` at which `f_λ(t) = e^{−πλ²t²}` satisfies the cylinder
/// condition `|V_g f_λ| ≤ |⟨f_λ,g⟩|/N` on `|ω| = R`, found by bisection on
/// [`cylinder_sup`], against `sqrt((1+λ²) log N / π)`.
pub fn sharpness_sweep(n: f64, lambdas: &[f64], tol: f64) -> Result<Vec<SharpnessRow>> {
    check_n(n)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let f = GaussianMixture::dilated(lambda, 1)?;
            let ip = f.inner_product(&GaussianMixture::standard(1))?.norm();
            let holds = |r: f64| -> Result<bool> { Ok(cylinder_sup(&f, r, tol)?.sup_value * n <= ip) };

            // At R → 0 the cylinder passes through the origin, where the
            // ratio equals N > 1, so the lower end never satisfies it.
            let mut lo = 0.0;
            let mut hi = 1.0;
            while !holds(hi)? {
                lo = hi;
                hi *= 2.0;
                if hi > 1e3 {
                    return Err(Error::Bracket {
                        lo,
                        hi,
                        reason: format!("condition never satisfied for lambda = {lambda}"),
                    });
                }
            }
            while hi - lo > 1e-12 * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if holds(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let formula = ((1.0 + lambda * lambda) * n.ln() / PI).sqrt();
            Ok(SharpnessRow {
                lambda,
                r_min_numeric: hi,
                r_min_formula: formula,
                residual: (hi - formula).abs(),
            })
        })
        .collect()
}
