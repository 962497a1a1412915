//! Finite Gabor systems `{π(z_k)g}` and the "bump with fat tail" condition
//! `|V_g f(z)| < |⟨f,g⟩|/N` for `|z| > R`.
//!
//! Linear independence of a finite system is certified by a strictly
//! positive smallest Gram eigenvalue. A failed certificate is inconclusive:
//! numerical rank deficiency never proves dependence.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envelope::MixtureBound;
use crate::error::{Error, Result};
use crate::search::golden_max;
use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint};
use crate::stft::stft_unchecked;
use crate::uncertainty::{cylinder_sup, sphere_sup, COMPARISON_TOL};

pub const DEFAULT_GRAM_TOL: f64 = 1e-10;
const EXTERIOR_STEP: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct ShiftSystem {
    window: GeneralizedGaussian,
    points: Vec<PhasePoint>,
    min_separation: f64,
}

impl ShiftSystem {
    pub fn new(window: GeneralizedGaussian, points: Vec<PhasePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("a shift system needs at least one point".into()));
        }
        for p in &points {
            p.check_dim(window.dim())?;
        }
        let mut min_separation = f64::INFINITY;
        for j in 0..points.len() {
            for k in j + 1..points.len() {
                let dist = points[j].sub(&points[k]).norm();
                if dist == 0.0 {
                    return Err(Error::DuplicatePoints(j, k));
                }
                min_separation = min_separation.min(dist);
            }
        }
        Ok(Self {
            window,
            points,
            min_separation,
        })
    }

    pub fn window(&self) -> &GeneralizedGaussian {
        &self.window
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    /// Smallest pairwise distance; infinite for a single point.
    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Point-set file: `{"d": 1, "points": [[x, omega], ...]}`; for `d > 1`
/// each entry lists the `d` time coordinates followed by `d` frequencies.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetSpec {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointSetSpec {
    pub fn into_points(self) -> Result<Vec<PhasePoint>> {
        if self.d == 0 {
            return Err(Error::InvalidSignal("field `d` must be >= 1".into()));
        }
        self.points
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                if p.len() != 2 * self.d {
                    return Err(Error::InvalidSignal(format!(
                        "points[{k}] has {} entries, expected 2d = {}",
                        p.len(),
                        2 * self.d
                    )));
                }
                let (x, w) = p.split_at(self.d);
                PhasePoint::new(x.to_vec(), w.to_vec())
            })
            .collect()
    }
}

/// `G[j][k] = ⟨π(z_j)g, π(z_k)g⟩`.
pub fn gram_matrix(system: &ShiftSystem) -> DMatrix<Complex64> {
    let shifted: Vec<GeneralizedGaussian> = system.points.iter().map(|z| system.window.shifted(z)).collect();
    let n = shifted.len();
    DMatrix::from_fn(n, n, |j, k| shifted[j].inner(&shifted[k]))
}

#[derive(Clone, Debug)]
pub struct GramCertificate {
    pub gram: DMatrix<Complex64>,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    /// `tolerance · trace / size`.
    pub threshold: f64,
    pub certified_independent: bool,
}

impl GramCertificate {
    /// `{"gram": [[[re, im], ...], ...], "eigenvalues", "min_eigenvalue", "tolerance", "threshold", "certified"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.gram.nrows())
            .map(|j| (0..self.gram.ncols()).map(|k| [self.gram[(j, k)].re, self.gram[(j, k)].im]).collect())
            .collect();
        serde_json::json!({
            "gram": rows,
            "eigenvalues": self.eigenvalues,
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "threshold": self.threshold,
            "certified": self.certified_independent,
        })
    }
}

pub fn certify_independence(system: &ShiftSystem, tolerance: f64) -> Result<GramCertificate> {
    if !(tolerance >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be nonnegative, got {tolerance}")));
    }
    let gram = gram_matrix(system);
    let n = gram.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(gram.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen(format!("no convergence for a {n}x{n} Gram matrix")))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    eigenvalues.sort_by(f64::total_cmp);
    let min_eigenvalue = eigenvalues[0];
    let trace: f64 = (0..n).map(|k| gram[(k, k)].re).sum();
    let threshold = tolerance * trace / n as f64;
    Ok(GramCertificate {
        gram,
        eigenvalues,
        min_eigenvalue,
        tolerance,
        threshold,
        certified_independent: min_eigenvalue > threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Open exterior `|z| > R`; strict comparison.
    Exterior,
    /// Sphere `|z| = R`; non-strict comparison.
    Sphere,
    /// Cylinder `|ω| = R`; non-strict comparison.
    Cylinder,
}

#[derive(Clone, Debug, Serialize)]
pub struct FatTailReport {
    pub region: Region,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub holds: bool,
    pub worst_point: PhasePoint,
    /// `max |V_g f(z)|·N/|⟨f,g⟩|` over the scanned region.
    pub worst_ratio: f64,
    pub comparison: &'static str,
    pub comparison_tolerance: f64,
    pub inner_product_abs: f64,
    /// Outer radius of the scanned annulus (exterior region only).
    pub outer_radius: Option<f64>,
    pub search_tolerance: f64,
}

/// Scans `|V_g f(z)|·N/|⟨f,g⟩|` over `region` for the Gaussian window.
///
/// The exterior `|z| > R` is truncated at the radius where the decay
/// envelope guarantees `|V_g f| < tol·|⟨f,g⟩|/N`, and the maximum is taken
/// over the closed annulus up to that radius. Sphere and cylinder regions
/// use the suprema from [`crate::uncertainty`].
pub fn fat_tail_scan(f: &GaussianMixture, r: f64, n: f64, region: Region, tol: f64) -> Result<FatTailReport> {
    if f.is_zero() {
        return Err(Error::ZeroSignal);
    }
    if !(n > 0.0) || !(r > 0.0) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "fat-tail scan needs R > 0, N > 0 and tol > 0, got R={r}, N={n}, tol={tol}"
        )));
    }
    let d = f.dim();
    let ip = f.inner_product(&GaussianMixture::standard(d))?.norm();
    let ratio_of = |sup: f64| if ip > 0.0 { sup * n / ip } else { f64::INFINITY };

    let (worst_point, sup, outer_radius) = match region {
        Region::Sphere => {
            let s = sphere_sup(f, r, tol)?;
            (s.argmax, s.sup_value, None)
        }
        Region::Cylinder => {
            let s = cylinder_sup(f, r, tol)?;
            (s.argmax, s.sup_value, None)
        }
        Region::Exterior => {
            let (p, v, outer) = exterior_sup(f, r, n, ip, tol)?;
            (p, v, Some(outer))
        }
    };
    let worst_ratio = ratio_of(sup);
    let (holds, comparison) = match region {
        Region::Exterior => (worst_ratio < 1.0, "ratio < 1"),
        Region::Sphere | Region::Cylinder => (worst_ratio <= 1.0 + COMPARISON_TOL, "ratio <= 1 + tol"),
    };
    Ok(FatTailReport {
        region,
        r,
        n,
        holds,
        worst_point,
        worst_ratio,
        comparison,
        comparison_tolerance: match region {
            Region::Exterior => 0.0,
            _ => COMPARISON_TOL,
        },
        inner_product_abs: ip,
        outer_radius,
        search_tolerance: tol,
    })
}

fn exterior_sup(f: &GaussianMixture, r: f64, n: f64, ip: f64, tol: f64) -> Result<(PhasePoint, f64, f64)> {
    let d = f.dim();
    if d != 1 {
        // A centered single term has no linear part in log|V|, so |V| falls
        // off along every ray and the exterior maximum sits on the sphere.
        let centered = matches!(f.terms(), [t] if t.mu.iter().chain(&t.nu).all(|v| *v == 0.0));
        if centered {
            let s = sphere_sup(f, r, tol)?;
            return Ok((s.argmax, s.sup_value, r));
        }
        return Err(Error::Unsupported(format!(
            "exterior scan is implemented for d = 1 (got d = {d})"
        )));
    }
    let g = GeneralizedGaussian::standard(1);
    let eps = if ip > 0.0 { tol * ip / n } else { tol };
    let outer = MixtureBound::radial(f, &g).radius_below(eps).max(r);
    let value = |rho: f64, th: f64| stft_unchecked(f, &g, &PhasePoint::new1(rho * th.cos(), rho * th.sin())).norm();

    let rings = (((outer - r) / EXTERIOR_STEP).ceil() as usize).max(1);
    let dr = (outer - r) / rings as f64;
    let mut candidates: Vec<(f64, f64, f64, f64)> = Vec::new();
    for i in 0..=rings {
        let rho = r + i as f64 * dr;
        let m = ((TAU * rho / EXTERIOR_STEP).ceil() as usize).max(256);
        let dth = TAU / m as f64;
        for k in 0..m {
            let th = k as f64 * dth;
            candidates.push((value(rho, th), rho, th, dth));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(8);

    let mut best = candidates[0];
    for &(v0, rho0, th0, dth) in &candidates {
        let (mut rho, mut th, mut v) = (rho0, th0, v0);
        for _ in 0..30 {
            let (t1, v1, _) = golden_max(&|t| value(rho, t), th - dth, th + dth, 1e-13);
            if v1 > v {
                th = t1;
                v = v1;
            }
            let lo = (rho - dr).max(r);
            let hi = (rho + dr).min(outer);
            let (r1, v2, _) = golden_max(&|s| value(s, th), lo, hi, 1e-13);
            // The boundary ring is often the maximizer; check it explicitly.
            let (r1, v2) = if value(lo, th) > v2 { (lo, value(lo, th)) } else { (r1, v2) };
            let improved = v2 - v;
            if v2 > v {
                rho = r1;
                v = v2;
            }
            if improved < 1e-15 * v.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        if v > best.0 {
            best = (v, rho, th, dth);
        }
    }
    let (v, rho, th, _) = best;
    Ok((PhasePoint::new1(rho * th.cos(), rho * th.sin()), v, outer))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::uncertainty::bound_sphere;

    fn window() -> GeneralizedGaussian {
        GeneralizedGaussian::standard(1)
    }

    #[test]
    fn single_point_gram() {
        let s = ShiftSystem::new(window(), vec![PhasePoint::new1(0.3, -0.2)]).unwrap();
        let g = gram_matrix(&s);
        assert_eq!(g.shape(), (1, 1));
        assert!((g[(0, 0)] - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(s.min_separation().is_infinite());
    }

    #[test]
    fn two_point_eigenvalues() {
        for sep in [0.25, 0.5, 1.0, 2.0] {
            let s = ShiftSystem::new(window(), vec![PhasePoint::origin(1), PhasePoint::new1(sep * 0.6, sep * 0.8)]).unwrap();
            let c = certify_independence(&s, DEFAULT_GRAM_TOL).unwrap();
            let off = (-PI * sep * sep / 2.0).exp();
            let base = 0.5f64.sqrt();
            assert!((c.eigenvalues[0] - base * (1.0 - off)).abs() < 1e-12);
            assert!((c.eigenvalues[1] - base * (1.0 + off)).abs() < 1e-12);
            assert!(c.certified_independent);
        }
        let s = ShiftSystem::new(window(), vec![PhasePoint::origin(1), PhasePoint::new1(1.0, 0.0)]).unwrap();
        let c = certify_independence(&s, DEFAULT_GRAM_TOL).unwrap();
        assert!((c.min_eigenvalue - 0.5f64.sqrt() * (1.0 - (-PI / 2.0).exp())).abs() < 1e-12);
        assert!((c.min_eigenvalue - 0.5601).abs() < 1e-4);
    }

    #[test]
    fn duplicate_points_rejected() {
        let p = PhasePoint::new1(1.0, 2.0);
        let err = ShiftSystem::new(window(), vec![p.clone(), PhasePoint::origin(1), p]).unwrap_err();
        assert!(matches!(err, Error::DuplicatePoints(0, 2)));
    }

    #[test]
    fn gram_is_hermitian_with_stft_magnitudes() {
        let pts = vec![
            PhasePoint::new1(0.0, 0.0),
            PhasePoint::new1(0.7, -0.3),
            PhasePoint::new1(-1.1, 0.4),
            PhasePoint::new1(0.2, 1.5),
        ];
        let s = ShiftSystem::new(window(), pts.clone()).unwrap();
        let g = gram_matrix(&s);
        let gm = GaussianMixture::standard(1);
        for j in 0..4 {
            assert!((g[(j, j)].re - 0.5f64.sqrt()).abs() < 1e-12);
            for k in 0..4 {
                assert!((g[(j, k)] - g[(k, j)].conj()).norm() < 1e-12);
                let v = stft_unchecked(&gm, &window(), &pts[j].sub(&pts[k])).norm();
                assert!((g[(j, k)].norm() - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn certificate_threshold_is_relative() {
        let s = ShiftSystem::new(window(), vec![PhasePoint::origin(1), PhasePoint::new1(1e-4, 0.0)]).unwrap();
        let c = certify_independence(&s, 1e-3).unwrap();
        assert!(!c.certified_independent);
        assert!(c.min_eigenvalue > 0.0);
        assert!((c.threshold - 1e-3 * 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn point_set_json() {
        let spec: PointSetSpec = serde_json::from_str(r#"{"d": 1, "points": [[0, 0], [1, 0.5]]}"#).unwrap();
        let pts = spec.into_points().unwrap();
        assert_eq!(pts[1], PhasePoint::new1(1.0, 0.5));
        let bad: PointSetSpec = serde_json::from_str(r#"{"d": 1, "points": [[0, 0, 1]]}"#).unwrap();
        assert!(bad.into_points().is_err());
    }

    #[test]
    fn equality_case_for_window() {
        let g = GaussianMixture::standard(1);
        let n = 2.0;
        let r = bound_sphere(n).unwrap();
        assert!((r - 0.6643).abs() < 1e-4);
        let rep = fat_tail_scan(&g, r, n, Region::Sphere, 1e-10).unwrap();
        assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
        assert!(rep.holds);
        let rep = fat_tail_scan(&g, r + 1e-3, n, Region::Exterior, 1e-10).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.worst_ratio < 1.0);
    }

    #[test]
    fn below_bound_fails_on_the_sphere() {
        let g = GaussianMixture::standard(1);
        let rep = fat_tail_scan(&g, 0.5, 2.0, Region::Exterior, 1e-10).unwrap();
        assert!(!rep.holds);
        assert!((rep.worst_point.norm() - 0.5).abs() < 1e-9, "{}", rep.worst_point);
        let rep = fat_tail_scan(&g, 0.5, 2.0, Region::Sphere, 1e-10).unwrap();
        assert!(!rep.holds);
        assert!((rep.worst_point.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dilated_cylinder_condition_is_tight() {
        let lambda = 0.5;
        let n: f64 = 10.0;
        let f = GaussianMixture::dilated(lambda, 1).unwrap();
        let r = ((1.0 + lambda * lambda) * n.ln() / PI).sqrt();
        let rep = fat_tail_scan(&f, r, n, Region::Cylinder, 1e-10).unwrap();
        assert!(rep.holds);
        assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
        assert!(rep.worst_point.x[0].abs() < 1e-4);
        assert!((rep.worst_point.omega[0].abs() - r).abs() < 1e-15);
    }

    #[test]
    fn zero_signal_rejected() {
        assert!(matches!(
            fat_tail_scan(&GaussianMixture::zero(1), 1.0, 2.0, Region::Sphere, 1e-10),
            Err(Error::ZeroSignal)
        ));
    }
}
