//! Adaptive Gauss–Kronrod integration of complex integrands with Gaussian
//! decay.
//!
//! The integration range is truncated to `center ± W·scale`, with `W` chosen
//! so that a Gaussian tail of the observed peak magnitude falls below a tenth
//! of the tolerance. The truncated interval is cut into panels no wider than
//! a quarter period of the declared maximal oscillation frequency, and the
//! panel with the largest `|K21 − G10|` is bisected until the summed error
//! estimate meets the tolerance.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_864_940,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute error target.
    pub tol: f64,
    /// Budget of integrand evaluations per integral.
    pub max_evals: usize,
    /// Largest oscillation frequency of the integrand (cycles per unit).
    pub omega_max: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_evals: DEFAULT_MAX_EVALS,
            omega_max: 0.0,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn oscillating(mut self, omega_max: f64) -> Self {
        self.omega_max = omega_max.abs();
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Raised when the evaluation budget runs out before the tolerance is met.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error(
    "quadrature did not converge after {evaluations} evaluations: best estimate {best} with error bound {error_estimate:e}"
)]
pub struct QuadratureFailure {
    pub best: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

struct ByError(usize, f64);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1
            .total_cmp(&other.1)
            .then_with(|| other.0.cmp(&self.0))
    }
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Panel {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).norm().max(roundoff);
    Panel { lo, hi, value, error }
}

/// Gaussian tail mass `∫_{|u|>W} e^{−π u²} du ≤ e^{−πW²}/(πW)`.
fn tail_bound(peak: f64, scale: f64, w: f64) -> f64 {
    2.0 * peak * scale * (-PI * w * w).exp() / (PI * w)
}

/// Integrates `integrand` over the real line.
///
/// The caller declares a center and scale such that the integrand decays at
/// least like `e^{−π((t−center)/scale)²}`, and the largest oscillation
/// frequency through `opts.omega_max`.
pub fn integrate<F>(integrand: F, center: f64, scale: f64, opts: &QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(scale > 0.0) || !scale.is_finite() || !center.is_finite() {
        return Err(Error::Domain(format!(
            "quadrature needs a finite center and positive scale, got center={center}, scale={scale}"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }

    // Probe the peak magnitude on a coarse grid around the center.
    let mut evaluations = 0usize;
    let mut peak: f64 = 0.0;
    for k in -48..=48 {
        let t = center + scale * (k as f64) / 8.0;
        peak = peak.max(integrand(t).norm());
        evaluations += 1;
    }
    let peak = peak.max(f64::MIN_POSITIVE);

    let mut width = 3.0;
    while tail_bound(peak, scale, width) > opts.tol / 10.0 && width < 40.0 {
        width += 0.25;
    }
    // Margin for polynomial prefactors beyond the Gaussian envelope.
    width += 1.5;
    let tail = tail_bound(peak, scale, width);

    let lo = center - width * scale;
    let hi = center + width * scale;
    let mut panel_width = 0.5 * scale;
    if opts.omega_max > 0.0 {
        panel_width = panel_width.min(1.0 / (4.0 * opts.omega_max));
    }
    let n0 = ((hi - lo) / panel_width).ceil().max(1.0) as usize;
    let min_width = (hi - lo) * 1e-13;

    let mut panels = Vec::with_capacity(2 * n0);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut total_error = tail;
    for k in 0..n0 {
        let a = lo + (hi - lo) * k as f64 / n0 as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / n0 as f64;
        let p = gauss_kronrod(&integrand, a, b);
        evaluations += 21;
        total_error += p.error;
        heap.push(ByError(panels.len(), p.error));
        panels.push(p);
    }

    let mut iterations = 0usize;
    while total_error > opts.tol {
        if evaluations + 42 > opts.max_evals {
            return Err(QuadratureFailure {
                best: panels.iter().map(|p| p.value).sum(),
                error_estimate: total_error,
                evaluations,
            }
            .into());
        }
        let Some(ByError(idx, _)) = heap.pop() else { break };
        let p = panels[idx];
        if p.hi - p.lo < min_width {
            // Cannot be resolved further; keep its error in the total.
            continue;
        }
        let mid = 0.5 * (p.lo + p.hi);
        let left = gauss_kronrod(&integrand, p.lo, mid);
        let right = gauss_kronrod(&integrand, mid, p.hi);
        evaluations += 42;
        total_error += left.error + right.error - p.error;
        panels[idx] = left;
        heap.push(ByError(idx, left.error));
        heap.push(ByError(panels.len(), right.error));
        panels.push(right);

        iterations += 1;
        if iterations % 64 == 0 {
            total_error = tail + panels.iter().map(|p| p.error).sum::<f64>();
        }
    }
    total_error = tail + panels.iter().map(|p| p.error).sum::<f64>();
    if total_error > opts.tol {
        return Err(QuadratureFailure {
            best: panels.iter().map(|p| p.value).sum(),
            error_estimate: total_error,
            evaluations,
        }
        .into());
    }

    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(QuadratureResult {
        value: panels.iter().map(|p| p.value).sum(),
        error_estimate: total_error,
        evaluations,
    })
}

/// One axis of a separable integrand.
pub struct AxisIntegrand<'a> {
    pub f: Box<dyn Fn(f64) -> Complex64 + 'a>,
    pub center: f64,
    pub scale: f64,
    pub omega_max: f64,
}

impl<'a> AxisIntegrand<'a> {
    pub fn new(f: impl Fn(f64) -> Complex64 + 'a, center: f64, scale: f64) -> Self {
        Self {
            f: Box::new(f),
            center,
            scale,
            omega_max: 0.0,
        }
    }

    pub fn oscillating(mut self, omega_max: f64) -> Self {
        self.omega_max = omega_max.abs();
        self
    }
}

/// Integrand over `ℝ^d`.
pub enum NdIntegrand<'a> {
    /// Product of one-dimensional factors, one per axis; any `d`.
    Separable(Vec<AxisIntegrand<'a>>),
    /// A general integrand; supported for `d ≤ 2` by nested integration.
    Joint {
        f: Box<dyn Fn(&[f64]) -> Complex64 + 'a>,
        center: Vec<f64>,
        scale: Vec<f64>,
        omega_max: f64,
    },
}

pub fn integrate_nd(integrand: &NdIntegrand<'_>, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    match integrand {
        NdIntegrand::Separable(axes) => integrate_separable(axes, opts),
        NdIntegrand::Joint {
            f,
            center,
            scale,
            omega_max,
        } => {
            if center.len() != scale.len() {
                return Err(Error::DimensionMismatch {
                    expected: center.len(),
                    found: scale.len(),
                });
            }
            let axis_opts = opts.oscillating(*omega_max);
            match center.len() {
                1 => integrate(|t| f(&[t]), center[0], scale[0], &axis_opts),
                2 => integrate_joint_2d(f.as_ref(), [center[0], center[1]], [scale[0], scale[1]], &axis_opts),
                d => Err(Error::Unsupported(format!(
                    "non-separable integrands are limited to d <= 2, got d = {d}"
                ))),
            }
        }
    }
}

fn integrate_separable(axes: &[AxisIntegrand<'_>], opts: &QuadratureOptions) -> Result<QuadratureResult> {
    if axes.is_empty() {
        return Err(Error::Domain("separable integrand needs at least one axis".into()));
    }
    let d = axes.len() as f64;
    let run = |tol: f64| -> Result<Vec<QuadratureResult>> {
        axes.iter()
            .map(|ax| {
                let o = QuadratureOptions {
                    tol,
                    max_evals: opts.max_evals,
                    omega_max: ax.omega_max,
                };
                integrate(&ax.f, ax.center, ax.scale, &o)
            })
            .collect()
    };
    let combine = |parts: &[QuadratureResult]| -> QuadratureResult {
        let value = parts.iter().map(|p| p.value).product();
        let mut error = 0.0;
        for i in 0..parts.len() {
            let others: f64 = parts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.value.norm() + p.error_estimate)
                .product();
            error += parts[i].error_estimate * others;
        }
        QuadratureResult {
            value,
            error_estimate: error,
            evaluations: parts.iter().map(|p| p.evaluations).sum(),
        }
    };

    let first = combine(&run(opts.tol / (10.0 * d))?);
    if first.error_estimate <= opts.tol || axes.len() == 1 {
        return Ok(first);
    }
    // Tighten per-axis tolerance by the magnitude of the other factors.
    let magnitude = first.value.norm().max(1.0);
    let second = combine(&run(opts.tol / (10.0 * d * magnitude))?);
    if second.error_estimate <= opts.tol {
        Ok(second)
    } else {
        Err(QuadratureFailure {
            best: second.value,
            error_estimate: second.error_estimate,
            evaluations: first.evaluations + second.evaluations,
        }
        .into())
    }
}

fn integrate_joint_2d(
    f: &dyn Fn(&[f64]) -> Complex64,
    center: [f64; 2],
    scale: [f64; 2],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let outer_len = 2.0 * 12.0 * scale[0];
    let inner_opts = QuadratureOptions {
        tol: opts.tol / (10.0 * outer_len),
        ..*opts
    };
    let inner_error = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);
    let failure: Cell<Option<QuadratureFailure>> = Cell::new(None);

    let outer = integrate(
        |t1| {
            match integrate(|t2| f(&[t1, t2]), center[1], scale[1], &inner_opts) {
                Ok(r) => {
                    inner_error.set(inner_error.get().max(r.error_estimate));
                    inner_evals.set(inner_evals.get() + r.evaluations);
                    r.value
                }
                Err(Error::Quadrature(q)) => {
                    failure.set(Some(q));
                    q.best
                }
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        },
        center[0],
        scale[0],
        &QuadratureOptions {
            tol: opts.tol / 2.0,
            ..*opts
        },
    )?;
    if let Some(q) = failure.get() {
        return Err(q.into());
    }
    let error = outer.error_estimate + inner_error.get() * outer_len;
    let evaluations = outer.evaluations + inner_evals.get();
    if error > opts.tol {
        return Err(QuadratureFailure {
            best: outer.value,
            error_estimate: error,
            evaluations,
        }
        .into());
    }
    Ok(QuadratureResult {
        value: outer.value,
        error_estimate: error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn rule_weights_sum_to_interval_length() {
        let kronrod: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kronrod - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let opts = QuadratureOptions::with_tol(1e-12);
        let r = integrate(|t| real((-PI * t * t).exp()), 0.0, 1.0, &opts).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        assert!(r.error_estimate <= 1e-12);
        assert!(r.evaluations >= 1);

        let r = integrate(|t| real(t * t * (-PI * t * t).exp()), 0.0, 1.0, &opts).unwrap();
        assert!((r.value.re - 1.0 / (2.0 * PI)).abs() < 1e-12);

        let r = integrate(|t| real((-2.0 * PI * t * t).exp()), 0.0, 1.0, &opts).unwrap();
        assert!((r.value.re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_gaussian() {
        // ∫ e^{−πt²} e^{−2πitω} dt = e^{−πω²}
        for omega in [0.5, 3.0, 12.0] {
            let opts = QuadratureOptions::with_tol(1e-12).oscillating(omega);
            let r = integrate(
                |t| Complex64::from_polar((-PI * t * t).exp(), -2.0 * PI * t * omega),
                0.0,
                1.0,
                &opts,
            )
            .unwrap();
            assert!((r.value - real((-PI * omega * omega).exp())).norm() < 1e-12, "omega={omega}");
        }
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let opts = QuadratureOptions {
            tol: 1e-14,
            max_evals: 200,
            omega_max: 30.0,
        };
        let err = integrate(
            |t| Complex64::from_polar((-PI * t * t).exp(), -2.0 * PI * 30.0 * t),
            0.0,
            1.0,
            &opts,
        )
        .unwrap_err();
        match err {
            Error::Quadrature(q) => {
                assert!(q.error_estimate > 1e-14);
                assert!(q.evaluations > 0);
                assert!(q.best.re.is_finite());
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let opts = QuadratureOptions::default();
        assert!(integrate(|_| real(1.0), 0.0, 0.0, &opts).is_err());
        assert!(integrate(|_| real(1.0), 0.0, 1.0, &QuadratureOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn nd_examples() {
        let opts = QuadratureOptions::with_tol(1e-12);
        let sep = NdIntegrand::Separable(vec![
            AxisIntegrand::new(|t| real((-PI * t * t).exp()), 0.0, 1.0),
            AxisIntegrand::new(|t| real((-PI * t * t).exp()), 0.0, 1.0),
        ]);
        let r = integrate_nd(&sep, &opts).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);

        let mixed = NdIntegrand::Separable(vec![
            AxisIntegrand::new(|t| real((-PI * t * t).exp()), 0.0, 1.0),
            AxisIntegrand::new(|t| real((-2.0 * PI * t * t).exp()), 0.0, 1.0),
        ]);
        let r = integrate_nd(&mixed, &opts).unwrap();
        assert!((r.value.re - 0.5f64.sqrt()).abs() < 1e-12);

        let one_d = NdIntegrand::Joint {
            f: Box::new(|t: &[f64]| real((-PI * t[0] * t[0]).exp())),
            center: vec![0.0],
            scale: vec![1.0],
            omega_max: 0.0,
        };
        let direct = integrate(|t| real((-PI * t * t).exp()), 0.0, 1.0, &opts).unwrap();
        assert_eq!(integrate_nd(&one_d, &opts).unwrap().value, direct.value);

        let joint = NdIntegrand::Joint {
            f: Box::new(|t: &[f64]| real((-PI * (t[0] * t[0] + t[1] * t[1] + t[0] * t[1])).exp())),
            center: vec![0.0, 0.0],
            scale: vec![1.5, 1.5],
            omega_max: 0.0,
        };
        // Quadratic form [[1, 1/2], [1/2, 1]] has determinant 3/4.
        let r = integrate_nd(&joint, &QuadratureOptions::with_tol(1e-10)).unwrap();
        assert!((r.value.re - (4.0f64 / 3.0).sqrt()).abs() < 1e-10);

        let too_big = NdIntegrand::Joint {
            f: Box::new(|_: &[f64]| real(0.0)),
            center: vec![0.0; 3],
            scale: vec![1.0; 3],
            omega_max: 0.0,
        };
        assert!(matches!(integrate_nd(&too_big, &opts), Err(Error::Unsupported(_))));
    }
}
