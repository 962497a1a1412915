//! Short-time Fourier transform
//! `V_g f(x, ω) = ⟨f, π(z)g⟩ = ∫ e^{−2πi t·ω} f(t) conj(g(t−x)) dt`.
//!
//! Three routes: exact Gaussian integration on mixtures, adaptive
//! quadrature (mixtures) or Riemann sums (sampled signals) of the defining
//! integral, and an FFT grid for sampled signals.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::envelope::MixtureBound;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_nd, AxisIntegrand, NdIntegrand, QuadratureOptions};
use crate::signal::{GaussianMixture, GeneralizedGaussian, PhasePoint, SampledSignal};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `⟨term, π(z)window⟩` without materializing the shifted window.
pub(crate) fn stft_term(term: &GeneralizedGaussian, window: &GeneralizedGaussian, z: &PhasePoint) -> Complex64 {
    let alpha = term.a;
    let beta = window.a.conj();
    let big_a = alpha + beta;
    let inv_a = big_a.inv();
    let mut expo = Complex64::new(0.0, 0.0);
    let mut nu_x = 0.0;
    for j in 0..term.mu.len() {
        let m1 = term.mu[j];
        let m2 = window.mu[j] + z.x[j];
        let dmu = m1 - m2;
        let dnu = term.nu[j] - window.nu[j] - z.omega[j];
        let center = (alpha * m1 + beta * m2) * inv_a;
        expo += -alpha * beta * dmu * dmu * inv_a + 2.0 * I * dnu * center - dnu * dnu * inv_a;
        nu_x += window.nu[j] * z.x[j];
    }
    let d = term.mu.len() as i32;
    // conj of the shifted window's amplitude c_g·e^{−2πi ν_g·x}
    let window_amp = window.c.conj() * Complex64::from_polar(1.0, 2.0 * PI * nu_x);
    term.c * window_amp * big_a.sqrt().powi(-d) * (PI * expo).exp()
}

pub(crate) fn stft_unchecked(f: &GaussianMixture, g: &GeneralizedGaussian, z: &PhasePoint) -> Complex64 {
    f.terms().iter().map(|t| stft_term(t, g, z)).sum()
}

/// `V_g f(z)` by exact Gaussian integration over each mixture term.
pub fn stft_closed_form(f: &GaussianMixture, g: &GeneralizedGaussian, z: &PhasePoint) -> Result<Complex64> {
    f.check_dim(g.dim())?;
    z.check_dim(f.dim())?;
    Ok(stft_unchecked(f, g, z))
}

/// `V_g f_λ(x, ω)` for `f_λ(t) = e^{−πλ²t²}` and `g(t) = e^{−πt²}`:
/// `(1+λ²)^{−d/2} e^{−2πi x·ω/(1+λ²)} e^{−πλ²|x|²/(1+λ²)} e^{−π|ω|²/(1+λ²)}`.
pub fn dilated_gaussian_stft(lambda: f64, z: &PhasePoint) -> Result<Complex64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("dilation must be positive, got {lambda}")));
    }
    let s = 1.0 + lambda * lambda;
    let d = z.dim() as f64;
    let xw: f64 = z.x.iter().zip(&z.omega).map(|(x, w)| x * w).sum();
    let x2: f64 = z.x.iter().map(|x| x * x).sum();
    let w2: f64 = z.omega.iter().map(|w| w * w).sum();
    let modulus = s.powf(-d / 2.0) * (-PI * lambda * lambda * x2 / s).exp() * (-PI * w2 / s).exp();
    Ok(Complex64::from_polar(modulus, -2.0 * PI * xw / s))
}

/// `V_g f(z)` by adaptive quadrature of the defining integral, term by term
/// and axis by axis.
pub fn stft_quadrature(f: &GaussianMixture, g: &GeneralizedGaussian, z: &PhasePoint, tol: f64) -> Result<Complex64> {
    f.check_dim(g.dim())?;
    z.check_dim(f.dim())?;
    let n_terms = f.terms().len().max(1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for term in f.terms() {
        let amp = term.c * g.c.conj();
        if amp.norm() == 0.0 {
            continue;
        }
        let (ra, rg) = (term.a.re, g.a.re);
        let scale = 1.0 / (ra + rg).sqrt();
        let axes: Vec<AxisIntegrand<'_>> = (0..f.dim())
            .map(|j| {
                let (mu, nu) = (term.mu[j], term.nu[j]);
                let (mg, ng) = (g.mu[j] + z.x[j], g.nu[j]);
                let (x, w) = (z.x[j], z.omega[j]);
                let (a, ag) = (term.a, g.a);
                let center = (ra * mu + rg * mg) / (ra + rg);
                let reach = (center - mu).abs().max((center - mg).abs()) + 10.0 * scale;
                let omega_max = (nu - ng - w).abs() + (a.im.abs() + ag.im.abs()) * reach;
                AxisIntegrand::new(
                    move |t| {
                        let f_part = -PI * a * (t - mu) * (t - mu) + 2.0 * PI * I * nu * t;
                        let g_part = -PI * ag * (t - mg) * (t - mg) + 2.0 * PI * I * ng * (t - x);
                        (f_part + g_part.conj() - 2.0 * PI * I * t * w).exp()
                    },
                    center,
                    scale,
                )
                .oscillating(omega_max)
            })
            .collect();
        let opts = QuadratureOptions::with_tol(tol / (n_terms * amp.norm()));
        let r = integrate_nd(&NdIntegrand::Separable(axes), &opts)?;
        total += amp * r.value;
    }
    Ok(total)
}

/// `V_g f(z)` for a sampled signal as the dt-weighted Riemann sum
/// `dt·Σ_k f_k conj(g(t_k − x)) e^{−2πi t_k ω}`.
pub fn stft_sampled(f: &SampledSignal, g: &GeneralizedGaussian, z: &PhasePoint) -> Result<Complex64> {
    if g.dim() != 1 {
        return Err(Error::Unsupported("sampled signals are one-dimensional".into()));
    }
    z.check_dim(1)?;
    let (x, w) = (z.x[0], z.omega[0]);
    let sum: Complex64 = f
        .samples()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let t = f.time(k);
            s * g.evaluate(&[t - x]).conj() * Complex64::from_polar(1.0, -2.0 * PI * t * w)
        })
        .sum();
    Ok(sum * f.dt())
}

/// Radius beyond which `|V_g f(z)| ≤ eps` for every `z`.
pub fn vanishing_radius(f: &GaussianMixture, g: &GeneralizedGaussian, eps: f64) -> Result<f64> {
    f.check_dim(g.dim())?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(MixtureBound::radial(f, g).radius_below(eps))
}

/// Uniform grid `start + k·step`, `k = 0..len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len == 0 || !start.is_finite() || !step.is_finite() || (len > 1 && !(step > 0.0)) {
            return Err(Error::IncompatibleAxis(format!(
                "axis needs len >= 1 and a positive step, got start={start}, step={step}, len={len}"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `len` points spread evenly over `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Self::new(0.0, 1.0, len);
        }
        Self::new(-half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.point(k)).collect()
    }
}

/// STFT values on a product grid, stored row-major over `x` then `ω`.
#[derive(Clone, Debug)]
pub struct StftGrid {
    pub x_axis: UniformAxis,
    pub omega_axis: UniformAxis,
    pub values: Vec<Complex64>,
}

impl StftGrid {
    pub fn get(&self, ix: usize, iw: usize) -> Complex64 {
        self.values[ix * self.omega_axis.len + iw]
    }

    /// `dx·dω·Σ|V|²`, which approximates `(‖f‖·‖g‖)²` on fine, wide grids.
    pub fn moyal_sum(&self) -> f64 {
        self.x_axis.step * self.omega_axis.step * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// CSV with header `x,omega,re,im,abs`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,omega,re,im,abs")?;
        for ix in 0..self.x_axis.len {
            let x = self.x_axis.point(ix);
            for iw in 0..self.omega_axis.len {
                let v = self.get(ix, iw);
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    x,
                    self.omega_axis.point(iw),
                    v.re,
                    v.im,
                    v.norm()
                )?;
            }
        }
        Ok(())
    }
}

/// Exact STFT of a mixture on a product grid.
pub fn stft_closed_form_grid(
    f: &GaussianMixture,
    g: &GeneralizedGaussian,
    x_axis: UniformAxis,
    omega_axis: UniformAxis,
) -> Result<StftGrid> {
    if f.dim() != 1 || g.dim() != 1 {
        return Err(Error::Unsupported("grids are one-dimensional".into()));
    }
    let mut values = Vec::with_capacity(x_axis.len * omega_axis.len);
    for ix in 0..x_axis.len {
        for iw in 0..omega_axis.len {
            let z = PhasePoint::new1(x_axis.point(ix), omega_axis.point(iw));
            values.push(stft_unchecked(f, g, &z));
        }
    }
    Ok(StftGrid {
        x_axis,
        omega_axis,
        values,
    })
}

/// FFT length used by [`stft_grid`]: at least 4× zero-padding.
pub fn fft_len(n: usize) -> usize {
    (4 * n).next_power_of_two()
}

/// Frequency spacing `1/(M·dt)` of the FFT grid used by [`stft_grid`].
pub fn admissible_omega_step(f: &SampledSignal) -> f64 {
    1.0 / (fft_len(f.len()) as f64 * f.dt())
}

/// Snaps a requested symmetric frequency axis onto the FFT grid.
pub fn admissible_omega_axis(f: &SampledSignal, half_width: f64, len: usize) -> Result<UniformAxis> {
    let delta = admissible_omega_step(f);
    if len < 2 {
        return UniformAxis::new(0.0, delta, len.max(1));
    }
    let raw = 2.0 * half_width / (len - 1) as f64;
    let mult = (raw / delta).round().max(1.0);
    let step = mult * delta;
    let start = -(((len - 1) / 2) as f64) * step;
    UniformAxis::new(start, step, len)
}

/// STFT of a sampled signal on `x_axis × omega_axis` via zero-padded FFTs.
/// Every frequency must lie on the grid `k/(M·dt)` with `M = fft_len(n)`.
pub fn stft_grid(
    f: &SampledSignal,
    g: &GeneralizedGaussian,
    x_axis: UniformAxis,
    omega_axis: UniformAxis,
) -> Result<StftGrid> {
    if g.dim() != 1 {
        return Err(Error::Unsupported("sampled signals are one-dimensional".into()));
    }
    let n = f.len();
    let m = fft_len(n);
    let delta = 1.0 / (m as f64 * f.dt());
    let nyquist = (m / 2) as i64;
    let mut bins = Vec::with_capacity(omega_axis.len);
    for iw in 0..omega_axis.len {
        let w = omega_axis.point(iw);
        let k = w / delta;
        let kr = k.round();
        if (k - kr).abs() > 1e-6 || kr.abs() > nyquist as f64 {
            return Err(Error::IncompatibleAxis(format!(
                "omega = {w} is not on the admissible grid k·{delta} (FFT length {m}, dt = {}), |k| <= {nyquist}",
                f.dt()
            )));
        }
        let k = kr as i64;
        bins.push(k.rem_euclid(m as i64) as usize);
    }

    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(m);
    let phases: Vec<Complex64> = (0..omega_axis.len)
        .map(|iw| Complex64::from_polar(f.dt(), -2.0 * PI * f.t0() * omega_axis.point(iw)))
        .collect();
    let mut buffer = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut values = Vec::with_capacity(x_axis.len * omega_axis.len);
    for ix in 0..x_axis.len {
        let x = x_axis.point(ix);
        for (k, slot) in buffer.iter_mut().enumerate() {
            *slot = if k < n {
                f.samples()[k] * g.evaluate(&[f.time(k) - x]).conj()
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process_with_scratch(&mut buffer, &mut scratch);
        values.extend(bins.iter().zip(&phases).map(|(&b, &p)| buffer[b] * p));
    }
    Ok(StftGrid {
        x_axis,
        omega_axis,
        values,
    })
}
