//! Uniform periodic grid on `[0, 2pi)` and its spectral operators.
//!
//! Grid functions are plain sample vectors; Fourier coefficients only exist
//! transiently inside each operation. The Nyquist mode is treated as a cosine:
//! it is zeroed by odd-order derivatives and by the Hilbert transform.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{check_len, Error, Result};
use crate::fft::FftPlan;

/// Smallest supported grid.
pub const MIN_POINTS: usize = 8;

#[derive(Debug)]
struct GridInner {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    plan: FftPlan,
}

/// `N` equispaced nodes `alpha_j = 2 pi j / N` with trapezoidal weights.
///
/// Cloning is cheap: the node table and FFT plan are shared.
#[derive(Debug, Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points() == other.n_points()
    }
}

impl PeriodicGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "grid size must be even and at least {MIN_POINTS}, got {n_points}"
            )));
        }
        let h = 2.0 * PI / n_points as f64;
        let nodes = (0..n_points).map(|j| h * j as f64).collect();
        let weights = alloc::vec![h; n_points];
        Ok(Self {
            inner: Arc::new(GridInner {
                nodes,
                weights,
                plan: FftPlan::new(n_points),
            }),
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.inner.plan.len()
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.inner.nodes
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.inner.weights
    }

    /// Node spacing `2 pi / N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_points() as f64
    }

    /// Signed wavenumber of FFT bin `j`. The Nyquist bin reports `+N/2`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n_points();
        if j <= n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    #[inline]
    fn is_nyquist(&self, j: usize) -> bool {
        j == self.n_points() / 2
    }

    /// Unnormalized DFT of real samples.
    pub fn spectrum(&self, f: &[f64]) -> Result<Vec<Complex64>> {
        check_len(self.n_points(), f.len())?;
        let mut data: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.inner.plan.forward(&mut data);
        Ok(data)
    }

    /// Inverse of [`spectrum`](Self::spectrum), keeping the real part.
    pub fn from_spectrum(&self, mut spec: Vec<Complex64>) -> Result<Vec<f64>> {
        check_len(self.n_points(), spec.len())?;
        self.inner.plan.inverse(&mut spec);
        let scale = 1.0 / self.n_points() as f64;
        Ok(spec.into_iter().map(|c| c.re * scale).collect())
    }

    /// Applies a Fourier multiplier `m(k, is_nyquist)` to real samples.
    pub fn apply_multiplier<M>(&self, f: &[f64], multiplier: M) -> Result<Vec<f64>>
    where
        M: Fn(i64, bool) -> Complex64,
    {
        let mut spec = self.spectrum(f)?;
        for (j, c) in spec.iter_mut().enumerate() {
            *c *= multiplier(self.wavenumber(j), self.is_nyquist(j));
        }
        self.from_spectrum(spec)
    }

    /// Derivative of the trigonometric interpolant of `f`.
    pub fn spectral_derivative(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        if order == 0 {
            return Err(Error::Parameter("derivative order must be positive".into()));
        }
        self.apply_multiplier(f, |k, nyquist| {
            if nyquist && order % 2 == 1 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(0.0, k as f64).powu(order)
        })
    }

    /// Periodic Hilbert transform with symbol `-i sgn(k)`; mean and Nyquist
    /// modes are annihilated.
    ///
    /// Equivalent to `(1/2pi) p.v. int cot((a - b)/2) f(b) db`.
    pub fn hilbert_transform(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.apply_multiplier(f, |k, nyquist| {
            if nyquist || k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -(k.signum() as f64))
            }
        })
    }

    pub fn trapezoid_integral(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n_points(), f.len())?;
        Ok(f.iter().zip(self.weights()).map(|(a, w)| a * w).sum())
    }

    /// Quadrature mean `(1/2pi) int f`.
    pub fn mean(&self, f: &[f64]) -> Result<f64> {
        Ok(self.trapezoid_integral(f)? / (2.0 * PI))
    }

    /// `L^2(T)` norm under the trapezoidal rule.
    pub fn l2_norm(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n_points(), f.len())?;
        Ok(f.iter()
            .zip(self.weights())
            .map(|(a, w)| a * a * w)
            .sum::<f64>()
            .sqrt())
    }

    /// Convolution with the periodic heat kernel at time `eps`
    /// (multiplier `exp(-k^2 eps)`).
    pub fn mollify(&self, f: &[f64], eps: f64) -> Result<Vec<f64>> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Parameter(format!(
                "mollifier width must be positive, got {eps}"
            )));
        }
        self.apply_multiplier(f, |k, _| {
            let k = k as f64;
            Complex64::new((-k * k * eps).exp(), 0.0)
        })
    }

    /// Resamples the trigonometric interpolant of `f` onto an `m`-point grid.
    ///
    /// Upsampling splits the Nyquist coefficient symmetrically so the result is
    /// the same real interpolant; downsampling truncates the spectrum.
    pub fn resample(&self, f: &[f64], m: usize) -> Result<Vec<f64>> {
        let n = self.n_points();
        let target = PeriodicGrid::new(m)?;
        if m == n {
            check_len(n, f.len())?;
            return Ok(f.to_vec());
        }
        let spec = self.spectrum(f)?;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); m];
        let scale = m as f64 / n as f64;
        let half = n.min(m) / 2;
        for k in 0..half {
            out[k] = spec[k] * scale;
            if k > 0 {
                out[m - k] = spec[n - k] * scale;
            }
        }
        if m > n {
            let nyq = spec[n / 2] * scale * 0.5;
            out[n / 2] = nyq;
            out[m - n / 2] = nyq;
        } else {
            // Both source modes at +-m/2 alias onto the target's Nyquist bin.
            let k = m / 2;
            out[k] = (spec[k] + spec[n - k]) * scale;
        }
        target.from_spectrum(out)
    }

    /// Evaluates the trigonometric interpolant of `f` at an arbitrary angle.
    pub fn interpolate(&self, f: &[f64], angle: f64) -> Result<f64> {
        let spec = self.spectrum(f)?;
        Ok(self.interpolate_spectrum(&spec, angle))
    }

    /// Same as [`interpolate`](Self::interpolate) with precomputed coefficients.
    pub fn interpolate_spectrum(&self, spec: &[Complex64], angle: f64) -> f64 {
        let n = self.n_points();
        let mut acc = spec[0].re;
        for (j, s) in spec.iter().enumerate().take(n / 2).skip(1) {
            let e = Complex64::from_polar(1.0, j as f64 * angle);
            acc += 2.0 * (s * e).re;
        }
        acc += spec[n / 2].re * ((n / 2) as f64 * angle).cos();
        acc / n as f64
    }

    /// Samples `f(alpha_j)`.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes().iter().map(|&a| f(a)).collect()
    }
}

/// Cyclic shift: `out[j] = f[(j - shift) mod N]`, i.e. samples of `f(alpha - shift * dalpha)`.
pub fn rotate_samples(f: &[f64], shift: usize) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|j| f[(j + n - shift % n) % n]).collect()
}
