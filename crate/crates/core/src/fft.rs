//! Complex FFT for arbitrary lengths.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other length
//! goes through Bluestein's chirp-z reduction onto a power-of-two plan.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct FftPlan {
    n: usize,
    kind: PlanKind,
}

#[derive(Debug, Clone)]
enum PlanKind {
    Radix2 { twiddles: Vec<Complex64> },
    Bluestein(Bluestein),
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Radix2,
    /// `exp(-i pi k^2 / n)` for k < n.
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, wrapped onto the inner length.
    kernel_hat: Vec<Complex64>,
}

#[derive(Debug, Clone)]
struct Radix2 {
    m: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(m: usize) -> Self {
        debug_assert!(m.is_power_of_two());
        let twiddles = (0..m / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64))
            .collect();
        Self { m, twiddles }
    }

    fn forward(&self, data: &mut [Complex64]) {
        radix2(data, &self.twiddles, false);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        radix2(data, &self.twiddles, true);
    }
}

fn radix2(data: &mut [Complex64], twiddles: &[Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let mut w = twiddles[k * stride];
                if inverse {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

impl FftPlan {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        if n.is_power_of_two() {
            return Self {
                n,
                kind: PlanKind::Radix2 {
                    twiddles: Radix2::new(n).twiddles,
                },
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                // k^2 mod 2n keeps the phase argument small for large k.
                let k2 = (k * k) % (2 * n);
                Complex64::from_polar(1.0, -PI * k2 as f64 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Self {
            n,
            kind: PlanKind::Bluestein(Bluestein {
                inner,
                chirp,
                kernel_hat: kernel,
            }),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, `X_k = sum_j x_j exp(-2 pi i j k / n)`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Unnormalized inverse transform (no `1/n` factor).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n);
        match &self.kind {
            PlanKind::Radix2 { twiddles } => radix2(data, twiddles, inverse),
            PlanKind::Bluestein(b) => {
                if inverse {
                    // ifft(x) = conj(fft(conj(x)))
                    data.iter_mut().for_each(|c| *c = c.conj());
                    b.forward(data);
                    data.iter_mut().for_each(|c| *c = c.conj());
                } else {
                    b.forward(data);
                }
            }
        }
    }
}

impl Bluestein {
    fn forward(&self, data: &mut [Complex64]) {
        let n = data.len();
        let m = self.inner.m;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            work[k] = data[k] * self.chirp[k];
        }
        self.inner.forward(&mut work);
        for (w, kh) in work.iter_mut().zip(&self.kernel_hat) {
            *w *= kh;
        }
        self.inner.inverse(&mut work);
        let scale = 1.0 / m as f64;
        for k in 0..n {
            data[k] = work[k] * self.chirp[k] * scale;
        }
    }
}
