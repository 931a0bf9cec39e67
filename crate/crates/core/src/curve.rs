//! Star-shaped boundaries `z(alpha) = h(alpha) e^{i alpha}` with `h = e^eta`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{check_len, Error, Result};
use crate::grid::PeriodicGrid;

/// A star-shaped curve sampled on a periodic grid, with the derived
/// geometry that enters the boundary kernels.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    grid: PeriodicGrid,
    eta: Vec<f64>,
    /// `d eta / d alpha`
    deta: Vec<f64>,
    h: Vec<f64>,
    z: Vec<Complex64>,
    dz: Vec<Complex64>,
    d2z: Vec<Complex64>,
    normal: Vec<Complex64>,
}

impl BoundaryCurve {
    /// Builds the curve and its derivatives from log-radius samples.
    ///
    /// Derivatives are spectral, so corner data should be mollified first;
    /// nothing is rejected on smoothness grounds but accuracy degrades.
    pub fn from_eta(grid: &PeriodicGrid, eta: &[f64]) -> Result<Self> {
        check_len(grid.n_points(), eta.len())?;
        if let Some(index) = eta.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "eta", index });
        }
        let deta = grid.spectral_derivative(eta, 1)?;
        let d2eta = grid.spectral_derivative(eta, 2)?;

        let n = grid.n_points();
        let mut h = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        let mut dz = Vec::with_capacity(n);
        let mut d2z = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        for j in 0..n {
            let hj = eta[j].exp();
            let e = Complex64::from_polar(1.0, grid.nodes()[j]);
            let (d1, d2) = (deta[j], d2eta[j]);
            // h' = h eta', h'' = h (eta'' + eta'^2)
            let zj = e * hj;
            let dzj = e * Complex64::new(hj * d1, hj);
            let d2zj = e * Complex64::new(hj * (d2 + d1 * d1) - hj, 2.0 * hj * d1);
            h.push(hj);
            z.push(zj);
            dz.push(dzj);
            d2z.push(d2zj);
            normal.push(Complex64::new(0.0, -1.0) * dzj);
        }

        let curve = Self {
            grid: grid.clone(),
            eta: eta.to_vec(),
            deta,
            h,
            z,
            dz,
            d2z,
            normal,
        };
        curve.check_invariants()?;
        Ok(curve)
    }

    fn check_invariants(&self) -> Result<()> {
        for j in 0..self.len() {
            if !(self.h[j] > 0.0) || !self.h[j].is_finite() {
                return Err(Error::Geometry {
                    invariant: "h > 0",
                    node: j,
                });
            }
            let speed = self.dz[j].norm();
            if !(speed > 0.0) || !speed.is_finite() {
                return Err(Error::Geometry {
                    invariant: "|z'| > 0",
                    node: j,
                });
            }
            let radial = Complex64::from_polar(1.0, self.grid.nodes()[j]);
            let n_dot_er = self.normal[j].re * radial.re + self.normal[j].im * radial.im;
            if !(n_dot_er > 0.0) {
                return Err(Error::Geometry {
                    invariant: "N . e_r > 0",
                    node: j,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn deta(&self) -> &[f64] {
        &self.deta
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn dz(&self) -> &[Complex64] {
        &self.dz
    }

    pub fn d2z(&self) -> &[Complex64] {
        &self.d2z
    }

    /// Unnormalized outward normal `N = -i z'`.
    pub fn normal(&self) -> &[Complex64] {
        &self.normal
    }

    pub fn stats(&self) -> CurveStats {
        CurveStats::of(self)
    }
}

/// Scalar summaries of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveStats {
    /// `max |d eta / d alpha|` over nodes.
    pub lipschitz_norm: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Enclosed area `(1/2) int h^2 d alpha`.
    pub area: f64,
    /// Half-opening of the radial cone containing every normal, `atan(lipschitz_norm)`.
    pub cone_half_angle: f64,
}

impl CurveStats {
    pub fn of(curve: &BoundaryCurve) -> Self {
        let lipschitz_norm = curve.deta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        let min_h = curve.h.iter().copied().fold(f64::INFINITY, f64::min);
        let max_h = curve.h.iter().copied().fold(0.0, f64::max);
        let area = 0.5
            * curve
                .h
                .iter()
                .zip(curve.grid.weights())
                .map(|(h, w)| h * h * w)
                .sum::<f64>();
        Self {
            lipschitz_norm,
            min_h,
            max_h,
            area,
            cone_half_angle: lipschitz_norm.atan(),
        }
    }
}
