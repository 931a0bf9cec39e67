//! Nyström matrices for the parametrized boundary operators.
//!
//! With `z(alpha) = h(alpha) e^{i alpha}` the kernels are
//!
//! ```text
//! K*(a, b)     = -(1/2pi) Im[ z'(a) / (z(a) - z(b)) ]
//! K(a, b)      =  (1/2pi) Im[ z'(b) / (z(a) - z(b)) ]
//! Lambda(a, b) =  (1/2pi) Re[ z'(a) / (z(a) - z(b)) ]
//! ```
//!
//! `K` and `K*` are smooth on smooth curves. `Lambda` carries a
//! `(1/4pi) cot((a - b)/2)` singularity, which is subtracted here and applied
//! spectrally by the DtN evaluator. Diagonal entries are the analytic limits
//! from `z(b) - z(a) = z' d + z'' d^2 / 2 + O(d^3)`:
//!
//! ```text
//! K*(a, a) = K(a, a) = -(1/4pi) Im[z''/z'],   Lambda_reg(a, a) = (1/4pi) Re[z''/z']
//! ```
//!
//! Every stored entry includes the quadrature weight of its column.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::BoundaryCurve;
use crate::error::{check_len, Error, Result};

/// Relative chord length below which two distinct nodes count as coincident.
const DEGENERATE_CHORD: f64 = 1e-14;

/// Discretized `K*`, `K` and the regular part of `Lambda` for one curve.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    curve: BoundaryCurve,
    kstar: DMatrix<f64>,
    kdl: DMatrix<f64>,
    lambda_reg: DMatrix<f64>,
}

impl OperatorSet {
    pub fn assemble(curve: &BoundaryCurve) -> Result<Self> {
        let n = curve.len();
        let grid = curve.grid();
        let (z, dz, d2z) = (curve.z(), curve.dz(), curve.d2z());
        let nodes = grid.nodes();
        let w = grid.weights();
        let scale = curve.h().iter().copied().fold(0.0, f64::max);
        let inv2pi = 1.0 / (2.0 * PI);
        let inv4pi = 1.0 / (4.0 * PI);

        let mut kstar = DMatrix::<f64>::zeros(n, n);
        let mut kdl = DMatrix::<f64>::zeros(n, n);
        let mut lambda_reg = DMatrix::<f64>::zeros(n, n);

        for j in 0..n {
            for m in 0..n {
                if j == m {
                    let ratio = d2z[j] / dz[j];
                    kstar[(j, j)] = -inv4pi * ratio.im * w[j];
                    kdl[(j, j)] = -inv4pi * ratio.im * w[j];
                    lambda_reg[(j, j)] = inv4pi * ratio.re * w[j];
                    continue;
                }
                let chord = z[j] - z[m];
                if chord.norm() < DEGENERATE_CHORD * scale {
                    return Err(Error::Geometry {
                        invariant: "distinct nodes have distinct points",
                        node: j,
                    });
                }
                let inv = chord.inv();
                let tangent_ratio = dz[j] * inv;
                let source_ratio = dz[m] * inv;
                let cot = (0.5 * (nodes[j] - nodes[m])).tan().recip();
                kstar[(j, m)] = -inv2pi * tangent_ratio.im * w[m];
                kdl[(j, m)] = inv2pi * source_ratio.im * w[m];
                lambda_reg[(j, m)] = (inv2pi * tangent_ratio.re - inv4pi * cot) * w[m];
            }
        }

        Ok(Self {
            curve: curve.clone(),
            kstar,
            kdl,
            lambda_reg,
        })
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    /// Weighted `K*` matrix.
    pub fn kstar(&self) -> &DMatrix<f64> {
        &self.kstar
    }

    /// Weighted double-layer matrix `K`.
    pub fn kdl(&self) -> &DMatrix<f64> {
        &self.kdl
    }

    /// Weighted `Lambda - (1/4pi) cot((a - b)/2)`.
    pub fn lambda_reg(&self) -> &DMatrix<f64> {
        &self.lambda_reg
    }

    pub fn apply_kstar(&self, f: &[f64]) -> Result<Vec<f64>> {
        matvec(&self.kstar, f)
    }

    pub fn apply_kdl(&self, f: &[f64]) -> Result<Vec<f64>> {
        matvec(&self.kdl, f)
    }

    pub fn apply_lambda_reg(&self, f: &[f64]) -> Result<Vec<f64>> {
        matvec(&self.lambda_reg, f)
    }
}

pub(crate) fn matvec(a: &DMatrix<f64>, f: &[f64]) -> Result<Vec<f64>> {
    check_len(a.ncols(), f.len())?;
    let v = DVector::from_column_slice(f);
    Ok((a * v).data.into())
}
