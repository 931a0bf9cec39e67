//! Symmetry margins of the discrete operators on one curve.

use helios_core::grid::rotate_samples;
use helios_core::{apply_dtn, BoundaryCurve, OperatorSet, PeriodicGrid, Result};
use nalgebra::DMatrix;

/// Dilations tried by every scale check, as shifts of `eta`.
pub const SHIFTS: [f64; 3] = [-1.0, 0.37, 2.0];

pub const MATRIX_SCALE_TOL: f64 = 1e-13;
pub const MATRIX_ROTATION_TOL: f64 = 1e-12;
pub const DTN_SCALE_TOL: f64 = 1e-10;
pub const DTN_ROTATION_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCheck {
    pub name: &'static str,
    pub violation: f64,
    pub tolerance: f64,
}

impl SymmetryCheck {
    pub fn margin(&self) -> f64 {
        self.tolerance - self.violation
    }

    pub fn passed(&self) -> bool {
        self.margin() >= 0.0
    }
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `m` with rows and columns shifted by `s`: `out[(j + s, k + s)] = m[(j, k)]`.
fn roll(m: &DMatrix<f64>, s: usize) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |j, k| m[((j + n - s) % n, (k + n - s) % n)])
}

fn matrices(ops: &OperatorSet) -> [&DMatrix<f64>; 3] {
    [ops.kstar(), ops.kdl(), ops.lambda_reg()]
}

/// Scale and rotation checks for the assembled matrices and for `G(h) eta`.
pub fn symmetry_checks(eta: &[f64]) -> Result<Vec<SymmetryCheck>> {
    let grid = PeriodicGrid::new(eta.len())?;
    let curve = BoundaryCurve::from_eta(&grid, eta)?;
    let ops = OperatorSet::assemble(&curve)?;
    let base_g = apply_dtn(&ops, eta)?.g_of;

    let mut matrix_scale: f64 = 0.0;
    let mut dtn_scale: f64 = 0.0;
    for c in SHIFTS {
        let lifted: Vec<f64> = eta.iter().map(|e| e + c).collect();
        let lops = OperatorSet::assemble(&BoundaryCurve::from_eta(&grid, &lifted)?)?;
        for (a, b) in matrices(&ops).iter().zip(matrices(&lops)) {
            matrix_scale = matrix_scale.max(max_diff(a, b));
        }
        dtn_scale = dtn_scale.max(sup(&apply_dtn(&lops, &lifted)?.g_of, &base_g));
    }

    let rotated = rotate_samples(eta, 1);
    let rops = OperatorSet::assemble(&BoundaryCurve::from_eta(&grid, &rotated)?)?;
    let matrix_rotation = matrices(&ops)
        .iter()
        .zip(matrices(&rops))
        .map(|(a, b)| max_diff(&roll(a, 1), b))
        .fold(0.0, f64::max);
    let dtn_rotation = sup(&apply_dtn(&rops, &rotated)?.g_of, &rotate_samples(&base_g, 1));

    Ok(vec![
        SymmetryCheck {
            name: "matrix_scale",
            violation: matrix_scale,
            tolerance: MATRIX_SCALE_TOL,
        },
        SymmetryCheck {
            name: "matrix_rotation",
            violation: matrix_rotation,
            tolerance: MATRIX_ROTATION_TOL,
        },
        SymmetryCheck {
            name: "dtn_scale",
            violation: dtn_scale,
            tolerance: DTN_SCALE_TOL,
        },
        SymmetryCheck {
            name: "dtn_rotation",
            violation: dtn_rotation,
            tolerance: DTN_ROTATION_TOL,
        },
    ])
}
