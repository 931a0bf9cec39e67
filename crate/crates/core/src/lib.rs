//! Boundary-integral simulation of Hele-Shaw flow driven by a point source at
//! the origin.
//!
//! The fluid region is star-shaped, `{r e^{i alpha} : r < h(alpha)}`, and the
//! free boundary is tracked through `eta = log h`, which obeys
//!
//! ```text
//! d_t eta + e^{-2 eta} (G(h) eta - 1) = eps d_alpha^2 eta
//! ```
//!
//! where `G(h)` is the Dirichlet-to-Neumann operator of the fluid region with
//! the unnormalized outward normal. `G(h)` is evaluated by a Nyström
//! discretization of a second-kind layer-potential equation; the singular part
//! of its kernel is applied spectrally as a periodic Hilbert transform.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats, the CLI and thread pools live in the `helios` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod curve;
pub mod diagnostics;
pub mod dtn;
pub mod error;
pub mod evolution;
mod fft;
pub mod grid;
pub mod kernels;

pub use curve::{BoundaryCurve, CurveStats};
pub use diagnostics::{
    corner_experiment, invariant_suite, reconstruct_pressure, CheckOutcome, CheckStatus,
    CornerKind, CornerReport, CornerSetup, InvariantReport, PressureField, TipMotion,
};
pub use dtn::{
    apply_dtn, dtn_oracle_collocation, graph_dtn_oracle, solve_theta, taylor_sign_residual,
    DtnResult, OracleResult, ThetaSolution,
};
pub use error::{Error, Result};
pub use evolution::{
    simulate, step, vanishing_viscosity_sweep, EvolutionConfig, EvolutionRun, Snapshot,
    StepDiagnostics, SweepReport, TimeStep,
};
pub use grid::PeriodicGrid;
pub use kernels::OperatorSet;
