//! Massless spinor profiles on an infinite disc curled into an almost-S².
//!
//! The crate evaluates the closed-form zero modes of the coupled radial
//! equations, checks them against the equations themselves (residuals and
//! adaptive propagation), and decides their normalizability three ways:
//! inequality windows, a Beta-function closed form and direct quadrature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod normalization;
pub mod params;
pub mod scan;

pub use analytic::{Branch, ProfileSpec, SpinorState};
pub use eigen::{EigenMode, Sign};
pub use normalization::{Convention, Endpoint, NormReport, NormValue, QuadOutcome, WindowInterval};
pub use error::{Error, Result};
pub use params::{validate_params, vielbein, CouplingParams, RawParams, VielbeinSample};
