//! Quantum-limited force sensing with optomechanical detectors.
//!
//! Two schemes are modelled in the Gaussian (moment) picture:
//!
//! * a cavityless three-mode scheme where a vibrating mirror `b` scatters an
//!   intense beam into Stokes and anti-Stokes sidebands `a₁`, `a₂`, read out by
//!   heterodyning `Y₁ + Y₂` ([`cavityless`]);
//! * a single-mode cavity scheme read out by homodyning the cavity phase
//!   quadrature ([`cavity`]).
//!
//! Every closed-form propagator, signal and noise expression is checked
//! against independent numerical engines in [`oracle`]: fixed-step RK4 on the
//! exact moment equations and truncated Fock-space moment sums.
//! [`analysis`] builds sweeps and derived tables on top, and [`io`] holds the
//! command-line front end and the CSV/JSON formats.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (|diff| {:e} > {:e})", a, b, (a - b).abs(), $tol);
    }};
}

pub mod analysis;
pub mod cavity;
pub mod cavityless;
pub mod error;
pub mod exec;
pub mod gaussian;
pub mod io;
pub mod oracle;

pub use error::{Error, Result};
pub use gaussian::{AffinePropagator, GaussianState, LinearObservable, QuadConvention};
