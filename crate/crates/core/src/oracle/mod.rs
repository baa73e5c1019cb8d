//! Independent validation engines.
//!
//! * [`rk4`]: fixed-step RK4 integration of the exact moment equations of a
//!   linear (quadratic-Hamiltonian) system. The time-dependent drive is
//!   evaluated analytically at every stage time.
//! * [`fock`]: quadrature moments summed directly over a truncated Fock
//!   basis for thermal, two-mode squeezed and single-mode squeezed states.

pub mod fock;
pub mod rk4;

pub use fock::{fock_moments, FockEnsemble, FockFamily, FockSpec};
pub use rk4::{convergence_report, integrate_moments, integrate_propagator, propagator_trajectory, ConvergenceReport, OdeSpec};
