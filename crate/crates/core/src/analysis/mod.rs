//! Sweeps, baselines and derived tables built on the two models.

mod ledger;
mod power;
mod spectrum;
mod sweep;

pub use ledger::{validation_ledger, LedgerEntry, ValidationLedger};
pub use power::{power_scaling, PowerRow, PowerScalingSpec, PowerScalingTable};
pub use spectrum::dominant_frequencies;
pub use sweep::{
    fig2, fig2_specs, run_sweep, run_sweep_with, sql_baseline, CurveMeta, Model, ModelParams, SensitivityCurve,
    SensitivityRecord, SweepSpec, TimeGrid, SPOT_CHECKS, SPOT_CHECK_TOL,
};

/// `|a - b| / max(1, |b|)`.
pub(crate) fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
