use serde::Serialize;

use super::sweep::ModelParams;
use crate::cavity::{self, CavityParams};
use crate::cavityless::{self, CavitylessParams};
use crate::error::{Error, Result};

/// Number of points at each end used for the log-log slope fits.
const FIT_POINTS: usize = 5;

/// Laser-power scan. Couplings scale as `sqrt(℘/℘₀)`; the mirror frequency
/// and `θ/χ` stay fixed. `f_min` is evaluated at the disentangling time of
/// each scaled bundle (`Θt = π` moves as `Θ` changes).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerScalingSpec {
    pub base: ModelParams,
    pub multipliers: Vec<f64>,
    pub s: f64,
}

impl PowerScalingSpec {
    pub fn new(base: ModelParams, multipliers: Vec<f64>, s: f64) -> Result<Self> {
        if multipliers.is_empty() {
            return Err(Error::Usage("power scaling needs at least one multiplier".into()));
        }
        if let Some(m) = multipliers.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::Domain(format!("power multiplier must be positive, got {m}")));
        }
        Ok(Self { base, multipliers, s })
    }

    /// `count` multipliers log-spaced over `[lo, hi]`.
    pub fn log_spaced(base: ModelParams, lo: f64, hi: f64, count: usize, s: f64) -> Result<Self> {
        if !(lo > 0.0) || !(hi > lo) || count < 2 {
            return Err(Error::Domain(format!("invalid log range [{lo}, {hi}] with {count} points")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let m = (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect();
        Self::new(base, m, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerRow {
    pub power_ratio: f64,
    pub f_min: f64,
    /// False when the cavityless bundle leaves `Ω² ≫ Θ²` or hits `Θ = Ω`.
    pub in_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerScalingTable {
    pub rows: Vec<PowerRow>,
    /// Log-log slope of `f_min` over the lowest-power fit window.
    pub small_power_slope: f64,
    /// Same over the highest-power window.
    pub large_power_slope: f64,
}

pub fn power_scaling(spec: &PowerScalingSpec) -> Result<PowerScalingTable> {
    let rows = spec
        .multipliers
        .iter()
        .map(|&m| row(&spec.base, m, spec.s))
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<&PowerRow> = rows.iter().filter(|r| r.in_regime && r.f_min.is_finite()).collect();
    let k = FIT_POINTS.min(usable.len());
    let small_power_slope = fit_slope(&usable[..k]);
    let large_power_slope = fit_slope(&usable[usable.len() - k..]);
    Ok(PowerScalingTable { rows, small_power_slope, large_power_slope })
}

fn row(base: &ModelParams, m: f64, s: f64) -> Result<PowerRow> {
    let scale = m.sqrt();
    match base {
        ModelParams::Cavityless(p) => {
            let scaled = CavitylessParams::new(p.chi * scale, p.theta * scale, p.omega, p.force)?;
            match cavityless::f_min_at_pi(&scaled, s) {
                Ok(f) => Ok(PowerRow { power_ratio: m, f_min: f, in_regime: scaled.in_regime() }),
                Err(Error::DegenerateResonance { .. }) => Ok(PowerRow { power_ratio: m, f_min: f64::NAN, in_regime: false }),
                Err(e) => Err(e),
            }
        }
        ModelParams::Cavity(p) => {
            let scaled = CavityParams::new(p.g_alpha * scale, p.omega, p.force)?;
            Ok(PowerRow { power_ratio: m, f_min: cavity::f_min_2pi(&scaled, s)?, in_regime: true })
        }
    }
}

/// Least-squares slope of `ln f_min` against `ln(℘/℘₀)`.
fn fit_slope(rows: &[&PowerRow]) -> f64 {
    if rows.len() < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.power_ratio.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.f_min.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
