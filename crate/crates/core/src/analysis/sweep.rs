use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rel_dev;
use crate::cavity::{self, CavityParams, MeterSqueezing};
use crate::cavityless::{self, CavitylessParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::oracle::{integrate_propagator, OdeSpec};

/// Oracle spot checks per curve.
pub const SPOT_CHECKS: usize = 5;
/// Relative tolerance of a spot check, `|closed - rk4| / max(1, |rk4|)`.
pub const SPOT_CHECK_TOL: f64 = 1e-8;
const SPOT_SEED: u64 = 0x5eed_f0ce;
/// RK4 step as a fraction of the fastest period scale `1/ω_max`.
const ORACLE_PHASE_STEP: f64 = 0.008;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cavityless,
    Cavity,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Cavityless => "cavityless",
            Model::Cavity => "cavity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Cavityless(CavitylessParams),
    Cavity(CavityParams),
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::Cavityless(_) => Model::Cavityless,
            ModelParams::Cavity(_) => Model::Cavity,
        }
    }

    pub fn reference(model: Model) -> Self {
        match model {
            Model::Cavityless => ModelParams::Cavityless(CavitylessParams::reference()),
            Model::Cavity => ModelParams::Cavity(CavityParams::reference()),
        }
    }

    /// Physical time for the scaled time (`Θt` or `Ωt`).
    pub fn time_from_scaled(&self, scaled: f64) -> f64 {
        match self {
            ModelParams::Cavityless(p) => p.time_from_scaled(scaled),
            ModelParams::Cavity(p) => p.time_from_scaled(scaled),
        }
    }

    /// First scaled time at which probe and meter disentangle: `Θt = π` or `Ωt = 2π`.
    pub fn disentangling_scaled_time(&self) -> f64 {
        match self {
            ModelParams::Cavityless(_) => PI,
            ModelParams::Cavity(_) => 2.0 * PI,
        }
    }

    /// Whether `scaled` is (numerically) a disentangling time.
    pub fn is_disentangling(&self, scaled: f64) -> bool {
        // Θt = π, 3π, ... or Ωt = 2π, 4π, ...
        let offset = match self {
            ModelParams::Cavityless(_) => PI,
            ModelParams::Cavity(_) => 0.0,
        };
        let k = ((scaled - offset) / (2.0 * PI)).round();
        scaled > 0.0 && (scaled - offset - k * 2.0 * PI).abs() < 1e-9
    }

    pub fn signal_response(&self, t: f64) -> Result<f64> {
        match self {
            ModelParams::Cavityless(p) => cavityless::signal_response(p, t),
            ModelParams::Cavity(p) => Ok(cavity::signal_response(p, t)),
        }
    }

    /// Cavity meter squeezing angle minimizing the noise at physical time `t`.
    /// Irrelevant for the cavityless model.
    pub fn meter_phase(&self, t: f64, s: f64) -> Result<f64> {
        match self {
            ModelParams::Cavityless(_) => Ok(0.0),
            ModelParams::Cavity(p) => Ok(cavity::minimize_noise_over_phi(p, t, s, 0.0)?.phi_opt),
        }
    }

    pub fn noise(&self, t: f64, s: f64, phi: f64, n_th: f64) -> Result<f64> {
        match self {
            ModelParams::Cavityless(p) => cavityless::noise(p, t, s, n_th),
            ModelParams::Cavity(p) => cavity::noise(p, t, MeterSqueezing::new(s, phi)?, n_th),
        }
    }

    /// Signal per unit force and noise from an RK4-integrated propagator
    /// applied to the same initial state. The variance is summed over the
    /// normal modes of the initial covariance, which keeps squeezed readouts
    /// accurate when the anti-squeezed variance is many orders larger.
    pub fn oracle_point(&self, t: f64, s: f64, phi: f64, n_th: f64) -> Result<(f64, f64)> {
        let (prop, st, obs) = match self {
            ModelParams::Cavityless(p) => {
                let p = p.with_force(1.0);
                let w = p.omega.max(p.theta_eff()).max(p.chi + p.theta);
                let spec = OdeSpec::with_max_step(cavityless::DIM, |tt| cavityless::generator(&p, tt), t, ORACLE_PHASE_STEP / w)?;
                (integrate_propagator(&spec)?, cavityless::initial_state(s, n_th)?, cavityless::z_i_observable())
            }
            ModelParams::Cavity(p) => {
                let p = p.with_force(1.0);
                let w = p.omega.max(2.0 * p.g_alpha.abs());
                let spec = OdeSpec::with_max_step(cavity::DIM, |tt| cavity::generator(&p, tt), t, ORACLE_PHASE_STEP / w)?;
                let st = cavity::initial_state(MeterSqueezing::new(s, phi)?, n_th)?;
                (integrate_propagator(&spec)?, st, cavity::readout_observable())
            }
        };
        let c = obs.coeffs();
        let mean = c.dot(&(&prop.mat * st.mean() + &prop.disp));
        let u = prop.mat.transpose() * c;
        Ok((mean, normal_mode_variance(st.cov(), &u)))
    }
}

/// `uᵀ V u` as `Σ λ_k (e_k · u)²` over the eigenpairs of `V`.
fn normal_mode_variance(cov: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    let eig = cov.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(l, e)| l * e.dot(u).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Usage(format!("time grid needs at least 2 points, got {count}")));
        }
        if !(start >= 0.0) || !(stop > start) || !stop.is_finite() {
            return Err(Error::Usage(format!("time grid must satisfy 0 <= start < stop, got [{start}, {stop}]")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + span * k as f64 / last).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: ModelParams,
    /// Scaled time grid (`Θt` or `Ωt`).
    pub grid: TimeGrid,
    pub squeezing: Vec<f64>,
    pub thermal: Vec<f64>,
    /// Cavity meter squeezing angle; `None` takes the optimum at each grid time.
    pub phi: Option<f64>,
    pub spot_checks: usize,
}

impl SweepSpec {
    pub fn new(params: ModelParams, grid: TimeGrid, squeezing: Vec<f64>, thermal: Vec<f64>) -> Result<Self> {
        if squeezing.is_empty() || thermal.is_empty() {
            return Err(Error::Usage("sweep needs at least one squeezing and one thermal value".into()));
        }
        if let Some(n) = thermal.iter().find(|n| !(**n >= 0.0)) {
            return Err(Error::Domain(format!("thermal occupation must be >= 0, got {n}")));
        }
        if let Some(s) = squeezing.iter().find(|s| !s.is_finite()) {
            return Err(Error::Domain(format!("squeezing must be finite, got {s}")));
        }
        Ok(Self { params, grid, squeezing, thermal, phi: None, spot_checks: SPOT_CHECKS })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityRecord {
    pub t_scaled: f64,
    pub signal_per_f: f64,
    pub noise: f64,
    pub snr_per_f: f64,
    pub f_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMeta {
    pub model: Model,
    pub s: f64,
    pub n_th: f64,
    /// Fixed cavity meter squeezing angle; `None` when optimized per time
    /// point or for the cavityless model.
    pub phi: Option<f64>,
    pub params: ModelParams,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub meta: CurveMeta,
    pub records: Vec<SensitivityRecord>,
}

impl SensitivityCurve {
    /// Smallest finite `f_min` and its scaled time.
    pub fn min_f_min(&self) -> Option<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.f_min.is_finite())
            .map(|r| (r.t_scaled, r.f_min))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Record whose scaled time is closest to `t_scaled`.
    pub fn nearest(&self, t_scaled: f64) -> Option<&SensitivityRecord> {
        self.records
            .iter()
            .min_by(|a, b| (a.t_scaled - t_scaled).abs().total_cmp(&(b.t_scaled - t_scaled).abs()))
    }
}

/// The squeezing angle in effect at physical time `t`.
fn phase_at(params: &ModelParams, phi: Option<f64>, t: f64, s: f64) -> Result<f64> {
    match phi {
        Some(phi) => Ok(phi),
        None => params.meter_phase(t, s),
    }
}

fn record(params: &ModelParams, t_scaled: f64, s: f64, phi: Option<f64>, n_th: f64) -> Result<SensitivityRecord> {
    let t = params.time_from_scaled(t_scaled);
    let phi = phase_at(params, phi, t, s)?;
    let signal_per_f = params.signal_response(t)?;
    let noise = params.noise(t, s, phi, n_th)?;
    let f_min = cavityless::f_min_from(signal_per_f, noise);
    Ok(SensitivityRecord { t_scaled, signal_per_f, noise, snr_per_f: signal_per_f.abs() / noise.sqrt(), f_min })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SensitivityCurve>> {
    run_sweep_with(spec, Execution::default())
}

/// One curve per `(s, n_th)` pair, in the order squeezing-major. Grid points
/// are evaluated with `exec`; output order is the grid order either way.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Vec<SensitivityCurve>> {
    let times = spec.grid.points();
    let mut curves = Vec::with_capacity(spec.squeezing.len() * spec.thermal.len());
    let mut curve_index = 0u64;
    for &s in &spec.squeezing {
        let phi = spec.phi;
        for &n_th in &spec.thermal {
            let records = exec
                .map(&times, |&t| record(&spec.params, t, s, phi, n_th))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            spot_check(spec, &records, s, phi, n_th, curve_index, exec)?;
            curve_index += 1;
            curves.push(SensitivityCurve {
                meta: CurveMeta {
                    model: spec.params.model(),
                    s,
                    n_th,
                    phi: if matches!(spec.params, ModelParams::Cavity(_)) { phi } else { None },
                    params: spec.params,
                    version: env!("CARGO_PKG_VERSION").to_string(),
                },
                records,
            });
        }
    }
    Ok(curves)
}

fn spot_check(
    spec: &SweepSpec,
    records: &[SensitivityRecord],
    s: f64,
    phi: Option<f64>,
    n_th: f64,
    curve_index: u64,
    exec: Execution,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED ^ curve_index);
    let picks: Vec<usize> = (0..spec.spot_checks.min(records.len())).map(|_| rng.random_range(0..records.len())).collect();
    let failures: Vec<String> = exec
        .map(&picks, |&i| -> Result<Option<String>> {
            let r = &records[i];
            let t = spec.params.time_from_scaled(r.t_scaled);
            let (sig, noise) = spec.params.oracle_point(t, s, phase_at(&spec.params, phi, t, s)?, n_th)?;
            let ds = rel_dev(r.signal_per_f, sig);
            let dn = rel_dev(r.noise, noise);
            Ok((ds > SPOT_CHECK_TOL || dn > SPOT_CHECK_TOL).then(|| {
                format!(
                    "{} s={s} n_th={n_th} t_scaled={}: signal dev {ds:e}, noise dev {dn:e}",
                    spec.params.model().name(),
                    r.t_scaled
                )
            }))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Oracle(failures.join("; ")))
    }
}

/// `f_min` with vacuum meter and zero-temperature mirror at physical time `t`.
pub fn sql_baseline(params: &ModelParams, t: f64) -> Result<f64> {
    let sig = params.signal_response(t)?;
    let noise = params.noise(t, 0.0, 0.0, 0.0)?;
    Ok(cavityless::f_min_from(sig, noise))
}

/// Sweep specs for the reference figure: per model, the SQL (`s = 0`,
/// `N_th = 0`), thermal (`s = 0`, `N_th = 300`) and squeezed (`s = 5`,
/// `N_th = 300`) curves over four disentangling periods.
pub fn fig2_specs(cavityless: CavitylessParams, cavity: CavityParams, points: usize) -> Result<Vec<SweepSpec>> {
    let grid = TimeGrid::new(0.0, 8.0 * PI, points)?;
    let triples = [(0.0, 0.0), (0.0, 300.0), (5.0, 300.0)];
    let mut specs = Vec::new();
    for params in [ModelParams::Cavityless(cavityless), ModelParams::Cavity(cavity)] {
        for (s, n_th) in triples {
            specs.push(SweepSpec::new(params, grid, vec![s], vec![n_th])?);
        }
    }
    Ok(specs)
}

/// The six reference-figure curves, cavityless first.
pub fn fig2(cavityless: CavitylessParams, cavity: CavityParams, points: usize, exec: Execution) -> Result<Vec<SensitivityCurve>> {
    let mut out = Vec::with_capacity(6);
    for spec in fig2_specs(cavityless, cavity, points)? {
        out.extend(run_sweep_with(&spec, exec)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_mode_variance_matches_quadratic_form() {
        let v = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let u = DVector::from_row_slice(&[0.3, -1.2]);
        let direct = (u.transpose() * &v * &u)[(0, 0)];
        assert_close!(normal_mode_variance(&v, &u), direct, 1e-14);
        // Strongly squeezed: e^{±10}/4 along (1, ±1)/√2, readout along the squeezed axis.
        let (a, b) = ((10f64).cosh() / 4.0, (10f64).sinh() / 4.0);
        let v = DMatrix::from_row_slice(2, 2, &[a, -b, -b, a]);
        let u = DVector::from_row_slice(&[1.0, 1.0]);
        let expected = 2.0 * (-10f64).exp() / 4.0;
        let got = normal_mode_variance(&v, &u);
        assert!((got - expected).abs() < 1e-6 * expected, "{got} vs {expected}");
    }

    #[test]
    fn grid_contract() {
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(-1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        let g = TimeGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn curve_self_consistency() {
        let params = ModelParams::reference(Model::Cavityless);
        let spec = SweepSpec::new(params, TimeGrid::new(0.0, 2.0 * PI, 50).unwrap(), vec![0.0, 1.0], vec![0.0, 300.0]).unwrap();
        let curves = run_sweep(&spec).unwrap();
        assert_eq!(curves.len(), 4);
        for c in &curves {
            assert_eq!(c.records.len(), 50);
            for r in &c.records {
                assert!(r.noise > 0.0);
                if r.signal_per_f != 0.0 {
                    assert!((r.f_min * r.signal_per_f.abs() - r.noise.sqrt()).abs() < 1e-9);
                    assert!((r.snr_per_f * r.f_min - 1.0).abs() < 1e-12);
                } else {
                    assert_eq!(r.f_min, f64::INFINITY);
                }
            }
        }
    }

    #[test]
    fn parallel_and_sequential_sweeps_identical() {
        let params = ModelParams::reference(Model::Cavity);
        let spec = SweepSpec::new(params, TimeGrid::new(0.0, 4.0 * PI, 300).unwrap(), vec![0.0, 5.0], vec![300.0]).unwrap();
        let a = run_sweep_with(&spec, Execution::Parallel).unwrap();
        let b = run_sweep_with(&spec, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disentangling_detection() {
        let cl = ModelParams::reference(Model::Cavityless);
        assert!(cl.is_disentangling(PI));
        assert!(cl.is_disentangling(3.0 * PI));
        assert!(!cl.is_disentangling(2.0 * PI));
        let cv = ModelParams::reference(Model::Cavity);
        assert!(cv.is_disentangling(2.0 * PI));
        assert!(!cv.is_disentangling(0.0));
        assert!(!cv.is_disentangling(PI));
    }

    #[test]
    fn sql_examples() {
        let cv = ModelParams::reference(Model::Cavity);
        let sql = sql_baseline(&cv, 2.0 * PI).unwrap();
        let lit = cavity::f_min_2pi_literal(&CavityParams::reference(), 0.0);
        assert_close!(sql, lit / 2.0, 1e-12);
        let cl = ModelParams::reference(Model::Cavityless);
        let p = CavitylessParams::reference();
        let sql = sql_baseline(&cl, p.time_from_scaled(PI)).unwrap();
        assert_close!(sql, cavityless::f_min_at_pi_closed(&p, 0.0).unwrap(), 1e-12);
        assert!(sql >= cavityless::f_min_at_pi(&p, 1.0).unwrap());
        assert_eq!(sql_baseline(&cl, 0.0).unwrap(), f64::INFINITY);
    }
}
