use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cavity::{self, CavityParams, MeterSqueezing};
use crate::cavityless::{self, CavitylessParams};
use crate::error::Result;
use crate::gaussian::{self, AffinePropagator, GaussianState, QuadConvention};
use crate::oracle::{fock_moments, propagator_trajectory, FockFamily, FockSpec};

/// Tolerance for closed forms against RK4.
pub const ORACLE_TOL: f64 = 1e-8;
/// Tolerance for Fock sums against the Gaussian constructors.
pub const FOCK_TOL: f64 = 1e-10;
const GRID_POINTS: usize = 200;
const RK4_STEP: f64 = 1e-3;

/// One closed form checked against an independent engine.
///
/// `literal_*` describe the formula as published, where it differs from the
/// adopted one; `adopted_deviation` is what `pass` is decided on.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub id: String,
    pub formula: String,
    pub engine_value: f64,
    pub literal_value: Option<f64>,
    pub literal_deviation: Option<f64>,
    pub adopted_deviation: f64,
    pub tolerance: f64,
    pub resolution: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationLedger {
    pub entries: Vec<LedgerEntry>,
    pub passed: bool,
}

impl ValidationLedger {
    pub fn entry(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn failures(&self) -> Vec<&LedgerEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn entry(
    id: &str,
    formula: &str,
    engine_value: f64,
    literal: Option<(f64, f64)>,
    adopted_deviation: f64,
    tolerance: f64,
    resolution: &str,
    details: String,
) -> LedgerEntry {
    LedgerEntry {
        id: id.into(),
        formula: formula.into(),
        engine_value,
        literal_value: literal.map(|l| l.0),
        literal_deviation: literal.map(|l| l.1),
        adopted_deviation,
        tolerance,
        resolution: resolution.into(),
        pass: adopted_deviation <= tolerance,
        details,
    }
}

fn linspace(stop: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| stop * k as f64 / (count - 1) as f64).collect()
}

fn quad_form(c: &DVector<f64>, v: &DMatrix<f64>) -> f64 {
    (c.transpose() * v * c)[(0, 0)]
}

/// Variance of `obs` after `prop`, computed without the library's `apply`.
fn propagated_variance(obs: &DVector<f64>, prop: &AffinePropagator, state: &GaussianState) -> f64 {
    quad_form(&(prop.mat.transpose() * obs), state.cov())
}

fn max_abs_diff(a: &AffinePropagator, b: &AffinePropagator) -> (f64, f64) {
    ((&a.mat - &b.mat).amax(), (&a.disp - &b.disp).amax())
}

/// Run every closed-form check and collect the results.
pub fn validation_ledger() -> Result<ValidationLedger> {
    let mut entries = Vec::new();
    entries.extend(cavityless_entries()?);
    entries.extend(cavity_entries()?);
    entries.push(fock_entry()?);
    let passed = entries.iter().all(|e| e.pass);
    Ok(ValidationLedger { entries, passed })
}

fn cavityless_entries() -> Result<Vec<LedgerEntry>> {
    let p = CavitylessParams::reference();
    let th = p.theta_eff();
    let times: Vec<f64> = linspace(2.0 * PI / th, GRID_POINTS);
    let rk4 = propagator_trajectory(cavityless::DIM, |t| cavityless::generator(&p, t), &times, RK4_STEP)?;
    let mut out = Vec::new();

    // Displacements of the three mode operators.
    let mut dev_adopted = 0f64;
    let mut dev_literal = [0f64; 3];
    let mut at_end = [0f64; 3];
    for (t, oracle) in times.iter().zip(&rk4) {
        let closed = cavityless::closed_propagator(&p, *t)?;
        dev_adopted = dev_adopted.max((&closed.disp - &oracle.disp).amax());
        let lit = cavityless::literal_drive_terms(&p, *t);
        let orc = cavityless::mode_displacements(oracle);
        for k in 0..3 {
            dev_literal[k] = dev_literal[k].max((lit[k] - orc[k]).norm());
        }
        at_end = [lit[0].norm(), orc[0].norm(), dev_literal[0]];
    }
    out.push(entry(
        "cavityless.drive.a1",
        "<a1>(t) = chi K [i(e^{-i Omega t} - cos Theta t) - (Omega/Theta) sin Theta t]",
        at_end[1],
        Some((at_end[0], dev_literal[0])),
        dev_adopted,
        ORACLE_TOL,
        "published term Omega sinh(Theta t) replaced by (Omega/Theta) sin(Theta t)",
        format!(
            "max |literal - rk4| over Theta t in [0, 2pi]: a1 {:.3e}, b {:.3e}, a2 {:.3e}; \
             the literal b term has the wrong sign on Omega e^(i Omega t) and does not vanish at t = 0, \
             the literal a2 term lacks 1/Theta",
            dev_literal[0], dev_literal[1], dev_literal[2]
        ),
    ));

    let mut dev_mat = 0f64;
    let mut drift = 0f64;
    let sigma = QuadConvention::symplectic_form(3);
    for (t, oracle) in times.iter().zip(&rk4) {
        let closed = cavityless::closed_propagator(&p, *t)?;
        dev_mat = dev_mat.max(max_abs_diff(&closed, oracle).0);
        drift = drift.max((&closed.mat * &sigma * closed.mat.transpose() - &sigma).amax());
    }
    out.push(entry(
        "cavityless.propagator",
        "homogeneous propagator of (X1, Y1, Xb, Yb, X2, Y2)",
        dev_mat,
        None,
        dev_mat,
        ORACLE_TOL,
        "closed form adopted",
        format!("{GRID_POINTS} points over Theta t in [0, 2pi]; max |M Sigma M^T - Sigma| = {drift:.3e}"),
    ));

    // Signal.
    let z = cavityless::z_i_observable();
    let mut dev_sig = 0f64;
    for (t, oracle) in times.iter().zip(&rk4) {
        let sig = cavityless::signal_response(&p, *t)?;
        dev_sig = dev_sig.max((sig - z.coeffs().dot(&oracle.disp)).abs());
    }
    out.push(entry(
        "cavityless.signal",
        "<Z_I> = (theta - chi)(cos Theta t - cos Omega t) Omega f / (Omega^2 - Theta^2)",
        cavityless::signal_response(&p, PI / th)?,
        None,
        dev_sig,
        ORACLE_TOL,
        "published form confirmed",
        format!("max deviation over {GRID_POINTS} points"),
    ));

    // Sign of the sinh(2s) term.
    let s = 1.0;
    let adopted = cavityless::initial_state(s, 0.0)?;
    let face_value = cavityless::initial_state(-s, 0.0)?;
    let (mut dev_lit_face, mut dev_lit_adopted, mut dev_engine) = (0f64, 0f64, 0f64);
    for (t, oracle) in times.iter().zip(&rk4) {
        let lit = cavityless::noise_literal(&p, *t, s, 0.0);
        let orc_adopted = propagated_variance(z.coeffs(), oracle, &adopted);
        let orc_face = propagated_variance(z.coeffs(), oracle, &face_value);
        let scale = orc_adopted.abs().max(1.0);
        dev_lit_face = dev_lit_face.max((lit - orc_face).abs() / orc_face.abs().max(1.0));
        dev_lit_adopted = dev_lit_adopted.max((lit - orc_adopted).abs() / scale);
        dev_engine = dev_engine.max((cavityless::noise(&p, *t, s, 0.0)? - orc_adopted).abs() / scale);
    }
    let t_pi = PI / th;
    out.push(entry(
        "cavityless.noise.sinh2s_sign",
        "Var(Z_I)(t) with the sinh(2s) cross term",
        cavityless::noise(&p, t_pi, s, 0.0)?,
        Some((cavityless::noise_literal(&p, t_pi, s, 0.0), dev_lit_face)),
        dev_engine.max(dev_lit_adopted),
        ORACLE_TOL,
        "published expression holds for the meter tanh^n(-s)|n,n>, i.e. the state squeezing Y1 - Y2; \
         that meter is adopted",
        format!(
            "s = {s}: relative deviation of the published noise from rk4 with the tanh^n(s)|n,n> meter \
             {dev_lit_face:.3e}, with the adopted meter {dev_lit_adopted:.3e}; at Theta t = pi the face-value \
             reading gives the factor e^(+2s) instead of e^(-2s)"
        ),
    ));

    let n0 = cavityless::noise(&p, 0.0, 0.0, 0.0)?;
    let n0_lit = cavityless::noise_literal(&p, 0.0, 0.0, 0.0);
    out.push(entry(
        "cavityless.noise.t0",
        "Var(Z_I)(0) for vacuum meter",
        n0,
        Some((n0_lit, (n0_lit - 0.5).abs())),
        (n0 - 0.5).abs(),
        ORACLE_TOL,
        "both paths give 1/2",
        String::new(),
    ));

    // f_min at Theta t = pi.
    let pi_prop = propagator_trajectory(cavityless::DIM, |t| cavityless::generator(&p, t), &[t_pi], RK4_STEP)?;
    let meter = cavityless::initial_state(0.0, 0.0)?;
    let sig = z.coeffs().dot(&pi_prop[0].disp);
    let f_oracle = propagated_variance(z.coeffs(), &pi_prop[0], &meter).sqrt() / sig.abs();
    let f_closed = cavityless::f_min_at_pi_closed(&p, 0.0)?;
    let f_lit = cavityless::f_min_at_pi_literal(&p, 0.0);
    out.push(entry(
        "cavityless.f_min.pi_cosine_sign",
        "f_min(Theta t = pi) = (Omega^2 - Theta^2) e^{-s} / (sqrt2 (theta + chi) Omega |1 + cos(pi Omega/Theta)|)",
        f_closed,
        Some((f_lit, (f_lit - f_oracle).abs() / f_oracle)),
        (f_closed - f_oracle).abs() / f_oracle,
        ORACLE_TOL,
        "denominator 1 + cos(pi Omega/Theta), not 1 - cos; the signal at Theta t = pi vanishes for odd \
         Omega/Theta, and nothing special happens at integer Omega/(2 Theta)",
        format!("Omega/Theta = {}; rk4 f_min = {f_oracle:.12e}; deviations relative", p.omega / th),
    ));

    Ok(out)
}

fn cavity_entries() -> Result<Vec<LedgerEntry>> {
    let p = CavityParams::reference();
    let times = linspace(4.0 * PI / p.omega, GRID_POINTS);
    let rk4 = propagator_trajectory(cavity::DIM, |t| cavity::generator(&p, t), &times, RK4_STEP)?;
    let mut out = Vec::new();

    let mut dev = 0f64;
    for (t, oracle) in times.iter().zip(&rk4) {
        let (dm, dd) = max_abs_diff(&cavity::closed_propagator(&p, *t), oracle);
        dev = dev.max(dm).max(dd);
    }
    out.push(entry(
        "cavity.propagator",
        "affine propagator of (Xa, Ya, Xb, Yb)",
        dev,
        None,
        dev,
        ORACLE_TOL,
        "closed form adopted; readout is -Y_a so that the signal is positive for f > 0",
        format!("{GRID_POINTS} points over Omega t in [0, 4pi]"),
    ));

    // Normalization of the published noise.
    let readout = cavity::readout_observable();
    let (s, phi, n_th) = (0.7, 0.4, 20.0);
    let block = |meter: Option<f64>, mirror: f64| -> Result<DMatrix<f64>> {
        let mut v = DMatrix::zeros(cavity::DIM, cavity::DIM);
        if let Some(angle) = meter {
            v.view_mut((0, 0), (2, 2)).copy_from(gaussian::single_mode_squeezed(s, angle)?.cov());
        }
        if mirror > 0.0 {
            v.view_mut((2, 2), (2, 2)).copy_from(&(DMatrix::identity(2, 2) * mirror));
        }
        Ok(v)
    };
    let adopted_meter = block(Some(-phi), 0.0)?;
    let face_meter = block(Some(phi), 0.0)?;
    let mirror = block(None, (2.0 * n_th + 1.0) / 4.0)?;
    let (mut dev_k, mut dev_face) = (0f64, 0f64);
    for (t, oracle) in times.iter().zip(&rk4) {
        let u = oracle.mat.transpose() * readout.coeffs();
        let lit = cavity::noise_literal(&p, *t, s, phi, n_th);
        let m = quad_form(&u, &mirror);
        dev_k = dev_k.max((lit - m - 4.0 * quad_form(&u, &adopted_meter)).abs() / lit);
        dev_face = dev_face.max((lit - m - quad_form(&u, &face_meter)).abs() / lit);
    }
    let t2 = cavity::disentangling_time(&p);
    let k_at_2pi = cavity::noise_literal(&p, t2, s, phi, n_th) / cavity::noise(&p, t2, MeterSqueezing::new(s, -phi)?, n_th)?;
    out.push(entry(
        "cavity.noise.normalization",
        "Var(Y)(t) with meter variances e^{+-2s}",
        k_at_2pi,
        Some((4.0, dev_face)),
        dev_k,
        ORACLE_TOL,
        "meter terms of the published noise are 4x the engine value (variances normalized to 1, not 1/4); \
         mirror terms already use 1/4; published phi corresponds to engine -phi. \
         The overall ratio is exactly 4 only where the mirror part vanishes (Omega t = 2 pi k)",
        format!(
            "s = {s}, phi = {phi}, N_th = {n_th}: max relative deviation of the published noise from \
             mirror + 4 x meter(-phi) (rk4) = {dev_k:.3e}; from mirror + meter(phi) taken at face value \
             {dev_face:.3e}; published/engine at Omega t = 2pi = {k_at_2pi:.12}"
        ),
    ));

    // Minimum over the squeezing angle.
    let c2 = 4.0 * PI * PI * p.coupling_ratio().powi(4);
    let mut dev_scan = 0f64;
    let mut dev_struct = 0f64;
    let mut scan_min = 0.0;
    for s in [0.0, 1.0, 5.0] {
        let eig = cavity::minimize_noise_over_phi(&p, t2, s, 0.0)?;
        let scan = cavity::minimize_noise_by_scan(&p, t2, s, 0.0)?;
        dev_scan = dev_scan.max((eig.noise_min - scan.noise_min).abs());
        dev_struct = dev_struct.max((eig.noise_min - (1.0 + c2) * (-2.0 * s).exp() / 4.0).abs());
        if s == 0.0 {
            scan_min = scan.noise_min;
        }
    }
    out.push(entry(
        "cavity.noise.phi_minimum",
        "min_phi Var(Y)(2pi/Omega) = [1 + 4 pi^2 (2 g alpha/Omega)^4] e^{-2s} / 4",
        cavity::minimize_noise_over_phi(&p, t2, 0.0, 0.0)?.noise_min,
        Some((cavity::noise_min_2pi_literal(&p, 0.0), (cavity::noise_min_2pi_literal(&p, 0.0) - 4.0 * scan_min).abs())),
        dev_scan.max(dev_struct),
        ORACLE_TOL,
        "eigenvalue minimum adopted; published value is 4x (same normalization as above)",
        format!("s in {{0, 1, 5}}: eigen vs {}-point scan {dev_scan:.3e}, vs structure {dev_struct:.3e}", cavity::PHI_SCAN_POINTS),
    ));

    let f = cavity::f_min_2pi(&p, 0.0)?;
    let f_lit = cavity::f_min_2pi_literal(&p, 0.0);
    let prop2 = propagator_trajectory(cavity::DIM, |t| cavity::generator(&p, t), &[t2], RK4_STEP)?;
    let sig2 = readout.coeffs().dot(&prop2[0].disp);
    let f_oracle = scan_min.sqrt() / sig2.abs();
    out.push(entry(
        "cavity.f_min.2pi",
        "f_min(Omega t = 2pi) = sqrt(1 + 4 pi^2 (2 g alpha/Omega)^4) e^{-s} / (8 pi g alpha/Omega)",
        f,
        Some((f_lit, (f_lit - f_oracle).abs() / f_oracle)),
        (f - f_oracle).abs() / f_oracle,
        ORACLE_TOL,
        "published value is twice the engine value because of the variance normalization",
        format!("published {f_lit:.6} vs engine {f:.6}; reference uses the rk4 signal and the phi-scan noise"),
    ));

    Ok(out)
}

fn fock_entry() -> Result<LedgerEntry> {
    let mut dev = 0f64;
    let mut checked = Vec::new();
    for s in [0.3, 0.5, 1.0] {
        for (family, state) in [
            (FockFamily::TwoModeSqueezed { s }, gaussian::two_mode_squeezed(s)?),
            (FockFamily::SingleModeSqueezed { s, phi: 0.4 }, gaussian::single_mode_squeezed(s, 0.4)?),
        ] {
            dev = dev.max(fock_deviation(family, &state)?);
            checked.push(format!("{family:?}"));
        }
    }
    for n_bar in [0.2, 0.5, 2.0] {
        let family = FockFamily::Thermal { n_bar };
        dev = dev.max(fock_deviation(family, &gaussian::thermal_state(n_bar)?)?);
        checked.push(format!("{family:?}"));
    }
    Ok(entry(
        "states.fock",
        "Gaussian constructors vs truncated Fock sums",
        dev,
        None,
        dev,
        FOCK_TOL,
        "constructors adopted",
        checked.join(", "),
    ))
}

fn fock_deviation(family: FockFamily, state: &GaussianState) -> Result<f64> {
    let (m, v) = fock_moments(&FockSpec::auto(family)?);
    Ok((&m - state.mean()).amax().max((&v - state.cov()).amax()))
}
