//! Single-mode cavity scheme, resonant drive (`Δ = 0`) and real mean field `α`.
//!
//! Linearized Hamiltonian `ħΩ b†b + ħgα(a + a†)(b + b†) - ħΩf(b + b†)`.
//! Quadrature ordering `(X_a, Y_a, X_b, Y_b)`; sweeps use the scaled time `Ωt`.
//! The amplitude quadrature `X_a` is conserved and the force is read from the
//! phase quadrature `Y_a` by homodyne detection.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cavityless::f_min_from;
use crate::error::{Error, Result};
use crate::gaussian::{self, AffinePropagator, GaussianState, LinearObservable};

pub const DIM: usize = 4;

const XA: usize = 0;
const YA: usize = 1;
const XB: usize = 2;
const YB: usize = 3;

/// Number of grid points of the φ scan over `[0, π)`.
pub const PHI_SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    pub g_alpha: f64,
    pub omega: f64,
    pub force: f64,
}

impl CavityParams {
    pub fn new(g_alpha: f64, omega: f64, force: f64) -> Result<Self> {
        if !g_alpha.is_finite() {
            return Err(Error::Domain(format!("g*alpha must be finite, got {g_alpha}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !force.is_finite() {
            return Err(Error::Domain(format!("force must be finite, got {force}")));
        }
        Ok(Self { g_alpha, omega, force })
    }

    pub fn from_ratio(g_alpha_over_omega: f64, omega: f64, force: f64) -> Result<Self> {
        Self::new(g_alpha_over_omega * omega, omega, force)
    }

    /// `gα/Ω = 0.2`, `Ω = f = 1`.
    pub fn reference() -> Self {
        Self::from_ratio(0.2, 1.0, 1.0).expect("reference parameters are valid")
    }

    /// `r = 2gα/Ω`.
    pub fn coupling_ratio(&self) -> f64 {
        2.0 * self.g_alpha / self.omega
    }

    pub fn time_from_scaled(&self, omega_t: f64) -> f64 {
        omega_t / self.omega
    }

    pub fn with_force(&self, force: f64) -> Self {
        Self { force, ..*self }
    }
}

/// Squeezed vacuum meter `exp[ζ* a² - ζ a†²]|0>`, `ζ = (s/2) e^{2iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeterSqueezing {
    pub s: f64,
    pub phi: f64,
}

impl MeterSqueezing {
    pub fn new(s: f64, phi: f64) -> Result<Self> {
        if !s.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!("meter squeezing must be finite (s={s}, phi={phi})")));
        }
        Ok(Self { s, phi })
    }
}

pub fn generator(params: &CavityParams, _t: f64) -> (DMatrix<f64>, DVector<f64>) {
    let k = 2.0 * params.g_alpha;
    let om = params.omega;
    let mut a = DMatrix::zeros(DIM, DIM);
    a[(YA, XB)] = -k;
    a[(XB, YB)] = om;
    a[(YB, XB)] = -om;
    a[(YB, XA)] = -k;
    let mut c = DVector::zeros(DIM);
    c[YB] = om * params.force;
    (a, c)
}

/// Closed-form propagator at physical time `t`.
///
/// With `r = 2gα/Ω`:
/// `Y_a(t) = Y_a + r²(Ωt - sin Ωt) X_a - r sin Ωt X_b - r(1 - cos Ωt) Y_b - r(Ωt - sin Ωt) f`;
/// the mirror is a rotation at `Ω` displaced by `f - r X_a`.
pub fn closed_propagator(params: &CavityParams, t: f64) -> AffinePropagator {
    let r = params.coupling_ratio();
    let f = params.force;
    let phase = params.omega * t;
    let (s, c) = phase.sin_cos();
    let secular = phase - s;

    let mut m = DMatrix::zeros(DIM, DIM);
    m[(XA, XA)] = 1.0;
    m[(YA, XA)] = r * r * secular;
    m[(YA, YA)] = 1.0;
    m[(YA, XB)] = -r * s;
    m[(YA, YB)] = -r * (1.0 - c);
    m[(XB, XA)] = -r * (1.0 - c);
    m[(XB, XB)] = c;
    m[(XB, YB)] = s;
    m[(YB, XA)] = -r * s;
    m[(YB, XB)] = -s;
    m[(YB, YB)] = c;

    let mut d = DVector::zeros(DIM);
    d[YA] = -r * secular * f;
    d[XB] = f * (1.0 - c);
    d[YB] = f * s;
    AffinePropagator { mat: m, disp: d, time: t }
}

/// Homodyne readout `-Y_a`; the local-oscillator sign is chosen so that the
/// signal is positive for positive force.
pub fn readout_observable() -> LinearObservable {
    let mut c = DVector::zeros(DIM);
    c[YA] = -1.0;
    LinearObservable::new(c).expect("nonzero")
}

/// Amplitude quadrature `X_a`.
pub fn amplitude_observable() -> LinearObservable {
    let mut c = DVector::zeros(DIM);
    c[XA] = 1.0;
    LinearObservable::new(c).expect("nonzero")
}

/// `S(t) = (2gα/Ω)[Ωt - sin Ωt]`.
pub fn signal_response(params: &CavityParams, t: f64) -> f64 {
    let phase = params.omega * t;
    params.coupling_ratio() * (phase - phase.sin())
}

pub fn signal(params: &CavityParams, t: f64) -> f64 {
    signal_response(params, t) * params.force
}

/// Initial state on `(a, b)`: squeezed meter, thermal mirror.
pub fn initial_state(meter: MeterSqueezing, n_th: f64) -> Result<GaussianState> {
    gaussian::tensor(&[gaussian::single_mode_squeezed(meter.s, meter.phi)?, gaussian::thermal_state(n_th)?])
}

/// `Var(Y_a)(t)` by covariance propagation.
///
/// Summed over the normal modes of the initial covariance (squeezed axis
/// `(cos φ, sin φ)`, the orthogonal axis, the mirror) so that no cancellation
/// occurs between `e^{-2s}` and `e^{2s}` terms.
pub fn noise(params: &CavityParams, t: f64, meter: MeterSqueezing, n_th: f64) -> Result<f64> {
    gaussian::thermal_state(n_th)?;
    let ([vx, vy], thermal) = readout_split(params, t, n_th)?;
    let (sin, cos) = meter.phi.sin_cos();
    let along = vx * cos + vy * sin;
    let across = -vx * sin + vy * cos;
    Ok(((-2.0 * meter.s).exp() * along * along + (2.0 * meter.s).exp() * across * across) / 4.0 + thermal)
}

/// Literal transcription of the published noise of `Y`, with its own squeezing
/// angle `phi_published`.
///
/// Relation to [`noise`]: the mirror terms (zero-point and thermal) agree as
/// written, the meter terms are four times the engine value at
/// `φ = -phi_published`.
pub fn noise_literal(params: &CavityParams, t: f64, s: f64, phi_published: f64, n_th: f64) -> f64 {
    let g = params.g_alpha / params.omega;
    let r = 2.0 * g;
    let phase = params.omega * t;
    let secular = phase - phase.sin();
    let (sp, cp) = phi_published.sin_cos();
    let em = (-2.0 * s).exp();
    let ep = (2.0 * s).exp();
    g * g * phase.sin().powi(2) * (1.0 + 2.0 * n_th)
        + g * g * (1.0 - phase.cos()).powi(2) * (1.0 + 2.0 * n_th)
        + r.powi(4) * secular * secular * (em * cp * cp + ep * sp * sp)
        + (em * sp * sp + ep * cp * cp)
        + 2.0 * r * r * secular * (ep - em) * sp * cp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiMinimum {
    pub phi_opt: f64,
    pub noise_min: f64,
}

/// Heisenberg coefficients of the readout on `(X_a, Y_a)` and the thermal
/// (mirror) contribution to the noise at time `t`.
fn readout_split(params: &CavityParams, t: f64, n_th: f64) -> Result<([f64; 2], f64)> {
    let (coef, _) = readout_observable().heisenberg(&closed_propagator(params, t))?;
    let thermal = (coef[XB].powi(2) + coef[YB].powi(2)) * (2.0 * n_th + 1.0) / 4.0;
    Ok(([coef[XA], coef[YA]], thermal))
}

/// The meter part of the noise as a quadratic form `uᵀ Q u` in `u = (cos φ, sin φ)`.
///
/// With readout coefficients `v` on `(X_a, Y_a)`,
/// `Q = [e^{2s}|v|² I - 2 sinh(2s) v vᵀ]/4`.
pub fn meter_quadratic_form(params: &CavityParams, t: f64, s: f64) -> Result<[[f64; 2]; 2]> {
    let ([vx, vy], _) = readout_split(params, t, 0.0)?;
    let norm2 = vx * vx + vy * vy;
    let ep = (2.0 * s).exp();
    let sh2 = 2.0 * (2.0 * s).sinh();
    Ok([
        [(ep * norm2 - sh2 * vx * vx) / 4.0, -sh2 * vx * vy / 4.0],
        [-sh2 * vx * vy / 4.0, (ep * norm2 - sh2 * vy * vy) / 4.0],
    ])
}

/// Minimum of the noise over the meter squeezing angle, from the smallest
/// eigenvalue of [`meter_quadratic_form`].
pub fn minimize_noise_over_phi(params: &CavityParams, t: f64, s: f64, n_th: f64) -> Result<PhiMinimum> {
    MeterSqueezing::new(s, 0.0)?;
    gaussian::thermal_state(n_th)?;
    let ([vx, vy], thermal) = readout_split(params, t, n_th)?;
    // The eigenvectors of Q are v and its normal, with eigenvalues
    // e^{-2s}|v|²/4 and e^{2s}|v|²/4. Squeeze along v for s > 0.
    let along_v = vy.atan2(vx);
    let phi_opt = if s >= 0.0 { along_v } else { along_v + PI / 2.0 }.rem_euclid(PI);
    let noise_min = (-2.0 * s.abs()).exp() * (vx * vx + vy * vy) / 4.0 + thermal;
    Ok(PhiMinimum { phi_opt, noise_min })
}

/// The same minimum by brute force: [`PHI_SCAN_POINTS`] samples of the
/// propagated noise over `[0, π)`, refined by golden-section search around the
/// best sample.
pub fn minimize_noise_by_scan(params: &CavityParams, t: f64, s: f64, n_th: f64) -> Result<PhiMinimum> {
    let eval = |phi: f64| noise(params, t, MeterSqueezing::new(s, phi)?, n_th);
    let step = PI / PHI_SCAN_POINTS as f64;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..PHI_SCAN_POINTS {
        let phi = k as f64 * step;
        let v = eval(phi)?;
        if v < best.1 {
            best = (phi, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2)?;
        }
    }
    let (phi, v) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let (phi, v) = if v < best.1 { (phi, v) } else { best };
    Ok(PhiMinimum { phi_opt: phi.rem_euclid(PI), noise_min: v })
}

/// Disentangling time `Ωt = 2π`.
pub fn disentangling_time(params: &CavityParams) -> f64 {
    2.0 * PI / params.omega
}

/// `sqrt(N)/|S|`, `+inf` where the signal vanishes.
pub fn f_min(params: &CavityParams, t: f64, meter: MeterSqueezing, n_th: f64) -> Result<f64> {
    Ok(f_min_from(signal_response(params, t), noise(params, t, meter, n_th)?))
}

pub fn snr(params: &CavityParams, t: f64, meter: MeterSqueezing, n_th: f64) -> Result<f64> {
    Ok(signal_response(params, t).abs() * params.force.abs() / noise(params, t, meter, n_th)?.sqrt())
}

/// Minimum detectable force at `Ωt = 2π` with the squeezing angle optimized.
pub fn f_min_2pi(params: &CavityParams, s: f64) -> Result<f64> {
    let t = disentangling_time(params);
    let min = minimize_noise_over_phi(params, t, s, 0.0)?;
    Ok(f_min_from(signal_response(params, t), min.noise_min))
}

/// Published form `[1 + 4π²(2gα/Ω)⁴]^{1/2} e^{-s} / (4π gα/Ω)`; twice
/// [`f_min_2pi`] because its meter variances are normalized to 1, not 1/4.
pub fn f_min_2pi_literal(params: &CavityParams, s: f64) -> f64 {
    let g = params.g_alpha / params.omega;
    (1.0 + 4.0 * PI * PI * (2.0 * g).powi(4)).sqrt() * (-s).exp() / (4.0 * PI * g)
}

/// Published minimum noise `[1 + 4π²(2gα/Ω)⁴] e^{-2s}` at `Ωt = 2π`.
pub fn noise_min_2pi_literal(params: &CavityParams, s: f64) -> f64 {
    let r = params.coupling_ratio();
    (1.0 + 4.0 * PI * PI * r.powi(4)) * (-2.0 * s).exp()
}
