//! Cavityless three-mode scheme: Stokes sideband `a₁`, mirror `b`,
//! anti-Stokes sideband `a₂`.
//!
//! Interaction `-iħχ(a₁b - a₁†b†) - iħθ(a₂b† - a₂†b)` in the frame rotating at
//! the mirror frequency, plus the force drive `-ħΩf(b e^{-iΩt} + b† e^{iΩt})`.
//! Quadrature ordering is `(X₁, Y₁, X_b, Y_b, X₂, Y₂)`. Times are in units of
//! `1/χ` when the parameters come from [`CavitylessParams::from_ratios`] with
//! `chi = 1`; sweeps use the scaled time `Θt`.
//!
//! The X and Y sectors decouple. Both oscillate at `Θ = sqrt(θ² - χ²)`, so the
//! homogeneous propagator is trigonometric in `Θt`; the drive adds terms at `Ω`
//! with the common factor `Ω/(Ω² - Θ²)`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{self, AffinePropagator, GaussianState, LinearObservable};

pub const DIM: usize = 6;

const X1: usize = 0;
const Y1: usize = 1;
const XB: usize = 2;
const YB: usize = 3;
const X2: usize = 4;
const Y2: usize = 5;

/// Below this value of `Ω²/Θ²` the effective Hamiltonian is considered outside its regime.
pub const REGIME_RATIO_MIN: f64 = 10.0;
/// `|Θ - Ω|` below which the force response is treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavitylessParams {
    pub chi: f64,
    pub theta: f64,
    pub omega: f64,
    pub force: f64,
}

impl CavitylessParams {
    pub fn new(chi: f64, theta: f64, omega: f64, force: f64) -> Result<Self> {
        if !(chi > 0.0) || !chi.is_finite() {
            return Err(Error::Domain(format!("chi must be positive, got {chi}")));
        }
        if !(theta > chi) || !theta.is_finite() {
            return Err(Error::Domain(format!("theta must exceed chi (theta={theta}, chi={chi})")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !force.is_finite() {
            return Err(Error::Domain(format!("force must be finite, got {force}")));
        }
        Ok(Self { chi, theta, omega, force })
    }

    /// Parameters from `θ/χ`, `Ω/Θ` and the absolute scale `χ`.
    pub fn from_ratios(theta_over_chi: f64, omega_over_theta: f64, chi: f64, force: f64) -> Result<Self> {
        if !(theta_over_chi > 1.0) {
            return Err(Error::Domain(format!("theta must exceed chi (theta/chi = {theta_over_chi})")));
        }
        if !(omega_over_theta > 0.0) {
            return Err(Error::Domain(format!("omega/Theta must be positive, got {omega_over_theta}")));
        }
        let theta = theta_over_chi * chi;
        let theta_eff = (theta * theta - chi * chi).sqrt();
        Self::new(chi, theta, omega_over_theta * theta_eff, force)
    }

    /// Caption parameters of the reference figure: `θ/χ = 1.025`, `Ω/Θ = 10.3`, `χ = f = 1`.
    pub fn reference() -> Self {
        Self::from_ratios(1.025, 10.3, 1.0, 1.0).expect("reference parameters are valid")
    }

    /// `Θ = sqrt(θ² - χ²)`.
    pub fn theta_eff(&self) -> f64 {
        ((self.theta - self.chi) * (self.theta + self.chi)).sqrt()
    }

    /// `Ω²/Θ²`; the model assumes this is large.
    pub fn regime_ratio(&self) -> f64 {
        (self.omega / self.theta_eff()).powi(2)
    }

    pub fn in_regime(&self) -> bool {
        self.regime_ratio() >= REGIME_RATIO_MIN
    }

    /// Physical time for a scaled time `Θt`.
    pub fn time_from_scaled(&self, theta_t: f64) -> f64 {
        theta_t / self.theta_eff()
    }

    /// Same bundle with unit force.
    pub fn with_force(&self, force: f64) -> Self {
        Self { force, ..*self }
    }

    /// `Ω/(Ω² - Θ²)`, the common factor of the force response.
    fn response_factor(&self) -> Result<f64> {
        let th = self.theta_eff();
        if (th - self.omega).abs() < RESONANCE_TOL {
            return Err(Error::DegenerateResonance { theta_eff: th, omega: self.omega });
        }
        Ok(self.omega / ((self.omega - th) * (self.omega + th)))
    }
}

/// Generator `A` and drive `c(t)` of `dm/dt = A m + c(t)`.
pub fn generator(params: &CavitylessParams, t: f64) -> (DMatrix<f64>, DVector<f64>) {
    let CavitylessParams { chi, theta, omega, force } = *params;
    let mut a = DMatrix::zeros(DIM, DIM);
    a[(X1, XB)] = chi;
    a[(Y1, YB)] = -chi;
    a[(XB, X1)] = chi;
    a[(XB, X2)] = -theta;
    a[(YB, Y1)] = -chi;
    a[(YB, Y2)] = -theta;
    a[(X2, XB)] = theta;
    a[(Y2, YB)] = theta;
    let mut c = DVector::zeros(DIM);
    let (sin, cos) = (omega * t).sin_cos();
    c[XB] = -omega * force * sin;
    c[YB] = omega * force * cos;
    (a, c)
}

/// Closed-form propagator at physical time `t`.
///
/// The homogeneous part reproduces the mode-operator solutions
/// `a₁(t) = [(θ² - χ² cos Θt)/Θ²] a₁ + (χ/Θ) sin Θt b† - [χθ(1 - cos Θt)/Θ²] a₂†` and
/// their partners for `b` and `a₂`. The displacement is
///
/// ```text
/// <a₁> = χ K [ i(e^{-iΩt} - cos Θt) - (Ω/Θ) sin Θt ]
/// <b>  =   K [ Ω e^{iΩt} - Ω cos Θt - iΘ sin Θt ]
/// <a₂> = θ K [ -i(e^{iΩt} - cos Θt) - (Ω/Θ) sin Θt ]
/// ```
///
/// with `K = Ω f/(Ω² - Θ²)`.
pub fn closed_propagator(params: &CavitylessParams, t: f64) -> Result<AffinePropagator> {
    let k = params.response_factor()? * params.force;
    let CavitylessParams { chi, theta, omega, .. } = *params;
    let th = params.theta_eff();
    let th2 = th * th;
    let (s, c) = (th * t).sin_cos();
    let w = 1.0 - c;

    let mut m = DMatrix::zeros(DIM, DIM);
    // X sector
    m[(X1, X1)] = 1.0 + chi * chi * w / th2;
    m[(X1, XB)] = chi * s / th;
    m[(X1, X2)] = -chi * theta * w / th2;
    m[(XB, X1)] = chi * s / th;
    m[(XB, XB)] = c;
    m[(XB, X2)] = -theta * s / th;
    m[(X2, X1)] = theta * chi * w / th2;
    m[(X2, XB)] = theta * s / th;
    m[(X2, X2)] = 1.0 - theta * theta * w / th2;
    // Y sector
    m[(Y1, Y1)] = 1.0 + chi * chi * w / th2;
    m[(Y1, YB)] = -chi * s / th;
    m[(Y1, Y2)] = chi * theta * w / th2;
    m[(YB, Y1)] = -chi * s / th;
    m[(YB, YB)] = c;
    m[(YB, Y2)] = -theta * s / th;
    m[(Y2, Y1)] = -theta * chi * w / th2;
    m[(Y2, YB)] = theta * s / th;
    m[(Y2, Y2)] = 1.0 - theta * theta * w / th2;

    let (sw, cw) = (omega * t).sin_cos();
    let mut d = DVector::zeros(DIM);
    d[X1] = chi * k * (sw - omega / th * s);
    d[Y1] = chi * k * (cw - c);
    d[XB] = k * omega * (cw - c);
    d[YB] = k * (omega * sw - th * s);
    d[X2] = theta * k * (sw - omega / th * s);
    d[Y2] = theta * k * (c - cw);
    Ok(AffinePropagator { mat: m, disp: d, time: t })
}

/// Heterodyne imaginary channel `Z_I = Y₁ + Y₂`.
pub fn z_i_observable() -> LinearObservable {
    let mut c = DVector::zeros(DIM);
    c[Y1] = 1.0;
    c[Y2] = 1.0;
    LinearObservable::new(c).expect("nonzero")
}

/// Heterodyne real channel `Z_R = -(X₁ - X₂)`. Not used for force estimation.
pub fn z_r_observable() -> LinearObservable {
    let mut c = DVector::zeros(DIM);
    c[X1] = -1.0;
    c[X2] = 1.0;
    LinearObservable::new(c).expect("nonzero")
}

/// Signal per unit force, `S(t) = (θ - χ)[cos Θt - cos Ωt] Ω/(Ω² - Θ²)`.
pub fn signal_response(params: &CavitylessParams, t: f64) -> Result<f64> {
    let k = params.response_factor()?;
    let th = params.theta_eff();
    Ok((params.theta - params.chi) * ((th * t).cos() - (params.omega * t).cos()) * k)
}

/// Mean of `Z_I` at time `t`: `S(t)·f`.
pub fn signal(params: &CavitylessParams, t: f64) -> Result<f64> {
    Ok(signal_response(params, t)? * params.force)
}

/// Meter state on `(a₁, a₂)`.
///
/// At the disentangling time `Θt = π` the readout reduces to
/// `(θ-χ)/(θ+χ)·(Y₁ - Y₂)`, so the meter is the two-mode squeezed vacuum
/// that squeezes `Y₁ - Y₂` (and `X₁ + X₂`) for `s > 0`: parameter `-s` in the
/// `tanhⁿs |n,n>` family.
pub fn meter_state(s: f64) -> Result<GaussianState> {
    gaussian::two_mode_squeezed(-s)
}

/// Initial state on `(a₁, b, a₂)`: meter from [`meter_state`], mirror thermal.
pub fn initial_state(s: f64, n_th: f64) -> Result<GaussianState> {
    let meter = meter_state(s)?;
    let mirror = gaussian::thermal_state(n_th)?;
    // tensor gives (a₁, a₂, b); move b to the middle.
    let joint = gaussian::tensor(&[meter, mirror])?;
    let perm = [0usize, 1, 4, 5, 2, 3];
    let mean = DVector::from_fn(DIM, |i, _| joint.mean()[perm[i]]);
    let cov = DMatrix::from_fn(DIM, DIM, |i, j| joint.cov()[(perm[i], perm[j])]);
    GaussianState::new(mean, cov)
}

/// `Var(Z_I)(t)` for the initial state of [`initial_state`].
///
/// Evaluated as `uᵀ V u` with `u` the Heisenberg coefficients of `Z_I`, summed
/// over the normal modes of `V` (`X₁ ± X₂`, `Y₁ ± Y₂`, mirror). Every term is
/// nonnegative, so the squeezed variance keeps full relative precision even
/// when the anti-squeezed one is `e^{4s}` larger.
pub fn noise(params: &CavitylessParams, t: f64, s: f64, n_th: f64) -> Result<f64> {
    gaussian::thermal_state(n_th)?;
    if !s.is_finite() {
        return Err(Error::Domain(format!("squeezing must be finite, got {s}")));
    }
    let (u, _) = z_i_observable().heisenberg(&closed_propagator(params, t)?)?;
    Ok(readout_variance(&u, s, n_th))
}

fn readout_variance(u: &DVector<f64>, s: f64, n_th: f64) -> f64 {
    let squeezed = (-2.0 * s).exp() / 4.0;
    let anti = (2.0 * s).exp() / 4.0;
    let x_plus = u[X1] + u[X2];
    let x_minus = u[X1] - u[X2];
    let y_plus = u[Y1] + u[Y2];
    let y_minus = u[Y1] - u[Y2];
    squeezed * (x_plus * x_plus + y_minus * y_minus) / 2.0
        + anti * (x_minus * x_minus + y_plus * y_plus) / 2.0
        + (2.0 * n_th + 1.0) / 4.0 * (u[XB] * u[XB] + u[YB] * u[YB])
}

/// Literal transcription of the published closed-form noise of `Z_I`.
///
/// Agrees with [`noise`] exactly; its `sinh(2s)` sign corresponds to the
/// meter of [`meter_state`], not to the `tanhⁿs` state taken at face value.
pub fn noise_literal(params: &CavitylessParams, t: f64, s: f64, n_th: f64) -> f64 {
    let CavitylessParams { chi, theta, .. } = *params;
    let th = params.theta_eff();
    let th4 = th.powi(4);
    let c = (th * t).cos();
    let sum2 = theta * theta + chi * chi;
    let first = -1.0 / (4.0 * th4)
        * (2.0 * theta * chi * sum2 * (1.0 - c).powi(2) + 8.0 * theta * theta * chi * chi * c
            - sum2 * sum2 * (1.0 + c * c))
        * (1.0 + 2.0 * s.sinh().powi(2));
    let second = -1.0 / (2.0 * th4)
        * (-sum2 * sum2 * c + 2.0 * theta * theta * chi * chi * (1.0 + c * c)
            - theta * chi * sum2 * (1.0 - c).powi(2))
        * (2.0 * s).sinh();
    let thermal = (theta - chi).powi(2) / (4.0 * th * th) * (th * t).sin().powi(2) * (1.0 + 2.0 * n_th);
    first + second + thermal
}

/// `|S| f/sqrt(N)`.
pub fn snr(params: &CavitylessParams, t: f64, s: f64, n_th: f64) -> Result<f64> {
    Ok(signal_response(params, t)?.abs() * params.force.abs() / noise(params, t, s, n_th)?.sqrt())
}

/// Minimum detectable force `sqrt(N)/|S|`; `+inf` where the signal vanishes.
pub fn f_min(params: &CavitylessParams, t: f64, s: f64, n_th: f64) -> Result<f64> {
    let sig = signal_response(params, t)?;
    let n = noise(params, t, s, n_th)?;
    Ok(f_min_from(sig, n))
}

pub(crate) fn f_min_from(signal_per_f: f64, noise: f64) -> f64 {
    if signal_per_f == 0.0 {
        f64::INFINITY
    } else {
        noise.sqrt() / signal_per_f.abs()
    }
}

/// Minimum detectable force at the disentangling time `Θt = π`, where the
/// thermal contribution drops out.
pub fn f_min_at_pi(params: &CavitylessParams, s: f64) -> Result<f64> {
    f_min(params, PI / params.theta_eff(), s, 0.0)
}

/// Closed form of [`f_min_at_pi`]:
/// `(Ω² - Θ²) e^{-s} / (√2 (θ+χ) Ω |1 + cos(πΩ/Θ)|)`.
pub fn f_min_at_pi_closed(params: &CavitylessParams, s: f64) -> Result<f64> {
    params.response_factor()?;
    let th = params.theta_eff();
    let om = params.omega;
    let den = 2f64.sqrt() * (params.theta + params.chi) * om * (1.0 + (PI * om / th).cos()).abs();
    Ok(if den == 0.0 { f64::INFINITY } else { (om * om - th * th) * (-s).exp() / den })
}

/// The published form, with `1 - cos(πΩ/Θ)` in the denominator.
pub fn f_min_at_pi_literal(params: &CavitylessParams, s: f64) -> f64 {
    let th = params.theta_eff();
    let om = params.omega;
    (om * om - th * th) / (params.theta + params.chi) * (-s).exp()
        / (2f64.sqrt() * om * (1.0 - (PI * om / th).cos()))
}

/// Warning text when the signal at `Θt = π` (nearly) vanishes, i.e. when
/// `Ω/Θ` is close to an odd integer. Also flags integer `Ω/(2Θ)`, where the
/// published `1 - cos` form vanishes.
pub fn pi_signal_warning(params: &CavitylessParams) -> Option<String> {
    let r = params.omega / params.theta_eff();
    let near_int = |x: f64| (x - x.round()).abs() < 1e-6;
    if near_int((r - 1.0) / 2.0) {
        Some(format!("signal vanishes at Theta t = pi: Omega/Theta = {r} is an odd integer"))
    } else if near_int(r / 2.0) {
        Some(format!(
            "Omega/(2 Theta) = {} is an integer; the published pi-time expression is singular here \
             (the propagated signal is not)",
            r / 2.0
        ))
    } else {
        None
    }
}

/// Published displacement terms of the mode operators `(a₁, b, a₂)`, kept for
/// the validation ledger. The `a₁` term contains `Ω sinh(Θt)`.
pub fn literal_drive_terms(params: &CavitylessParams, t: f64) -> [Complex<f64>; 3] {
    let CavitylessParams { chi, theta, omega, force } = *params;
    let th = params.theta_eff();
    let k = omega / (omega * omega - th * th) * force;
    let i = Complex::new(0.0, 1.0);
    let e_minus = Complex::from_polar(1.0, -omega * t);
    let e_plus = Complex::from_polar(1.0, omega * t);
    let c = (th * t).cos();
    let s = (th * t).sin();
    let a1 = -(omega * (th * t).sinh() - i * (e_minus - c)) * k * chi;
    let b = -(omega * c + i * th * s + omega * e_plus) * k;
    let a2 = -(omega * s + i * (e_plus - c)) * k * theta;
    [a1, b, a2]
}

/// Displacements `(<a₁>, <b>, <a₂>)` from a propagator.
pub fn mode_displacements(prop: &AffinePropagator) -> [Complex<f64>; 3] {
    let d = &prop.disp;
    [
        Complex::new(d[X1], d[Y1]),
        Complex::new(d[XB], d[YB]),
        Complex::new(d[X2], d[Y2]),
    ]
}
