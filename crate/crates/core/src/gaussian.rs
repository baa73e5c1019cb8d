//! Gaussian states of bosonic modes, described by first and second moments.
//!
//! Quadrature convention used throughout the crate: for mode `j`,
//! `X_j = (a_j + a_j†)/2` and `Y_j = -i(a_j - a_j†)/2`, ordered
//! `(X_1, Y_1, X_2, Y_2, ...)`. Then `[X_j, Y_k] = i δ_jk / 2` and the vacuum
//! variance of every quadrature is `1/4`. Covariances are symmetrized,
//! `V_kl = <{R_k, R_l}>/2 - <R_k><R_l>`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance on `|V - V^T|` for a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lower bound on the eigenvalues of `V + iΣ`.
pub const UNCERTAINTY_TOL: f64 = 1e-10;

/// The fixed quadrature convention.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadConvention;

impl QuadConvention {
    pub const VACUUM_VARIANCE: f64 = 0.25;

    /// Symplectic form `Σ_kl = -i <[R_k, R_l]>`: 2×2 blocks `[[0, 1/2], [-1/2, 0]]`.
    pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
        let mut sigma = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for j in 0..n_modes {
            sigma[(2 * j, 2 * j + 1)] = 0.5;
            sigma[(2 * j + 1, 2 * j)] = -0.5;
        }
        sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from raw moments, checking dimensions and symmetry.
    ///
    /// The uncertainty relation is not enforced here; see
    /// [`GaussianState::min_uncertainty_eigenvalue`].
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Usage(format!(
                "mean vector length must be a positive even number, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Usage(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::Domain(format!(
                "covariance is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(Self { n_modes: dim / 2, mean, cov })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + iΣ/2`, where `iΣ` is
    /// the commutator matrix `[R_k, R_l]`. The state is physical iff this is
    /// nonnegative.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let sigma = QuadConvention::symplectic_form(self.n_modes);
        let dim = self.dim();
        let herm = DMatrix::from_fn(dim, dim, |r, c| Complex::new(self.cov[(r, c)], 0.5 * sigma[(r, c)]));
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn satisfies_uncertainty(&self) -> bool {
        self.min_uncertainty_eigenvalue() >= -UNCERTAINTY_TOL
    }

    /// Symplectic eigenvalues in ascending order. Vacuum gives `1/4` for each mode.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_eigenvalues(&self.cov)
    }
}

/// Symplectic spectrum of a positive definite covariance in the 1/4 convention.
///
/// Computed as the positive eigenvalues of the Hermitian matrix `2i V^{1/2} Σ V^{1/2}`.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let dim = cov.nrows();
    let sigma = QuadConvention::symplectic_form(dim / 2);
    let eig = cov.clone().symmetric_eigen();
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let antisym = &root * sigma * &root * 2.0;
    let herm = antisym.map(|v| Complex::new(0.0, v));
    let mut vals: Vec<f64> = herm
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|v| *v > 0.0)
        .collect();
    vals.sort_by(f64::total_cmp);
    // Pairs (+ν, -ν) are exact; guard against a zero mode being filtered out.
    vals.resize(dim / 2, 0.0);
    vals
}

/// Linear map on quadrature space: `r -> M r + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePropagator {
    pub mat: DMatrix<f64>,
    pub disp: DVector<f64>,
    /// Evolution time in the units the producing model uses.
    pub time: f64,
}

impl AffinePropagator {
    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim), disp: DVector::zeros(dim), time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.disp.len()
    }

    /// `max |M Σ M^T - Σ|`.
    pub fn symplectic_deviation(&self) -> f64 {
        let sigma = QuadConvention::symplectic_form(self.dim() / 2);
        (&self.mat * &sigma * self.mat.transpose() - sigma).amax()
    }
}

/// A measured real combination `c · R` of quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearObservable {
    coeffs: DVector<f64>,
}

impl LinearObservable {
    pub fn new(coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::Usage("observable coefficient vector is zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// The observable in the Heisenberg picture at the propagator's time:
    /// coefficients `M^T c` on the initial quadratures plus the constant `c · d`.
    pub fn heisenberg(&self, prop: &AffinePropagator) -> Result<(DVector<f64>, f64)> {
        check_dim(self.coeffs.len(), prop.dim())?;
        Ok((prop.mat.transpose() * &self.coeffs, self.coeffs.dot(&prop.disp)))
    }
}

fn check_dim(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Usage(format!("dimension mismatch: {got} vs {expected}")));
    }
    Ok(())
}

pub fn vacuum_state(n_modes: usize) -> Result<GaussianState> {
    if n_modes == 0 {
        return Err(Error::Usage("n_modes must be at least 1".into()));
    }
    let dim = 2 * n_modes;
    Ok(GaussianState {
        n_modes,
        mean: DVector::zeros(dim),
        cov: DMatrix::identity(dim, dim) * QuadConvention::VACUUM_VARIANCE,
    })
}

/// Single-mode thermal state with mean occupation `n_bar`.
pub fn thermal_state(n_bar: f64) -> Result<GaussianState> {
    if !n_bar.is_finite() || n_bar < 0.0 {
        return Err(Error::Domain(format!("thermal occupation must be >= 0, got {n_bar}")));
    }
    let var = (2.0 * n_bar + 1.0) / 4.0;
    Ok(GaussianState {
        n_modes: 1,
        mean: DVector::zeros(2),
        cov: DMatrix::identity(2, 2) * var,
    })
}

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Bose-Einstein occupation `1/(exp(ħω/k_B T) - 1)` for angular frequency
/// `omega` (rad/s) at temperature `temp` (K).
pub fn nbar_from_temperature(omega: f64, temp: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    if !(temp > 0.0) || !temp.is_finite() {
        return Err(Error::Domain(format!("temperature must be > 0, got {temp}")));
    }
    Ok(1.0 / (HBAR * omega / (K_B * temp)).exp_m1())
}

/// Two-mode squeezed vacuum `sqrt(1 - tanh²s) Σ tanhⁿs |n>|n>`.
///
/// For `s > 0` this has `<a₁a₂> = sinh s cosh s`, so `X₁ - X₂` and `Y₁ + Y₂`
/// are the squeezed combinations (variance `e^{-2s}/2` each).
pub fn two_mode_squeezed(s: f64) -> Result<GaussianState> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("squeezing must be finite, got {s}")));
    }
    let ch = (2.0 * s).cosh() / 4.0;
    let sh = (2.0 * s).sinh() / 4.0;
    let mut cov = DMatrix::zeros(4, 4);
    cov[(0, 0)] = ch;
    cov[(1, 1)] = ch;
    cov[(2, 2)] = ch;
    cov[(3, 3)] = ch;
    cov[(0, 2)] = sh;
    cov[(2, 0)] = sh;
    cov[(1, 3)] = -sh;
    cov[(3, 1)] = -sh;
    Ok(GaussianState { n_modes: 2, mean: DVector::zeros(4), cov })
}

/// Squeezed vacuum `exp[ζ* a² - ζ a†²]|0>` with `ζ = (s/2) e^{2iφ}`.
///
/// `Var X = (e^{-2s} cos²φ + e^{2s} sin²φ)/4`,
/// `Var Y = (e^{-2s} sin²φ + e^{2s} cos²φ)/4`,
/// `Cov(X, Y) = -sinh(2s) sin(2φ)/4`; the squeezed axis is `(cos φ, sin φ)`.
pub fn single_mode_squeezed(s: f64, phi: f64) -> Result<GaussianState> {
    if !s.is_finite() || !phi.is_finite() {
        return Err(Error::Domain(format!("squeezing parameters must be finite, got s={s}, phi={phi}")));
    }
    let (sin, cos) = phi.sin_cos();
    let minus = (-2.0 * s).exp();
    let plus = (2.0 * s).exp();
    let mut cov = DMatrix::zeros(2, 2);
    cov[(0, 0)] = (minus * cos * cos + plus * sin * sin) / 4.0;
    cov[(1, 1)] = (minus * sin * sin + plus * cos * cos) / 4.0;
    let off = -(2.0 * s).sinh() * (2.0 * phi).sin() / 4.0;
    cov[(0, 1)] = off;
    cov[(1, 0)] = off;
    Ok(GaussianState { n_modes: 1, mean: DVector::zeros(2), cov })
}

/// Direct sum of states, preserving mode order.
pub fn tensor(states: &[GaussianState]) -> Result<GaussianState> {
    if states.is_empty() {
        return Err(Error::Usage("tensor product of an empty list".into()));
    }
    let dim: usize = states.iter().map(GaussianState::dim).sum();
    let mut mean = DVector::zeros(dim);
    let mut cov = DMatrix::zeros(dim, dim);
    let mut offset = 0;
    for st in states {
        let d = st.dim();
        mean.rows_mut(offset, d).copy_from(&st.mean);
        cov.view_mut((offset, offset), (d, d)).copy_from(&st.cov);
        offset += d;
    }
    Ok(GaussianState { n_modes: dim / 2, mean, cov })
}

pub fn expectation(obs: &LinearObservable, state: &GaussianState) -> Result<f64> {
    check_dim(obs.coeffs.len(), state.dim())?;
    Ok(obs.coeffs.dot(&state.mean))
}

pub fn variance(obs: &LinearObservable, state: &GaussianState) -> Result<f64> {
    check_dim(obs.coeffs.len(), state.dim())?;
    let v = (&state.cov * &obs.coeffs).dot(&obs.coeffs);
    Ok(v.max(0.0))
}

/// Schrödinger-picture action of the propagator on the moments.
pub fn apply(prop: &AffinePropagator, state: &GaussianState) -> Result<GaussianState> {
    check_dim(prop.dim(), state.dim())?;
    let mean = &prop.mat * &state.mean + &prop.disp;
    let mut cov = &prop.mat * &state.cov * prop.mat.transpose();
    // Restore exact symmetry lost to rounding.
    cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianState { n_modes: state.n_modes, mean, cov })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(c: &[f64]) -> LinearObservable {
        LinearObservable::new(DVector::from_column_slice(c)).unwrap()
    }

    #[test]
    fn vacuum_moments() {
        let v1 = vacuum_state(1).unwrap();
        assert_eq!(v1.mean().as_slice(), &[0.0, 0.0]);
        assert_eq!(v1.cov(), &DMatrix::from_diagonal_element(2, 2, 0.25));
        let v3 = vacuum_state(3).unwrap();
        assert_eq!(v3.dim(), 6);
        assert_eq!(v3.cov(), &(DMatrix::identity(6, 6) * 0.25));
        assert_close!(v3.min_uncertainty_eigenvalue(), 0.0, 1e-12);
        for nu in v3.symplectic_eigenvalues() {
            assert_close!(nu, 0.25, 1e-12);
        }
        assert!(vacuum_state(0).is_err());
    }

    #[test]
    fn thermal_moments() {
        assert_eq!(thermal_state(0.0).unwrap(), vacuum_state(1).unwrap());
        let th = thermal_state(300.0).unwrap();
        assert_eq!(th.cov()[(0, 0)], 601.0 / 4.0);
        assert_eq!(th.cov()[(1, 1)], 601.0 / 4.0);
        assert_eq!(thermal_state(0.5).unwrap().cov()[(0, 0)], 0.5);
        assert!(matches!(thermal_state(-1.0), Err(Error::Domain(_))));
        assert!(matches!(thermal_state(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn bose_einstein_occupation() {
        // Choose omega so that ħω/k_BT is a given value at T = 1 K.
        let omega_for = |x: f64| x * K_B / HBAR;
        assert_close!(nbar_from_temperature(omega_for(1.0), 1.0).unwrap(), 1.0 / (1f64.exp() - 1.0), 1e-12);
        assert_close!(nbar_from_temperature(omega_for(2f64.ln()), 1.0).unwrap(), 1.0, 1e-12);
        assert_eq!(nbar_from_temperature(omega_for(1e4), 1.0).unwrap(), 0.0);
        assert!(nbar_from_temperature(1.0, 0.0).is_err());
        assert!(nbar_from_temperature(0.0, 1.0).is_err());
        assert!(nbar_from_temperature(-1.0, 1.0).is_err());
    }

    #[test]
    fn two_mode_squeezed_variances() {
        assert_eq!(two_mode_squeezed(0.0).unwrap(), vacuum_state(2).unwrap());
        let st = two_mode_squeezed(0.5).unwrap();
        let y_plus = obs(&[0.0, 1.0, 0.0, 1.0]);
        let y_minus = obs(&[0.0, 1.0, 0.0, -1.0]);
        let x_minus = obs(&[1.0, 0.0, -1.0, 0.0]);
        assert_close!(variance(&y_plus, &st).unwrap(), (-1.0f64).exp() / 2.0, 1e-15);
        assert_close!(variance(&x_minus, &st).unwrap(), (-1.0f64).exp() / 2.0, 1e-15);
        assert_close!(variance(&y_minus, &st).unwrap(), 1f64.exp() / 2.0, 1e-15);
        let st5 = two_mode_squeezed(5.0).unwrap();
        let v = variance(&y_plus, &st5).unwrap();
        assert!(((v - (-10f64).exp() / 2.0) / v).abs() < 1e-6, "{v}");
        assert!(st5.satisfies_uncertainty());
    }

    #[test]
    fn single_mode_squeezed_moments() {
        for phi in [0.0, 0.3, 2.0] {
            assert_eq!(single_mode_squeezed(0.0, phi).unwrap().cov(), &(DMatrix::identity(2, 2) * 0.25));
        }
        let st = single_mode_squeezed(1.0, 0.0).unwrap();
        assert_close!(st.cov()[(0, 0)], (-2f64).exp() / 4.0, 1e-15);
        assert_close!(st.cov()[(1, 1)], 2f64.exp() / 4.0, 1e-15);
        assert_eq!(st.cov()[(0, 1)], 0.0);
        let st = single_mode_squeezed(1.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert_close!(st.cov()[(0, 1)], -(2f64).sinh() / 4.0, 1e-15);
        for nu in st.symplectic_eigenvalues() {
            assert_close!(nu, 0.25, 1e-12);
        }
    }

    #[test]
    fn tensor_assembles_blocks() {
        let pair = tensor(&[vacuum_state(1).unwrap(), vacuum_state(1).unwrap()]).unwrap();
        assert_eq!(pair, vacuum_state(2).unwrap());
        let three = tensor(&[thermal_state(300.0).unwrap(), two_mode_squeezed(5.0).unwrap()]).unwrap();
        assert_eq!(three.n_modes(), 3);
        assert_eq!(three.cov()[(0, 0)], 601.0 / 4.0);
        assert_eq!(three.cov()[(0, 2)], 0.0);
        assert_eq!(three.cov()[(2, 4)], (10f64).sinh() / 4.0);
        assert!(three.satisfies_uncertainty());
        assert!(matches!(tensor(&[]), Err(Error::Usage(_))));
    }

    #[test]
    fn observable_statistics() {
        let y_plus = obs(&[0.0, 1.0, 0.0, 1.0]);
        let vac = vacuum_state(2).unwrap();
        assert_eq!(expectation(&y_plus, &vac).unwrap(), 0.0);
        assert_eq!(variance(&y_plus, &vac).unwrap(), 0.5);
        let x = obs(&[1.0, 0.0]);
        assert_eq!(variance(&x, &thermal_state(2.0).unwrap()).unwrap(), 1.25);
        assert!(matches!(variance(&x, &vac), Err(Error::Usage(_))));
        assert!(LinearObservable::new(DVector::zeros(2)).is_err());
    }

    #[test]
    fn apply_identity_and_mismatch() {
        let st = two_mode_squeezed(0.7).unwrap();
        assert_eq!(apply(&AffinePropagator::identity(4), &st).unwrap(), st);
        assert!(apply(&AffinePropagator::identity(2), &st).is_err());
    }

    #[test]
    fn symplectic_rotation_keeps_purity() {
        // Phase rotation by 0.4 on mode 1, 50:50 beam splitter between modes.
        let (s, c) = 0.4f64.sin_cos();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::<f64>::zeros(4, 4);
        m[(0, 0)] = c * h;
        m[(0, 1)] = -s * h;
        m[(1, 0)] = s * h;
        m[(1, 1)] = c * h;
        m[(0, 2)] = h;
        m[(1, 3)] = h;
        m[(2, 0)] = -c * h;
        m[(2, 1)] = s * h;
        m[(3, 0)] = -s * h;
        m[(3, 1)] = -c * h;
        m[(2, 2)] = h;
        m[(3, 3)] = h;
        let prop = AffinePropagator { mat: m, disp: DVector::from_element(4, 0.3), time: 1.0 };
        assert!(prop.symplectic_deviation() < 1e-15);
        let out = apply(&prop, &vacuum_state(2).unwrap()).unwrap();
        assert_close!(out.min_uncertainty_eigenvalue(), 0.0, 1e-12);
        for nu in out.symplectic_eigenvalues() {
            assert_close!(nu, 0.25, 1e-12);
        }
    }

    #[test]
    fn rejects_malformed_state() {
        assert!(GaussianState::new(DVector::zeros(3), DMatrix::zeros(3, 3)).is_err());
        let mut cov = DMatrix::identity(2, 2);
        cov[(0, 1)] = 1e-6;
        assert!(GaussianState::new(DVector::zeros(2), cov).is_err());
        // Constructible but unphysical.
        let bad = GaussianState::new(DVector::zeros(2), DMatrix::identity(2, 2) * 0.1).unwrap();
        assert!(!bad.satisfies_uncertainty());
    }
}
