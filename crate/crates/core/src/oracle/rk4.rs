//! Fixed-step RK4 on the exact moment equations
//! `dm/dt = A m + c(t)`, `dV/dt = A V + V A^T`, `dM/dt = A M`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{AffinePropagator, QuadConvention};

/// Largest allowed `|A|_∞ h`.
pub const MAX_NORM_STEP: f64 = 0.1;
pub const MIN_STEPS: usize = 100;

/// A linear time-dependent moment system `t -> (A(t), c(t))` integrated over `[0, t_final]`.
pub struct OdeSpec<G> {
    pub dim: usize,
    pub generator: G,
    pub t_final: f64,
    pub n_steps: usize,
}

impl<G> OdeSpec<G>
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    pub fn new(dim: usize, generator: G, t_final: f64, n_steps: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Usage(format!("ODE dimension must be even and positive, got {dim}")));
        }
        if n_steps < MIN_STEPS {
            return Err(Error::Usage(format!("n_steps must be at least {MIN_STEPS}, got {n_steps}")));
        }
        if !t_final.is_finite() || t_final < 0.0 {
            return Err(Error::Usage(format!("t_final must be finite and >= 0, got {t_final}")));
        }
        let (a, c) = generator(0.0);
        if a.nrows() != dim || a.ncols() != dim || c.len() != dim {
            return Err(Error::Usage(format!(
                "generator returned {}x{} / {} for dimension {dim}",
                a.nrows(),
                a.ncols(),
                c.len()
            )));
        }
        Ok(Self { dim, generator, t_final, n_steps })
    }

    /// Spec whose step does not exceed `h_max` (and never goes below [`MIN_STEPS`]).
    pub fn with_max_step(dim: usize, generator: G, t_final: f64, h_max: f64) -> Result<Self> {
        let n = ((t_final / h_max).ceil() as usize).max(MIN_STEPS);
        Self::new(dim, generator, t_final, n)
    }

    pub fn step(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    fn check_step(&self) -> Result<()> {
        let (a, _) = (self.generator)(0.0);
        let norm = inf_norm(&a);
        let h = self.step();
        if norm * h >= MAX_NORM_STEP {
            let required_steps = (norm * self.t_final / MAX_NORM_STEP).floor() as usize + 1;
            return Err(Error::StepSize { norm_h: norm * h, required_steps });
        }
        Ok(())
    }
}

fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn symmetrize(v: &mut DMatrix<f64>) {
    let t = v.transpose();
    *v += t;
    *v *= 0.5;
}

/// One RK4 step for the mean and covariance.
fn step_moments<G>(gen: &G, t: f64, h: f64, m: &DVector<f64>, v: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>)
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    let (a1, c1) = gen(t);
    let (a2, c2) = gen(t + 0.5 * h);
    let (a4, c4) = gen(t + h);
    let fm = |a: &DMatrix<f64>, c: &DVector<f64>, x: &DVector<f64>| a * x + c;
    let fv = |a: &DMatrix<f64>, x: &DMatrix<f64>| a * x + x * a.transpose();

    let km1 = fm(&a1, &c1, m);
    let km2 = fm(&a2, &c2, &(m + &km1 * (0.5 * h)));
    let km3 = fm(&a2, &c2, &(m + &km2 * (0.5 * h)));
    let km4 = fm(&a4, &c4, &(m + &km3 * h));
    let m_next = m + (km1 + km2 * 2.0 + km3 * 2.0 + km4) * (h / 6.0);

    let kv1 = fv(&a1, v);
    let kv2 = fv(&a2, &(v + &kv1 * (0.5 * h)));
    let kv3 = fv(&a2, &(v + &kv2 * (0.5 * h)));
    let kv4 = fv(&a4, &(v + &kv3 * h));
    let mut v_next = v + (kv1 + kv2 * 2.0 + kv3 * 2.0 + kv4) * (h / 6.0);
    symmetrize(&mut v_next);
    (m_next, v_next)
}

/// One RK4 step for the propagator pair `(M, d)`.
fn step_propagator<G>(gen: &G, t: f64, h: f64, mat: &DMatrix<f64>, disp: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>)
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    let (a1, c1) = gen(t);
    let (a2, c2) = gen(t + 0.5 * h);
    let (a4, c4) = gen(t + h);

    let k1 = &a1 * mat;
    let k2 = &a2 * (mat + &k1 * (0.5 * h));
    let k3 = &a2 * (mat + &k2 * (0.5 * h));
    let k4 = &a4 * (mat + &k3 * h);
    let mat_next = mat + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

    let d1 = &a1 * disp + &c1;
    let d2 = &a2 * (disp + &d1 * (0.5 * h)) + &c2;
    let d3 = &a2 * (disp + &d2 * (0.5 * h)) + &c2;
    let d4 = &a4 * (disp + &d3 * h) + &c4;
    let disp_next = disp + (d1 + d2 * 2.0 + d3 * 2.0 + d4) * (h / 6.0);
    (mat_next, disp_next)
}

/// Mean and covariance at `t_final`, starting from `(m0, v0)` at `t = 0`.
pub fn integrate_moments<G>(spec: &OdeSpec<G>, m0: &DVector<f64>, v0: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)>
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    if m0.len() != spec.dim || v0.nrows() != spec.dim || v0.ncols() != spec.dim {
        return Err(Error::Usage(format!("initial moments do not match dimension {}", spec.dim)));
    }
    spec.check_step()?;
    let h = spec.step();
    let mut m = m0.clone();
    let mut v = v0.clone();
    for k in 0..spec.n_steps {
        (m, v) = step_moments(&spec.generator, k as f64 * h, h, &m, &v);
    }
    Ok((m, v))
}

/// The affine propagator `(M(t_final), d(t_final))` obtained by integrating
/// `dM/dt = A M`, `dd/dt = A d + c` from the identity.
pub fn integrate_propagator<G>(spec: &OdeSpec<G>) -> Result<AffinePropagator>
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    spec.check_step()?;
    let h = spec.step();
    let mut mat = DMatrix::identity(spec.dim, spec.dim);
    let mut disp = DVector::zeros(spec.dim);
    for k in 0..spec.n_steps {
        (mat, disp) = step_propagator(&spec.generator, k as f64 * h, h, &mat, &disp);
    }
    Ok(AffinePropagator { mat, disp, time: spec.t_final })
}

/// Propagators at each of the ascending `times`, integrated in one pass with
/// steps no larger than `h_max`. Each interval between samples is split evenly.
pub fn propagator_trajectory<G>(dim: usize, generator: G, times: &[f64], h_max: f64) -> Result<Vec<AffinePropagator>>
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::Usage("sample times must be nonnegative and ascending".into()));
    }
    let (a, _) = generator(0.0);
    if inf_norm(&a) * h_max >= MAX_NORM_STEP {
        let required_steps = times.last().map_or(0, |t| (inf_norm(&a) * t / MAX_NORM_STEP) as usize + 1);
        return Err(Error::StepSize { norm_h: inf_norm(&a) * h_max, required_steps });
    }
    let mut mat = DMatrix::identity(dim, dim);
    let mut disp = DVector::zeros(dim);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let n = (span / h_max).ceil() as usize;
            let h = span / n as f64;
            for k in 0..n {
                (mat, disp) = step_propagator(&generator, t + k as f64 * h, h, &mat, &disp);
            }
        }
        t = target;
        out.push(AffinePropagator { mat: mat.clone(), disp: disp.clone(), time: target });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub n_steps: usize,
    /// Max componentwise moment difference between `n` and `2n` steps.
    pub max_diff: f64,
    /// Same between `2n` and `4n` steps.
    pub max_diff_refined: f64,
    /// `log2(max_diff / max_diff_refined)`; 4 for RK4 in the asymptotic regime.
    pub observed_order: f64,
    /// `max |M Σ M^T - Σ|` of the propagator integrated with `2n` steps.
    pub symplectic_drift: f64,
}

pub fn convergence_report<G>(spec: &OdeSpec<G>, m0: &DVector<f64>, v0: &DMatrix<f64>) -> Result<ConvergenceReport>
where
    G: Fn(f64) -> (DMatrix<f64>, DVector<f64>),
{
    let run = |n: usize| -> Result<(DVector<f64>, DMatrix<f64>)> {
        let s = OdeSpec { dim: spec.dim, generator: &spec.generator, t_final: spec.t_final, n_steps: n };
        integrate_moments(&s, m0, v0)
    };
    let diff = |a: &(DVector<f64>, DMatrix<f64>), b: &(DVector<f64>, DMatrix<f64>)| {
        (&a.0 - &b.0).amax().max((&a.1 - &b.1).amax())
    };
    let r1 = run(spec.n_steps)?;
    let r2 = run(2 * spec.n_steps)?;
    let r4 = run(4 * spec.n_steps)?;
    let max_diff = diff(&r1, &r2);
    let max_diff_refined = diff(&r2, &r4);
    let doubled = OdeSpec { dim: spec.dim, generator: &spec.generator, t_final: spec.t_final, n_steps: 2 * spec.n_steps };
    let prop = integrate_propagator(&doubled)?;
    let sigma = QuadConvention::symplectic_form(spec.dim / 2);
    let symplectic_drift = (&prop.mat * &sigma * prop.mat.transpose() - sigma).amax();
    Ok(ConvergenceReport {
        n_steps: spec.n_steps,
        max_diff,
        max_diff_refined,
        observed_order: (max_diff / max_diff_refined).log2(),
        symplectic_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(rate: f64) -> impl Fn(f64) -> (DMatrix<f64>, DVector<f64>) {
        move |_t| (DMatrix::from_row_slice(2, 2, &[0.0, rate, -rate, 0.0]), DVector::zeros(2))
    }

    #[test]
    fn zero_generator_leaves_moments() {
        let spec = OdeSpec::new(4, |_t| (DMatrix::zeros(4, 4), DVector::zeros(4)), 3.0, 100).unwrap();
        let m0 = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let v0 = DMatrix::identity(4, 4) * 0.25;
        let (m, v) = integrate_moments(&spec, &m0, &v0).unwrap();
        assert_eq!(m, m0);
        assert_eq!(v, v0);
    }

    #[test]
    fn rotation_period_returns_to_start() {
        let rate = 1.3;
        let period = 2.0 * std::f64::consts::PI / rate;
        let spec = OdeSpec::new(2, rotation(rate), period, 4000).unwrap();
        let m0 = DVector::from_vec(vec![0.7, -0.2]);
        let v0 = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.1, 0.3]);
        let (m, v) = integrate_moments(&spec, &m0, &v0).unwrap();
        assert!((m - m0).amax() < 1e-10);
        assert!((v - v0).amax() < 1e-10);
    }

    #[test]
    fn refuses_coarse_steps() {
        let spec = OdeSpec::new(2, rotation(10.0), 10.0, 100).unwrap();
        let err = integrate_moments(&spec, &DVector::zeros(2), &DMatrix::identity(2, 2)).unwrap_err();
        match err {
            Error::StepSize { required_steps, .. } => assert!(required_steps > 1000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(OdeSpec::new(3, rotation(1.0), 1.0, 100).is_err());
        assert!(OdeSpec::new(2, rotation(1.0), 1.0, 99).is_err());
        assert!(OdeSpec::new(4, rotation(1.0), 1.0, 100).is_err());
        assert!(propagator_trajectory(2, rotation(1.0), &[1.0, 0.5], 0.01).is_err());
    }

    #[test]
    fn constant_generator_matches_matrix_exponential() {
        // A damped-free Hamiltonian generator with a beam-splitter and squeezing part.
        let a = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.8, 0.3, 0.0,
            -0.8, 0.0, 0.0, 0.3,
            -0.3, 0.0, 0.0, 1.1,
            0.0, -0.3, -1.1, 0.0,
        ]);
        let t_final = 5.0;
        let gen = |_t: f64| (a.clone(), DVector::zeros(4));
        let spec = OdeSpec::with_max_step(4, gen, t_final, 1e-3).unwrap();
        let prop = integrate_propagator(&spec).unwrap();
        let reference = (&a * t_final).exp();
        assert!((&prop.mat - &reference).amax() < 1e-10);
        let m0 = DVector::from_vec(vec![0.2, 0.1, -0.4, 0.3]);
        let v0 = DMatrix::identity(4, 4) * 0.25;
        let (m, v) = integrate_moments(&spec, &m0, &v0).unwrap();
        assert!((m - &reference * m0).amax() < 1e-10);
        assert!((v - &reference * v0 * reference.transpose()).amax() < 1e-10);
    }

    #[test]
    fn convergence_order_is_four() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        let gen = |t: f64| (a.clone(), DVector::from_vec(vec![0.0, (3.0 * t).cos()]));
        let spec = OdeSpec::new(2, gen, 6.0, 200).unwrap();
        let m0 = DVector::from_vec(vec![1.0, 0.0]);
        let v0 = DMatrix::identity(2, 2) * 0.25;
        let rep = convergence_report(&spec, &m0, &v0).unwrap();
        assert!((3.8..=4.2).contains(&rep.observed_order), "{rep:?}");
        assert!(rep.max_diff / rep.max_diff_refined > 14.0);
        assert!(rep.symplectic_drift < 1e-8);
        let again = convergence_report(&spec, &m0, &v0).unwrap();
        assert_eq!(rep.max_diff.to_bits(), again.max_diff.to_bits());
    }

    #[test]
    fn trajectory_matches_single_runs() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let gen = |t: f64| (a.clone(), DVector::from_vec(vec![0.0, t.sin()]));
        let times = [0.0, 0.5, 2.0, 3.7];
        let traj = propagator_trajectory(2, gen, &times, 1e-3).unwrap();
        assert_eq!(traj[0].mat, DMatrix::identity(2, 2));
        for (t, p) in times.iter().zip(&traj).skip(1) {
            let spec = OdeSpec::with_max_step(2, gen, *t, 1e-3).unwrap();
            let single = integrate_propagator(&spec).unwrap();
            assert!((&single.mat - &p.mat).amax() < 1e-11);
            assert!((&single.disp - &p.disp).amax() < 1e-11);
        }
    }
}
