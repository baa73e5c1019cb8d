//! Quadrature moments computed directly in a truncated Fock basis.
//!
//! States are weighted ensembles of pure states on a product basis. Moments
//! are evaluated as `<R_k ψ | R_l ψ>` with the ladder operators applied
//! explicitly, so nothing here shares code with the closed-form covariances
//! in [`crate::gaussian`].

use nalgebra::{Complex, DMatrix, DVector};

type C64 = Complex<f64>;

use crate::error::{Error, Result};

/// Upper bound on the neglected weight `Σ_{n ≥ cutoff} (2n̂+2) P_n`, which
/// bounds the error of every first and second quadrature moment.
pub const TAIL_BOUND: f64 = 1e-12;
/// Largest validated squeezing `|s|`.
pub const MAX_SQUEEZING: f64 = 1.5;
/// Largest validated thermal occupation.
pub const MAX_NBAR: f64 = 5.0;
const MAX_CUTOFF: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockFamily {
    Vacuum,
    /// Thermal weights `n̄ⁿ/(1+n̄)^{n+1}`.
    Thermal { n_bar: f64 },
    /// `sqrt(1 - tanh²s) Σ tanhⁿs |n>|n>`.
    TwoModeSqueezed { s: f64 },
    /// `exp[ζ* a² - ζ a†²]|0>` with `ζ = (s/2) e^{2iφ}`.
    SingleModeSqueezed { s: f64, phi: f64 },
}

impl FockFamily {
    pub fn n_modes(&self) -> usize {
        match self {
            FockFamily::TwoModeSqueezed { .. } => 2,
            _ => 1,
        }
    }

    /// Closed-form bound on the neglected moment weight when the retained
    /// ladder index runs over `0..n` (photon number `n` per mode, or pairs
    /// `2n` for single-mode squeezing).
    fn tail_weight(&self, n: usize) -> f64 {
        // Σ_{k≥n} q^k and Σ_{k≥n} k q^k.
        let sums = |q: f64| {
            if q == 0.0 {
                return (if n == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let qn = q.powi(n as i32);
            let nf = n as f64;
            (qn / (1.0 - q), qn * (nf * (1.0 - q) + q) / (1.0 - q).powi(2))
        };
        match *self {
            FockFamily::Vacuum => {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            FockFamily::Thermal { n_bar } => {
                let q = n_bar / (1.0 + n_bar);
                let (s0, s1) = sums(q);
                (1.0 - q) * (2.0 * s1 + 2.0 * s0)
            }
            FockFamily::TwoModeSqueezed { s } => {
                let q = s.tanh().powi(2);
                let (s0, s1) = sums(q);
                (1.0 - q) * (2.0 * s1 + 2.0 * s0)
            }
            FockFamily::SingleModeSqueezed { s, .. } => {
                // P_k <= tanh^{2k}/cosh s on photon number 2k.
                let q = s.tanh().powi(2);
                let (s0, s1) = sums(q);
                (4.0 * s1 + 2.0 * s0) / s.cosh()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FockFamily::Thermal { n_bar } if !(0.0..=MAX_NBAR).contains(&n_bar) => Err(Error::FockTruncation(format!(
                "thermal occupation {n_bar} outside the validated range [0, {MAX_NBAR}]"
            ))),
            FockFamily::TwoModeSqueezed { s } | FockFamily::SingleModeSqueezed { s, .. }
                if !(s.abs() <= MAX_SQUEEZING) =>
            {
                Err(Error::FockTruncation(format!(
                    "squeezing |s| = {} exceeds the validated maximum {MAX_SQUEEZING}",
                    s.abs()
                )))
            }
            FockFamily::SingleModeSqueezed { phi, .. } if !phi.is_finite() => {
                Err(Error::FockTruncation("squeezing angle must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpec {
    pub family: FockFamily,
    /// Number of retained ladder indices (photon numbers, or photon pairs
    /// for single-mode squeezing).
    pub cutoff: usize,
}

impl FockSpec {
    /// Smallest cutoff meeting [`TAIL_BOUND`].
    pub fn auto(family: FockFamily) -> Result<Self> {
        family.validate()?;
        let cutoff = (1..=MAX_CUTOFF)
            .find(|&n| family.tail_weight(n) < TAIL_BOUND)
            .ok_or_else(|| Error::FockTruncation(format!("no cutoff up to {MAX_CUTOFF} meets the tail bound")))?;
        Ok(Self { family, cutoff })
    }

    pub fn with_cutoff(family: FockFamily, cutoff: usize) -> Result<Self> {
        family.validate()?;
        let tail = family.tail_weight(cutoff);
        if tail >= TAIL_BOUND {
            return Err(Error::FockTruncation(format!(
                "cutoff {cutoff} leaves tail weight {tail:e} >= {TAIL_BOUND:e}"
            )));
        }
        Ok(Self { family, cutoff })
    }

    pub fn tail_weight(&self) -> f64 {
        self.family.tail_weight(self.cutoff)
    }
}

/// Weighted pure states on a product of truncated single-mode spaces.
///
/// Each mode keeps one spare level above the populated ones so that a single
/// creation operator never falls off the basis.
#[derive(Debug, Clone)]
pub struct FockEnsemble {
    levels: Vec<usize>,
    members: Vec<(f64, DVector<C64>)>,
}

impl FockEnsemble {
    pub fn from_spec(spec: &FockSpec) -> Self {
        let n = spec.cutoff;
        match spec.family {
            FockFamily::Vacuum => {
                let mut v = DVector::zeros(2);
                v[0] = C64::new(1.0, 0.0);
                Self { levels: vec![2], members: vec![(1.0, v)] }
            }
            FockFamily::Thermal { n_bar } => {
                let levels = n + 1;
                let q = n_bar / (1.0 + n_bar);
                let members = (0..n)
                    .map(|k| {
                        let mut v = DVector::zeros(levels);
                        v[k] = C64::new(1.0, 0.0);
                        ((1.0 - q) * q.powi(k as i32), v)
                    })
                    .collect();
                Self { levels: vec![levels], members }
            }
            FockFamily::TwoModeSqueezed { s } => {
                let levels = n + 1;
                let t = s.tanh();
                let norm = (1.0 - t * t).sqrt();
                let mut v = DVector::zeros(levels * levels);
                for k in 0..n {
                    v[k * levels + k] = C64::new(norm * t.powi(k as i32), 0.0);
                }
                Self { levels: vec![levels, levels], members: vec![(1.0, v)] }
            }
            FockFamily::SingleModeSqueezed { s, phi } => {
                let levels = 2 * n + 1;
                let ratio = -C64::from_polar(s.tanh(), 2.0 * phi);
                let mut v = DVector::zeros(levels);
                let mut amp = C64::new(1.0 / s.cosh().sqrt(), 0.0);
                for k in 0..n {
                    v[2 * k] = amp;
                    // sqrt((2k+2)!)/(2^{k+1}(k+1)!) over sqrt((2k)!)/(2^k k!)
                    let factor = ((2 * k + 1) as f64 / (2 * k + 2) as f64).sqrt();
                    amp *= ratio * factor;
                }
                Self { levels: vec![levels], members: vec![(1.0, v)] }
            }
        }
    }

    pub fn n_modes(&self) -> usize {
        self.levels.len()
    }

    fn stride(&self, mode: usize) -> usize {
        self.levels[mode + 1..].iter().product()
    }

    /// `a_mode ψ`.
    fn annihilate(&self, mode: usize, psi: &DVector<C64>) -> DVector<C64> {
        let stride = self.stride(mode);
        let lev = self.levels[mode];
        let mut out = DVector::zeros(psi.len());
        for (idx, amp) in psi.iter().enumerate() {
            let n = (idx / stride) % lev;
            if n > 0 && *amp != C64::new(0.0, 0.0) {
                out[idx - stride] += amp * (n as f64).sqrt();
            }
        }
        out
    }

    /// `a_mode† ψ`, dropping anything pushed past the top level.
    fn create(&self, mode: usize, psi: &DVector<C64>) -> DVector<C64> {
        let stride = self.stride(mode);
        let lev = self.levels[mode];
        let mut out = DVector::zeros(psi.len());
        for (idx, amp) in psi.iter().enumerate() {
            let n = (idx / stride) % lev;
            if n + 1 < lev && *amp != C64::new(0.0, 0.0) {
                out[idx + stride] += amp * ((n + 1) as f64).sqrt();
            }
        }
        out
    }

    /// Quadrature `k` (ordering `X₁, Y₁, X₂, ...`) applied to `ψ`.
    fn quadrature(&self, k: usize, psi: &DVector<C64>) -> DVector<C64> {
        let mode = k / 2;
        let a = self.annihilate(mode, psi);
        let ad = self.create(mode, psi);
        if k.is_multiple_of(2) {
            (a + ad) * C64::new(0.5, 0.0)
        } else {
            (a - ad) * C64::new(0.0, -0.5)
        }
    }

    /// `<a_j a_k>` over the ensemble.
    pub fn expect_pair(&self, j: usize, k: usize) -> C64 {
        self.members
            .iter()
            .map(|(w, psi)| {
                let inner = self.annihilate(j, &self.annihilate(k, psi));
                psi.dotc(&inner) * *w
            })
            .sum()
    }

    /// `<a_j† a_j>` over the ensemble.
    pub fn occupation(&self, j: usize) -> f64 {
        self.members
            .iter()
            .map(|(w, psi)| self.annihilate(j, psi).norm_squared() * w)
            .sum()
    }

    /// Means and symmetrized covariances of the quadratures.
    pub fn quadrature_moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let dim = 2 * self.n_modes();
        let mut mean = DVector::zeros(dim);
        let mut second = DMatrix::zeros(dim, dim);
        for (w, psi) in &self.members {
            let applied: Vec<DVector<C64>> = (0..dim).map(|k| self.quadrature(k, psi)).collect();
            for k in 0..dim {
                mean[k] += w * psi.dotc(&applied[k]).re;
                for l in 0..dim {
                    // Re <R_k ψ|R_l ψ> = <{R_k, R_l}>/2 for Hermitian R.
                    second[(k, l)] += w * applied[k].dotc(&applied[l]).re;
                }
            }
        }
        let cov = second - &mean * mean.transpose();
        (mean, cov)
    }
}

/// First and second quadrature moments of a Fock-truncated state.
pub fn fock_moments(spec: &FockSpec) -> (DVector<f64>, DMatrix<f64>) {
    FockEnsemble::from_spec(spec).quadrature_moments()
}
