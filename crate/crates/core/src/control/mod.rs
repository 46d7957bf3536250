//! Minimum-energy defense inputs and the decomposition of their energy into
//! attacker strength, Gramian conditioning and attacker/defender alignment.
//!
//! Every entry point has an `f64` form and a `_in::<T>` form generic over the
//! working precision. Problems stay in `f64` (all inputs are exactly
//! representable) and are widened on entry.

mod spectral;
mod symmetric;

pub use spectral::{beta_large_tf, spectral_beta, LargeTfBeta, SpectralBeta};
pub use symmetric::{AttackerDrive, SymmetricModes};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernels::{
    cholesky, cholesky_solve, dot, expm, expm_with_integral, finite_horizon_gramian, symmetric_eig,
    DenseMatrix, Real, SymmetricSpectrum,
};
use crate::sysmodel::{AugmentedSystem, NetworkSystem};

/// Ratio `μ2 / μ1` below which the rank-1 approximation is flagged.
pub const LOW_CONFIDENCE_GAP: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ControlProblem {
    pub aug: AugmentedSystem,
    pub x0: Vec<f64>,
    pub w0: Vec<f64>,
    pub y_f: Vec<f64>,
    pub t0: f64,
    pub t_f: f64,
}

impl ControlProblem {
    pub fn new(
        aug: AugmentedSystem,
        x0: Vec<f64>,
        w0: Vec<f64>,
        y_f: Option<Vec<f64>>,
        t0: f64,
        t_f: f64,
    ) -> Result<Self> {
        if !(t_f > t0) || !t0.is_finite() || !t_f.is_finite() {
            return Err(Error::Domain(format!("need t_f > t0, got t0 = {t0}, t_f = {t_f}")));
        }
        if x0.len() != aug.n {
            return Err(Error::Shape(format!("x0 has {} entries for n = {}", x0.len(), aug.n)));
        }
        if w0.len() != aug.q {
            return Err(Error::Shape(format!("w0 has {} entries for q = {}", w0.len(), aug.q)));
        }
        let y_f = y_f.unwrap_or_else(|| vec![0.0; aug.n]);
        if y_f.len() != aug.n {
            return Err(Error::Shape(format!("y_f has {} entries for n = {}", y_f.len(), aug.n)));
        }
        Ok(ControlProblem {
            aug,
            x0,
            w0,
            y_f,
            t0,
            t_f,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.t_f - self.t0
    }

    /// `[x0; w0]`
    pub fn initial_state(&self) -> Vec<f64> {
        self.x0.iter().chain(&self.w0).copied().collect()
    }

    /// Same problem with `x0`, `w0` and the attacker drive scaled by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut p = self.clone();
        p.x0.iter_mut().for_each(|v| *v *= k);
        p.w0.iter_mut().for_each(|v| *v *= k);
        p.aug.r.iter_mut().for_each(|v| *v *= k);
        p
    }
}

/// `W_p = ∫_0^T e^{At} B Bᵀ e^{Aᵀt} dt`; independent of `H` and of the attackers.
pub fn output_gramian(sys: &NetworkSystem, horizon: f64) -> Result<DenseMatrix<f64>> {
    output_gramian_in::<f64>(sys, horizon)
}

pub fn output_gramian_in<T: Real>(sys: &NetworkSystem, horizon: f64) -> Result<DenseMatrix<T>> {
    finite_horizon_gramian(&sys.a.cast::<T>(), &sys.b.cast::<T>(), horizon)
}

/// Gramian of the full augmented pair `(Ã, B̃)`.
pub fn augmented_gramian_in<T: Real>(aug: &AugmentedSystem, horizon: f64) -> Result<DenseMatrix<T>> {
    finite_horizon_gramian(&aug.a.cast::<T>(), &aug.b.cast::<T>(), horizon)
}

fn network_gramian_in<T: Real>(aug: &AugmentedSystem, horizon: f64) -> Result<DenseMatrix<T>> {
    finite_horizon_gramian(
        &aug.network_block().cast::<T>(),
        &aug.defense_block().cast::<T>(),
        horizon,
    )
}

/// `β = C e^{ÃΔt} x̃0 + C ∫_0^{Δt} e^{Ãs} ds r̃ − y_f`.
pub fn maneuver_beta(p: &ControlProblem) -> Result<Vec<f64>> {
    Ok(maneuver_beta_in::<f64>(p)?.iter().map(Real::to_f64).collect())
}

pub fn maneuver_beta_in<T: Real>(p: &ControlProblem) -> Result<Vec<T>> {
    let a = p.aug.a.cast::<T>();
    let dt = p.horizon();
    let x0: Vec<T> = p.initial_state().iter().map(|&v| T::from_f64(v)).collect();
    let mut full = if p.aug.r.iter().all(|&v| v == 0.0) {
        expm(&a.scale(&T::from_f64(dt)))?.mul_vec(&x0)
    } else {
        let (phi, integral) = expm_with_integral(&a, dt)?;
        let r: Vec<T> = p.aug.r.iter().map(|&v| T::from_f64(v)).collect();
        let mut v = phi.mul_vec(&x0);
        for (vi, fi) in v.iter_mut().zip(integral.mul_vec(&r)) {
            *vi += fi;
        }
        v
    };
    full.truncate(p.aug.n);
    for (b, y) in full.iter_mut().zip(&p.y_f) {
        *b -= T::from_f64(*y);
    }
    Ok(full)
}

/// A problem widened to `T` with the Gramian factored and the terminal
/// costate `λ_f = Cᵀ W_p⁻¹ β` precomputed.
#[derive(Clone, Debug)]
pub struct PreparedProblem<T: Real> {
    pub a: DenseMatrix<T>,
    pub b: DenseMatrix<T>,
    pub r: Vec<T>,
    pub n: usize,
    pub beta: Vec<T>,
    pub gramian: DenseMatrix<T>,
    pub factor: DenseMatrix<T>,
    pub costate_f: Vec<T>,
    pub t0: f64,
    pub t_f: f64,
}

impl<T: Real> PreparedProblem<T> {
    pub fn new(p: &ControlProblem) -> Result<Self> {
        let gramian = network_gramian_in::<T>(&p.aug, p.horizon())?;
        let factor = cholesky(&gramian)?;
        let beta = maneuver_beta_in::<T>(p)?;
        let mut costate_f = cholesky_solve(&factor, &beta)?;
        costate_f.resize(p.aug.dim(), T::zero());
        Ok(PreparedProblem {
            a: p.aug.a.cast(),
            b: p.aug.b.cast(),
            r: p.aug.r.iter().map(|&v| T::from_f64(v)).collect(),
            n: p.aug.n,
            beta,
            gramian,
            factor,
            costate_f,
            t0: p.t0,
            t_f: p.t_f,
        })
    }

    /// `E* = βᵀ W_p⁻¹ β`
    pub fn energy(&self) -> T {
        dot(&self.beta, &self.costate_f[..self.n])
    }

    /// `u*(t) = −B̃ᵀ e^{Ãᵀ(t_f − t)} λ_f`, evaluated with a fresh exponential.
    pub fn input_at(&self, t: f64) -> Result<Vec<T>> {
        if !(t >= self.t0 - 1e-12 && t <= self.t_f + 1e-12) {
            return Err(Error::Domain(format!(
                "time {t} outside [{}, {}]",
                self.t0, self.t_f
            )));
        }
        let phi_t = expm(&self.a.transpose().scale(&T::from_f64(self.t_f - t)))?;
        Ok(self.input_from_costate(&phi_t.mul_vec(&self.costate_f)))
    }

    /// `u = −B̃ᵀ ψ` for a costate `ψ`.
    pub fn input_from_costate(&self, psi: &[T]) -> Vec<T> {
        self.b.tr_mul_vec(psi).into_iter().map(|v| -v).collect()
    }
}

pub fn optimal_input(p: &ControlProblem, t: f64) -> Result<Vec<f64>> {
    let prepared = PreparedProblem::<f64>::new(p)?;
    prepared.input_at(t)
}

pub fn min_energy(p: &ControlProblem) -> Result<f64> {
    Ok(min_energy_in::<f64>(p)?.to_f64())
}

pub fn min_energy_in<T: Real>(p: &ControlProblem) -> Result<T> {
    Ok(PreparedProblem::<T>::new(p)?.energy())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub beta: Vec<f64>,
    pub beta_norm2: f64,
    /// `β / ‖β‖`; absent for a zero maneuver.
    pub n_dir: Option<Vec<f64>>,
    /// Signed `nᵀw₁` (eigenvector signs follow the largest-component rule).
    pub n_t_w1: f64,
    /// Ascending Gramian eigenvalues.
    pub mu: Vec<f64>,
    pub mu1: f64,
    pub mu2: Option<f64>,
    pub log10_mu1: f64,
    pub w1: Vec<f64>,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e_exact: f64,
    pub log10_e_exact: f64,
    pub e_rank1: f64,
    pub rank1_ratio: Option<f64>,
    /// `β² (nᵀwᵢ)² / μᵢ` per Gramian mode.
    pub modal_terms: Vec<f64>,
    /// Relative gap between `Σ modal_terms` and `E*`, evaluated in working precision.
    pub modal_identity_error: f64,
    /// `Σᵢ (nᵀwᵢ)²`, one up to rounding.
    pub alignment_sum: f64,
    pub low_confidence: bool,
    pub zero_maneuver: bool,
    pub precision_bits: u32,
}

/// Smallest admissible eigenvalue for a Gramian of size `n` in precision `T`.
pub fn controllability_tolerance<T: Real>(spectrum: &SymmetricSpectrum<T>) -> T {
    let top = spectrum
        .values
        .last()
        .cloned()
        .unwrap_or_else(T::zero)
        .abs();
    top * T::from_usize(spectrum.len().max(1)) * T::epsilon()
}

/// Fails with [`Error::SingularGramian`] unless `μ₁` clears the working-precision floor.
pub fn check_controllable<T: Real>(spectrum: &SymmetricSpectrum<T>) -> Result<()> {
    let tol = controllability_tolerance(spectrum);
    match spectrum.values.first() {
        Some(mu1) if *mu1 > tol => Ok(()),
        Some(mu1) => Err(Error::SingularGramian {
            index: 0,
            pivot: mu1.to_f64(),
            tolerance: tol.to_f64(),
        }),
        None => Ok(()),
    }
}

fn log10<T: Real>(v: &T) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    v.abs().ln().to_f64() / std::f64::consts::LN_10
}

/// Assembles the report from `β`, the factored Gramian and its spectrum.
pub fn report_from_parts<T: Real>(
    beta: &[T],
    factor: &DenseMatrix<T>,
    spectrum: &SymmetricSpectrum<T>,
) -> Result<EnergyReport> {
    check_controllable(spectrum)?;
    let n = beta.len();
    let beta_norm2 = dot(beta, beta);
    let mu: Vec<f64> = spectrum.values.iter().map(Real::to_f64).collect();
    let mu1 = spectrum.values[0].clone();
    let mu2 = spectrum.values.get(1).map(Real::to_f64);
    let w1 = spectrum.vector(0);
    let low_confidence = spectrum
        .values
        .get(1)
        .map(|m2| m2.clone() / &mu1 < T::from_f64(LOW_CONFIDENCE_GAP))
        .unwrap_or(false);
    let e2 = T::one() / &mu1;
    let base = EnergyReport {
        beta: beta.iter().map(Real::to_f64).collect(),
        beta_norm2: beta_norm2.to_f64(),
        n_dir: None,
        n_t_w1: 0.0,
        mu,
        mu1: mu1.to_f64(),
        mu2,
        log10_mu1: log10(&mu1),
        w1: w1.iter().map(Real::to_f64).collect(),
        e1: 0.0,
        e2: e2.to_f64(),
        e3: 0.0,
        e_exact: 0.0,
        log10_e_exact: f64::NEG_INFINITY,
        e_rank1: 0.0,
        rank1_ratio: None,
        modal_terms: vec![0.0; n],
        modal_identity_error: 0.0,
        alignment_sum: 0.0,
        low_confidence,
        zero_maneuver: true,
        precision_bits: T::BITS,
    };
    if beta.iter().all(Real::is_zero) {
        return Ok(base);
    }
    let norm = beta_norm2.sqrt();
    let n_dir: Vec<T> = beta.iter().map(|b| b.clone() / &norm).collect();
    let proj = spectrum.vectors.tr_mul_vec(&n_dir);
    let modal: Vec<T> = proj
        .iter()
        .zip(&spectrum.values)
        .map(|(c, m)| beta_norm2.clone() * c.square() / m)
        .collect();
    let modal_sum: T = modal.iter().cloned().sum();
    let solved = cholesky_solve(factor, beta)?;
    let e_exact = dot(beta, &solved);
    let e3 = proj[0].square();
    let e_rank1 = beta_norm2.clone() * &e2 * &e3;
    let identity_error = ((modal_sum - &e_exact) / &e_exact).abs();
    Ok(EnergyReport {
        n_dir: Some(n_dir.iter().map(Real::to_f64).collect()),
        n_t_w1: proj[0].to_f64(),
        e1: beta_norm2.to_f64(),
        e3: e3.to_f64(),
        e_exact: e_exact.to_f64(),
        log10_e_exact: log10(&e_exact),
        e_rank1: e_rank1.to_f64(),
        rank1_ratio: Some((e_rank1 / &e_exact).to_f64()),
        modal_terms: modal.iter().map(Real::to_f64).collect(),
        modal_identity_error: identity_error.to_f64(),
        alignment_sum: dot(&proj, &proj).to_f64(),
        zero_maneuver: false,
        ..base
    })
}

pub fn energy_decomposition(p: &ControlProblem) -> Result<EnergyReport> {
    energy_decomposition_in::<f64>(p)
}

pub fn energy_decomposition_in<T: Real>(p: &ControlProblem) -> Result<EnergyReport> {
    let gramian = network_gramian_in::<T>(&p.aug, p.horizon())?;
    let spectrum = symmetric_eig(&gramian)?;
    check_controllable(&spectrum)?;
    let factor = cholesky(&gramian)?;
    let beta = maneuver_beta_in::<T>(p)?;
    report_from_parts(&beta, &factor, &spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{augment, AttackerModel};

    fn scalar(attack: bool) -> ControlProblem {
        let one = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        let (h, atk, x0, w0) = if attack {
            (one.clone(), AttackerModel::uniform(1, 0.0, 0.0), vec![0.0], vec![1.0])
        } else {
            (DenseMatrix::zeros(1, 0), AttackerModel::default(), vec![1.0], vec![])
        };
        let sys = NetworkSystem::new(DenseMatrix::from_rows(&[vec![-1.0]]).unwrap(), h, one).unwrap();
        ControlProblem::new(augment(&sys, &atk).unwrap(), x0, w0, None, 0.0, 1.0).unwrap()
    }

    #[test]
    fn scalar_maneuvers() {
        let b = maneuver_beta(&scalar(false)).unwrap()[0];
        assert!((b - (-1f64).exp()).abs() < 1e-15);
        let b = maneuver_beta(&scalar(true)).unwrap()[0];
        assert!((b - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let mut zero = scalar(false);
        zero.x0 = vec![0.0];
        assert_eq!(maneuver_beta(&zero).unwrap(), vec![0.0]);
    }

    #[test]
    fn scalar_energy_and_input() {
        let e = min_energy(&scalar(false)).unwrap();
        let exact = 2.0 * (-2f64).exp() / (1.0 - (-2f64).exp());
        assert!((e - exact).abs() < 1e-14);
        assert!((e - 0.313035).abs() < 1e-6);
        let u0 = optimal_input(&scalar(false), 0.0).unwrap()[0];
        assert!((u0 + 0.313035).abs() < 1e-6);
        let u1 = optimal_input(&scalar(false), 1.0).unwrap()[0];
        assert!((u1 + 0.850918).abs() < 1e-6);
        let e = min_energy(&scalar(true)).unwrap();
        assert!((e - 0.924235).abs() < 1e-6);
    }

    #[test]
    fn scalar_report_is_rank_one() {
        let r = energy_decomposition(&scalar(false)).unwrap();
        assert_eq!(r.e3, 1.0);
        assert!((r.e_rank1 - r.e_exact).abs() <= 1e-15 * r.e_exact);
        assert!(r.mu2.is_none() && !r.low_confidence);
        let mut zero = scalar(false);
        zero.x0 = vec![0.0];
        let r = energy_decomposition(&zero).unwrap();
        assert!(r.zero_maneuver && r.n_dir.is_none() && r.e_exact == 0.0);
        assert!(optimal_input(&zero, 0.5).unwrap()[0] == 0.0);
    }

    #[test]
    fn uncontrollable_pair_is_reported() {
        let a = DenseMatrix::diagonal(&[-1.0, -2.0]);
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let sys = NetworkSystem::new(a, DenseMatrix::zeros(2, 0), b).unwrap();
        let p = ControlProblem::new(
            augment(&sys, &AttackerModel::default()).unwrap(),
            vec![1.0, 1.0],
            vec![],
            None,
            0.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(min_energy(&p), Err(Error::SingularGramian { .. })));
        assert!(matches!(energy_decomposition(&p), Err(Error::SingularGramian { .. })));
    }

    #[test]
    fn problem_validation() {
        let p = scalar(false);
        assert!(ControlProblem::new(p.aug.clone(), vec![1.0], vec![], None, 1.0, 1.0).is_err());
        assert!(ControlProblem::new(p.aug.clone(), vec![], vec![], None, 0.0, 1.0).is_err());
    }
}
