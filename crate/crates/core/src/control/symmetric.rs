//! Closed forms for symmetric network matrices.
//!
//! With `A = Q Λ Qᵀ` the Gramian and the single-attacker maneuver need no
//! matrix exponentials: entry `(k, l)` of `Qᵀ W_p Q` is `(QᵀB)(QᵀB)ᵀ` times
//! `∫_0^T e^{(λk+λl)t} dt`, and the attacker term of `β` is
//! `Q (κ ⊙ Qᵀ h)` with one scalar weight `κk` per mode. The weights depend on
//! the attacker dynamics but not on where the attacker sits, so a sweep over
//! attacker positions costs one eigendecomposition plus `O(n²)` per position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernels::{expm, phi1, symmetric_eig, DenseMatrix, Real};

/// Dynamics of a single attacker, `ẇ = s w + r`, `w(0) = w0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackerDrive {
    pub s: f64,
    pub r: f64,
    #[serde(default = "unit")]
    pub w0: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub struct SymmetricModes<T: Real> {
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors of `A` as columns.
    pub basis: DenseMatrix<T>,
    pub horizon: f64,
}

impl<T: Real> SymmetricModes<T> {
    pub fn new(a: &DenseMatrix<f64>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::Domain(format!("horizon {horizon} must be > 0")));
        }
        if a.asymmetry() != 0.0 {
            return Err(Error::Domain("network matrix is not symmetric".into()));
        }
        let spec = symmetric_eig(&a.cast::<T>())?;
        Ok(SymmetricModes {
            eigenvalues: spec.values,
            basis: spec.vectors,
            horizon,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Qᵀ W_p Q` for versor defenders at the given 1-based nodes. Same
    /// spectrum as `W_p`, eigenvectors rotated by `Q`.
    pub fn modal_gramian(&self, defenders: &[usize]) -> DenseMatrix<T> {
        let n = self.n();
        let t = T::from_f64(self.horizon);
        let rows: Vec<&[T]> = defenders.iter().map(|&d| self.basis.row(d - 1)).collect();
        let mut core = DenseMatrix::<T>::zeros(n, n);
        for k in 0..n {
            for l in k..n {
                let mut g = T::zero();
                for row in &rows {
                    g.mul_add_assign(&row[k], &row[l]);
                }
                if g.is_zero() {
                    continue;
                }
                let z = (self.eigenvalues[k].clone() + &self.eigenvalues[l]) * &t;
                let v = g * phi1(&z) * &t;
                core[(k, l)] = v.clone();
                core[(l, k)] = v;
            }
        }
        core
    }

    /// `W_p` for versor defenders at the given 1-based nodes.
    pub fn gramian(&self, defenders: &[usize]) -> DenseMatrix<T> {
        self.basis
            .matmul(&self.modal_gramian(defenders))
            .matmul(&self.basis.transpose())
            .symmetrized()
    }

    /// `κk = ∫_0^T e^{λk (T−τ)} w(τ) dτ`, from the first row of
    /// `exp([[λk, 1, 0], [0, s, r], [0, 0, 0]] T)` applied to `[0, w0, 1]`.
    pub fn drive_weights(&self, drive: &AttackerDrive) -> Result<Vec<T>> {
        let t = T::from_f64(self.horizon);
        let s = T::from_f64(drive.s);
        let r = T::from_f64(drive.r);
        let w0 = T::from_f64(drive.w0);
        self.eigenvalues
            .iter()
            .map(|lam| {
                let mut m = DenseMatrix::<T>::zeros(3, 3);
                m[(0, 0)] = lam.clone() * &t;
                m[(0, 1)] = t.clone();
                m[(1, 1)] = s.clone() * &t;
                m[(1, 2)] = r.clone() * &t;
                let e = expm(&m)?;
                let mut k = e[(0, 1)].clone() * &w0;
                k += &e[(0, 2)];
                Ok(k)
            })
            .collect()
    }

    /// `Qᵀ β` for a single attacker at 1-based `node` with zero initial network state.
    pub fn modal_attack_beta(&self, weights: &[T], node: usize) -> Vec<T> {
        self.basis
            .row(node - 1)
            .iter()
            .zip(weights)
            .map(|(q, k)| q.clone() * k)
            .collect()
    }

    /// Maneuver of a single attacker at 1-based `node` with zero initial network state.
    pub fn attack_beta(&self, weights: &[T], node: usize) -> Vec<T> {
        self.basis.mul_vec(&self.modal_attack_beta(weights, node))
    }

    /// `e^{AT} x0`
    pub fn free_response(&self, x0: &[T]) -> Vec<T> {
        let t = T::from_f64(self.horizon);
        let coeff: Vec<T> = self
            .basis
            .tr_mul_vec(x0)
            .into_iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * (l.clone() * &t).exp())
            .collect();
        self.basis.mul_vec(&coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernels::finite_horizon_gramian;

    #[test]
    fn gramian_matches_van_loan() {
        let a = DenseMatrix::from_rows(&[
            vec![-2.0, 1.0, 0.0],
            vec![1.0, -3.0, 1.0],
            vec![0.0, 1.0, -2.0],
        ])
        .unwrap();
        let modes = SymmetricModes::<f64>::new(&a, 1.3).unwrap();
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        let w = finite_horizon_gramian(&a, &b, 1.3).unwrap();
        let err = modes.gramian(&[1]).sub(&w).frobenius_norm() / w.frobenius_norm();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn modal_quantities_rotate_back() {
        let a = DenseMatrix::from_rows(&[
            vec![-2.0, 1.0, 1.0],
            vec![1.0, -3.0, 0.0],
            vec![1.0, 0.0, -2.5],
        ])
        .unwrap();
        let modes = SymmetricModes::<f64>::new(&a, 1.0).unwrap();
        let modal = modes.modal_gramian(&[2]);
        let back = modes.basis.matmul(&modal).matmul(&modes.basis.transpose());
        assert!(back.sub(&modes.gramian(&[2])).max_abs() < 1e-15);
        let weights = modes.drive_weights(&AttackerDrive { s: 1.0, r: 0.5, w0: 2.0 }).unwrap();
        let beta = modes.attack_beta(&weights, 3);
        let rotated = modes.basis.tr_mul_vec(&beta);
        for (x, y) in rotated.iter().zip(modes.modal_attack_beta(&weights, 3)) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_drive_weights() {
        let a = DenseMatrix::from_rows(&[vec![-1.0]]).unwrap();
        let modes = SymmetricModes::<f64>::new(&a, 1.0).unwrap();
        // constant attack: ∫ e^{-(1-τ)} dτ = 1 - e^{-1}
        let k = modes.drive_weights(&AttackerDrive { s: 0.0, r: 0.0, w0: 1.0 }).unwrap();
        assert!((k[0] - (1.0 - (-1f64).exp())).abs() < 1e-15);
        // exponential attack: (e^{s} - e^{-1}) / (s + 1)
        let k = modes.drive_weights(&AttackerDrive { s: 2.5, r: 0.0, w0: 1.0 }).unwrap();
        let exact = (2.5f64.exp() - (-1f64).exp()) / 3.5;
        assert!((k[0] - exact).abs() < 1e-14 * exact);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert!(SymmetricModes::<f64>::new(&a, 1.0).is_err());
    }
}
