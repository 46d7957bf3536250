//! Eigendecomposition of non-symmetric real matrices (`f64` only).
//!
//! Eigenvalues come from a real Schur form. Eigenvectors are the right
//! singular vectors of `M - λI` belonging to its smallest singular values,
//! one per member of each eigenvalue cluster.

use nalgebra::{Complex, DMatrix};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest accepted condition number of the eigenvector matrix.
pub const MAX_EIGENBASIS_CONDITION: f64 = 1e8;
/// Largest accepted `‖MV - VΛ‖ / ‖M‖`.
pub const MAX_EIGEN_RESIDUAL: f64 = 1e-6;

const SCHUR_TOLERANCE: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug)]
pub struct GeneralEigen {
    /// Sorted by descending real part, then descending imaginary part.
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
    pub condition: f64,
    pub residual: f64,
}

impl GeneralEigen {
    /// `V⁻¹ x` for a real vector.
    pub fn coefficients(&self, x: &[f64]) -> Result<Vec<C64>> {
        let n = self.values.len();
        if x.len() != n {
            return Err(Error::Shape(format!("vector of length {} for {n} modes", x.len())));
        }
        let rhs = DMatrix::from_iterator(n, 1, x.iter().map(|&v| C64::new(v, 0.0)));
        let sol = self
            .vectors
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Diagonalizability("eigenvector matrix is singular".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

pub(crate) fn to_nalgebra(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn descending(a: &C64, b: &C64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Eigenvalues only, ordered as in [`GeneralEigen`].
pub fn complex_eigenvalues(m: &DenseMatrix<f64>) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(vec![]);
    }
    if !m.all_finite() {
        return Err(Error::Domain("eigen input has non-finite entries".into()));
    }
    let schur = to_nalgebra(m)
        .try_schur(SCHUR_TOLERANCE, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Convergence("real Schur iteration did not converge".into()))?;
    let mut values: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(descending);
    Ok(values)
}

/// Eigenvalues and a well-conditioned eigenvector basis.
pub fn general_eig(m: &DenseMatrix<f64>) -> Result<GeneralEigen> {
    let values = complex_eigenvalues(m)?;
    let n = values.len();
    if n == 0 {
        return Ok(GeneralEigen {
            values,
            vectors: DMatrix::zeros(0, 0),
            condition: 1.0,
            residual: 0.0,
        });
    }
    let a = to_nalgebra(m).map(|v| C64::new(v, 0.0));
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-8 * scale;

    let mut vectors = DMatrix::<C64>::zeros(n, n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (values[j] - values[i]).norm() <= cluster_tol {
            j += 1;
        }
        let size = j - i;
        let center = values[i..j].iter().fold(C64::new(0.0, 0.0), |acc, v| acc + v) / size as f64;
        let shifted = &a - DMatrix::<C64>::identity(n, n) * center;
        let svd = shifted.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Convergence("SVD did not return singular vectors".into()))?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&p, &q| svd.singular_values[p].total_cmp(&svd.singular_values[q]));
        for (slot, &k) in order.iter().take(size).enumerate() {
            let sigma = svd.singular_values[k];
            if sigma > MAX_EIGEN_RESIDUAL * scale {
                return Err(Error::Diagonalizability(format!(
                    "eigenvalue {} (multiplicity {size}) has a {}-dimensional eigenspace at most",
                    values[i], slot
                )));
            }
            let mut col: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
            normalize_phase(&mut col);
            for (r, z) in col.into_iter().enumerate() {
                vectors[(r, i + slot)] = z;
            }
        }
        i = j;
    }

    let sv = vectors.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < MAX_EIGENBASIS_CONDITION) {
        return Err(Error::Diagonalizability(format!(
            "eigenvector matrix condition number {condition:e} exceeds {MAX_EIGENBASIS_CONDITION:e}"
        )));
    }
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values.clone()));
    let residual = (&a * &vectors - &vectors * lambda).norm() / scale;
    if !(residual < MAX_EIGEN_RESIDUAL) {
        return Err(Error::Diagonalizability(format!(
            "eigen residual {residual:e} exceeds {MAX_EIGEN_RESIDUAL:e}"
        )));
    }
    Ok(GeneralEigen {
        values,
        vectors,
        condition,
        residual,
    })
}

/// Unit norm, largest-magnitude component real and positive.
fn normalize_phase(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut lead = C64::new(0.0, 0.0);
    for z in v.iter() {
        if z.norm() > lead.norm() * (1.0 + 1e-12) {
            lead = *z;
        }
    }
    let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { C64::new(1.0, 0.0) };
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = DenseMatrix::diagonal(&[-1.0, 2.0]);
        let eig = general_eig(&m).unwrap();
        assert_eq!(eig.values, vec![C64::new(2.0, 0.0), C64::new(-1.0, 0.0)]);
        assert!((eig.vectors[(1, 0)].re - 1.0).abs() < 1e-12);
        assert!((eig.vectors[(0, 1)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangular_spectrum() {
        let m = DenseMatrix::from_rows(&[vec![-1.0, 1.0], vec![0.0, 2.5]]).unwrap();
        let eig = general_eig(&m).unwrap();
        assert!((eig.values[0].re - 2.5).abs() < 1e-12);
        assert!((eig.values[1].re + 1.0).abs() < 1e-12);
        assert!(eig.residual < 1e-12);
    }

    #[test]
    fn complex_pair_ordering() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let eig = general_eig(&m).unwrap();
        assert!((eig.values[0].im - 1.0).abs() < 1e-12);
        assert!((eig.values[1].im + 1.0).abs() < 1e-12);
        let x = eig.coefficients(&[1.0, 0.0]).unwrap();
        assert_eq!(x.len(), 2);
    }

    #[test]
    fn repeated_semisimple_eigenvalue() {
        let m = DenseMatrix::diagonal(&[0.0, 0.0, -3.0]);
        let eig = general_eig(&m).unwrap();
        assert!(eig.condition < 10.0);
    }

    #[test]
    fn jordan_block_is_rejected() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(general_eig(&m), Err(Error::Diagonalizability(_))));
    }
}
