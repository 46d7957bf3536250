//! Exponential integrals and finite-horizon controllability Gramians.

use super::expm::expm;
use super::matrix::DenseMatrix;
use super::real::Real;
use crate::error::{Error, Result};

/// `F = ∫_0^T e^{M s} ds`, read off the upper-right block of
/// `exp([[M, I], [0, 0]] T)`. Valid for singular `M`.
pub fn expm_integral<T: Real>(m: &DenseMatrix<T>, horizon: f64) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "expm_integral needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("integration horizon {horizon} must be >= 0")));
    }
    let n = m.rows();
    let t = T::from_f64(horizon);
    let mut big = DenseMatrix::<T>::zeros(2 * n, 2 * n);
    big.set_block(0, 0, &m.scale(&t));
    for i in 0..n {
        big[(i, n + i)] = t.clone();
    }
    Ok(expm(&big)?.block(0, n, n, n))
}

/// `(e^{M T}, ∫_0^T e^{M s} ds)` from a single block exponential.
pub fn expm_with_integral<T: Real>(
    m: &DenseMatrix<T>,
    horizon: f64,
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    if !m.is_square() {
        return Err(Error::Shape("expm_with_integral needs a square matrix".into()));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("integration horizon {horizon} must be >= 0")));
    }
    let n = m.rows();
    let t = T::from_f64(horizon);
    let mut big = DenseMatrix::<T>::zeros(2 * n, 2 * n);
    big.set_block(0, 0, &m.scale(&t));
    for i in 0..n {
        big[(i, n + i)] = t.clone();
    }
    let e = expm(&big)?;
    Ok((e.block(0, 0, n, n), e.block(0, n, n, n)))
}

/// `W = ∫_0^T e^{A t} B Bᵀ e^{Aᵀ t} dt`.
///
/// Van Loan's block exponential is evaluated on a short step `h = T / 2^k`
/// with `‖A‖ h ≤ 1`, then doubled `k` times through
/// `W(2h) = W(h) + e^{Ah} W(h) e^{Aᵀh}`. Evaluating the block form directly
/// on the full horizon would go through `e^{-AT}`, which overflows for stiff
/// networks.
pub fn finite_horizon_gramian<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    horizon: f64,
) -> Result<DenseMatrix<T>> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "Gramian needs square A and matching B, got A {}x{} and B {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("Gramian horizon {horizon} must be > 0")));
    }
    let n = a.rows();
    let norm = a.norm1().to_f64() * horizon;
    let doublings = if norm > 1.0 { norm.log2().ceil() as u32 } else { 0 };
    let h = horizon / 2f64.powi(doublings as i32);
    let th = T::from_f64(h);

    let bbt = b.matmul(&b.transpose());
    let mut big = DenseMatrix::<T>::zeros(2 * n, 2 * n);
    big.set_block(0, 0, &a.scale(&(-th.clone())));
    big.set_block(0, n, &bbt.scale(&th));
    big.set_block(n, n, &a.transpose().scale(&th));
    let e = expm(&big)?;
    let f12 = e.block(0, n, n, n);
    let f22 = e.block(n, n, n, n);
    let mut phi = f22.transpose();
    let mut w = phi.matmul(&f12);
    for _ in 0..doublings {
        let shifted = phi.matmul(&w).matmul(&phi.transpose());
        w = w.add(&shifted);
        phi = phi.matmul(&phi);
    }
    Ok(w.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_integrals() {
        let zero = DenseMatrix::<f64>::zeros(1, 1);
        assert!((expm_integral(&zero, 1.0).unwrap()[(0, 0)] - 1.0).abs() < 1e-15);
        let m = DenseMatrix::<f64>::from_rows(&[vec![-1.0]]).unwrap();
        let f = expm_integral(&m, 1.0).unwrap()[(0, 0)];
        assert!((f - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!(matches!(expm_integral(&m, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn scalar_gramian() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![-1.0]]).unwrap();
        let b = DenseMatrix::<f64>::from_rows(&[vec![1.0]]).unwrap();
        let w = finite_horizon_gramian(&a, &b, 1.0).unwrap()[(0, 0)];
        let exact = (1.0 - (-2f64).exp()) / 2.0;
        assert!((w - exact).abs() < 1e-15, "{w} vs {exact}");
        // stiff scalar: many doublings, still exact
        let a = DenseMatrix::<f64>::from_rows(&[vec![-400.0]]).unwrap();
        let w = finite_horizon_gramian(&a, &b, 3.0).unwrap()[(0, 0)];
        assert!((w - 1.0 / 800.0).abs() < 1e-16);
    }

    #[test]
    fn zero_input_gives_zero_gramian() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]).unwrap();
        let b = DenseMatrix::<f64>::zeros(2, 1);
        assert_eq!(finite_horizon_gramian(&a, &b, 1.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn shape_errors() {
        let a = DenseMatrix::<f64>::zeros(2, 2);
        let b = DenseMatrix::<f64>::zeros(3, 1);
        assert!(matches!(finite_horizon_gramian(&a, &b, 1.0), Err(Error::Shape(_))));
        assert!(matches!(
            finite_horizon_gramian(&a, &DenseMatrix::zeros(2, 1), 0.0),
            Err(Error::Domain(_))
        ));
    }
}
