//! Matrix exponential by scaling and squaring with a diagonal Padé approximant.
//!
//! The degree is picked per call from the working precision: for each
//! candidate degree `m` the forward truncation constant
//! `c_m = (m!)^2 / ((2m)! (2m+1)!)` gives the largest norm `theta_m` at which
//! the approximant is accurate to unit roundoff, and the pair (degree,
//! squarings) with the fewest matrix products wins. `f64` is restricted to
//! the classic degrees up to 13; wider types pick higher degrees.

use super::matrix::{lu_solve, DenseMatrix};
use super::real::Real;
use crate::error::{Error, Result};

const F64_DEGREES: [usize; 5] = [3, 5, 7, 9, 13];
const MAX_DEGREE: usize = 80;

/// Natural log of `c_m`.
fn ln_truncation_constant(m: usize) -> f64 {
    let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    2.0 * ln_fact(m) - ln_fact(2 * m) - ln_fact(2 * m + 1)
}

/// `ln(theta_m)` for a given `log2(eps)`.
fn ln_theta(m: usize, log2_eps: f64) -> f64 {
    (log2_eps * std::f64::consts::LN_2 - ln_truncation_constant(m)) / (2 * m + 1) as f64
}

/// Degree and number of squarings for a matrix with 1-norm `norm`.
pub(crate) fn choose_degree(norm: f64, bits: u32) -> (usize, u32) {
    let log2_eps = 1.0 - bits as f64;
    let candidates: Vec<usize> = if bits <= f64::MANTISSA_DIGITS {
        F64_DEGREES.to_vec()
    } else {
        (3..=MAX_DEGREE).collect()
    };
    let mut best = (candidates[candidates.len() - 1], u32::MAX, usize::MAX);
    for &m in &candidates {
        let theta = ln_theta(m, log2_eps).exp();
        let s = if norm <= theta {
            0
        } else {
            (norm / theta).log2().ceil().max(0.0) as u32
        };
        let cost = pade_products(m) + s as usize;
        if cost < best.2 {
            best = (m, s, cost);
        }
    }
    (best.0, best.1)
}

/// Padé coefficients `b_k = (2m-k)! m! / ((2m)! k! (m-k)!)` by recurrence.
fn pade_coefficients<T: Real>(m: usize) -> Vec<T> {
    let mut b = Vec::with_capacity(m + 1);
    b.push(T::one());
    for k in 0..m {
        let prev = b[k].clone();
        let num = T::from_usize(m - k);
        let den = T::from_usize((2 * m - k) * (k + 1));
        b.push(prev * num / den);
    }
    b
}

/// Block size for Paterson–Stockmeyer on a polynomial of degree `d` in `X^2`.
fn block_size(d: usize) -> usize {
    ((d as f64).sqrt().ceil() as usize).max(1)
}

/// Matrix products spent on a degree-`m` approximant: `X^2`, its powers up
/// to the block size, one Horner chain each for the even and odd parts, and
/// the final multiplication of the odd part by `X`.
fn pade_products(m: usize) -> usize {
    let d = m / 2;
    let k = block_size(d);
    1 + (k - 1) + 2 * (d / k) + 1
}

/// `sum_j coeffs[j] * Y^j` by Paterson–Stockmeyer; `powers[i] = Y^(i+1)`.
fn paterson_stockmeyer<T: Real>(coeffs: &[T], powers: &[DenseMatrix<T>]) -> DenseMatrix<T> {
    let n = powers[0].rows();
    let k = powers.len();
    let block = |start: usize| -> DenseMatrix<T> {
        let mut acc = DenseMatrix::<T>::zeros(n, n);
        for l in 0..k {
            let idx = start + l;
            if idx >= coeffs.len() {
                break;
            }
            if l == 0 {
                for i in 0..n {
                    acc[(i, i)] += &coeffs[idx];
                }
            } else {
                acc.axpy(&coeffs[idx], &powers[l - 1]);
            }
        }
        acc
    };
    let top = (coeffs.len() - 1) / k;
    let mut acc = block(top * k);
    for i in (0..top).rev() {
        acc = acc.matmul(&powers[k - 1]);
        acc = acc.add(&block(i * k));
    }
    acc
}

/// `e^M`.
pub fn expm<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "expm needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if !m.all_finite() {
        return Err(Error::NumericalRange("expm input has non-finite entries".into()));
    }
    let norm = m.norm1().to_f64();
    if norm == 0.0 {
        return Ok(DenseMatrix::identity(n));
    }
    if !norm.is_finite() || norm > 1e300 {
        return Err(Error::NumericalRange(format!("expm input norm {norm:e}")));
    }
    let (degree, squarings) = choose_degree(norm, T::BITS);
    let scale = T::from_f64(0.5f64.powi(squarings as i32));
    let x = m.scale(&scale);
    let x2 = x.matmul(&x);
    let b = pade_coefficients::<T>(degree);
    let even: Vec<T> = b.iter().step_by(2).cloned().collect();
    let odd: Vec<T> = b.iter().skip(1).step_by(2).cloned().collect();
    let k = block_size(degree / 2);
    let mut powers = vec![x2];
    for _ in 1..k {
        let next = powers[powers.len() - 1].matmul(&powers[0]);
        powers.push(next);
    }
    let v = paterson_stockmeyer(&even, &powers);
    let u = x.matmul(&paterson_stockmeyer(&odd, &powers));
    let num = v.add(&u);
    let den = v.sub(&u);
    let mut r = lu_solve(&den, &num)?;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    if !r.all_finite() {
        return Err(Error::NumericalRange(format!(
            "expm overflowed (input norm {norm:e})"
        )));
    }
    Ok(r)
}
