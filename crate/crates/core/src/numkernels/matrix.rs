use std::fmt;
use std::ops::{Index, IndexMut};

use super::real::Real;
use crate::error::{Error, Result};

/// Row-major dense matrix over any [`Real`] scalar.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds from nested `f64` rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| T::from_f64(rows[i][j])))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn column_vector(values: &[T]) -> Self {
        DenseMatrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    o.mul_add_assign(a, b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.mul_add_assign(a, b);
                }
                acc
            })
            .collect()
    }

    /// `selfᵀ v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "tr_mul_vec dimension");
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                o.mul_add_assign(a, vi);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "add shape");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "sub shape");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s)
    }

    /// `self += s * rhs`
    pub fn axpy(&mut self, s: &T, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "axpy shape");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.mul_add_assign(s, b);
        }
    }

    pub fn map<U: Real>(&self, f: impl FnMut(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Converts through `f64`; exact when widening from `f64`.
    pub fn cast<U: Real>(&self) -> DenseMatrix<U> {
        self.map(|v| U::from_f64(v.to_f64()))
    }

    pub fn to_f64(&self) -> DenseMatrix<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Self) {
        assert!(
            r0 + src.rows <= self.rows && c0 + src.cols <= self.cols,
            "set_block out of range"
        );
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(r0 + i, c0 + j)] = src[(i, j)].clone();
            }
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self[(i, j)].abs())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), T::max_of)
    }

    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for v in &self.data {
            acc.mul_add_assign(v, v);
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), T::max_of)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(Real::is_finite)
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max_of((self[(i, j)].clone() - &self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::from_f64(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() + &self[(j, i)]) * &half
        })
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{:.6e}", v.to_f64())).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc.mul_add_assign(x, y);
    }
    acc
}

pub fn norm2<T: Real>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

pub fn to_f64_vec<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(Real::to_f64).collect()
}

pub fn from_f64_vec<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::from_f64(x)).collect()
}

/// Solves `M X = R` by LU with partial pivoting; `M` square and invertible.
pub fn lu_solve<T: Real>(m: &DenseMatrix<T>, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !m.is_square() || m.rows() != rhs.rows() {
        return Err(Error::Shape(format!(
            "lu_solve: {}x{} with rhs {}x{}",
            m.rows(),
            m.cols(),
            rhs.rows(),
            rhs.cols()
        )));
    }
    let n = m.rows();
    let k = rhs.cols();
    let mut a = m.clone();
    let mut x = rhs.clone();
    let scale = m.max_abs();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[(col, col)].abs();
        for r in (col + 1)..n {
            let v = a[(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best.is_zero() || best <= scale.clone() * T::epsilon() * T::epsilon() {
            return Err(Error::NumericalRange(format!(
                "lu_solve: singular pivot in column {col}"
            )));
        }
        if piv != col {
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
            }
            for j in 0..k {
                x.data.swap(col * k + j, piv * k + j);
            }
        }
        let pivot = a[(col, col)].clone();
        for r in (col + 1)..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone() / &pivot;
            for j in col..n {
                let v = a[(col, j)].clone();
                a[(r, j)].mul_sub_assign(&f, &v);
            }
            for j in 0..k {
                let v = x[(col, j)].clone();
                x[(r, j)].mul_sub_assign(&f, &v);
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = a[(col, col)].clone();
        for j in 0..k {
            let mut acc = x[(col, j)].clone();
            for c in (col + 1)..n {
                acc.mul_sub_assign(&a[(col, c)], &x[(c, j)]);
            }
            x[(col, j)] = acc / &pivot;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernels::real::Mp256;

    #[test]
    fn matmul_and_transpose() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let b = a.transpose();
        let c = b.matmul(&a);
        assert_eq!(c.as_slice(), &[35.0, 44.0, 44.0, 56.0]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 0.0, 1.0]), vec![6.0, 8.0]);
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let m = DenseMatrix::<f64>::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, -1.0, 0.0],
            vec![3.0, 0.0, -2.0],
        ])
        .unwrap();
        let x = DenseMatrix::column_vector(&[1.0, -2.0, 0.5]);
        let b = m.matmul(&x);
        let got = lu_solve(&m, &b).unwrap();
        for i in 0..3 {
            assert!((got[(i, 0)] - x[(i, 0)]).abs() < 1e-14);
        }
        let singular = DenseMatrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(lu_solve(&singular, &DenseMatrix::identity(2)).is_err());
    }

    #[test]
    fn generic_over_precision() {
        let m: DenseMatrix<Mp256> = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = lu_solve(&m, &DenseMatrix::identity(2)).unwrap();
        let id = m.matmul(&inv);
        let err = id.sub(&DenseMatrix::identity(2)).max_abs();
        assert!(err.to_f64() < 1e-70);
    }

    #[test]
    fn norms() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, -2.0], vec![-3.0, 4.0]]).unwrap();
        assert_eq!(a.norm1(), 6.0);
        assert_eq!(a.max_abs(), 4.0);
        assert!((a.frobenius_norm() - 30f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.asymmetry(), 1.0);
    }
}
