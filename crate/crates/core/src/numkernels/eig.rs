//! Symmetric eigendecomposition (Householder tridiagonalization followed by
//! implicit QL) and Cholesky-based SPD solves.

use super::matrix::DenseMatrix;
use super::real::Real;
use crate::error::{Error, Result};

/// Relative asymmetry accepted by [`symmetric_eig`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

const QL_MAX_SWEEPS: usize = 60;

/// Wide-precision problems at least this large get their eigenvectors by
/// inverse iteration instead of accumulated QL rotations.
const INVERSE_ITERATION_MIN: usize = 40;

const INVERSE_ITERATION_MAX: usize = 8;

/// Ascending eigenvalues with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SymmetricSpectrum<T: Real = f64> {
    pub values: Vec<T>,
    /// Column `i` pairs with `values[i]`.
    pub vectors: DenseMatrix<T>,
}

impl<T: Real> SymmetricSpectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<T> {
        self.vectors.column(i)
    }

    /// `Σ μ_i w_i w_iᵀ`
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let n = self.len();
        let scaled = DenseMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)].clone() * &self.values[j]);
        scaled.matmul(&self.vectors.transpose())
    }

    pub fn to_f64(&self) -> SymmetricSpectrum<f64> {
        SymmetricSpectrum {
            values: self.values.iter().map(Real::to_f64).collect(),
            vectors: self.vectors.to_f64(),
        }
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are ascending. Each eigenvector is normalized and signed so
/// its largest-magnitude component (first one on ties) is positive.
pub fn symmetric_eig<T: Real>(w: &DenseMatrix<T>) -> Result<SymmetricSpectrum<T>> {
    if !w.is_square() {
        return Err(Error::Shape(format!(
            "symmetric_eig needs a square matrix, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    if !w.all_finite() {
        return Err(Error::Domain("symmetric_eig input has non-finite entries".into()));
    }
    let n = w.rows();
    if n == 0 {
        return Ok(SymmetricSpectrum {
            values: vec![],
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let scale = w.max_abs();
    let asym = w.asymmetry();
    if asym > scale * T::from_f64(SYMMETRY_TOLERANCE) {
        return Err(Error::Domain(format!(
            "matrix is not symmetric (max |a_ij - a_ji| = {:e})",
            asym.to_f64()
        )));
    }

    // eigenvectors end up as the rows of `z`
    let mut v = w.symmetrized();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    let mut z = v.transpose();
    let fast = T::BITS > 53 && n >= INVERSE_ITERATION_MIN;
    let inverse = if fast { tridiagonal_vectors(&d, &e) } else { None };
    match inverse {
        Some((values, rows)) => {
            z = rows.matmul(&z);
            d = values;
        }
        None => tql2(Some(&mut z), &mut d, &mut e)?,
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<T> = order.iter().map(|&i| d[i].clone()).collect();
    let mut vectors = DenseMatrix::<T>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let row = z.row(src);
        let mut norm = T::zero();
        for x in row {
            norm.mul_add_assign(x, x);
        }
        let norm = norm.sqrt();
        let mut lead = 0;
        let mut lead_abs = T::zero();
        for (k, x) in row.iter().enumerate() {
            let a = x.abs();
            if a > lead_abs {
                lead_abs = a;
                lead = k;
            }
        }
        let factor = if row[lead] < T::zero() { -T::one() / &norm } else { T::one() / &norm };
        for (k, x) in row.iter().enumerate() {
            vectors[(k, col)] = x.clone() * &factor;
        }
    }
    Ok(SymmetricSpectrum { values, vectors })
}

/// Householder reduction to tridiagonal form. On return `v` holds the
/// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
/// subdiagonal.
fn tred2<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)].clone();
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale.is_zero() {
            e[i] = d[i - 1].clone();
            for j in 0..i {
                d[j] = v[(i - 1, j)].clone();
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= &scale;
                h.mul_add_assign(dk, dk);
            }
            let f = d[i - 1].clone();
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale.clone() * &g;
            h.mul_sub_assign(&f, &g);
            d[i - 1] = f - &g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                let f = d[j].clone();
                v[(j, i)] = f.clone();
                let mut g = e[j].clone();
                g.mul_add_assign(&v[(j, j)], &f);
                for k in (j + 1)..i {
                    g.mul_add_assign(&v[(k, j)], &d[k]);
                    e[k].mul_add_assign(&v[(k, j)], &f);
                }
                e[j] = g;
            }
            let mut f = T::zero();
            for j in 0..i {
                e[j] /= &h;
                f.mul_add_assign(&e[j], &d[j]);
            }
            let hh = f / (h.clone() + &h);
            for j in 0..i {
                e[j].mul_sub_assign(&hh, &d[j]);
            }
            for j in 0..i {
                let f = d[j].clone();
                let g = e[j].clone();
                for k in j..i {
                    v[(k, j)].mul_sub_assign(&f, &e[k]);
                    v[(k, j)].mul_sub_assign(&g, &d[k]);
                }
                d[j] = v[(i - 1, j)].clone();
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)].clone();
        v[(i, i)] = T::one();
        let h = d[i + 1].clone();
        if !h.is_zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)].clone() / &h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g.mul_add_assign(&v[(k, i + 1)], &v[(k, j)]);
                }
                for k in 0..=i {
                    v[(k, j)].mul_sub_assign(&g, &d[k]);
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)].clone();
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL on the tridiagonal `(d, e)`. `z` holds eigenvectors as rows so
/// each Givens rotation touches two contiguous rows.
fn tql2<T: Real>(mut z: Option<&mut DenseMatrix<T>>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i].clone();
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let cols = z.as_ref().map_or(0, |z| z.cols());
    for l in 0..n {
        tst1 = tst1.max_of(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps.clone() * &tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_SWEEPS {
                    return Err(Error::Convergence(format!(
                        "symmetric QL did not converge for eigenvalue {l} of {n}"
                    )));
                }
                let g = d[l].clone();
                let two = T::from_f64(2.0);
                let mut p = (d[l + 1].clone() - &g) / (two * &e[l]);
                let mut r = p.hypot(&T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l].clone() / (p.clone() + &r);
                d[l + 1] = e[l].clone() * (p.clone() + &r);
                let dl1 = d[l + 1].clone();
                let mut h = g - &d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= &h;
                }
                f += &h;

                p = d[m].clone();
                let mut c = T::one();
                let mut c2 = c.clone();
                let mut c3 = T::one();
                let el1 = e[l + 1].clone();
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2.clone();
                    c2 = c.clone();
                    s2 = s.clone();
                    let g = c.clone() * &e[i];
                    h = c.clone() * &p;
                    r = p.hypot(&e[i]);
                    e[i + 1] = s.clone() * &r;
                    s = e[i].clone() / &r;
                    c = p.clone() / &r;
                    p = c.clone() * &d[i];
                    p.mul_sub_assign(&s, &g);
                    let mut inner = c.clone() * &g;
                    inner.mul_add_assign(&s, &d[i]);
                    d[i + 1] = h.clone() + s.clone() * &inner;
                    if let Some(z) = z.as_deref_mut() {
                        rotate_rows(z, i, cols, &c, &s);
                    }
                }
                p = -(s.clone() * &s2 * &c3 * &el1 * &e[l]) / &dl1;
                e[l] = s.clone() * &p;
                d[l] = c.clone() * &p;
                if e[l].abs() <= eps.clone() * &tst1 {
                    break;
                }
            }
        }
        d[l] += &f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Eigenvalues by QL without vectors, eigenvectors of the tridiagonal
/// `(d, e[1..])` by inverse iteration. Vectors whose eigenvalues lie within
/// `sqrt(eps)·‖T‖` of each other are re-orthogonalized. Returns the vectors
/// as rows, or `None` if an iteration fails to converge.
fn tridiagonal_vectors<T: Real>(d: &[T], e: &[T]) -> Option<(Vec<T>, DenseMatrix<T>)> {
    let n = d.len();
    let mut values = d.to_vec();
    let mut scratch = e.to_vec();
    tql2(None, &mut values, &mut scratch).ok()?;
    values.sort_by(T::total_cmp);
    // offdiag[k] couples k and k+1
    let offdiag: Vec<T> = e[1..].to_vec();
    let mut norm = T::zero();
    for k in 0..n {
        let mut row = d[k].abs();
        if k > 0 {
            row += offdiag[k - 1].abs();
        }
        if k + 1 < n {
            row += offdiag[k].abs();
        }
        norm = norm.max_of(row);
    }
    if norm.is_zero() {
        return Some((values, DenseMatrix::identity(n)));
    }
    let eps = T::epsilon();
    let tiny = eps.clone() * &norm;
    let cluster_gap = eps.sqrt() * &norm;
    let residual_tol = tiny.clone() * T::from_usize(10 * n);
    let mut rows = DenseMatrix::<T>::zeros(n, n);
    let mut cluster_start = 0;
    let mut shift_prev = T::zero();
    for j in 0..n {
        let mut shift = values[j].clone();
        if j > 0 {
            if values[j].clone() - &values[j - 1] > cluster_gap {
                cluster_start = j;
            }
            // keep repeated eigenvalues from producing identical solves
            let floor = shift_prev.clone() + tiny.clone() * T::from_f64(10.0);
            if shift < floor {
                shift = floor;
            }
        }
        shift_prev = shift.clone();
        let lu = TridiagonalLu::new(d, &offdiag, &shift, &tiny);
        let mut x: Vec<T> = (0..n)
            .map(|k| T::from_f64(1.0 + ((k * 7919 + j * 104_729) % 1009) as f64 / 1009.0))
            .collect();
        let mut converged = 0;
        for _ in 0..INVERSE_ITERATION_MAX {
            lu.solve(&mut x);
            for prev in cluster_start..j {
                let proj = super::matrix::dot(&x, rows.row(prev));
                for (xk, pk) in x.iter_mut().zip(rows.row(prev)) {
                    xk.mul_sub_assign(&proj, pk);
                }
            }
            let len = super::matrix::norm2(&x);
            if len.is_zero() || !len.is_finite() {
                return None;
            }
            for xk in x.iter_mut() {
                *xk /= &len;
            }
            if tridiagonal_residual(d, &offdiag, &values[j], &x) <= residual_tol {
                converged += 1;
                if converged == 2 {
                    break;
                }
            }
        }
        if converged == 0 {
            return None;
        }
        for (k, xk) in x.into_iter().enumerate() {
            rows[(j, k)] = xk;
        }
    }
    Some((values, rows))
}

/// `‖(T − λ) x‖∞`
fn tridiagonal_residual<T: Real>(d: &[T], offdiag: &[T], lambda: &T, x: &[T]) -> T {
    let n = d.len();
    let mut worst = T::zero();
    for k in 0..n {
        let mut r = (d[k].clone() - lambda) * &x[k];
        if k > 0 {
            r.mul_add_assign(&offdiag[k - 1], &x[k - 1]);
        }
        if k + 1 < n {
            r.mul_add_assign(&offdiag[k], &x[k + 1]);
        }
        worst = worst.max_of(r.abs());
    }
    worst
}

/// LU of `T − λI` with partial pivoting; `U` has two superdiagonals.
struct TridiagonalLu<T: Real> {
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    mult: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagonalLu<T> {
    fn new(d: &[T], offdiag: &[T], shift: &T, tiny: &T) -> Self {
        let n = d.len();
        let mut u0 = Vec::with_capacity(n);
        let mut u1 = Vec::with_capacity(n);
        let mut u2 = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n);
        let mut swapped = Vec::with_capacity(n);
        let mut diag = d[0].clone() - shift;
        let mut sup = offdiag.first().cloned().unwrap_or_else(T::zero);
        for k in 0..n.saturating_sub(1) {
            let sub = offdiag[k].clone();
            let next_diag = d[k + 1].clone() - shift;
            let next_sup = offdiag.get(k + 1).cloned().unwrap_or_else(T::zero);
            if diag.abs() >= sub.abs() {
                if diag.abs() < *tiny {
                    diag = tiny.clone();
                }
                let l = sub / &diag;
                let mut nd = next_diag;
                nd.mul_sub_assign(&l, &sup);
                u0.push(diag);
                u1.push(sup);
                u2.push(T::zero());
                mult.push(l);
                swapped.push(false);
                diag = nd;
                sup = next_sup;
            } else {
                let l = diag.clone() / &sub;
                let mut nd = sup.clone();
                nd.mul_sub_assign(&l, &next_diag);
                let ns = -(l.clone() * &next_sup);
                u0.push(sub);
                u1.push(next_diag);
                u2.push(next_sup);
                mult.push(l);
                swapped.push(true);
                diag = nd;
                sup = ns;
            }
        }
        if diag.abs() < *tiny {
            diag = tiny.clone();
        }
        u0.push(diag);
        u1.push(T::zero());
        u2.push(T::zero());
        TridiagonalLu {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, x: &mut [T]) {
        let n = x.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            let (head, tail) = x.split_at_mut(k + 1);
            tail[0].mul_sub_assign(&self.mult[k], &head[k]);
        }
        for k in (0..n).rev() {
            let mut v = x[k].clone();
            if k + 1 < n {
                v.mul_sub_assign(&self.u1[k], &x[k + 1]);
            }
            if k + 2 < n {
                v.mul_sub_assign(&self.u2[k], &x[k + 2]);
            }
            x[k] = v / &self.u0[k];
        }
    }
}

/// Rows `i` and `i+1` of `z` get rotated by `(c, s)`.
fn rotate_rows<T: Real>(z: &mut DenseMatrix<T>, i: usize, cols: usize, c: &T, s: &T) {
    let (upper, lower) = z.as_mut_slice().split_at_mut((i + 1) * cols);
    let row_i = &mut upper[i * cols..];
    let row_next = &mut lower[..cols];
    let mut scratch = T::zero();
    for (vi, vi1) in row_i.iter_mut().zip(row_next.iter_mut()) {
        // scratch = s·vi + c·vi1, vi = c·vi − s·vi1
        scratch.set_mul(s, vi);
        scratch.mul_add_assign(c, vi1);
        *vi *= c;
        vi.mul_sub_assign(s, vi1);
        std::mem::swap(vi1, &mut scratch);
    }
}

/// Lower Cholesky factor of an SPD matrix.
///
/// A pivot at or below `n * eps * max_diag` is treated as a zero pivot and
/// reported as [`Error::SingularGramian`].
pub fn cholesky<T: Real>(w: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !w.is_square() {
        return Err(Error::Shape(format!(
            "cholesky needs a square matrix, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let n = w.rows();
    let max_diag = w.diag().into_iter().fold(T::zero(), T::max_of);
    let tol = max_diag * T::from_usize(n.max(1)) * T::epsilon();
    let mut l = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut diag = w[(j, j)].clone();
        for k in 0..j {
            let ljk = l[(j, k)].clone();
            diag.mul_sub_assign(&ljk, &ljk);
        }
        if !(diag > tol) {
            return Err(Error::SingularGramian {
                index: j,
                pivot: diag.to_f64(),
                tolerance: tol.to_f64(),
            });
        }
        let ljj = diag.sqrt();
        for i in (j + 1)..n {
            let mut acc = w[(i, j)].clone();
            for k in 0..j {
                acc.mul_sub_assign(&l[(i, k)], &l[(j, k)]);
            }
            l[(i, j)] = acc / &ljj;
        }
        l[(j, j)] = ljj;
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` given the lower factor.
pub fn cholesky_solve<T: Real>(l: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = l.rows();
    if b.len() != n {
        return Err(Error::Shape(format!("rhs length {} for {n}x{n} factor", b.len())));
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut acc = y[i].clone();
        for k in 0..i {
            acc.mul_sub_assign(&l[(i, k)], &y[k]);
        }
        y[i] = acc / &l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut acc = y[i].clone();
        for k in (i + 1)..n {
            acc.mul_sub_assign(&l[(k, i)], &y[k]);
        }
        y[i] = acc / &l[(i, i)];
    }
    Ok(y)
}

/// `W x = b` for symmetric positive definite `W`.
pub fn solve_spd<T: Real>(w: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let l = cholesky(w)?;
    cholesky_solve(&l, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernels::real::Mp256;

    #[test]
    fn diagonal_input_is_sorted() {
        let w = DenseMatrix::<f64>::diagonal(&[3.0, 1.0, 2.0]);
        let spec = symmetric_eig(&w).unwrap();
        assert_eq!(spec.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(spec.vector(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(spec.vector(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_and_trivial_sizes() {
        let spec = symmetric_eig(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert!(spec.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let one = symmetric_eig(&DenseMatrix::<f64>::from_rows(&[vec![-4.0]]).unwrap()).unwrap();
        assert_eq!(one.values, vec![-4.0]);
        assert_eq!(one.vector(0), vec![1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let w = DenseMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let spec = symmetric_eig(&w).unwrap();
        assert!((spec.values[0] - 1.0).abs() < 1e-15);
        assert!((spec.values[1] - 3.0).abs() < 1e-15);
        let r = 0.5f64.sqrt();
        let v1 = spec.vector(1);
        assert!((v1[0] - r).abs() < 1e-15 && (v1[1] - r).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let w = DenseMatrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eig(&w), Err(Error::Domain(_))));
    }

    #[test]
    fn multiprecision_graded_matrix() {
        // eigenvalues 1 and 1e-40 hidden behind an orthogonal rotation
        let five = Mp256::from_f64(5.0);
        let c = Mp256::from_f64(3.0) / &five;
        let s = Mp256::from_f64(4.0) / &five;
        let small = Mp256::from_f64(1e-40);
        let q = DenseMatrix::from_row_major(2, 2, vec![c.clone(), -s.clone(), s, c]).unwrap();
        let d = DenseMatrix::diagonal(&[Mp256::one(), small.clone()]);
        let w = q.matmul(&d).matmul(&q.transpose());
        let spec = symmetric_eig(&w).unwrap();
        let rel = ((spec.values[0].clone() - &small) / &small).abs().to_f64();
        assert!(rel < 1e-30, "{rel}");
    }

    fn check_decomposition(w: &DenseMatrix<Mp256>, tol: f64) {
        let n = w.rows();
        let mut v = w.clone();
        let mut d = vec![Mp256::zero(); n];
        let mut e = vec![Mp256::zero(); n];
        tred2(&mut v, &mut d, &mut e);
        assert!(tridiagonal_vectors(&d, &e).is_some(), "inverse iteration fell back");
        let spec = symmetric_eig(w).unwrap();
        let lambda = DenseMatrix::diagonal(&spec.values);
        let resid = w.matmul(&spec.vectors).sub(&spec.vectors.matmul(&lambda)).max_abs().to_f64();
        let orth = spec
            .vectors
            .transpose()
            .matmul(&spec.vectors)
            .sub(&DenseMatrix::identity(n))
            .max_abs()
            .to_f64();
        assert!(resid < tol && orth < tol, "residual {resid}, orthogonality {orth}");
        assert!(spec.values.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn inverse_iteration_on_wide_graded_matrix() {
        // P D P with distinct eigenvalues across 60 decades
        let n = 48;
        let mut w = DenseMatrix::<Mp256>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = ((i * 31 + j * 17 + i * j) % 23) as f64 / 23.0 - 0.5;
                w[(i, j)] = Mp256::from_f64(v);
            }
        }
        let w = w.matmul(&w.transpose());
        let scale: Vec<Mp256> = (0..n).map(|i| Mp256::from_f64(10f64.powf(-(i as f64) * 0.6))).collect();
        let d = DenseMatrix::diagonal(&scale);
        check_decomposition(&d.matmul(&w).matmul(&d).symmetrized(), 1e-60);
    }

    #[test]
    fn inverse_iteration_with_repeated_eigenvalues() {
        // two disjoint copies of a path on 24 nodes: every eigenvalue is double
        let n = 48;
        let mut w = DenseMatrix::<Mp256>::zeros(n, n);
        for i in 0..n {
            w[(i, i)] = Mp256::from_f64(-2.0);
            if i + 1 < n && i != 23 {
                w[(i, i + 1)] = Mp256::one();
                w[(i + 1, i)] = Mp256::one();
            }
        }
        check_decomposition(&w, 1e-60);
        check_decomposition(&DenseMatrix::identity(n), 1e-60);
    }

    #[test]
    fn spd_solves() {
        let x = solve_spd(&DenseMatrix::<f64>::identity(2), &[1.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
        let x = solve_spd(&DenseMatrix::<f64>::diagonal(&[2.0, 4.0]), &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        let singular = DenseMatrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_spd(&singular, &[1.0, 0.0]),
            Err(Error::SingularGramian { index: 1, .. })
        ));
    }
}
