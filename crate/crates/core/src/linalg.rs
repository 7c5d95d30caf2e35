//! Small dense linear algebra: row-major matrices, LU with partial pivoting,
//! cyclic Jacobi for symmetric spectra and a Padé matrix exponential.

use std::ops::{Index, IndexMut};

use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        Self { rows, cols, data: data.to_vec() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// `y += self * x`, without allocating.
    pub fn mul_vec_add(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(self.cols, x.len());
        debug_assert_eq!(self.rows, y.len());
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (&a, &b) in self.row(i).iter().zip(x) {
                acc += a * b;
            }
            *yi += acc;
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| -a).collect() }
    }

    /// Divides row `i` by `d[i]`.
    pub fn div_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate() {
            for v in &mut out.data[i * self.cols..(i + 1) * self.cols] {
                *v = *v / di;
            }
        }
        out
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (oi, &i) in rows.iter().enumerate() {
            for (oj, &j) in cols.iter().enumerate() {
                out[(oi, oj)] = self[(i, j)];
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hstack(blocks: &[&Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        assert!(blocks.iter().all(|b| b.rows == rows), "hstack row mismatch");
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| {
            let a = v.magnitude();
            if a > m { a } else { m }
        })
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let s = (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, j)].magnitude());
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = (self[(i, j)] - self[(j, i)]).magnitude();
                if d > worst {
                    worst = d;
                }
            }
        }
        Some(worst)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Returns `None` when a pivot falls to the scalar's singularity tolerance.
    pub fn factor(a: &Matrix<T>) -> Option<Self> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tol = T::pivot_tolerance(a.max_abs(), n);
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].magnitude();
            for i in (k + 1)..n {
                let v = lu[(i, k)].magnitude();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                if factor == T::zero() {
                    continue;
                }
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.nrows(), self.dim(), "rhs rows");
        let mut out = Matrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Only the upper triangle is read.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Vec<T> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + m[(i, i)] * m[(i, i)];
            for j in (i + 1)..n {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    eig
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.nrows();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let norm = a.norm1().to_f64_lossy();
    let squarings = if norm > PADE13_THETA { (norm / PADE13_THETA).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(T::lit(0.5f64.powi(squarings)));
    let b: Vec<T> = PADE13.iter().map(|&c| T::lit(c)).collect();
    let ident = Matrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9]));
    let u_outer = a6
        .matmul(&u_inner)
        .add(&a6.scale(b[7]))
        .add(&a4.scale(b[5]))
        .add(&a2.scale(b[3]))
        .add(&ident.scale(b[1]));
    let u = scaled.matmul(&u_outer);
    let v_inner = a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8]));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&ident.scale(b[0]));

    let lu = Lu::factor(&v.sub(&u)).expect("Padé denominator is nonsingular for scaled input");
    let mut r = lu.solve_matrix(&v.add(&u));
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn lu_solves_exactly_over_rationals() {
        let r = |n: i64, d: i64| Ratio::new(n, d);
        let a = Matrix::from_rows(&[
            vec![r(0, 1), r(2, 1), r(1, 1)],
            vec![r(1, 1), r(1, 2), r(0, 1)],
            vec![r(3, 1), r(0, 1), r(1, 3)],
        ]);
        let x = vec![r(1, 1), r(-2, 3), r(5, 7)];
        let b = a.mul_vec(&x);
        let lu = Lu::factor(&a).unwrap();
        assert_eq!(lu.solve(&b), x);
    }

    #[test]
    fn lu_detects_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(Lu::factor(&a).is_none());
        let z = Matrix::from_rows(&[vec![Ratio::<i64>::from_integer(0)]]);
        assert!(Lu::factor(&z).is_none());
    }

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let a = Matrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 2.0]]);
        let e = symmetric_eigenvalues(&a);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let a = Matrix::from_diagonal(&[-1.0, 0.5, -30.0]);
        let e = expm(&a);
        for (i, v) in [-1.0f64, 0.5, -30.0].iter().enumerate() {
            assert!((e[(i, i)] - v.exp()).abs() <= 1e-14 * v.exp().max(1.0));
        }
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let n = Matrix::from_rows(&[vec![0.0f64, 1.0], vec![0.0, 0.0]]);
        let e = expm(&n);
        assert!((e[(0, 1)] - 1.0).abs() < 1e-15 && (e[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expm_rotation_generator_large_norm() {
        // exp([[0,t],[-t,0]]) = [[cos t, sin t], [-sin t, cos t]]
        let t = 20.0f64;
        let a = Matrix::from_rows(&[vec![0.0, t], vec![-t, 0.0]]);
        let e = expm(&a);
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-12);
        assert!((e[(0, 1)] - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn select_and_hstack() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let s = a.select(&[1], &[2, 0]);
        assert_eq!(s, Matrix::from_rows(&[vec![6.0, 4.0]]));
        let h = Matrix::hstack(&[&s, &s]);
        assert_eq!(h.row(0), &[6.0, 4.0, 6.0, 4.0]);
    }
}
