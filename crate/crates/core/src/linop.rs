//! Dense complex linear algebra.
//!
//! Everything in the simulator lives in a [`ComplexMatrix`]: ladder and Pauli
//! operators, Hamiltonians, density matrices and the Liouvillian superoperator.
//! The routines here are small and self-contained: Kronecker products, a
//! cyclic Jacobi eigensolver for Hermitian matrices, and LU with partial
//! pivoting.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by the linear-algebra routines.
pub mod tol {
    /// Max |h - h^dagger| accepted by [`super::eig_hermitian`].
    pub const HERMITIAN: f64 = 1e-10;
    /// Sweep cap for the cyclic Jacobi iteration.
    pub const JACOBI_MAX_SWEEPS: usize = 100;
    /// Jacobi stops once the off-diagonal Frobenius norm falls below this
    /// fraction of the full Frobenius norm.
    pub const JACOBI_OFF_DIAGONAL: f64 = 1e-15;
    /// LU reports `Singular` when a pivot drops below this fraction of the
    /// matrix 1-norm.
    pub const SINGULAR_PIVOT: f64 = 1e-13;
    /// Relative tolerance when comparing component magnitudes for the
    /// eigenvector phase convention.
    pub const PHASE_TIE: f64 = 1e-10;
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the entry count
    /// does not equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "entry count must equal rows * cols"
        );
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from nested rows, mostly for tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// Induced 1-norm (largest absolute column sum). This is the `‖m‖` used
    /// in every relative tolerance of the crate.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, z) in sums.iter_mut().zip(self.row(i)) {
                *s += z.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |h - h^dagger|; zero for exactly Hermitian matrices.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Smallest eigenvalue of a Hermitian matrix is at least `-tol`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> Result<bool> {
        let eig = eig_hermitian(self)?;
        Ok(eig.values.first().is_none_or(|&v| v >= -tol))
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        ComplexVector::from_vec(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.as_slice())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// Expectation-style trace `Tr(self * rho)` without forming the product.
    pub fn trace_product(&self, rho: &Self) -> C64 {
        assert_eq!((self.cols, self.rows), (rho.rows, rho.cols));
        let mut acc = ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self[(i, j)] * rho[(j, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![ZERO; len],
        }
    }

    pub fn from_vec(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self {
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.data[k] = ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `<self|other>`, conjugating `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                let dst = (ai * b.rows + bi) * cols + aj * b.cols;
                for (o, z) in out.data[dst..dst + b.cols].iter_mut().zip(b.row(bi)) {
                    *o = s * z;
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    /// Each column's largest-magnitude component is real and nonnegative.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        })
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| C64::new(l, 0.0))
    }
}

/// Diagonalises a Hermitian matrix with the cyclic complex Jacobi method.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows,
            found: h.cols,
        });
    }
    let deviation = h.hermiticity_error();
    if deviation > tol::HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }

    let n = h.rows;
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = false;
    for sweep in 0..tol::JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= tol::JACOBI_OFF_DIAGONAL * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Late sweeps: drop entries that no longer register against
                // either diagonal element.
                let g = 100.0 * b;
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                jacobi_rotate(&mut a, &mut v, p, q, app, aqq, apq);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: tol::JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|i| v[(i, src)]).collect();
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, dst)] = z;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation zeroing `a[p][q]`; accumulates into `v`.
fn jacobi_rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    app: f64,
    aqq: f64,
    apq: C64,
) {
    let n = a.rows;
    let b = apq.norm();
    // Phase that makes a[p][q] real, then a real symmetric rotation.
    let phase = (apq / b).conj();
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // A <- A G with G = [[c, s], [-s e, c e]], e = phase.
    let se = phase * s;
    let ce = phase * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - se * akq;
        a[(k, q)] = akp * s + ce * akq;
    }
    // A <- G† A
    let se_c = se.conj();
    let ce_c = ce.conj();
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - se_c * aqk;
        a[(q, k)] = apk * s + ce_c * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - se * vkq;
        v[(k, q)] = vkp * s + ce * vkq;
    }
}

/// Rotates `col` so that its largest-magnitude component (lowest index on
/// ties) is real and nonnegative.
fn fix_phase(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let k = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - tol::PHASE_TIE))
        .unwrap_or(0);
    let rot = col[k].conj() / col[k].norm();
    for z in col.iter_mut() {
        *z *= rot;
    }
    col[k] = C64::new(col[k].norm(), 0.0);
}

/// Solves `m x = rhs` by LU factorisation with partial pivoting.
///
/// Elimination skips zero multipliers and tracks each row's last nonzero
/// column, so banded or block-sparse systems cost far less than the dense
/// worst case.
pub fn solve_linear(m: &ComplexMatrix, rhs: &ComplexVector) -> Result<ComplexVector> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    let n = m.rows;
    let threshold = tol::SINGULAR_PIVOT * m.norm_one();
    let mut a = m.data.clone();
    let mut b = rhs.data.clone();
    // One past the last nonzero column of each row.
    let mut end: Vec<usize> = (0..n)
        .map(|i| {
            a[i * n..(i + 1) * n]
                .iter()
                .rposition(|z| *z != ZERO)
                .map_or(0, |k| k + 1)
        })
        .collect();

    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for r in (col + 1)..n {
            let mag = a[r * n + col].norm();
            if mag > best {
                best = mag;
                piv = r;
            }
        }
        if best <= threshold || best == 0.0 {
            return Err(Error::Singular {
                column: col,
                pivot: best,
            });
        }
        if piv != col {
            let (upper, lower) = a.split_at_mut(piv * n);
            upper[col * n..(col + 1) * n].swap_with_slice(&mut lower[..n]);
            b.swap(col, piv);
            end.swap(col, piv);
        }

        let (head, tail) = a.split_at_mut((col + 1) * n);
        let pivot_row = &head[col * n..];
        let inv = ONE / pivot_row[col];
        let stop = end[col];
        let bp = b[col];
        for r in (col + 1)..n {
            let row = &mut tail[(r - col - 1) * n..(r - col) * n];
            let x = row[col];
            if x == ZERO {
                continue;
            }
            let f = x * inv;
            row[col] = ZERO;
            for (dst, src) in row[col + 1..stop].iter_mut().zip(&pivot_row[col + 1..stop]) {
                *dst -= f * src;
            }
            b[r] -= f * bp;
            if end[r] < stop {
                end[r] = stop;
            }
        }
    }

    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let row = &a[i * n..(i + 1) * n];
        let mut acc = b[i];
        for k in (i + 1)..end[i] {
            acc -= row[k] * x[k];
        }
        x[i] = acc / row[i];
    }
    Ok(ComplexVector::from_vec(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_diagonal_structure() {
        let k = kron(
            &ComplexMatrix::from_diag(&[1.0, -1.0]),
            &ComplexMatrix::identity(2),
        );
        assert_eq!(k, ComplexMatrix::from_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_sigma_x_squares_to_identity() {
        let xx = kron(&sigma_x(), &sigma_x());
        // By hand: xx is the anti-diagonal permutation, so xx * xx = I.
        let anti = ComplexMatrix::from_fn(4, 4, |i, j| if i + j == 3 { ONE } else { ZERO });
        assert_eq!(xx, anti);
        assert_eq!(&xx * &xx, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_rectangular_shape() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(4, 5);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (8, 15));
    }

    #[test]
    fn eig_of_diagonal_sorts_ascending() {
        let e = eig_hermitian(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // Columns are the permuted unit vectors.
        assert_eq!(e.vector(0), ComplexVector::basis(3, 1));
        assert_eq!(e.vector(1), ComplexVector::basis(3, 2));
        assert_eq!(e.vector(2), ComplexVector::basis(3, 0));
    }

    #[test]
    fn eig_of_sigma_x() {
        let e = eig_hermitian(&sigma_x()).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = e.vector(0);
        let plus = e.vector(1);
        // Phase convention: first component (tie) real and nonnegative.
        assert_abs_diff_eq!(minus[0].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(minus[1].re, -h, epsilon = 1e-12);
        assert_abs_diff_eq!(plus[0].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(plus[1].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(minus[1].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_handles_complex_phases() {
        // sigma_y has eigenvalues -1, +1 with eigenvectors (1, ∓i)/sqrt 2.
        let sy = ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]);
        let e = eig_hermitian(&sy).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        let v = e.vector(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v[0].re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1].im, -h, epsilon = 1e-12);
        assert!(e.reconstruct().max_abs_diff(&sy) < 1e-13);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_of_zero_matrix() {
        let e = eig_hermitian(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        assert!(e.vectors.is_unitary(1e-14));
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let v = ComplexVector::from_vec(vec![C64::new(1.0, 2.0), ONE, -I, C64::new(0.5, 0.0)]);
        let x = solve_linear(&ComplexMatrix::identity(4), &v).unwrap();
        assert_eq!(x, v);

        let x = solve_linear(
            &ComplexMatrix::from_diag(&[2.0, 4.0]),
            &ComplexVector::from_real(&[2.0, 8.0]),
        )
        .unwrap();
        assert_eq!(x, ComplexVector::from_real(&[1.0, 2.0]));
    }

    #[test]
    fn solve_needs_pivoting() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = solve_linear(&m, &ComplexVector::from_real(&[3.0, 5.0])).unwrap();
        assert_eq!(x, ComplexVector::from_real(&[5.0, 3.0]));
    }

    #[test]
    fn solve_reports_singular() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let err = solve_linear(&m, &ComplexVector::from_real(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Singular { column: 1, .. }));
    }

    #[test]
    fn solve_rejects_bad_shapes() {
        let m = ComplexMatrix::identity(3);
        assert!(matches!(
            solve_linear(&m, &ComplexVector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + j as f64, i as f64));
        assert_abs_diff_eq!(
            (a.trace_product(&b) - (&a * &b).trace()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn norms() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, -2.0], &[3.0, 4.0]]);
        assert_eq!(m.norm_one(), 6.0);
        assert_abs_diff_eq!(m.frobenius_norm(), 30f64.sqrt(), epsilon = 1e-15);
    }
}
