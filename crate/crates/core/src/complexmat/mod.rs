//! Dense complex linear algebra.
//!
//! Everything in the crate is built on [`Matrix`], a row-major dense matrix of
//! `Complex64` entries. The kernel is deliberately small: products, LU with
//! partial pivoting, column-pivoted Gram–Schmidt and a couple of norms. Target
//! sizes are n ≤ 64, so nothing here is blocked or vectorised.

mod lu;
mod rrqr;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use lu::{inverse, lu_factor, solve, LuFactors};
pub use rrqr::{rrqr, Basis, RankReveal};

/// Complex scalar used throughout.
pub type Scalar = Complex64;

/// Default relative pivot threshold for LU.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-13;
/// Default relative column-norm threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Default number of iterations for [`Matrix::norm_op2_est`].
pub const DEFAULT_NORM_ITERS: usize = 100;

pub(crate) const ZERO: Scalar = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Scalar = Complex64::new(1.0, 0.0);

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    /// Validated constructor: `entries` is row-major and every entry must be finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self {
            rows,
            cols,
            data: entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    /// `value · I_n`.
    pub fn scalar(n: usize, value: Scalar) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value;
        }
        m
    }

    pub fn diag(values: &[Scalar]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| c64(x, 0.0)));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Stacks equal-length column vectors side by side.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
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

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Checked product `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self − λ·I`. Panics if not square.
    pub fn shifted(&self, lambda: Scalar) -> Matrix {
        assert!(self.is_square(), "shifted requires a square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= lambda;
        }
        m
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|z| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance `‖self − other‖_F`. Panics on shape mismatch.
    pub fn dist_fro(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dist_fro shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Estimate of the spectral norm (largest singular value).
    ///
    /// Power iteration on the Gram matrix `AᴴA`, accelerated by repeated
    /// squaring: each of the at most `iters` rounds squares the normalised Gram
    /// power, so round `s` has the convergence of `2^s` plain power steps. The
    /// loop stops once the Rayleigh estimate is stationary to rounding. The
    /// returned value never exceeds `σ_max` by more than rounding, since it is
    /// `‖Av‖/‖v‖` for a concrete `v`.
    pub fn norm_op2_est(&self, iters: usize) -> f64 {
        let iters = iters.max(1);
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let a = self.scale(c64(1.0 / scale, 0.0));
        let gram = a.adjoint().matmul(&a).expect("gram shape");
        let gn = gram.norm_fro();
        let mut power = gram.scale(c64(1.0 / gn, 0.0));

        let rayleigh = |v: &[Scalar]| -> f64 {
            let vn = vec_norm(v);
            if vn == 0.0 {
                return 0.0;
            }
            vec_norm(&a.apply(v)) / vn
        };
        let dominant_column = |m: &Matrix| -> Vec<Scalar> {
            let j = (0..m.cols)
                .map(|j| (j, (0..m.rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>()))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                .0;
            m.column(j)
        };

        let mut v = dominant_column(&power);
        let mut est = rayleigh(&v);
        for _ in 1..iters {
            let sq = power.matmul(&power).expect("square");
            let n = sq.norm_fro();
            if n == 0.0 || !n.is_finite() {
                break;
            }
            power = sq.scale(c64(1.0 / n, 0.0));
            let cand = dominant_column(&power);
            let next = rayleigh(&cand);
            let done = (next - est).abs() <= 1e-15 * next.max(est);
            if next >= est {
                v = cand;
                est = next;
            }
            if done {
                break;
            }
        }
        // Two plain power steps to polish the direction.
        for _ in 0..2 {
            let w = gram.apply(&v);
            let next = rayleigh(&w);
            if next > est {
                est = next;
                v = w;
            }
        }
        est * scale
    }

    /// Largest entrywise modulus of `self − other`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: Scalar, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (o, &x) in self.data.iter_mut().zip(&other.data) {
            *o += s * x;
        }
    }

    /// `Σ_k s_k · M_k`, all matrices of equal shape.
    pub fn linear_combination(terms: &[(Scalar, &Matrix)]) -> Matrix {
        let (r, c) = terms.first().map_or((0, 0), |(_, m)| m.shape());
        let mut out = Matrix::zeros(r, c);
        for (s, m) in terms {
            assert_eq!(m.shape(), (r, c), "linear_combination shape mismatch");
            for (o, &x) in out.data.iter_mut().zip(&m.data) {
                *o += s * x;
            }
        }
        out
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn powi(&self, n: i64) -> Result<Matrix> {
        let dim = self.require_square("powi")?;
        let base = if n < 0 {
            inverse(self)?
        } else {
            self.clone()
        };
        let mut acc = Matrix::identity(dim);
        for _ in 0..n.unsigned_abs() {
            acc = &base * &acc;
        }
        Ok(acc)
    }

    /// Determinant via LU.
    pub fn det(&self) -> Result<Scalar> {
        self.require_square("det")?;
        match lu_factor(self, 0.0) {
            Ok(f) => Ok(f.det()),
            Err(Error::Singular { .. }) => Ok(ZERO),
            Err(e) => Err(e),
        }
    }
}

pub(crate) fn vec_norm(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Unchecked product; panics on a dimension mismatch. Use [`Matrix::matmul`]
/// when the shapes come from user input.
impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>12.5e}{:+.5e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn naive_product(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = ZERO;
                for k in 0..a.cols() {
                    s += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn identity_product_is_neutral() {
        let a = Matrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(Matrix::identity(2).matmul(&a).unwrap(), a);
    }

    #[test]
    fn example_operator_is_an_involution() {
        let a = Matrix::from_real_rows(&[[5.0, -2.0], [12.0, -5.0]]);
        assert_eq!(&a * &a, Matrix::identity(2));
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(&mut rng, 3, 3);
        let b = random(&mut rng, 3, 3);
        let fast = a.matmul(&b).unwrap();
        let slow = naive_product(&a, &b);
        for (x, y) in fast.entries().iter().zip(slow.entries()) {
            assert!((x - y).norm() <= 1e-13 * y.norm().max(1.0));
        }
    }

    #[test]
    fn product_dimension_mismatch_is_an_error() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Matrix::new(2, 2, vec![ONE; 3]).is_err());
        let err = Matrix::new(2, 2, vec![ONE, ONE, c64(f64::NAN, 0.0), ONE]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 1, col: 0 });
    }

    #[test]
    fn frobenius_of_identity() {
        assert!((Matrix::identity(2).norm_fro() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = Matrix::diag(&[c64(3.0, 0.0), c64(1.0, 0.0)]);
        assert!((d.norm_op2_est(DEFAULT_NORM_ITERS) - 3.0).abs() < 1e-12);
        assert_eq!(Matrix::zeros(3, 3).norm_op2_est(10), 0.0);
    }

    #[test]
    fn spectral_norm_resolves_small_gaps() {
        // σ = 1 and 1 − 1e−3, hidden behind a unitary rotation.
        let d = Matrix::diag(&[c64(1.0 - 1e-3, 0.0), c64(1.0, 0.0), c64(0.5, 0.0)]);
        let s = 0.5f64.sqrt();
        let q = Matrix::from_rows(&[
            [c64(s, 0.0), c64(0.0, s), ZERO],
            [c64(0.0, s), c64(s, 0.0), ZERO],
            [ZERO, ZERO, ONE],
        ]);
        let a = &(&q * &d) * &q.adjoint();
        let est = a.norm_op2_est(DEFAULT_NORM_ITERS);
        assert!((est - 1.0).abs() <= 1e-6, "{est}");
    }

    #[test]
    fn integer_powers() {
        let a = Matrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(a.powi(5).unwrap(), Matrix::from_real_rows(&[[1.0, 5.0], [0.0, 1.0]]));
        let back = a.powi(-3).unwrap();
        assert!(back.dist_fro(&Matrix::from_real_rows(&[[1.0, -3.0], [0.0, 1.0]])) < 1e-14);
        assert_eq!(a.powi(0).unwrap(), Matrix::identity(2));
    }
}
