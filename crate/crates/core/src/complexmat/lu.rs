use super::{Matrix, Scalar, DEFAULT_PIVOT_TOL, ONE, ZERO};
use crate::error::{Error, Result};

/// Packed LU factors with partial pivoting: `P·A = L·U`, `L` unit lower.
#[derive(Debug, Clone)]
pub struct LuFactors {
    /// Row `i` of `P·A` is row `permutation[i]` of `A`.
    pub permutation: Vec<usize>,
    pub lu: Matrix,
    /// Sign of the permutation, ±1.
    pub parity: i8,
}

/// Factors a square matrix. A pivot smaller than `pivot_tol · ‖A‖_∞` (or an
/// exactly zero pivot) is reported as singular, with the elimination stage.
pub fn lu_factor(a: &Matrix, pivot_tol: f64) -> Result<LuFactors> {
    let n = a.require_square("lu_factor")?;
    let threshold = pivot_tol * a.norm_inf();
    let mut lu = a.clone();
    let mut permutation: Vec<usize> = (0..n).collect();
    let mut parity = 1i8;

    for k in 0..n {
        let (p, pivot_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 || pivot_abs < threshold {
            return Err(Error::Singular {
                stage: k,
                pivot: pivot_abs,
            });
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            permutation.swap(k, p);
            parity = -parity;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
        }
    }
    Ok(LuFactors {
        permutation,
        lu,
        parity,
    })
}

/// Solves `A·X = B` from the factors of `A`.
pub fn solve(f: &LuFactors, b: &Matrix) -> Result<Matrix> {
    f.solve(b)
}

/// Inverse at the default pivot tolerance.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let f = lu_factor(a, DEFAULT_PIVOT_TOL)?;
    f.solve(&Matrix::identity(a.rows()))
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "solve",
                left: (n, n),
                right: b.shape(),
            });
        }
        let m = b.cols();
        let mut x = Matrix::from_fn(n, m, |i, j| b[(self.permutation[i], j)]);
        for col in 0..m {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> Scalar {
        let prod: Scalar = (0..self.dim()).map(|i| self.lu[(i, i)]).product();
        prod * f64::from(self.parity)
    }

    pub fn lower(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => ONE,
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn upper(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { ZERO })
    }

    /// `P·A` for the stored permutation.
    pub fn permute_rows(&self, a: &Matrix) -> Matrix {
        Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(self.permutation[i], j)])
    }

    /// Crude condition estimate `max|u_ii| / min|u_ii|`.
    pub fn pivot_ratio(&self) -> f64 {
        let (lo, hi) = (0..self.dim())
            .map(|i| self.lu[(i, i)].norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
        if self.dim() == 0 {
            1.0
        } else {
            hi / lo
        }
    }
}
