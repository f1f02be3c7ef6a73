use super::{vec_norm, Matrix, Scalar, ZERO};

/// Orthonormal column basis (`n × k`).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub columns: Matrix,
}

impl Basis {
    pub fn rank(&self) -> usize {
        self.columns.cols()
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    /// `‖BᴴB − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.columns.adjoint().matmul(&self.columns).expect("gram");
        g.dist_fro(&Matrix::identity(self.rank()))
    }
}

/// Output of [`rrqr`].
#[derive(Debug, Clone)]
pub struct RankReveal {
    pub basis: Basis,
    pub rank: usize,
    /// Absolute cut-off `rank_tol · ‖A‖_F` that the pivots were compared against.
    pub threshold: f64,
    /// Residual norms of the accepted pivots, in pivot order.
    pub pivot_norms: Vec<f64>,
    /// Largest residual column norm left when the factorisation stopped.
    pub remaining_norm: f64,
    /// Original column index of each accepted pivot.
    pub pivot_columns: Vec<usize>,
}

impl RankReveal {
    /// True when a pivot decision sits within a factor 10 of the threshold.
    pub fn ambiguous(&self) -> bool {
        if self.threshold == 0.0 {
            return false;
        }
        let near = |x: f64| x > self.threshold / 10.0 && x < self.threshold * 10.0;
        self.pivot_norms.iter().copied().any(near) || near(self.remaining_norm)
    }
}

/// Column-pivoted modified Gram–Schmidt with one reorthogonalisation pass.
///
/// At each step the column with the largest residual norm is taken (lowest
/// index on ties); the factorisation stops when that norm is no larger than
/// `rank_tol · ‖A‖_F`.
pub fn rrqr(a: &Matrix, rank_tol: f64) -> RankReveal {
    let (n, m) = a.shape();
    let threshold = rank_tol * a.norm_fro();
    let mut work: Vec<Vec<Scalar>> = (0..m).map(|j| a.column(j)).collect();
    let mut active: Vec<bool> = vec![true; m];
    let mut q: Vec<Vec<Scalar>> = Vec::new();
    let mut pivot_norms = Vec::new();
    let mut pivot_columns = Vec::new();
    let remaining_norm;

    loop {
        let best = (0..m)
            .filter(|&j| active[j])
            .map(|j| (j, vec_norm(&work[j])))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        let Some((p, norm)) = best else {
            remaining_norm = 0.0;
            break;
        };
        if norm <= threshold || norm == 0.0 || q.len() == n {
            remaining_norm = norm;
            break;
        }
        active[p] = false;
        let mut v: Vec<Scalar> = work[p].iter().map(|z| z / norm).collect();
        // Second Gram–Schmidt pass against the accepted vectors.
        for qk in &q {
            let c = dot(qk, &v);
            for (vi, qi) in v.iter_mut().zip(qk) {
                *vi -= c * qi;
            }
        }
        let vn = vec_norm(&v);
        if vn == 0.0 {
            remaining_norm = norm;
            break;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        for j in 0..m {
            if active[j] {
                let c = dot(&v, &work[j]);
                for (wi, vi) in work[j].iter_mut().zip(&v) {
                    *wi -= c * vi;
                }
            }
        }
        q.push(v);
        pivot_norms.push(norm);
        pivot_columns.push(p);
    }

    let rank = q.len();
    RankReveal {
        basis: Basis {
            columns: Matrix::from_columns(n, &q),
        },
        rank,
        threshold,
        pivot_norms,
        remaining_norm,
        pivot_columns,
    }
}

/// `xᴴy`.
fn dot(x: &[Scalar], y: &[Scalar]) -> Scalar {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}
