//! Riesz projections by trapezoidal quadrature of the resolvent on a circle.
//!
//! For a circle `w(θ) = c + r·e^{iθ}` traversed counterclockwise,
//!
//! ```text
//! P = (1/2πi) ∮ (wI − T)⁻¹ dw ≈ (1/N) Σ_k r·e^{iθ_k} (w_k I − T)⁻¹,   θ_k = 2πk/N.
//! ```
//!
//! The integrand is analytic and periodic in θ, so the trapezoid rule
//! converges geometrically in `N`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::complexmat::{
    c64, lu_factor, rrqr, Basis, Matrix, Scalar, DEFAULT_PIVOT_TOL, DEFAULT_RANK_TOL,
};
use crate::error::{Error, Result};
use crate::spectrum::SpectrumReport;

/// Default quadrature node count.
pub const DEFAULT_NODES: usize = 64;

/// Radius safety factor applied to half the cluster separation.
const SAFETY: f64 = 0.8;

/// Counterclockwise circle `center + radius·e^{iθ}` sampled at `nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contour {
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub center: Scalar,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: Scalar, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "contour radius must be positive, got {radius}"
            )));
        }
        if nodes < 4 {
            return Err(Error::InvalidArgument(format!(
                "contour needs at least 4 nodes, got {nodes}"
            )));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidArgument("contour center must be finite".into()));
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    /// Unit direction `e^{iθ_k}` of node `k`.
    pub fn direction(&self, k: usize) -> Scalar {
        let theta = 2.0 * PI * k as f64 / self.nodes as f64;
        c64(theta.cos(), theta.sin())
    }

    pub fn point(&self, k: usize) -> Scalar {
        self.center + self.direction(k) * self.radius
    }

    /// Whether `z` lies strictly inside the circle.
    pub fn encloses(&self, z: Scalar) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// A computed spectral projection.
#[derive(Debug, Clone, Serialize)]
pub struct Projection {
    /// Enclosed cluster value.
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub value: Scalar,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub matrix: Matrix,
    /// `‖P² − P‖_F`.
    pub idem_residual: f64,
    pub contour: Contour,
}

impl Projection {
    pub fn trace(&self) -> Scalar {
        self.matrix.trace()
    }
}

/// `(wI − T)⁻¹`.
pub fn resolvent(t: &Matrix, w: Scalar) -> Result<Matrix> {
    let n = t.require_square("resolvent")?;
    let shifted = t.shifted(w).scale(c64(-1.0, 0.0));
    let f = lu_factor(&shifted, DEFAULT_PIVOT_TOL).map_err(|e| match e {
        Error::Singular { .. } => Error::ContourTouchesSpectrum { w },
        other => other,
    })?;
    f.solve(&Matrix::identity(n))
}

/// Riesz projection for the part of the spectrum inside `contour`.
///
/// Node contributions are accumulated in index order. A contour enclosing no
/// eigenvalue is not an error and yields `P ≈ 0`.
pub fn riesz_projection(t: &Matrix, contour: &Contour) -> Result<Projection> {
    let n = t.require_square("riesz_projection")?;
    let weight = 1.0 / contour.nodes as f64;
    let mut acc = Matrix::zeros(n, n);
    for k in 0..contour.nodes {
        let r = resolvent(t, contour.point(k))?;
        let coef = contour.direction(k) * (contour.radius * weight);
        acc.axpy(coef, &r);
    }
    let idem_residual = (&acc * &acc).dist_fro(&acc);
    Ok(Projection {
        value: contour.center,
        matrix: acc,
        idem_residual,
        contour: *contour,
    })
}

/// Circle isolating cluster `j` of `report`.
///
/// Center is the cluster center. With a single cluster the radius is the
/// cluster spread plus one; otherwise it is
/// `max(2·spread, 0.8·separation/2)`, and the contour is rejected when the
/// separation is within `10·gap` or the radius would reach another cluster.
pub fn auto_contour(report: &SpectrumReport, j: usize, nodes: usize) -> Result<Contour> {
    let count = report.clusters.len();
    let cl = report
        .clusters
        .get(j)
        .ok_or(Error::NoSuchCluster { index: j, count })?;
    let spread = cl.spread();
    let radius = match cl.separation {
        None => spread + 1.0,
        Some(sep) => {
            if sep <= 10.0 * report.gap {
                return Err(Error::ClustersTooClose {
                    separation: sep,
                    gap: report.gap,
                });
            }
            let radius = (2.0 * spread).max(SAFETY * sep / 2.0);
            if radius >= sep {
                return Err(Error::ClustersTooClose {
                    separation: sep,
                    gap: report.gap,
                });
            }
            radius
        }
    };
    Contour::new(cl.center, radius, nodes)
}

/// Orthonormal basis of a subspace with the rank-decision flag.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub basis: Basis,
    /// A pivot fell within a factor 10 of the rank threshold.
    pub ambiguous: bool,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.rank()
    }
}

/// Basis of `range(P)`, the eigenspace for the enclosed value.
pub fn eigenspace(p: &Projection, rank_tol: f64) -> Subspace {
    let r = rrqr(&p.matrix, rank_tol);
    Subspace {
        ambiguous: r.ambiguous(),
        basis: r.basis,
    }
}

/// Basis of `ker(P) = range(I − P)`, the invariant complement.
pub fn complement(p: &Projection, rank_tol: f64) -> Subspace {
    let n = p.matrix.rows();
    let r = rrqr(&(&Matrix::identity(n) - &p.matrix), rank_tol);
    Subspace {
        ambiguous: r.ambiguous(),
        basis: r.basis,
    }
}

/// Residuals of the eigenspace / invariant-complement structure.
#[derive(Debug, Clone, Serialize)]
pub struct KrReport {
    /// `‖T·B − λ·B‖_F` for an orthonormal basis `B` of `range(P)`.
    pub eigen_residual: f64,
    /// `‖(I − P)·T·P‖_F`.
    pub range_invariance_residual: f64,
    /// `‖P·T·(I − P)‖_F`.
    pub kernel_invariance_residual: f64,
    /// `‖P² − P‖_F`.
    pub direct_sum_residual: f64,
    pub range_dim: usize,
    pub complement_dim: usize,
    pub rank_ambiguous: bool,
    pub pass: bool,
}

impl KrReport {
    pub fn max_residual(&self) -> f64 {
        self.eigen_residual
            .max(self.range_invariance_residual)
            .max(self.kernel_invariance_residual)
            .max(self.direct_sum_residual)
    }
}

/// Checks that `range(P)` is the `λ`-eigenspace and `ker(P)` an invariant
/// complement. Passes iff every residual is at most `tol · max(1, ‖T‖_F)`.
pub fn verify_kr(t: &Matrix, lambda: Scalar, p: &Projection, tol: f64) -> Result<KrReport> {
    let n = t.require_square("verify_kr")?;
    if p.matrix.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "verify_kr",
            left: t.shape(),
            right: p.matrix.shape(),
        });
    }
    let pm = &p.matrix;
    let q = &Matrix::identity(n) - pm;
    let range = eigenspace(p, DEFAULT_RANK_TOL);
    let kernel = complement(p, DEFAULT_RANK_TOL);
    let b = &range.basis.columns;
    let eigen_residual = (&(t * b) - &b.scale(lambda)).norm_fro();
    let tp = t * pm;
    let range_invariance_residual = (&q * &tp).norm_fro();
    let kernel_invariance_residual = (&(pm * t) * &q).norm_fro();
    let direct_sum_residual = (pm * pm).dist_fro(pm);
    let bound = tol * t.norm_fro().max(1.0);
    let mut report = KrReport {
        eigen_residual,
        range_invariance_residual,
        kernel_invariance_residual,
        direct_sum_residual,
        range_dim: range.dim(),
        complement_dim: kernel.dim(),
        rank_ambiguous: range.ambiguous || kernel.ambiguous,
        pass: false,
    };
    report.pass = report.max_residual() <= bound;
    Ok(report)
}
