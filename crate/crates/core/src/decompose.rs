//! Finite-spectrum decomposition `T = Σ λ_j P_j` and its certificate.
//!
//! The projections are the Riesz projections of the spectral clusters. They are
//! cross-checked against the polynomial (Lagrange) projections
//! `P_j = Π_{i≠j}(T − λ_i I) / Π_{i≠j}(λ_j − λ_i)` and the annihilation
//! `Π_j (T − λ_j I) = 0`. Agreement of the two routes is the computable form of
//! uniqueness of the decomposition.

use serde::Serialize;

use crate::complexmat::{c64, lu_factor, Matrix, Scalar, DEFAULT_PIVOT_TOL};
use crate::error::{Error, Result};
use crate::riesz::{auto_contour, riesz_projection, verify_kr, KrReport, Projection, DEFAULT_NODES};
use crate::spectrum::{argument_order, unimodularity_check, SpectrumReport};

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Minimum pairwise distance accepted by [`lagrange_projections`].
pub const MIN_VALUE_SEPARATION: f64 = 1e-10;

/// Numerical knobs shared by the decomposition entry points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    /// Clustering gap; `None` means `1e−6 · max(1, ‖T‖_F)`.
    pub gap: Option<f64>,
    pub nodes: usize,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            gap: None,
            nodes: DEFAULT_NODES,
            tol: DEFAULT_TOL,
        }
    }
}

impl Settings {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }
}

/// One Riesz projection per cluster plus the identities they should satisfy.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionBundle {
    pub spectrum: SpectrumReport,
    pub projections: Vec<Projection>,
    /// `‖Σ_j P_j − I‖_F`.
    pub resolution_residual: f64,
    /// `max_{i≠j} ‖P_i P_j‖_F`.
    pub orthogonality_residual: f64,
    /// `‖T − Σ_j λ_j P_j‖_F`.
    pub reconstruction_residual: f64,
    /// `max_j ‖T P_j − P_j T‖_F`.
    pub commutation_residual: f64,
}

impl ProjectionBundle {
    pub fn values(&self) -> Vec<Scalar> {
        self.projections.iter().map(|p| p.value).collect()
    }

    pub fn matrices(&self) -> Vec<&Matrix> {
        self.projections.iter().map(|p| &p.matrix).collect()
    }

    /// `Σ_j λ_j^k P_j`.
    pub fn functional_power(&self, k: i32) -> Matrix {
        let terms: Vec<(Scalar, &Matrix)> = self
            .projections
            .iter()
            .map(|p| (p.value.powi(k), &p.matrix))
            .collect();
        Matrix::linear_combination(&terms)
    }

    /// Eigenspace / invariant-complement residuals for every projection.
    pub fn kr_reports(&self, t: &Matrix, tol: f64) -> Result<Vec<KrReport>> {
        self.projections
            .iter()
            .map(|p| verify_kr(t, p.value, p, tol))
            .collect()
    }
}

fn require_invertible(t: &Matrix) -> Result<usize> {
    let n = t.require_square("spectral_decomposition")?;
    match lu_factor(t, DEFAULT_PIVOT_TOL) {
        Ok(_) => Ok(n),
        Err(Error::Singular { .. }) => Err(Error::SingularOperator),
        Err(e) => Err(e),
    }
}

/// Riesz projections for every spectral cluster of an invertible `T`.
pub fn spectral_decomposition(t: &Matrix, settings: &Settings) -> Result<ProjectionBundle> {
    let n = require_invertible(t)?;
    let spectrum = SpectrumReport::analyze(t, settings.gap)?;
    if spectrum
        .clusters
        .iter()
        .any(|c| c.center.norm() <= spectrum.gap)
    {
        return Err(Error::SingularOperator);
    }

    let mut projections = Vec::with_capacity(spectrum.clusters.len());
    for j in 0..spectrum.clusters.len() {
        let contour = auto_contour(&spectrum, j, settings.nodes)?;
        projections.push(riesz_projection(t, &contour)?);
    }

    let identity = Matrix::identity(n);
    let mut sum = Matrix::zeros(n, n);
    let mut recon = Matrix::zeros(n, n);
    for p in &projections {
        sum.axpy(c64(1.0, 0.0), &p.matrix);
        recon.axpy(p.value, &p.matrix);
    }
    let mut orthogonality_residual = 0.0f64;
    for (i, pi) in projections.iter().enumerate() {
        for (j, pj) in projections.iter().enumerate() {
            if i != j {
                orthogonality_residual =
                    orthogonality_residual.max((&pi.matrix * &pj.matrix).norm_fro());
            }
        }
    }
    let commutation_residual = projections
        .iter()
        .map(|p| (t * &p.matrix).dist_fro(&(&p.matrix * t)))
        .fold(0.0, f64::max);

    Ok(ProjectionBundle {
        resolution_residual: sum.dist_fro(&identity),
        orthogonality_residual,
        reconstruction_residual: recon.dist_fro(t),
        commutation_residual,
        spectrum,
        projections,
    })
}

fn check_distinct(values: &[Scalar]) -> Result<()> {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let distance = (values[i] - values[j]).norm();
            if distance <= MIN_VALUE_SEPARATION {
                return Err(Error::CoincidentValues { i, j, distance });
            }
        }
    }
    Ok(())
}

/// `P_j = Π_{i≠j}(T − λ_i I) / Π_{i≠j}(λ_j − λ_i)` for each value, in input order.
pub fn lagrange_projections(t: &Matrix, values: &[Scalar]) -> Result<Vec<Matrix>> {
    let n = t.require_square("lagrange_projections")?;
    check_distinct(values)?;
    let out = values
        .iter()
        .enumerate()
        .map(|(j, &lj)| {
            let mut num = Matrix::identity(n);
            let mut den = c64(1.0, 0.0);
            for (i, &li) in values.iter().enumerate() {
                if i != j {
                    num = &num * &t.shifted(li);
                    den *= lj - li;
                }
            }
            num.scale(den.inv())
        })
        .collect();
    Ok(out)
}

/// Normalised annihilation residual
/// `‖Π_j (T − λ_j I)‖_F / Π_j (‖T‖_F + |λ_j|)`,
/// with factors multiplied left to right in ascending argument of `λ_j`.
pub fn algebraic_certificate(t: &Matrix, values: &[Scalar]) -> Result<f64> {
    let n = t.require_square("algebraic_certificate")?;
    if values.is_empty() {
        return Err(Error::InvalidArgument("algebraic certificate needs at least one value".into()));
    }
    let mut ordered = values.to_vec();
    ordered.sort_by(argument_order);
    let tn = t.norm_fro();
    let mut prod = Matrix::identity(n);
    let mut denom = 1.0;
    for &l in &ordered {
        prod = &prod * &t.shifted(l);
        denom *= tn + l.norm();
    }
    Ok(prod.norm_fro() / denom)
}

/// Result of the single-point (scalar operator) check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GelfandCheck {
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub center: Scalar,
    /// `‖T − λ̄ I‖_F` for the cluster center `λ̄`.
    pub gelfand_residual: f64,
    /// `||λ̄| − 1|`.
    pub unimodular_deviation: f64,
}

/// For an operator whose spectrum is a single cluster, measures how far it is
/// from the scalar operator at the cluster center.
pub fn gelfand_check(t: &Matrix, settings: &Settings) -> Result<GelfandCheck> {
    t.require_square("gelfand_check")?;
    let spectrum = SpectrumReport::analyze(t, settings.gap)?;
    if spectrum.clusters.len() != 1 {
        return Err(Error::MultipleClusters {
            count: spectrum.clusters.len(),
        });
    }
    let center = spectrum.clusters[0].center;
    Ok(GelfandCheck {
        center,
        gelfand_residual: t.shifted(center).norm_fro(),
        unimodular_deviation: (center.norm() - 1.0).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Decomposable,
    NotDecomposable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Decomposable => "decomposable",
            Verdict::NotDecomposable => "not-decomposable",
        }
    }
}

/// Every identity of the finite-spectrum characterisation, measured on one operator.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub algebraic_residual: f64,
    /// `max_j ‖P_j^{Lagrange} − P_j^{Riesz}‖_F`.
    pub lagrange_agreement: f64,
    /// Present only when the spectrum is a single cluster.
    pub gelfand_residual: Option<f64>,
    /// `max_j ||λ_j| − 1|` over all computed eigenvalues.
    pub unimodular_deviation: f64,
    pub resolution_residual: f64,
    pub orthogonality_residual: f64,
    pub reconstruction_residual: f64,
    /// `tol · max(1, ‖T‖_F)`, the bound every residual is held to.
    pub threshold: f64,
    pub verdict: Verdict,
    pub bundle: ProjectionBundle,
    #[serde(serialize_with = "crate::report::ser_matrices")]
    pub lagrange: Vec<Matrix>,
}

impl Certificate {
    /// Named residuals in a fixed order.
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("algebraic", self.algebraic_residual),
            ("lagrange_agreement", self.lagrange_agreement),
            ("orthogonality", self.orthogonality_residual),
            ("reconstruction", self.reconstruction_residual),
            ("resolution", self.resolution_residual),
            ("unimodular_deviation", self.unimodular_deviation),
        ];
        if let Some(g) = self.gelfand_residual {
            out.push(("gelfand", g));
        }
        out
    }

    /// Residuals above the threshold.
    pub fn failures(&self) -> Vec<(&'static str, f64)> {
        self.residuals()
            .into_iter()
            .filter(|(_, v)| !(*v <= self.threshold))
            .collect()
    }
}

/// Runs the decomposition, the Lagrange cross-check, the annihilation
/// certificate and the unimodularity check. The verdict is `decomposable` iff
/// every residual is at most `tol · max(1, ‖T‖_F)`.
pub fn certify(t: &Matrix, settings: &Settings) -> Result<Certificate> {
    let bundle = spectral_decomposition(t, settings)?;
    let values = bundle.values();
    let lagrange = lagrange_projections(t, &values)?;
    let lagrange_agreement = lagrange
        .iter()
        .zip(&bundle.projections)
        .map(|(l, p)| l.dist_fro(&p.matrix))
        .fold(0.0, f64::max);
    let algebraic_residual = algebraic_certificate(t, &values)?;
    let gelfand_residual = (values.len() == 1).then(|| t.shifted(values[0]).norm_fro());
    let unimodular_deviation = unimodularity_check(&bundle.spectrum.eigenvalues, 0.0).max_deviation;
    let threshold = settings.tol * t.norm_fro().max(1.0);

    let mut cert = Certificate {
        algebraic_residual,
        lagrange_agreement,
        gelfand_residual,
        unimodular_deviation,
        resolution_residual: bundle.resolution_residual,
        orthogonality_residual: bundle.orthogonality_residual,
        reconstruction_residual: bundle.reconstruction_residual,
        threshold,
        verdict: Verdict::NotDecomposable,
        bundle,
        lagrange,
    };
    if cert.failures().is_empty() {
        cert.verdict = Verdict::Decomposable;
    }
    Ok(cert)
}
