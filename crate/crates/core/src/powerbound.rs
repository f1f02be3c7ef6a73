//! Power-boundedness diagnostics, the similarity to a diagonal unimodular
//! operator, and seeded generators for bounded and defective test operators.
//!
//! `sup_{n∈ℤ} ‖Tⁿ‖` cannot be observed directly, so [`power_profile`] records
//! `‖Tⁿ‖₂` on a finite two-sided horizon and [`diagnose`] classifies the growth
//! of its running supremum by regressing it against both `log n` and `n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::complexmat::{c64, inverse, Matrix, Scalar, DEFAULT_NORM_ITERS, DEFAULT_RANK_TOL};
use crate::decompose::{certify, Settings, Verdict, MIN_VALUE_SEPARATION};
use crate::error::{Error, Result};
use crate::riesz::eigenspace;

pub const DEFAULT_HORIZON: usize = 256;
pub const DEFAULT_GROWTH_TOL: f64 = 2.0;
pub const DEFAULT_COND_CAP: f64 = 100.0;
/// Profile entries above this are treated as an exponential escape.
pub const ESCAPE_NORM: f64 = 1e100;
/// Rejection-sampling budget for random bases.
pub const MAX_BASIS_DRAWS: usize = 100;

const SEMILOG_SLOPE_MAX: f64 = 0.01;
const BOUNDED_LOGLOG_SLOPE_MAX: f64 = 0.25;
const POLYNOMIAL_LOGLOG_SLOPE_MIN: f64 = 0.5;

/// `‖Tⁿ‖₂` estimates for `n = 0..=horizon` in both directions.
#[derive(Debug, Clone, Serialize)]
pub struct PowerProfile {
    pub horizon: usize,
    /// `forward[k] = ‖T^k‖`; `forward[0] = 1`.
    pub forward: Vec<f64>,
    /// `backward[k] = ‖T^{−k}‖`; `backward[0] = 1`.
    pub backward: Vec<f64>,
    pub sup_observed: f64,
    /// A direction was cut short after exceeding [`ESCAPE_NORM`].
    pub escaped: bool,
}

impl PowerProfile {
    /// `‖Tⁿ‖` if it was recorded.
    pub fn norm(&self, n: i64) -> Option<f64> {
        let k = n.unsigned_abs() as usize;
        if n >= 0 {
            self.forward.get(k).copied()
        } else {
            self.backward.get(k).copied()
        }
    }

    /// `(n, ‖Tⁿ‖)` in ascending `n`.
    pub fn norms(&self) -> Vec<(i64, f64)> {
        let back = self
            .backward
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .map(|(k, &x)| (-(k as i64), x));
        let fwd = self.forward.iter().enumerate().map(|(k, &x)| (k as i64, x));
        back.chain(fwd).collect()
    }
}

/// Norm profile over `n = −horizon..=horizon`, via sequential products with
/// `T` and `T⁻¹`.
pub fn power_profile(t: &Matrix, horizon: usize) -> Result<PowerProfile> {
    let n = t.require_square("power_profile")?;
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let inv = inverse(t).map_err(|e| match e {
        Error::Singular { .. } => Error::SingularOperator,
        other => other,
    })?;
    let mut escaped = false;
    let mut walk = |step: &Matrix| -> Vec<f64> {
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(1.0);
        let mut power = Matrix::identity(n);
        for _ in 0..horizon {
            power = step * &power;
            let norm = power.norm_op2_est(DEFAULT_NORM_ITERS);
            if !(norm <= ESCAPE_NORM) {
                escaped = true;
                break;
            }
            out.push(norm);
        }
        out
    };
    let forward = walk(t);
    let backward = walk(&inv);
    let sup_observed = forward
        .iter()
        .chain(&backward)
        .copied()
        .fold(0.0, f64::max);
    Ok(PowerProfile {
        horizon,
        forward,
        backward,
        sup_observed,
        escaped,
    })
}

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

fn fit_line(points: &[(f64, f64)]) -> LineFit {
    let m = points.len() as f64;
    if points.len() < 2 {
        let y = points.first().map_or(0.0, |p| p.1);
        return LineFit {
            slope: 0.0,
            intercept: y,
            rss: 0.0,
        };
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        rss,
    }
}

/// Both regressions for one direction of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionFit {
    /// `log M(n)` against `log n`.
    pub loglog: LineFit,
    /// `log M(n)` against `n`.
    pub semilog: LineFit,
    pub samples: usize,
}

/// Running supremum `M(n) = max_{k≤n} ‖T^{±k}‖` regressed over `n ∈ [N/4, N]`
/// (or over everything recorded when the direction escaped early).
fn fit_direction(norms: &[f64], horizon: usize) -> DirectionFit {
    let mut envelope = Vec::with_capacity(norms.len());
    let mut running = 0.0f64;
    for &x in norms {
        running = running.max(x);
        envelope.push(running);
    }
    let start = if envelope.len() > horizon { (horizon / 4).max(1) } else { 1 };
    let window: Vec<(usize, f64)> = envelope
        .iter()
        .enumerate()
        .skip(start)
        .map(|(k, &m)| (k, m.ln()))
        .collect();
    let loglog: Vec<(f64, f64)> = window.iter().map(|&(k, y)| ((k as f64).ln(), y)).collect();
    let semilog: Vec<(f64, f64)> = window.iter().map(|&(k, y)| (k as f64, y)).collect();
    DirectionFit {
        loglog: fit_line(&loglog),
        semilog: fit_line(&semilog),
        samples: window.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum GrowthClass {
    Bounded,
    Polynomial { degree: f64 },
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEvidence {
    pub forward: DirectionFit,
    pub backward: DirectionFit,
    /// Largest norm with `|n| ≤ N/4`.
    pub quartile_max: f64,
    pub sup_observed: f64,
    pub growth_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerVerdict {
    pub bounded: bool,
    pub growth_class: GrowthClass,
    pub evidence: GrowthEvidence,
}

/// Classifies the growth of a profile.
///
/// Bounded iff the supremum is within `growth_tol` of the first-quartile
/// maximum and, in both directions, the running supremum has log-log slope at
/// most 0.25 and semilog slope at most 0.01. Otherwise the faster-growing
/// direction decides: polynomial (degree = log-log slope) when that slope is at
/// least 0.5 and either the semilog slope is at most 0.01 or the log-log line
/// fits better; exponential (rate = semilog slope) otherwise.
pub fn diagnose(profile: &PowerProfile, growth_tol: f64) -> Result<PowerVerdict> {
    if profile.horizon < 16 {
        return Err(Error::InvalidArgument(format!(
            "diagnosis needs a horizon of at least 16, got {}",
            profile.horizon
        )));
    }
    let forward = fit_direction(&profile.forward, profile.horizon);
    let backward = fit_direction(&profile.backward, profile.horizon);
    let quarter = profile.horizon / 4;
    let quartile_max = profile
        .forward
        .iter()
        .take(quarter + 1)
        .chain(profile.backward.iter().take(quarter + 1))
        .copied()
        .fold(0.0, f64::max);

    let flat = |f: &DirectionFit| {
        f.loglog.slope <= BOUNDED_LOGLOG_SLOPE_MAX && f.semilog.slope <= SEMILOG_SLOPE_MAX
    };
    let bounded = !profile.escaped
        && profile.sup_observed <= growth_tol * quartile_max
        && flat(&forward)
        && flat(&backward);

    let growth_class = if bounded {
        GrowthClass::Bounded
    } else {
        let dominant = if forward.semilog.slope >= backward.semilog.slope {
            &forward
        } else {
            &backward
        };
        let polynomial = !profile.escaped
            && dominant.loglog.slope >= POLYNOMIAL_LOGLOG_SLOPE_MIN
            && (dominant.semilog.slope <= SEMILOG_SLOPE_MAX
                || dominant.loglog.rss <= dominant.semilog.rss);
        if polynomial {
            GrowthClass::Polynomial {
                degree: dominant.loglog.slope,
            }
        } else {
            GrowthClass::Exponential {
                rate: dominant.semilog.slope,
            }
        }
    };

    Ok(PowerVerdict {
        bounded,
        growth_class,
        evidence: GrowthEvidence {
            forward,
            backward,
            quartile_max,
            sup_observed: profile.sup_observed,
            growth_tol,
        },
    })
}

/// `T = V·D·V⁻¹` with `D` diagonal.
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityPair {
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub v: Matrix,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub d: Matrix,
    /// `‖V⁻¹·T·V − D‖_F`.
    pub residual: f64,
    /// `‖V‖₂·‖V⁻¹‖₂`.
    pub cond_estimate: f64,
}

/// Builds `V` from the eigenspace bases of the spectral projections and `D`
/// from the corresponding cluster values. Refuses operators whose certificate
/// is not decomposable.
pub fn sznagy_similarity(t: &Matrix, settings: &Settings) -> Result<SimilarityPair> {
    let n = t.require_square("sznagy_similarity")?;
    let cert = certify(t, settings)?;
    if cert.verdict != Verdict::Decomposable {
        let names: Vec<String> = cert
            .failures()
            .iter()
            .map(|(name, v)| format!("{name}={v:e}"))
            .collect();
        return Err(Error::NotDecomposable(names.join(", ")));
    }
    let mut columns = Vec::with_capacity(n);
    let mut diagonal = Vec::with_capacity(n);
    for p in &cert.bundle.projections {
        let sub = eigenspace(p, DEFAULT_RANK_TOL);
        for j in 0..sub.dim() {
            columns.push(sub.basis.columns.column(j));
            diagonal.push(p.value);
        }
    }
    if columns.len() != n {
        return Err(Error::NotDecomposable(format!(
            "eigenspace dimensions sum to {} instead of {n}",
            columns.len()
        )));
    }
    let v = Matrix::from_columns(n, &columns);
    let v_inv = inverse(&v)?;
    let d = Matrix::diag(&diagonal);
    let residual = (&(&v_inv * t) * &v).dist_fro(&d);
    let cond_estimate = v.norm_op2_est(DEFAULT_NORM_ITERS) * v_inv.norm_op2_est(DEFAULT_NORM_ITERS);
    Ok(SimilarityPair {
        v,
        d,
        residual,
        cond_estimate,
    })
}

/// Planted structure of a generated operator.
#[derive(Debug, Clone, Serialize)]
pub struct GroundTruth {
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub basis: Matrix,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub basis_inverse: Matrix,
    /// Diagonal of `D`.
    #[serde(serialize_with = "crate::report::ser_scalars")]
    pub diagonal: Vec<Scalar>,
    /// Distinct values, in the order given.
    #[serde(serialize_with = "crate::report::ser_scalars")]
    pub values: Vec<Scalar>,
    pub multiplicities: Vec<usize>,
    /// `V·E_j·V⁻¹` for the coordinate projection `E_j` of each value.
    #[serde(serialize_with = "crate::report::ser_matrices")]
    pub projections: Vec<Matrix>,
    pub cond_estimate: f64,
}

fn unit(z: Scalar) -> Result<Scalar> {
    let r = z.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("value {z} cannot be normalised")));
    }
    Ok(z / r)
}

fn cond_estimate(v: &Matrix, v_inv: &Matrix) -> f64 {
    v.norm_op2_est(DEFAULT_NORM_ITERS) * v_inv.norm_op2_est(DEFAULT_NORM_ITERS)
}

/// Rejection-samples a complex Gaussian basis with condition estimate at most `cond_cap`.
pub fn random_basis(n: usize, cond_cap: f64, rng: &mut ChaCha8Rng) -> Result<(Matrix, Matrix, f64)> {
    if !(cond_cap >= 1.0) {
        return Err(Error::InvalidArgument(format!("cond_cap must be >= 1, got {cond_cap}")));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..MAX_BASIS_DRAWS {
        let v = Matrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            c64(re * scale, im * scale)
        });
        let Ok(v_inv) = inverse(&v) else { continue };
        let cond = cond_estimate(&v, &v_inv);
        if cond <= cond_cap {
            return Ok((v, v_inv, cond));
        }
    }
    Err(Error::CondCapUnsatisfied {
        cap: cond_cap,
        attempts: MAX_BASIS_DRAWS,
    })
}

/// `T = V·D·V⁻¹` for a given basis. Values are normalised to modulus one and
/// must be distinct; multiplicities must sum to the dimension of `V`.
///
/// `T` is assembled as `λ₀I + V·(D − λ₀I)·V⁻¹` with `λ₀` the first value,
/// which is the same operator but exactly `λ₀I` when `D` is scalar.
pub fn power_bounded_from_basis(
    v: &Matrix,
    values: &[(Scalar, usize)],
) -> Result<(Matrix, GroundTruth)> {
    let n = v.require_square("power_bounded_from_basis")?;
    let total: usize = values.iter().map(|(_, m)| m).sum();
    if total != n || values.iter().any(|(_, m)| *m == 0) {
        return Err(Error::InvalidArgument(format!(
            "multiplicities must be positive and sum to {n}, got {total}"
        )));
    }
    let units = values
        .iter()
        .map(|(z, _)| unit(*z))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            let distance = (units[i] - units[j]).norm();
            if distance <= MIN_VALUE_SEPARATION {
                return Err(Error::CoincidentValues { i, j, distance });
            }
        }
    }
    let v_inv = inverse(v)?;
    let multiplicities: Vec<usize> = values.iter().map(|(_, m)| *m).collect();
    let diagonal: Vec<Scalar> = units
        .iter()
        .zip(&multiplicities)
        .flat_map(|(&z, &m)| std::iter::repeat_n(z, m))
        .collect();

    let anchor = units[0];
    let shifted_d = Matrix::diag(&diagonal.iter().map(|z| z - anchor).collect::<Vec<_>>());
    let t = &Matrix::scalar(n, anchor) + &(&(v * &shifted_d) * &v_inv);

    let mut projections = Vec::with_capacity(units.len());
    let mut offset = 0;
    for &m in &multiplicities {
        let left = Matrix::from_fn(n, m, |i, j| v[(i, offset + j)]);
        let right = Matrix::from_fn(m, n, |i, j| v_inv[(offset + i, j)]);
        projections.push(&left * &right);
        offset += m;
    }
    let cond = cond_estimate(v, &v_inv);
    Ok((
        t,
        GroundTruth {
            basis: v.clone(),
            basis_inverse: v_inv,
            diagonal,
            values: units,
            multiplicities,
            projections,
            cond_estimate: cond,
        },
    ))
}

/// Seeded power-bounded operator with planted unimodular spectrum.
pub fn gen_power_bounded(
    n: usize,
    values: &[(Scalar, usize)],
    cond_cap: f64,
    seed: u64,
) -> Result<(Matrix, GroundTruth)> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (v, _, _) = random_basis(n, cond_cap, &mut rng)?;
    power_bounded_from_basis(&v, values)
}

/// Planted structure of a generated defective operator.
#[derive(Debug, Clone, Serialize)]
pub struct DefectiveTruth {
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub basis: Matrix,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub jordan: Matrix,
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub value: Scalar,
}

/// `V·J·V⁻¹` for a single Jordan block `J` at `value` (normalised to modulus one).
pub fn defective_from_basis(v: &Matrix, value: Scalar) -> Result<(Matrix, DefectiveTruth)> {
    let n = v.require_square("defective_from_basis")?;
    if n < 2 {
        return Err(Error::InvalidArgument("a Jordan block needs n >= 2".into()));
    }
    let value = unit(value)?;
    let mut j = Matrix::scalar(n, value);
    for i in 0..n - 1 {
        j[(i, i + 1)] = c64(1.0, 0.0);
    }
    let v_inv = inverse(v)?;
    let t = &(v * &j) * &v_inv;
    Ok((
        t,
        DefectiveTruth {
            basis: v.clone(),
            jordan: j,
            value,
        },
    ))
}

/// Seeded conjugated Jordan block: unimodular spectrum, not power-bounded.
/// The basis is drawn with condition estimate at most `100·n`.
pub fn gen_defective(n: usize, value: Scalar, seed: u64) -> Result<(Matrix, DefectiveTruth)> {
    if n < 2 {
        return Err(Error::InvalidArgument("a Jordan block needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (v, _, _) = random_basis(n, DEFAULT_COND_CAP * n as f64, &mut rng)?;
    defective_from_basis(&v, value)
}
