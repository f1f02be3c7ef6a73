//! Eigenvalues of dense complex matrices and their grouping into isolated
//! clusters.
//!
//! Eigenvalues come from Householder reduction to Hessenberg form followed by
//! single-shift complex QR with Wilkinson shifts and deflation. Clusters are
//! single-linkage components at a given gap; the cluster is what the rest of
//! the crate treats as an isolated spectral point.

use std::cmp::Ordering;

use serde::Serialize;

use crate::complexmat::{c64, Matrix, Scalar, ZERO};
use crate::error::{Error, Result};

/// Default QR sweep budget per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 30;

/// Default clustering gap, `1e−6 · max(1, ‖A‖_F)`.
pub fn default_gap(a: &Matrix) -> f64 {
    1e-6 * a.norm_fro().max(1.0)
}

/// An isolated group of eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Arithmetic mean of the members.
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub center: Scalar,
    #[serde(serialize_with = "crate::report::ser_scalars")]
    pub members: Vec<Scalar>,
    pub multiplicity: usize,
    /// Distance from the center to the nearest non-member eigenvalue; `None`
    /// when this is the only cluster.
    pub separation: Option<f64>,
}

impl Cluster {
    /// Largest distance from the center to a member.
    pub fn spread(&self) -> f64 {
        self.members
            .iter()
            .map(|z| (z - self.center).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "crate::report::ser_scalars")]
    pub eigenvalues: Vec<Scalar>,
    pub clusters: Vec<Cluster>,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnimodularCheck {
    pub pass: bool,
    pub max_deviation: f64,
}

impl SpectrumReport {
    /// Eigenvalues and clusters of `a`; `gap` defaults to [`default_gap`].
    pub fn analyze(a: &Matrix, gap: Option<f64>) -> Result<Self> {
        let n = a.require_square("spectrum")?;
        let gap = gap.unwrap_or_else(|| default_gap(a));
        let eigenvalues = eigenvalues(a, SWEEPS_PER_DIM * n.max(1))?;
        let clusters = cluster(&eigenvalues, gap)?;
        Ok(Self {
            eigenvalues,
            clusters,
            gap,
        })
    }

    pub fn unimodularity(&self, tol: f64) -> UnimodularCheck {
        unimodularity_check(&self.eigenvalues, tol)
    }

    pub fn centers(&self) -> Vec<Scalar> {
        self.clusters.iter().map(|c| c.center).collect()
    }
}

/// Householder reduction to upper Hessenberg form.
pub fn hessenberg(a: &Matrix) -> Result<Matrix> {
    let n = a.require_square("hessenberg")?;
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Scalar> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);

        // H ← (I − 2vvᴴ) H on rows k+1..n.
        for j in 0..n {
            let s: Scalar = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= 2.0 * vi * s;
            }
        }
        // H ← H (I − 2vvᴴ) on columns k+1..n.
        for i in 0..n {
            let s: Scalar = v
                .iter()
                .enumerate()
                .map(|(t, vi)| h[(i, k + 1 + t)] * vi)
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= 2.0 * s * vi.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(h)
}

/// All `n` eigenvalues, with algebraic multiplicity.
///
/// `max_sweeps` bounds the total number of QR sweeps over all deflations.
pub fn eigenvalues(a: &Matrix, max_sweeps: usize) -> Result<Vec<Scalar>> {
    let n = a.require_square("eigenvalues")?;
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let mut h = hessenberg(a)?;
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let scale = h.norm_fro();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    loop {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eig[hi] = h[(hi, hi)];
            since_deflation = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { lo, hi, sweeps: max_sweeps });
        }

        let shift = if since_deflation.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + c64(0.75, 0.5) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Scalar {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (m1, m2) = (mid + disc, mid - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// One explicitly shifted QR step on the active block `lo..=hi`.
fn qr_sweep(h: &mut Matrix, lo: usize, hi: usize, shift: Scalar) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c * x + s * y;
            h[(k + 1, j)] = -s.conj() * x + c * y;
        }
        h[(k + 1, k)] = ZERO;
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Rotation `[[c, s], [−s̄, c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Scalar, b: Scalar) -> (f64, Scalar) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, c64(1.0, 0.0));
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// Angle in `(−π, π]` with rounding-level imaginary parts snapped to zero,
/// so `1 − 1e−17i` and `−1 − 1e−17i` sort like `1` and `−1`.
pub fn argument_key(z: Scalar) -> f64 {
    let im = if z.im.abs() <= 1e-12 * z.norm() { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// Canonical ordering: ascending argument, then ascending modulus.
pub fn argument_order(a: &Scalar, b: &Scalar) -> Ordering {
    argument_key(*a)
        .total_cmp(&argument_key(*b))
        .then(a.norm().total_cmp(&b.norm()))
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

/// Single-linkage clustering: two values share a cluster iff they are joined
/// by a chain of pairwise distances `< gap`. Clusters and their members come
/// out in [`argument_order`].
pub fn cluster(eigs: &[Scalar], gap: f64) -> Result<Vec<Cluster>> {
    if !(gap > 0.0) {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
    }
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() < gap {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }

    let mut clusters: Vec<(Vec<usize>, Cluster)> = groups
        .into_iter()
        .map(|idx| {
            let mut members: Vec<Scalar> = idx.iter().map(|&i| eigs[i]).collect();
            members.sort_by(argument_order);
            let center = members.iter().sum::<Scalar>() / members.len() as f64;
            let multiplicity = members.len();
            (
                idx,
                Cluster {
                    center,
                    members,
                    multiplicity,
                    separation: None,
                },
            )
        })
        .collect();

    if clusters.len() > 1 {
        for (idx, c) in clusters.iter_mut() {
            let sep = (0..n)
                .filter(|i| !idx.contains(i))
                .map(|i| (eigs[i] - c.center).norm())
                .fold(f64::INFINITY, f64::min);
            c.separation = Some(sep);
        }
    }
    let mut clusters: Vec<Cluster> = clusters.into_iter().map(|(_, c)| c).collect();
    clusters.sort_by(|a, b| argument_order(&a.center, &b.center));
    Ok(clusters)
}

/// `max_j ||λ_j| − 1|`, passing iff it is at most `tol`.
pub fn unimodularity_check(eigs: &[Scalar], tol: f64) -> UnimodularCheck {
    let max_deviation = eigs
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    UnimodularCheck {
        pass: max_deviation <= tol,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(seed: u64, n: usize) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn sorted(mut v: Vec<Scalar>) -> Vec<Scalar> {
        v.sort_by(argument_order);
        v
    }

    /// Greedy multiset distance, adequate for well-separated test spectra.
    fn multiset_distance(a: &[Scalar], b: &[Scalar]) -> f64 {
        let mut used = vec![false; b.len()];
        let mut worst = 0.0f64;
        for x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, y)| (j, (x - y).norm()))
                .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn hessenberg_leaves_small_cases_alone() {
        let a = random(1, 2);
        assert_eq!(hessenberg(&a).unwrap(), a);
        let d = Matrix::diag(&[c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)]);
        assert_eq!(hessenberg(&d).unwrap(), d);
    }

    #[test]
    fn hessenberg_structure_and_similarity() {
        let a = random(2, 5);
        let h = hessenberg(&a).unwrap();
        for i in 0..5usize {
            for j in 0..i.saturating_sub(1) {
                assert!(h[(i, j)].norm() <= 1e-14 * a.norm_fro());
            }
        }
        assert!((h.trace() - a.trace()).norm() < 1e-13);
        assert!((h.norm_fro() - a.norm_fro()).abs() < 1e-13);
        let ea = sorted(eigenvalues(&a, 150).unwrap());
        let eh = sorted(eigenvalues(&h, 150).unwrap());
        assert!(multiset_distance(&ea, &eh) < 1e-12);
    }

    #[test]
    fn involutions() {
        let a = Matrix::from_real_rows(&[[5.0, -2.0], [12.0, -5.0]]);
        let e = sorted(eigenvalues(&a, 60).unwrap());
        assert!((e[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((e[1] - c64(-1.0, 0.0)).norm() < 1e-12);

        let j = Matrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(eigenvalues(&j, 60).unwrap(), vec![c64(1.0, 0.0); 2]);
    }

    #[test]
    fn rotation_like_matrices_converge() {
        let swap = Matrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let e = sorted(eigenvalues(&swap, 60).unwrap());
        assert!((e[0] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((e[1] + c64(1.0, 0.0)).norm() < 1e-14);

        // Cyclic shift: eigenvalues are the 4th roots of unity.
        let mut p = Matrix::zeros(4, 4);
        for i in 0..4 {
            p[(i, (i + 1) % 4)] = c64(1.0, 0.0);
        }
        let e = eigenvalues(&p, 120).unwrap();
        for z in &e {
            assert!((z.powi(4) - c64(1.0, 0.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn nonconvergence_is_reported() {
        let a = random(3, 6);
        match eigenvalues(&a, 0) {
            Err(Error::NoConvergence { hi, .. }) => assert_eq!(hi, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eigenpairs_pass_inverse_iteration() {
        let a = random(4, 8);
        for lambda in eigenvalues(&a, 240).unwrap() {
            // Two steps of inverse iteration from a fixed start.
            let shifted = a.shifted(lambda + c64(1e-10, 0.0));
            let f = crate::complexmat::lu_factor(&shifted, 0.0).unwrap();
            let mut v = Matrix::from_fn(8, 1, |i, _| c64(1.0, i as f64 * 0.1));
            for _ in 0..2 {
                v = f.solve(&v).unwrap();
                let s = v.norm_fro();
                v = v.scale(c64(1.0 / s, 0.0));
            }
            let r = (&a.shifted(lambda) * &v).norm_fro();
            assert!(r <= 1e-8 * a.norm_fro(), "{lambda}: {r}");
        }
    }

    #[test]
    fn clusters_of_involution_spectrum() {
        let c = cluster(&[c64(-1.0, 0.0), c64(1.0, 0.0)], 0.5).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].center, c64(1.0, 0.0));
        assert_eq!(c[1].center, c64(-1.0, 0.0));
        assert_eq!(c[0].separation, Some(2.0));
        assert_eq!(c[1].separation, Some(2.0));

        let c = cluster(&[c64(1.0, 0.0), c64(1.0, 0.0)], 1e-9).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].multiplicity, 2);
        assert_eq!(c[0].separation, None);

        assert!(cluster(&[c64(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn argument_key_snaps_rounding() {
        assert_eq!(argument_key(c64(-1.0, -1e-17)), std::f64::consts::PI);
        assert_eq!(argument_key(c64(1.0, -1e-17)), 0.0);
    }

    #[test]
    fn planted_groups_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let anchors = [c64(1.0, 0.0), c64(-0.5, 0.8), c64(-0.4, -0.9)];
        let mut pts = Vec::new();
        let mut truth = Vec::new();
        for k in 0..10 {
            let g = k % 3;
            pts.push(anchors[g] + c64(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3)));
            truth.push(g);
        }
        let clusters = cluster(&pts, 0.1).unwrap();
        assert_eq!(clusters.len(), 3);
        for c in &clusters {
            let g = truth[pts.iter().position(|p| *p == c.members[0]).unwrap()];
            let expected = truth.iter().filter(|&&t| t == g).count();
            assert_eq!(c.multiplicity, expected);
            assert!((c.center - anchors[g]).norm() < 2e-3);
        }
    }

    #[test]
    fn unimodularity_examples() {
        let u = unimodularity_check(&[c64(1.0, 0.0), c64(-1.0, 0.0)], 1e-12);
        assert!(u.pass);
        assert_eq!(u.max_deviation, 0.0);
        let u = unimodularity_check(&[c64(2.0, 0.0)], 1e-12);
        assert!(!u.pass);
        assert_eq!(u.max_deviation, 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn trace_and_determinant(seed in any::<u64>(), n in 1usize..=10) {
            let a = random(seed, n);
            let e = eigenvalues(&a, 30 * n).unwrap();
            let sum: Scalar = e.iter().sum();
            prop_assert!((sum - a.trace()).norm() <= 1e-10 * a.norm_fro());
            let prod: Scalar = e.iter().product();
            let det = a.det().unwrap();
            prop_assert!((prod - det).norm() <= 1e-8 * det.norm().max(1e-300));
        }

        #[test]
        fn similarity_invariance(seed in any::<u64>(), n in 2usize..=8) {
            let a = random(seed, n);
            let v = &random(seed.wrapping_add(1), n) + &Matrix::scalar(n, c64(2.0, 0.0));
            let vinv = crate::complexmat::inverse(&v).unwrap();
            let b = &(&v * &a) * &vinv;
            let kappa = v.norm_op2_est(100) * vinv.norm_op2_est(100);
            let ea = eigenvalues(&a, 30 * n).unwrap();
            let eb = eigenvalues(&b, 30 * n).unwrap();
            prop_assert!(multiset_distance(&ea, &eb) <= 1e-7 * kappa * a.norm_fro());
        }

        #[test]
        fn clustering_is_permutation_invariant_and_scale_covariant(
            seed in any::<u64>(),
            n in 1usize..=12,
            scale in 0.01f64..100.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Scalar> = (0..n)
                .map(|_| c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let gap = 0.5;
            let base = cluster(&pts, gap).unwrap();
            let mut shuffled = pts.clone();
            shuffled.reverse();
            shuffled.rotate_left(n / 2);
            prop_assert_eq!(&cluster(&shuffled, gap).unwrap(), &base);

            let scaled: Vec<Scalar> = pts.iter().map(|z| z * scale).collect();
            let sc = cluster(&scaled, gap * scale).unwrap();
            prop_assert_eq!(sc.len(), base.len());
            for (x, y) in sc.iter().zip(&base) {
                prop_assert_eq!(x.multiplicity, y.multiplicity);
                prop_assert!((x.center - y.center * scale).norm() <= 1e-12 * scale);
            }
        }
    }
}
