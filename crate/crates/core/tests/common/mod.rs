//! Independent oracles and seeded inputs shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riesz::{c64, Matrix, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in [-1, 1).
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn unit(theta: f64) -> Scalar {
    c64(theta.cos(), theta.sin())
}

/// `m` unimodular values whose arguments are at least `π/m` apart, with
/// multiplicities forming a random composition of `n`.
pub fn planted_values(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(Scalar, usize)> {
    let step = std::f64::consts::TAU / m as f64;
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut mults = vec![1usize; m];
    for _ in m..n {
        mults[rng.gen_range(0..m)] += 1;
    }
    (0..m)
        .map(|j| {
            let jitter = rng.gen_range(-0.25..0.25) * step;
            (unit(phase + j as f64 * step + jitter), mults[j])
        })
        .collect()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// `‖A‖₂` from the largest eigenvalue of the real symmetric embedding
/// `[[X, −Y], [Y, X]]` of `AᴴA = X + iY`.
pub fn spectral_norm_oracle(a: &Matrix) -> f64 {
    let g = &a.adjoint() * a;
    let n = g.rows();
    let mut e = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = g[(i, j)];
            e[i][j] = z.re;
            e[i + n][j + n] = z.re;
            e[i][j + n] = -z.im;
            e[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(e).into_iter().fold(0.0, f64::max).max(0.0).sqrt()
}

fn poly_eval(coeffs: &[Scalar], z: Scalar) -> (Scalar, Scalar) {
    // Monic polynomial with `coeffs` from the highest non-leading term down; returns (p, p').
    let mut p = c64(1.0, 0.0);
    let mut dp = c64(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[Scalar], mut z: Scalar) -> Scalar {
    for _ in 0..4 {
        let (p, dp) = poly_eval(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

/// Characteristic-polynomial roots by the quadratic / Cardano formulas, Newton polished.
pub fn closed_form_eigenvalues(a: &Matrix) -> Vec<Scalar> {
    let n = a.rows();
    match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let disc = (tr * tr - det * 4.0).sqrt();
            // Pick the sign that avoids cancellation, then use Vieta for the other root.
            let q = if (tr + disc).norm() >= (tr - disc).norm() {
                (tr + disc) / 2.0
            } else {
                (tr - disc) / 2.0
            };
            let other = if q.norm() > 0.0 { det / q } else { tr - q };
            let coeffs = [-tr, det];
            vec![newton_polish(&coeffs, q), newton_polish(&coeffs, other)]
        }
        3 => {
            let m = |i: usize, j: usize| a[(i, j)];
            let c2 = m(0, 0) + m(1, 1) + m(2, 2);
            let c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)
                + m(1, 1) * m(2, 2)
                - m(1, 2) * m(2, 1);
            let c0 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            // λ³ − c2 λ² + c1 λ − c0, shifted to t³ + p t + q with λ = t + c2/3.
            let s = c2 / 3.0;
            let p = c1 - c2 * c2 / 3.0;
            let q = -c0 + c1 * s - c2 * c2 * c2 * 2.0 / 27.0;
            let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
            let u3 = if (-q / 2.0 + disc).norm() >= (-q / 2.0 - disc).norm() {
                -q / 2.0 + disc
            } else {
                -q / 2.0 - disc
            };
            let u = u3.powf(1.0 / 3.0);
            let omega = unit(std::f64::consts::TAU / 3.0);
            let coeffs = [-c2, c1, -c0];
            (0..3)
                .map(|k| {
                    let uk = u * omega.powi(k);
                    let t = if uk.norm() > 0.0 { uk - p / (uk * 3.0) } else { c64(0.0, 0.0) };
                    newton_polish(&coeffs, t + s)
                })
                .collect()
        }
        _ => panic!("closed form only for n <= 3"),
    }
}

/// Smallest worst-case distance over all pairings of two multisets (n ≤ 3).
pub fn multiset_distance(a: &[Scalar], b: &[Scalar]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let perms: Vec<Vec<usize>> = match n {
        0 => vec![vec![]],
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        _ => panic!("n <= 3"),
    };
    perms
        .iter()
        .map(|p| (0..n).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

pub fn involution() -> Matrix {
    Matrix::from_real_rows(&[[5.0, -2.0], [12.0, -5.0]])
}

pub fn involution_p() -> Matrix {
    Matrix::from_real_rows(&[[3.0, -1.0], [6.0, -2.0]])
}

pub fn involution_q() -> Matrix {
    Matrix::from_real_rows(&[[-2.0, 1.0], [-6.0, 3.0]])
}

pub fn jordan() -> Matrix {
    Matrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]])
}

/// Distance from the unit vector along `e` to the span of the orthonormal columns of `b`.
pub fn angle_to_span(b: &Matrix, e: &[Scalar]) -> f64 {
    let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<Scalar> = e.iter().map(|z| z / nrm).collect();
    let mut r = u.clone();
    for j in 0..b.cols() {
        let col = b.column(j);
        let coef: Scalar = col.iter().zip(&u).map(|(x, y)| x.conj() * y).sum();
        for (ri, ci) in r.iter_mut().zip(&col) {
            *ri -= coef * ci;
        }
    }
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
