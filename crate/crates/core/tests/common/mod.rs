//! Reference implementations used to cross-check the library. They share no
//! code with it beyond matrix types: norms are evaluated by explicit loops,
//! suppression constants come from the Schur complement instead of the
//! whitened eigenproblem, and greedy sets from exhaustive subset filtering.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `BᵀB + shift·I` with `B` standard normal.
pub fn random_gram(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let g = b.transpose() * &b + DMatrix::identity(n, n) * shift;
    (&g + g.transpose()) * 0.5
}

/// A random basis with condition number kept moderate.
pub fn random_basis_columns(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 2.0 } else { 0.0 };
            d + rng.sample::<f64, _>(StandardNormal) * 0.6
        });
        let sv = m.clone().svd(false, false).singular_values;
        if sv.max() / sv.min() < 50.0 {
            return m;
        }
    }
}

pub fn quad_norm(g: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * g[(i, j)] * x[j];
        }
    }
    s.max(0.0).sqrt()
}

pub fn poly_norm(rows: &[Vec<f64>], x: &[f64]) -> f64 {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// `sup ‖P_A x‖/‖x‖` over the canonical basis of `R^2`, sampled on `m`
/// equally spaced angles of the half circle.
pub fn grid_ksu_2d(norm: impl Fn(&[f64]) -> f64, m: usize) -> f64 {
    let mut best = 1.0f64;
    for k in 0..m {
        let th = std::f64::consts::PI * k as f64 / m as f64;
        let (c, s) = (th.cos(), th.sin());
        let nx = norm(&[c, s]);
        best = best.max(norm(&[c, 0.0]) / nx).max(norm(&[0.0, s]) / nx);
    }
    best
}

/// `sup ‖G_N x‖/‖x‖` on `R^2`: `N = 1` keeps the larger coordinate (both on
/// a tie), `N = 2` is the identity.
pub fn grid_cw_2d(norm: impl Fn(&[f64]) -> f64, m: usize) -> f64 {
    let mut best = 1.0f64;
    for k in 0..m {
        let th = std::f64::consts::PI * k as f64 / m as f64;
        let (c, s) = (th.cos(), th.sin());
        let nx = norm(&[c, s]);
        if c.abs() >= s.abs() {
            best = best.max(norm(&[c, 0.0]) / nx);
        }
        if s.abs() >= c.abs() {
            best = best.max(norm(&[0.0, s]) / nx);
        }
    }
    best
}

/// Largest eigenvalue of `M·H_AA` with `M = (H⁻¹)_AA`, via the symmetric
/// form `LᵀH_AA L` where `M = LLᵀ`.
fn schur_subset(h: &DMatrix<f64>, hinv: &DMatrix<f64>, set: &[usize]) -> f64 {
    let k = set.len();
    let haa = DMatrix::from_fn(k, k, |a, b| h[(set[a], set[b])]);
    let m = DMatrix::from_fn(k, k, |a, b| hinv[(set[a], set[b])]);
    let l = m.cholesky().expect("principal block of an SPD inverse").l();
    let s = l.transpose() * haa * &l;
    let s = (&s + s.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.max()
}

/// `K_su` of the basis with Gram matrix `H = VᵀGV`:
/// `max_A sqrt(λ_max((H⁻¹)_AA H_AA))`.
pub fn schur_ksu(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows();
    let hinv = h.clone().try_inverse().expect("invertible");
    let mut best = 1.0f64;
    for mask in 1u32..(1 << n) - 1 {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        best = best.max(schur_subset(h, &hinv, &set).sqrt());
    }
    best
}

/// Every `n`-subset whose smallest magnitude is at least the largest outside
/// magnitude minus `tol`, in lexicographic order.
pub fn brute_greedy_sets(c: &[f64], n: usize, tol: f64) -> Vec<Vec<usize>> {
    let d = c.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let inside = (0..d).filter(|i| mask >> i & 1 == 1);
        let outside = (0..d).filter(|i| mask >> i & 1 == 0);
        let lo = inside.map(|i| c[i].abs()).fold(f64::INFINITY, f64::min);
        let hi = outside.map(|i| c[i].abs()).fold(0.0, f64::max);
        if lo >= hi - tol {
            out.push((0..d).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

/// `sqrt(G_ii / (G_ii - G_ij²/G_jj))`.
pub fn hilbert_ratio(g: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (g[(i, i)] / (g[(i, i)] - g[(i, j)] * g[(i, j)] / g[(j, j)])).sqrt()
}
