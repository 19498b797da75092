//! Vertex enumeration for unit balls of polyhedral norms.
//!
//! The unit ball `{x : |⟨f_k, x⟩| ≤ 1 for all k}` is a centrally symmetric
//! polytope. Every vertex is the unique solution of `⟨f_k, x⟩ = s_k` for some
//! `n` linearly independent rows and signs `s ∈ {±1}^n`, so enumerating row
//! subsets and sign patterns and keeping the feasible solutions finds them all.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::{NormedSpace, Vector};
use crate::VERTEX_CAP;

/// Upper limit on linear solves (row subsets times sign patterns).
pub const SOLVE_CAP: u64 = 5_000_000;

const FEASIBILITY_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-9;

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Vertices of `{x : max_k |⟨f_k, x⟩| ≤ 1}` for the rows `f_k` of `rows`.
///
/// Vertices come in `±v` pairs and are returned in a deterministic order.
pub fn unit_ball_vertices(rows: &DMatrix<f64>) -> Result<Vec<Vector>> {
    let (m, n) = rows.shape();
    if n > VERTEX_CAP {
        return Err(Error::DimensionGuard {
            dim: n,
            cap: VERTEX_CAP,
        });
    }
    if m < n {
        return Err(Error::Contract("fewer functionals than dimensions".into()));
    }
    let solves = binomial(m as u64, n as u64).saturating_mul(1 << (n - 1));
    if solves > SOLVE_CAP {
        return Err(Error::Contract(format!(
            "vertex enumeration needs {solves} solves (cap {SOLVE_CAP})"
        )));
    }

    let scale = rows.amax().max(f64::MIN_POSITIVE);
    let mut vertices: Vec<Vector> = Vec::new();
    let mut push = |v: Vector| {
        if !vertices.iter().any(|w| (w - &v).amax() <= DEDUP_TOL) {
            vertices.push(v);
        }
    };

    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let sub = DMatrix::from_fn(n, n, |i, j| rows[(idx[i], j)]);
        let sv = sub.clone().svd(false, false).singular_values;
        if sv.min() > 1e-12 * scale {
            if let Some(inv) = sub.try_inverse() {
                for pattern in 0u32..(1 << (n - 1)) {
                    // first sign fixed to +1; the -v partner is added below
                    let s = DVector::from_fn(n, |i, _| {
                        if i > 0 && pattern >> (i - 1) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    });
                    let v = &inv * s;
                    let worst = (rows * &v).amax();
                    if worst <= 1.0 + FEASIBILITY_TOL {
                        push(v.clone());
                        push(-v);
                    }
                }
            }
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(vertices);
            }
            i -= 1;
            if idx[i] < m - n + i {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unit-ball vertices of `space` when its norm is polyhedral and the
/// enumeration is within the caps.
pub fn space_vertices(space: &NormedSpace) -> Option<Vec<Vector>> {
    if let Some(v) = space.cross_polytope_vertices() {
        return Some(v);
    }
    if space.dim() > VERTEX_CAP {
        return None;
    }
    unit_ball_vertices(&space.functional_rows()?).ok()
}
