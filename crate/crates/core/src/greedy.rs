//! Greedy sets, greedy operators `G_N` and coordinate projections `P_A`.

use crate::error::{Error, Result};
use crate::spaces::{Basis, Vector};
use crate::TIE_TOL;

/// How ties at the greedy cut are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieMode {
    /// A single selection; among tied coefficients the lower index wins.
    OneValid,
    /// Every `N`-set satisfying the greedy inequality.
    AllValid,
}

/// An `N`-element set `Λ` with `min_Λ |c_j| ≥ max_{j∉Λ} |c_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedySelection {
    /// Sorted, 0-based.
    pub indices: Vec<usize>,
    /// `min_{j∈Λ} |c_j|`, `+inf` when `Λ` is empty.
    pub threshold_in: f64,
    /// `max_{j∉Λ} |c_j|`, `0` when `Λ` is everything.
    pub threshold_out: f64,
    /// Whether some other set of the same size is also valid.
    pub tied: bool,
}

impl GreedySelection {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn thresholds(coeffs: &[f64], indices: &[usize]) -> (f64, f64) {
    let mut inside = vec![false; coeffs.len()];
    for &i in indices {
        inside[i] = true;
    }
    let mut t_in = f64::INFINITY;
    let mut t_out: f64 = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if inside[i] {
            t_in = t_in.min(c.abs());
        } else {
            t_out = t_out.max(c.abs());
        }
    }
    (t_in, t_out)
}

/// Whether `indices` (distinct, in range) is a greedy set of `coeffs`, with
/// magnitudes within [`TIE_TOL`] counted as tied.
pub fn is_greedy_set(coeffs: &[f64], indices: &[usize]) -> bool {
    let (t_in, t_out) = thresholds(coeffs, indices);
    t_in >= t_out - TIE_TOL
}

fn combinations(pool: &[usize], k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(
        pool: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=pool.len() - need {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, f);
            cur.pop();
        }
    }
    if k > pool.len() {
        return;
    }
    rec(pool, k, 0, &mut Vec::with_capacity(k), &mut f);
}

/// Greedy sets of size `n` for the coefficient vector `coeffs`.
///
/// Coefficients strictly above the cut value (by more than [`TIE_TOL`]) are
/// forced into the set; the remaining slots are filled from the coefficients
/// tied with the cut. In `AllValid` mode every such completion that passes the
/// defining inequality is returned, ordered lexicographically.
pub fn greedy_sets(coeffs: &[f64], n: usize, mode: TieMode) -> Result<Vec<GreedySelection>> {
    let dim = coeffs.len();
    if n > dim {
        return Err(Error::CardinalityOutOfRange { n, dim });
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| coeffs[b].abs().total_cmp(&coeffs[a].abs()).then(a.cmp(&b)));

    if n == 0 || n == dim {
        let indices: Vec<usize> = if n == 0 { vec![] } else { (0..dim).collect() };
        let (threshold_in, threshold_out) = thresholds(coeffs, &indices);
        return Ok(vec![GreedySelection {
            indices,
            threshold_in,
            threshold_out,
            tied: false,
        }]);
    }

    let cut = coeffs[order[n - 1]].abs();
    let forced: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| coeffs[i].abs() > cut + TIE_TOL)
        .collect();
    let mut pool: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| coeffs[i].abs() <= cut + TIE_TOL && coeffs[i].abs() >= cut - TIE_TOL)
        .collect();
    pool.sort_unstable();
    let need = n - forced.len();
    let tied = pool.len() > need;

    let build = |extra: &[usize]| {
        let mut indices: Vec<usize> = forced.iter().chain(extra).copied().collect();
        indices.sort_unstable();
        let (threshold_in, threshold_out) = thresholds(coeffs, &indices);
        GreedySelection {
            indices,
            threshold_in,
            threshold_out,
            tied,
        }
    };

    match mode {
        TieMode::OneValid => {
            let sel = build(&pool[..need]);
            if sel.threshold_in >= sel.threshold_out - TIE_TOL {
                return Ok(vec![sel]);
            }
            // tolerance chains can break the lowest-index completion; the
            // exact magnitude order is always valid
            let mut indices: Vec<usize> = order[..n].to_vec();
            indices.sort_unstable();
            let (threshold_in, threshold_out) = thresholds(coeffs, &indices);
            Ok(vec![GreedySelection {
                indices,
                threshold_in,
                threshold_out,
                tied,
            }])
        }
        TieMode::AllValid => {
            let mut out = Vec::new();
            combinations(&pool, need, |extra| {
                let sel = build(extra);
                if sel.threshold_in >= sel.threshold_out - TIE_TOL {
                    out.push(sel);
                }
            });
            out.sort_by(|a, b| a.indices.cmp(&b.indices));
            Ok(out)
        }
    }
}

fn check_indices(dim: usize, set: &[usize]) -> Result<()> {
    match set.iter().find(|&&i| i >= dim) {
        Some(&index) => Err(Error::IndexOutOfRange { index, dim }),
        None => Ok(()),
    }
}

/// Projection with coefficients already computed; `set` must be in range.
pub(crate) fn project_coeffs(basis: &Basis, coeffs: &Vector, set: &[usize]) -> Vector {
    let v = basis.vectors();
    let mut out = Vector::zeros(basis.dim());
    for &i in set {
        out.axpy(coeffs[i], &v.column(i), 1.0);
    }
    out
}

/// `P_A x = Σ_{i∈A} e*_i(x) e_i`.
pub fn projection(basis: &Basis, x: &Vector, set: &[usize]) -> Result<Vector> {
    check_indices(basis.dim(), set)?;
    let c = basis.coefficients(x)?;
    Ok(project_coeffs(basis, &c, set))
}

fn checked_selection(basis: &Basis, x: &Vector, sel: &GreedySelection) -> Result<Vector> {
    check_indices(basis.dim(), &sel.indices)?;
    let c = basis.coefficients(x)?;
    if !is_greedy_set(c.as_slice(), &sel.indices) {
        return Err(Error::InvalidSelection);
    }
    Ok(c)
}

/// `G_N(x)` for a greedy selection of `x`'s coefficients.
pub fn greedy_sum(basis: &Basis, x: &Vector, sel: &GreedySelection) -> Result<Vector> {
    let c = checked_selection(basis, x, sel)?;
    Ok(project_coeffs(basis, &c, &sel.indices))
}

/// `x - G_N(x)`.
pub fn residual(basis: &Basis, x: &Vector, sel: &GreedySelection) -> Result<Vector> {
    Ok(x - greedy_sum(basis, x, sel)?)
}

/// Complement of `set` in `0..dim`.
pub fn complement(dim: usize, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; dim];
    for &i in set {
        inside[i] = true;
    }
    (0..dim).filter(|&i| !inside[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormedSpace;
    use nalgebra::dmatrix;

    fn sets(c: &[f64], n: usize, mode: TieMode) -> Vec<Vec<usize>> {
        greedy_sets(c, n, mode)
            .unwrap()
            .into_iter()
            .map(|s| s.indices)
            .collect()
    }

    #[test]
    fn unique_greedy_set() {
        assert_eq!(
            sets(&[3.0, 1.0, 2.0], 2, TieMode::AllValid),
            vec![vec![0, 2]]
        );
        let s = &greedy_sets(&[3.0, 1.0, 2.0], 2, TieMode::OneValid).unwrap()[0];
        assert!(!s.tied);
        assert_eq!((s.threshold_in, s.threshold_out), (2.0, 1.0));
    }

    #[test]
    fn exact_ties() {
        assert_eq!(
            sets(&[1.0, 1.0], 1, TieMode::AllValid),
            vec![vec![0], vec![1]]
        );
        assert_eq!(
            sets(&[2.0, -2.0, 1.0], 1, TieMode::AllValid),
            vec![vec![0], vec![1]]
        );
        assert_eq!(sets(&[2.0, -2.0, 1.0], 1, TieMode::OneValid), vec![vec![0]]);
        assert!(greedy_sets(&[1.0, 1.0], 1, TieMode::OneValid).unwrap()[0].tied);
    }

    #[test]
    fn near_ties_within_tolerance() {
        let c = [1.0, 1.0 - 5e-13, 0.5];
        assert_eq!(sets(&c, 1, TieMode::AllValid), vec![vec![0], vec![1]]);
        let c = [1.0, 1.0 - 5e-12, 0.5];
        assert_eq!(sets(&c, 1, TieMode::AllValid), vec![vec![0]]);
    }

    #[test]
    fn edge_cardinalities() {
        assert_eq!(
            sets(&[1.0, 2.0], 0, TieMode::AllValid),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(sets(&[1.0, 2.0], 2, TieMode::AllValid), vec![vec![0, 1]]);
        assert!(matches!(
            greedy_sets(&[1.0], 2, TieMode::OneValid),
            Err(Error::CardinalityOutOfRange { n: 2, dim: 1 })
        ));
    }

    #[test]
    fn projections() {
        let b = Basis::canonical(2);
        let x = Vector::from_vec(vec![5.0, 7.0]);
        assert_eq!(projection(&b, &x, &[0]).unwrap().as_slice(), &[5.0, 0.0]);
        assert_eq!(projection(&b, &x, &[]).unwrap().as_slice(), &[0.0, 0.0]);
        assert!(matches!(
            projection(&b, &x, &[2]),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        ));
        let sheared = Basis::from_columns(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(
            projection(&sheared, &y, &[1]).unwrap().as_slice(),
            &[1.0, 1.0]
        );
    }

    #[test]
    fn greedy_sum_and_residual() {
        let b = Basis::canonical(3);
        let x = Vector::from_vec(vec![3.0, 1.0, 2.0]);
        let s2 = &greedy_sets(x.as_slice(), 2, TieMode::OneValid).unwrap()[0];
        assert_eq!(residual(&b, &x, s2).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        let s0 = &greedy_sets(x.as_slice(), 0, TieMode::OneValid).unwrap()[0];
        assert_eq!(residual(&b, &x, s0).unwrap(), x);
        let s3 = &greedy_sets(x.as_slice(), 3, TieMode::OneValid).unwrap()[0];
        assert_eq!(greedy_sum(&b, &x, s3).unwrap(), x);
        assert_eq!(residual(&b, &x, s3).unwrap(), Vector::zeros(3));

        let b2 = Basis::canonical(2);
        let ones = Vector::from_vec(vec![1.0, 1.0]);
        let s = &greedy_sets(ones.as_slice(), 1, TieMode::OneValid).unwrap()[0];
        assert_eq!(greedy_sum(&b2, &ones, s).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn summing_norm_greedy_sum() {
        let space = NormedSpace::polyhedral(&dmatrix![1.0, 0.0; 1.0, 1.0]).unwrap();
        let b = Basis::canonical(2);
        let x = Vector::from_vec(vec![1.0, -2.0]);
        let s = &greedy_sets(x.as_slice(), 1, TieMode::OneValid).unwrap()[0];
        assert_eq!(s.indices, vec![1]);
        let g = greedy_sum(&b, &x, s).unwrap();
        assert_eq!(g.as_slice(), &[0.0, -2.0]);
        assert_eq!(space.norm(&g).unwrap(), 2.0);
    }

    #[test]
    fn invalid_selection_is_rejected() {
        let b = Basis::canonical(2);
        let x = Vector::from_vec(vec![1.0, 3.0]);
        let bogus = GreedySelection {
            indices: vec![0],
            threshold_in: 1.0,
            threshold_out: 3.0,
            tied: false,
        };
        assert!(matches!(
            greedy_sum(&b, &x, &bogus),
            Err(Error::InvalidSelection)
        ));
    }
}
