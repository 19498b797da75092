//! Random-restart search with pattern-search polish for projection ratios.
//!
//! Samples live in coefficient space: a sample `c` stands for `x = Σ c_i e_i`.
//! Each restart draws from its own ChaCha stream keyed by the restart index,
//! and partial maxima are combined in index order, so results depend only on
//! the seed and the budget, not on scheduling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::constants::Budget;
use crate::greedy::{complement, greedy_sets, is_greedy_set, TieMode};
use crate::spaces::{Basis, NormedSpace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Objective {
    /// `‖P_A x‖ / ‖x‖` over proper nonempty `A`.
    Suppression,
    /// `‖G_N x‖ / ‖x‖` over greedy sets.
    Greedy,
    /// `‖x - G_N x‖ / ‖x‖` over greedy sets.
    Residual,
}

#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub coeffs: Vector,
    /// The coordinate set for `Suppression`, the greedy set `Λ` otherwise.
    pub set: Vec<usize>,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub best: Candidate,
    pub evaluations: u64,
}

/// Random masks per sample once `2^n - 2` exceeds this.
const MASKS_PER_SAMPLE: usize = 62;

struct Evaluator<'a> {
    space: &'a NormedSpace,
    basis: &'a Basis,
    objective: Objective,
}

impl Evaluator<'_> {
    fn norm_of_coeffs(&self, c: &Vector) -> f64 {
        self.space.eval(self.basis.synthesize(c).as_slice())
    }

    fn partial_norm(&self, c: &Vector, set: &[usize]) -> f64 {
        let v = self.basis.vectors();
        let mut y = Vector::zeros(c.len());
        for &i in set {
            y.axpy(c[i], &v.column(i), 1.0);
        }
        self.space.eval(y.as_slice())
    }

    fn kept(&self, c: &Vector, set: &[usize]) -> Vec<usize> {
        match self.objective {
            Objective::Residual => complement(c.len(), set),
            _ => set.to_vec(),
        }
    }

    fn feasible(&self, c: &Vector, set: &[usize]) -> bool {
        match self.objective {
            Objective::Suppression => true,
            _ => is_greedy_set(c.as_slice(), set),
        }
    }

    /// Ratio for a fixed set, or `None` when infeasible or degenerate.
    fn ratio(&self, c: &Vector, set: &[usize], evals: &mut u64) -> Option<f64> {
        if !self.feasible(c, set) {
            return None;
        }
        let nx = self.norm_of_coeffs(c);
        *evals += 2;
        if !(nx > 0.0) {
            return None;
        }
        Some(self.partial_norm(c, &self.kept(c, set)) / nx)
    }

    /// Best set for a sample under this objective.
    fn best_for_sample(
        &self,
        c: &Vector,
        rng: &mut ChaCha8Rng,
        evals: &mut u64,
    ) -> Option<Candidate> {
        let n = c.len();
        let nx = self.norm_of_coeffs(c);
        *evals += 1;
        if !(nx > 0.0) || !nx.is_finite() {
            return None;
        }
        let mut best: Option<Candidate> = None;
        let mut consider = |set: Vec<usize>, evals: &mut u64| {
            let r = self.partial_norm(c, &self.kept(c, &set)) / nx;
            *evals += 1;
            if best.as_ref().is_none_or(|b| r > b.ratio) {
                best = Some(Candidate {
                    coeffs: c.clone(),
                    set,
                    ratio: r,
                });
            }
        };
        match self.objective {
            Objective::Suppression => {
                let full = (1u32 << n) - 1;
                let mask_set = |m: u32| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>();
                if (full as usize).saturating_sub(1) <= MASKS_PER_SAMPLE {
                    for m in 1..full {
                        consider(mask_set(m), evals);
                    }
                } else {
                    for _ in 0..MASKS_PER_SAMPLE {
                        let m = rng.random_range(1..full);
                        consider(mask_set(m), evals);
                    }
                }
            }
            Objective::Greedy | Objective::Residual => {
                for k in 1..n {
                    for sel in greedy_sets(c.as_slice(), k, TieMode::AllValid).expect("k <= n") {
                        consider(sel.indices, evals);
                    }
                }
            }
        }
        best
    }

    /// Coordinate pattern search keeping the set fixed and feasible.
    fn polish(&self, start: &Candidate, sweeps: usize, evals: &mut u64) -> Candidate {
        let n = start.coeffs.len();
        let mut cur = start.clone();
        let mut h = 0.25;
        for _ in 0..sweeps {
            let scale = cur.coeffs.amax();
            if scale == 0.0 {
                break;
            }
            let mut improved = false;
            'coords: for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut c = cur.coeffs.clone();
                    c[i] += sign * h * scale;
                    if let Some(r) = self.ratio(&c, &cur.set, evals) {
                        if r > cur.ratio {
                            cur = Candidate {
                                coeffs: c,
                                set: cur.set.clone(),
                                ratio: r,
                            };
                            improved = true;
                            break 'coords;
                        }
                    }
                }
            }
            if !improved {
                h *= 0.5;
                if h < 1e-12 {
                    break;
                }
            }
        }
        cur
    }
}

fn draw(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vector {
    let stratum = k % (n + 1);
    if stratum == 0 {
        return Vector::from_fn(n, |_, _| rng.sample(StandardNormal));
    }
    let mut c = Vector::zeros(n);
    let large = sample(rng, n, stratum);
    let mut is_large = vec![false; n];
    for i in large.iter() {
        is_large[i] = true;
    }
    for i in 0..n {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        c[i] = if is_large[i] {
            sign * rng.random_range(0.5..=1.0)
        } else {
            let decades: f64 = rng.random_range(0.0..3.0);
            sign * 0.5 * rng.random::<f64>() * 10f64.powf(-decades)
        };
    }
    c
}

fn restart_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    a.ratio > b.ratio
}

/// Maximizes the objective from `budget.restarts` random samples plus the
/// given seed samples; the `budget.polish` best samples and every seed are
/// polished. The baseline ratio 1 (full set, or empty set for residuals) is
/// always a candidate.
pub(crate) fn run(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
    objective: Objective,
    seeds: &[Vector],
) -> SearchOutcome {
    let n = space.dim();
    let ev = Evaluator {
        space,
        basis,
        objective,
    };
    let mut evaluations = 0u64;

    let mut baseline_coeffs = Vector::zeros(n);
    baseline_coeffs[0] = 1.0;
    let baseline_set: Vec<usize> = match objective {
        Objective::Residual => vec![],
        _ => (0..n).collect(),
    };
    let ratio = ev
        .ratio(&baseline_coeffs, &baseline_set, &mut evaluations)
        .unwrap_or(1.0);
    let mut best = Candidate {
        coeffs: baseline_coeffs,
        set: baseline_set,
        ratio,
    };
    if n == 1 {
        return SearchOutcome { best, evaluations };
    }

    let sample_one = |k: usize| -> (Option<Candidate>, u64) {
        let mut rng = restart_rng(budget.seed, k);
        let c = draw(n, k, &mut rng);
        let mut evals = 0;
        (ev.best_for_sample(&c, &mut rng, &mut evals), evals)
    };
    let seed_one = |i: usize| -> (Option<Candidate>, u64) {
        let mut rng = restart_rng(budget.seed ^ 0x5eed, i);
        let mut evals = 0;
        (ev.best_for_sample(&seeds[i], &mut rng, &mut evals), evals)
    };

    #[cfg(feature = "parallel")]
    let (seeded, sampled): (Vec<_>, Vec<_>) = (
        (0..seeds.len()).into_par_iter().map(seed_one).collect(),
        (0..budget.restarts)
            .into_par_iter()
            .map(sample_one)
            .collect(),
    );
    #[cfg(not(feature = "parallel"))]
    let (seeded, sampled): (Vec<_>, Vec<_>) = (
        (0..seeds.len()).map(seed_one).collect(),
        (0..budget.restarts).map(sample_one).collect(),
    );

    evaluations += seeded.iter().chain(&sampled).map(|(_, e)| e).sum::<u64>();
    let seeded: Vec<Candidate> = seeded.into_iter().filter_map(|(c, _)| c).collect();
    let mut sampled: Vec<(usize, Candidate)> = sampled
        .into_iter()
        .enumerate()
        .filter_map(|(k, (c, _))| c.map(|c| (k, c)))
        .collect();
    sampled.sort_by(|a, b| b.1.ratio.total_cmp(&a.1.ratio).then(a.0.cmp(&b.0)));

    let mut queue: Vec<Candidate> = seeded;
    queue.extend(sampled.iter().take(budget.polish).map(|(_, c)| c.clone()));
    let polish_one = |c: &Candidate| {
        let mut evals = 0;
        (ev.polish(c, budget.polish_sweeps, &mut evals), evals)
    };
    #[cfg(feature = "parallel")]
    let polished: Vec<(Candidate, u64)> = queue.par_iter().map(polish_one).collect();
    #[cfg(not(feature = "parallel"))]
    let polished: Vec<(Candidate, u64)> = queue.iter().map(polish_one).collect();

    for (c, e) in polished {
        evaluations += e;
        if better(&c, &best) {
            best = c;
        }
    }
    if let Some((_, c)) = sampled.first() {
        if better(c, &best) {
            best = c.clone();
        }
    }
    SearchOutcome { best, evaluations }
}
