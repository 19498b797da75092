//! Estimators for `K_su`, `C_w`, `C_t` and `C_qg`.
//!
//! `K_su` is computed exactly for Euclidean-type norms (one generalized
//! symmetric eigenproblem per coordinate subset), for polyhedral norms in low
//! dimension (a convex function attains its maximum over the unit ball at a
//! vertex), and for structurally 1-unconditional instances. Everything else,
//! and `C_w`/`C_t` in general, is a lower bound carried by a re-evaluable
//! witness.

use nalgebra::{Cholesky, DMatrix};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::greedy::{complement, is_greedy_set, project_coeffs};
use crate::polytope::space_vertices;
use crate::search::{self, Objective};
use crate::spaces::{Basis, NormedSpace, Vector};
use crate::{SUBSET_CAP, TIE_TOL, UNIT_TOL};

/// Search configuration shared by all estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Random unit-sphere samples.
    pub restarts: usize,
    /// Best samples handed to the local polish.
    pub polish: usize,
    /// Pattern-search sweeps per polished candidate.
    pub polish_sweeps: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            restarts: 10_000,
            polish: 8,
            polish_sweeps: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Eigen,
    VertexEnum,
    /// Structural argument: coordinate projections are contractive.
    Lattice,
    Search,
}

/// Which constant an estimate (and its witness ratio) refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    Ksu,
    Cw,
    Ct,
}

/// A vector `x` and a set whose ratio witnesses the estimate. For `Ksu` the
/// set is `A` and the ratio `‖P_A x‖/‖x‖`; for `Cw` and `Ct` it is a greedy
/// set `Λ` of `x` and the ratio is `‖G_N x‖/‖x‖` or `‖x - G_N x‖/‖x‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub x: Vector,
    /// 0-based.
    pub set: Vec<usize>,
    pub ratio: f64,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 3)?;
        st.serialize_field("x", self.x.as_slice())?;
        st.serialize_field("set", &self.set.iter().map(|i| i + 1).collect::<Vec<_>>())?;
        st.serialize_field("ratio", &self.ratio)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub constant: Constant,
    pub value: f64,
    pub exactness: Exactness,
    pub method: Method,
    pub witness: Witness,
    /// Norm evaluations spent.
    pub budget_used: u64,
}

impl ConstantEstimate {
    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }

    /// `value ≤ 1 + UNIT_TOL`.
    pub fn is_one(&self) -> bool {
        self.value <= 1.0 + UNIT_TOL
    }

    /// Recomputes the witness ratio from the raw instance.
    pub fn reevaluate(&self, space: &NormedSpace, basis: &Basis) -> Result<f64> {
        witness_ratio(
            space,
            basis,
            self.constant,
            &self.witness.x,
            &self.witness.set,
        )
    }
}

/// Ratio of `x` and `set` for the given constant, recomputed from scratch.
/// Fails with [`Error::InvalidSelection`] when a `Cw`/`Ct` set is not greedy.
pub fn witness_ratio(
    space: &NormedSpace,
    basis: &Basis,
    constant: Constant,
    x: &Vector,
    set: &[usize],
) -> Result<f64> {
    let c = basis.coefficients(x)?;
    if let Some(&index) = set.iter().find(|&&i| i >= basis.dim()) {
        return Err(Error::IndexOutOfRange {
            index,
            dim: basis.dim(),
        });
    }
    let kept = match constant {
        Constant::Ksu => set.to_vec(),
        Constant::Cw | Constant::Ct => {
            if !is_greedy_set(c.as_slice(), set) {
                return Err(Error::InvalidSelection);
            }
            if constant == Constant::Ct {
                complement(basis.dim(), set)
            } else {
                set.to_vec()
            }
        }
    };
    let nx = space.norm(x)?;
    if nx == 0.0 {
        return Err(Error::Contract("witness vector is zero".into()));
    }
    Ok(space.norm(&project_coeffs(basis, &c, &kept))? / nx)
}

/// Exact `sup_x ‖P_A x‖/‖x‖` for one subset, with a maximizer.
#[derive(Clone, Debug)]
pub struct SubsetBound {
    pub set: Vec<usize>,
    pub ratio: f64,
    pub x: Vector,
}

pub(crate) struct ExactProfile {
    pub method: Method,
    /// Empty for `Lattice`.
    pub subsets: Vec<SubsetBound>,
    /// Unit-ball vertices when the profile came from vertex enumeration.
    pub vertices: Vec<Vector>,
    pub evaluations: u64,
}

impl ExactProfile {
    fn value(&self) -> f64 {
        self.subsets.iter().fold(1.0, |m, s| m.max(s.ratio))
    }
}

fn check_instance(space: &NormedSpace, basis: &Basis) -> Result<()> {
    if space.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: basis.dim(),
        });
    }
    Ok(())
}

fn mask_set(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn normalized(space: &NormedSpace, x: Vector) -> Vector {
    let nx = space.eval(x.as_slice());
    if nx > 0.0 {
        x / nx
    } else {
        x
    }
}

/// Largest generalized eigenvalue of `(P_AᵀGP_A, G)` for the projection onto
/// `set` along `basis`: its square root is `sup ‖P_A x‖_G / ‖x‖_G`. Returns
/// the root and a maximizer.
pub fn rayleigh_subset(gram: &DMatrix<f64>, basis: &Basis, set: &[usize]) -> Result<(f64, Vector)> {
    let n = gram.nrows();
    if basis.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.dim(),
        });
    }
    if set.is_empty() {
        return Err(Error::Contract("subset must be nonempty".into()));
    }
    if let Some(&index) = set.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, dim: n });
    }
    let chol = Cholesky::new(gram.clone())
        .ok_or_else(|| Error::Eigen("gram matrix is not positive definite".into()))?;
    let l = chol.l();

    let mut sel = DMatrix::<f64>::zeros(n, n);
    for &i in set {
        sel[(i, i)] = 1.0;
    }
    let proj = basis.vectors() * sel * basis.duals();
    let m = proj.transpose() * gram * &proj;

    // whitened operator L⁻¹ M L⁻ᵀ
    let y = l
        .solve_lower_triangular(&m)
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let w = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let w = (&w + w.transpose()) * 0.5;
    if !w.iter().all(|v| v.is_finite()) {
        return Err(Error::Eigen("non-finite whitened matrix".into()));
    }
    let eig = w.symmetric_eigen();
    let (imax, lmax) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let u = eig.eigenvectors.column(imax).into_owned();
    let x = l
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    Ok((lmax.max(0.0).sqrt(), x))
}

/// `sup_x ‖P_A x‖_G / ‖x‖_G` for the canonical basis of `(R^n, sqrt(xᵀGx))`.
pub fn rayleigh_su_quadratic(gram: &DMatrix<f64>, set: &[usize]) -> Result<f64> {
    rayleigh_subset(gram, &Basis::canonical(gram.nrows()), set).map(|(r, _)| r)
}

fn is_lattice(space: &NormedSpace, basis: &Basis) -> bool {
    (space.is_absolute() && basis.is_coordinate_aligned())
        || space
            .renorm_basis()
            .is_some_and(|b| b.approx_eq(basis, 1e-12))
}

/// Exact per-subset profile of `K_su` when some exact method applies.
pub(crate) fn exact_profile(space: &NormedSpace, basis: &Basis) -> Result<Option<ExactProfile>> {
    check_instance(space, basis)?;
    let n = space.dim();
    if n > SUBSET_CAP {
        return Err(Error::DimensionGuard {
            dim: n,
            cap: SUBSET_CAP,
        });
    }
    if is_lattice(space, basis) {
        return Ok(Some(ExactProfile {
            method: Method::Lattice,
            subsets: vec![],
            vertices: vec![],
            evaluations: 0,
        }));
    }
    let full = (1u32 << n) - 1;
    if let Some(gram) = space.gram() {
        let mut subsets = Vec::with_capacity(full as usize);
        for mask in 1..full {
            let set = mask_set(n, mask);
            let (ratio, x) = rayleigh_subset(&gram, basis, &set)?;
            subsets.push(SubsetBound {
                set,
                ratio,
                x: normalized(space, x),
            });
        }
        return Ok(Some(ExactProfile {
            method: Method::Eigen,
            subsets,
            vertices: vec![],
            evaluations: 0,
        }));
    }
    if let Some(vertices) = space_vertices(space) {
        let mut evaluations = 0u64;
        let coeffs: Vec<Vector> = vertices.iter().map(|v| basis.duals() * v).collect();
        let norms: Vec<f64> = vertices.iter().map(|v| space.eval(v.as_slice())).collect();
        evaluations += vertices.len() as u64;
        let mut subsets = Vec::with_capacity(full as usize);
        for mask in 1..full {
            let set = mask_set(n, mask);
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (k, c) in coeffs.iter().enumerate() {
                let r = space.eval(project_coeffs(basis, c, &set).as_slice()) / norms[k];
                if r > best.0 {
                    best = (r, k);
                }
            }
            evaluations += coeffs.len() as u64;
            subsets.push(SubsetBound {
                set,
                ratio: best.0,
                x: normalized(space, vertices[best.1].clone()),
            });
        }
        return Ok(Some(ExactProfile {
            method: Method::VertexEnum,
            subsets,
            vertices,
            evaluations,
        }));
    }
    Ok(None)
}

fn unit_witness(space: &NormedSpace, basis: &Basis, constant: Constant) -> Witness {
    let n = basis.dim();
    let set = match constant {
        Constant::Ct => vec![],
        _ => (0..n).collect(),
    };
    Witness {
        x: normalized(space, basis.vector(0)),
        set,
        ratio: 1.0,
    }
}

fn snap(value: f64) -> f64 {
    if (value - 1.0).abs() <= UNIT_TOL {
        1.0
    } else {
        value
    }
}

fn estimate_from_profile(space: &NormedSpace, basis: &Basis, p: &ExactProfile) -> ConstantEstimate {
    let witness = p
        .subsets
        .iter()
        .fold(None::<&SubsetBound>, |best, s| match best {
            Some(b) if b.ratio >= s.ratio => Some(b),
            _ => Some(s),
        })
        .filter(|s| s.ratio > 1.0)
        .map(|s| Witness {
            x: s.x.clone(),
            set: s.set.clone(),
            ratio: witness_ratio(space, basis, Constant::Ksu, &s.x, &s.set).unwrap_or(s.ratio),
        })
        .unwrap_or_else(|| unit_witness(space, basis, Constant::Ksu));
    ConstantEstimate {
        constant: Constant::Ksu,
        value: snap(p.value()),
        exactness: Exactness::Exact,
        method: p.method,
        witness,
        budget_used: p.evaluations,
    }
}

/// Raises the magnitudes in `set` that fall (within the tie tolerance) below
/// the largest outside magnitude, so `set` is greedy without tolerance.
fn snap_to_greedy(mut c: Vector, set: &[usize]) -> Vector {
    let t_out = complement(c.len(), set)
        .into_iter()
        .fold(0.0f64, |m, j| m.max(c[j].abs()));
    for &i in set {
        if c[i].abs() < t_out {
            c[i] = t_out.copysign(c[i]);
        }
    }
    c
}

fn from_search(
    space: &NormedSpace,
    basis: &Basis,
    constant: Constant,
    out: search::SearchOutcome,
) -> ConstantEstimate {
    let coeffs = match constant {
        Constant::Ksu => out.best.coeffs,
        Constant::Cw | Constant::Ct => snap_to_greedy(out.best.coeffs, &out.best.set),
    };
    let x = normalized(space, basis.synthesize(&coeffs));
    let ratio = witness_ratio(space, basis, constant, &x, &out.best.set).unwrap_or(out.best.ratio);
    ConstantEstimate {
        constant,
        value: ratio.max(1.0),
        exactness: Exactness::LowerBound,
        method: Method::Search,
        witness: Witness {
            x,
            set: out.best.set,
            ratio,
        },
        budget_used: out.evaluations,
    }
}

/// `K_su = max over A of sup_x ‖P_A x‖/‖x‖`.
pub fn suppression_constant(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
) -> Result<ConstantEstimate> {
    match exact_profile(space, basis)? {
        Some(p) => Ok(estimate_from_profile(space, basis, &p)),
        None => {
            let out = search::run(space, basis, budget, Objective::Suppression, &[]);
            Ok(from_search(space, basis, Constant::Ksu, out))
        }
    }
}

/// Seed samples for the greedy searches derived from an exact profile: every
/// per-subset maximizer, its split into a greedy violation, and the unit-ball
/// vertices.
fn seeds_from_profile(space: &NormedSpace, basis: &Basis, p: &ExactProfile) -> Vec<Vector> {
    let mut seeds = Vec::new();
    for s in &p.subsets {
        let c = basis.duals() * &s.x;
        seeds.push(c);
        if s.ratio > 1.0 + TIE_TOL {
            if let Some(v) = crate::theorem::split_witness(space, basis, &s.x, &s.set) {
                if let Ok(cert) = crate::theorem::witness_transfer(space, basis, &v) {
                    seeds.push(basis.duals() * &cert.z);
                }
            }
        }
    }
    seeds.extend(p.vertices.iter().map(|v| basis.duals() * v));
    seeds
}

fn greedy_constant(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
    constant: Constant,
    profile: Option<&ExactProfile>,
) -> ConstantEstimate {
    let objective = match constant {
        Constant::Ct => Objective::Residual,
        _ => Objective::Greedy,
    };
    let seeds = profile
        .map(|p| seeds_from_profile(space, basis, p))
        .unwrap_or_default();
    let out = search::run(space, basis, budget, objective, &seeds);
    let mut est = from_search(space, basis, constant, out);
    // K_su = 1 forces C_w = C_t = 1; the search above must agree
    if let Some(p) = profile {
        if p.value() <= 1.0 + UNIT_TOL && est.is_one() {
            est.value = 1.0;
            est.exactness = Exactness::Exact;
            est.method = p.method;
        }
    }
    est
}

/// `C_w = sup ‖G_N x‖/‖x‖` over `x ≠ 0`, `N` and all valid greedy sets.
pub fn cw_constant(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
) -> Result<ConstantEstimate> {
    let profile = exact_profile_or_none(space, basis)?;
    Ok(greedy_constant(
        space,
        basis,
        budget,
        Constant::Cw,
        profile.as_ref(),
    ))
}

/// `C_t = sup ‖x - G_N x‖/‖x‖`.
pub fn ct_constant(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
) -> Result<ConstantEstimate> {
    let profile = exact_profile_or_none(space, basis)?;
    Ok(greedy_constant(
        space,
        basis,
        budget,
        Constant::Ct,
        profile.as_ref(),
    ))
}

fn exact_profile_or_none(space: &NormedSpace, basis: &Basis) -> Result<Option<ExactProfile>> {
    check_instance(space, basis)?;
    if space.dim() > SUBSET_CAP {
        return Ok(None);
    }
    exact_profile(space, basis)
}

/// `C_qg` from already computed `C_w` and `C_t` estimates.
pub fn cqg_from(cw: &ConstantEstimate, ct: &ConstantEstimate) -> ConstantEstimate {
    let winner = if cw.value >= ct.value { cw } else { ct };
    ConstantEstimate {
        exactness: if cw.is_exact() && ct.is_exact() {
            Exactness::Exact
        } else {
            Exactness::LowerBound
        },
        budget_used: cw.budget_used + ct.budget_used,
        ..winner.clone()
    }
}

/// `C_qg = max(C_w, C_t)`, carrying the winning witness.
pub fn cqg_constant(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
) -> Result<ConstantEstimate> {
    let cw = cw_constant(space, basis, budget)?;
    let ct = ct_constant(space, basis, budget)?;
    Ok(cqg_from(&cw, &ct))
}

/// All four constants of one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub ksu: ConstantEstimate,
    pub cw: ConstantEstimate,
    pub ct: ConstantEstimate,
    pub cqg: ConstantEstimate,
}

/// Computes every constant, sharing the exact profile. A search-based `K_su`
/// is lifted to the `C_w`/`C_t` witnesses when those are larger, since every
/// greedy set and its complement are coordinate sets.
pub fn analyze(space: &NormedSpace, basis: &Basis, budget: &Budget) -> Result<Analysis> {
    let profile = exact_profile(space, basis)?;
    let mut ksu = match &profile {
        Some(p) => estimate_from_profile(space, basis, p),
        None => from_search(
            space,
            basis,
            Constant::Ksu,
            search::run(space, basis, budget, Objective::Suppression, &[]),
        ),
    };
    let cw = greedy_constant(space, basis, budget, Constant::Cw, profile.as_ref());
    let ct = greedy_constant(space, basis, budget, Constant::Ct, profile.as_ref());
    if !ksu.is_exact() {
        for est in [&cw, &ct] {
            if est.witness.ratio > ksu.value {
                let set = match est.constant {
                    Constant::Ct => complement(basis.dim(), &est.witness.set),
                    _ => est.witness.set.clone(),
                };
                ksu.value = est.witness.ratio;
                ksu.witness = Witness {
                    x: est.witness.x.clone(),
                    set,
                    ratio: est.witness.ratio,
                };
            }
        }
    }
    let cqg = cqg_from(&cw, &ct);
    Ok(Analysis { ksu, cw, ct, cqg })
}
