//! Constructive links between unconditionality and greedy-operator bounds.
//!
//! A pair `x`, `y` of disjointly supported vectors with `‖x + y‖ < ‖x‖` is
//! turned into a vector `z = x + t y` whose greedy set is `supp(x)` and whose
//! greedy projection is longer than `z` itself. The function
//! `φ(t) = ‖x + t y‖` is convex with `φ(1) < φ(0)`, so `φ(t) < φ(0)` on all
//! of `(0, 1]`; restricting `t` so the coefficients of `x` still dominate
//! makes `supp(x)` a greedy set of `z`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::{
    self, analyze, witness_ratio, Analysis, Budget, Constant, ConstantEstimate, Witness,
};
use crate::error::{Error, Result};
use crate::greedy::{complement, project_coeffs};
use crate::search::{self, Objective};
use crate::spaces::{Basis, NormSpec, NormedSpace, Vector};
use crate::{SCHEMA, SUBSET_CAP, TIE_TOL};

/// Disjointly supported `x`, `y` with `‖x + y‖ < ‖x‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointViolation {
    pub x: Vector,
    pub y: Vector,
    /// `‖x‖ - ‖x + y‖`.
    pub gap: f64,
}

fn support(c: &Vector) -> Vec<usize> {
    (0..c.len()).filter(|&i| c[i].abs() > TIE_TOL).collect()
}

impl DisjointViolation {
    /// Checks disjointness of the coefficient supports and the strict gap.
    pub fn new(space: &NormedSpace, basis: &Basis, x: Vector, y: Vector) -> Result<Self> {
        let a = basis.coefficients(&x)?;
        let b = basis.coefficients(&y)?;
        if support(&a).iter().any(|&i| b[i].abs() > TIE_TOL) {
            return Err(Error::Contract("supports of x and y overlap".into()));
        }
        let gap = space.norm(&x)? - space.norm(&(&x + &y))?;
        if !(gap > 0.0) {
            return Err(Error::Contract(format!(
                "‖x + y‖ is not below ‖x‖ (gap {gap:e})"
            )));
        }
        Ok(DisjointViolation { x, y, gap })
    }
}

/// Splits `w` along `set`: `x = P_A w`, `y = w - x`, rescaled so `‖w‖ = 1`.
pub(crate) fn split_witness(
    space: &NormedSpace,
    basis: &Basis,
    w: &Vector,
    set: &[usize],
) -> Option<DisjointViolation> {
    let scale = space.norm(w).ok()?;
    if !(scale > 0.0) {
        return None;
    }
    let c = basis.coefficients(w).ok()? / scale;
    let rest = complement(basis.dim(), set);
    let x = project_coeffs(basis, &c, set);
    let y = project_coeffs(basis, &c, &rest);
    DisjointViolation::new(space, basis, x, y).ok()
}

/// `z`, `N = |Λ|`, `Λ` with `‖G_N z‖/‖z‖ = ratio > 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyViolationCertificate {
    pub z: Vector,
    pub n: usize,
    /// 0-based; serialized 1-based.
    pub lambda: Vec<usize>,
    pub ratio: f64,
    pub t_star: f64,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    schema: String,
    kind: String,
    z: Vec<f64>,
    #[serde(rename = "N")]
    n: usize,
    lambda: Vec<usize>,
    ratio: f64,
    t_star: f64,
}

impl Serialize for GreedyViolationCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson {
            schema: SCHEMA.into(),
            kind: "greedy_violation".into(),
            z: self.z.as_slice().to_vec(),
            n: self.n,
            lambda: self.lambda.iter().map(|i| i + 1).collect(),
            ratio: self.ratio,
            t_star: self.t_star,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GreedyViolationCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CertificateJson::deserialize(d)?;
        if raw.kind != "greedy_violation" {
            return Err(D::Error::custom(format!("unexpected kind {:?}", raw.kind)));
        }
        if raw.lambda.contains(&0) {
            return Err(D::Error::custom("lambda indices are 1-based"));
        }
        Ok(GreedyViolationCertificate {
            z: Vector::from_vec(raw.z),
            n: raw.n,
            lambda: raw.lambda.into_iter().map(|i| i - 1).collect(),
            ratio: raw.ratio,
            t_star: raw.t_star,
        })
    }
}

impl GreedyViolationCertificate {
    /// Re-evaluates the ratio from raw inputs; succeeds only when `Λ` is a
    /// greedy set of `z`, `|Λ| = N` and the ratio exceeds `1 + 1e-12`.
    pub fn verify(&self, space: &NormedSpace, basis: &Basis) -> Result<f64> {
        if self.lambda.len() != self.n {
            return Err(Error::Contract("|lambda| differs from N".into()));
        }
        let r = witness_ratio(space, basis, Constant::Cw, &self.z, &self.lambda)?;
        if r > 1.0 + TIE_TOL {
            Ok(r)
        } else {
            Err(Error::Contract(format!("ratio {r} does not exceed 1")))
        }
    }
}

const TERNARY_STEPS: usize = 200;

/// Turns a disjoint violation into a greedy-operator violation.
///
/// `t` ranges over `(0, t_max]` with
/// `t_max = min(1, min_{i∈supp x} |x_i| / max_j |y_j|)`, so `supp(x)` stays a
/// greedy set of `x + t y`; the convex `φ(t) = ‖x + t y‖` is minimized there
/// by ternary search.
pub fn witness_transfer(
    space: &NormedSpace,
    basis: &Basis,
    v: &DisjointViolation,
) -> Result<GreedyViolationCertificate> {
    let a = basis.coefficients(&v.x)?;
    let b = basis.coefficients(&v.y)?;
    let supp = support(&a);
    if supp.is_empty() || b.amax() <= TIE_TOL {
        return Err(Error::Contract(
            "degenerate violation: x or y is zero".into(),
        ));
    }
    if supp.iter().any(|&i| b[i].abs() > TIE_TOL) {
        return Err(Error::Contract("supports of x and y overlap".into()));
    }
    let nx = space.norm(&v.x)?;
    let phi = |t: f64| space.eval((&v.x + &v.y * t).as_slice());

    let min_x = supp.iter().fold(f64::INFINITY, |m, &i| m.min(a[i].abs()));
    let t_max = (min_x / b.amax()).min(1.0);

    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..TERNARY_STEPS {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if phi(m1) <= phi(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut t = if mid > 0.0 && phi(mid) < phi(t_max) {
        mid
    } else {
        t_max
    };

    // rounding at the cut can break the tie by an ulp; back off slightly
    for _ in 0..64 {
        let z = &v.x + &v.y * t;
        match witness_ratio(space, basis, Constant::Cw, &z, &supp) {
            Ok(ratio) if ratio > 1.0 && phi(t) < nx => {
                return Ok(GreedyViolationCertificate {
                    z,
                    n: supp.len(),
                    lambda: supp,
                    ratio,
                    t_star: t,
                });
            }
            Ok(_) => break,
            Err(Error::InvalidSelection) => t *= 1.0 - 1e-9,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Contract(
        "transfer did not produce a ratio above 1".into(),
    ))
}

/// Result of looking for a disjoint violation.
#[derive(Clone, Debug, PartialEq)]
pub enum ViolationSearch {
    Found(DisjointViolation),
    /// `K_su = 1` was established exactly; no violation exists.
    ProvedAbsent,
    /// The search found nothing; for non-exact norms this proves nothing.
    Inconclusive,
}

impl ViolationSearch {
    pub fn violation(&self) -> Option<&DisjointViolation> {
        match self {
            ViolationSearch::Found(v) => Some(v),
            _ => None,
        }
    }
}

/// Looks for `x`, `y` disjointly supported with `‖x + y‖ < ‖x‖`. For
/// Euclidean-type and low-dimensional polyhedral norms the exact `K_su`
/// maximizer is split along its subset; otherwise random restarts are used.
pub fn find_disjoint_violation(
    space: &NormedSpace,
    basis: &Basis,
    budget: &Budget,
) -> Result<ViolationSearch> {
    if let Some(p) = constants::exact_profile(space, basis)? {
        let mut subsets: Vec<_> = p
            .subsets
            .iter()
            .filter(|s| s.ratio > 1.0 + TIE_TOL)
            .collect();
        if subsets.is_empty() {
            return Ok(ViolationSearch::ProvedAbsent);
        }
        subsets.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
        return Ok(subsets
            .iter()
            .find_map(|s| split_witness(space, basis, &s.x, &s.set))
            .map_or(ViolationSearch::Inconclusive, ViolationSearch::Found));
    }
    let out = search::run(space, basis, budget, Objective::Suppression, &[]);
    if out.best.ratio > 1.0 + TIE_TOL {
        let w = basis.synthesize(&out.best.coeffs);
        if let Some(v) = split_witness(space, basis, &w, &out.best.set) {
            return Ok(ViolationSearch::Found(v));
        }
    }
    Ok(ViolationSearch::Inconclusive)
}

/// Output of [`hilbert_orthogonality_witness`].
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertWitness {
    /// 0-based pair.
    pub i: usize,
    pub j: usize,
    /// `±1`.
    pub epsilon: f64,
    pub t: f64,
    pub certificate: GreedyViolationCertificate,
}

impl Serialize for HilbertWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HilbertWitness", 5)?;
        st.serialize_field("i", &(self.i + 1))?;
        st.serialize_field("j", &(self.j + 1))?;
        st.serialize_field("epsilon", &self.epsilon)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.end()
    }
}

fn hilbert_pair(gram: &DMatrix<f64>, i: usize, j: usize) -> Result<Option<(f64, f64, Vector)>> {
    let n = gram.nrows();
    if i == j {
        return Err(Error::Contract("i and j must differ".into()));
    }
    for index in [i, j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, dim: n });
        }
    }
    let g = gram[(i, j)];
    if g.abs() <= TIE_TOL {
        return Ok(None);
    }
    let epsilon = -g.signum();
    // minimizer of G_ii - 2t|G_ij| + t² G_jj; Λ = {i} needs t < 1
    let t_opt = g.abs() / gram[(j, j)];
    let t = if t_opt >= 1.0 { 1.0 - 1e-9 } else { t_opt };
    let mut z = Vector::zeros(n);
    z[i] = 1.0;
    z[j] = epsilon * t;
    Ok(Some((epsilon, t, z)))
}

/// For the canonical basis of `(R^n, sqrt(xᵀGx))`: if `⟨e_i, e_j⟩ = G_ij ≠ 0`,
/// the vector `z = e_i + ε t e_j` with `ε = -sign(G_ij)`, `t = |G_ij|/G_jj`
/// has `‖G_1 z‖ = ‖e_i‖ > ‖z‖`. Returns `None` when `G_ij = 0`.
pub fn hilbert_orthogonality_witness(
    gram: &DMatrix<f64>,
    i: usize,
    j: usize,
) -> Result<Option<HilbertWitness>> {
    let space = NormedSpace::quadratic(gram)?;
    let basis = Basis::canonical(gram.nrows());
    let Some((epsilon, t, z)) = hilbert_pair(gram, i, j)? else {
        return Ok(None);
    };
    let ratio = witness_ratio(&space, &basis, Constant::Cw, &z, &[i])?;
    Ok(Some(HilbertWitness {
        i,
        j,
        epsilon,
        t,
        certificate: GreedyViolationCertificate {
            z,
            n: 1,
            lambda: vec![i],
            ratio,
            t_star: t,
        },
    }))
}

/// Hilbert witnesses for every ordered pair of a Euclidean-type space with an
/// arbitrary basis, computed on the basis Gram matrix `VᵀGV` and mapped back.
/// Returns `None` when the norm is not Euclidean.
pub fn hilbert_witnesses(
    space: &NormedSpace,
    basis: &Basis,
) -> Result<Option<Vec<HilbertWitness>>> {
    let Some(g) = space.gram() else {
        return Ok(None);
    };
    let h = basis.vectors().transpose() * g * basis.vectors();
    let h = (&h + h.transpose()) * 0.5;
    let n = h.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if let Some((epsilon, t, c)) = hilbert_pair(&h, i, j)? {
                let z = basis.synthesize(&c);
                let ratio = witness_ratio(space, basis, Constant::Cw, &z, &[i])?;
                out.push(HilbertWitness {
                    i,
                    j,
                    epsilon,
                    t,
                    certificate: GreedyViolationCertificate {
                        z,
                        n: 1,
                        lambda: vec![i],
                        ratio,
                        t_star: t,
                    },
                });
            }
        }
    }
    Ok(Some(out))
}

/// The equivalent norm `⦀x⦀ = max_{A ≠ ∅} ‖P_A x‖`, under which `basis` is
/// 1-suppression unconditional: `⦀P_B x⦀ = max_A ‖P_{A∩B} x‖ ≤ ⦀x⦀`.
pub fn renorm_suppression(space: &NormedSpace, basis: &Basis) -> Result<NormedSpace> {
    let n = space.dim();
    if n > SUBSET_CAP {
        return Err(Error::DimensionGuard {
            dim: n,
            cap: SUBSET_CAP,
        });
    }
    if basis.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.dim(),
        });
    }
    NormedSpace::new(
        n,
        NormSpec::SuppressionRenorm {
            base: Box::new(space.spec().clone()),
            columns: basis.columns(),
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    /// `K_su = 1` exactly and no greedy ratio above 1 was found.
    #[serde(rename = "proved-1-unconditional")]
    Proved1Unconditional,
    /// `K_su > 1` and the transfer produced a greedy violation.
    CertifiedViolation,
    /// Search-based `K_su` found no violation.
    Inconclusive,
    /// The two sides disagree; this is a bug.
    Inconsistent,
}

/// Both sides of the equivalence `C_w = 1 ⟺ K_su = 1` for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub ksu: ConstantEstimate,
    pub cw: ConstantEstimate,
    pub consistent: bool,
    pub status: VerdictStatus,
    pub explanation: String,
    #[serde(skip)]
    pub violation: Option<DisjointViolation>,
    pub certificate: Option<GreedyViolationCertificate>,
}

/// Transfers at most this many subset splits when looking for the strongest
/// certificate.
const MAX_TRANSFERS: usize = 64;

/// Judges an already computed analysis. `cw` in the verdict is lifted to the
/// transfer certificate when that is stronger.
pub fn judge(space: &NormedSpace, basis: &Basis, analysis: &Analysis, tol: f64) -> Result<Verdict> {
    let ksu = analysis.ksu.clone();
    let mut cw = analysis.cw.clone();

    if ksu.value <= 1.0 + tol {
        let (consistent, status, explanation) = if !ksu.is_exact() {
            (
                true,
                VerdictStatus::Inconclusive,
                "no suppression violation found by search; K_su = 1 is not proved".to_string(),
            )
        } else if cw.value > 1.0 + tol {
            (
                false,
                VerdictStatus::Inconsistent,
                format!(
                    "K_su = 1 exactly, yet a greedy ratio {} > 1 was found",
                    cw.value
                ),
            )
        } else {
            (
                true,
                VerdictStatus::Proved1Unconditional,
                "K_su = 1 exactly, hence C_w = C_t = 1".to_string(),
            )
        };
        return Ok(Verdict {
            ksu,
            cw,
            consistent,
            status,
            explanation,
            violation: None,
            certificate: None,
        });
    }

    let mut splits: Vec<(Vector, Vec<usize>)> =
        vec![(ksu.witness.x.clone(), ksu.witness.set.clone())];
    if let Some(p) = constants::exact_profile(space, basis)? {
        let mut subsets: Vec<_> = p
            .subsets
            .into_iter()
            .filter(|s| s.ratio > 1.0 + tol)
            .collect();
        subsets.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
        splits.extend(subsets.into_iter().map(|s| (s.x, s.set)));
    }
    let mut best: Option<(DisjointViolation, GreedyViolationCertificate)> = None;
    for (w, set) in splits.into_iter().take(MAX_TRANSFERS) {
        let Some(v) = split_witness(space, basis, &w, &set) else {
            continue;
        };
        if let Ok(cert) = witness_transfer(space, basis, &v) {
            if cert.verify(space, basis).is_ok()
                && best.as_ref().is_none_or(|(_, b)| cert.ratio > b.ratio)
            {
                best = Some((v, cert));
            }
        }
    }

    Ok(match best {
        Some((v, cert)) => {
            if cert.ratio > cw.value {
                cw.value = cert.ratio;
                cw.witness = Witness {
                    x: cert.z.clone(),
                    set: cert.lambda.clone(),
                    ratio: cert.ratio,
                };
            }
            Verdict {
                explanation: format!(
                    "K_su = {} > 1; disjoint violation transferred to a greedy ratio {} > 1",
                    ksu.value, cert.ratio
                ),
                ksu,
                cw,
                consistent: true,
                status: VerdictStatus::CertifiedViolation,
                violation: Some(v),
                certificate: Some(cert),
            }
        }
        None => Verdict {
            explanation: format!(
                "K_su = {} > 1 but no greedy violation certificate could be built",
                ksu.value
            ),
            ksu,
            cw,
            consistent: false,
            status: VerdictStatus::Inconsistent,
            violation: None,
            certificate: None,
        },
    })
}

/// Computes `K_su` and `C_w` and checks them against the characterization.
pub fn verify_characterization(
    space: &NormedSpace,
    basis: &Basis,
    tol: f64,
    budget: &Budget,
) -> Result<Verdict> {
    let analysis = analyze(space, basis, budget)?;
    judge(space, basis, &analysis, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn shear() -> NormedSpace {
        NormedSpace::quadratic(&dmatrix![1.0, 0.5; 0.5, 1.25]).unwrap()
    }

    fn summing2() -> NormedSpace {
        NormedSpace::polyhedral(&dmatrix![1.0, 0.0; 1.0, 1.0]).unwrap()
    }

    fn v(a: &[f64]) -> Vector {
        Vector::from_column_slice(a)
    }

    fn quick() -> Budget {
        Budget {
            restarts: 300,
            ..Budget::default()
        }
    }

    #[test]
    fn disjoint_violation_examples() {
        let b = Basis::canonical(2);
        let s = DisjointViolation::new(&shear(), &b, v(&[1.0, 0.0]), v(&[0.0, -0.4])).unwrap();
        assert!((s.gap - (1.0 - 0.8f64.sqrt())).abs() < 1e-15);
        assert!((s.gap - 0.1056).abs() < 1e-4);
        let p = DisjointViolation::new(&summing2(), &b, v(&[0.0, -2.0]), v(&[1.0, 0.0])).unwrap();
        assert_eq!(p.gap, 1.0);
        assert!(DisjointViolation::new(&summing2(), &b, v(&[1.0, 1.0]), v(&[1.0, 0.0])).is_err());
        assert!(DisjointViolation::new(&shear(), &b, v(&[1.0, 0.0]), v(&[0.0, 0.4])).is_err());
    }

    #[test]
    fn transfer_shear() {
        let b = Basis::canonical(2);
        let viol = DisjointViolation::new(&shear(), &b, v(&[1.0, 0.0]), v(&[0.0, -0.4])).unwrap();
        let c = witness_transfer(&shear(), &b, &viol).unwrap();
        assert_eq!(c.t_star, 1.0);
        assert_eq!((c.n, c.lambda.clone()), (1, vec![0]));
        assert!((&c.z - v(&[1.0, -0.4])).amax() < 1e-15);
        assert!((c.ratio - 1.0 / 0.8f64.sqrt()).abs() < 1e-12);
        assert!(c.verify(&shear(), &b).is_ok());
    }

    #[test]
    fn transfer_summing() {
        let b = Basis::canonical(2);
        let viol =
            DisjointViolation::new(&summing2(), &b, v(&[0.0, -2.0]), v(&[1.0, 0.0])).unwrap();
        let c = witness_transfer(&summing2(), &b, &viol).unwrap();
        assert_eq!(c.t_star, 1.0);
        assert_eq!(c.z, v(&[1.0, -2.0]));
        assert_eq!(c.lambda, vec![1]);
        assert_eq!(c.ratio, 2.0);
    }

    #[test]
    fn transfer_clips_t_to_keep_greedy_set() {
        // summing norm in dim 3; max |y| = 1.2 > min |x| = 1, so t_max = 1/1.2
        let s = NormedSpace::polyhedral(&dmatrix![1.0, 0.0, 0.0; 1.0, 1.0, 0.0; 1.0, 1.0, 1.0])
            .unwrap();
        let b = Basis::canonical(3);
        let viol =
            DisjointViolation::new(&s, &b, v(&[0.0, 0.0, -1.0]), v(&[-0.7, 1.2, 0.0])).unwrap();
        assert!((viol.gap - 0.3).abs() < 1e-15);
        let c = witness_transfer(&s, &b, &viol).unwrap();
        assert!(
            c.t_star > 0.0 && c.t_star <= 1.0 / 1.2 + 1e-15,
            "t* = {}",
            c.t_star
        );
        assert_eq!(c.lambda, vec![2]);
        assert!(c.ratio > 1.0);
        assert!(c.verify(&s, &b).is_ok());
    }

    #[test]
    fn transfer_rejects_degenerate() {
        let b = Basis::canonical(2);
        let bad = DisjointViolation {
            x: v(&[0.0, 0.0]),
            y: v(&[1.0, 0.0]),
            gap: 1.0,
        };
        assert!(matches!(
            witness_transfer(&summing2(), &b, &bad),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn tiny_gap_still_certifies() {
        // G = [[1, c], [c, 1]] with small c; the split x = e_1, y = -c e_2 has
        // gap of order c²
        let c = 1e-3;
        let g = dmatrix![1.0, c; c, 1.0];
        let s = NormedSpace::quadratic(&g).unwrap();
        let b = Basis::canonical(2);
        let viol = DisjointViolation::new(&s, &b, v(&[1.0, 0.0]), v(&[0.0, -c])).unwrap();
        assert!(viol.gap > 0.0 && viol.gap < 1e-6);
        let cert = witness_transfer(&s, &b, &viol).unwrap();
        assert!(cert.ratio >= 1.0 / (1.0 - viol.gap));
        assert!(cert.verify(&s, &b).is_ok());
    }

    #[test]
    fn hilbert_examples() {
        let diag = DMatrix::from_diagonal(&v(&[1.0, 2.0, 3.0]));
        assert!(hilbert_orthogonality_witness(&diag, 0, 2)
            .unwrap()
            .is_none());
        let h = hilbert_orthogonality_witness(&dmatrix![1.0, 0.5; 0.5, 1.25], 0, 1)
            .unwrap()
            .unwrap();
        assert_eq!(h.epsilon, -1.0);
        assert!((h.t - 0.4).abs() < 1e-15);
        assert!((h.certificate.ratio - 5f64.sqrt() / 2.0).abs() < 1e-12);
        let h = hilbert_orthogonality_witness(&dmatrix![1.0, 0.1; 0.1, 1.0], 0, 1)
            .unwrap()
            .unwrap();
        assert!((h.certificate.ratio - 1.0 / 0.99f64.sqrt()).abs() < 1e-12);
        assert!((h.certificate.ratio - 1.005038).abs() < 1e-6);
        assert!(hilbert_orthogonality_witness(&diag, 1, 1).is_err());
    }

    #[test]
    fn hilbert_clips_large_t() {
        // |G_12| / G_22 = 2 >= 1
        let g = dmatrix![5.0, 2.0; 2.0, 1.0];
        let h = hilbert_orthogonality_witness(&g, 0, 1).unwrap().unwrap();
        assert!(h.t < 1.0);
        assert!(h.certificate.ratio > 1.0);
    }

    #[test]
    fn find_violations() {
        let l2 = NormedSpace::lp(3, 2.0).unwrap();
        assert_eq!(
            find_disjoint_violation(&l2, &Basis::canonical(3), &quick()).unwrap(),
            ViolationSearch::ProvedAbsent
        );
        let found = find_disjoint_violation(&shear(), &Basis::canonical(2), &quick()).unwrap();
        let viol = found.violation().unwrap();
        // unit-norm split of the eigen-witness: proportional to x = e_1, y = -0.4 e_2
        assert_eq!((viol.x[1], viol.y[0]), (0.0, 0.0));
        assert!((viol.y[1] / viol.x[0] + 0.4).abs() < 1e-12);
        let found = find_disjoint_violation(&summing2(), &Basis::canonical(2), &quick()).unwrap();
        let viol = found.violation().unwrap();
        assert_eq!(
            (viol.x.clone(), viol.y.clone()),
            (v(&[0.0, -2.0]), v(&[1.0, 0.0]))
        );
        assert_eq!(viol.gap, 1.0);
    }

    #[test]
    fn renorm_values() {
        let b = Basis::canonical(2);
        let r = renorm_suppression(&shear(), &b).unwrap();
        assert!((r.norm(&v(&[1.0, -0.4])).unwrap() - 1.0).abs() < 1e-15);
        let r = renorm_suppression(&summing2(), &b).unwrap();
        assert_eq!(r.norm(&v(&[1.0, -2.0])).unwrap(), 2.0);
        let l2 = NormedSpace::lp(4, 2.0).unwrap();
        let r = renorm_suppression(&l2, &Basis::canonical(4)).unwrap();
        let x = v(&[0.3, -1.0, 2.0, 0.5]);
        assert!((r.norm(&x).unwrap() - l2.norm(&x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn verdicts() {
        let b = Basis::canonical(2);
        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        let vd = verify_characterization(&l1, &b, 1e-9, &quick()).unwrap();
        assert!(vd.consistent);
        assert_eq!(vd.status, VerdictStatus::Proved1Unconditional);

        let vd = verify_characterization(&shear(), &b, 1e-9, &quick()).unwrap();
        assert!(vd.consistent);
        assert!((vd.ksu.value - 5f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((vd.certificate.unwrap().ratio - 5f64.sqrt() / 2.0).abs() < 1e-9);

        let vd = verify_characterization(&summing2(), &b, 1e-9, &quick()).unwrap();
        assert!(vd.consistent);
        assert_eq!(vd.ksu.value, 2.0);
        assert!((vd.certificate.unwrap().ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_json_shape() {
        let c = GreedyViolationCertificate {
            z: v(&[1.0, -2.0]),
            n: 1,
            lambda: vec![1],
            ratio: 2.0,
            t_star: 1.0,
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"schema":"gbl/1","kind":"greedy_violation","z":[1.0,-2.0],"N":1,"lambda":[2],"ratio":2.0,"t_star":1.0}"#
        );
        let back: GreedyViolationCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
