//! Finite-dimensional normed spaces and bases with their biorthogonal
//! functionals.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// Default bound on the condition number of a basis matrix.
pub const COND_BOUND: f64 = 1e12;

/// Maximum `|D V - I|` entry accepted for a basis.
pub const BIORTHOGONALITY_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

/// Exponent of an `l_p` norm. Serialized as a number, or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    fn is_valid(self) -> bool {
        match self {
            Exponent::Finite(p) => p.is_finite() && p >= 1.0,
            Exponent::Infinity => true,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent::Finite(p)),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Closed-form norm families on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Lp {
        p: Exponent,
    },
    /// `‖x‖ = ‖(w_1 x_1, ..., w_n x_n)‖_p`.
    WeightedLp {
        p: Exponent,
        weights: Vec<f64>,
    },
    /// `‖x‖ = sqrt(xᵀ G x)`.
    Quadratic {
        gram: Vec<Vec<f64>>,
    },
    /// `‖x‖ = max_k |⟨f_k, x⟩|`.
    Polyhedral {
        rows: Vec<Vec<f64>>,
    },
    /// `⦀x⦀ = max over nonempty A of ‖P_A x‖_base`, projections taken with
    /// respect to the basis whose columns are given.
    SuppressionRenorm {
        base: Box<NormSpec>,
        columns: Vec<Vec<f64>>,
    },
}

impl NormSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            NormSpec::Lp { .. } => "lp",
            NormSpec::WeightedLp { .. } => "weighted_lp",
            NormSpec::Quadratic { .. } => "quadratic",
            NormSpec::Polyhedral { .. } => "polyhedral",
            NormSpec::SuppressionRenorm { .. } => "suppression_renorm",
        }
    }
}

/// Outcome of [`validate_norm_spec`]: one entry per failed check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            f.write_str("accepted")
        } else {
            f.write_str(&self.failures.join("; "))
        }
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize) -> Option<DMatrix<f64>> {
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub(crate) fn matrix_from_columns(cols: &[Vec<f64>], nrows: usize) -> Option<DMatrix<f64>> {
    if cols.iter().any(|c| c.len() != nrows) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, cols.len(), |i, j| cols[j][i]))
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub(crate) fn columns_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

fn all_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> bool {
    it.all(|v| v.is_finite())
}

/// Checks every invariant of a norm specification in dimension `dim`.
pub fn validate_norm_spec(spec: &NormSpec, dim: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    if dim == 0 {
        report.fail("dim must be positive");
        return report;
    }
    match spec {
        NormSpec::Lp { p } => {
            if !p.is_valid() {
                report.fail(format!("p = {p} is outside [1, inf]"));
            }
        }
        NormSpec::WeightedLp { p, weights } => {
            if !p.is_valid() {
                report.fail(format!("p = {p} is outside [1, inf]"));
            }
            if weights.len() != dim {
                report.fail(format!(
                    "weights has length {}, expected {dim}",
                    weights.len()
                ));
            }
            if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                report.fail("weights must be finite and strictly positive");
            }
        }
        NormSpec::Quadratic { gram } => {
            let Some(g) = (gram.len() == dim)
                .then(|| matrix_from_rows(gram, dim))
                .flatten()
            else {
                report.fail(format!("gram must be a {dim}x{dim} matrix"));
                return report;
            };
            if !all_finite(g.iter()) {
                report.fail("gram has non-finite entries");
                return report;
            }
            let asym = (&g - g.transpose()).amax();
            if asym > SYMMETRY_TOL {
                report.fail(format!("gram is not symmetric (max asymmetry {asym:e})"));
            }
            let sym = (&g + g.transpose()) * 0.5;
            let eig = sym.symmetric_eigenvalues();
            let min = eig.min();
            if !(min > 0.0) || nalgebra::Cholesky::new(sym).is_none() {
                report.fail(format!(
                    "gram is not positive definite (smallest eigenvalue {min:e})"
                ));
            }
        }
        NormSpec::Polyhedral { rows } => {
            if rows.is_empty() {
                report.fail("polyhedral norm needs at least one functional row");
                return report;
            }
            let Some(f) = matrix_from_rows(rows, dim) else {
                report.fail(format!("every functional row must have length {dim}"));
                return report;
            };
            if !all_finite(f.iter()) {
                report.fail("functional rows have non-finite entries");
                return report;
            }
            let rank = f.clone().svd(false, false).rank(1e-12 * f.amax().max(1.0));
            if rank < dim {
                report.fail(format!(
                    "functional rows span only a {rank}-dimensional space; the formula is a seminorm"
                ));
            }
        }
        NormSpec::SuppressionRenorm { base, columns } => {
            let inner = validate_norm_spec(base, dim);
            report
                .failures
                .extend(inner.failures.into_iter().map(|f| format!("base: {f}")));
            if dim > crate::SUBSET_CAP {
                report.fail(format!(
                    "suppression renorm needs dim <= {}",
                    crate::SUBSET_CAP
                ));
            }
            match (columns.len() == dim)
                .then(|| matrix_from_columns(columns, dim))
                .flatten()
            {
                Some(m) => {
                    if let Err(e) = make_basis(&m) {
                        report.fail(format!("columns: {e}"));
                    }
                }
                None => report.fail(format!("columns must be {dim} vectors of length {dim}")),
            }
        }
    }
    report
}

#[derive(Clone, Debug)]
enum Compiled {
    Lp(Exponent),
    WeightedLp(Exponent, Vec<f64>),
    Quadratic(DMatrix<f64>),
    Polyhedral(DMatrix<f64>),
    Renorm {
        base: Box<NormedSpace>,
        basis: Basis,
    },
}

/// `R^n` with a validated norm.
#[derive(Clone, Debug)]
pub struct NormedSpace {
    dim: usize,
    spec: NormSpec,
    compiled: Compiled,
}

fn lp(p: Exponent, it: impl Iterator<Item = f64> + Clone) -> f64 {
    match p {
        Exponent::Infinity => it.fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(1.0) => it.map(f64::abs).sum(),
        Exponent::Finite(2.0) => {
            let scale = it.clone().fold(0.0, |m: f64, v| m.max(v.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * it.map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
        }
        Exponent::Finite(p) => {
            let scale = it.clone().fold(0.0, |m: f64, v| m.max(v.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale
                * it.map(|v| (v.abs() / scale).powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
        }
    }
}

pub(crate) fn quadratic_form(g: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for j in 0..n {
        let col = g.column(j);
        let mut s = 0.0;
        for i in 0..n {
            s += col[i] * x[i];
        }
        acc += s * x[j];
    }
    acc
}

impl NormedSpace {
    pub fn new(dim: usize, spec: NormSpec) -> Result<Self> {
        let report = validate_norm_spec(&spec, dim);
        if !report.accepted() {
            return Err(Error::InvalidNorm(report));
        }
        let compiled = match &spec {
            NormSpec::Lp { p } => Compiled::Lp(*p),
            NormSpec::WeightedLp { p, weights } => Compiled::WeightedLp(*p, weights.clone()),
            NormSpec::Quadratic { gram } => {
                let g = matrix_from_rows(gram, dim).expect("validated");
                Compiled::Quadratic((&g + g.transpose()) * 0.5)
            }
            NormSpec::Polyhedral { rows } => {
                Compiled::Polyhedral(matrix_from_rows(rows, dim).expect("validated"))
            }
            NormSpec::SuppressionRenorm { base, columns } => Compiled::Renorm {
                base: Box::new(NormedSpace::new(dim, (**base).clone())?),
                basis: make_basis(&matrix_from_columns(columns, dim).expect("validated"))?,
            },
        };
        Ok(NormedSpace {
            dim,
            spec,
            compiled,
        })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        let p = if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        };
        Self::new(dim, NormSpec::Lp { p })
    }

    pub fn quadratic(gram: &DMatrix<f64>) -> Result<Self> {
        Self::new(
            gram.nrows(),
            NormSpec::Quadratic {
                gram: rows_of(gram),
            },
        )
    }

    pub fn polyhedral(rows: &DMatrix<f64>) -> Result<Self> {
        Self::new(
            rows.ncols(),
            NormSpec::Polyhedral {
                rows: rows_of(rows),
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// Checked norm evaluation.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !all_finite(x.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(self.eval(x.as_slice()))
    }

    /// Unchecked evaluation; `x.len()` must equal `dim`.
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        match &self.compiled {
            Compiled::Lp(p) => lp(*p, x.iter().copied()),
            Compiled::WeightedLp(p, w) => lp(*p, x.iter().zip(w).map(|(a, b)| a * b)),
            Compiled::Quadratic(g) => quadratic_form(g, x).max(0.0).sqrt(),
            Compiled::Polyhedral(f) => {
                let mut m: f64 = 0.0;
                for k in 0..f.nrows() {
                    let row = f.row(k);
                    let mut s = 0.0;
                    for i in 0..x.len() {
                        s += row[i] * x[i];
                    }
                    m = m.max(s.abs());
                }
                m
            }
            Compiled::Renorm { base, basis } => {
                let c = basis.duals() * DVector::from_column_slice(x);
                let n = self.dim;
                let v = basis.vectors();
                let mut y = vec![0.0; n];
                let mut best: f64 = 0.0;
                for mask in 1u32..(1u32 << n) {
                    y.iter_mut().for_each(|e| *e = 0.0);
                    for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                        let col = v.column(i);
                        for r in 0..n {
                            y[r] += c[i] * col[r];
                        }
                    }
                    best = best.max(base.eval(&y));
                }
                best
            }
        }
    }

    /// Gram matrix when the norm is Euclidean-type (quadratic, or `l_2` with
    /// or without weights).
    pub fn gram(&self) -> Option<DMatrix<f64>> {
        match &self.compiled {
            Compiled::Quadratic(g) => Some(g.clone()),
            Compiled::Lp(Exponent::Finite(p)) if *p == 2.0 => {
                Some(DMatrix::identity(self.dim, self.dim))
            }
            Compiled::WeightedLp(Exponent::Finite(p), w) if *p == 2.0 => Some(
                DMatrix::from_diagonal(&DVector::from_iterator(self.dim, w.iter().map(|v| v * v))),
            ),
            _ => None,
        }
    }

    /// Functional rows when the unit ball is a polytope given by an
    /// H-representation (polyhedral, `l_inf`).
    pub fn functional_rows(&self) -> Option<DMatrix<f64>> {
        match &self.compiled {
            Compiled::Polyhedral(f) => Some(f.clone()),
            Compiled::Lp(Exponent::Infinity) => Some(DMatrix::identity(self.dim, self.dim)),
            Compiled::WeightedLp(Exponent::Infinity, w) => {
                Some(DMatrix::from_diagonal(&DVector::from_column_slice(w)))
            }
            _ => None,
        }
    }

    /// Unit-ball vertices of `l_1` type norms, which are known in closed form.
    pub(crate) fn cross_polytope_vertices(&self) -> Option<Vec<Vector>> {
        let scale: Vec<f64> = match &self.compiled {
            Compiled::Lp(Exponent::Finite(p)) if *p == 1.0 => vec![1.0; self.dim],
            Compiled::WeightedLp(Exponent::Finite(p), w) if *p == 1.0 => {
                w.iter().map(|v| 1.0 / v).collect()
            }
            _ => return None,
        };
        let mut out = Vec::with_capacity(2 * self.dim);
        for (i, s) in scale.iter().enumerate() {
            for sign in [1.0, -1.0] {
                let mut v = Vector::zeros(self.dim);
                v[i] = sign * s;
                out.push(v);
            }
        }
        Some(out)
    }

    /// Whether the norm depends only on coordinate magnitudes and is monotone
    /// in each of them.
    pub(crate) fn is_absolute(&self) -> bool {
        matches!(self.compiled, Compiled::Lp(_) | Compiled::WeightedLp(..))
    }

    /// The basis the renorm was built against, if this is a renormed space.
    pub(crate) fn renorm_basis(&self) -> Option<&Basis> {
        match &self.compiled {
            Compiled::Renorm { basis, .. } => Some(basis),
            _ => None,
        }
    }
}

/// Norm of `x` in `space`.
pub fn norm(space: &NormedSpace, x: &Vector) -> Result<f64> {
    space.norm(x)
}

/// Basis vectors `e_1..e_n` (columns) and biorthogonal functionals
/// `e*_1..e*_n` (rows of the dual matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    vectors: DMatrix<f64>,
    duals: DMatrix<f64>,
}

/// Builds a basis from a column matrix with the default conditioning bound.
pub fn make_basis(columns: &DMatrix<f64>) -> Result<Basis> {
    Basis::with_bound(columns, COND_BOUND)
}

impl Basis {
    pub fn canonical(n: usize) -> Self {
        Basis {
            vectors: DMatrix::identity(n, n),
            duals: DMatrix::identity(n, n),
        }
    }

    pub fn with_bound(columns: &DMatrix<f64>, cond_bound: f64) -> Result<Self> {
        let n = columns.nrows();
        if columns.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: columns.ncols(),
            });
        }
        if !all_finite(columns.iter()) {
            return Err(Error::NonFinite);
        }
        let sv = columns.clone().svd(false, false).singular_values;
        let (max, min) = (sv.max(), sv.min());
        if min == 0.0 || n == 0 {
            return Err(Error::Singular);
        }
        let cond = max / min;
        if cond > cond_bound {
            return Err(Error::IllConditioned {
                cond,
                bound: cond_bound,
            });
        }
        let duals = columns.clone().try_inverse().ok_or(Error::Singular)?;
        let residual = (&duals * columns - DMatrix::<f64>::identity(n, n)).amax();
        if residual > BIORTHOGONALITY_TOL {
            return Err(Error::Biorthogonality {
                residual,
                tol: BIORTHOGONALITY_TOL,
            });
        }
        Ok(Basis {
            vectors: columns.clone(),
            duals,
        })
    }

    /// `columns[i]` is the basis vector `e_{i+1}`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let m = matrix_from_columns(columns, n).ok_or(Error::Instance(format!(
            "basis columns must be {n} vectors of length {n}"
        )))?;
        make_basis(&m)
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn duals(&self) -> &DMatrix<f64> {
        &self.duals
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.vectors.column(i).into_owned()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        columns_of(&self.vectors)
    }

    pub fn coefficients(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(&self.duals * x)
    }

    /// `Σ c_i e_i`.
    pub fn synthesize(&self, coeffs: &Vector) -> Vector {
        &self.vectors * coeffs
    }

    /// `‖e_i‖` for every basis vector.
    pub fn element_norms(&self, space: &NormedSpace) -> Vec<f64> {
        self.vectors
            .column_iter()
            .map(|c| space.eval(c.clone_owned().as_slice()))
            .collect()
    }

    /// Each `e_i` is a nonzero multiple of a distinct canonical vector.
    pub(crate) fn is_coordinate_aligned(&self) -> bool {
        let n = self.dim();
        let mut seen = vec![false; n];
        for col in self.vectors.column_iter() {
            let nz: Vec<usize> = (0..n).filter(|&r| col[r] != 0.0).collect();
            match nz.as_slice() {
                [r] if !seen[*r] => seen[*r] = true,
                _ => return false,
            }
        }
        true
    }

    pub(crate) fn approx_eq(&self, other: &Basis, tol: f64) -> bool {
        self.dim() == other.dim()
            && (&self.vectors - &other.vectors).amax()
                <= tol * self.vectors.amax().max(other.vectors.amax()).max(1.0)
    }
}

/// Biorthogonal coefficients `(e*_1(x), ..., e*_n(x))`.
pub fn dual_coefficients(basis: &Basis, x: &Vector) -> Result<Vector> {
    basis.coefficients(x)
}
