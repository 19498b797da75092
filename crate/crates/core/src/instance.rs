//! Single-file JSON instances: a norm, an optional basis and optional
//! analysis overrides.
//!
//! ```json
//! { "schema": "gbl/1", "dim": 2,
//!   "norm": {"type": "quadratic", "gram": [[1, 0.5], [0.5, 1.25]]},
//!   "basis": {"columns": [[1, 0], [0, 1]]} }
//! ```
//!
//! A missing basis means the canonical one.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spaces::{validate_norm_spec, Basis, NormSpec, NormedSpace};
use crate::SCHEMA;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    /// `columns[i]` is `e_{i+1}`.
    pub columns: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub norm: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisOverrides>,
}

// Field-only mirrors of the norm variants, used to locate deserialization errors.
#[allow(dead_code)]
mod fields {
    use crate::spaces::Exponent;
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Lp {
        pub p: Exponent,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct WeightedLp {
        pub p: Exponent,
        pub weights: Vec<f64>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Quadratic {
        pub gram: Vec<Vec<f64>>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Polyhedral {
        pub rows: Vec<Vec<f64>>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Renorm {
        pub base: serde_json::Value,
        pub columns: Vec<Vec<f64>>,
    }
}

/// Path below a norm object to the first field that fails to deserialize.
/// Tagged enums buffer their content, so the generic path stops at the tag.
fn norm_error_path(norm: serde_json::Value) -> Option<String> {
    use serde_path_to_error::deserialize as de;
    let serde_json::Value::Object(mut map) = norm else {
        return None;
    };
    let tag = map.remove("type")?;
    let body = serde_json::Value::Object(map);
    let path = |e: serde_path_to_error::Error<serde_json::Error>| {
        let p = e.path().to_string();
        if p == "." {
            String::new()
        } else {
            format!(".{p}")
        }
    };
    match tag.as_str()? {
        "lp" => de::<_, fields::Lp>(body).err().map(path),
        "weighted_lp" => de::<_, fields::WeightedLp>(body).err().map(path),
        "quadratic" => de::<_, fields::Quadratic>(body).err().map(path),
        "polyhedral" => de::<_, fields::Polyhedral>(body).err().map(path),
        "suppression_renorm" => match de::<_, fields::Renorm>(body) {
            Err(e) => Some(path(e)),
            Ok(r) => norm_error_path(r.base).map(|p| format!(".base{p}")),
        },
        _ => None,
    }
}

/// A parsed and validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub space: NormedSpace,
    pub basis: Basis,
}

impl Instance {
    /// Parses JSON text; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            if path.starts_with("norm") {
                if let Some(norm) = serde_json::from_str::<serde_json::Value>(text)
                    .ok()
                    .and_then(|v| v.get("norm").cloned())
                {
                    if let Some(sub) = norm_error_path(norm) {
                        path = format!("norm{sub}");
                    }
                }
            }
            if path == "." || path.is_empty() {
                Error::Instance(format!("invalid JSON: {}", e.inner()))
            } else {
                Error::Instance(format!("field `{path}`: {}", e.inner()))
            }
        })?;
        Self::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if let Some(s) = &file.schema {
            if s != SCHEMA {
                return Err(Error::Instance(format!(
                    "field `schema`: unsupported schema {s:?}, expected {SCHEMA:?}"
                )));
            }
        }
        if file.dim == 0 {
            return Err(Error::Instance("field `dim`: must be positive".into()));
        }
        let report = validate_norm_spec(&file.norm, file.dim);
        if !report.accepted() {
            return Err(Error::Instance(format!("field `norm`: {report}")));
        }
        let space = NormedSpace::new(file.dim, file.norm.clone())
            .map_err(|e| Error::Instance(format!("field `norm`: {e}")))?;
        let basis = match &file.basis {
            None => Basis::canonical(file.dim),
            Some(b) => {
                if b.columns.len() != file.dim || b.columns.iter().any(|c| c.len() != file.dim) {
                    return Err(Error::Instance(format!(
                        "field `basis.columns`: expected {0} columns of length {0}",
                        file.dim
                    )));
                }
                Basis::from_columns(&b.columns)
                    .map_err(|e| Error::Instance(format!("field `basis.columns`: {e}")))?
            }
        };
        if let Some(t) = file.analysis.as_ref().and_then(|a| a.tol) {
            if !t.is_finite() {
                return Err(Error::Instance(
                    "field `analysis.tol`: must be finite".into(),
                ));
            }
        }
        Ok(Instance { file, space, basis })
    }

    /// Wraps an existing space and basis.
    pub fn new(name: Option<String>, space: NormedSpace, basis: &Basis) -> Self {
        let canonical = *basis == Basis::canonical(space.dim());
        let file = InstanceFile {
            schema: Some(SCHEMA.into()),
            name,
            dim: space.dim(),
            norm: space.spec().clone(),
            basis: (!canonical).then(|| BasisSpec {
                columns: basis.columns(),
            }),
            analysis: None,
        };
        Instance {
            file,
            space,
            basis: basis.clone(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.file.name.as_deref()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("instance serializes")
    }

    /// Compact serialization with fixed field order and shortest round-trip
    /// numbers.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.file).expect("instance serializes")
    }

    /// SHA-256 of [`Instance::canonical_json`], lowercase hex.
    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
