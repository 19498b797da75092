//! Builtin instances.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceFile};
use crate::spaces::{rows_of, Exponent, NormSpec};
use crate::SCHEMA;

/// Family name patterns with a short description.
pub const FAMILIES: &[(&str, &str)] = &[
    (
        "l{p}-canonical-{n}",
        "l_p on R^n with the canonical basis; p may be a number or inf",
    ),
    (
        "shear-2",
        "quadratic norm with Gram matrix [[1, 0.5], [0.5, 1.25]], canonical basis",
    ),
    (
        "summing-{n}",
        "polyhedral norm max_k |x_1 + ... + x_k|, canonical basis",
    ),
    (
        "random-quadratic-{n}-{seed}",
        "quadratic norm with Gram matrix AᵀA + 0.5 I, A standard normal",
    ),
];

/// Concrete names used by `--list` and the demo.
pub const EXAMPLES: &[&str] = &[
    "l1-canonical-3",
    "l2-canonical-4",
    "linf-canonical-3",
    "shear-2",
    "summing-2",
    "summing-3",
    "random-quadratic-3-7",
];

const RANDOM_SHIFT: f64 = 0.5;

/// Random symmetric positive-definite `AᵀA + 0.5 I`.
pub fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let g = a.transpose() * &a + DMatrix::identity(n, n) * RANDOM_SHIFT;
    (&g + g.transpose()) * 0.5
}

/// Partial-sum functionals `f_k = (1, ..., 1, 0, ..., 0)` with `k` ones.
pub fn summing_rows(n: usize) -> Vec<Vec<f64>> {
    (1..=n)
        .map(|k| (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn unknown(name: &str) -> Error {
    let families: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
    Error::Instance(format!(
        "unknown gallery instance {name:?}; valid names: {}",
        families.join(", ")
    ))
}

fn parse_dim(s: &str, name: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(n) if (1..=crate::SUBSET_CAP).contains(&n) => Ok(n),
        _ => Err(unknown(name)),
    }
}

fn file(name: &str, dim: usize, norm: NormSpec) -> InstanceFile {
    InstanceFile {
        schema: Some(SCHEMA.into()),
        name: Some(name.into()),
        dim,
        norm,
        basis: None,
        analysis: None,
    }
}

/// The builtin instance called `name`.
pub fn gallery(name: &str) -> Result<Instance> {
    let f = if name == "shear-2" {
        file(
            name,
            2,
            NormSpec::Quadratic {
                gram: vec![vec![1.0, 0.5], vec![0.5, 1.25]],
            },
        )
    } else if let Some(n) = name.strip_prefix("summing-") {
        let n = parse_dim(n, name)?;
        file(
            name,
            n,
            NormSpec::Polyhedral {
                rows: summing_rows(n),
            },
        )
    } else if let Some(rest) = name.strip_prefix("random-quadratic-") {
        let (n, seed) = rest.split_once('-').ok_or_else(|| unknown(name))?;
        let n = parse_dim(n, name)?;
        let seed: u64 = seed.parse().map_err(|_| unknown(name))?;
        file(
            name,
            n,
            NormSpec::Quadratic {
                gram: rows_of(&random_spd(n, seed)),
            },
        )
    } else if let Some(rest) = name.strip_prefix('l') {
        let (p, n) = rest
            .split_once("-canonical-")
            .ok_or_else(|| unknown(name))?;
        let n = parse_dim(n, name)?;
        let p = match p {
            "inf" => Exponent::Infinity,
            p => match p.parse::<f64>() {
                Ok(p) if p.is_finite() && p >= 1.0 => Exponent::Finite(p),
                _ => return Err(unknown(name)),
            },
        };
        file(name, n, NormSpec::Lp { p })
    } else {
        return Err(unknown(name));
    };
    Instance::from_file(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_builds() {
        for name in EXAMPLES {
            let inst = gallery(name).unwrap();
            assert_eq!(inst.name(), Some(*name));
        }
        assert!(FAMILIES.len() >= 4);
    }

    #[test]
    fn summing_three_rows() {
        let inst = gallery("summing-3").unwrap();
        assert_eq!(inst.space.dim(), 3);
        assert_eq!(
            inst.file.norm,
            NormSpec::Polyhedral {
                rows: vec![
                    vec![1.0, 0.0, 0.0],
                    vec![1.0, 1.0, 0.0],
                    vec![1.0, 1.0, 1.0]
                ]
            }
        );
    }

    #[test]
    fn shear_json_is_exact() {
        let inst = gallery("shear-2").unwrap();
        assert_eq!(
            inst.canonical_json(),
            r#"{"schema":"gbl/1","name":"shear-2","dim":2,"norm":{"type":"quadratic","gram":[[1.0,0.5],[0.5,1.25]]}}"#
        );
    }

    #[test]
    fn random_quadratic_is_deterministic() {
        let a = gallery("random-quadratic-4-11").unwrap();
        let b = gallery("random-quadratic-4-11").unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_ne!(
            a.canonical_json(),
            gallery("random-quadratic-4-12").unwrap().canonical_json()
        );
    }

    #[test]
    fn unknown_names_list_families() {
        let e = gallery("hilbert-7").unwrap_err().to_string();
        assert!(e.contains("summing-{n}") && e.contains("shear-2"), "{e}");
        assert!(gallery("l0.5-canonical-2").is_err());
        assert!(gallery("summing-0").is_err());
    }
}
