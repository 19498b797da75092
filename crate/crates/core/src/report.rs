//! Machine-readable analysis reports.
//!
//! Reports contain no wall-clock data, so the same instance, seed and budget
//! always serialize to the same bytes.

use serde::Serialize;

use crate::constants::{analyze, cqg_from, Analysis, Budget};
use crate::error::Result;
use crate::instance::Instance;
use crate::theorem::{judge, GreedyViolationCertificate, Verdict, VerdictStatus};
use crate::{SCHEMA, UNIT_TOL};

/// Effective analysis settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub budget: Budget,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            budget: Budget::default(),
            tol: UNIT_TOL,
        }
    }
}

/// Command-line style overrides; `None` falls back to the instance file and
/// then to the defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl Settings {
    pub fn resolve(instance: &Instance, overrides: &Overrides) -> Self {
        let file = instance.file.analysis.clone().unwrap_or_default();
        let mut s = Settings::default();
        if let Some(r) = overrides.restarts.or(file.budget) {
            s.budget.restarts = r;
        }
        if let Some(seed) = overrides.seed.or(file.seed) {
            s.budget.seed = seed;
        }
        if let Some(t) = overrides.tol.or(file.tol) {
            s.tol = t;
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub name: Option<String>,
    pub digest: String,
    pub dim: usize,
    pub norm: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictSummary {
    pub consistent: bool,
    pub status: VerdictStatus,
    pub explanation: String,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Timing {
    pub norm_evaluations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub instance: InstanceSummary,
    pub budget: Budget,
    pub tol: f64,
    pub estimates: Analysis,
    pub verdict: VerdictSummary,
    pub certificates: Vec<GreedyViolationCertificate>,
    pub timing: Timing,
    #[serde(skip)]
    pub full_verdict: Verdict,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Analyzes `instance` and judges the result.
pub fn build_report(instance: &Instance, settings: &Settings) -> Result<Report> {
    let (space, basis) = (&instance.space, &instance.basis);
    let mut analysis = analyze(space, basis, &settings.budget)?;
    let verdict = judge(space, basis, &analysis, settings.tol)?;
    analysis.cw = verdict.cw.clone();
    analysis.cqg = cqg_from(&analysis.cw, &analysis.ct);
    let evaluations = analysis.ksu.budget_used + analysis.cw.budget_used + analysis.ct.budget_used;
    Ok(Report {
        schema: SCHEMA,
        instance: InstanceSummary {
            name: instance.file.name.clone(),
            digest: instance.digest(),
            dim: space.dim(),
            norm: space.spec().type_name(),
        },
        budget: settings.budget,
        tol: settings.tol,
        estimates: analysis,
        verdict: VerdictSummary {
            consistent: verdict.consistent,
            status: verdict.status,
            explanation: verdict.explanation.clone(),
        },
        certificates: verdict.certificate.iter().cloned().collect(),
        timing: Timing {
            norm_evaluations: evaluations,
        },
        full_verdict: verdict,
    })
}
