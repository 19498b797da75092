//! `gbl`: analyze finite-dimensional bases for the thresholding greedy
//! algorithm.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gbl_core::gallery::{self, EXAMPLES, FAMILIES};
use gbl_core::{
    build_report, greedy_sets, hilbert_witnesses, renorm_suppression, Instance, Overrides,
    Settings, TieMode, SCHEMA,
};

const EXIT_INPUT: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;

#[derive(Parser)]
#[command(name = "gbl", version, about = "Greedy basis lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Instance file, `-` for stdin, or a gallery name.
    instance: String,
    /// Random restarts per estimator.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for declaring a constant equal to 1.
    #[arg(long)]
    tol: Option<f64>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print settings and wall-clock time to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate K_su, C_w, C_t, C_qg and check them against each other.
    Analyze(Common),
    /// Emit the strongest greedy-violation certificate.
    Witness {
        #[command(flatten)]
        common: Common,
        /// Orthogonality witnesses for every pair (Euclidean norms only).
        #[arg(long)]
        hilbert: bool,
        /// Also list every valid greedy set of the certificate vector.
        #[arg(long)]
        all_ties: bool,
    },
    /// Write the instance renormed so that its basis is 1-suppression
    /// unconditional.
    Renorm(Common),
    /// Print a builtin instance.
    Gallery {
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<gbl_core::Error> for Failure {
    fn from(e: gbl_core::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("gbl: {message}");
        return ExitCode::from(EXIT_INPUT);
    }
    let result = match cli.command {
        Command::Analyze(c) => analyze(&c),
        Command::Witness {
            common,
            hilbert,
            all_ties,
        } => witness(&common, hilbert, all_ties),
        Command::Renorm(c) => renorm(&c),
        Command::Gallery { name, list, out } => gallery_cmd(name.as_deref(), list, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("gbl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GBL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("GBL_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("GBL_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(spec: &str) -> Result<Instance, Failure> {
    if spec == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        return Instance::from_json(&text).map_err(|e| Failure::input(format!("stdin: {e}")));
    }
    let path = Path::new(spec);
    if path.exists() {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{spec}: {e}")))?;
        return Instance::from_json(&text).map_err(|e| Failure::input(format!("{spec}: {e}")));
    }
    gallery::gallery(spec).map_err(|e| {
        Failure::input(format!(
            "{spec}: no such file, and not a gallery name ({e})"
        ))
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn settings(c: &Common, inst: &Instance) -> Result<Settings, Failure> {
    if c.tol.is_some_and(|t| !t.is_finite()) {
        return Err(Failure::input("--tol must be finite"));
    }
    let s = Settings::resolve(
        inst,
        &Overrides {
            restarts: c.budget,
            seed: c.seed,
            tol: c.tol,
        },
    );
    if c.verbose {
        eprintln!(
            "instance {} ({}), restarts {}, seed {}, tol {:e}",
            inst.name().unwrap_or("<unnamed>"),
            inst.digest(),
            s.budget.restarts,
            s.budget.seed,
            s.tol
        );
    }
    Ok(s)
}

fn exit_for(consistent: bool) -> u8 {
    if consistent {
        0
    } else {
        EXIT_INCONSISTENT
    }
}

fn analyze(c: &Common) -> CmdResult {
    let inst = load(&c.instance)?;
    let s = settings(c, &inst)?;
    let start = Instant::now();
    let report = build_report(&inst, &s)?;
    if c.verbose {
        eprintln!("analysis took {:.3} s", start.elapsed().as_secs_f64());
    }
    emit(c.out.as_deref(), &report.to_json())?;
    if !report.verdict.consistent {
        eprintln!("gbl: inconsistent verdict: {}", report.verdict.explanation);
    }
    Ok(exit_for(report.verdict.consistent))
}

fn witness(c: &Common, hilbert: bool, all_ties: bool) -> CmdResult {
    let inst = load(&c.instance)?;
    if hilbert {
        let Some(ws) = hilbert_witnesses(&inst.space, &inst.basis)? else {
            return Err(Failure::input(format!(
                "--hilbert needs a Euclidean norm, got {}",
                inst.space.spec().type_name()
            )));
        };
        let doc = json!({"schema": SCHEMA, "kind": "hilbert_witnesses", "witnesses": ws});
        emit(c.out.as_deref(), &pretty(&doc))?;
        return Ok(0);
    }
    let s = settings(c, &inst)?;
    let report = build_report(&inst, &s)?;
    let v = &report.full_verdict;
    let doc = match &v.certificate {
        Some(cert) => {
            let mut doc = serde_json::to_value(cert).expect("certificate serializes");
            if all_ties {
                let coeffs = inst.basis.coefficients(&cert.z)?;
                let sets: Vec<Vec<usize>> =
                    greedy_sets(coeffs.as_slice(), cert.n, TieMode::AllValid)?
                        .into_iter()
                        .map(|g| g.indices.iter().map(|i| i + 1).collect())
                        .collect();
                doc["valid_lambdas"] = json!(sets);
            }
            doc
        }
        None => {
            json!({
                "schema": SCHEMA,
                "kind": "none_found",
                "status": v.status,
                "exact": v.ksu.is_exact(),
                "explanation": v.explanation,
            })
        }
    };
    emit(c.out.as_deref(), &pretty(&doc))?;
    Ok(exit_for(v.consistent))
}

fn renorm(c: &Common) -> CmdResult {
    let inst = load(&c.instance)?;
    let space = renorm_suppression(&inst.space, &inst.basis)?;
    let name = inst.name().map(|n| format!("{n}-renorm"));
    let mut out = Instance::new(name, space, &inst.basis);
    out.file.analysis = inst.file.analysis.clone();
    emit(c.out.as_deref(), &format!("{}\n", out.to_json_pretty()))?;
    Ok(0)
}

fn gallery_cmd(name: Option<&str>, list: bool, out: Option<&Path>) -> CmdResult {
    if list {
        let mut text = String::new();
        for (pattern, about) in FAMILIES {
            text.push_str(&format!("{pattern:<30} {about}\n"));
        }
        text.push_str(&format!("\nexamples: {}\n", EXAMPLES.join(", ")));
        emit(out, &text)?;
        return Ok(0);
    }
    let Some(name) = name else {
        return Err(Failure::input("gallery: give an instance name or --list"));
    };
    let inst = gallery::gallery(name)?;
    emit(out, &format!("{}\n", inst.to_json_pretty()))?;
    Ok(0)
}
