//! Command-line interface: ingest JSON complexes, matrices, cover specs,
//! and fact lists; emit deterministic JSON reports.
//!
//! Exit codes: 0 on success, 1 on invalid input (with a structured error
//! document on standard output), 2 on enumeration-guard violations.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use wsvol::bounds::{compile_report, exceptional_primes_report, BoundsError, KnownFact};
use wsvol::complex::DeltaComplex;
use wsvol::covers::{build_cover, stabilize, validate_cover_spec, CoverError, CoverSpec};
use wsvol::field::{FieldError, FieldSpec, PrimeField, Rationals};
use wsvol::homology::{homology_profile, HomologyError};
use wsvol::matrix::{int_to_value, IntMatrix};
use wsvol::model::{
    algebraic_min_cycle_size, fundamental_feasible, AugmentedSystem, CycleSearch, ModelError,
};
use wsvol::snf::smith_normal_form;
use wsvol::with_field;

#[derive(Parser)]
#[command(
    name = "wsvol",
    version,
    about = "Certified bounds for weightless simplicial volumes of Δ-complexes"
)]
struct Cli {
    /// Write the JSON document to this path instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural diagnostics for a complex.
    Validate {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Betti numbers per coefficient system (torsion included over z).
    Homology {
        #[arg(long)]
        complex: PathBuf,
        /// Coefficient system (q, z, fp:<p>, fp2:<p>:<c0>,<c1>); repeatable.
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Provenance-tagged lower/upper bounds per coefficient system.
    Bounds {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long = "field")]
        fields: Vec<String>,
        /// JSON list of literature facts (integral volumes, dominations).
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Smallest simplex count admitting a totally nonzero cycle vector.
    ModelSearch {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        field: String,
        #[arg(long = "max")]
        max: usize,
    },
    /// Exceptional primes of a cycle system with a degree row.
    ExceptionalPrimes {
        /// Cycle-matrix JSON; omitted means no cycle rows.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Comma-separated integer degree row, e.g. "1,-1".
        #[arg(long = "degree-row")]
        degree_row: String,
        /// Extra primes to probe for feasibility, e.g. "2,3,5".
        #[arg(long)]
        primes: Option<String>,
    },
    /// Build a covering complex, validate it, and report its homology.
    Cover {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Stabilisation tower of cyclic covers over a surface.
    Stabilize {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        field: String,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        #[arg(long)]
        matrix: PathBuf,
    },
}

struct CliError {
    code: &'static str,
    message: String,
    exit: u8,
}

impl CliError {
    fn invalid(message: impl Display) -> Self {
        CliError { code: "invalid_input", message: message.to_string(), exit: 1 }
    }

    fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::GuardExceeded { .. } => {
                CliError { code: "guard_exceeded", message: e.to_string(), exit: 2 }
            }
            _ => CliError::invalid(e),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Model(m) => m.into(),
            _ => CliError::invalid(e),
        }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::Bounds(b) => b.into(),
            _ => CliError::invalid(e),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::invalid(e)
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        CliError::invalid(e)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("cannot parse {}: {e}", path.display())))
}

fn parse_fields(raw: &[String]) -> Result<Vec<FieldSpec>, CliError> {
    if raw.is_empty() {
        return Ok(vec![FieldSpec::Rationals]);
    }
    raw.iter().map(|s| FieldSpec::from_str(s).map_err(CliError::from)).collect()
}

fn run(cmd: &Cmd) -> Result<Value, CliError> {
    match cmd {
        Cmd::Validate { complex } => {
            let x: DeltaComplex = read_json(complex)?;
            let diag = x.validate();
            Ok(json!({ "pass": diag.pass(), "diagnostics": diag }))
        }

        Cmd::Homology { complex, fields } => {
            let x: DeltaComplex = read_json(complex)?;
            let profiles = parse_fields(fields)?
                .iter()
                .map(|spec| homology_profile(&x, spec))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "profiles": profiles }))
        }

        Cmd::Bounds { complex, fields, facts } => {
            let x: DeltaComplex = read_json(complex)?;
            let facts: Vec<KnownFact> =
                facts.as_deref().map(read_json).transpose()?.unwrap_or_default();
            let reports = compile_report(&x, &parse_fields(fields)?, &facts)?;
            Ok(json!({ "reports": reports }))
        }

        Cmd::ModelSearch { dim, field, max } => {
            let spec = FieldSpec::from_str(field)?;
            let outcome = with_field!(&spec, |f| {
                algebraic_min_cycle_size(f, *dim, *max).map(|search| match search {
                    CycleSearch::Found { m, model, witness } => json!({
                        "minimal": m,
                        "model": model,
                        "witness": witness.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    }),
                    CycleSearch::GreaterThan(m) => json!({ "greater_than": m }),
                })
            })??;
            Ok(json!({ "dim": dim, "field": spec, "max": max, "result": outcome }))
        }

        Cmd::ExceptionalPrimes { matrix, degree_row, primes } => {
            let degree_row: Vec<BigInt> = degree_row
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::invalid(format!("bad degree entry `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let base: IntMatrix = match matrix {
                Some(path) => read_json(path)?,
                None => IntMatrix::zero(0, degree_row.len()),
            };
            let sys = AugmentedSystem::new(base, degree_row)?;
            let exceptional = exceptional_primes_report(&sys);

            let mut probe_set: Vec<u64> = exceptional
                .iter()
                .filter_map(|p| u64::try_from(p.clone()).ok())
                .collect();
            if let Some(raw) = primes {
                for s in raw.split(',') {
                    let p: u64 = s
                        .trim()
                        .parse()
                        .map_err(|_| CliError::invalid(format!("bad prime `{s}`")))?;
                    probe_set.push(p);
                }
            }
            probe_set.sort_unstable();
            probe_set.dedup();
            let probes = probe_set
                .into_iter()
                .map(|p| {
                    let field = PrimeField::new(p)?;
                    Ok(json!({
                        "p": p,
                        "feasible": fundamental_feasible(&field, &sys),
                    }))
                })
                .collect::<Result<Vec<_>, FieldError>>()?;

            Ok(json!({
                "exceptional_primes": exceptional.iter().map(int_to_value).collect::<Vec<_>>(),
                "q_feasible": fundamental_feasible(&Rationals, &sys),
                "probes": probes,
            }))
        }

        Cmd::Cover { complex, spec, fields } => {
            let x: DeltaComplex = read_json(complex)?;
            let cover_spec: CoverSpec = read_json(spec)?;
            let diag = validate_cover_spec(&x, &cover_spec);
            if !diag.pass() {
                return Err(CliError::invalid(format!(
                    "cover spec does not validate: {}",
                    diag.messages.join("; ")
                )));
            }
            let cover = build_cover(&x, &cover_spec)?;
            let profiles = parse_fields(fields)?
                .iter()
                .map(|spec| homology_profile(&cover.complex, spec))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({
                "diagnostics": diag,
                "sheets": cover.sheets,
                "euler": cover.complex.euler_characteristic(),
                "cover": cover.complex,
                "profiles": profiles,
            }))
        }

        Cmd::Stabilize { genus, dmax, field } => {
            let spec = FieldSpec::from_str(field)?;
            let report = stabilize(*genus, *dmax, &spec)?;
            Ok(serde_json::to_value(report).expect("report serializes"))
        }

        Cmd::Snf { matrix } => {
            let a: IntMatrix = read_json(matrix)?;
            let snf = smith_normal_form(&a);
            Ok(json!({
                "rank": snf.rank,
                "divisors": snf.divisors.iter().map(int_to_value).collect::<Vec<_>>(),
                "s": snf.s,
                "t": snf.t,
            }))
        }
    }
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = format!("{}\n", serde_json::to_string_pretty(doc).expect("valid JSON"));
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli.cmd).and_then(|doc| emit(&doc, cli.out.as_deref()));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("valid JSON"));
            ExitCode::from(e.exit)
        }
    }
}
