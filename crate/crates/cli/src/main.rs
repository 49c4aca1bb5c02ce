//! Command-line front end: generate structured specs, verify the matrix
//! identities they satisfy, run the recovery-vs-oracle comparisons, and
//! print information counts.
//!
//! Exit codes: 0 all checks pass; 1 a numeric check failed (or the spec is
//! not invertible / a recovery system stayed singular after retries);
//! 2 schema or usage error; 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tbt_cli::report::{recover_report, verify_report, Report, Tolerances};
use tbt_core::error::Error;
use tbt_core::recovery::info_count;
use tbt_core::structured::{
    parse_spec, random_spec, random_spec3, spec3_to_json, spec_to_json, DimTriple, SpecFile,
    StructureClass,
};

#[derive(Parser)]
#[command(
    name = "tbt",
    version,
    about = "Block multilevel-Toeplitz identity and recovery toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random spec of a given class and write it as JSON.
    Gen(GenArgs),
    /// Check every matrix identity applicable to a spec.
    Verify(CheckArgs),
    /// Run the recovery pipeline against the dense-inversion oracle.
    Recover(CheckArgs),
    /// Print entry counts for a structure.
    Info(InfoArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Level sizes, comma separated: m1,m2,m3 (each >= 2).
    #[arg(long)]
    dims: String,
    /// Structure class: general, self_adjoint, dstu or toeplitz3d.
    #[arg(long)]
    class: String,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diagonal shift added to the central block; defaults to
    /// 2 * m * (max coefficient modulus), which guarantees invertibility.
    #[arg(long)]
    shift: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Path of the JSON spec to check.
    spec: PathBuf,
    /// Tolerance overrides by check name, e.g. --tol u_recovery=1e-8.
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Seed for the evaluation sample points (recover only).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of evaluation sample points (recover only).
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct InfoArgs {
    /// Level sizes, comma separated: m1,m2,m3 (each >= 2).
    #[arg(long)]
    dims: String,
    /// Structure class: general, self_adjoint, dstu or toeplitz3d.
    #[arg(long)]
    class: String,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

const EXIT_NUMERIC: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_IO: u8 = 3;

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn parse_dims(text: &str) -> Result<DimTriple, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--dims expects m1,m2,m3, got `{text}`"));
    }
    let mut v = [0usize; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse()
            .map_err(|_| format!("--dims component `{p}` is not a positive integer"))?;
    }
    DimTriple::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

fn parse_class(text: &str) -> Result<StructureClass, String> {
    StructureClass::from_name(text).ok_or_else(|| {
        format!("unknown class `{text}` (expected general, self_adjoint, dstu or toeplitz3d)")
    })
}

fn parse_format(text: &str) -> Result<bool, String> {
    match text {
        "json" => Ok(true),
        "text" => Ok(false),
        other => Err(format!("unknown format `{other}` (expected text or json)")),
    }
}

fn run_gen(args: &GenArgs) -> ExitCode {
    let dims = match parse_dims(&args.dims) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    let class = match parse_class(&args.class) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    if let Some(shift) = args.shift {
        if !shift.is_finite() || shift < 0.0 {
            return fail(EXIT_SCHEMA, "--shift must be nonnegative");
        }
    }
    let file: SpecFile = if class == StructureClass::Toeplitz3d {
        spec3_to_json(&random_spec3(dims, args.seed, args.shift))
    } else {
        spec_to_json(&random_spec(dims, args.seed, class, args.shift))
    };
    let text = serde_json::to_string_pretty(&file).expect("spec serialization cannot fail");
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                return fail(EXIT_IO, format!("writing {}: {e}", path.display()));
            }
            ExitCode::SUCCESS
        }
        None => {
            println!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn emit_report(report: &Report, json: bool) -> ExitCode {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serialization cannot fail")
        );
    } else {
        print!("{}", report.render_text());
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn error_exit(e: Error) -> ExitCode {
    match e {
        Error::Schema { .. } => fail(EXIT_SCHEMA, e),
        other => fail(EXIT_NUMERIC, other),
    }
}

fn run_check(args: &CheckArgs, recover: bool) -> ExitCode {
    let json = match parse_format(&args.format) {
        Ok(j) => j,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    let tols = match Tolerances::parse(&args.tol) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    if recover && args.samples == 0 {
        return fail(EXIT_SCHEMA, "--samples must be at least 1");
    }
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_IO, format!("reading {}: {e}", args.spec.display())),
    };
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => return error_exit(e),
    };
    let result = if recover {
        recover_report(&spec, None, args.seed, args.samples, &tols)
    } else {
        verify_report(&spec, None, &tols)
    };
    match result {
        Ok(report) => emit_report(&report, json),
        Err(e) => error_exit(e),
    }
}

fn run_info(args: &InfoArgs) -> ExitCode {
    let json = match parse_format(&args.format) {
        Ok(j) => j,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    let dims = match parse_dims(&args.dims) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    let class = match parse_class(&args.class) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_SCHEMA, e),
    };
    let counts = info_count(dims, class);
    if json {
        let doc = serde_json::json!({
            "dims": [dims.m1(), dims.m2(), dims.m3()],
            "class": class.to_string(),
            "counts": counts,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
        );
    } else {
        println!("dims: {},{},{}", dims.m1(), dims.m2(), dims.m3());
        println!("class: {class}");
        println!("full_entries: {}", counts.full_entries);
        println!("minimal_entries: {}", counts.minimal_entries);
        for p in 1..=3 {
            println!("naive_entries(p={p}): {}", counts.naive_entries[p - 1]);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Verify(args) => run_check(args, false),
        Command::Recover(args) => run_check(args, true),
        Command::Info(args) => run_info(args),
    }
}
