use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cqs_core::circuit::Circuit;
use cqs_core::duality::{compile_exact, compile_paper, CompileMode};
use cqs_core::encoding::{default_encoding, paper_su3_encoding, Bitstring};
use cqs_core::frobenius::{build_padded, FrobeniusSpec, Generator, PhaseConvention};
use cqs_core::operator::DenseOperator;
use cqs_core::pauli::{normalize_factor, pauli_expand, termwise_factor_sum};
use cqs_core::reptheory::{load_rep_table, su3_truncation, RepTable};
use cqs_core::statevector::{effective_operator, run};
use cqs_core::verify::{reproduce_paper, verify_operator};
use cqs_core::Error;

/// `simulate` omits amplitudes at or below this magnitude (rounding noise).
const AMPLITUDE_FLOOR: f64 = 1e-14;

#[derive(Parser)]
#[command(
    name = "cqs",
    version,
    about = "Truncated 2D Yang-Mills Frobenius operators as post-selected circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a truncated irrep table.
    Irreps {
        #[arg(long, default_value = "su3")]
        group: String,
        #[arg(long, default_value_t = 3)]
        truncate: usize,
        /// Load and validate this table instead of generating one.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Build a padded generator matrix.
    Build {
        #[arg(long)]
        op: Op,
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        out: Output,
    },
    /// Pauli-expand an operator, optionally with its per-qubit factors.
    Decompose {
        /// Operator document; `-` or absent reads stdin unless `--op` is given.
        #[arg(long)]
        operator: Option<String>,
        #[arg(long, conflicts_with = "operator")]
        op: Option<Op>,
        /// Also print the termwise per-qubit factors, normalized.
        #[arg(long)]
        factors: bool,
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        out: Output,
    },
    /// Compile a generator to a circuit.
    Compile {
        #[arg(long)]
        op: Op,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Write the compile report (angles, scale) here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        out: Output,
    },
    /// Run a circuit on a basis input, or extract its effective operator.
    Simulate {
        /// Circuit document; `-` or absent reads stdin.
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long = "in", required_unless_present = "effective")]
        input: Option<String>,
        #[arg(long)]
        effective: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Compile, simulate and compare against the target; exit 1 on failure.
    Verify {
        #[arg(long)]
        op: Op,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        model: Model,
    },
    /// Rebuild, recompile and check the four SU(3) generators at unit area.
    ReproducePaper {
        #[arg(long, default_value = "paper")]
        convention: Convention,
        #[command(flatten)]
        out: Output,
    },
    /// Convert a circuit document to the text line format.
    Emit {
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long, default_value = "text")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Model {
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value = "paper")]
    convention: Convention,
    /// Number of SU(3) irreps kept.
    #[arg(long, default_value_t = 3)]
    truncate: usize,
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Mu,
    Delta,
    Eta,
    Eps,
    Cylinder,
}

impl From<Op> for Generator {
    fn from(op: Op) -> Self {
        match op {
            Op::Mu => Generator::Mu,
            Op::Delta => Generator::Delta,
            Op::Eta => Generator::Eta,
            Op::Eps => Generator::Epsilon,
            Op::Cylinder => Generator::Cylinder,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Paper,
    Exact,
}

impl From<Mode> for CompileMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Paper => CompileMode::Paper,
            Mode::Exact => CompileMode::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    #[value(alias = "paper_literal")]
    Paper,
    Euclidean,
}

impl From<Convention> for PhaseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Paper => PhaseConvention::PaperLiteral,
            Convention::Euclidean => PhaseConvention::Euclidean,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    /// Bad input, arguments or documents: exit 2.
    Usage(String),
    /// A check ran and did not pass: exit 1.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AngleMismatch { .. }
            | Error::ExactResidual { .. }
            | Error::FactoredFormResidual { .. }
            | Error::AxiomViolation { .. } => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read_source(path: Option<&str>) -> Result<String, Failure> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
            Ok(s)
        }
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Usage(format!("reading {p}: {e}"))),
    }
}

fn write_doc(path: Option<&PathBuf>, doc: &str) -> CliResult {
    let mut text = doc.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Usage(format!("writing {}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json value serializes")
}

fn spec(model: &Model) -> Result<FrobeniusSpec, Failure> {
    if model.truncate < 1 {
        return Err(Failure::Usage("--truncate must be at least 1".into()));
    }
    let table = su3_truncation(model.truncate);
    let encoding = if model.truncate == 3 {
        paper_su3_encoding()
    } else {
        default_encoding(&table)
    };
    Ok(FrobeniusSpec::new(
        table,
        encoding,
        model.beta,
        model.convention.into(),
    )?)
}

fn irreps(group: &str, truncate: usize, table: Option<&PathBuf>) -> Result<RepTable, Failure> {
    if let Some(path) = table {
        let source = read_source(Some(&path.to_string_lossy()))?;
        return Ok(load_rep_table(&source)?);
    }
    if group != "su3" {
        return Err(Failure::Usage(format!(
            "unsupported group `{group}` (only su3 is built in; use --table)"
        )));
    }
    if truncate < 1 {
        return Err(Failure::Usage("--truncate must be at least 1".into()));
    }
    Ok(su3_truncation(truncate))
}

fn decompose(op: &DenseOperator, factors: bool) -> Result<serde_json::Value, Failure> {
    let terms = pauli_expand(op)?;
    let mut doc = json!({ "qubits": op.qubits()?, "terms": terms });
    if factors {
        let form = termwise_factor_sum(op)?;
        let normalized = form
            .factors()
            .iter()
            .map(normalize_factor)
            .collect::<Result<Vec<_>, _>>()?;
        doc["factors"] = serde_json::to_value(normalized).expect("factors serialize");
    }
    Ok(doc)
}

fn simulate(circuit: &Circuit, input: Option<&str>, effective: bool) -> Result<String, Failure> {
    if effective {
        return Ok(effective_operator(circuit)?.matrix.to_json());
    }
    let bits: Bitstring = input
        .expect("clap requires --in without --effective")
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let outcome = run(circuit, &bits)?;
    let width = circuit.work_qubits().len();
    let amplitudes: Vec<_> = outcome
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > AMPLITUDE_FLOOR)
        .map(|(k, z)| json!({ "state": Bitstring::from_index(k, width).to_string(), "re": z.re, "im": z.im }))
        .collect();
    Ok(pretty(&json!({
        "input": bits.to_string(),
        "success_probability": outcome.probability,
        "amplitudes": amplitudes,
    })))
}

fn execute(command: Command) -> CliResult {
    match command {
        Command::Irreps {
            group,
            truncate,
            table,
            out,
        } => write_doc(
            out.out.as_ref(),
            &irreps(&group, truncate, table.as_ref())?.to_json(),
        ),
        Command::Build { op, model, out } => {
            let matrix = build_padded(op.into(), &spec(&model)?)?;
            write_doc(out.out.as_ref(), &matrix.to_json())
        }
        Command::Decompose {
            operator,
            op,
            factors,
            model,
            out,
        } => {
            let matrix = match op {
                Some(op) => build_padded(op.into(), &spec(&model)?)?,
                None => DenseOperator::from_json(&read_source(operator.as_deref())?)?,
            };
            write_doc(out.out.as_ref(), &pretty(&decompose(&matrix, factors)?))
        }
        Command::Compile {
            op,
            mode,
            format,
            report,
            model,
            out,
        } => {
            let spec = spec(&model)?;
            let (circuit, compiled) = match mode {
                Mode::Paper => compile_paper(op.into(), &spec)?,
                Mode::Exact => compile_exact(&build_padded(op.into(), &spec)?)?,
            };
            if let Some(path) = report {
                let doc = serde_json::to_string_pretty(&compiled).expect("report serializes");
                write_doc(Some(&path), &doc)?;
            }
            let doc = match format {
                Format::Json => circuit.to_json(),
                Format::Text => circuit.to_text(),
            };
            write_doc(out.out.as_ref(), &doc)
        }
        Command::Simulate {
            circuit,
            input,
            effective,
            out,
        } => {
            let circuit = Circuit::from_json(&read_source(circuit.as_deref())?)?;
            write_doc(
                out.out.as_ref(),
                &simulate(&circuit, input.as_deref(), effective)?,
            )
        }
        Command::Verify {
            op,
            mode,
            report,
            model,
        } => {
            let (verdict, _) = verify_operator(op.into(), mode.into(), &spec(&model)?)?;
            let doc = verdict.to_json();
            write_doc(report.as_ref(), &doc)?;
            if verdict.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{op} ({mode}): residual {:e}",
                    verdict.relative_residual,
                    op = verdict.target_name,
                    mode = verdict.mode
                )))
            }
        }
        Command::ReproducePaper { convention, out } => {
            let bundle = reproduce_paper(convention.into())?;
            write_doc(out.out.as_ref(), &bundle.to_json())
        }
        Command::Emit {
            circuit,
            format,
            out,
        } => {
            let circuit = Circuit::from_json(&read_source(circuit.as_deref())?)?;
            let doc = match format {
                Format::Json => circuit.to_json(),
                Format::Text => circuit.to_text(),
            };
            write_doc(out.out.as_ref(), &doc)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and succeed; real errors exit 2.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
