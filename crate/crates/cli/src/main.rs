//! `sepcrit` — classify n-partite density matrices from their entries.
//!
//! Subcommands: `gen` (write a state file), `check` (evaluate criteria on a
//! state file), `threshold` (bisect for a criterion's critical noise weight
//! on the GHZ white-noise family), `oracle` (sampled soundness runs).
//!
//! Exit codes: 0 success, 2 input error, 3 I/O error, 4 bisection bracket
//! failure, 5 oracle soundness violation. Reports go to stdout, diagnostics
//! to stderr. `SEPCRIT_FORMAT=text|json` selects the default output format;
//! the `--format` flag overrides it.

mod formats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sepcrit::criteria::{
    critical_noise, evaluate_criterion, ghz_noise_threshold, CriterionId, CriterionReport,
};
use sepcrit::oracle::{run_soundness, OracleRunSpec};
use sepcrit::state_factory::{
    ghz, ghz_qudit, ghz_white_noise, random_pure_product, random_separable_mixture, w_state,
    NoiseFamilyParams, SampleMode, SeparableSampleSpec,
};
use sepcrit::{Bipartition, DensityMatrix, Error, SubsystemDims, ValidationConfig};

use formats::{
    OracleReportFile, ReportFile, SkippedRecord, StateFile, StateMetadata, ThresholdReport,
};

const EXIT_INPUT: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_BRACKET: u8 = 4;
const EXIT_ORACLE_VIOLATION: u8 = 5;

#[derive(Parser)]
#[command(
    name = "sepcrit",
    version,
    about = "Element-wise separability criteria for n-partite density matrices"
)]
struct Cli {
    /// Output format for reports (default: $SEPCRIT_FORMAT, then text)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a state and write it as a JSON state file
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Evaluate criteria on a state file and print a report
    Check {
        /// Path to a JSON state file
        input: PathBuf,
        /// `all` or a comma list of ids (t1,t2,t3,t4a,t4b,t5,t6)
        #[arg(long, default_value = "all")]
        criteria: String,
        /// Violation tolerance: margin above this counts as violated
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also verify positive semidefiniteness when validating the input
        #[arg(long)]
        check_psd: bool,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect for the noise weight where a criterion's margin crosses zero
    /// on the n-qubit GHZ white-noise family
    Threshold {
        /// Criterion id (t1, t2, t3, t4a, t4b, t5, t6)
        #[arg(long)]
        criterion: String,
        /// Qubit count
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        /// Bisection interval tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sample separable states and verify the criteria never fire on them
    Oracle {
        /// Comma-separated party dimensions, e.g. 2,2,2
        #[arg(long)]
        dims: String,
        /// Sample count (default: 10000 for qubit systems, 1000 otherwise)
        #[arg(long)]
        samples: Option<usize>,
        /// Sampling modes: full-sep, bisep-fixed, bisep-mixed (comma list)
        #[arg(long, value_delimiter = ',')]
        mode: Vec<String>,
        /// `all` or a comma list of ids (t5 excluded: not a sampled criterion)
        #[arg(long, default_value = "all")]
        criteria: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Cap on mixture terms per sample (term count drawn from 1..=cap)
        #[arg(long)]
        max_terms: Option<usize>,
        /// Left block of the fixed bipartition, e.g. 1,3 (for bisep-fixed)
        #[arg(long)]
        partition: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// GHZ state on n qubits
    Ghz {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// GHZ state mixed with white noise at weight p
    GhzNoise {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// W state on n qubits
    W {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// GHZ generalization on n parties with d levels each
    GhzQudit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Haar-random pure product state
    RandomProduct {
        /// Comma-separated party dimensions, e.g. 2,2,2
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Random separable mixture
    RandomSeparable {
        #[arg(long)]
        dims: String,
        /// Number of pure terms in the mixture
        #[arg(long, default_value_t = 4)]
        terms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// full-sep, bisep-fixed or bisep-mixed
        #[arg(long, default_value = "full-sep")]
        mode: String,
        /// Left block of the fixed bipartition, e.g. 1,3 (for bisep-fixed)
        #[arg(long)]
        partition: Option<String>,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Args)]
struct GenCommon {
    /// Output path for the state file
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Free-form label stored in the file metadata
    #[arg(long)]
    label: Option<String>,
}

/// A diagnostic plus the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::BracketFailure { .. } => EXIT_BRACKET,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = resolve_format(cli.format);
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Check {
            input,
            criteria,
            tol,
            check_psd,
            out,
        } => cmd_check(&input, &criteria, tol, check_psd, out.as_deref(), format),
        Command::Threshold {
            criterion,
            n,
            lo,
            hi,
            tol,
        } => cmd_threshold(&criterion, n, lo, hi, tol, format),
        Command::Oracle {
            dims,
            samples,
            mode,
            criteria,
            seed,
            tol,
            max_terms,
            partition,
        } => cmd_oracle(
            &dims,
            samples,
            &mode,
            &criteria,
            seed,
            tol,
            max_terms,
            partition.as_deref(),
            format,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn resolve_format(flag: Option<OutputFormat>) -> OutputFormat {
    if let Some(f) = flag {
        return f;
    }
    match std::env::var("SEPCRIT_FORMAT").as_deref() {
        Ok("json") => OutputFormat::Json,
        _ => OutputFormat::Text,
    }
}

fn parse_dims(s: &str) -> Result<SubsystemDims, Failure> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Failure::input(format!("cannot parse dimension {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(SubsystemDims::new(dims)?)
}

fn parse_partition(s: &str, n: usize) -> Result<Bipartition, Failure> {
    let left: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Failure::input(format!("cannot parse party label {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(Bipartition::new(left, n)?)
}

fn parse_mode(
    name: &str,
    dims: &SubsystemDims,
    partition: Option<&str>,
) -> Result<SampleMode, Failure> {
    match name {
        "full-sep" => Ok(SampleMode::FullySeparable),
        "bisep-mixed" => Ok(SampleMode::BiseparableMixedPartitions),
        "bisep-fixed" => {
            let spec = partition.ok_or_else(|| {
                Failure::input("mode bisep-fixed needs --partition (left block, e.g. 1,3)")
            })?;
            Ok(SampleMode::BiseparableFixed(parse_partition(
                spec,
                dims.n(),
            )?))
        }
        other => Err(Failure::input(format!(
            "unknown mode {other:?} (expected full-sep, bisep-fixed or bisep-mixed)"
        ))),
    }
}

/// `all`, or a comma list of short criterion ids.
fn parse_criteria(selector: &str, dims: &SubsystemDims) -> Result<Vec<CriterionId>, Failure> {
    if selector == "all" {
        return Ok(if dims.all_qubits() {
            vec![
                CriterionId::BisepQubitT1,
                CriterionId::WTypeT3,
                CriterionId::FullSepGhzTypeT4a,
                CriterionId::FullSepWTypeT4b,
                CriterionId::GhzNoiseExactT5,
            ]
        } else {
            vec![CriterionId::BisepQuditT2, CriterionId::FullSepQuditT6]
        });
    }
    selector
        .split(',')
        .map(|part| {
            let part = part.trim();
            CriterionId::from_short_id(part)
                .ok_or_else(|| Failure::input(format!("unknown criterion id {part:?}")))
        })
        .collect()
}

fn write_state(rho: &DensityMatrix, metadata: StateMetadata, out: &Path) -> Result<u8, Failure> {
    let file = StateFile::from_state(rho, Some(metadata));
    let json = serde_json::to_string(&file)
        .map_err(|e| Failure::input(format!("serialization failed: {e}")))?;
    std::fs::write(out, json).map_err(|e| Failure::io(out, e))?;
    Ok(0)
}

fn cmd_gen(kind: GenKind) -> Result<u8, Failure> {
    match kind {
        GenKind::Ghz { n, common } => {
            let rho = ghz(n)?;
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!("ghz(n={n})")),
                seed: None,
            };
            write_state(&rho, metadata, &common.out)
        }
        GenKind::GhzNoise { n, p, common } => {
            let rho = ghz_white_noise(&NoiseFamilyParams::new(n, p)?);
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!("ghz-noise(n={n}, p={p})")),
                seed: None,
            };
            write_state(&rho, metadata, &common.out)
        }
        GenKind::W { n, common } => {
            let rho = w_state(n)?;
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!("w(n={n})")),
                seed: None,
            };
            write_state(&rho, metadata, &common.out)
        }
        GenKind::GhzQudit { n, d, common } => {
            let rho = ghz_qudit(n, d)?;
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!("ghz-qudit(n={n}, d={d})")),
                seed: None,
            };
            write_state(&rho, metadata, &common.out)
        }
        GenKind::RandomProduct { dims, seed, common } => {
            let dims = parse_dims(&dims)?;
            let rho = random_pure_product(&dims, seed);
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!("random-product(dims={:?})", dims.dims())),
                seed: Some(seed),
            };
            write_state(&rho, metadata, &common.out)
        }
        GenKind::RandomSeparable {
            dims,
            terms,
            seed,
            mode,
            partition,
            common,
        } => {
            let dims = parse_dims(&dims)?;
            let mode = parse_mode(&mode, &dims, partition.as_deref())?;
            let spec = SeparableSampleSpec::new(dims.clone(), terms, seed, mode.clone())?;
            let rho = random_separable_mixture(&spec);
            let metadata = StateMetadata {
                label: common.label,
                generator: Some(format!(
                    "random-separable(dims={:?}, terms={terms}, mode={})",
                    dims.dims(),
                    mode.label()
                )),
                seed: Some(seed),
            };
            write_state(&rho, metadata, &common.out)
        }
    }
}

fn cmd_check(
    input: &Path,
    selector: &str,
    tol: f64,
    check_psd: bool,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<u8, Failure> {
    let raw = std::fs::read_to_string(input).map_err(|e| Failure::io(input, e))?;
    let file: StateFile = serde_json::from_str(&raw)
        .map_err(|e| Failure::input(format!("{}: malformed state file: {e}", input.display())))?;
    let cfg = ValidationConfig {
        check_psd,
        ..Default::default()
    };
    let rho = file
        .to_state(&cfg)
        .map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;

    let requested = parse_criteria(selector, rho.dims())?;
    let mut reports: Vec<CriterionReport> = Vec::new();
    let mut skipped: Vec<SkippedRecord> = Vec::new();
    for id in requested {
        match evaluate_criterion(id, &rho, tol) {
            Ok(report) => reports.push(report),
            Err(err @ (Error::UnsupportedDimension { .. } | Error::Inapplicable(_))) => {
                skipped.push(SkippedRecord {
                    id: id.short_id().to_string(),
                    reason: err.to_string(),
                });
            }
            Err(other) => return Err(other.into()),
        }
    }

    let report = ReportFile::new(
        input.display().to_string(),
        rho.dims().dims().to_vec(),
        tol,
        &reports,
        skipped,
    );
    let rendered = render(&report, report.to_text(), format)?;
    emit(rendered, out)
}

fn cmd_threshold(
    criterion: &str,
    n: usize,
    lo: f64,
    hi: f64,
    tol: f64,
    format: OutputFormat,
) -> Result<u8, Failure> {
    let id = CriterionId::from_short_id(criterion)
        .ok_or_else(|| Failure::input(format!("unknown criterion id {criterion:?}")))?;
    let p = critical_noise(id, n, lo, hi, tol)?;
    // t5 is definitionally the t4a crossing on this family
    let closed_form = matches!(
        id,
        CriterionId::FullSepGhzTypeT4a | CriterionId::GhzNoiseExactT5
    )
    .then(|| ghz_noise_threshold(n));
    let report = ThresholdReport {
        criterion: id.short_id().to_string(),
        n,
        p_bisection: p,
        p_closed_form: closed_form,
        difference: closed_form.map(|c| (p - c).abs()),
    };
    let rendered = render(&report, report.to_text(), format)?;
    emit(rendered, None)
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    dims: &str,
    samples: Option<usize>,
    modes: &[String],
    selector: &str,
    seed: u64,
    tol: f64,
    max_terms: Option<usize>,
    partition: Option<&str>,
    format: OutputFormat,
) -> Result<u8, Failure> {
    let dims = parse_dims(dims)?;
    let samples = samples.unwrap_or(if dims.all_qubits() { 10_000 } else { 1_000 });
    if modes.is_empty() {
        return Err(Failure::input(
            "need at least one --mode (full-sep, bisep-fixed, bisep-mixed)",
        ));
    }
    let modes = modes
        .iter()
        .map(|m| parse_mode(m, &dims, partition))
        .collect::<Result<Vec<_>, _>>()?;
    let criteria = if selector == "all" {
        parse_criteria("all", &dims)?
            .into_iter()
            .filter(|&id| id != CriterionId::GhzNoiseExactT5)
            .collect()
    } else {
        parse_criteria(selector, &dims)?
    };
    let mut spec = OracleRunSpec::new(dims.clone(), samples, seed, modes, criteria, tol)?;
    if let Some(cap) = max_terms {
        spec = spec.with_max_terms(cap)?;
    }
    let summary = run_soundness(&spec)?;
    let report = OracleReportFile::new(
        dims.dims().to_vec(),
        samples,
        seed,
        spec.max_terms(),
        &summary,
    );
    let rendered = render(&report, report.to_text(), format)?;
    emit(rendered, None)?;
    Ok(if summary.is_sound() {
        0
    } else {
        EXIT_ORACLE_VIOLATION
    })
}

fn render<T: serde::Serialize>(
    value: &T,
    text: String,
    format: OutputFormat,
) -> Result<String, Failure> {
    match format {
        OutputFormat::Text => Ok(text),
        OutputFormat::Json => serde_json::to_string_pretty(value)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Failure::input(format!("serialization failed: {e}"))),
    }
}

fn emit(rendered: String, out: Option<&Path>) -> Result<u8, Failure> {
    match out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| Failure::io(path, e))?,
        None => print!("{rendered}"),
    }
    Ok(0)
}
