//! Command-line surface: single-instance certification, family scans, and
//! raw spectra.
//!
//! Exit codes: 0 all evaluated checks pass (vacuous checks do not fail),
//! 1 some check failed, 2 the instance was rejected by validation
//! (directed, disconnected, bipartite, too small), 3 malformed input or
//! invalid configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use specgap::certify::{
    certify_instance, report_to_csv, report_to_json, scan_family, scan_to_csv, scan_to_json,
    CertifyOptions, CheckStatus,
};
use specgap::error::Error;
use specgap::io::{load_family_spec, load_instance};
use specgap::spectral::spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "specgap", version, about = "Spectral-gap certificates for group graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct CommonOpts {
    /// Mixing parameter in [0, 1]; defaults to 4/5 when nu = 1, else 123/1000.
    #[arg(long)]
    xi: Option<f64>,
    /// Relative slack tolerance for inequality checks.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Largest n for the exact 3^n bipartiteness scan.
    #[arg(long = "max-exact-bipartiteness", default_value_t = 13)]
    max_exact_bipartiteness: usize,
    /// Largest n for the exact 2^n Cheeger scans.
    #[arg(long = "max-exact-cheeger", default_value_t = 22)]
    max_exact_cheeger: usize,
    /// Claim simplicity for groups above the brute-force scan cap.
    #[arg(long)]
    assume_simple: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify one instance file and emit the full check report.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Certify every valid instance of a family spec file.
    Scan {
        input: PathBuf,
        /// Worker threads for the per-instance certification.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the spectrum of an instance without certifying.
    ShowSpectrum {
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_MALFORMED: u8 = 3;

fn rejection_exit(e: &Error) -> u8 {
    match e {
        Error::InvalidInstance(_) | Error::NotUndirected { .. } | Error::NotSymmetric => {
            EXIT_REJECTED
        }
        _ => EXIT_MALFORMED,
    }
}

fn validate_common(common: &CommonOpts) -> Result<CertifyOptions<f64>, String> {
    if let Some(xi) = common.xi {
        if !(0.0..=1.0).contains(&xi) {
            return Err(format!("--xi {xi} outside [0, 1]"));
        }
    }
    if !common.tolerance.is_finite() || common.tolerance <= 0.0 {
        return Err(format!("--tolerance {} must be positive", common.tolerance));
    }
    if common.max_exact_bipartiteness == 0 || common.max_exact_cheeger == 0 {
        return Err("exact-scan caps must be positive".into());
    }
    Ok(CertifyOptions {
        xi: common.xi,
        tolerance: common.tolerance,
        max_exact_bipartiteness: common.max_exact_bipartiteness,
        max_exact_cheeger: common.max_exact_cheeger,
        assume_simple: common.assume_simple.then_some(true),
    })
}

fn emit(bytes: &[u8], output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| e.to_string()),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| e.to_string())
        }
    }
}

fn run_analyze(input: &PathBuf, common: &CommonOpts) -> u8 {
    let opts = match validate_common(common) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("specgap: {msg}");
            return EXIT_MALFORMED;
        }
    };
    let inst = match load_instance(input) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("specgap: {e}");
            return rejection_exit(&e);
        }
    };
    let report = match certify_instance(&inst, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("specgap: {e}");
            return rejection_exit(&e);
        }
    };
    if report
        .checks
        .iter()
        .any(|c| c.status == CheckStatus::Vacuous)
    {
        eprintln!("{}", report.hypothesis_summary());
    }
    let bytes = match common.format {
        Format::Json => report_to_json(&report),
        Format::Csv => report_to_csv(&report),
    };
    if let Err(msg) = emit(&bytes, common.output.as_ref()) {
        eprintln!("specgap: {msg}");
        return EXIT_MALFORMED;
    }
    if report.passed() {
        0
    } else {
        EXIT_CHECK_FAILED
    }
}

fn run_scan(input: &PathBuf, parallel: usize, common: &CommonOpts) -> u8 {
    let opts = match validate_common(common) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("specgap: {msg}");
            return EXIT_MALFORMED;
        }
    };
    if parallel == 0 {
        eprintln!("specgap: --parallel must be positive");
        return EXIT_MALFORMED;
    }
    let spec = match load_family_spec(input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("specgap: {e}");
            return EXIT_MALFORMED;
        }
    };
    let scan = match scan_family(&spec, &opts, parallel) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("specgap: {e}");
            return EXIT_MALFORMED;
        }
    };
    let bytes = match common.format {
        Format::Json => scan_to_json(&scan),
        Format::Csv => scan_to_csv(&scan),
    };
    if let Err(msg) = emit(&bytes, common.output.as_ref()) {
        eprintln!("specgap: {msg}");
        return EXIT_MALFORMED;
    }
    if scan.summary.failed == 0 {
        0
    } else {
        EXIT_CHECK_FAILED
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    n: usize,
    d: usize,
    eigenvalues: Vec<f64>,
    mu: f64,
    mu2: f64,
}

fn run_show_spectrum(input: &PathBuf, output: Option<&PathBuf>) -> u8 {
    let inst = match load_instance(input) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("specgap: {e}");
            return rejection_exit(&e);
        }
    };
    let spec = match spectrum::<f64>(&inst) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("specgap: {e}");
            return rejection_exit(&e);
        }
    };
    let out = SpectrumOut {
        n: inst.n(),
        d: inst.d(),
        eigenvalues: spec.eigenvalues,
        mu: spec.mu,
        mu2: spec.mu2,
    };
    let mut bytes = serde_json::to_vec_pretty(&out).expect("spectrum serializes");
    bytes.push(b'\n');
    if let Err(msg) = emit(&bytes, output) {
        eprintln!("specgap: {msg}");
        return EXIT_MALFORMED;
    }
    0
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    let code = match &cli.command {
        Command::Analyze { input, common } => run_analyze(input, common),
        Command::Scan {
            input,
            parallel,
            common,
        } => run_scan(input, *parallel, common),
        Command::ShowSpectrum { input, output } => run_show_spectrum(input, output.as_ref()),
    };
    ExitCode::from(code)
}
