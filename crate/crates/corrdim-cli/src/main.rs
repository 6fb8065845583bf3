//! Command-line front end: generate correlation tables, compute dimension
//! bounds, verify and audit operator representations, compare against the
//! PSD-rank bound, and run perturbation scans.
//!
//! Exit codes: 0 on success (and a true verdict), 1 on bad arguments, domain
//! errors, or a false verdict, 2 on I/O or parse failures. No other codes.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use corrdim::bounds::{
    dimension_lower_bound, robustness_scan, BoundStats, DimensionBound, ExtendedBound,
};
use corrdim::corr::{CorrError, Correlation, Sizes};
use corrdim::generators::{chsh_optimal, ffl_uniform, magic_square, nonconvex_mixture, pr_box, uniform};
use corrdim::psdrank::compare_bounds;
use corrdim::quantum::{
    audit_derivation, verify_operator_representation, OperatorRepresentation, QuantumError,
};
use corrdim::tol::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "corrdim", version, about = "Dimension bounds for two-party correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named correlation table to a JSON file.
    Generate {
        /// Which table to produce.
        #[arg(value_enum)]
        name: TableName,
        /// Outcome count; required for pr-box, optional for uniform.
        #[arg(long)]
        d: Option<usize>,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute f1, f2, and the integer dimension bound of a correlation.
    Bound {
        /// Correlation JSON file.
        input: PathBuf,
        /// Validation tolerance for the table.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check an operator representation against a correlation.
    Verify {
        /// Operator representation JSON file.
        rep: PathBuf,
        /// Correlation JSON file.
        corr: PathBuf,
        /// Tolerance for the defining conditions.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Replay the bound derivation on an operator representation.
    Audit {
        /// Operator representation JSON file.
        rep: PathBuf,
        /// Tolerance for every link of the chain.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Compare the flattened PSD-rank bound with the direct bounds.
    Psdrank {
        /// Correlation JSON file.
        input: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Bound statistics over random entrywise perturbations.
    Perturb {
        /// Correlation JSON file.
        input: PathBuf,
        /// Perturbation magnitude (entries move by at most eps).
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        /// Number of perturbed samples.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// RNG seed; equal seeds give identical output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the summary as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableName {
    /// Optimal quantum strategy for the CHSH game.
    Chsh,
    /// Magic-square game strategy (3 inputs, 8 outcomes).
    MagicSquare,
    /// PR box with d outcomes per site.
    PrBox,
    /// Uniform-marginal table with the FFL zero pattern.
    Ffl,
    /// Equal mixture of three deterministic tables.
    NonconvexMixture,
    /// Uniform table on a 2×2 scenario with d outcomes per site.
    Uniform,
}

/// Failures carry their exit code class: domain problems exit 1, transport
/// problems (I/O, JSON syntax) exit 2.
enum Failure {
    Domain(String),
    Io(String),
}

fn domain(e: impl Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Generate { name, d, out } => cmd_generate(name, d, &out),
        Command::Bound { input, tol, json } => cmd_bound(&input, tol, json),
        Command::Verify { rep, corr, tol, json } => cmd_verify(&rep, &corr, tol, json),
        Command::Audit { rep, tol, json } => cmd_audit(&rep, tol, json),
        Command::Psdrank { input, json } => cmd_psdrank(&input, json),
        Command::Perturb { input, eps, samples, seed, json } => {
            cmd_perturb(&input, eps, samples, seed, json)
        }
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Domain(format!("tol must be positive, got {tol}")))
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_correlation(path: &Path, tol: f64) -> Result<Correlation, Failure> {
    let text = read_file(path)?;
    Correlation::from_json_with_tol(&text, tol).map_err(|e| match e {
        CorrError::Parse(_) => Failure::Io(format!("{}: {e}", path.display())),
        other => Failure::Domain(format!("{}: {other}", path.display())),
    })
}

fn load_representation(path: &Path) -> Result<OperatorRepresentation, Failure> {
    let text = read_file(path)?;
    OperatorRepresentation::from_json(&text).map_err(|e| match e {
        QuantumError::Parse(_) => Failure::Io(format!("{}: {e}", path.display())),
        other => Failure::Domain(format!("{}: {other}", path.display())),
    })
}

fn show_bound(b: ExtendedBound) -> String {
    match b {
        ExtendedBound::Finite(v) => format!("{v}"),
        ExtendedBound::Infinite => "infinity".into(),
    }
}

fn show_dim(b: DimensionBound) -> String {
    match b {
        DimensionBound::Finite(k) => k.to_string(),
        DimensionBound::Infinite => "infinity".into(),
    }
}

fn show_stats(s: &BoundStats) -> String {
    format!(
        "min {}  max {}  mean {}",
        show_bound(s.min),
        show_bound(s.max),
        show_bound(s.mean)
    )
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn cmd_generate(name: TableName, d: Option<usize>, out: &Path) -> Result<u8, Failure> {
    let p = match name {
        TableName::PrBox => {
            let d = d.ok_or_else(|| {
                Failure::Domain("pr-box needs --d (outcomes per site)".into())
            })?;
            pr_box(d).map_err(domain)?
        }
        TableName::Uniform => uniform(Sizes::new(2, 2, d.unwrap_or(2), d.unwrap_or(2)))
            .map_err(domain)?,
        other => {
            if d.is_some() {
                return Err(Failure::Domain(
                    "--d applies only to pr-box and uniform".into(),
                ));
            }
            match other {
                TableName::Chsh => chsh_optimal(),
                TableName::MagicSquare => magic_square(),
                TableName::Ffl => ffl_uniform(),
                TableName::NonconvexMixture => nonconvex_mixture(),
                TableName::PrBox | TableName::Uniform => unreachable!(),
            }
        }
    };
    let mut text = p.to_json();
    text.push('\n');
    std::fs::write(out, text).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    Ok(0)
}

fn cmd_bound(input: &Path, tol: f64, json: bool) -> Result<u8, Failure> {
    check_tol(tol)?;
    let p = load_correlation(input, tol)?;
    let report = dimension_lower_bound(&p);
    if json {
        print_json(&report);
    } else {
        println!("f1: {}", show_bound(report.f1));
        println!("f2: {}", show_bound(report.f2));
        println!(
            "dimension_lower_bound: {}",
            show_dim(report.dimension_lower_bound)
        );
    }
    Ok(0)
}

fn cmd_verify(rep: &Path, corr: &Path, tol: f64, json: bool) -> Result<u8, Failure> {
    check_tol(tol)?;
    let orep = load_representation(rep)?;
    let p = load_correlation(corr, tol)?;
    let report = verify_operator_representation(&orep, &p, tol).map_err(domain)?;
    if json {
        print_json(&report);
    } else {
        println!("condition1_max_err: {}", report.condition1_max_err);
        println!("condition3_max_err: {}", report.condition3_max_err);
        println!("psd_ok: {}", report.psd_ok);
        println!("verdict: {}", report.verdict);
    }
    Ok(if report.verdict { 0 } else { 1 })
}

fn cmd_audit(rep: &Path, tol: f64, json: bool) -> Result<u8, Failure> {
    check_tol(tol)?;
    let orep = load_representation(rep)?;
    let report = audit_derivation(&orep, tol).map_err(domain)?;
    if json {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value
            .as_object_mut()
            .expect("report is an object")
            .insert("d".into(), serde_json::Value::from(orep.dim()));
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("report serializes")
        );
    } else {
        println!("d: {}", orep.dim());
        println!("common_sum_rank: {}", report.common_sum_rank);
        println!("f1_value: {}", show_bound(report.f1_value));
        println!("implied_f1_upper: {}", report.implied_f1_upper);
        let purities: Vec<String> = report
            .purity_values
            .iter()
            .enumerate()
            .map(|(y, p)| format!("y={y}: {p}"))
            .collect();
        println!("purity: {}", purities.join(", "));
        println!(
            "povm_completeness_max_err: {}",
            report.povm_completeness_max_err
        );
        println!("f_weight_sum_max_err: {}", report.f_weight_sum_max_err);
        println!("rho_y_max_discrepancy: {}", report.rho_y_max_discrepancy);
        println!("factorization_max_err: {}", report.factorization_max_err);
        println!(
            "fidelity_monotonicity_min_margin: {}",
            report.fidelity_monotonicity_min_margin
        );
        println!(
            "trace_fidelity_min_margin: {}",
            report.trace_fidelity_min_margin
        );
        println!("purity_min_margin: {}", report.purity_min_margin);
        println!("chain_holds: {}", report.chain_holds);
    }
    Ok(if report.chain_holds { 0 } else { 1 })
}

fn cmd_psdrank(input: &Path, json: bool) -> Result<u8, Failure> {
    let p = load_correlation(input, DEFAULT_TOL)?;
    let report = compare_bounds(&p);
    if json {
        print_json(&report);
    } else {
        println!(
            "flattened_psd_bound: {}",
            show_bound(report.flattened_psd_bound)
        );
        println!("f1: {}", show_bound(report.f1));
        println!("f2: {}", show_bound(report.f2));
        println!(
            "dimension_lower_bound: {}",
            show_dim(report.dimension_lower_bound)
        );
    }
    Ok(0)
}

fn cmd_perturb(
    input: &Path,
    eps: f64,
    samples: usize,
    seed: u64,
    json: bool,
) -> Result<u8, Failure> {
    let p = load_correlation(input, DEFAULT_TOL)?;
    let summary = robustness_scan(&p, eps, samples, seed).map_err(domain)?;
    if json {
        print_json(&summary);
    } else {
        println!("eps: {}", summary.eps);
        println!("samples: {}", summary.samples);
        println!("f1: {}", show_stats(&summary.f1));
        println!("f2: {}", show_stats(&summary.f2));
    }
    Ok(0)
}
