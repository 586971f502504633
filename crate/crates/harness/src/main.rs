use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dyadic_harness::{emit_report, run_with_jobs, ExperimentSpec, Format, Suite, SuiteConfig};

/// Verification suites for the dyadic maximal operator.
#[derive(Parser)]
#[command(name = "dyadic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Suite config (JSON); omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for report files; without it only the summary is printed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write only this format (both by default).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Print the resolved config as JSON and exit without running.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Random instances of the maximal/Hardy integral inequality.
    VerifyInequality,
    /// Lower/upper ratio of the extremal construction over a grid of `a`.
    ExtremalSweep,
    /// Bellman function witnesses, random upper bounds and the ω_p inverse.
    BellmanEval,
    /// Closed-form Δ against quadrature on a (p, q, f, k) grid.
    DeltaTable,
    /// Weak-type and triple-norm constants.
    NormsCheck,
    /// Lorentz-space bound and power witnesses.
    LorentzSweep,
    /// Equal-average splitting of random profiles.
    AllocationCheck,
}

impl Command {
    fn suite(self) -> Suite {
        match self {
            Command::VerifyInequality => Suite::Inequality,
            Command::ExtremalSweep => Suite::Sharpness,
            Command::BellmanEval => Suite::Bellman,
            Command::DeltaTable => Suite::Delta,
            Command::NormsCheck => Suite::TripleNorm,
            Command::LorentzSweep => Suite::Lorentz,
            Command::AllocationCheck => Suite::Allocation,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    let suite = cli.command.suite();
    let config = match &cli.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SuiteConfig::from_json(suite, &text)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => SuiteConfig::default_for(suite),
    };
    if cli.print_config {
        println!("{}", config.body_json());
        return Ok(true);
    }
    let spec = ExperimentSpec {
        seed: cli.seed,
        config,
    };
    let report = run_with_jobs(&spec, cli.jobs)?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(dir) = &cli.out {
        let format = cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        });
        for path in emit_report(&report, dir, format)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(report.pass())
}
