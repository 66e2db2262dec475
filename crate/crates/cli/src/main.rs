use std::process::ExitCode;

use bwpinch::bw::Verdict;
use bwpinch::dsl::parse_expr;
use bwpinch::report::{
    constants_report, spectrum_report, to_csv, to_json, to_markdown, yamabe_report, ProbeSettings, Report, ReportBody,
};
use bwpinch::selftest::{run_selftest, SelftestConfig};
use bwpinch::verdicts::{evaluate_theorem, sweep_equality_family, PinchReport, TheoremId};
use bwpinch::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "bwpinch", version, about = "Curvature pinching constants and equality checks on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "md")]
    format: Format,
    /// Relative tolerance for equality verdicts.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Largest dimension accepted.
    #[arg(long, global = true, default_value_t = 12)]
    max_n: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pinching constants a_{n,k}, b_{n,k} and the theorem constants.
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Spectrum of R_k on a model.
    Spectrum {
        #[arg(long)]
        model: String,
        #[arg(long)]
        k: usize,
    },
    /// Evaluate one theorem's pinching condition on a model.
    Verify {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long)]
        model: String,
    },
    /// Evaluate the equality family of Einstein products in dimension n.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Yamabe data, optionally with the modified-functional probe at beta.
    Yamabe {
        #[arg(long)]
        model: String,
        #[arg(long)]
        beta: Option<f64>,
        /// Number of perturbation test functions for the probe.
        #[arg(long, default_value_t = 200)]
        probes: usize,
    },
    /// Run the full property suite.
    Selftest {
        /// Override the random trial counts.
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn check_n(n: usize, max_n: usize) -> Result<(), Error> {
    if n > max_n {
        return Err(Error::DimensionCap { n, cap: max_n });
    }
    Ok(())
}

fn pinch_failed(reports: &[PinchReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Violated || !r.betti_consistent)
}

/// Builds the report and whether it records a violation.
fn run(cli: &Cli) -> Result<(Report, bool), Error> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::InvalidArgument("--tol must be positive".into()));
    }
    let model = |src: &str| -> Result<_, Error> {
        let expr = parse_expr(src)?;
        check_n(expr.factors.iter().map(|f| f.dim()).sum::<usize>() + usize::from(expr.alpha.is_some()), cli.max_n)?;
        Ok(expr)
    };
    Ok(match &cli.command {
        Command::Constants { n, k } => {
            check_n(*n, cli.max_n)?;
            (Report::new(ReportBody::Constants(constants_report(*n, *k)?)), false)
        }
        Command::Spectrum { model: src, k } => {
            let s = spectrum_report(&model(src)?.build()?, *k)?;
            let bad = s.lemma.as_ref().is_some_and(|l| l.verdict == Verdict::Violated);
            (Report::new(ReportBody::Spectrum(s)), bad)
        }
        Command::Verify { theorem, model: src } => {
            let reports = vec![evaluate_theorem(*theorem, &model(src)?.build()?, cli.tol)?];
            let bad = pinch_failed(&reports);
            (Report::new(ReportBody::Pinch { reports }), bad)
        }
        Command::Sweep { n, k } => {
            check_n(*n, cli.max_n)?;
            let reports = sweep_equality_family(*n, *k, cli.tol)?;
            let bad = pinch_failed(&reports);
            (Report::new(ReportBody::Pinch { reports }), bad)
        }
        Command::Yamabe { model: src, beta, probes } => {
            let probe = beta.map(|beta| ProbeSettings {
                beta,
                count: *probes,
                seed: cli.seed,
            });
            let y = yamabe_report(&model(src)?, probe)?;
            let bad = y.probe.as_ref().is_some_and(|p| !p.bound_holds);
            (Report::new(ReportBody::Yamabe(y)), bad)
        }
        Command::Selftest { trials } => {
            let r = run_selftest(&SelftestConfig {
                seed: cli.seed,
                trials: *trials,
            });
            let bad = !r.passed;
            (Report::new(ReportBody::Selftest(r)), bad)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, violated) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Json => to_json(&report),
        Format::Md => Ok(to_markdown(&report)),
        Format::Csv => to_csv(&report),
    };
    match text {
        Ok(t) => print!("{}{}", t, if t.ends_with('\n') { "" } else { "\n" }),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if violated {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
