use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_cli::{emit_plot_data, CliError, Overrides, ProblemConfig, VerificationReport};

#[derive(Parser)]
#[command(name = "hardy", version, about = "Verify Caccioppoli and Hardy inequalities built from supersolutions")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the hypothesis, supersolution, Caccioppoli and Hardy checks.
    Verify(Common),
    /// Minimize the Rayleigh quotient of the configured Hardy data.
    Minimize(Common),
    /// Evaluate the quotient over a trial family.
    Probe(Common),
    /// Check the change of variables and the transformed equation.
    Transform(Common),
    /// Check the reference compatibility pairs.
    Pairs(Common),
}

#[derive(Args)]
struct Common {
    /// TOML problem configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json and CSV sidecars; prints JSON to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_size: Option<usize>,
    /// Relative tolerance of the pointwise supersolution check.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn load(&self, required: bool) -> Result<Option<ProblemConfig>, CliError> {
        let Some(path) = &self.config else {
            return if required {
                Err(CliError::Config { path: "--config".into(), message: "a configuration file is required".into() })
            } else {
                Ok(None)
            };
        };
        let mut cfg = ProblemConfig::load(path)?;
        cfg.apply(&Overrides { seed: self.seed, grid_size: self.grid_size, tol: self.tol });
        Ok(Some(cfg))
    }
}

fn run(verb: &Verb) -> Result<(VerificationReport, Option<PathBuf>), CliError> {
    let (common, report) = match verb {
        Verb::Verify(c) => (c, hardy_cli::run_verify(&c.load(true)?.unwrap())?),
        Verb::Minimize(c) => (c, hardy_cli::run_minimize(&c.load(true)?.unwrap())?),
        Verb::Probe(c) => (c, hardy_cli::run_probe(&c.load(true)?.unwrap())?),
        Verb::Transform(c) => (c, hardy_cli::run_transform(&c.load(true)?.unwrap())?),
        Verb::Pairs(c) => (c, hardy_cli::run_pairs(c.load(false)?.as_ref())?),
    };
    Ok((report, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.verb) {
        Ok((report, out)) => {
            match &out {
                Some(dir) => {
                    if let Err(e) = report.write(dir).and_then(|_| emit_plot_data(&report, dir).map(drop)) {
                        eprintln!("error: {e}");
                        return ExitCode::from(e.exit_code() as u8);
                    }
                    for c in report.checks.iter().filter(|c| !c.passed()) {
                        eprintln!("FAIL {} (margin {:e}, tolerance {:e})", c.name, c.margin, c.tolerance);
                    }
                    println!("{}: {:?}, {} checks, report in {}", report.command, report.status, report.checks.len(), dir.display());
                }
                None => print!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
