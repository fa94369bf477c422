use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use growthlab::config::ExperimentConfig;
use growthlab::runner::{predict_scenario, run_scenario, run_suite};
use growthlab::Execution;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Growth rates of sublinear delay and Volterra equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for trajectory CSVs and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the step size.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Override the horizon.
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and judge it against the prediction.
    Run { config: PathBuf },
    /// Run every `*.cfg` scenario in a directory.
    Suite { dir: PathBuf },
    /// Print the prediction only.
    Predict { config: PathBuf },
}

fn load(cli: &Cli, path: &Path) -> growthlab::Result<ExperimentConfig> {
    let mut c = ExperimentConfig::load(path)?;
    if let Some(h) = cli.h {
        c.h = h;
    }
    if let Some(t) = cli.t_end {
        c.t_end = t;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = match &cli.command {
        Command::Run { config } => load(&cli, config)
            .and_then(|c| run_scenario(&c, cli.out.as_deref(), exec))
            .map(|o| {
                print!("{}", o.report.render());
                o.report.verdict.is_success()
            }),
        Command::Predict { config } => load(&cli, config).and_then(|c| predict_scenario(&c)).map(|p| {
            println!("lambda_class: {}", p.lambda_class);
            println!("mass: {}", p.mass);
            println!("first_moment: {}", p.moment);
            println!("predicted_limit: {}", p.limit);
            println!("rationale: {}", p.rationale.label());
            true
        }),
        Command::Suite { dir } => {
            if cli.h.is_some() || cli.t_end.is_some() {
                eprintln!("note: --h and --t-end apply to `run` only");
            }
            run_suite(dir, cli.out.as_deref(), exec).map(|s| {
                print!("{}", s.render());
                s.passed()
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
