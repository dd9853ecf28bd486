use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maxcon::experiment::{self, ExperimentSpec, SweepParameter, SweepValue};
use maxcon::Result;

#[derive(Parser)]
#[command(name = "maxcon", version, about = "Noisy max-consensus simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Spec file, or the name of a built-in preset.
    #[arg(long)]
    spec: String,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of replicas.
    #[arg(long)]
    replicas: Option<usize>,
    /// Override the noise seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate all replicas and write traces, report and summary.
    Run(Common),
    /// Rerun the spec over a list of values for one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// beta, a, omega, sigma_n2 or T.
        #[arg(long)]
        parameter: SweepParameter,
        /// Comma-separated values; `optimal` works for a, `mean` for T.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<SweepValue>,
    },
    /// Print the theoretical quantities for the spec as JSON.
    Analyze(Common),
    /// List the built-in presets.
    Presets,
}

fn load(c: &Common) -> Result<ExperimentSpec> {
    let mut spec = experiment::load_spec(&c.spec)?;
    if let Some(k) = c.replicas {
        spec.replicas = k;
    }
    if let Some(s) = c.seed {
        spec.noise_seed = s;
    }
    Ok(spec)
}

fn out_dir(c: &Common, spec: &ExperimentSpec) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&spec.name))
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("maxcon: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(c) => {
            let spec = load(&c)?;
            let dir = out_dir(&c, &spec);
            let summary = experiment::cmd_run(&spec, &dir)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            eprintln!("wrote {}", dir.display());
        }
        Command::Sweep { common, parameter, values } => {
            let spec = load(&common)?;
            let dir = out_dir(&common, &spec);
            let result = experiment::cmd_sweep(&spec, parameter, &values, Some(&dir))?;
            for row in &result.summary {
                let settle = row.median_settle_iteration.map_or("never".to_string(), |s| s.to_string());
                let bias = row.terminal_bias.map_or("undefined".to_string(), |b| format!("{b:.4}"));
                println!("{}={}: bias {bias}, median settle {settle}", row.parameter, row.value);
            }
            eprintln!("wrote {}", dir.display());
        }
        Command::Analyze(c) => {
            let spec = load(&c)?;
            let report = experiment::cmd_analyze(&spec, c.out.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Command::Presets => {
            for (name, _) in experiment::PRESETS {
                let spec = experiment::preset(name)?;
                println!("{name:24} {}", spec.description.unwrap_or_default());
            }
        }
    }
    Ok(())
}
