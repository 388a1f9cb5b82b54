use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geogate_cli::commands::parse_grid;
use geogate_cli::{cmd_run, cmd_sweep, cmd_validate, CliError};

#[derive(Parser)]
#[command(
    name = "geogate",
    version,
    about = "Simulate non-adiabatic geometric gates on exciton qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trajectory.csv, report.json, manifest.json.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// RK4 step in fs, overriding the config.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Run the experiment over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        /// Dotted config path, e.g. model.detuning
        #[arg(long)]
        param: String,
        /// a:b, used with --points
        #[arg(long, conflicts_with = "values")]
        range: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        /// Comma-separated list of values.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a config and its perturbative-regime ratios without running.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn fmt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.6}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { common, out_dir, dt } => cmd_run(&common.config, out_dir.as_deref(), dt).map(|(dir, o)| {
            if !common.quiet {
                let r = &o.report;
                println!("model        {}", r.model);
                println!("gate time    {:.3} fs ({} loop(s))", r.gate_time, r.loop_count);
                println!("fidelity     {}", fmt(r.fidelity));
                println!("geom phase   {}", fmt(r.geom_phase));
                println!("dyn phase    {}", fmt(r.dyn_phase));
                println!("solid angle  {}", fmt(r.solid_angle));
                println!("leakage      {:.3e}", r.leakage);
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                println!("wrote {}", dir.display());
            }
        }),
        Command::Sweep {
            common,
            out_dir,
            dt,
            param,
            range,
            points,
            values,
            jobs,
        } => parse_grid(range.as_deref(), points, values.as_deref())
            .and_then(|grid| cmd_sweep(&common.config, out_dir.as_deref(), &param, &grid, jobs, dt))
            .map(|dir| {
                if !common.quiet {
                    println!("wrote {}", dir.display());
                }
            }),
        Command::Validate { common } => cmd_validate(&common.config).map(|v| {
            if !common.quiet {
                println!("OK");
                if let Some(r) = &v.ratio {
                    println!("{r}");
                }
            }
            for w in &v.warnings {
                eprintln!("warning: {w}");
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
