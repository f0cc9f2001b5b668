use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use mlsw_core::harness::{build_scenario, load_config, parse_layers, parse_snapshots, run, ScenarioConfig};
use mlsw_core::{ConfigError, Error, Scheme};

#[derive(Parser)]
#[command(name = "mlsw", version, about = "Multilayer shallow-water solver with variable layer counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write snapshots and metrics.
    Run(RunArgs),
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// free_oscillations, subcritical_peak, tidal_forcing or sediment_dune
    #[arg(long)]
    scenario: Option<String>,
    /// Configuration file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Target celerity Courant number of the explicit scheme.
    #[arg(long)]
    courant: Option<f64>,
    /// Layer count, `x_lo:x_hi:N;...` regions, or a TOML file with [[layers]].
    #[arg(long)]
    layers: Option<String>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Comma-separated output times.
    #[arg(long)]
    snapshots: Option<String>,
    /// Directory caching reference solutions; enables error metrics.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn build_config(args: &RunArgs) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => build_scenario(name)?,
        (None, None) => {
            return Err(ConfigError::Parameter {
                name: "scenario".into(),
                reason: "give --scenario or --config".into(),
            })
        }
    };
    if let (Some(_), Some(name)) = (&args.config, &args.scenario) {
        if *name != cfg.name {
            return Err(ConfigError::Parameter {
                name: "scenario".into(),
                reason: format!("--scenario {name} disagrees with the config file ({})", cfg.name),
            });
        }
    }
    if let Some(s) = args.scheme {
        cfg.scheme = s;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(theta) = args.theta {
        cfg.theta = theta;
    }
    if let Some(c) = args.courant {
        cfg.courant = c;
    }
    if let Some(spec) = &args.layers {
        cfg.layers = parse_layers(spec, cfg.grid.x_start, cfg.grid.x_end)?;
    }
    if let Some(t) = args.tfinal {
        cfg.t_final = t;
        if args.snapshots.is_none() {
            cfg.snapshots.retain(|&s| s <= t);
        }
    }
    if let Some(s) = &args.snapshots {
        cfg.snapshots = parse_snapshots(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        Error::Solver { .. } => ExitCode::from(3),
        Error::Io { .. } => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => load_config(&config)
            .and_then(|cfg| {
                cfg.validate()?;
                Ok(cfg)
            })
            .map(|cfg| {
                let model = cfg.build_model().expect("validated");
                println!(
                    "ok: {} ({} cells, {} dof, scheme {})",
                    cfg.name,
                    model.grid.n_cells(),
                    model.layout.dof_count(),
                    cfg.scheme
                );
            })
            .map_err(Error::from),
        Command::Run(args) => build_config(&args).map_err(Error::from).and_then(|cfg| {
            let out = run(&cfg, &args.out, args.reference.as_deref())?;
            print!("{}", out.metrics.render());
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            exit_code(&e)
        }
    }
}
