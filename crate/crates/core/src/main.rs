use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tbl::analysis::DEFAULT_N_SIGMA;
use tbl::cli;
use tbl::config::{preset, BetaGrid, PRESET_NAMES};
use tbl::Result;

#[derive(Parser)]
#[command(name = "tbl", version, about = "Tachyon speed bounds and sidereal Bell-test simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled configuration (see `tbl presets`)
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the speed bound over the frame velocity
    Bounds {
        /// TOML run configuration
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bundled curve; repeat for several
        #[arg(long)]
        preset: Vec<String>,
        /// lo:hi:n:log|lin
        #[arg(long)]
        beta_grid: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write a JSON file per curve
        #[arg(long)]
        json: bool,
    },
    /// Simulate a sidereal-day coincidence run
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute M per bin and scan for anomaly windows
    Analyze {
        /// Coincidence CSV
        #[arg(long)]
        input: PathBuf,
        /// Config supplying the sidereal period (defaults to one sidereal day)
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_N_SIGMA)]
        n_sigma: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Thermal drift of the optical path against the equalization budget
    Drift {
        #[command(flatten)]
        source: Source,
    },
    /// List presets, or print one as TOML
    Presets { name: Option<String> },
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Bounds {
            config,
            preset: presets,
            beta_grid,
            out,
            json,
        } => {
            let mut configs = presets.iter().map(|p| preset(p)).collect::<Result<Vec<_>>>()?;
            if config.is_some() || configs.is_empty() {
                configs.push(cli::load_config(None, config.as_deref())?);
            }
            let grid = match beta_grid {
                Some(spec) => BetaGrid::parse(&spec)?,
                None => BetaGrid::default(),
            };
            for (curve, path) in cli::cmd_bounds(&configs, &grid, &out, json)? {
                println!("{}: {} points -> {}", curve.label, curve.points.len(), path.display());
            }
        }
        Command::Simulate { source, seed, out } => {
            let cfg = cli::load_config(source.preset.as_deref(), source.config.as_deref())?;
            let (run, path) = cli::cmd_simulate(&cfg, seed, &out)?;
            let m = &run.metadata;
            println!(
                "{} bins of {} s, seed {}, {} infeasible -> {}",
                m.bins,
                m.bin_width_s,
                m.seed,
                m.infeasible_bins,
                path.display()
            );
            if m.dropped_partial_bins > 0 {
                println!("dropped a partial trailing bin of {} s", m.dropped_seconds);
            }
        }
        Command::Analyze {
            input,
            source,
            n_sigma,
            out,
        } => {
            let period = match (&source.preset, &source.config) {
                (None, None) => tbl::relativity::SIDEREAL_DAY_S,
                _ => cli::load_config(source.preset.as_deref(), source.config.as_deref())?.sidereal_period(),
            };
            println!("{}", cli::cmd_analyze(&input, &out, period, n_sigma)?);
        }
        Command::Drift { source } => {
            let cfg = cli::load_config(source.preset.as_deref(), source.config.as_deref())?;
            println!("{}", cli::cmd_drift(&cfg)?);
        }
        Command::Presets { name: None } => {
            for name in PRESET_NAMES {
                println!("{}", name);
            }
        }
        Command::Presets { name: Some(name) } => print!("{}", preset(&name)?.to_toml()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
