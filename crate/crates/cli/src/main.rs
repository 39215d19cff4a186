use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hexhand::{genmap, load_config, run, CliError, Mode};
use hexhand_core::topology::Orientation;

#[derive(Parser)]
#[command(
    name = "hexhand",
    version,
    about = "Predictive Wi-Fi handoff simulator on hexagonal AP maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, or a parameter sweep with --sweep.
    Run {
        config: PathBuf,
        /// Output directory; overrides out_dir from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed; overrides seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Expand the sweep.* grids into one scenario per grid point.
        #[arg(long)]
        sweep: bool,
    },
    /// Write a generated ring map in the map file format.
    Genmap {
        #[arg(long)]
        rings: usize,
        /// Hexagon edge length in meters.
        #[arg(long)]
        edge: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = Orientation::Pointy)]
        orientation: Orientation,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            sweep,
        } => {
            let mut c = load_config(&config)?;
            if let Some(dir) = out {
                c.out_dir = dir;
            }
            if let Some(s) = seed {
                c.seed = s;
            }
            let report = run(&c, if sweep { Mode::Sweep } else { Mode::Single })?;
            print!("{}", report.summary);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Genmap {
            rings,
            edge,
            out,
            orientation,
        } => {
            genmap(rings, edge, orientation, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hexhand: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
