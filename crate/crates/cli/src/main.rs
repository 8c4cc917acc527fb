use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cavity_dw_cli::config::{validate_config, ScenarioConfig, ScenarioKind};
use cavity_dw_cli::scenario::{apply_out_override, run_scenario};
use cavity_dw_core::variational::StartGrid;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cavity-dw",
    about = "Simulations of ultracold atoms in a cavity-mediated double well",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedGrid {
    Coarse,
    Fine,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario configurations
    Run {
        /// Configuration files (JSON, one scenario each)
        configs: Vec<PathBuf>,
        /// Override the output directory (per-config subdirectories when
        /// several configs are given)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Density of the variational multi-start grid
        #[arg(long, value_enum, default_value = "coarse")]
        seed_grid: SeedGrid,
    },
    /// Validate a configuration file and report every problem found
    Validate { config: PathBuf },
    /// List the available scenarios
    ListScenarios,
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, u8> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: cannot read: {e}", path.display());
            return Err(EXIT_CONFIG);
        }
    };
    match validate_config(&text) {
        Ok(cfg) => Ok(cfg),
        Err(errors) => {
            eprintln!("{}: invalid configuration:", path.display());
            for e in errors {
                eprintln!("  {e}");
            }
            Err(EXIT_CONFIG)
        }
    }
}

fn batch_threads() -> usize {
    std::env::var("CAVITY_DW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn run_batch(configs: Vec<(PathBuf, ScenarioConfig)>, starts: StartGrid) -> u8 {
    let threads = batch_threads().min(configs.len().max(1));
    let jobs = std::sync::Mutex::new(configs.into_iter());
    let worst = std::sync::atomic::AtomicU8::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = { jobs.lock().unwrap().next() };
                let Some((path, cfg)) = job else { break };
                match run_scenario(&cfg, &starts) {
                    Ok(manifest) => {
                        println!(
                            "{}: {} -> {} ({:.2}s)",
                            path.display(),
                            cfg.kind.name(),
                            cfg.output_dir.display(),
                            manifest.wall_time_s
                        );
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        worst.fetch_max(EXIT_NUMERICAL, std::sync::atomic::Ordering::SeqCst);
                    }
                }
            });
        }
    });
    worst.load(std::sync::atomic::Ordering::SeqCst)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::ListScenarios => {
            for kind in ScenarioKind::all() {
                println!("{:<14} {}", kind.name(), kind.describe());
            }
            0
        }
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!(
                    "{}: valid {} configuration",
                    config.display(),
                    cfg.kind.name()
                );
                0
            }
            Err(code) => code,
        },
        Command::Run {
            configs,
            out,
            seed_grid,
        } => {
            if configs.is_empty() {
                eprintln!("no configuration files given");
                return ExitCode::from(EXIT_CONFIG);
            }
            let mut loaded = Vec::new();
            for path in &configs {
                match load_config(path) {
                    Ok(cfg) => loaded.push((path.clone(), cfg)),
                    Err(code) => return ExitCode::from(code),
                }
            }
            if let Some(out) = out {
                apply_out_override(&mut loaded, &out);
            }
            let starts = match seed_grid {
                SeedGrid::Coarse => StartGrid::coarse(),
                SeedGrid::Fine => StartGrid::fine(),
            };
            run_batch(loaded, starts)
        }
    };
    ExitCode::from(code)
}
