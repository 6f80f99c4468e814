//! `wsnsim` — deterministic round-based simulator for cluster-based
//! wireless sensor networks.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use wsnsim::experiments::{run_experiment, ExperimentName, ExperimentSpec};
use wsnsim::oracle_checks;
use wsnsim::output;
use wsnsim_core::sim::run_simulation;
use wsnsim_core::{ProtocolKind, SimConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_UNWRITABLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wsnsim",
    version,
    about = "Round-based energy simulator for cluster-based wireless sensor networks",
    after_help = "Protocols: aro-wsn, leach, leach-c, kmeans, fuzzy-leach.\n\
                  WSNSIM_THREADS caps the experiment worker pool."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML configuration file; every key is optional (defaults apply).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol on one seeded field and write rounds.csv + manifest.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        /// Protocol name (aro-wsn, leach, leach-c, kmeans, fuzzy-leach).
        #[arg(long)]
        protocol: String,
        /// Master seed; drives placement and all protocol randomness.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = "wsnsim-out")]
        out: PathBuf,
    },
    /// Run a named experiment sweep with multi-seed averaging.
    #[command(after_help = experiment_help())]
    Experiment {
        /// Experiment name (see below for the figure mapping).
        name: String,
        #[command(flatten)]
        config: ConfigArg,
        /// Number of consecutive seeds to average over.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// First seed of the list.
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        /// Output directory root.
        #[arg(long, default_value = "wsnsim-out")]
        out: PathBuf,
    },
    /// Run oracle-equivalence checks (brute-force reference comparisons).
    Oracle {
        /// Which check: knn or rankorder.
        which: String,
        /// knn: number of randomized instances; rankorder: points per instance.
        #[arg(long)]
        n: Option<usize>,
        /// Base seed for instance generation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn experiment_help() -> String {
    let mut s = String::from("Experiments and the figures they reproduce:\n");
    for e in ExperimentName::ALL {
        s.push_str(&format!("  {:<15} {}\n", e.slug(), e.figures()));
    }
    s
}

fn load_config(arg: &ConfigArg) -> Result<SimConfig, u8> {
    match &arg.config {
        None => Ok(SimConfig::default()),
        Some(path) => SimConfig::load(path).map_err(|e| {
            eprintln!("error: {e}");
            EXIT_USAGE
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn dispatch(cli: Cli) -> Result<(), u8> {
    match cli.command {
        Command::Run {
            config,
            protocol,
            seed,
            out,
        } => {
            let cfg = load_config(&config)?.with_seed(seed);
            let kind = ProtocolKind::from_str(&protocol).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_USAGE
            })?;
            output::probe_writable(&out).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_UNWRITABLE
            })?;
            let t0 = Instant::now();
            let result = run_simulation(&cfg, kind).map_err(|e| {
                eprintln!("error: {e}");
                1u8
            })?;
            let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            let dir = out.join(format!("run-{}-s{}", kind.slug(), seed));
            output::write_run(&dir, &cfg, &result, wall_ms).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_UNWRITABLE
            })?;
            println!(
                "{kind}: seed {seed}, {} rounds, FND {:?}, LND {:?}{} -> {}",
                result.records.len(),
                result.fnd,
                result.lnd,
                if result.truncated { " (truncated)" } else { "" },
                dir.display()
            );
            Ok(())
        }
        Command::Experiment {
            name,
            config,
            seeds,
            base_seed,
            out,
        } => {
            let name = ExperimentName::from_str(&name).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_USAGE
            })?;
            let cfg = load_config(&config)?;
            output::probe_writable(&out).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_UNWRITABLE
            })?;
            let spec = ExperimentSpec::new(name, cfg, seeds, base_seed, out);
            let outcome = run_experiment(&spec).map_err(|e| {
                eprintln!("error: {e}");
                if e.to_string().contains("cannot write") || e.to_string().contains("cannot create")
                {
                    EXIT_UNWRITABLE
                } else {
                    1u8
                }
            })?;
            println!(
                "{:<12} {:>10} {:>9} {:>9} {:>9} {:>9} {:>6}",
                "protocol", "grid", "fnd_mean", "fnd_std", "lnd_mean", "lnd_std", "seeds"
            );
            for r in &outcome.rows {
                println!(
                    "{:<12} {:>10} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>6}",
                    r.protocol, r.grid_value, r.fnd_mean, r.fnd_std, r.lnd_mean, r.lnd_std, r.seeds
                );
            }
            println!("outputs: {}", outcome.dir.display());
            Ok(())
        }
        Command::Oracle { which, n, seed } => {
            let report = match which.as_str() {
                "knn" => oracle_checks::check_knn(n.unwrap_or(50), seed),
                "rankorder" => oracle_checks::check_rankorder(10, n.unwrap_or(60), seed),
                other => {
                    eprintln!("error: unknown oracle check {other:?} (expected knn or rankorder)");
                    return Err(EXIT_USAGE);
                }
            };
            for line in &report.lines {
                println!("{line}");
            }
            if report.passed() {
                println!("oracle {which}: all {} instances match", report.instances);
                Ok(())
            } else {
                eprintln!(
                    "oracle {which}: {} of {} instances mismatched",
                    report.mismatches, report.instances
                );
                Err(1)
            }
        }
    }
}
