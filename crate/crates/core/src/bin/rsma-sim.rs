use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rsma::channel::SystemConfig;
use rsma::harness::{allocate_at, emit_bound_csv, emit_csv, parse_scheme_list, run_sweep, SchemeId, SweepSpec};
use rsma::search::GridProfile;
use rsma::selftest;

#[derive(Parser)]
#[command(name = "rsma-sim", version, about = "Rate-splitting max-min fairness simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep SNR and write one CSV row per (SNR, scheme).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr_min: f64,
        #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
        snr_max: f64,
        #[arg(long, default_value_t = 5.0)]
        snr_step: f64,
        /// Comma-separated scheme names; defaults to all.
        #[arg(long)]
        schemes: Option<String>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long, value_enum, default_value_t = GridProfile::Standard)]
        grid_profile: GridProfile,
        /// Also write the bound-predicted RSMA rates to this CSV.
        #[arg(long)]
        bound_out: Option<PathBuf>,
    },
    /// Print the closed-form allocation at one SNR as a JSON line.
    Allocate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        snr: f64,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn run(cli: Cli) -> rsma::Result<bool> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            snr_min,
            snr_max,
            snr_step,
            schemes,
            realizations,
            grid_profile,
            bound_out,
        } => {
            let mut cfg = SystemConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let spec = SweepSpec {
                snr_min_db: snr_min,
                snr_max_db: snr_max,
                snr_step_db: snr_step,
                schemes: match schemes {
                    Some(list) => parse_scheme_list(&list)?,
                    None => SchemeId::ALL.to_vec(),
                },
                realizations: realizations.unwrap_or(cfg.realizations),
                grid_profile,
            };
            let rows = run_sweep(&cfg, &spec)?;
            emit_csv(&rows, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            if let Some(path) = bound_out {
                emit_bound_csv(&rows, &path)?;
                eprintln!("wrote predicted rates to {}", path.display());
            }
            Ok(true)
        }
        Command::Allocate { config, snr } => {
            let cfg = SystemConfig::load(&config)?;
            let report = allocate_at(&cfg, snr)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(true)
        }
        Command::Selftest => {
            let results = selftest::run_all();
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
