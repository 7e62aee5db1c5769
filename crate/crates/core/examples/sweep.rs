//! Full SNR sweep of every scheme, written as CSV to stdout.

use rsma::channel::{CsitModel, SystemConfig};
use rsma::harness::{run_sweep, write_csv, SchemeId, SweepSpec};
use rsma::search::GridProfile;

fn main() -> rsma::Result<()> {
    let cfg = SystemConfig {
        csit_model: CsitModel::FixedEps { eps: 0.9 },
        realizations: 20,
        fading_samples: 50,
        seed: 1,
        ..SystemConfig::new(4, 8)
    };
    let spec = SweepSpec {
        snr_min_db: 0.0,
        snr_max_db: 40.0,
        snr_step_db: 10.0,
        schemes: SchemeId::ALL.to_vec(),
        realizations: cfg.realizations,
        grid_profile: GridProfile::Standard,
    };
    let rows = run_sweep(&cfg, &spec)?;
    write_csv(&rows, std::io::stdout().lock()).map_err(|e| rsma::Error::Config(e.to_string()))?;
    Ok(())
}
