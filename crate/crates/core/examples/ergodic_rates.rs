//! Monte Carlo ergodic rates of a fixed rate-splitting design.

use rsma::channel::{substream, CsitModel, SystemConfig};
use rsma::precoders::Scheme;
use rsma::rates::{ergodic_rates_mc, Design};

fn main() -> rsma::Result<()> {
    let cfg = SystemConfig {
        csit_model: CsitModel::FixedEps { eps: 0.9 },
        ..SystemConfig::new(4, 8)
    };
    let v = vec![1.0, 0.8, 0.5, 0.3, 1.0, 0.6, 0.2, 0.1];
    let mut rng = substream(11, 0);
    for (scheme, beta) in [(Scheme::Zf, 0.05), (Scheme::Mrt, 0.0)] {
        for t in [0.05, 0.3, 0.9] {
            let r = ergodic_rates_mc(&cfg, 1000.0, &v, Design { scheme, t, beta }, 2000, &mut rng)?;
            // ZF carries private streams for the first N users only.
            let served = if scheme == Scheme::Zf { cfg.n_tx } else { cfg.n_users };
            let weakest = r.private_rates[..served].iter().copied().fold(f64::INFINITY, f64::min);
            println!(
                "{scheme:?} t={t:<4} common {:.3}  weakest private {:.3}  max-min {:.3} (+/- {:.3})",
                r.common_rate, weakest, r.maxmin_rate, r.std_err
            );
        }
    }
    Ok(())
}
