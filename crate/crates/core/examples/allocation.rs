//! Closed-form candidates and the selected allocation across SNR.

use rsma::allocation::{propose, DesignParams};
use rsma::channel::{CsitModel, Link, SystemConfig};
use rsma::harness::drop_gains;

fn main() -> rsma::Result<()> {
    for csit in [CsitModel::Perfect, CsitModel::FixedEps { eps: 0.7 }] {
        let cfg = SystemConfig {
            csit_model: csit,
            ..SystemConfig::new(4, 8)
        };
        let v = drop_gains(&cfg, 0)?;
        println!("{csit:?}");
        for snr in [0.0, 10.0, 20.0, 30.0, 40.0] {
            let p = cfg.power_for_snr_db(snr);
            let link = Link::new(4, 8, p, rsma::channel::effective_csit_quality(&cfg, p), v.clone())?;
            let prop = propose(&link, &DesignParams::from(&cfg))?;
            let s = prop.selected;
            println!(
                "  {snr:>4} dB: candidate {} ({:?}) t = {:.4e} beta = {:.4} predicted {:.3}",
                s.index,
                s.scheme,
                s.t,
                s.beta.unwrap_or(0.0),
                s.predicted_rate
            );
            for c in prop.candidates.iter().filter(|c| !c.is_feasible() || c.is_fallback()) {
                println!("        candidate {} not in closed form: {:?}", c.index, c.feasibility);
            }
        }
    }
    Ok(())
}
