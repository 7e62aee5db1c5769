//! Large-scale gains, imperfect-CSIT channel draws and the SNR-to-power convention.

use rsma::channel::{
    effective_csit_quality, sample_large_scale, sample_realization, substream, CsitModel, SystemConfig,
};

fn main() -> rsma::Result<()> {
    let cfg = SystemConfig {
        csit_model: CsitModel::FixedEps { eps: 0.8 },
        ..SystemConfig::new(4, 8)
    };
    let mut rng = substream(7, 0);
    let v = sample_large_scale(&cfg, &mut rng)?;
    println!("gains: {v:.3?}");

    let power = cfg.power_for_snr_db(20.0);
    println!(
        "20 dB at the weakest user -> P = {power:.1}, eps^2 = {:.2}",
        effective_csit_quality(&cfg, power)
    );

    // h = eps h_hat + sqrt(1 - eps^2) e, so projecting h on h_hat recovers eps.
    let draws = 2000;
    let (mut along, mut est) = (0.0, 0.0);
    for _ in 0..draws {
        let real = sample_realization(&cfg, power, &v, &mut rng);
        along += real.h_hat.zip_map(&real.h, |a, b| (a.conj() * b).re).sum();
        est += real.h_hat.norm_squared();
    }
    println!("eps recovered from {draws} draws: {:.3}", along / est);
    Ok(())
}
