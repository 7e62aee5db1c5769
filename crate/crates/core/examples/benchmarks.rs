//! SDMA baselines: one-shot grouping, MRT and time-shared scheduling.

use rsma::benchmarks::{benchmark_report, Benchmark};
use rsma::channel::{sample_realization, substream, SystemConfig};

fn main() -> rsma::Result<()> {
    let cfg = SystemConfig::new(4, 8);
    let v = vec![1.0, 0.8, 0.5, 0.3, 1.0, 0.6, 0.2, 0.1];
    let mut rng = substream(5, 0);
    let base: Vec<_> = (0..2000).map(|_| sample_realization(&cfg, 1.0, &v, &mut rng)).collect();
    println!(
        "{:>6} {:>12} {:>8} {:>14} {:>15}",
        "SNR", "ZF grouping", "MRT", "scheduled ZF", "scheduled MRT"
    );
    for snr in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let p = cfg.power_for_snr_db(snr);
        let reals: Vec<_> = base.iter().map(|r| r.at(p, 1.0)).collect();
        let rate = |b| benchmark_report(&reals, b).map(|r| r.maxmin_rate);
        println!(
            "{snr:>6} {:>12.3} {:>8.3} {:>14.3} {:>15.3}",
            rate(Benchmark::ZfGrouping)?,
            rate(Benchmark::Mrt)?,
            rate(Benchmark::ScheduledZf)?,
            rate(Benchmark::ScheduledMrt)?
        );
    }
    Ok(())
}
