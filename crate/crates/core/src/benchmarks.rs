//! SDMA baselines without a common stream.
//!
//! One-shot schemes serve all users at once with equal power per stream.
//! Scheduled schemes serve one index-contiguous group of at most `N` users per
//! time slot at full power and divide each rate by the number of slots.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::channel::{CMatrix, ChannelRealization};
use crate::error::{domain, Error, Result};
use crate::precoders::{mrt_precoders, zf_precoders, PrecoderSet, Scheme};
use crate::rates::{sinrs_from_gains, GainTable, Objective, RateAccumulator, RateReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    /// All groups at once, ZF computed inside each group.
    ZfGrouping,
    /// All users at once with matched filters.
    Mrt,
    ScheduledZf,
    ScheduledMrt,
}

impl Benchmark {
    pub fn is_scheduled(self) -> bool {
        matches!(self, Benchmark::ScheduledZf | Benchmark::ScheduledMrt)
    }

    fn precoding(self) -> Scheme {
        match self {
            Benchmark::ZfGrouping | Benchmark::ScheduledZf => Scheme::Zf,
            Benchmark::Mrt | Benchmark::ScheduledMrt => Scheme::Mrt,
        }
    }
}

/// `⌈K/N⌉` consecutive index ranges of at most `N` users.
pub fn contiguous_groups(n_users: usize, n_tx: usize) -> Vec<Range<usize>> {
    (0..n_users.div_ceil(n_tx))
        .map(|g| g * n_tx..((g + 1) * n_tx).min(n_users))
        .collect()
}

fn group_precoders(h_hat: &CMatrix, scheme: Scheme) -> Result<CMatrix> {
    match scheme {
        Scheme::Zf => zf_precoders(h_hat),
        Scheme::Mrt => mrt_precoders(h_hat),
    }
}

fn private_only(privates: CMatrix, scheme: Scheme) -> PrecoderSet {
    let k = privates.ncols();
    PrecoderSet {
        common: None,
        privates,
        scheme,
        group1: (0..k).collect(),
        group2: Vec::new(),
        mu: vec![1.0 / k as f64; k],
    }
}

/// Per-user rates of a one-shot scheme on one realization.
pub fn one_shot_rates(real: &ChannelRealization, bench: Benchmark) -> Result<Vec<f64>> {
    let (n, k) = (real.n_tx(), real.n_users());
    let privates = match bench {
        Benchmark::ZfGrouping => {
            let mut p = CMatrix::zeros(n, k);
            for g in contiguous_groups(k, n) {
                let block = group_precoders(&real.h_hat.columns(g.start, g.len()).into_owned(), Scheme::Zf)?;
                p.columns_mut(g.start, g.len()).copy_from(&block);
            }
            p
        }
        Benchmark::Mrt => mrt_precoders(&real.h_hat)?,
        other => return Err(domain("one_shot_rates", format!("{other:?} is time-shared"))),
    };
    let pre = private_only(privates, bench.precoding());
    let gains = GainTable::new(&real.h, &pre);
    let (_, gamma) = sinrs_from_gains(&gains, &pre.mu, &real.v, real.power, 1.0);
    Ok(gamma.iter().map(|g| g.ln_1p() / std::f64::consts::LN_2).collect())
}

/// Per-user rates of a scheduled scheme on one realization, time-share included.
pub fn scheduled_rates(real: &ChannelRealization, bench: Benchmark) -> Result<Vec<f64>> {
    if !bench.is_scheduled() {
        return Err(domain("scheduled_rates", format!("{bench:?} is one-shot")));
    }
    let (n, k) = (real.n_tx(), real.n_users());
    let groups = contiguous_groups(k, n);
    let slots = groups.len() as f64;
    let mut rates = vec![0.0; k];
    for g in groups {
        let h_hat = real.h_hat.columns(g.start, g.len()).into_owned();
        let h = real.h.columns(g.start, g.len()).into_owned();
        let pre = private_only(group_precoders(&h_hat, bench.precoding())?, bench.precoding());
        let gains = GainTable::new(&h, &pre);
        let (_, gamma) = sinrs_from_gains(&gains, &pre.mu, &real.v[g.clone()], real.power, 1.0);
        for (r, gm) in rates[g].iter_mut().zip(&gamma) {
            *r = gm.ln_1p() / std::f64::consts::LN_2 / slots;
        }
    }
    Ok(rates)
}

/// Per-user rates of any baseline on one realization.
pub fn benchmark_rates(real: &ChannelRealization, bench: Benchmark) -> Result<Vec<f64>> {
    if bench.is_scheduled() {
        scheduled_rates(real, bench)
    } else {
        one_shot_rates(real, bench)
    }
}

/// Ergodic rates of a baseline; realizations that cannot be zero-forced are skipped.
pub fn benchmark_report(reals: &[ChannelRealization], bench: Benchmark) -> Result<RateReport> {
    let first = reals
        .first()
        .ok_or_else(|| domain("benchmark_report", "no realizations"))?;
    let mut acc = RateAccumulator::new(first.n_users());
    for real in reals {
        match benchmark_rates(real, bench) {
            Ok(r) => acc.push_private_rates(&r),
            Err(Error::SingularChannel { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    acc.finish(Objective::MinPrivate)
}

pub fn sdma_one_shot(reals: &[ChannelRealization], bench: Benchmark) -> Result<RateReport> {
    if bench.is_scheduled() {
        return Err(domain("sdma_one_shot", format!("{bench:?} is time-shared")));
    }
    benchmark_report(reals, bench)
}

pub fn sdma_scheduled(reals: &[ChannelRealization], bench: Benchmark) -> Result<RateReport> {
    if !bench.is_scheduled() {
        return Err(domain("sdma_scheduled", format!("{bench:?} is one-shot")));
    }
    benchmark_report(reals, bench)
}
