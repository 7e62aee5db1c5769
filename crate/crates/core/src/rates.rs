//! SINRs, Monte Carlo ergodic rates and the two max-min objectives.
//!
//! Noise power is 1. Rates are in bits/s/Hz.

use rand::Rng;

use crate::channel::{sample_realization, ChannelRealization, CommonPrecoderMode, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::precoders::{common_precoder, PrecoderSet, Scheme};

/// `|h_kᴴ p_j|²` for every user/stream pair plus `|h_kᴴ p_c|²`.
#[derive(Debug, Clone)]
pub struct GainTable {
    k: usize,
    cross: Vec<f64>,
    common: Vec<f64>,
}

impl GainTable {
    pub fn new(h: &crate::channel::CMatrix, pre: &PrecoderSet) -> Self {
        let k = h.ncols();
        let inner = h.adjoint() * &pre.privates;
        let mut cross = vec![0.0; k * k];
        for user in 0..k {
            for stream in 0..k {
                cross[user * k + stream] = inner[(user, stream)].norm_sqr();
            }
        }
        let common = match &pre.common {
            Some(pc) => (h.adjoint() * pc).iter().map(|z| z.norm_sqr()).collect(),
            None => vec![0.0; k],
        };
        Self { k, cross, common }
    }

    /// `|h_userᴴ p_stream|²`.
    pub fn cross(&self, user: usize, stream: usize) -> f64 {
        self.cross[user * self.k + stream]
    }

    pub fn common(&self, user: usize) -> f64 {
        self.common[user]
    }
}

/// Per-user common-stream and private-stream SINRs.
pub fn sinrs_from_gains(g: &GainTable, mu: &[f64], v: &[f64], power: f64, t: f64) -> (Vec<f64>, Vec<f64>) {
    let k = g.k;
    let mut gamma_c = vec![0.0; k];
    let mut gamma = vec![0.0; k];
    for user in 0..k {
        let mut total = 0.0;
        for (stream, &m) in mu.iter().enumerate() {
            total += m * g.cross(user, stream);
        }
        let own = mu[user] * g.cross(user, user);
        let scale = power * t * v[user];
        gamma_c[user] = power * (1.0 - t) * v[user] * g.common(user) / (1.0 + scale * total);
        gamma[user] = scale * own / (1.0 + scale * (total - own).max(0.0));
    }
    (gamma_c, gamma)
}

/// SINRs of one realization under precoders `pre` and private power fraction `t`.
pub fn instantaneous_sinrs(real: &ChannelRealization, pre: &PrecoderSet, t: f64) -> (Vec<f64>, Vec<f64>) {
    let g = GainTable::new(&real.h, pre);
    sinrs_from_gains(&g, &pre.mu, &real.v, real.power, t)
}

/// Running sum and sum of squares, reduced in insertion order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// How per-user rates combine into the max-min figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Two-group ZF design with common-rate share `beta` per private user.
    Zf { n_tx: usize, beta: f64 },
    /// Common rate split equally across all users.
    Mrt,
    /// No common stream: the weakest private rate.
    MinPrivate,
}

/// Ergodic rate estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub common_rate: f64,
    pub private_rates: Vec<f64>,
    pub maxmin_rate: f64,
    pub n_samples: usize,
    /// Largest standard error among the estimates entering `maxmin_rate`.
    pub std_err: f64,
    pub common_std_err: f64,
    pub private_std_errs: Vec<f64>,
}

impl RateReport {
    pub fn min_private(&self) -> f64 {
        self.private_rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Collects per-sample rates.
#[derive(Debug, Clone)]
pub struct RateAccumulator {
    common: Moments,
    private: Vec<Moments>,
}

impl RateAccumulator {
    pub fn new(k: usize) -> Self {
        Self {
            common: Moments::default(),
            private: vec![Moments::default(); k],
        }
    }

    pub fn push(&mut self, gamma_c: &[f64], gamma: &[f64]) {
        let worst = gamma_c.iter().copied().fold(f64::INFINITY, f64::min);
        self.common.push((1.0 + worst).log2());
        for (m, &g) in self.private.iter_mut().zip(gamma) {
            m.push((1.0 + g).log2());
        }
    }

    /// Adds private rates directly (time-shared schemes scale them first).
    pub fn push_private_rates(&mut self, rates: &[f64]) {
        self.common.push(0.0);
        for (m, &r) in self.private.iter_mut().zip(rates) {
            m.push(r);
        }
    }

    pub fn finish(&self, objective: Objective) -> Result<RateReport> {
        let common_rate = self.common.mean();
        let private_rates: Vec<f64> = self.private.iter().map(Moments::mean).collect();
        let private_std_errs: Vec<f64> = self.private.iter().map(Moments::std_err).collect();
        let common_std_err = self.common.std_err();
        let mut report = RateReport {
            common_rate,
            private_rates,
            maxmin_rate: 0.0,
            n_samples: self.common.count(),
            std_err: 0.0,
            common_std_err,
            private_std_errs,
        };
        let (value, users) = match objective {
            Objective::Zf { n_tx, beta } => (maxmin_objective_zf(&report, beta, n_tx)?, n_tx),
            Objective::Mrt => (maxmin_objective_mrt(&report), report.private_rates.len()),
            Objective::MinPrivate => (report.min_private(), report.private_rates.len()),
        };
        report.maxmin_rate = value.max(0.0);
        let private_err = report.private_std_errs[..users].iter().copied().fold(0.0, f64::max);
        report.std_err = if objective == Objective::MinPrivate {
            private_err
        } else {
            private_err.max(common_std_err)
        };
        Ok(report)
    }
}

/// `min(β R_c + min_{first N} R_k, (1 − Nβ)/(K − N) R_c)`.
pub fn maxmin_objective_zf(report: &RateReport, beta: f64, n_tx: usize) -> Result<f64> {
    let k = report.private_rates.len();
    if k <= n_tx {
        return Err(Error::Config("ZF split needs more users than antennas".into()));
    }
    if !(0.0..1.0 / n_tx as f64).contains(&beta) {
        return Err(domain("maxmin_objective_zf", format!("beta {beta} outside [0, 1/N)")));
    }
    let weakest = report.private_rates[..n_tx]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let first = beta * report.common_rate + weakest;
    let second = (1.0 - n_tx as f64 * beta) / (k - n_tx) as f64 * report.common_rate;
    Ok(first.min(second))
}

/// `R_c / K + min_k R_k`.
pub fn maxmin_objective_mrt(report: &RateReport) -> f64 {
    let k = report.private_rates.len();
    report.common_rate / k as f64 + report.min_private()
}

/// Rate-splitting design to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    pub scheme: Scheme,
    pub t: f64,
    /// Common-rate share per privately served user (ZF only).
    pub beta: f64,
}

impl Design {
    pub fn objective(&self, n_tx: usize) -> Objective {
        match self.scheme {
            Scheme::Zf => Objective::Zf { n_tx, beta: self.beta },
            Scheme::Mrt => Objective::Mrt,
        }
    }
}

/// Precoders for `design` built from the realization's CSIT.
pub fn design_precoders<R: Rng + ?Sized>(
    real: &ChannelRealization,
    scheme: Scheme,
    mode: CommonPrecoderMode,
    rng: &mut R,
) -> Result<PrecoderSet> {
    let pc = common_precoder(&real.h_hat, mode, rng);
    match scheme {
        Scheme::Zf => PrecoderSet::rate_split_zf(&real.h_hat, pc),
        Scheme::Mrt => PrecoderSet::rate_split_mrt(&real.h_hat, pc),
    }
}

/// Ergodic rates of `design` averaged over the given realizations.
///
/// Realizations whose CSIT cannot be zero-forced are skipped.
pub fn ergodic_rates_over<R: Rng + ?Sized>(
    reals: &[ChannelRealization],
    design: Design,
    mode: CommonPrecoderMode,
    rng: &mut R,
) -> Result<RateReport> {
    let first = reals
        .first()
        .ok_or_else(|| domain("ergodic_rates_over", "no realizations"))?;
    if !(0.0..=1.0).contains(&design.t) {
        return Err(domain("ergodic_rates_over", format!("t = {} outside [0, 1]", design.t)));
    }
    let mut acc = RateAccumulator::new(first.n_users());
    for real in reals {
        let pre = match design_precoders(real, design.scheme, mode, rng) {
            Ok(p) => p,
            Err(Error::SingularChannel { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (gc, g) = instantaneous_sinrs(real, &pre, design.t);
        acc.push(&gc, &g);
    }
    acc.finish(design.objective(first.n_tx()))
}

/// Draws `n_mc` fresh realizations at `power` and evaluates `design` on them.
pub fn ergodic_rates_mc<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    power: f64,
    v: &[f64],
    design: Design,
    n_mc: usize,
    rng: &mut R,
) -> Result<RateReport> {
    if n_mc == 0 {
        return Err(domain("ergodic_rates_mc", "need at least one sample"));
    }
    let reals: Vec<ChannelRealization> = (0..n_mc).map(|_| sample_realization(cfg, power, v, rng)).collect();
    ergodic_rates_over(&reals, design, cfg.common_precoder, rng)
}
