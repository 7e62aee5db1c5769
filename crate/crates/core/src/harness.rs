//! SNR sweeps: draws channels, runs every requested scheme on the same draws,
//! averages over drops and writes the result table as CSV.
//!
//! Randomness is keyed by drop index only, so every scheme and every SNR point
//! sees the same large-scale gains and fading samples. Drops run in parallel
//! and are reduced in index order, so output does not depend on thread count.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{propose, DesignParams, Proposal};
use crate::benchmarks::{benchmark_report, Benchmark};
use crate::channel::{
    complex_normal_matrix, effective_csit_quality, large_scale_for, substream, CMatrix, ChannelRealization, LargeScale,
    Link, SystemConfig,
};
use crate::error::{Error, Result};
use crate::precoders::{common_precoder, PrecoderSet, Scheme};
use crate::rates::{sinrs_from_gains, Design, GainTable, Moments, RateAccumulator, RateReport};
use crate::search::{exhaustive_search, grid_for_profile, GridProfile, GridSpec};

/// Stream id for the gains shared by all drops when they are not redrawn.
const SHARED_GAINS_STREAM: u64 = u64::MAX;

pub const CSV_HEADER: [&str; 11] = [
    "snr_db",
    "scheme",
    "maxmin_rate_bps_hz",
    "common_rate",
    "min_private_rate",
    "t",
    "beta",
    "candidate_n",
    "std_err",
    "n_realizations",
    "seed",
];

/// Transmission strategies a sweep can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    RsmaProposed,
    RsmaExhaustive,
    SdmaZfGrouping,
    SdmaMrt,
    SdmaScheduledZf,
    SdmaScheduledMrt,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::RsmaProposed,
        SchemeId::RsmaExhaustive,
        SchemeId::SdmaZfGrouping,
        SchemeId::SdmaMrt,
        SchemeId::SdmaScheduledZf,
        SchemeId::SdmaScheduledMrt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::RsmaProposed => "rsma_proposed",
            SchemeId::RsmaExhaustive => "rsma_exhaustive",
            SchemeId::SdmaZfGrouping => "sdma_zf_grouping",
            SchemeId::SdmaMrt => "sdma_mrt",
            SchemeId::SdmaScheduledZf => "sdma_scheduled_zf",
            SchemeId::SdmaScheduledMrt => "sdma_scheduled_mrt",
        }
    }

    fn benchmark(self) -> Option<Benchmark> {
        match self {
            SchemeId::SdmaZfGrouping => Some(Benchmark::ZfGrouping),
            SchemeId::SdmaMrt => Some(Benchmark::Mrt),
            SchemeId::SdmaScheduledZf => Some(Benchmark::ScheduledZf),
            SchemeId::SdmaScheduledMrt => Some(Benchmark::ScheduledMrt),
            _ => None,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim() {
            "rsma_proposed" => SchemeId::RsmaProposed,
            "rsma_exhaustive" => SchemeId::RsmaExhaustive,
            "sdma_zf_grouping" => SchemeId::SdmaZfGrouping,
            "sdma_mrt" => SchemeId::SdmaMrt,
            "sdma_scheduled" | "sdma_scheduled_zf" | "sdma_scheduling_zf" => SchemeId::SdmaScheduledZf,
            "sdma_scheduled_mrt" | "sdma_scheduling_mrt" => SchemeId::SdmaScheduledMrt,
            other => return Err(Error::Config(format!("unknown scheme {other:?}"))),
        };
        Ok(id)
    }
}

/// Parses a comma-separated scheme list; an empty string gives an empty list.
pub fn parse_scheme_list(s: &str) -> Result<Vec<SchemeId>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(SchemeId::from_str)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// SNR of the weakest reference gain, `min_k v_k P`, in dB.
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub snr_step_db: f64,
    pub schemes: Vec<SchemeId>,
    /// Drops averaged per point.
    pub realizations: usize,
    pub grid_profile: GridProfile,
}

impl SweepSpec {
    /// 0 to 40 dB in 5 dB steps, every scheme, the configured drop count.
    pub fn for_config(cfg: &SystemConfig) -> Self {
        Self {
            snr_min_db: 0.0,
            snr_max_db: 40.0,
            snr_step_db: 5.0,
            schemes: SchemeId::ALL.to_vec(),
            realizations: cfg.realizations,
            grid_profile: GridProfile::Standard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr_step_db > 0.0) || !self.snr_step_db.is_finite() {
            return Err(Error::Config(format!(
                "snr step must be positive, got {}",
                self.snr_step_db
            )));
        }
        if !(self.snr_max_db >= self.snr_min_db) {
            return Err(Error::Config("snr max below snr min".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        Ok(())
    }

    /// Inclusive SNR grid; the end point is kept when it lies within rounding of a step.
    pub fn snr_points(&self) -> Vec<f64> {
        let span = (self.snr_max_db - self.snr_min_db) / self.snr_step_db;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.snr_min_db + i as f64 * self.snr_step_db)
            .collect()
    }
}

/// One `(SNR, scheme)` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub scheme: SchemeId,
    /// Monte Carlo max-min rate averaged over drops.
    pub maxmin_rate: f64,
    pub common_rate: f64,
    /// Weakest private rate among users that carry a private stream.
    pub min_private_rate: f64,
    pub t: f64,
    /// Mean common-rate share; `None` when the scheme has no such split.
    pub beta: Option<f64>,
    /// Most frequent selected candidate (proposed scheme only).
    pub candidate_n: Option<usize>,
    /// Standard error of the max-min rate across drops.
    pub std_err: f64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Bound-predicted max-min rate averaged over drops (RSMA schemes only; not in the CSV).
    pub predicted_rate: Option<f64>,
    /// How many drops selected ZF (RSMA schemes only; not in the CSV).
    pub zf_drops: Option<usize>,
}

/// Per-drop draws reused at every SNR point.
struct DropDraws {
    v: Vec<f64>,
    samples: Vec<FadingSample>,
}

struct FadingSample {
    h_hat: CMatrix,
    e: CMatrix,
    /// `None` when the first `N` estimates cannot be zero-forced.
    zf: Option<PrecoderSet>,
    mrt: Option<PrecoderSet>,
}

/// Outcome of one scheme on one drop at one SNR point.
#[derive(Debug, Clone, Copy)]
struct DropOutcome {
    maxmin: f64,
    common: f64,
    min_private: f64,
    t: f64,
    beta: Option<f64>,
    candidate_n: Option<usize>,
    predicted: Option<f64>,
    scheme: Option<Scheme>,
}

/// Large-scale gains of drop `drop`.
pub fn drop_gains(cfg: &SystemConfig, drop: u64) -> Result<Vec<f64>> {
    match (&cfg.large_scale, cfg.redraw_large_scale) {
        (LargeScale::Law(_), false) => large_scale_for(cfg, &mut substream(cfg.seed, SHARED_GAINS_STREAM)),
        _ => large_scale_for(cfg, &mut substream(cfg.seed, drop)),
    }
}

fn draw_drop(cfg: &SystemConfig, drop: u64) -> Result<DropDraws> {
    let mut rng = substream(cfg.seed, drop);
    // Consume the gain draw from this stream either way so fading does not
    // depend on the redraw setting.
    let own = large_scale_for(cfg, &mut rng)?;
    let v = match (&cfg.large_scale, cfg.redraw_large_scale) {
        (LargeScale::Law(_), false) => drop_gains(cfg, drop)?,
        _ => own,
    };
    let mut samples = Vec::with_capacity(cfg.fading_samples);
    for _ in 0..cfg.fading_samples {
        let h_hat = complex_normal_matrix(cfg.n_tx, cfg.n_users, &mut rng);
        let e = complex_normal_matrix(cfg.n_tx, cfg.n_users, &mut rng);
        let pc = common_precoder(&h_hat, cfg.common_precoder, &mut rng);
        let zf = usable(PrecoderSet::rate_split_zf(&h_hat, pc.clone()))?;
        let mrt = usable(PrecoderSet::rate_split_mrt(&h_hat, pc))?;
        samples.push(FadingSample { h_hat, e, zf, mrt });
    }
    Ok(DropDraws { v, samples })
}

fn usable(p: Result<PrecoderSet>) -> Result<Option<PrecoderSet>> {
    match p {
        Ok(p) => Ok(Some(p)),
        Err(Error::SingularChannel { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Monte Carlo rates of a rate-splitting design over one drop's samples.
fn rsma_report(reals: &[ChannelRealization], draws: &DropDraws, design: Design) -> Result<Option<RateReport>> {
    let k = draws.v.len();
    let mut acc = RateAccumulator::new(k);
    let mut used = 0;
    for (real, sample) in reals.iter().zip(&draws.samples) {
        let pre = match design.scheme {
            Scheme::Zf => sample.zf.as_ref(),
            Scheme::Mrt => sample.mrt.as_ref(),
        };
        let Some(pre) = pre else { continue };
        let gains = GainTable::new(&real.h, pre);
        let (gc, g) = sinrs_from_gains(&gains, &pre.mu, &real.v, real.power, design.t);
        acc.push(&gc, &g);
        used += 1;
    }
    if used == 0 {
        return Ok(None);
    }
    acc.finish(design.objective(reals[0].n_tx())).map(Some)
}

fn private_floor(report: &RateReport, scheme: Scheme, n_tx: usize) -> f64 {
    let served = match scheme {
        Scheme::Zf => &report.private_rates[..n_tx],
        Scheme::Mrt => &report.private_rates[..],
    };
    served.iter().copied().fold(f64::INFINITY, f64::min)
}

struct PointContext<'a> {
    cfg: &'a SystemConfig,
    design: DesignParams,
    grid: &'a GridSpec,
}

fn run_scheme(
    ctx: &PointContext<'_>,
    scheme: SchemeId,
    link: &Link,
    reals: &[ChannelRealization],
    draws: &DropDraws,
) -> Result<Option<DropOutcome>> {
    let n = ctx.cfg.n_tx;
    if let Some(bench) = scheme.benchmark() {
        let report = benchmark_report(reals, bench)?;
        if report.n_samples == 0 {
            return Ok(None);
        }
        return Ok(Some(DropOutcome {
            maxmin: report.maxmin_rate,
            common: 0.0,
            min_private: report.min_private(),
            t: 1.0,
            beta: None,
            candidate_n: None,
            predicted: None,
            scheme: None,
        }));
    }
    let (design, candidate_n, predicted) = match scheme {
        SchemeId::RsmaProposed => {
            let Proposal { selected, .. } = propose(link, &ctx.design)?;
            let design = Design {
                scheme: selected.scheme,
                t: selected.t,
                beta: selected.beta.unwrap_or(0.0),
            };
            (design, Some(selected.index), selected.predicted_rate)
        }
        SchemeId::RsmaExhaustive => {
            let best = exhaustive_search(link, ctx.grid)?.best;
            let design = Design {
                scheme: best.scheme,
                t: best.t,
                beta: best.beta.unwrap_or(0.0),
            };
            (design, None, best.rate)
        }
        _ => unreachable!("benchmarks handled above"),
    };
    let Some(report) = rsma_report(reals, draws, design)? else {
        return Ok(None);
    };
    Ok(Some(DropOutcome {
        maxmin: report.maxmin_rate,
        common: report.common_rate,
        min_private: private_floor(&report, design.scheme, n),
        t: design.t,
        beta: (design.scheme == Scheme::Zf).then_some(design.beta),
        candidate_n,
        predicted: Some(predicted),
        scheme: Some(design.scheme),
    }))
}

/// Outcomes of one drop, indexed `[snr][scheme]`.
fn run_drop(
    ctx: &PointContext<'_>,
    sweep: &SweepSpec,
    snrs: &[f64],
    drop: u64,
) -> Result<Vec<Vec<Option<DropOutcome>>>> {
    let cfg = ctx.cfg;
    let draws = draw_drop(cfg, drop)?;
    snrs.iter()
        .map(|&snr| {
            let power = cfg.power_for_snr_db(snr);
            let eps_sq = effective_csit_quality(cfg, power);
            let link = Link::new(cfg.n_tx, cfg.n_users, power, eps_sq, draws.v.clone())?;
            let reals: Vec<ChannelRealization> = draws
                .samples
                .iter()
                .map(|s| ChannelRealization::compose(s.h_hat.clone(), s.e.clone(), draws.v.clone(), eps_sq, power))
                .collect();
            sweep
                .schemes
                .iter()
                .map(|&s| run_scheme(ctx, s, &link, &reals, &draws))
                .collect()
        })
        .collect()
}

fn mode(values: impl Iterator<Item = usize>) -> Option<usize> {
    let mut counts = std::collections::BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, c)| c == best).map(|(v, _)| v)
}

fn aggregate(snr_db: f64, scheme: SchemeId, outcomes: &[DropOutcome], seed: u64) -> ResultRow {
    let mean = |f: &dyn Fn(&DropOutcome) -> f64| {
        let mut m = Moments::default();
        outcomes.iter().for_each(|o| m.push(f(o)));
        m
    };
    let maxmin = mean(&|o| o.maxmin);
    let betas: Vec<f64> = outcomes.iter().filter_map(|o| o.beta).collect();
    let beta = (!betas.is_empty()).then(|| betas.iter().sum::<f64>() / betas.len() as f64);
    let predicted = outcomes
        .iter()
        .map(|o| o.predicted)
        .collect::<Option<Vec<f64>>>()
        .filter(|p| !p.is_empty())
        .map(|p| p.iter().sum::<f64>() / p.len() as f64);
    let is_rsma = scheme.benchmark().is_none();
    ResultRow {
        snr_db,
        scheme,
        maxmin_rate: maxmin.mean(),
        common_rate: mean(&|o| o.common).mean(),
        min_private_rate: mean(&|o| o.min_private).mean(),
        t: mean(&|o| o.t).mean(),
        beta,
        candidate_n: mode(outcomes.iter().filter_map(|o| o.candidate_n)),
        std_err: maxmin.std_err(),
        n_realizations: outcomes.len(),
        seed,
        predicted_rate: predicted,
        zf_drops: is_rsma.then(|| outcomes.iter().filter(|o| o.scheme == Some(Scheme::Zf)).count()),
    }
}

/// Runs every scheme at every SNR point; rows come back sorted by `(scheme, snr)`.
pub fn run_sweep(cfg: &SystemConfig, sweep: &SweepSpec) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    sweep.validate()?;
    if sweep.schemes.is_empty() {
        return Ok(Vec::new());
    }
    let mut schemes = sweep.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let sweep = SweepSpec {
        schemes,
        ..sweep.clone()
    };
    let snrs = sweep.snr_points();
    let grid = grid_for_profile(cfg.n_users, sweep.grid_profile);
    let ctx = PointContext {
        cfg,
        design: DesignParams::from(cfg),
        grid: &grid,
    };
    let per_drop: Vec<Vec<Vec<Option<DropOutcome>>>> = (0..sweep.realizations as u64)
        .into_par_iter()
        .map(|d| run_drop(&ctx, &sweep, &snrs, d))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (si, &scheme) in sweep.schemes.iter().enumerate() {
        for (pi, &snr) in snrs.iter().enumerate() {
            let outcomes: Vec<DropOutcome> = per_drop.iter().filter_map(|d| d[pi][si]).collect();
            if outcomes.is_empty() {
                return Err(Error::Config(format!("{scheme} at {snr} dB: every drop was singular")));
            }
            rows.push(aggregate(snr, scheme, &outcomes, cfg.seed));
        }
    }
    Ok(rows)
}

/// Rounds to 9 significant digits and prints without trailing noise.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn row_fields(r: &ResultRow) -> [String; 11] {
    let opt = |x: Option<f64>| x.map(format_sig9).unwrap_or_default();
    [
        format_sig9(r.snr_db),
        r.scheme.to_string(),
        format_sig9(r.maxmin_rate),
        format_sig9(r.common_rate),
        format_sig9(r.min_private_rate),
        format_sig9(r.t),
        opt(r.beta),
        r.candidate_n.map(|n| n.to_string()).unwrap_or_default(),
        format_sig9(r.std_err),
        r.n_realizations.to_string(),
        r.seed.to_string(),
    ]
}

/// Writes the table, sorted by `(scheme, snr)`, to any writer.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in sorted_rows(rows) {
        w.write_record(row_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

fn sorted_rows(rows: &[ResultRow]) -> Vec<&ResultRow> {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.scheme
            .as_str()
            .cmp(b.scheme.as_str())
            .then(a.snr_db.total_cmp(&b.snr_db))
    });
    sorted
}

pub const BOUND_CSV_HEADER: [&str; 4] = ["snr_db", "scheme", "predicted_rate_bps_hz", "zf_drops"];

/// Companion table of bound-predicted max-min rates for the RSMA schemes.
pub fn write_bound_csv<W: Write>(rows: &[ResultRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUND_CSV_HEADER)?;
    for r in sorted_rows(rows) {
        if let (Some(pred), Some(zf)) = (r.predicted_rate, r.zf_drops) {
            w.write_record([
                format_sig9(r.snr_db),
                r.scheme.to_string(),
                format_sig9(pred),
                zf.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn emit_with(
    rows: &[ResultRow],
    path: &Path,
    write: fn(&[ResultRow], std::io::BufWriter<std::fs::File>) -> std::result::Result<(), csv::Error>,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write(rows, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    emit_with(rows, path, write_csv)
}

pub fn emit_bound_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    emit_with(rows, path, write_bound_csv)
}

/// Closed-form allocation at one SNR point, for the `allocate` command.
#[derive(Debug, Clone, Serialize)]
pub struct AllocationReport {
    pub snr_db: f64,
    pub power: f64,
    pub eps_sq: f64,
    pub scheme: Scheme,
    pub n: usize,
    pub t: f64,
    pub beta: Option<f64>,
    pub predicted_rate: f64,
    pub gains: Vec<f64>,
    pub candidates: Vec<crate::allocation::AllocationCandidate>,
}

/// Allocation for the explicit gains, or for the first drop's sampled gains.
pub fn allocate_at(cfg: &SystemConfig, snr_db: f64) -> Result<AllocationReport> {
    cfg.validate()?;
    let power = cfg.power_for_snr_db(snr_db);
    let eps_sq = effective_csit_quality(cfg, power);
    let gains = drop_gains(cfg, 0)?;
    let link = Link::new(cfg.n_tx, cfg.n_users, power, eps_sq, gains.clone())?;
    let p = propose(&link, &DesignParams::from(cfg))?;
    Ok(AllocationReport {
        snr_db,
        power,
        eps_sq,
        scheme: p.selected.scheme,
        n: p.selected.index,
        t: p.selected.t,
        beta: p.selected.beta,
        predicted_rate: p.selected.predicted_rate,
        gains,
        candidates: p.candidates,
    })
}
