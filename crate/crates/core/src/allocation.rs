//! Closed-form power split `t` and common-rate share `β` candidates, and the
//! rule that picks among them.
//!
//! Every candidate targets one operating regime (large or small private
//! power, small or large CSIT error). Each carries the max-min rate its own
//! approximations predict; the selection keeps the largest.
//!
//! Candidate numbering with perfect CSIT: 1–3 ZF, 4–5 MRT. With imperfect
//! CSIT: 1–4 ZF, 5–6 MRT. The two MRT candidates are the two roots of one
//! quadratic.

use serde::Serialize;

use crate::bounds::{mrt_terms, zf_terms, CommonRegime, RateTerms};
use crate::channel::{Link, MrtCase, SystemConfig};
use crate::error::{Error, Result};
use crate::precoders::Scheme;
use crate::specfun::{approx_w_from_ln, EULER_GAMMA};

const LN2: f64 = std::f64::consts::LN_2;

/// Design constants shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// Fraction of `1/K` used when a candidate pushes β to its upper end.
    pub beta_fraction: f64,
    /// Minimum private power `P t` for the large-power candidates to apply.
    pub lambda_gate: f64,
    pub mrt_case: MrtCase,
}

impl From<&SystemConfig> for DesignParams {
    fn from(cfg: &SystemConfig) -> Self {
        Self {
            beta_fraction: cfg.beta_fraction,
            lambda_gate: cfg.lambda_gate,
            mrt_case: cfg.mrt_case,
        }
    }
}

/// How a candidate's `t` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Feasibility {
    ClosedForm,
    /// Validity condition failed; `t = 1` (common stream off).
    Fallback(&'static str),
    /// Formula undefined for this operating point; never selected.
    Infeasible(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationCandidate {
    pub index: usize,
    pub scheme: Scheme,
    pub t: f64,
    /// `None` for MRT candidates.
    pub beta: Option<f64>,
    pub predicted_rate: f64,
    pub feasibility: Feasibility,
}

impl AllocationCandidate {
    pub fn is_feasible(&self) -> bool {
        !matches!(self.feasibility, Feasibility::Infeasible(_))
    }

    pub fn is_fallback(&self) -> bool {
        matches!(self.feasibility, Feasibility::Fallback(_))
    }

    fn new(index: usize, scheme: Scheme, t: f64, beta: Option<f64>, rate: f64, feasibility: Feasibility) -> Self {
        Self {
            index,
            scheme,
            t,
            beta,
            predicted_rate: if rate.is_finite() { rate.max(0.0) } else { 0.0 },
            feasibility,
        }
    }

    fn infeasible(index: usize, scheme: Scheme, reason: &'static str) -> Self {
        Self {
            index,
            scheme,
            t: 1.0,
            beta: if scheme == Scheme::Zf { Some(0.0) } else { None },
            predicted_rate: 0.0,
            feasibility: Feasibility::Infeasible(reason),
        }
    }
}

/// Non-negative roots of `a t² + b t + c = 0`, `(plus, minus)` ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRoots {
    pub plus: Option<f64>,
    pub minus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    Plus,
    Minus,
    Both,
}

/// Real roots of a quadratic filtered to `[0, ∞)`.
///
/// `a = 0` falls back to the linear root, reported as `plus`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> std::result::Result<QuadraticRoots, &'static str> {
    let keep = |r: f64| (r.is_finite() && r >= 0.0).then_some(r);
    if a == 0.0 {
        if b == 0.0 {
            return Err("degenerate quadratic");
        }
        return Ok(QuadraticRoots {
            plus: keep(-c / b),
            minus: None,
        });
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err("negative discriminant");
    }
    let sq = disc.sqrt();
    Ok(QuadraticRoots {
        plus: keep((-b + sq) / (2.0 * a)),
        minus: keep((-b - sq) / (2.0 * a)),
    })
}

/// Selected root(s), ascending, or the reason none exists.
pub fn feasible_quadratic_root(
    a: f64,
    b: f64,
    c: f64,
    which: RootChoice,
) -> std::result::Result<Vec<f64>, &'static str> {
    let r = quadratic_roots(a, b, c)?;
    let mut out: Vec<f64> = match which {
        RootChoice::Plus => r.plus.into_iter().collect(),
        RootChoice::Minus => r.minus.into_iter().collect(),
        RootChoice::Both => r.plus.into_iter().chain(r.minus).collect(),
    };
    out.sort_by(f64::total_cmp);
    out.dedup();
    if out.is_empty() {
        return Err("no non-negative root");
    }
    Ok(out)
}

fn log2_ratio(num: f64, den: f64) -> f64 {
    (num / den).log2()
}

/// `log₂(1 − ρ + ρ/t)`.
fn high_pt_common(rho: f64, t: f64) -> f64 {
    (1.0 - rho + rho / t).log2()
}

/// Quantities shared by the ZF closed forms for the weakest private user.
#[derive(Debug, Clone, Copy)]
struct ZfWeakest {
    /// Effective private SNR slope.
    sigma: f64,
    /// Leakage slope from CSIT error.
    nu: f64,
    delta: f64,
}

fn zf_weakest(link: &Link, terms: &RateTerms) -> ZfWeakest {
    let n = link.n_tx as f64;
    let v = link.v[link.weakest_private_user()];
    let sigma = v * link.power / n * terms.gamma.mean_log().exp();
    let nu = v * link.power * (n - 1.0) * (1.0 - link.eps_sq) / n;
    ZfWeakest {
        sigma,
        nu,
        delta: LN2 * link.overload() as f64 * (sigma - nu),
    }
}

/// Small-Pt ZF common form divided among the common-only group.
fn zf_small_pt_share(link: &Link, terms: &RateTerms, t: f64) -> f64 {
    let n = link.n_tx as f64;
    let p = link.power;
    let s = link.inv_gain_sum();
    let r = (1.0 + n * (-EULER_GAMMA).exp() * p * (1.0 - t) / (p * terms.order * t + n * s)).log2();
    r / link.overload() as f64
}

/// ZF candidates 1–3 for perfect CSIT.
pub fn perfect_zf_candidates(link: &Link) -> Result<Vec<AllocationCandidate>> {
    let terms = zf_terms(link)?;
    let rho = terms.rho;
    let kn = link.overload() as f64;
    let n = link.n_tx as f64;
    let p = link.power;
    let s = link.inv_gain_sum();
    let v = link.v[link.weakest_private_user()];
    let sigma = v * p / n * (-EULER_GAMMA).exp();
    let delta = LN2 * kn * sigma;
    let rate = |t: f64| (high_pt_common(rho, t) / kn).min((1.0 + sigma * t).log2());

    let t1 = (rho / sigma.powf(kn)).powf(1.0 / (1.0 + kn)).min(1.0);
    let c1 = AllocationCandidate::new(1, Scheme::Zf, t1, Some(0.0), rate(t1), Feasibility::ClosedForm);

    let y = delta * rho;
    let c2 = if y >= std::f64::consts::E {
        let t = (approx_w_from_ln(y.ln()) / delta).clamp(0.0, 1.0);
        AllocationCandidate::new(2, Scheme::Zf, t, Some(0.0), rate(t), Feasibility::ClosedForm)
    } else {
        AllocationCandidate::new(
            2,
            Scheme::Zf,
            1.0,
            Some(0.0),
            rate(1.0),
            Feasibility::Fallback("delta*rho < e"),
        )
    };

    let a3 = p * (kn + 1.0) * kn * sigma;
    let b3 = kn * sigma * s + (-EULER_GAMMA).exp() * p;
    let c3 = -(-EULER_GAMMA).exp() * p;
    let t3 = ((-b3 + (b3 * b3 - 4.0 * a3 * c3).sqrt()) / (2.0 * a3)).clamp(0.0, 1.0);
    let small = (1.0 + n * (-EULER_GAMMA).exp() * p * (1.0 - t3) / (p * n * (kn + 1.0) * t3 + n * s)).log2() / kn;
    let r3 = small.min((1.0 + sigma * t3).log2());
    let c3 = AllocationCandidate::new(3, Scheme::Zf, t3, Some(0.0), r3, Feasibility::ClosedForm);

    Ok(vec![c1, c2, c3])
}

/// Resolves `auto` to a concrete MRT case for this operating point.
pub fn resolve_mrt_case(link: &Link, case: MrtCase) -> MrtCase {
    match case {
        MrtCase::Auto => {
            let min_snr_db = 10.0 * (link.power * link.v.iter().copied().fold(f64::INFINITY, f64::min)).log10();
            if link.n_tx >= 64 && min_snr_db > 25.0 {
                MrtCase::Case1
            } else {
                MrtCase::Case2
            }
        }
        other => other,
    }
}

/// Coefficients of the small-Pt MRT stationarity quadratic for a common term
/// `(1/K) log₂(1 + A(1 − t)/(B t + C))` and private term `log₂((1 + αt)/(1 + λt))`.
pub fn mrt_small_pt_coefficients(a_: f64, b_: f64, c_: f64, alpha: f64, lambda: f64, k: f64) -> (f64, f64, f64) {
    let omega = a_ * (b_ + c_) / k;
    let gap = alpha - lambda;
    let a = gap * (b_ - a_) * b_ - omega * alpha * lambda;
    let b = gap * ((b_ - a_) * c_ + (a_ + c_) * b_) - omega * (alpha + lambda);
    let c = gap * (a_ + c_) * c_ - omega;
    (a, b, c)
}

type CommonTerm = Box<dyn Fn(f64) -> f64>;

/// The two MRT candidates for a given signal slope `alpha`.
fn mrt_candidates(
    link: &Link,
    terms: &RateTerms,
    alpha: f64,
    first_index: usize,
    case: MrtCase,
) -> Vec<AllocationCandidate> {
    let k = link.n_users as f64;
    let p = link.power;
    let v = link.v[link.weakest_user()];
    let lambda = v * p * (k - 1.0) / k;
    let private = |t: f64| log2_ratio(1.0 + alpha * t, 1.0 + lambda * t);

    let case1 = resolve_mrt_case(link, case) == MrtCase::Case1;
    let (coeffs, common): ((f64, f64, f64), CommonTerm) = match resolve_mrt_case(link, case) {
        MrtCase::Case1 => {
            let a = -alpha * lambda;
            let b = k * (alpha - lambda) - (alpha + lambda);
            let rho = terms.rho;
            ((a, b, -1.0), Box::new(move |t: f64| high_pt_common(rho, t) / k))
        }
        _ => {
            let s = link.inv_gain_sum();
            let a_ = p * k * (-EULER_GAMMA).exp();
            let b_ = p * terms.theta() * terms.order;
            let c_ = k * s;
            let coeffs = mrt_small_pt_coefficients(a_, b_, c_, alpha, lambda, k);
            (
                coeffs,
                Box::new(move |t: f64| (1.0 + a_ * (1.0 - t) / (b_ * t + c_)).log2() / k),
            )
        }
    };
    let roots = quadratic_roots(coeffs.0, coeffs.1, coeffs.2);

    [
        (first_index, roots.map(|r| r.plus)),
        (first_index + 1, roots.map(|r| r.minus)),
    ]
    .into_iter()
    .map(|(index, root)| {
        let usable = match root {
            Ok(Some(t)) if !case1 || t > 0.0 => Some(t.min(1.0)),
            _ => None,
        };
        match usable {
            Some(t) => AllocationCandidate::new(
                index,
                Scheme::Mrt,
                t,
                None,
                common(t) + private(t),
                Feasibility::ClosedForm,
            ),
            None => {
                let reason = match root {
                    Err(e) => e,
                    _ => "root not positive",
                };
                AllocationCandidate::new(
                    index,
                    Scheme::Mrt,
                    1.0,
                    None,
                    common(1.0) + private(1.0),
                    Feasibility::Fallback(reason),
                )
            }
        }
    })
    .collect()
}

/// MRT candidates 4–5 for perfect CSIT.
pub fn perfect_mrt_candidates(link: &Link, case: MrtCase) -> Result<Vec<AllocationCandidate>> {
    let terms = mrt_terms(link)?;
    let n = link.n_tx as f64;
    let k = link.n_users as f64;
    let v = link.v[link.weakest_user()];
    let alpha = v * link.power / k * crate::specfun::digamma(n + k - 1.0)?.exp();
    Ok(mrt_candidates(link, &terms, alpha, 4, case))
}

/// ZF candidates 1–4 for imperfect CSIT.
pub fn imperfect_zf_candidates(link: &Link, design: &DesignParams) -> Result<Vec<AllocationCandidate>> {
    let terms = zf_terms(link)?;
    let rho = terms.rho;
    let k = link.n_users as f64;
    let n = link.n_tx as f64;
    let kn = link.overload() as f64;
    let p = link.power;
    let s = link.inv_gain_sum();
    let w = zf_weakest(link, &terms);
    let beta_top = design.beta_fraction / k;
    let rate = |t: f64, beta: f64| {
        let l = high_pt_common(rho, t);
        ((1.0 - n * beta) / kn * l).min(beta * l + log2_ratio(1.0 + w.sigma * t, 1.0 + w.nu * t))
    };

    // 1: small error, large private SNR.
    let beta1 = if w.sigma * rho > 1.0 { 0.0 } else { beta_top };
    let e1 = 1.0 - k * beta1;
    let t1 = (rho.powf(e1 / (e1 + kn)) / w.sigma.powf(kn / (e1 + kn))).min(1.0);
    let c1 = AllocationCandidate::new(1, Scheme::Zf, t1, Some(beta1), rate(t1, beta1), Feasibility::ClosedForm);

    // 2: small error, small private SNR, Lambert form.
    let c2 = {
        let scale = 1.0 - design.beta_fraction;
        let y = w.delta * rho / scale;
        if w.delta > 0.0 && y >= std::f64::consts::E {
            let t = (approx_w_from_ln(y.ln()) * scale / w.delta).clamp(0.0, 1.0);
            if p * t >= design.lambda_gate {
                AllocationCandidate::new(
                    2,
                    Scheme::Zf,
                    t,
                    Some(beta_top),
                    rate(t, beta_top),
                    Feasibility::ClosedForm,
                )
            } else {
                AllocationCandidate::new(
                    2,
                    Scheme::Zf,
                    1.0,
                    Some(beta_top),
                    rate(1.0, beta_top),
                    Feasibility::Fallback("P*t below lambda gate"),
                )
            }
        } else if w.delta <= 0.0 {
            AllocationCandidate::new(
                2,
                Scheme::Zf,
                1.0,
                Some(beta_top),
                rate(1.0, beta_top),
                Feasibility::Fallback("leakage exceeds signal slope"),
            )
        } else {
            AllocationCandidate::new(
                2,
                Scheme::Zf,
                1.0,
                Some(beta_top),
                rate(1.0, beta_top),
                Feasibility::Fallback("delta*rho/(1-eps) < e"),
            )
        }
    };

    // 3: large error, interference-limited private stream.
    let c3 = if w.nu > 0.0 && w.sigma > 0.0 && w.nu * rho > 1.0 {
        let raw = 1.0 / k - kn * (w.sigma / w.nu).ln() / (k * (w.nu * rho).ln());
        let beta3 = raw.clamp(0.0, beta_top);
        let t3 = (rho * (w.nu / w.sigma).powf(kn / (1.0 - k * beta3))).min(1.0);
        AllocationCandidate::new(3, Scheme::Zf, t3, Some(beta3), rate(t3, beta3), Feasibility::ClosedForm)
    } else {
        AllocationCandidate::infeasible(3, Scheme::Zf, "needs nu*rho > 1")
    };

    // 4: moderate/low private power, Lambert form around t = 1.
    let c4 = {
        let rate4 = |t: f64| zf_small_pt_share(link, &terms, t).min(log2_ratio(1.0 + w.sigma * t, 1.0 + w.nu * t));
        let fallback =
            |why| AllocationCandidate::new(4, Scheme::Zf, 1.0, Some(0.0), rate4(1.0), Feasibility::Fallback(why));
        if w.delta <= 0.0 {
            fallback("leakage exceeds signal slope")
        } else {
            let base = w.delta * s / ((-EULER_GAMMA).exp() * p);
            // t(β) = 1 − W(x_β)(1 − Kβ)/δ, x_β = base/(1 − Kβ) · e^{δ/(1 − Kβ)}
            let t_at = |share: f64| {
                let ln_x = (base / share).ln() + w.delta / share;
                (ln_x, 1.0 - approx_w_from_ln(ln_x) * share / w.delta)
            };
            let gate_share = 1.0 - design.beta_fraction;
            let (_, t_gate) = t_at(gate_share);
            let (ln_x0, t0) = t_at(1.0);
            if base / gate_share < std::f64::consts::E {
                fallback("delta*S/((1-eps) e^-g P) < e")
            } else if ln_x0 <= 0.0 {
                fallback("Lambert argument not above 1")
            } else if p * t_gate < design.lambda_gate {
                fallback("P*t below lambda gate")
            } else {
                let t = t0.clamp(0.0, 1.0);
                AllocationCandidate::new(4, Scheme::Zf, t, Some(0.0), rate4(t), Feasibility::ClosedForm)
            }
        }
    };

    Ok(vec![c1, c2, c3, c4])
}

/// MRT candidates 5–6 for imperfect CSIT.
pub fn imperfect_mrt_candidates(link: &Link, case: MrtCase) -> Result<Vec<AllocationCandidate>> {
    let terms = mrt_terms(link)?;
    let k = link.n_users as f64;
    let v = link.v[link.weakest_user()];
    let alpha = v * link.power / k * terms.gamma.mean_log().exp();
    Ok(mrt_candidates(link, &terms, alpha, 5, case))
}

/// Full candidate list for the link's CSIT quality.
pub fn candidates(link: &Link, design: &DesignParams) -> Result<Vec<AllocationCandidate>> {
    let mut out;
    if link.eps_sq >= 1.0 {
        out = perfect_zf_candidates(link)?;
        out.extend(perfect_mrt_candidates(link, design.mrt_case)?);
    } else {
        out = imperfect_zf_candidates(link, design)?;
        out.extend(imperfect_mrt_candidates(link, design.mrt_case)?);
    }
    Ok(out)
}

/// The chosen candidate; ties go to the lowest index.
pub fn select_allocation(cands: &[AllocationCandidate]) -> Result<AllocationCandidate> {
    let mut best: Option<&AllocationCandidate> = None;
    for c in cands.iter().filter(|c| c.is_feasible()) {
        if best.is_none_or(|b| c.predicted_rate > b.predicted_rate) {
            best = Some(c);
        }
    }
    best.copied().ok_or(Error::NoFeasibleCandidate)
}

/// Candidates plus the selected one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposal {
    pub selected: AllocationCandidate,
    pub candidates: Vec<AllocationCandidate>,
}

pub fn propose(link: &Link, design: &DesignParams) -> Result<Proposal> {
    let candidates = candidates(link, design)?;
    let selected = select_allocation(&candidates)?;
    Ok(Proposal { selected, candidates })
}

/// Common-rate regime that matches a candidate's derivation.
pub fn regime_of(c: &AllocationCandidate, perfect: bool, case: MrtCase) -> CommonRegime {
    match (c.scheme, perfect, c.index, case) {
        (Scheme::Zf, true, 3, _) | (Scheme::Zf, false, 4, _) => CommonRegime::SmallPt,
        (Scheme::Zf, _, _, _) => CommonRegime::HighPt,
        (Scheme::Mrt, _, _, MrtCase::Case1) => CommonRegime::HighPt,
        (Scheme::Mrt, _, _, _) => CommonRegime::SmallPt,
    }
}
