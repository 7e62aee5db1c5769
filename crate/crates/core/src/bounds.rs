//! Closed-form lower bounds and approximations of the ergodic rates.
//!
//! The received signal-plus-interference power of a user is a sum of
//! independent Gamma variables; it is replaced by a single moment-matched
//! Gamma. The common-stream bounds then depend on a rounded order `M`, a
//! scale `x(t) = x₀ / t` and the term families η, ρ and τ:
//!
//! * `η(t) = −γ − ln Σ 1/v_k − e^x Σ_{m≤M} E_m(x)`
//! * `ρ = c / (M − 1) · exp(−γ − 1/(2(M − 1)))`
//! * `τ(t) = Σ_{m≤M} 1/(m + x − 1)`
//!
//! with `c = K/θ` for MRT and `c = N` for ZF.

use crate::channel::Link;
use crate::error::{domain, Result};
use crate::precoders::Scheme;
use crate::specfun::{exp_scaled_em_sum, gamma_moment_match, round_half_away, GammaApprox, EULER_GAMMA};

/// Sign inside the rounded ZF order `⌊N(±(K − N) + D)⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZfOrderSign {
    /// `K − N + D`, positive in the overloaded regime.
    #[default]
    Overloaded,
    /// `N − K + D`, kept only to reproduce the misprinted variant.
    Misprinted,
}

/// Parameters of one precoder family's bounds at a fixed operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTerms {
    pub scheme: Scheme,
    pub gamma: GammaApprox,
    /// Rounded order `M` of the exponential-integral sum.
    pub order: f64,
    pub rho: f64,
    /// `x(t) · t`.
    x_scale: f64,
    ln_inv_gain_sum: f64,
}

impl RateTerms {
    pub fn theta(&self) -> f64 {
        self.gamma.scale
    }

    pub fn d(&self) -> f64 {
        self.gamma.shape
    }

    pub fn x(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("RateTerms::x", format!("t must be positive, got {t}")));
        }
        Ok(self.x_scale / t)
    }

    pub fn eta(&self, t: f64) -> Result<f64> {
        let x = self.x(t)?;
        let sum = exp_scaled_em_sum(self.order as u32, x)?;
        Ok(-EULER_GAMMA - self.ln_inv_gain_sum - sum)
    }

    pub fn tau(&self, t: f64) -> Result<f64> {
        let x = self.x(t)?;
        Ok((1..=self.order as u32).map(|m| 1.0 / (m as f64 + x - 1.0)).sum())
    }
}

/// `(shape, scale)` components of the MRT signal-plus-interference power.
pub fn mrt_mixture(n_tx: usize, n_users: usize, eps_sq: f64) -> Vec<(f64, f64)> {
    let mut c = Vec::with_capacity(3);
    if eps_sq > 0.0 {
        c.push((n_tx as f64, eps_sq));
    }
    if eps_sq < 1.0 {
        c.push((1.0, 1.0 - eps_sq));
    }
    c.push(((n_users - 1) as f64, 1.0));
    c
}

/// `(shape, scale)` components of the ZF signal-plus-leakage power.
pub fn zf_mixture(n_tx: usize, eps_sq: f64) -> Vec<(f64, f64)> {
    let mut c = Vec::with_capacity(2);
    if eps_sq > 0.0 {
        c.push((1.0, eps_sq));
    }
    if eps_sq < 1.0 {
        c.push((n_tx as f64, 1.0 - eps_sq));
    }
    c
}

fn rho(numerator: f64, order: f64) -> Result<f64> {
    if order < 2.0 {
        return Err(domain("rho", format!("rounded order {order} must be at least 2")));
    }
    let m1 = order - 1.0;
    Ok(numerator / m1 * (-EULER_GAMMA - 1.0 / (2.0 * m1)).exp())
}

pub fn mrt_terms(link: &Link) -> Result<RateTerms> {
    let (n, k) = (link.n_tx, link.n_users);
    let gamma = gamma_moment_match(&mrt_mixture(n, k, link.eps_sq))?;
    let order = round_half_away(gamma.shape * k as f64);
    let s = link.inv_gain_sum();
    Ok(RateTerms {
        scheme: Scheme::Mrt,
        gamma,
        order,
        rho: rho(k as f64 / gamma.scale, order)?,
        x_scale: k as f64 * s / (link.power * gamma.scale),
        ln_inv_gain_sum: s.ln(),
    })
}

pub fn zf_terms(link: &Link) -> Result<RateTerms> {
    zf_terms_with_sign(link, ZfOrderSign::Overloaded)
}

pub fn zf_terms_with_sign(link: &Link, sign: ZfOrderSign) -> Result<RateTerms> {
    let (n, k) = (link.n_tx as f64, link.n_users as f64);
    let gamma = gamma_moment_match(&zf_mixture(link.n_tx, link.eps_sq))?;
    let spread = match sign {
        ZfOrderSign::Overloaded => k - n,
        ZfOrderSign::Misprinted => n - k,
    };
    let order = round_half_away(n * (spread + gamma.shape));
    let s = link.inv_gain_sum();
    Ok(RateTerms {
        scheme: Scheme::Zf,
        gamma,
        order,
        rho: if order >= 2.0 { rho(n, order)? } else { f64::NAN },
        x_scale: n * s / link.power,
        ln_inv_gain_sum: s.ln(),
    })
}

/// Which form of the common-rate bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommonRegime {
    /// `log₂(1 + P(1 − t) e^η)`.
    ExactEta,
    /// η with the exponential-integral sum replaced by its harmonic cap τ.
    Harmonic,
    /// Rational form for small or moderate private power.
    SmallPt,
    /// `log₂(1 − ρ + ρ/t)` for large private power.
    HighPt,
}

/// Lower bound (or its approximation) on the ergodic common rate.
pub fn common_lb(terms: &RateTerms, link: &Link, t: f64, regime: CommonRegime) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("common_lb", format!("t = {t} outside [0, 1]")));
    }
    let p = link.power;
    let value = match regime {
        CommonRegime::ExactEta => {
            if t == 0.0 {
                return Err(domain("common_lb", "exact-eta form undefined at t = 0"));
            }
            (p * (1.0 - t) * terms.eta(t)?.exp()).ln_1p()
        }
        CommonRegime::Harmonic => {
            if t == 0.0 {
                return Err(domain("common_lb", "harmonic form undefined at t = 0"));
            }
            let e = -EULER_GAMMA - terms.ln_inv_gain_sum - terms.tau(t)?;
            (p * (1.0 - t) * e.exp()).ln_1p()
        }
        CommonRegime::SmallPt => {
            // e^{-γ} P(1 − t) x₀ / (S (M t + x₀))
            let s = link.inv_gain_sum();
            let denom = s * (terms.order * t + terms.x_scale);
            if !(denom > 0.0) {
                return Err(domain("common_lb", "non-positive small-Pt denominator"));
            }
            (p * (1.0 - t) * (-EULER_GAMMA).exp() * terms.x_scale / denom).ln_1p()
        }
        CommonRegime::HighPt => {
            if !(t > 0.0) {
                return Err(domain("common_lb", "high-Pt form undefined at t = 0"));
            }
            if !terms.rho.is_finite() {
                return Err(domain("common_lb", "rho undefined for this order"));
            }
            (1.0 - terms.rho + terms.rho / t).ln()
        }
    };
    Ok(value / std::f64::consts::LN_2)
}

pub fn common_lb_mrt(link: &Link, t: f64, regime: CommonRegime) -> Result<f64> {
    common_lb(&mrt_terms(link)?, link, t, regime)
}

pub fn common_lb_zf(link: &Link, t: f64, regime: CommonRegime) -> Result<f64> {
    common_lb(&zf_terms(link)?, link, t, regime)
}

/// Whether the small-Pt MRT form is in its stated range: `(Pt)² ≤ K Σ 1/v_k / θ`.
pub fn small_pt_gate_mrt(link: &Link, t: f64) -> Result<bool> {
    let terms = mrt_terms(link)?;
    let pt = link.power * t;
    Ok(pt * pt <= link.n_users as f64 * link.inv_gain_sum() / terms.theta())
}

/// Whether the small-Pt ZF form is in its stated range: `Pt ≤ N Σ 1/v_k`.
pub fn small_pt_gate_zf(link: &Link, t: f64) -> bool {
    link.power * t <= link.n_tx as f64 * link.inv_gain_sum()
}

fn private_lb(gamma: GammaApprox, signal_scale: f64, leak: f64) -> f64 {
    let gain = (signal_scale * gamma.mean_log().exp()).ln_1p();
    let loss = leak.ln_1p();
    (gain - loss) / std::f64::consts::LN_2
}

/// Private-rate lower bound under MRT with per-stream power `Pt/K`.
pub fn private_lb_mrt(link: &Link, t: f64, v_k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("private_lb_mrt", format!("t = {t} outside [0, 1]")));
    }
    let k = link.n_users as f64;
    let gamma = gamma_moment_match(&mrt_mixture(link.n_tx, link.n_users, link.eps_sq))?;
    let scale = link.power * t / k * v_k;
    Ok(private_lb(gamma, scale, scale * (k - 1.0)))
}

/// Private-rate lower bound under ZF with per-stream power `Pt/N`.
pub fn private_lb_zf(link: &Link, t: f64, v_k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("private_lb_zf", format!("t = {t} outside [0, 1]")));
    }
    let n = link.n_tx as f64;
    let gamma = gamma_moment_match(&zf_mixture(link.n_tx, link.eps_sq))?;
    let scale = link.power * t / n * v_k;
    Ok(private_lb(gamma, scale, scale * (n - 1.0) * (1.0 - link.eps_sq)))
}
