//! Scalar special functions used by the rate bounds.
//!
//! Everything here is a pure function. Exponential integrals are evaluated in
//! the scaled form `e^x E_m(x)` so that arguments in the thousands, which occur
//! when the private power is tiny, never overflow.

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;

/// Digamma function ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", format!("x must be positive and finite, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail: -Σ B_2n / (2n x^2n)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// `e^x E_1(x)` by power series, valid for 0 < x < 1.
fn scaled_e1_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum -= add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    (-EULER_GAMMA - x.ln() + sum) * x.exp()
}

/// `e^x E_m(x)` by the modified Lentz continued fraction, for x ≥ 1.
fn scaled_em_cf(m: u32, x: f64) -> f64 {
    let n = m as f64;
    let tiny = 1e-300;
    let mut b = x + n;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        let a = -fi * (n - 1.0 + fi);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

fn check_em_args(func: &'static str, m: u32, x: f64) -> Result<()> {
    if m == 0 {
        return Err(domain(func, "order m must be at least 1"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(func, format!("x must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Scaled generalized exponential integral `e^x E_m(x)`.
pub fn scaled_gen_exp_integral(m: u32, x: f64) -> Result<f64> {
    check_em_args("scaled_gen_exp_integral", m, x)?;
    if x >= 1.0 {
        return Ok(scaled_em_cf(m, x));
    }
    let mut s = scaled_e1_series(x);
    for k in 1..m {
        s = (1.0 - x * s) / k as f64;
    }
    Ok(s)
}

/// Generalized exponential integral `E_m(x) = ∫₁^∞ e^{-xt} t^{-m} dt`.
pub fn gen_exp_integral(m: u32, x: f64) -> Result<f64> {
    let s = scaled_gen_exp_integral(m, x)?;
    Ok(s * (-x).exp())
}

/// Limit `E_m(0) = 1/(m-1)`, defined for m ≥ 2.
pub fn gen_exp_integral_at_zero(m: u32) -> Result<f64> {
    if m < 2 {
        return Err(domain("gen_exp_integral_at_zero", "E_1 diverges at 0"));
    }
    Ok(1.0 / (m - 1) as f64)
}

/// `e^x Σ_{m=1}^{m_max} E_m(x)`.
///
/// One continued-fraction evaluation at the pivot order nearest `x`, then the
/// three-term recurrence run away from the pivot in both directions, which is
/// the stable direction on each side.
pub fn exp_scaled_em_sum(m_max: u32, x: f64) -> Result<f64> {
    check_em_args("exp_scaled_em_sum", m_max, x)?;
    if x < 1.0 {
        let mut s = scaled_e1_series(x);
        let mut total = s;
        for k in 1..m_max {
            s = (1.0 - x * s) / k as f64;
            total += s;
        }
        return Ok(total);
    }
    let pivot = (x.ceil() as u64).clamp(1, m_max as u64) as u32;
    let s_pivot = scaled_em_cf(pivot, x);
    let mut total = s_pivot;
    let mut s = s_pivot;
    for k in (1..pivot).rev() {
        // s_k = (1 - k s_{k+1}) / x
        s = (1.0 - k as f64 * s) / x;
        total += s;
    }
    s = s_pivot;
    for k in pivot..m_max {
        s = (1.0 - x * s) / k as f64;
        total += s;
    }
    Ok(total)
}

/// Principal branch of the Lambert W function, refined to full precision.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if !(x >= branch - 1e-15) || !x.is_finite() {
        return Err(domain("lambert_w0", format!("x must be >= -1/e, got {x}")));
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < std::f64::consts::E {
        (1.0 + x).ln() * 0.8
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// The crude seed `ln x - ln ln x` used by the closed-form allocations.
pub fn lambert_w0_log_approx(x: f64) -> Result<f64> {
    if !(x >= std::f64::consts::E) || !x.is_finite() {
        return Err(domain("lambert_w0_log_approx", format!("x must be >= e, got {x}")));
    }
    Ok(approx_w_from_ln(x.ln()))
}

/// Same approximation given `ln x`, for arguments that would overflow.
pub(crate) fn approx_w_from_ln(ln_x: f64) -> f64 {
    ln_x - ln_x.ln()
}

/// Round half away from zero.
pub fn round_half_away(x: f64) -> f64 {
    x.round()
}

/// Single Gamma(shape, scale) matching the first two moments of a sum of
/// independent Gamma components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    pub shape: f64,
    pub scale: f64,
}

impl GammaApprox {
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    /// `E[ln X] = ln θ + ψ(D)`.
    pub fn mean_log(&self) -> f64 {
        self.scale.ln() + digamma(self.shape).expect("shape validated positive")
    }
}

/// Moment matching over `(shape, scale)` components.
pub fn gamma_moment_match(components: &[(f64, f64)]) -> Result<GammaApprox> {
    if components.is_empty() {
        return Err(domain("gamma_moment_match", "empty component list"));
    }
    if components.len() == 1 {
        let (d, th) = components[0];
        if !(d > 0.0 && th > 0.0) {
            return Err(domain("gamma_moment_match", "non-positive parameter"));
        }
        return Ok(GammaApprox { shape: d, scale: th });
    }
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for &(d, th) in components {
        if !(d > 0.0 && th > 0.0) {
            return Err(domain(
                "gamma_moment_match",
                format!("non-positive parameter ({d}, {th})"),
            ));
        }
        m1 += d * th;
        m2 += d * th * th;
    }
    Ok(GammaApprox {
        shape: m1 * m1 / m2,
        scale: m2 / m1,
    })
}
