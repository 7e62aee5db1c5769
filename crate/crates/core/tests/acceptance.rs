//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its verdict whether or not it passes.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use rsma::allocation::{
    candidates, imperfect_mrt_candidates, imperfect_zf_candidates, perfect_mrt_candidates, perfect_zf_candidates,
    propose, AllocationCandidate, DesignParams,
};
use rsma::bounds::{
    common_lb, common_lb_mrt, common_lb_zf, mrt_terms, private_lb_mrt, private_lb_zf, zf_terms, CommonRegime,
};
use rsma::channel::{substream, CommonPrecoderMode, CsitModel, Link, MrtCase, SystemConfig};
use rsma::harness::{drop_gains, run_sweep, write_csv, ResultRow, SchemeId, SweepSpec};
use rsma::precoders::Scheme;
use rsma::rates::{ergodic_rates_mc, Design};
use rsma::search::{default_grid, design_value, exhaustive_search, zf_branches, zf_point, Family, GridProfile};
use rsma::specfun::{digamma, exp_scaled_em_sum, gen_exp_integral, lambert_w0, round_half_away, EULER_GAMMA};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const E: f64 = std::f64::consts::E;

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

// ---------------------------------------------------------------- oracles

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// E_m(x) from its defining integral, substituting t = 1/u.
fn em_oracle(m: u32, x: f64) -> f64 {
    let f = move |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            (x * (1.0 - 1.0 / u)).exp() * u.powi(m as i32 - 2)
        }
    };
    simpson(&f, 0.0, 1.0, 1e-13) * (-x).exp()
}

/// ψ by upward recurrence to a large argument, then the leading asymptotic terms.
fn digamma_oracle(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x;
    while y < 1e5 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    acc + y.ln() - 0.5 / y - 1.0 / (12.0 * y * y)
}

/// W₀ by bisection on w e^w − x.
fn w_oracle(x: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, x.max(1.0).ln() + 2.0);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() > x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ln_w_approx(ln_x: f64) -> f64 {
    ln_x - ln_x.ln()
}

/// Moment-matched (shape, scale) of a Gamma mixture, written out directly.
fn matched(components: &[(f64, f64)]) -> (f64, f64) {
    let mean: f64 = components.iter().map(|(d, th)| d * th).sum();
    let var: f64 = components.iter().map(|(d, th)| d * th * th).sum();
    (mean * mean / var, var / mean)
}

fn zf_shape_scale(n: f64, eps_sq: f64) -> (f64, f64) {
    matched(&[(1.0, eps_sq), (n, 1.0 - eps_sq)])
}

fn rho_of(numerator: f64, order: f64) -> f64 {
    numerator / (order - 1.0) * (-EULER_GAMMA - 0.5 / (order - 1.0)).exp()
}

// ---------------------------------------------------------------- configs

fn random_link<R: Rng>(rng: &mut R, eps_sq: f64) -> Link {
    let n = rng.random_range(1..=8usize);
    let k = rng.random_range(n + 1..=24usize.max(n + 1));
    let p = 10f64.powf(rng.random_range(-1.0..5.0));
    let v = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
    Link::new(n, k, p, eps_sq, v).expect("valid random link")
}

fn random_design<R: Rng>(rng: &mut R) -> DesignParams {
    DesignParams {
        beta_fraction: rng.random_range(0.0..0.99),
        lambda_gate: rng.random_range(0.0..3.0),
        mrt_case: if rng.random::<bool>() {
            MrtCase::Case1
        } else {
            MrtCase::Case2
        },
    }
}

fn fig2_config(csit: CsitModel) -> SystemConfig {
    SystemConfig {
        csit_model: csit,
        realizations: 100,
        fading_samples: 100,
        seed: 2024,
        ..SystemConfig::new(4, 8)
    }
}

fn sweep(cfg: &SystemConfig, snrs: (f64, f64, f64), schemes: &[SchemeId]) -> Result<Vec<ResultRow>, String> {
    let spec = SweepSpec {
        snr_min_db: snrs.0,
        snr_max_db: snrs.1,
        snr_step_db: snrs.2,
        schemes: schemes.to_vec(),
        realizations: cfg.realizations,
        grid_profile: GridProfile::Standard,
    };
    run_sweep(cfg, &spec).map_err(|e| e.to_string())
}

fn rate_at(rows: &[ResultRow], scheme: SchemeId, snr: f64) -> f64 {
    rows.iter()
        .find(|r| r.scheme == scheme && (r.snr_db - snr).abs() < 1e-9)
        .map(|r| r.maxmin_rate)
        .unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------- criteria

fn special_functions() -> Verdict {
    let mut worst = (0.0f64, String::new());
    let mut note = |e: f64, what: String| {
        if e > worst.0 {
            worst = (e, what);
        }
    };
    for i in 0..=400 {
        let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 400.0);
        note(
            rel_err(digamma(x).map_err(|e| e.to_string())?, digamma_oracle(x)),
            format!("digamma({x:.3e})"),
        );
    }
    for m in 1..=12u32 {
        for i in 0..=60 {
            let x = 10f64.powf(-3.0 + 4.5 * i as f64 / 60.0);
            note(
                rel_err(gen_exp_integral(m, x).map_err(|e| e.to_string())?, em_oracle(m, x)),
                format!("E_{m}({x:.3e})"),
            );
        }
    }
    let mut x = -(-1.0f64).exp() + 1e-6;
    while x <= 1e6 {
        note(
            rel_err(lambert_w0(x).map_err(|e| e.to_string())?, w_oracle(x)),
            format!("W0({x:.3e})"),
        );
        x = if x < 1.0 { x + 0.01 } else { x * 1.2 };
    }
    let msg = format!("worst relative error {:.2e} at {}", worst.0, worst.1);
    if worst.0 <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reductions() -> Verdict {
    let mut rng = substream(101, 0);
    let mut worst = (0.0f64, String::new());
    let mut note = |a: f64, b: f64, what: &str| {
        let e = (a - b).abs() / b.abs().max(1.0);
        if e > worst.0 || e.is_nan() {
            worst = (if e.is_nan() { f64::INFINITY } else { e }, what.to_string());
        }
    };
    let design = DesignParams {
        beta_fraction: 0.0,
        lambda_gate: 0.0,
        mrt_case: MrtCase::Case2,
    };
    for _ in 0..200 {
        let l = random_link(&mut rng, 1.0);
        let (n, k, p) = (l.n_tx as f64, l.n_users as f64, l.power);
        let s: f64 = l.v.iter().map(|v| 1.0 / v).sum();
        let t = rng.random_range(0.01..1.0);
        let e = |r: rsma::Result<f64>| r.expect("bound evaluates");

        // MRT: θ = 1, D = N + K − 1.
        let tm = mrt_terms(&l).expect("mrt terms");
        let m_mrt = round_half_away((n + k - 1.0) * k);
        note(tm.theta(), 1.0, "mrt theta");
        note(tm.d(), n + k - 1.0, "mrt D");
        note(tm.order, m_mrt, "mrt order");
        note(tm.rho, rho_of(k, m_mrt), "mrt rho");
        let x_mrt = k * s / (p * t);
        let eta_mrt = -EULER_GAMMA - s.ln() - exp_scaled_em_sum(m_mrt as u32, x_mrt).unwrap();
        note(e(tm.eta(t)), eta_mrt, "mrt eta");
        note(
            e(common_lb_mrt(&l, t, CommonRegime::ExactEta)),
            (1.0 + p * (1.0 - t) * eta_mrt.exp()).log2(),
            "mrt common exact",
        );
        let small = (1.0 + k * (-EULER_GAMMA).exp() * p * (1.0 - t) / (p * m_mrt * t + k * s)).log2();
        note(
            e(common_lb_mrt(&l, t, CommonRegime::SmallPt)),
            small,
            "mrt common small-Pt",
        );
        let rho_m = rho_of(k, m_mrt);
        note(
            e(common_lb_mrt(&l, t, CommonRegime::HighPt)),
            (1.0 - rho_m + rho_m / t).log2(),
            "mrt common high-Pt",
        );

        // ZF: θ = 1, D = 1.
        let tz = zf_terms(&l).expect("zf terms");
        let m_zf = n * (k - n + 1.0);
        note(tz.theta(), 1.0, "zf theta");
        note(tz.d(), 1.0, "zf D");
        note(tz.order, m_zf, "zf order");
        note(tz.rho, rho_of(n, m_zf), "zf rho");
        let eta_zf = -EULER_GAMMA - s.ln() - exp_scaled_em_sum(m_zf as u32, n * s / (p * t)).unwrap();
        note(e(tz.eta(t)), eta_zf, "zf eta");
        note(
            e(common_lb_zf(&l, t, CommonRegime::ExactEta)),
            (1.0 + p * (1.0 - t) * eta_zf.exp()).log2(),
            "zf common exact",
        );
        let small = (1.0 + n * (-EULER_GAMMA).exp() * p * (1.0 - t) / (p * m_zf * t + n * s)).log2();
        note(
            e(common_lb_zf(&l, t, CommonRegime::SmallPt)),
            small,
            "zf common small-Pt",
        );
        let rho_z = rho_of(n, m_zf);
        note(
            e(common_lb_zf(&l, t, CommonRegime::HighPt)),
            (1.0 - rho_z + rho_z / t).log2(),
            "zf common high-Pt",
        );
        let x_zf = n * s / (p * t);
        let tau: f64 = (1..=m_zf as u32).map(|m| 1.0 / (m as f64 + x_zf - 1.0)).sum();
        let harmonic = (1.0 + p * (1.0 - t) * (-EULER_GAMMA - s.ln() - tau).exp()).log2();
        note(
            e(common_lb(&tz, &l, t, CommonRegime::Harmonic)),
            harmonic,
            "zf common harmonic",
        );

        // Private bounds.
        for &vk in &l.v {
            let psi = digamma(n + k - 1.0).unwrap();
            let mrt = (1.0 + p * t / k * vk * psi.exp()).log2() - (1.0 + p * t / k * vk * (k - 1.0)).log2();
            note(e(private_lb_mrt(&l, t, vk)), mrt, "mrt private");
            let zf = (1.0 + vk * p / n * (-EULER_GAMMA).exp() * t).log2();
            note(e(private_lb_zf(&l, t, vk)), zf, "zf private");
        }

        // Allocation candidates: imperfect 1, 2, 5, 6 against perfect 1, 2, 4, 5.
        let (pz, iz) = (
            perfect_zf_candidates(&l).unwrap(),
            imperfect_zf_candidates(&l, &design).unwrap(),
        );
        let (pm, im) = (
            perfect_mrt_candidates(&l, design.mrt_case).unwrap(),
            imperfect_mrt_candidates(&l, design.mrt_case).unwrap(),
        );
        let pairs: [(&AllocationCandidate, &AllocationCandidate); 4] =
            [(&pz[0], &iz[0]), (&pz[1], &iz[1]), (&pm[0], &im[0]), (&pm[1], &im[1])];
        for (a, b) in pairs {
            let label = format!("candidate {} vs {}", a.index, b.index);
            note(a.t, b.t, &label);
            note(a.predicted_rate, b.predicted_rate, &label);
            note(a.beta.unwrap_or(0.0), b.beta.unwrap_or(0.0), &label);
            if a.is_fallback() != b.is_fallback() {
                note(0.0, 1.0, &label);
            }
        }
    }
    let msg = format!("largest gap {:.2e} ({}) over 200 configs", worst.0, worst.1);
    if worst.0 <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Independently recomputed validity gates for the Lambert-form candidates.
struct Gates {
    perfect_lambert: bool,
    imperfect_lambert: bool,
    imperfect_low_power: bool,
}

fn gates(l: &Link, d: &DesignParams) -> Gates {
    let (n, k, p) = (l.n_tx as f64, l.n_users as f64, l.power);
    let kn = k - n;
    let s: f64 = l.v.iter().map(|v| 1.0 / v).sum();
    let v_weak = l.v[..l.n_tx].iter().copied().fold(f64::INFINITY, f64::min);
    let ln2 = std::f64::consts::LN_2;

    let rho_p = rho_of(n, n * (kn + 1.0));
    let sigma_p = v_weak * p / n * (-EULER_GAMMA).exp();
    let perfect_lambert = ln2 * kn * sigma_p * rho_p >= E;

    let (shape, scale) = zf_shape_scale(n, l.eps_sq);
    let rho = rho_of(n, round_half_away(n * (kn + shape)));
    let sigma = v_weak * p / n * (scale.ln() + digamma(shape).unwrap()).exp();
    let nu = v_weak * p * (n - 1.0) * (1.0 - l.eps_sq) / n;
    let delta = ln2 * kn * (sigma - nu);
    let keep = 1.0 - d.beta_fraction;

    let y = delta * rho / keep;
    let imperfect_lambert = delta > 0.0 && y >= E && {
        let t = ln_w_approx(y.ln()) * keep / delta;
        p * t.clamp(0.0, 1.0) >= d.lambda_gate
    };

    let base = delta * s / ((-EULER_GAMMA).exp() * p);
    let imperfect_low_power = delta > 0.0 && base / keep >= E && {
        let ln_x0 = base.ln() + delta;
        let ln_xg = (base / keep).ln() + delta / keep;
        let t_gate = 1.0 - ln_w_approx(ln_xg) * keep / delta;
        ln_x0 > 0.0 && p * t_gate >= d.lambda_gate
    };
    Gates {
        perfect_lambert,
        imperfect_lambert,
        imperfect_low_power,
    }
}

fn ranges_and_gates() -> Verdict {
    let mut rng = substream(103, 0);
    let mut gate_hits = [0usize; 3];
    for i in 0..10_000 {
        let eps_sq = if i % 10 == 0 { 1.0 } else { rng.random_range(0.0..1.0) };
        let l = random_link(&mut rng, eps_sq);
        let d = random_design(&mut rng);
        let cands = candidates(&l, &d).map_err(|e| format!("config {i}: {e}"))?;
        let beta_max = 1.0 / l.n_users as f64;
        for c in &cands {
            let beta_ok = c.beta.is_none_or(|b| (0.0..=beta_max).contains(&b));
            if !(0.0..=1.0).contains(&c.t) || !beta_ok {
                return Err(format!("config {i}: out of range {c:?}"));
            }
            if c.is_fallback() && c.t != 1.0 {
                return Err(format!("config {i}: fallback with t = {}", c.t));
            }
        }
        let g = gates(&l, &d);
        let checks: Vec<(usize, bool)> = if eps_sq >= 1.0 {
            vec![(2, g.perfect_lambert)]
        } else {
            vec![(2, g.imperfect_lambert), (4, g.imperfect_low_power)]
        };
        for (idx, open) in checks {
            let c = cands
                .iter()
                .find(|c| c.index == idx && c.scheme == Scheme::Zf)
                .expect("candidate present");
            if c.is_fallback() == open {
                return Err(format!(
                    "config {i}: candidate {idx} gate {open} but fallback {}",
                    c.is_fallback()
                ));
            }
            let slot = if eps_sq >= 1.0 {
                0
            } else if idx == 2 {
                1
            } else {
                2
            };
            gate_hits[slot] += open as usize;
        }
    }
    Ok(format!(
        "10000 configs; gates open {gate_hits:?} (perfect Lambert, imperfect Lambert, imperfect low-power)"
    ))
}

fn closed_form_vs_search() -> Verdict {
    let mut failures = Vec::new();
    let mut worst_ratio = (f64::INFINITY, String::new());
    let mut worst_mc = (f64::INFINITY, String::new());
    let grid = default_grid(8, 1);
    for (label, csit) in [
        ("perfect", CsitModel::Perfect),
        ("eps2=0.09", CsitModel::FixedEps { eps: 0.3 }),
        ("eps2=0.49", CsitModel::FixedEps { eps: 0.7 }),
    ] {
        let cfg = fig2_config(csit);
        let design = DesignParams::from(&cfg);
        let rows = sweep(
            &cfg,
            (0.0, 40.0, 5.0),
            &[SchemeId::RsmaProposed, SchemeId::RsmaExhaustive],
        )?;
        for i in 0..=8 {
            let snr = 5.0 * i as f64;
            let p = cfg.power_for_snr_db(snr);
            let eps_sq = rsma::channel::effective_csit_quality(&cfg, p);
            let (mut own, mut best) = (0.0, 0.0);
            for d in 0..cfg.realizations as u64 {
                let l = Link::new(4, 8, p, eps_sq, drop_gains(&cfg, d).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let pick = propose(&l, &design).map_err(|e| e.to_string())?.selected;
                let t = pick.t.max(grid.t_values[0]);
                own += design_value(&l, pick.scheme, t, pick.beta.unwrap_or(0.0), CommonRegime::ExactEta)
                    .map_err(|e| e.to_string())?;
                best += exhaustive_search(&l, &grid).map_err(|e| e.to_string())?.best.rate;
            }
            let ratio = own / best;
            if ratio < worst_ratio.0 {
                worst_ratio = (ratio, format!("{label} {snr} dB"));
            }
            if ratio < 0.95 {
                failures.push(format!("{label} {snr}dB r/r*={ratio:.3}"));
            }
            let (mc_own, mc_best) = (
                rate_at(&rows, SchemeId::RsmaProposed, snr),
                rate_at(&rows, SchemeId::RsmaExhaustive, snr),
            );
            let slack = 0.3f64.max(0.1 * mc_best);
            let margin = slack - (mc_best - mc_own).abs();
            if margin < worst_mc.0 {
                worst_mc = (margin, format!("{label} {snr} dB ({mc_own:.3} vs {mc_best:.3})"));
            }
            if margin < 0.0 {
                failures.push(format!("{label} {snr}dB MC {mc_own:.3} vs {mc_best:.3}"));
            }
        }
    }
    let msg = format!(
        "lowest bound ratio {:.3} at {}; tightest MC margin {:.3} at {}",
        worst_ratio.0, worst_ratio.1, worst_mc.0, worst_mc.1
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; below target: {}", failures.join(", ")))
    }
}

fn saturation() -> Verdict {
    let cfg = SystemConfig {
        realizations: 1000,
        ..fig2_config(CsitModel::Perfect)
    };
    let rows = sweep(
        &cfg,
        (20.0, 40.0, 5.0),
        &[SchemeId::RsmaProposed, SchemeId::SdmaZfGrouping, SchemeId::SdmaMrt],
    )?;
    let gain = |s: SchemeId| rate_at(&rows, s, 40.0) - rate_at(&rows, s, 30.0);
    let (g_zf, g_mrt, g_rsma) = (
        gain(SchemeId::SdmaZfGrouping),
        gain(SchemeId::SdmaMrt),
        gain(SchemeId::RsmaProposed),
    );
    let mut problems = Vec::new();
    if g_zf > 0.15 || g_mrt > 0.15 {
        problems.push("one-shot SDMA grows more than 0.15".to_string());
    }
    if g_rsma < 0.5 {
        problems.push("RSMA grows less than 0.5".to_string());
    }
    for snr in [20.0, 25.0, 30.0, 35.0, 40.0] {
        let r = rate_at(&rows, SchemeId::RsmaProposed, snr);
        if r < rate_at(&rows, SchemeId::SdmaZfGrouping, snr) || r < rate_at(&rows, SchemeId::SdmaMrt, snr) {
            problems.push(format!("RSMA below one-shot SDMA at {snr} dB"));
        }
    }
    let msg = format!("30->40 dB growth: ZF grouping {g_zf:.3}, MRT {g_mrt:.3}, RSMA {g_rsma:.3}");
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", problems.join(", ")))
    }
}

fn scheduling() -> Verdict {
    let cfg = SystemConfig {
        realizations: 1000,
        ..fig2_config(CsitModel::FixedEps { eps: 0.7 })
    };
    let rows = sweep(
        &cfg,
        (30.0, 40.0, 10.0),
        &[
            SchemeId::RsmaProposed,
            SchemeId::SdmaScheduledZf,
            SchemeId::SdmaScheduledMrt,
        ],
    )?;
    let mut parts = Vec::new();
    let mut ok = true;
    for snr in [30.0, 40.0] {
        let r = rate_at(&rows, SchemeId::RsmaProposed, snr);
        let s = rate_at(&rows, SchemeId::SdmaScheduledZf, snr).max(rate_at(&rows, SchemeId::SdmaScheduledMrt, snr));
        ok &= r >= s;
        parts.push(format!("{snr} dB: RSMA {r:.3} vs best scheduled {s:.3}"));
    }
    if ok {
        Ok(parts.join("; "))
    } else {
        Err(parts.join("; "))
    }
}

fn balance() -> Verdict {
    let mut rng = substream(107, 0);
    let mut worst = (f64::NEG_INFINITY, String::new());
    for i in 0..50 {
        let eps_sq = if i % 5 == 0 { 1.0 } else { rng.random_range(0.05..1.0) };
        let l = random_link(&mut rng, eps_sq);
        let grid = rsma::search::GridSpec {
            family: Family::Zf,
            ..default_grid(l.n_users, GridProfile::Fine.fineness())
        };
        let res = exhaustive_search(&l, &grid).map_err(|e| e.to_string())?;
        let opt = res.zf.expect("ZF family searched");
        let point = zf_point(&l, opt.t, CommonRegime::ExactEta).map_err(|e| e.to_string())?;
        let (a, b) = zf_branches(&l, &point, opt.beta.unwrap_or(0.0));
        let excess = (a - b).abs() - res.max_neighbour_step;
        if excess > worst.0 {
            worst = (
                excess,
                format!("config {i}: |{a:.4} - {b:.4}| vs step {:.4}", res.max_neighbour_step),
            );
        }
    }
    let msg = format!("largest imbalance beyond one grid step {:.2e} ({})", worst.0, worst.1);
    if worst.0 <= 0.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bound_validity() -> Verdict {
    let mut rng = substream(109, 0);
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut track = |bound: f64, mc: f64, se: f64, what: String| {
        let z = (bound - mc) / se.max(1e-12);
        if z > worst.0 {
            worst = (z, what);
        }
    };
    for point in 0..10 {
        let n = [2usize, 4][point % 2];
        let k = rng.random_range(n + 1..=2 * n + 4);
        let eps = [1.0, 0.9, 0.7, 0.5, 0.3][point % 5];
        let cfg = SystemConfig {
            csit_model: if eps >= 1.0 {
                CsitModel::Perfect
            } else {
                CsitModel::FixedEps { eps }
            },
            common_precoder: CommonPrecoderMode::Random,
            ..SystemConfig::new(n, k)
        };
        let p = 10f64.powf(rng.random_range(0.0..3.0));
        let t = rng.random_range(0.05..0.95);
        let v: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..=1.0)).collect();
        let link = Link::new(n, k, p, eps * eps, v.clone()).map_err(|e| e.to_string())?;
        let tag = format!("N={n} K={k} eps={eps} P={p:.1} t={t:.2}");
        for scheme in [Scheme::Zf, Scheme::Mrt] {
            let design = Design { scheme, t, beta: 0.0 };
            let mut mc_rng = substream(109, 1 + point as u64);
            let report = ergodic_rates_mc(&cfg, p, &v, design, 10_000, &mut mc_rng).map_err(|e| e.to_string())?;
            let common = match scheme {
                Scheme::Zf => common_lb_zf(&link, t, CommonRegime::ExactEta),
                Scheme::Mrt => common_lb_mrt(&link, t, CommonRegime::ExactEta),
            }
            .map_err(|e| e.to_string())?;
            track(
                common,
                report.common_rate,
                report.common_std_err,
                format!("{scheme:?} common, {tag}"),
            );
            let served = if scheme == Scheme::Zf { n } else { k };
            for (u, &vu) in v.iter().enumerate().take(served) {
                let lb = match scheme {
                    Scheme::Zf => private_lb_zf(&link, t, vu),
                    Scheme::Mrt => private_lb_mrt(&link, t, vu),
                }
                .map_err(|e| e.to_string())?;
                track(
                    lb,
                    report.private_rates[u],
                    report.private_std_errs[u],
                    format!("{scheme:?} private user {u}, {tag}"),
                );
            }
        }
    }
    let msg = format!("largest excess {:.2} standard errors ({})", worst.0, worst.1);
    if worst.0 <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Verdict {
    let cfg = SystemConfig {
        realizations: 20,
        fading_samples: 20,
        seed: 77,
        csit_model: CsitModel::FixedEps { eps: 0.8 },
        ..SystemConfig::new(4, 8)
    };
    let render = || -> Result<Vec<u8>, String> {
        let rows = sweep(&cfg, (0.0, 40.0, 5.0), &SchemeId::ALL)?;
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let (a, b) = (render()?, render()?);
    if a == b {
        Ok(format!("{} identical bytes", a.len()))
    } else {
        Err("CSV output differs between runs".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("special-function oracles", special_functions),
        ("perfect-CSIT reductions", reductions),
        ("allocation ranges and gates", ranges_and_gates),
        ("closed form vs exhaustive search", closed_form_vs_search),
        ("SDMA saturation vs RSMA growth", saturation),
        ("RSMA vs scheduled SDMA", scheduling),
        ("ZF branch balance at the grid optimum", balance),
        ("bound validity vs Monte Carlo", bound_validity),
        ("sweep determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} PASS {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
