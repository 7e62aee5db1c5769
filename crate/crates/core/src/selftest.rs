//! Quick invariant checks behind `rsma-sim selftest`.

use rand::Rng;

use crate::allocation::{
    candidates, imperfect_mrt_candidates, imperfect_zf_candidates, perfect_mrt_candidates, perfect_zf_candidates,
    propose, DesignParams,
};
use crate::bounds::{mrt_terms, zf_terms, CommonRegime};
use crate::channel::{substream, Link, MrtCase, SystemConfig};
use crate::harness::{run_sweep, write_csv, SchemeId, SweepSpec};
use crate::search::{default_grid, design_value, exhaustive_search, GridProfile};
use crate::specfun::{digamma, gen_exp_integral, lambert_w0, EULER_GAMMA};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn random_link<R: Rng>(rng: &mut R, eps_sq: Option<f64>) -> crate::Result<Link> {
    let n = rng.random_range(1..=8);
    let k = n + rng.random_range(1..=16);
    let p = 10f64.powf(rng.random_range(-1.0..5.0));
    let e = eps_sq.unwrap_or_else(|| rng.random_range(0.0..=1.0));
    let v = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
    Link::new(n, k, p, e, v)
}

fn special_functions() -> crate::Result<(bool, String)> {
    let d = (digamma(1.0)? + EULER_GAMMA).abs();
    let e = (gen_exp_integral(1, 1.0)? - 0.219_383_934_395_520_27).abs() / 0.219_383_934_395_520_27;
    let w = (lambert_w0(std::f64::consts::E)? - 1.0).abs();
    let worst = d.max(e).max(w);
    Ok((worst <= 1e-12, format!("worst error {worst:.2e}")))
}

fn reductions() -> crate::Result<(bool, String)> {
    let mut rng = substream(7, 0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let l = random_link(&mut rng, Some(1.0))?;
        let d = DesignParams {
            beta_fraction: 0.0,
            lambda_gate: 0.0,
            mrt_case: MrtCase::Case2,
        };
        let (pz, iz) = (perfect_zf_candidates(&l)?, imperfect_zf_candidates(&l, &d)?);
        let (pm, im) = (
            perfect_mrt_candidates(&l, d.mrt_case)?,
            imperfect_mrt_candidates(&l, d.mrt_case)?,
        );
        for (a, b) in [(&pz[0], &iz[0]), (&pz[1], &iz[1]), (&pm[0], &im[0]), (&pm[1], &im[1])] {
            worst = worst
                .max((a.t - b.t).abs())
                .max((a.predicted_rate - b.predicted_rate).abs());
        }
        let (tz, tm) = (zf_terms(&l)?, mrt_terms(&l)?);
        worst = worst.max((tz.theta() - 1.0).abs()).max((tm.theta() - 1.0).abs());
    }
    Ok((worst <= 1e-9, format!("largest perfect/imperfect gap {worst:.2e}")))
}

fn ranges() -> crate::Result<(bool, String)> {
    let mut rng = substream(11, 0);
    for i in 0..500 {
        let l = random_link(&mut rng, None)?;
        let d = DesignParams {
            beta_fraction: rng.random_range(0.0..0.99),
            lambda_gate: rng.random_range(0.0..3.0),
            mrt_case: if rng.random::<bool>() {
                MrtCase::Case1
            } else {
                MrtCase::Case2
            },
        };
        for c in candidates(&l, &d)? {
            let beta_ok = c.beta.is_none_or(|b| (0.0..=1.0 / l.n_users as f64).contains(&b));
            if !(0.0..=1.0).contains(&c.t) || !beta_ok {
                return Ok((false, format!("config {i}: {c:?}")));
            }
        }
    }
    Ok((true, "500 random configs".into()))
}

fn dominance() -> crate::Result<(bool, String)> {
    let mut rng = substream(13, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let l = random_link(&mut rng, None)?;
        let grid = default_grid(l.n_users, GridProfile::Fine.fineness());
        let d = DesignParams {
            beta_fraction: 0.98,
            lambda_gate: 0.3,
            mrt_case: MrtCase::Auto,
        };
        let pick = propose(&l, &d)?.selected;
        let search = exhaustive_search(&l, &grid)?;
        let own = design_value(
            &l,
            pick.scheme,
            pick.t.max(grid.t_values[0]),
            pick.beta.unwrap_or(0.0),
            CommonRegime::ExactEta,
        )?;
        worst = worst.max(own - search.best.rate - search.max_neighbour_step);
    }
    Ok((worst <= 1e-9, format!("largest excess over grid optimum {worst:.2e}")))
}

fn determinism() -> crate::Result<(bool, String)> {
    let cfg = SystemConfig {
        realizations: 4,
        fading_samples: 20,
        seed: 3,
        ..SystemConfig::new(2, 4)
    };
    let spec = SweepSpec {
        snr_min_db: 0.0,
        snr_max_db: 20.0,
        snr_step_db: 10.0,
        schemes: SchemeId::ALL.to_vec(),
        realizations: 4,
        grid_profile: GridProfile::Standard,
    };
    let render = || -> crate::Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_csv(&run_sweep(&cfg, &spec)?, &mut buf).map_err(|e| crate::Error::Config(e.to_string()))?;
        Ok(buf)
    };
    let (a, b) = (render()?, render()?);
    Ok((a == b, format!("{} bytes", a.len())))
}

pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("special_functions", special_functions),
        check("perfect_csit_reductions", reductions),
        check("allocation_ranges", ranges),
        check("grid_dominance", dominance),
        check("sweep_determinism", determinism),
    ]
}
