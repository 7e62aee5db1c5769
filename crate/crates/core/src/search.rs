//! Exhaustive grid search over `(t, β)` on the analytic rate bounds.
//!
//! This is the reference the closed-form allocation is judged against. It
//! evaluates the same bound expressions, only without the regime
//! approximations.

use serde::{Deserialize, Serialize};

use crate::bounds::{common_lb, mrt_terms, private_lb_mrt, private_lb_zf, zf_terms, CommonRegime};
use crate::channel::Link;
use crate::error::{Error, Result};
use crate::precoders::Scheme;

/// Schemes a grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Zf,
    Mrt,
    Both,
}

impl Family {
    fn has(self, scheme: Scheme) -> bool {
        matches!(
            (self, scheme),
            (Family::Both, _) | (Family::Zf, Scheme::Zf) | (Family::Mrt, Scheme::Mrt)
        )
    }
}

/// Resolution preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridProfile {
    /// 144 `t` values and `β` steps of 0.001.
    #[default]
    #[serde(rename = "paper")]
    #[value(name = "paper")]
    Standard,
    /// Ten times denser in both `t` and `β`.
    Fine,
}

impl GridProfile {
    pub fn fineness(self) -> usize {
        match self {
            GridProfile::Standard => 1,
            GridProfile::Fine => 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Ascending, within `[1e-6, 1]`.
    pub t_values: Vec<f64>,
    /// Ascending, within `[0, 1/K)`.
    pub beta_values: Vec<f64>,
    pub family: Family,
}

const T_FLOOR: f64 = 1e-6;
const T_KNEE: f64 = 0.1;
const POINTS_PER_SEGMENT: usize = 72;
const BETA_STEP: f64 = 0.001;

/// 72 log-spaced `t` on `[1e-6, 0.1]`, 72 linear on `(0.1, 1]`, and `β` in
/// steps of 0.001 below `1/K`; `fineness` multiplies every count.
pub fn default_grid(n_users: usize, fineness: usize) -> GridSpec {
    let f = fineness.max(1);
    let per = POINTS_PER_SEGMENT * f;
    let (lo, hi) = (T_FLOOR.log10(), T_KNEE.log10());
    let mut t_values: Vec<f64> = (0..per)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (per - 1) as f64))
        .collect();
    t_values[0] = T_FLOOR;
    t_values[per - 1] = T_KNEE;
    t_values.extend((1..=per).map(|j| T_KNEE + (1.0 - T_KNEE) * j as f64 / per as f64));
    t_values[2 * per - 1] = 1.0;

    let step = BETA_STEP / f as f64;
    let count = (1000.0 * f as f64 / n_users as f64).ceil() as usize;
    let beta_values = (0..count).map(|i| i as f64 * step).collect();
    GridSpec {
        t_values,
        beta_values,
        family: Family::Both,
    }
}

pub fn grid_for_profile(n_users: usize, profile: GridProfile) -> GridSpec {
    default_grid(n_users, profile.fineness())
}

/// Per-`t` rate bounds feeding both objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub t: f64,
    pub common: f64,
    /// Weakest private bound among the users that carry a private stream, floored at 0.
    pub min_private: f64,
}

/// ZF bounds at `t`: common over all users, private over the first N users.
pub fn zf_point(link: &Link, t: f64, regime: CommonRegime) -> Result<BoundPoint> {
    let terms = zf_terms(link)?;
    let common = common_lb(&terms, link, t, regime)?;
    let mut min_private = f64::INFINITY;
    for &v in &link.v[..link.n_tx] {
        min_private = min_private.min(private_lb_zf(link, t, v)?.max(0.0));
    }
    Ok(BoundPoint { t, common, min_private })
}

/// MRT bounds at `t` over all users.
pub fn mrt_point(link: &Link, t: f64, regime: CommonRegime) -> Result<BoundPoint> {
    let terms = mrt_terms(link)?;
    let common = common_lb(&terms, link, t, regime)?;
    let mut min_private = f64::INFINITY;
    for &v in &link.v {
        min_private = min_private.min(private_lb_mrt(link, t, v)?.max(0.0));
    }
    Ok(BoundPoint { t, common, min_private })
}

/// The two branches of the ZF max-min rate: the privately served group and
/// the common-only group.
pub fn zf_branches(link: &Link, p: &BoundPoint, beta: f64) -> (f64, f64) {
    let n = link.n_tx as f64;
    let first = beta * p.common + p.min_private;
    let second = (1.0 - n * beta) / link.overload() as f64 * p.common;
    (first, second)
}

pub fn zf_value(link: &Link, p: &BoundPoint, beta: f64) -> f64 {
    let (a, b) = zf_branches(link, p, beta);
    a.min(b)
}

pub fn mrt_value(link: &Link, p: &BoundPoint) -> f64 {
    p.common / link.n_users as f64 + p.min_private
}

/// Bound objective of an arbitrary design; `beta` is ignored for MRT.
pub fn design_value(link: &Link, scheme: Scheme, t: f64, beta: f64, regime: CommonRegime) -> Result<f64> {
    Ok(match scheme {
        Scheme::Zf => zf_value(link, &zf_point(link, t, regime)?, beta),
        Scheme::Mrt => mrt_value(link, &mrt_point(link, t, regime)?),
    })
}

/// Best point found by the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub scheme: Scheme,
    pub t: f64,
    /// `None` for MRT.
    pub beta: Option<f64>,
    pub rate: f64,
    pub t_index: usize,
    pub beta_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: GridOptimum,
    pub zf: Option<GridOptimum>,
    pub mrt: Option<GridOptimum>,
    /// Largest objective change between grid neighbours, across the searched families.
    pub max_neighbour_step: f64,
}

fn check_grid(grid: &GridSpec, link: &Link) -> Result<()> {
    let sorted = |xs: &[f64]| xs.windows(2).all(|w| w[0] < w[1]);
    if grid.t_values.is_empty() || !sorted(&grid.t_values) {
        return Err(Error::Config("t grid must be non-empty and strictly ascending".into()));
    }
    if grid.t_values[0] <= 0.0 || grid.t_values[grid.t_values.len() - 1] > 1.0 {
        return Err(Error::Config("t grid must lie in (0, 1]".into()));
    }
    if grid.family.has(Scheme::Zf) {
        let cap = 1.0 / link.n_users as f64;
        if grid.beta_values.is_empty() || !sorted(&grid.beta_values) {
            return Err(Error::Config(
                "beta grid must be non-empty and strictly ascending".into(),
            ));
        }
        if grid.beta_values[0] < 0.0 || grid.beta_values[grid.beta_values.len() - 1] > cap {
            return Err(Error::Config(format!("beta grid must lie in [0, {cap}]")));
        }
    }
    Ok(())
}

/// Exhaustive search with the exact-η common bound.
pub fn exhaustive_search(link: &Link, grid: &GridSpec) -> Result<SearchResult> {
    exhaustive_search_with(link, grid, CommonRegime::ExactEta)
}

/// Exhaustive search with a chosen common-rate form. Ties go to the first
/// point in (ZF before MRT, ascending `t`, ascending `β`) order.
pub fn exhaustive_search_with(link: &Link, grid: &GridSpec, regime: CommonRegime) -> Result<SearchResult> {
    check_grid(grid, link)?;
    let mut step = 0.0f64;

    let zf = if grid.family.has(Scheme::Zf) {
        let points = grid
            .t_values
            .iter()
            .map(|&t| zf_point(link, t, regime))
            .collect::<Result<Vec<_>>>()?;
        let nb = grid.beta_values.len();
        let table: Vec<f64> = points
            .iter()
            .flat_map(|p| grid.beta_values.iter().map(move |&b| zf_value(link, p, b)))
            .collect();
        for i in 0..points.len() {
            for j in 0..nb {
                let here = table[i * nb + j];
                if i + 1 < points.len() {
                    step = step.max((table[(i + 1) * nb + j] - here).abs());
                }
                if j + 1 < nb {
                    step = step.max((table[i * nb + j + 1] - here).abs());
                }
            }
        }
        let (mut bi, mut bj) = (0, 0);
        for (idx, &val) in table.iter().enumerate() {
            if val > table[bi * nb + bj] {
                bi = idx / nb;
                bj = idx % nb;
            }
        }
        Some(GridOptimum {
            scheme: Scheme::Zf,
            t: grid.t_values[bi],
            beta: Some(grid.beta_values[bj]),
            rate: table[bi * nb + bj],
            t_index: bi,
            beta_index: Some(bj),
        })
    } else {
        None
    };

    let mrt = if grid.family.has(Scheme::Mrt) {
        let values = grid
            .t_values
            .iter()
            .map(|&t| mrt_point(link, t, regime).map(|p| mrt_value(link, &p)))
            .collect::<Result<Vec<_>>>()?;
        for w in values.windows(2) {
            step = step.max((w[1] - w[0]).abs());
        }
        let mut bi = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[bi] {
                bi = i;
            }
        }
        Some(GridOptimum {
            scheme: Scheme::Mrt,
            t: grid.t_values[bi],
            beta: None,
            rate: values[bi],
            t_index: bi,
            beta_index: None,
        })
    } else {
        None
    };

    let best = match (zf, mrt) {
        (Some(z), Some(m)) => {
            if m.rate > z.rate {
                m
            } else {
                z
            }
        }
        (Some(z), None) => z,
        (None, Some(m)) => m,
        (None, None) => unreachable!("every family covers at least one scheme"),
    };
    Ok(SearchResult {
        best,
        zf,
        mrt,
        max_neighbour_step: step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{candidates, DesignParams};
    use crate::channel::MrtCase;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn link(n: usize, k: usize, p: f64, e: f64, v: Vec<f64>) -> Link {
        Link::new(n, k, p, e, v).unwrap()
    }

    fn ramp(k: usize) -> Vec<f64> {
        (0..k)
            .map(|i| 0.1 + 0.9 * ((i * 3) % k) as f64 / (k - 1) as f64)
            .collect()
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(8, 1);
        assert_eq!(g.t_values.len(), 144);
        assert_eq!(g.beta_values.len(), 125);
        assert_eq!(g.t_values[0], 1e-6);
        assert_eq!(*g.t_values.last().unwrap(), 1.0);
        assert!(g.t_values.windows(2).all(|w| w[0] < w[1]));
        assert!(*g.beta_values.last().unwrap() < 1.0 / 8.0);
        assert_eq!(default_grid(24, 1).beta_values.len(), 42);
        let fine = default_grid(8, 10);
        assert_eq!(fine.t_values.len(), 1440);
        assert_eq!(fine.beta_values.len(), 1250);
    }

    #[test]
    fn single_point_grid_starves_common_only_group() {
        let l = link(4, 8, 100.0, 1.0, ramp(8));
        let grid = GridSpec {
            t_values: vec![1.0],
            beta_values: vec![0.0],
            family: Family::Both,
        };
        let r = exhaustive_search(&l, &grid).unwrap();
        assert_eq!(r.zf.unwrap().rate, 0.0);
        assert_eq!(r.best.scheme, Scheme::Mrt);
    }

    #[test]
    fn grid_argmax_matches_brute_force() {
        let l = link(4, 8, 1e3, 0.49, ramp(8));
        let grid = default_grid(8, 1);
        let r = exhaustive_search(&l, &grid).unwrap();
        let mut best = f64::NEG_INFINITY;
        for &t in &grid.t_values {
            for &b in &grid.beta_values {
                best = best.max(design_value(&l, Scheme::Zf, t, b, CommonRegime::ExactEta).unwrap());
            }
            best = best.max(design_value(&l, Scheme::Mrt, t, 0.0, CommonRegime::ExactEta).unwrap());
        }
        assert_relative_eq!(r.best.rate, best, max_relative = 1e-14);
    }

    fn perfect_zf_setup() -> (Link, GridSpec, GridOptimum, Vec<crate::allocation::AllocationCandidate>) {
        let l = link(4, 8, 1e4, 1.0, vec![1.0; 8]);
        let grid = GridSpec {
            family: Family::Zf,
            ..default_grid(8, 1)
        };
        let r = exhaustive_search(&l, &grid).unwrap().zf.unwrap();
        let d = DesignParams {
            beta_fraction: 0.98,
            lambda_gate: 0.3,
            mrt_case: MrtCase::Case2,
        };
        (l.clone(), grid, r, candidates(&l, &d).unwrap())
    }

    #[test]
    fn perfect_zf_optimum_bracketed_by_closed_forms() {
        let (l, grid, r, c) = perfect_zf_setup();
        // A 10× finer grid agrees with the standard grid to one step.
        let fine = exhaustive_search(
            &l,
            &GridSpec {
                family: Family::Zf,
                ..default_grid(8, 10)
            },
        )
        .unwrap()
        .zf
        .unwrap();
        let i = r.t_index;
        assert!((grid.t_values[i - 1]..=grid.t_values[i + 1]).contains(&fine.t));
        // t⁽²⁾ undershoots and t⁽¹⁾ overshoots the exact-bound crossing, each by at most two steps.
        assert!(c[1].t < r.t && r.t < c[0].t, "{c:?} vs {}", r.t);
        assert!(grid.t_values[i - 2] <= c[1].t && c[0].t <= grid.t_values[i + 2]);
        assert_eq!(r.beta, Some(0.0));
    }

    #[test]
    #[ignore = "t1 and t2 come from high-SNR approximations of both branches and land two log-grid steps from the exact-bound optimum"]
    fn perfect_zf_optimum_within_one_step_of_closed_form() {
        let (_, grid, r, c) = perfect_zf_setup();
        let i = r.t_index;
        let (lo, hi) = (grid.t_values[i - 1], grid.t_values[i + 1]);
        assert!(c[..2].iter().any(|c| (lo..=hi).contains(&c.t)), "{c:?} vs [{lo}, {hi}]");
    }

    #[test]
    fn selected_scheme_matches_search_family() {
        let l = link(4, 8, 1e3, 1.0, ramp(8));
        let d = DesignParams {
            beta_fraction: 0.98,
            lambda_gate: 0.3,
            mrt_case: MrtCase::Auto,
        };
        let picked = crate::allocation::propose(&l, &d).unwrap().selected;
        let best = exhaustive_search(&l, &default_grid(8, 1)).unwrap().best;
        assert_eq!(picked.scheme, best.scheme);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn refinement_never_decreases_optimum(n in 1usize..5, extra in 1usize..6, logp in 0.0f64..4.0, e in 0.1f64..=1.0) {
            let k = n + extra;
            let l = link(n, k, 10f64.powf(logp), e, ramp(k));
            // The log segments of the two densities do not nest, so refine by union.
            let coarse = default_grid(k, 1);
            let doubled = default_grid(k, 2);
            let union = |a: &[f64], b: &[f64]| {
                let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
                out.sort_by(f64::total_cmp);
                out.dedup();
                out
            };
            let t_values = union(&coarse.t_values, &doubled.t_values);
            let beta_values = union(&coarse.beta_values, &doubled.beta_values);
            let fine = GridSpec { t_values, beta_values, family: Family::Both };
            let a = exhaustive_search(&l, &coarse).unwrap().best.rate;
            let b = exhaustive_search(&l, &fine).unwrap().best.rate;
            prop_assert!(b >= a);
        }

        #[test]
        fn deterministic(n in 1usize..5, extra in 1usize..6, logp in 0.0f64..4.0) {
            let k = n + extra;
            let l = link(n, k, 10f64.powf(logp), 0.5, ramp(k));
            let g = default_grid(k, 1);
            prop_assert_eq!(exhaustive_search(&l, &g).unwrap(), exhaustive_search(&l, &g).unwrap());
        }
    }
}
