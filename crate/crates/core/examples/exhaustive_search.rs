//! Grid search over (t, beta) compared with the closed-form pick.

use rsma::allocation::{propose, DesignParams};
use rsma::bounds::CommonRegime;
use rsma::channel::Link;
use rsma::search::{design_value, exhaustive_search, grid_for_profile, GridProfile};

fn main() -> rsma::Result<()> {
    let v = vec![1.0, 0.8, 0.5, 0.3, 1.0, 0.6, 0.2, 0.1];
    for power in [10.0, 1e3, 1e5] {
        let link = Link::new(4, 8, power, 1.0, v.clone())?;
        let grid = grid_for_profile(8, GridProfile::Standard);
        let res = exhaustive_search(&link, &grid)?;
        let pick = propose(
            &link,
            &DesignParams {
                beta_fraction: 0.98,
                lambda_gate: 0.3,
                mrt_case: rsma::channel::MrtCase::Auto,
            },
        )?
        .selected;
        let own = design_value(
            &link,
            pick.scheme,
            pick.t.max(grid.t_values[0]),
            pick.beta.unwrap_or(0.0),
            CommonRegime::ExactEta,
        )?;
        println!(
            "P = {power:>7}: grid best {:?} t = {:.3e} beta = {:?} r* = {:.4}; closed form {:?} n = {} r = {:.4} ({:.1}%)",
            res.best.scheme,
            res.best.t,
            res.best.beta,
            res.best.rate,
            pick.scheme,
            pick.index,
            own,
            100.0 * own / res.best.rate
        );
    }
    Ok(())
}
