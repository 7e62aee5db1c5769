//! Closed-form rate bounds and their regime approximations.

use rsma::bounds::{common_lb_mrt, common_lb_zf, mrt_terms, private_lb_mrt, private_lb_zf, zf_terms, CommonRegime};
use rsma::channel::Link;

fn main() -> rsma::Result<()> {
    let v = vec![1.0, 0.8, 0.5, 0.3, 1.0, 0.6, 0.2, 0.1];
    let link = Link::new(4, 8, 1000.0, 0.81, v)?;
    let (z, m) = (zf_terms(&link)?, mrt_terms(&link)?);
    println!(
        "ZF  terms: D {:.4} theta {:.4} order {} rho {:.5}",
        z.d(),
        z.theta(),
        z.order,
        z.rho
    );
    println!(
        "MRT terms: D {:.4} theta {:.4} order {} rho {:.5}",
        m.d(),
        m.theta(),
        m.order,
        m.rho
    );
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "t", "ZF exact", "ZF high", "ZF small", "ZF priv", "MRT priv"
    );
    for t in [0.001, 0.01, 0.1, 0.5, 0.9] {
        println!(
            "{t:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            common_lb_zf(&link, t, CommonRegime::ExactEta)?,
            common_lb_zf(&link, t, CommonRegime::HighPt)?,
            common_lb_zf(&link, t, CommonRegime::SmallPt)?,
            private_lb_zf(&link, t, 0.3)?,
            private_lb_mrt(&link, t, 0.1)?,
        );
    }
    println!(
        "MRT common at t = 0.5: {:.4}",
        common_lb_mrt(&link, 0.5, CommonRegime::ExactEta)?
    );
    Ok(())
}
