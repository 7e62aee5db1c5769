//! Digamma, generalized exponential integrals and the principal Lambert W branch.

use rsma::specfun::{
    digamma, exp_scaled_em_sum, gamma_moment_match, gen_exp_integral, lambert_w0, lambert_w0_log_approx,
};

fn main() -> rsma::Result<()> {
    for x in [0.5, 1.0, 2.0, 11.0] {
        println!("psi({x}) = {:.12}", digamma(x)?);
    }
    for m in 1..=4 {
        println!("E_{m}(0.7) = {:.12}", gen_exp_integral(m, 0.7)?);
    }
    println!("e^x sum_(m<=20) E_m(x) at x = 3: {:.12}", exp_scaled_em_sum(20, 3.0)?);
    for x in [std::f64::consts::E, 10.0, 100.0, 1e4] {
        println!(
            "W0({x:.4}) = {:.10}   ln x - ln ln x = {:.10}",
            lambert_w0(x)?,
            lambert_w0_log_approx(x)?
        );
    }
    let g = gamma_moment_match(&[(4.0, 0.5), (1.0, 0.5), (7.0, 1.0)])?;
    println!("moment-matched Gamma: shape {:.6}, scale {:.6}", g.shape, g.scale);
    Ok(())
}
