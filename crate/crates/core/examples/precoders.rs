//! Rate-splitting ZF and MRT precoder sets on one channel draw.

use rsma::channel::{complex_normal_matrix, substream};
use rsma::precoders::{dominant_direction, PrecoderSet};

fn main() -> rsma::Result<()> {
    let mut rng = substream(3, 0);
    let h_hat = complex_normal_matrix(4, 8, &mut rng);
    let common = dominant_direction(&h_hat);

    let zf = PrecoderSet::rate_split_zf(&h_hat, common.clone())?;
    println!("ZF: private users {:?}, common-only users {:?}", zf.group1, zf.group2);
    let inner = h_hat.adjoint() * &zf.privates;
    for u in 0..4 {
        let row: Vec<String> = (0..4).map(|s| format!("{:.1e}", inner[(u, s)].norm())).collect();
        println!("  |h_{u}^H p_s| = [{}]", row.join(", "));
    }

    let mrt = PrecoderSet::rate_split_mrt(&h_hat, common)?;
    println!(
        "MRT: {} private streams, power share per stream {:.3}",
        mrt.privates.ncols(),
        mrt.mu[0]
    );
    Ok(())
}
