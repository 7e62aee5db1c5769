//! Scenario configuration and random channel generation.
//!
//! Channels are stored as `N × K` complex matrices whose k-th column belongs
//! to user k. The true channel mixes the transmitter's estimate with an
//! independent error: `h = ε ĥ + sqrt(1 − ε²) e`.

mod config;

pub use config::{CommonPrecoderMode, CsitModel, GroupRule, LargeScale, LargeScaleLaw, MrtCase, SystemConfig};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Independent, reproducible random stream for work item `stream`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Unit-variance circularly-symmetric complex Gaussian sample.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. CN(0, 1) entries, filled column by column.
pub fn complex_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    CMatrix::from_vec(rows, cols, data)
}

/// ε² in effect at transmit power `power`.
pub fn effective_csit_quality(cfg: &SystemConfig, power: f64) -> f64 {
    match cfg.csit_model {
        CsitModel::Perfect => 1.0,
        CsitModel::FixedEps { eps } => eps * eps,
        CsitModel::Scaling { tau } => (1.0 - power.powf(-tau)).clamp(0.0, 1.0),
    }
}

/// Uniform gains on [v_min, 1] with one user pinned to v_min and another to 1.
pub fn sample_large_scale<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Vec<f64>> {
    let k = cfg.n_users;
    if k < 2 {
        return Err(Error::Config(
            "pinning the gain extremes needs at least two users".into(),
        ));
    }
    let lo = cfg.v_min;
    let mut v: Vec<f64> = (0..k).map(|_| lo + (1.0 - lo) * rng.random::<f64>()).collect();
    let weakest = rng.random_range(0..k);
    let mut strongest = rng.random_range(0..k - 1);
    if strongest >= weakest {
        strongest += 1;
    }
    v[weakest] = lo;
    v[strongest] = 1.0;
    Ok(v)
}

/// Gains for one drop: the explicit list, or a fresh uniform draw.
pub fn large_scale_for<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Vec<f64>> {
    match &cfg.large_scale {
        LargeScale::Explicit(v) => Ok(v.clone()),
        LargeScale::Law(LargeScaleLaw::SampleUniform) => sample_large_scale(cfg, rng),
    }
}

/// One draw of true channels, estimates and errors.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub h_hat: CMatrix,
    pub e: CMatrix,
    pub v: Vec<f64>,
    pub eps_sq: f64,
    pub power: f64,
}

impl ChannelRealization {
    /// Builds the true channel from an estimate/error pair.
    pub fn compose(h_hat: CMatrix, e: CMatrix, v: Vec<f64>, eps_sq: f64, power: f64) -> Self {
        let a = eps_sq.sqrt();
        let b = (1.0 - eps_sq).max(0.0).sqrt();
        let h = h_hat.zip_map(&e, |x, y| x * a + y * b);
        Self {
            h,
            h_hat,
            e,
            v,
            eps_sq,
            power,
        }
    }

    /// Same draws at a different operating point.
    pub fn at(&self, power: f64, eps_sq: f64) -> Self {
        Self::compose(self.h_hat.clone(), self.e.clone(), self.v.clone(), eps_sq, power)
    }

    pub fn n_tx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_users(&self) -> usize {
        self.h.ncols()
    }
}

/// Draws estimates and errors for all users and composes the true channel.
pub fn sample_realization<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    power: f64,
    v: &[f64],
    rng: &mut R,
) -> ChannelRealization {
    let h_hat = complex_normal_matrix(cfg.n_tx, cfg.n_users, rng);
    let e = complex_normal_matrix(cfg.n_tx, cfg.n_users, rng);
    ChannelRealization::compose(h_hat, e, v.to_vec(), effective_csit_quality(cfg, power), power)
}

/// Deterministic quantities the bounds and closed forms depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub n_tx: usize,
    pub n_users: usize,
    pub power: f64,
    pub eps_sq: f64,
    pub v: Vec<f64>,
}

impl Link {
    pub fn new(n_tx: usize, n_users: usize, power: f64, eps_sq: f64, v: Vec<f64>) -> Result<Self> {
        if n_users <= n_tx || n_tx == 0 {
            return Err(Error::Config(format!(
                "need 0 < n_tx < n_users, got n_tx={n_tx}, n_users={n_users}"
            )));
        }
        if v.len() != n_users || v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Config("large-scale gains must be K positive values".into()));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::Config(format!("power must be positive, got {power}")));
        }
        if !(0.0..=1.0).contains(&eps_sq) {
            return Err(Error::Config(format!("eps_sq must lie in [0, 1], got {eps_sq}")));
        }
        Ok(Self {
            n_tx,
            n_users,
            power,
            eps_sq,
            v,
        })
    }

    /// Link at the configured power and the CSIT quality it implies.
    pub fn from_config(cfg: &SystemConfig, v: Vec<f64>) -> Result<Self> {
        Self::new(
            cfg.n_tx,
            cfg.n_users,
            cfg.power,
            effective_csit_quality(cfg, cfg.power),
            v,
        )
    }

    pub fn inv_gain_sum(&self) -> f64 {
        self.v.iter().map(|x| 1.0 / x).sum()
    }

    /// Weakest user overall (first index on ties).
    pub fn weakest_user(&self) -> usize {
        argmin(&self.v)
    }

    /// Weakest user among the privately served group.
    pub fn weakest_private_user(&self) -> usize {
        argmin(&self.v[..self.n_tx])
    }

    pub fn overload(&self) -> usize {
        self.n_users - self.n_tx
    }
}

fn argmin(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &val) in x.iter().enumerate() {
        if val < x[best] {
            best = i;
        }
    }
    best
}
