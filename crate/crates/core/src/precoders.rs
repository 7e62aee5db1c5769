//! Zero-forcing, matched-filter and common-stream precoders built from CSIT.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{complex_normal, CMatrix, CommonPrecoderMode};
use crate::error::{domain, Error, Result};

pub type CVector = DVector<Complex64>;

/// Channels whose inverse exceeds this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

const POWER_ITER_TOL: f64 = 1e-10;
const POWER_ITER_MAX: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Zf,
    Mrt,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Zf => "zf",
            Scheme::Mrt => "mrt",
        })
    }
}

/// Common precoder, private precoders (columns) and per-stream power fractions.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    /// `None` when no common stream is transmitted.
    pub common: Option<CVector>,
    pub privates: CMatrix,
    pub scheme: Scheme,
    pub group1: Vec<usize>,
    pub group2: Vec<usize>,
    pub mu: Vec<f64>,
}

impl PrecoderSet {
    /// ZF to the first `N` users, common stream only for the rest.
    pub fn rate_split_zf(h_hat: &CMatrix, common: CVector) -> Result<Self> {
        let (n, k) = h_hat.shape();
        let zf = zf_precoders(&h_hat.columns(0, n).into_owned())?;
        let mut privates = CMatrix::zeros(n, k);
        privates.columns_mut(0, n).copy_from(&zf);
        let mut mu = vec![0.0; k];
        mu[..n].fill(1.0 / n as f64);
        Ok(Self {
            common: Some(common),
            privates,
            scheme: Scheme::Zf,
            group1: (0..n).collect(),
            group2: (n..k).collect(),
            mu,
        })
    }

    /// MRT to every user with equal private power.
    pub fn rate_split_mrt(h_hat: &CMatrix, common: CVector) -> Result<Self> {
        let k = h_hat.ncols();
        Ok(Self {
            common: Some(common),
            privates: mrt_precoders(h_hat)?,
            scheme: Scheme::Mrt,
            group1: (0..k).collect(),
            group2: Vec::new(),
            mu: vec![1.0 / k as f64; k],
        })
    }

    pub fn n_users(&self) -> usize {
        self.privates.ncols()
    }
}

/// Unit-norm ZF precoders for a group of at most `N` users (columns of `h_hat`).
///
/// A square group uses the inverse of `Ĥᴴ`; a smaller group uses the
/// pseudo-inverse `Ĥ (ĤᴴĤ)⁻¹`.
pub fn zf_precoders(h_hat: &CMatrix) -> Result<CMatrix> {
    let (n, g) = h_hat.shape();
    if g == 0 || g > n {
        return Err(domain("zf_precoders", format!("group of {g} users on {n} antennas")));
    }
    let mut p = if g == n {
        checked_inverse(&h_hat.adjoint())?
    } else {
        let gram = h_hat.adjoint() * h_hat;
        h_hat * checked_inverse(&gram)?
    };
    for mut col in p.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::from(norm);
    }
    Ok(p)
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU inverse with a 1-norm condition-number guard.
fn checked_inverse(m: &CMatrix) -> Result<CMatrix> {
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularChannel { cond: f64::INFINITY })?;
    let cond = one_norm(m) * one_norm(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::SingularChannel { cond });
    }
    Ok(inv)
}

/// `p_k = ĥ_k / ‖ĥ_k‖`.
pub fn mrt_precoders(h_hat: &CMatrix) -> Result<CMatrix> {
    let mut p = h_hat.clone();
    for mut col in p.column_iter_mut() {
        let norm = col.norm();
        if !(norm > 0.0) {
            return Err(domain("mrt_precoders", "zero channel vector"));
        }
        col /= Complex64::from(norm);
    }
    Ok(p)
}

/// Unit-norm common-stream precoder.
pub fn common_precoder<R: Rng + ?Sized>(h_hat: &CMatrix, mode: CommonPrecoderMode, rng: &mut R) -> CVector {
    match mode {
        CommonPrecoderMode::Random => random_unit_vector(h_hat.nrows(), rng),
        CommonPrecoderMode::DominantEigvec => dominant_direction(h_hat),
    }
}

/// Isotropic unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 0.0 {
            return v / Complex64::from(norm);
        }
    }
}

/// Dominant left singular vector of `h_hat` by power iteration on `Ĥ Ĥᴴ`.
pub fn dominant_direction(h_hat: &CMatrix) -> CVector {
    let gram = h_hat * h_hat.adjoint();
    let n = gram.nrows();
    // Start from the strongest column of the Gram matrix.
    let start = (0..n)
        .max_by(|&a, &b| gram[(a, a)].re.total_cmp(&gram[(b, b)].re))
        .unwrap_or(0);
    let mut x = gram.column(start).into_owned();
    let mut norm = x.norm();
    if !(norm > 0.0) {
        x = CVector::from_element(n, Complex64::new(1.0, 0.0));
        norm = x.norm();
    }
    x /= Complex64::from(norm);
    let mut lambda = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let y = &gram * &x;
        let next = y.norm();
        if !(next > 0.0) {
            break;
        }
        x = y / Complex64::from(next);
        let done = (next - lambda).abs() <= POWER_ITER_TOL * next;
        lambda = next;
        if done {
            break;
        }
    }
    fix_phase(x)
}

/// Rotates so the first nonzero entry is real and positive.
fn fix_phase(mut x: CVector) -> CVector {
    if let Some(z) = x.iter().find(|z| z.norm() > 1e-300).copied() {
        let rot = z.conj() / z.norm();
        x *= rot;
    }
    x
}
