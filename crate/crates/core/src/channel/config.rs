use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the transmitter's channel estimate relates to the true channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CsitModel {
    Perfect,
    /// Fixed estimate quality ε; the captured power fraction is ε².
    FixedEps {
        eps: f64,
    },
    /// Quality improving with power: ε² = 1 − P^{−τ}.
    Scaling {
        tau: f64,
    },
}

/// Large-scale gains: explicit per-user values or the uniform law on [v_min, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LargeScale {
    Explicit(Vec<f64>),
    Law(LargeScaleLaw),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LargeScaleLaw {
    SampleUniform,
}

/// Which quadratic family feeds the MRT candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MrtCase {
    /// Private power assumed large.
    Case1,
    /// Private power assumed moderate or small.
    Case2,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupRule {
    FirstNIndices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommonPrecoderMode {
    Random,
    DominantEigvec,
}

/// All scenario parameters. Deserializes from the JSON schema in the README.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_tx: usize,
    pub n_users: usize,
    #[serde(default = "defaults::power")]
    pub power: f64,
    #[serde(default = "defaults::csit")]
    pub csit_model: CsitModel,
    #[serde(default = "defaults::v_min")]
    pub v_min: f64,
    #[serde(default = "defaults::large_scale")]
    pub large_scale: LargeScale,
    /// Redraw sampled gains for every drop instead of once per run.
    #[serde(default = "defaults::yes")]
    pub redraw_large_scale: bool,
    #[serde(default = "defaults::beta_fraction")]
    pub beta_fraction: f64,
    #[serde(default = "defaults::lambda_gate")]
    pub lambda_gate: f64,
    #[serde(default = "defaults::mrt_case")]
    pub mrt_case: MrtCase,
    #[serde(default = "defaults::group_rule")]
    pub group_rule: GroupRule,
    #[serde(default = "defaults::common_precoder")]
    pub common_precoder: CommonPrecoderMode,
    /// Number of drops (large-scale draws) averaged per SNR point.
    #[serde(default = "defaults::realizations")]
    pub realizations: usize,
    /// Small-scale fading samples per drop for the ergodic averages.
    #[serde(default = "defaults::fading_samples")]
    pub fading_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    use super::*;
    pub fn power() -> f64 {
        100.0
    }
    pub fn csit() -> CsitModel {
        CsitModel::Perfect
    }
    pub fn v_min() -> f64 {
        0.1
    }
    pub fn large_scale() -> LargeScale {
        LargeScale::Law(LargeScaleLaw::SampleUniform)
    }
    pub fn yes() -> bool {
        true
    }
    pub fn beta_fraction() -> f64 {
        0.98
    }
    pub fn lambda_gate() -> f64 {
        0.3
    }
    pub fn mrt_case() -> MrtCase {
        MrtCase::Auto
    }
    pub fn group_rule() -> GroupRule {
        GroupRule::FirstNIndices
    }
    pub fn common_precoder() -> CommonPrecoderMode {
        CommonPrecoderMode::DominantEigvec
    }
    pub fn realizations() -> usize {
        100
    }
    pub fn fading_samples() -> usize {
        100
    }
}

impl SystemConfig {
    /// Defaults for everything except the array and user counts.
    pub fn new(n_tx: usize, n_users: usize) -> Self {
        Self {
            n_tx,
            n_users,
            power: defaults::power(),
            csit_model: defaults::csit(),
            v_min: defaults::v_min(),
            large_scale: defaults::large_scale(),
            redraw_large_scale: true,
            beta_fraction: defaults::beta_fraction(),
            lambda_gate: defaults::lambda_gate(),
            mrt_case: defaults::mrt_case(),
            group_rule: defaults::group_rule(),
            common_precoder: defaults::common_precoder(),
            realizations: defaults::realizations(),
            fading_samples: defaults::fading_samples(),
            seed: 0,
        }
    }

    pub fn from_json_str(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_tx == 0 {
            return bad("n_tx must be positive".into());
        }
        if self.n_users <= self.n_tx {
            return bad(format!(
                "n_users ({}) must exceed n_tx ({}) for an overloaded system",
                self.n_users, self.n_tx
            ));
        }
        if !(self.power > 0.0) || !self.power.is_finite() {
            return bad(format!("power must be positive, got {}", self.power));
        }
        match self.csit_model {
            CsitModel::Perfect => {}
            CsitModel::FixedEps { eps } => {
                if !(0.0..=1.0).contains(&eps) {
                    return bad(format!("eps must lie in [0, 1], got {eps}"));
                }
            }
            CsitModel::Scaling { tau } => {
                if !(tau > 0.0) || !tau.is_finite() {
                    return bad(format!("tau must be positive, got {tau}"));
                }
            }
        }
        if !(self.v_min > 0.0 && self.v_min <= 1.0) {
            return bad(format!("v_min must lie in (0, 1], got {}", self.v_min));
        }
        if let LargeScale::Explicit(v) = &self.large_scale {
            if v.len() != self.n_users {
                return bad(format!(
                    "large_scale has {} entries, expected {}",
                    v.len(),
                    self.n_users
                ));
            }
            if v.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return bad("every large_scale entry must lie in (0, 1]".into());
            }
        }
        if !(0.0..1.0).contains(&self.beta_fraction) {
            return bad(format!("beta_fraction must lie in [0, 1), got {}", self.beta_fraction));
        }
        if !(self.lambda_gate >= 0.0) {
            return bad(format!("lambda_gate must be non-negative, got {}", self.lambda_gate));
        }
        if self.realizations == 0 || self.fading_samples == 0 {
            return bad("realizations and fading_samples must be positive".into());
        }
        Ok(())
    }

    /// Smallest large-scale gain the SNR axis is referenced to.
    pub fn reference_gain(&self) -> f64 {
        match &self.large_scale {
            LargeScale::Explicit(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
            LargeScale::Law(_) => self.v_min,
        }
    }

    /// Transmit power giving `snr_db` at the reference gain.
    pub fn power_for_snr_db(&self, snr_db: f64) -> f64 {
        10f64.powf(snr_db / 10.0) / self.reference_gain()
    }

    pub fn with_power(&self, power: f64) -> Self {
        Self { power, ..self.clone() }
    }
}
