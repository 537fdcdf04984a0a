//! Tolerances and run configuration.

use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative distance below which roots or points are merged.
    pub eps_cluster: f64,
    /// Certificate threshold on relative residuals.
    pub eps_cert: f64,
    /// Relative singular-value threshold for rank decisions.
    pub eps_rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps_cluster: 1e-6, eps_cert: 1e-8, eps_rank: 1e-9 }
    }
}

impl Tolerances {
    /// Defaults, with `K3CORR_EPS` overriding `eps_cert` when set.
    pub fn from_env() -> Self {
        let mut t = Tolerances::default();
        if let Some(v) = std::env::var("K3CORR_EPS").ok().and_then(|s| s.parse::<f64>().ok()) {
            if v > 0.0 {
                t.eps_cert = v;
            }
        }
        t
    }

    /// Distance at which two computed points are identified, looser than
    /// `eps_cert` because clustered points carry `sqrt`-type error.
    pub fn point_match(&self) -> f64 {
        self.eps_cert.sqrt().max(self.eps_cluster)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.eps_cluster > 0.0 && self.eps_cert > 0.0 && self.eps_rank > 0.0) {
            return Err(crate::Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.eps_cert > self.eps_cluster {
            return Err(crate::Error::InvalidInput("eps_cert must not exceed eps_cluster".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    pub verbosity: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tolerances: Tolerances::from_env(), mode: Mode::Float, output_path: None, verbosity: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_ordered() {
        let t = Tolerances::default();
        assert!(t.validate().is_ok());
        let bad = Tolerances { eps_cert: 1e-3, ..t };
        assert!(bad.validate().is_err());
    }
}
