//! Run configuration: a flat JSON document with unit-suffixed keys.

use std::path::{Path, PathBuf};

use optomech_core::PhysicalParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuningMode {
    /// Use `omega_c_rad_s` as given.
    Explicit,
    /// Tune ω_c so that Δ = ω_m.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every key is required; there are no per-key defaults inside a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub atom_number: u64,
    pub omega0_rad_s: f64,
    pub omega_a_rad_s: f64,
    /// Ignored when `tuning` is `auto`; may be null then.
    #[serde(deserialize_with = "Option::deserialize")]
    pub omega_c_rad_s: Option<f64>,
    pub g0_rad_s: f64,
    pub omega_r_rad_s: f64,
    pub kappa_rad_s: f64,
    pub gamma_over_kappa: f64,
    #[serde(rename = "omega_sw_over_omegaR")]
    pub omega_sw_over_omega_r: f64,
    pub eta_over_kappa: f64,
    pub tuning: TuningMode,
    #[serde(rename = "grid_min_over_omegaR")]
    pub grid_min_over_omega_r: f64,
    #[serde(rename = "grid_max_over_omegaR")]
    pub grid_max_over_omega_r: f64,
    pub grid_points: usize,
    pub format: Format,
    pub plot: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PhysicalParams::reference();
        RunConfig {
            atom_number: p.atom_number,
            omega0_rad_s: p.omega0,
            omega_a_rad_s: p.omega_a,
            omega_c_rad_s: None,
            g0_rad_s: p.g0,
            omega_r_rad_s: p.omega_r,
            kappa_rad_s: p.kappa,
            gamma_over_kappa: p.gamma / p.kappa,
            omega_sw_over_omega_r: p.omega_sw / p.omega_r,
            eta_over_kappa: p.eta / p.kappa,
            tuning: TuningMode::Auto,
            grid_min_over_omega_r: 20.0,
            grid_max_over_omega_r: 70.0,
            grid_points: 2001,
            format: Format::Csv,
            plot: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_points < 2 {
            return Err(CliError::Config(format!(
                "grid_points must be at least 2, got {}",
                self.grid_points
            )));
        }
        if !(self.grid_min_over_omega_r.is_finite()
            && self.grid_max_over_omega_r.is_finite()
            && self.grid_min_over_omega_r < self.grid_max_over_omega_r)
        {
            return Err(CliError::Config(format!(
                "grid_min_over_omegaR ({}) must be below grid_max_over_omegaR ({})",
                self.grid_min_over_omega_r, self.grid_max_over_omega_r
            )));
        }
        if self.tuning == TuningMode::Explicit && self.omega_c_rad_s.is_none() {
            return Err(CliError::Config(
                "omega_c_rad_s is required when tuning is `explicit`".into(),
            ));
        }
        Ok(())
    }

    /// Physical parameters in rad/s. Under auto tuning `omega_c` starts at
    /// the bare cavity frequency and is replaced by the tuner.
    pub fn physical(&self) -> PhysicalParams {
        let omega_c = match self.tuning {
            TuningMode::Explicit => self.omega_c_rad_s.unwrap_or(self.omega0_rad_s),
            TuningMode::Auto => self.omega0_rad_s,
        };
        PhysicalParams {
            atom_number: self.atom_number,
            omega0: self.omega0_rad_s,
            omega_a: self.omega_a_rad_s,
            omega_c,
            g0: self.g0_rad_s,
            omega_r: self.omega_r_rad_s,
            kappa: self.kappa_rad_s,
            gamma: self.gamma_over_kappa * self.kappa_rad_s,
            omega_sw: self.omega_sw_over_omega_r * self.omega_r_rad_s,
            eta: self.eta_over_kappa * self.kappa_rad_s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        assert_eq!(cfg.physical(), PhysicalParams::reference());
    }

    #[test]
    fn missing_key_is_named() {
        let mut v = serde_json::to_value(RunConfig::default()).unwrap();
        v.as_object_mut().unwrap().remove("kappa_rad_s");
        let err = RunConfig::parse(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("missing field `kappa_rad_s`"), "{err}");
    }

    #[test]
    fn null_omega_c_must_still_be_present() {
        let mut v = serde_json::to_value(RunConfig::default()).unwrap();
        v.as_object_mut().unwrap().remove("omega_c_rad_s");
        assert!(RunConfig::parse(&v.to_string()).is_err());
    }

    #[test]
    fn unknown_key_is_rejected_with_position() {
        let text = serde_json::to_string_pretty(&RunConfig::default())
            .unwrap()
            .replacen("\"plot\"", "\"plots\"", 1);
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(
            err.contains("unknown field `plots`") && err.contains("line"),
            "{err}"
        );
    }

    #[test]
    fn grid_invariants() {
        let cfg = RunConfig {
            grid_points: 1,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            grid_min_over_omega_r: 5.0,
            grid_max_over_omega_r: 5.0,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
