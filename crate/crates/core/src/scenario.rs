//! End-to-end pipeline from physical inputs to spectra, and the parameter
//! sets behind the three reference figure datasets.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{diagnostics_sweep, DiagnosticsSpectrum};
use crate::error::{Error, Result};
use crate::model::{derive, DerivedParams, PhysicalParams, SINGLE_MODE_LIMIT};
use crate::numerics::linspace;
use crate::parallel::Execution;
use crate::response::{build_drift, sweep_with, DriftMatrix, ResponseSpectrum};
use crate::steady::{solve_mean_fields, tune_coupling_frequency, MeanFields, Tuning};

/// How the coupling-laser frequency is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CouplingMode {
    /// Use `omega_c` as given.
    Explicit,
    /// Tune `omega_c` so that Δ = ω_m on the stable branch.
    RedSideband,
}

/// A stable operating point with everything needed for response sweeps.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: PhysicalParams,
    pub derived: DerivedParams,
    pub mean_fields: MeanFields,
    pub drift: DriftMatrix,
    pub tuning: Option<Tuning>,
}

impl Scenario {
    /// Solves for the steady state and builds χ₀; fails with an
    /// unstable-regime error if the selected root is not stable.
    pub fn prepare(params: PhysicalParams, mode: CouplingMode) -> Result<Scenario> {
        let (params, tuning) = match mode {
            CouplingMode::Explicit => (params, None),
            CouplingMode::RedSideband => {
                let t = tune_coupling_frequency(&params)?;
                (params.with_omega_c(t.omega_c), Some(t))
            }
        };
        let derived = derive(&params)?;
        let mut mean_fields = solve_mean_fields(&derived, params.kappa, params.gamma, params.eta)?;
        if let Some(t) = &tuning {
            if t.root_index != mean_fields.selected {
                mean_fields = mean_fields.select(t.root_index)?;
            }
        }
        mean_fields.require_stable()?;
        let metric = derived.single_mode_metric(mean_fields.photon_number());
        if metric > SINGLE_MODE_LIMIT {
            log::warn!(
                "U0|alpha|^2/omega_R = {metric:.3} exceeds {SINGLE_MODE_LIMIT}; the single Bogoliubov mode picture may not hold"
            );
        }
        let drift = build_drift(&derived, &mean_fields, params.kappa, params.gamma)?;
        Ok(Scenario {
            params,
            derived,
            mean_fields,
            drift,
            tuning,
        })
    }

    /// Sideband spectrum over a grid of ω_pc/ω_R.
    pub fn spectrum(&self, grid: &[f64], exec: Execution) -> Result<ResponseSpectrum> {
        sweep_with(&self.drift, grid, self.params.omega_r, exec)
    }

    /// Self-energy diagnostics over a grid of ω/ω_R.
    pub fn diagnostics(&self, grid: &[f64], exec: Execution) -> Result<DiagnosticsSpectrum> {
        diagnostics_sweep(&self.derived, &self.mean_fields, &self.drift, grid, exec)
    }

    /// ζ|α| in units of ω_R.
    pub fn coupling_strength_over_recoil(&self) -> f64 {
        self.derived.coupling * self.mean_fields.alpha.norm() / self.params.omega_r
    }

    pub fn mechanical_freq_over_recoil(&self) -> f64 {
        self.derived.mechanical_freq / self.params.omega_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 3] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
        }
    }

    pub fn recipe(self) -> &'static FigureRecipe {
        match self {
            FigureId::Fig1 => &FIG1,
            FigureId::Fig2 => &FIG2,
            FigureId::Fig3 => &FIG3,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            _ => Err(Error::invalid(
                "figure",
                format!("unknown figure `{s}` (expected fig1, fig2 or fig3)"),
            )),
        }
    }
}

/// What a figure plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    /// Sideband amplitudes against probe detuning.
    Response,
    /// Spectral function and effective damping.
    Diagnostics,
}

/// One curve of a figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSpec {
    pub omega_sw_over_omega_r: f64,
    pub eta_over_kappa: f64,
}

impl CurveSpec {
    pub fn label(&self) -> String {
        format!(
            "sw{}_eta{}",
            self.omega_sw_over_omega_r, self.eta_over_kappa
        )
    }

    /// `base` with this curve's ω_sw and η applied.
    pub fn apply(&self, base: &PhysicalParams) -> PhysicalParams {
        PhysicalParams {
            omega_sw: self.omega_sw_over_omega_r * base.omega_r,
            eta: self.eta_over_kappa * base.kappa,
            ..*base
        }
    }
}

/// Read-only description of a figure dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureRecipe {
    pub id: FigureId,
    pub kind: FigureKind,
    pub curves: &'static [CurveSpec],
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl FigureRecipe {
    pub fn grid(&self) -> Result<Vec<f64>> {
        linspace(self.grid_min, self.grid_max, self.grid_points)
    }
}

const SCATTERING_SET: [CurveSpec; 3] = [
    CurveSpec {
        omega_sw_over_omega_r: 40.0,
        eta_over_kappa: 0.5,
    },
    CurveSpec {
        omega_sw_over_omega_r: 45.0,
        eta_over_kappa: 0.5,
    },
    CurveSpec {
        omega_sw_over_omega_r: 50.0,
        eta_over_kappa: 0.5,
    },
];

const PUMP_SET: [CurveSpec; 3] = [
    CurveSpec {
        omega_sw_over_omega_r: 40.0,
        eta_over_kappa: 2.5,
    },
    CurveSpec {
        omega_sw_over_omega_r: 40.0,
        eta_over_kappa: 0.5,
    },
    CurveSpec {
        omega_sw_over_omega_r: 40.0,
        eta_over_kappa: 7.5,
    },
];

/// Sideband spectra for three s-wave scattering frequencies.
pub const FIG1: FigureRecipe = FigureRecipe {
    id: FigureId::Fig1,
    kind: FigureKind::Response,
    curves: &SCATTERING_SET,
    grid_min: 20.0,
    grid_max: 70.0,
    grid_points: 2001,
};

/// Sideband spectra for three pump rates.
pub const FIG2: FigureRecipe = FigureRecipe {
    id: FigureId::Fig2,
    kind: FigureKind::Response,
    curves: &PUMP_SET,
    grid_min: 0.0,
    grid_max: 140.0,
    grid_points: 2801,
};

/// Spectral function and effective damping for three s-wave scattering
/// frequencies.
pub const FIG3: FigureRecipe = FigureRecipe {
    id: FigureId::Fig3,
    kind: FigureKind::Diagnostics,
    curves: &SCATTERING_SET,
    grid_min: 20.0,
    grid_max: 70.0,
    grid_points: 2001,
};

/// Everything computed for one figure curve.
#[derive(Debug, Clone)]
pub struct CurveResult {
    pub curve: CurveSpec,
    pub scenario: Scenario,
    pub spectrum: ResponseSpectrum,
    pub diagnostics: DiagnosticsSpectrum,
}

/// Tunes, solves and sweeps one curve of a figure.
pub fn run_curve(
    base: &PhysicalParams,
    curve: CurveSpec,
    grid: &[f64],
    exec: Execution,
) -> Result<CurveResult> {
    let scenario = Scenario::prepare(curve.apply(base), CouplingMode::RedSideband)?;
    let spectrum = scenario.spectrum(grid, exec)?;
    let diagnostics = scenario.diagnostics(grid, exec)?;
    Ok(CurveResult {
        curve,
        scenario,
        spectrum,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_match_curve_sets() {
        let sw: Vec<f64> = FIG1
            .curves
            .iter()
            .map(|c| c.omega_sw_over_omega_r)
            .collect();
        assert_eq!(sw, [40.0, 45.0, 50.0]);
        assert!(FIG1.curves.iter().all(|c| c.eta_over_kappa == 0.5));
        let eta: Vec<f64> = FIG2.curves.iter().map(|c| c.eta_over_kappa).collect();
        assert_eq!(eta, [2.5, 0.5, 7.5]);
        assert!(FIG2.curves.iter().all(|c| c.omega_sw_over_omega_r == 40.0));
        assert_eq!(FIG3.curves, FIG1.curves);
        assert_eq!(FIG2.grid().unwrap().len(), 2801);
    }

    #[test]
    fn figure_ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
            assert_eq!(id.recipe().id, id);
        }
        assert!("fig4".parse::<FigureId>().is_err());
    }

    #[test]
    fn reference_scenario_is_tuned_and_stable() {
        let s = Scenario::prepare(PhysicalParams::reference(), CouplingMode::RedSideband).unwrap();
        assert!(s.mean_fields.stable);
        let t = s.tuning.as_ref().unwrap();
        assert_eq!(s.params.omega_c, t.omega_c);
        assert!(
            (s.mean_fields.detuning - s.derived.mechanical_freq).abs()
                < 1e-6 * s.derived.mechanical_freq
        );
        assert!((s.mechanical_freq_over_recoil() - 1536f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn strong_pump_curve_is_unstable() {
        let err = run_curve(
            &PhysicalParams::reference(),
            FIG2.curves[0],
            &[1.0, 2.0],
            Execution::Sequential,
        )
        .unwrap_err();
        assert!(err.is_unstable_regime());
    }
}
