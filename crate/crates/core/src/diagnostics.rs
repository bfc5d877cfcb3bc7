//! Optical self-energy from eliminating the Bogoliubov mode, the spectral
//! function, effective cavity damping, and resonance/anti-resonance
//! extraction from response spectra.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DerivedParams;
use crate::numerics::{find_peaks, parabolic_vertex, trapezoid, Peak};
use crate::parallel::{try_map, Execution};
use crate::response::{check_grid, greens_frequency, DriftMatrix, ResponseSpectrum};
use crate::steady::MeanFields;

const I: C64 = C64::new(0.0, 1.0);

/// `|D(ω)|` below this fraction of `max(γ², ω_m²)` is flagged as near-pole.
pub const NEAR_POLE_FRACTION: f64 = 1e-6;

/// Self-energy and anomalous coupling of the optical mode at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfEnergy {
    pub omega: f64,
    /// Σ_a(ω) (rad/s).
    pub sigma: C64,
    /// λ_a(ω) (rad/s), the δa ↔ δa† mixing induced by the atoms.
    pub lambda: C64,
    /// Bogoliubov response denominator D(ω).
    pub denominator: C64,
    pub near_pole: bool,
}

/// `D(ω) = (γ/2 − iω)² + Ω_c² − ω_sw²/4`.
pub fn bogoliubov_denominator(d: &DerivedParams, gamma: f64, omega: f64) -> C64 {
    let a = C64::new(0.5 * gamma, -omega);
    a * a + d.omega_plus * d.omega_minus
}

/// Eliminates `(δc, δc†)` exactly from the linearised equations.
pub fn self_energy(d: &DerivedParams, mf: &MeanFields, gamma: f64, omega: f64) -> SelfEnergy {
    let denominator = bogoliubov_denominator(d, gamma, omega);
    let k = d.scattering_freq - 2.0 * d.bogoliubov_freq;
    let z2 = d.coupling * d.coupling;
    let sigma = mf.alpha.norm_sqr() * z2 * k / denominator;
    let lambda = -I * mf.alpha * mf.alpha * z2 * k / denominator;
    let scale = gamma.powi(2).max(d.mechanical_freq.powi(2));
    let near_pole = denominator.norm() < NEAR_POLE_FRACTION * scale;
    if near_pole {
        log::warn!("self-energy evaluated near a Bogoliubov pole at omega = {omega:e}");
    }
    SelfEnergy {
        omega,
        sigma,
        lambda,
        denominator,
        near_pole,
    }
}

/// Optical Green's function `G̃_aa†(ω)` from the closed two-mode system in
/// `(δa, δa†)` left after eliminating the atoms.
pub fn reduced_green(
    d: &DerivedParams,
    mf: &MeanFields,
    kappa: f64,
    gamma: f64,
    omega: f64,
) -> Result<C64> {
    let se = self_energy(d, mf, gamma, omega);
    let k = d.scattering_freq - 2.0 * d.bogoliubov_freq;
    let mu = I * mf.alpha.conj() * mf.alpha.conj() * d.coupling * d.coupling * k / se.denominator;
    let drive = C64::new(0.5 * kappa, -omega);
    let a11 = drive + I * (mf.detuning + se.sigma);
    let a22 = drive - I * (mf.detuning + se.sigma);
    let det = a11 * a22 - se.lambda * mu;
    let scale = a11.norm() * a22.norm() + (se.lambda * mu).norm();
    if !(det.norm() > 1e-15 * scale) {
        return Err(Error::Singular { pivot: det.norm() }.at_frequency(omega));
    }
    Ok(-I * a22 / det)
}

/// `𝒜(ω) = −(2/π) Im G̃_aa†(ω)` (units: seconds).
pub fn spectral_function(chi0: &DriftMatrix, omega: f64) -> Result<f64> {
    let g = greens_frequency(chi0, omega)?;
    Ok(-std::f64::consts::FRAC_2_PI * g.aa_dag.im)
}

/// `κ/2 − Im Σ_a`.
pub fn kappa_eff(sigma: C64, kappa: f64) -> f64 {
    0.5 * kappa - sigma.im
}

/// Effective damping at ω = ω_m in closed form, using
/// `D(ω_m) = γ²/4 − iγω_m`.
pub fn kappa_eff_at_mechanical(d: &DerivedParams, mf: &MeanFields, kappa: f64, gamma: f64) -> f64 {
    let wm = d.mechanical_freq;
    let denominator = C64::new(0.25 * gamma * gamma, -gamma * wm);
    let k = d.scattering_freq - 2.0 * d.bogoliubov_freq;
    let sigma = mf.alpha.norm_sqr() * d.coupling * d.coupling * k / denominator;
    kappa_eff(sigma, kappa)
}

/// Integrated spectral weight `∫𝒜 dω` over a grid in rad/s (trapezoidal).
pub fn spectral_weight(chi0: &DriftMatrix, grid: &[f64], exec: Execution) -> Result<f64> {
    check_grid(grid)?;
    let values = try_map(exec, grid, |w| spectral_function(chi0, w))?;
    Ok(trapezoid(grid, &values))
}

/// Self-energy diagnostics over a grid of ω/ω_R.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsSpectrum {
    /// ω/ω_R.
    pub grid: Vec<f64>,
    /// Σ_a (rad/s).
    pub sigma: Vec<C64>,
    /// λ_a (rad/s).
    pub lambda: Vec<C64>,
    /// ω_R·𝒜 (dimensionless).
    pub spectral: Vec<f64>,
    /// κ_eff/κ.
    pub kappa_eff_ratio: Vec<f64>,
    pub omega_r: f64,
    pub kappa: f64,
}

pub fn diagnostics_sweep(
    d: &DerivedParams,
    mf: &MeanFields,
    chi0: &DriftMatrix,
    grid: &[f64],
    exec: Execution,
) -> Result<DiagnosticsSpectrum> {
    check_grid(grid)?;
    let omega_r = d.recoil_freq;
    let kappa = chi0.kappa();
    let gamma = chi0.parts().gamma;
    let points = try_map(exec, grid, |x| {
        let w = x * omega_r;
        let se = self_energy(d, mf, gamma, w);
        let a = spectral_function(chi0, w)?;
        Ok((se, a))
    })?;
    Ok(DiagnosticsSpectrum {
        grid: grid.to_vec(),
        sigma: points.iter().map(|p| p.0.sigma).collect(),
        lambda: points.iter().map(|p| p.0.lambda).collect(),
        spectral: points.iter().map(|p| p.1 * omega_r).collect(),
        kappa_eff_ratio: points
            .iter()
            .map(|p| kappa_eff(p.0.sigma, kappa) / kappa)
            .collect(),
        omega_r,
        kappa,
    })
}

/// Which sideband column of a [`ResponseSpectrum`] to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Channel {
    AntiStokesOptical,
    StokesOptical,
    AntiStokesAtomic,
    StokesAtomic,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::AntiStokesOptical,
        Channel::StokesOptical,
        Channel::AntiStokesAtomic,
        Channel::StokesAtomic,
    ];

    /// Column label used in output files.
    pub fn label(self) -> &'static str {
        match self {
            Channel::AntiStokesOptical => "A_a",
            Channel::StokesOptical => "S_a",
            Channel::AntiStokesAtomic => "A_c",
            Channel::StokesAtomic => "S_c",
        }
    }

    pub fn values(self, spec: &ResponseSpectrum) -> &[f64] {
        match self {
            Channel::AntiStokesOptical => &spec.anti_stokes_optical,
            Channel::StokesOptical => &spec.stokes_optical,
            Channel::AntiStokesAtomic => &spec.anti_stokes_atomic,
            Channel::StokesAtomic => &spec.stokes_atomic,
        }
    }
}

/// Minimum between the two dominant resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntiResonance {
    /// Refined position (grid units).
    pub position: f64,
    /// Lowest sampled value.
    pub value: f64,
    /// `value / highest peak`.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFeatures {
    /// All interior maxima, highest first.
    pub peaks: Vec<Peak>,
    pub anti_resonance: AntiResonance,
    /// Distance between the two highest peaks (grid units).
    pub splitting: f64,
}

/// Locates the resonances and the anti-resonance between the two highest.
pub fn extract_features(spec: &ResponseSpectrum, channel: Channel) -> Result<SpectralFeatures> {
    features_of(&spec.grid, channel.values(spec))
}

/// [`extract_features`] on raw samples.
pub fn features_of(xs: &[f64], ys: &[f64]) -> Result<SpectralFeatures> {
    let peaks = find_peaks(xs, ys)?;
    if peaks.len() < 2 {
        return Err(Error::TooFewPeaks { found: peaks.len() });
    }
    let (lo, hi) = if peaks[0].index < peaks[1].index {
        (peaks[0], peaks[1])
    } else {
        (peaks[1], peaks[0])
    };
    let imin = (lo.index + 1..hi.index)
        .min_by(|&a, &b| ys[a].total_cmp(&ys[b]))
        .unwrap_or(lo.index);
    let position = if imin > lo.index && imin < hi.index {
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        parabolic_vertex(xs, &neg, imin).0
    } else {
        xs[imin]
    };
    let value = ys[imin];
    Ok(SpectralFeatures {
        anti_resonance: AntiResonance {
            position,
            value,
            depth: value / peaks[0].height,
        },
        splitting: hi.position - lo.position,
        peaks,
    })
}
