//! Physical inputs and the effective constants of the single-Bogoliubov-mode
//! Hamiltonian.
//!
//! Every frequency and rate is an angular frequency in rad/s. Reference
//! values quoted in Hz are taken over as rad/s unchanged; every observable
//! computed here depends only on ratios to `omega_r` and `kappa`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Mass of a ⁸⁷Rb atom (kg).
pub const RB87_MASS: f64 = 1.443_160_648e-25;

/// Raw experimental inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Number of condensed atoms.
    pub atom_number: u64,
    /// Bare cavity resonance.
    pub omega0: f64,
    /// Atomic transition.
    pub omega_a: f64,
    /// Coupling (pump) laser.
    pub omega_c: f64,
    /// Vacuum Rabi frequency.
    pub g0: f64,
    /// Recoil frequency.
    pub omega_r: f64,
    /// Cavity decay rate.
    pub kappa: f64,
    /// Bogoliubov-mode damping rate.
    pub gamma: f64,
    /// s-wave scattering frequency.
    pub omega_sw: f64,
    /// Coupling-laser pump rate.
    pub eta: f64,
}

impl PhysicalParams {
    /// Rb-87 in a 178 µm cavity: 5×10⁵ atoms, κ = 10⁵, γ = 10⁻⁴κ, pumped at
    /// η = 0.5κ with ω_sw = 40ω_R. `omega_c` is set to the bare cavity
    /// frequency; use the tuner for the red-detuned operating point.
    pub fn reference() -> Self {
        let kappa = 1e5;
        let omega_r = 23.7e3;
        PhysicalParams {
            atom_number: 500_000,
            omega0: 2.41494e15,
            omega_a: 2.41419e15,
            omega_c: 2.41494e15,
            g0: std::f64::consts::TAU * 14.1e6,
            omega_r,
            kappa,
            gamma: 1e-4 * kappa,
            omega_sw: 40.0 * omega_r,
            eta: 0.5 * kappa,
        }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        PhysicalParams { omega_c, ..self }
    }

    /// Checks the domain invariants, not the dispersive-regime condition
    /// (that is reported separately by [`derive`]).
    pub fn validate(&self) -> Result<()> {
        if self.atom_number < 1 {
            return Err(Error::invalid("atom_number", "must be at least 1"));
        }
        let positive = [
            ("omega0", self.omega0),
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("g0", self.g0),
            ("omega_r", self.omega_r),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        for (name, v) in [("omega_sw", self.omega_sw), ("eta", self.eta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Effective constants of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// ω_c − ω_a.
    pub atomic_detuning: f64,
    /// ω_c − ω₀.
    pub cavity_detuning: f64,
    /// Lattice barrier height per photon, g₀²/Δ_a.
    pub barrier_per_photon: f64,
    /// Stark-shifted detuning −Δ_c + N U₀/2.
    pub shifted_detuning: f64,
    /// Bogoliubov frequency 4ω_R + ω_sw.
    pub bogoliubov_freq: f64,
    /// Ω_c + ω_sw/2.
    pub omega_plus: f64,
    /// Ω_c − ω_sw/2.
    pub omega_minus: f64,
    /// Optomechanical coupling √(2N) U₀/4.
    pub coupling: f64,
    /// Effective mechanical frequency √(Ω⁺Ω⁻).
    pub mechanical_freq: f64,
    pub scattering_freq: f64,
    pub recoil_freq: f64,
    pub atom_number: f64,
}

impl DerivedParams {
    /// Cavity resonance including the dispersive shift of the condensate.
    pub fn shifted_cavity_freq(&self, omega0: f64) -> f64 {
        omega0 + 0.5 * self.atom_number * self.barrier_per_photon
    }

    /// Single-mode validity metric U₀|α|²/ω_R; the Bogoliubov truncation
    /// wants this at or below 10.
    pub fn single_mode_metric(&self, photon_number: f64) -> f64 {
        self.barrier_per_photon * photon_number / self.recoil_freq
    }
}

/// Threshold on [`DerivedParams::single_mode_metric`].
pub const SINGLE_MODE_LIMIT: f64 = 10.0;

/// Derives the effective model constants.
pub fn derive(p: &PhysicalParams) -> Result<DerivedParams> {
    p.validate()?;
    let atomic_detuning = p.omega_c - p.omega_a;
    if atomic_detuning == 0.0 {
        return Err(Error::DispersiveRegime);
    }
    let n = p.atom_number as f64;
    let cavity_detuning = p.omega_c - p.omega0;
    let u0 = p.g0 * p.g0 / atomic_detuning;
    let bogoliubov_freq = 4.0 * p.omega_r + p.omega_sw;
    let omega_plus = bogoliubov_freq + 0.5 * p.omega_sw;
    let omega_minus = bogoliubov_freq - 0.5 * p.omega_sw;
    Ok(DerivedParams {
        atomic_detuning,
        cavity_detuning,
        barrier_per_photon: u0,
        shifted_detuning: -cavity_detuning + 0.5 * n * u0,
        bogoliubov_freq,
        omega_plus,
        omega_minus,
        coupling: (2.0 * n).sqrt() * u0 / 4.0,
        mechanical_freq: mechanical_freq(p.omega_r, p.omega_sw),
        scattering_freq: p.omega_sw,
        recoil_freq: p.omega_r,
        atom_number: n,
    })
}

/// Effective mechanical frequency for a given recoil and scattering
/// frequency.
pub fn mechanical_freq(omega_r: f64, omega_sw: f64) -> f64 {
    let bogoliubov = 4.0 * omega_r + omega_sw;
    ((bogoliubov + 0.5 * omega_sw) * (bogoliubov - 0.5 * omega_sw)).sqrt()
}

/// s-wave scattering frequency 8πħ a_s N / (m_a L w²) from trap geometry.
///
/// `scattering_length` may be zero (no collisions); the other inputs must be
/// strictly positive.
pub fn omega_sw_from_geometry(
    scattering_length: f64,
    atom_number: f64,
    atom_mass: f64,
    cavity_length: f64,
    waist: f64,
) -> Result<f64> {
    if !(scattering_length.is_finite() && scattering_length >= 0.0) {
        return Err(Error::invalid(
            "scattering_length",
            "must be finite and >= 0",
        ));
    }
    for (name, v) in [
        ("atom_number", atom_number),
        ("atom_mass", atom_mass),
        ("cavity_length", cavity_length),
        ("waist", waist),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, "must be finite and > 0"));
        }
    }
    Ok(
        8.0 * std::f64::consts::PI * HBAR * scattering_length * atom_number
            / (atom_mass * cavity_length * waist * waist),
    )
}

/// Pump rate √(2Pκ/ħω_c) of a coupling laser of power `power` (W).
pub fn eta_from_power(power: f64, kappa: f64, omega_c: f64) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::invalid("power", "must be finite and >= 0"));
    }
    for (name, v) in [("kappa", kappa), ("omega_c", omega_c)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, "must be finite and > 0"));
        }
    }
    Ok((2.0 * power * kappa / (HBAR * omega_c)).sqrt())
}
