//! Linearised fluctuation dynamics: drift matrix, susceptibility, retarded
//! Green's functions and Stokes/anti-Stokes sideband spectra.
//!
//! Fluctuations are ordered `(δa, δa†, δc, δc†)`; use the `IDX_*` constants
//! rather than literal indices. Fourier transforms follow
//! `G̃(ω) = ∫ G(τ) e^{iωτ} dτ`, so `d/dt → −iω` and the susceptibility is
//! `χ(ω) = (−iω·1 − χ₀)⁻¹`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DerivedParams;
use crate::numerics::{expm, invert4, ComplexMatrix4};
use crate::parallel::{try_map, Execution};
use crate::steady::MeanFields;

pub const IDX_A: usize = 0;
pub const IDX_A_DAG: usize = 1;
pub const IDX_C: usize = 2;
pub const IDX_C_DAG: usize = 3;

/// Index permutation exchanging each operator with its adjoint.
pub const ADJOINT_PERMUTATION: [usize; 4] = [IDX_A_DAG, IDX_A, IDX_C_DAG, IDX_C];

const I: C64 = C64::new(0.0, 1.0);

/// Scalars that fully determine the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftParts {
    /// Effective cavity detuning Δ.
    pub detuning: f64,
    /// Optical mean field α.
    pub alpha: C64,
    /// Optomechanical coupling ζ.
    pub coupling: f64,
    /// Bogoliubov frequency Ω_c.
    pub bogoliubov_freq: f64,
    /// s-wave scattering frequency ω_sw.
    pub scattering_freq: f64,
    pub kappa: f64,
    pub gamma: f64,
}

/// Generator χ₀ of the linearised fluctuation dynamics `u̇ = χ₀ u + u_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    matrix: ComplexMatrix4,
    parts: DriftParts,
}

impl DriftMatrix {
    /// Assembles χ₀ from its scalar ingredients and checks the adjoint
    /// symmetry `S χ₀* S = χ₀`.
    pub fn from_parts(parts: DriftParts) -> Result<Self> {
        let DriftParts {
            detuning,
            alpha,
            coupling,
            bogoliubov_freq,
            scattering_freq,
            kappa,
            gamma,
        } = parts;
        let g = alpha * coupling;
        let gc = alpha.conj() * coupling;
        let half_sw = 0.5 * scattering_freq;
        let opt = C64::new(-0.5 * kappa, -detuning);
        let atom = C64::new(-0.5 * gamma, -bogoliubov_freq);

        let mut m = ComplexMatrix4::zero();
        m[(IDX_A, IDX_A)] = opt;
        m[(IDX_A, IDX_C)] = -I * g;
        m[(IDX_A, IDX_C_DAG)] = -I * g;

        m[(IDX_A_DAG, IDX_A_DAG)] = opt.conj();
        m[(IDX_A_DAG, IDX_C)] = I * gc;
        m[(IDX_A_DAG, IDX_C_DAG)] = I * gc;

        m[(IDX_C, IDX_A)] = -I * gc;
        m[(IDX_C, IDX_A_DAG)] = -I * g;
        m[(IDX_C, IDX_C)] = atom;
        m[(IDX_C, IDX_C_DAG)] = -I * half_sw;

        m[(IDX_C_DAG, IDX_A)] = I * gc;
        m[(IDX_C_DAG, IDX_A_DAG)] = I * g;
        m[(IDX_C_DAG, IDX_C)] = I * half_sw;
        m[(IDX_C_DAG, IDX_C_DAG)] = atom.conj();

        if !m.is_finite() {
            return Err(Error::invalid("drift", "entries must be finite"));
        }
        let drift = DriftMatrix { matrix: m, parts };
        let deviation = drift.adjoint_deviation();
        if deviation > 1e-14 * m.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::DriftSymmetry { deviation });
        }
        Ok(drift)
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.matrix
    }

    pub fn parts(&self) -> &DriftParts {
        &self.parts
    }

    pub fn kappa(&self) -> f64 {
        self.parts.kappa
    }

    /// `max |S χ₀* S − χ₀|`.
    pub fn adjoint_deviation(&self) -> f64 {
        (self.matrix.conj().permute(ADJOINT_PERMUTATION) - self.matrix).max_abs()
    }
}

/// Builds χ₀ for a mean-field solution, verifying the solution is
/// consistent with the derived constants first.
pub fn build_drift(
    d: &DerivedParams,
    mf: &MeanFields,
    kappa: f64,
    gamma: f64,
) -> Result<DriftMatrix> {
    if mf.kappa != kappa || mf.gamma != gamma {
        return Err(Error::InconsistentMeanField {
            what: "decay rates",
            residual: (mf.kappa - kappa).abs().max((mf.gamma - gamma).abs()),
        });
    }
    mf.check_consistency(d)?;
    DriftMatrix::from_parts(DriftParts {
        detuning: mf.detuning,
        alpha: mf.alpha,
        coupling: d.coupling,
        bogoliubov_freq: d.bogoliubov_freq,
        scattering_freq: d.scattering_freq,
        kappa,
        gamma,
    })
}

/// `χ(ω) = (−iω·1 − χ₀)⁻¹`.
pub fn susceptibility(chi0: &DriftMatrix, omega: f64) -> Result<ComplexMatrix4> {
    let a = ComplexMatrix4::identity().scale(C64::new(0.0, -omega)) - *chi0.matrix();
    invert4(&a).map_err(|e| e.at_frequency(omega))
}

/// The four retarded Green's functions probed by the perturbation, at one
/// frequency (units: seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenSet {
    pub omega: f64,
    pub aa: C64,
    pub aa_dag: C64,
    pub ca: C64,
    pub ca_dag: C64,
}

/// Full Green's-function vectors `(G̃_a†(ω), G̃_a(ω))`, i.e. the responses
/// to sources coupling to δa† and δa respectively.
pub fn greens_vectors(chi0: &DriftMatrix, omega: f64) -> Result<([C64; 4], [C64; 4])> {
    let chi = susceptibility(chi0, omega)?;
    let to_dag = chi.column(IDX_A).map(|z| -I * z);
    let to_a = chi.column(IDX_A_DAG).map(|z| I * z);
    Ok((to_dag, to_a))
}

pub fn greens_frequency(chi0: &DriftMatrix, omega: f64) -> Result<GreenSet> {
    let (to_dag, to_a) = greens_vectors(chi0, omega)?;
    Ok(GreenSet {
        omega,
        aa: to_a[IDX_A],
        aa_dag: to_dag[IDX_A],
        ca: to_a[IDX_C],
        ca_dag: to_dag[IDX_C],
    })
}

/// Causal time-domain Green's vectors `(G_a†(t), G_a(t))`; zero for `t < 0`
/// and evaluated at `0⁺` for `t = 0`.
pub fn greens_time(chi0: &DriftMatrix, t: f64) -> Result<([C64; 4], [C64; 4])> {
    if t < 0.0 {
        return Ok(([C64::new(0.0, 0.0); 4], [C64::new(0.0, 0.0); 4]));
    }
    let e = expm(chi0.matrix(), t)?;
    Ok((
        e.column(IDX_A).map(|z| -I * z),
        e.column(IDX_A_DAG).map(|z| I * z),
    ))
}

/// `G_a†(t)` sampled at `t = k·step`, `k = 0..n`, by repeated application of
/// the one-step propagator.
pub fn greens_time_series(chi0: &DriftMatrix, step: f64, n: usize) -> Result<Vec<[C64; 4]>> {
    let prop = expm(chi0.matrix(), step)?;
    let mut g = greens_time(chi0, 0.0)?.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(g);
    for _ in 0..n {
        g = prop.mul_vec(&g);
        out.push(g);
    }
    Ok(out)
}

/// Normalised sideband amplitudes `ω_R |G̃|` at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sidebands {
    /// `A_a = ω_R |G̃_aa†(ω_pc)|`.
    pub anti_stokes_optical: f64,
    /// `S_a = ω_R |G̃_aa(−ω_pc)|`.
    pub stokes_optical: f64,
    /// `A_c = ω_R |G̃_ca†(ω_pc)|`.
    pub anti_stokes_atomic: f64,
    /// `S_c = ω_R |G̃_ca(−ω_pc)|`.
    pub stokes_atomic: f64,
}

pub fn sideband_amplitudes(chi0: &DriftMatrix, omega_pc: f64, omega_r: f64) -> Result<Sidebands> {
    let plus = greens_frequency(chi0, omega_pc)?;
    let minus = greens_frequency(chi0, -omega_pc)?;
    Ok(Sidebands {
        anti_stokes_optical: omega_r * plus.aa_dag.norm(),
        stokes_optical: omega_r * minus.aa.norm(),
        anti_stokes_atomic: omega_r * plus.ca_dag.norm(),
        stokes_atomic: omega_r * minus.ca.norm(),
    })
}

/// Sideband amplitudes over a probe-detuning grid given in units of ω_R.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseSpectrum {
    /// ω_pc / ω_R.
    pub grid: Vec<f64>,
    pub anti_stokes_optical: Vec<f64>,
    pub stokes_optical: Vec<f64>,
    pub anti_stokes_atomic: Vec<f64>,
    pub stokes_atomic: Vec<f64>,
    pub omega_r: f64,
}

impl ResponseSpectrum {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("grid has non-finite points".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Evaluates [`sideband_amplitudes`] at every grid point (ω_R units).
pub fn sweep(chi0: &DriftMatrix, grid: &[f64], omega_r: f64) -> Result<ResponseSpectrum> {
    sweep_with(chi0, grid, omega_r, Execution::default())
}

pub fn sweep_with(
    chi0: &DriftMatrix,
    grid: &[f64],
    omega_r: f64,
    exec: Execution,
) -> Result<ResponseSpectrum> {
    check_grid(grid)?;
    let points = try_map(exec, grid, |x| {
        let w = x * omega_r;
        sideband_amplitudes(chi0, w, omega_r).map_err(|e| match e {
            Error::AtFrequency { .. } => e,
            other => other.at_frequency(w),
        })
    })?;
    Ok(ResponseSpectrum {
        grid: grid.to_vec(),
        anti_stokes_optical: points.iter().map(|p| p.anti_stokes_optical).collect(),
        stokes_optical: points.iter().map(|p| p.stokes_optical).collect(),
        anti_stokes_atomic: points.iter().map(|p| p.anti_stokes_atomic).collect(),
        stokes_atomic: points.iter().map(|p| p.stokes_atomic).collect(),
        omega_r,
    })
}

/// Three-component field `central e^{−i f₀t} + anti_stokes e^{−i f₊t} +
/// stokes e^{−i f₋t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeResponse {
    pub central: C64,
    pub central_freq: f64,
    pub anti_stokes: C64,
    pub anti_stokes_freq: f64,
    pub stokes: C64,
    pub stokes_freq: f64,
}

impl TimeResponse {
    pub fn evaluate(&self, t: f64) -> C64 {
        let phasor = |f: f64| C64::new(0.0, -f * t).exp();
        self.central * phasor(self.central_freq)
            + self.anti_stokes * phasor(self.anti_stokes_freq)
            + self.stokes * phasor(self.stokes_freq)
    }
}

/// Laboratory-frame optical and atomic responses to a weak probe of
/// complex rate `eta_p` detuned by `omega_pc` from the coupling laser.
pub fn time_response(
    mf: &MeanFields,
    chi0: &DriftMatrix,
    eta_p: C64,
    omega_pc: f64,
    omega_c: f64,
) -> Result<(TimeResponse, TimeResponse)> {
    if eta_p.norm() > 0.1 * mf.eta {
        log::warn!(
            "probe rate |eta_p| = {:.3e} exceeds 10% of the pump rate {:.3e}; linear response may not hold",
            eta_p.norm(),
            mf.eta
        );
    }
    let plus = greens_frequency(chi0, omega_pc)?;
    let minus = greens_frequency(chi0, -omega_pc)?;
    let optical = TimeResponse {
        central: mf.alpha,
        central_freq: omega_c,
        anti_stokes: eta_p.conj() * plus.aa_dag,
        anti_stokes_freq: omega_c + omega_pc,
        stokes: eta_p * minus.aa,
        stokes_freq: omega_c - omega_pc,
    };
    let atomic = TimeResponse {
        central: mf.beta,
        central_freq: 0.0,
        anti_stokes: eta_p.conj() * plus.ca_dag,
        anti_stokes_freq: omega_pc,
        stokes: eta_p * minus.ca,
        stokes_freq: -omega_pc,
    };
    Ok((optical, atomic))
}
