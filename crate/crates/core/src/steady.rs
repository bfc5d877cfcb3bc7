//! Self-consistent mean fields, the red-detuned operating point and
//! dynamical stability.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result, TuneCandidateSummary};
use crate::model::{derive, DerivedParams, PhysicalParams};
use crate::numerics::{char_poly, cubic_roots, quartic_eigenvalues, RealPolynomial};
use crate::response::{DriftMatrix, DriftParts};

/// Roots with `|Re λ| ≤ MARGINAL_FRACTION·κ` count as unstable.
pub const MARGINAL_FRACTION: f64 = 1e-9;

/// Hurwitz/eigenvalue disagreement is tolerated only within this fraction
/// of κ of the stability boundary.
pub const MISMATCH_FRACTION: f64 = 1e-8;

/// Candidate coupling frequencies further than this from ω₀ (rad/s) are
/// discarded by the tuner.
pub const TUNING_WINDOW: f64 = 1e13;

/// Post-hoc tolerance on `|Δ − ω_m| / ω_m` for a tuned operating point.
pub const TUNING_TOLERANCE: f64 = 1e-6;

/// One real root of the mean-field cubic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldRoot {
    pub detuning: f64,
    pub alpha: C64,
    pub beta: C64,
    pub stable: bool,
    /// `−max Re λ(χ₀)` in rad/s; positive when stable.
    pub margin: f64,
}

/// Steady-state amplitudes for one operating point.
///
/// `alpha`, `beta` and `detuning` mirror the selected entry of `all_roots`.
/// When no root is stable the least unstable one is selected and `stable`
/// is false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFields {
    pub alpha: C64,
    pub beta: C64,
    pub detuning: f64,
    pub eta: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Real roots in ascending order of Δ.
    pub all_roots: Vec<MeanFieldRoot>,
    pub selected: usize,
    pub stable: bool,
    pub margin: f64,
}

impl MeanFields {
    /// Intracavity photon number |α|².
    pub fn photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn real_root_count(&self) -> usize {
        self.all_roots.len()
    }

    /// Same solution set with a different root selected.
    pub fn select(&self, index: usize) -> Result<MeanFields> {
        let r = self
            .all_roots
            .get(index)
            .ok_or_else(|| Error::invalid("root index", format!("{index} is out of range")))?;
        Ok(MeanFields {
            alpha: r.alpha,
            beta: r.beta,
            detuning: r.detuning,
            selected: index,
            stable: r.stable,
            margin: r.margin,
            ..self.clone()
        })
    }

    /// Index of the real root closest to `target`.
    pub fn nearest_root(&self, target: f64) -> usize {
        self.all_roots
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.detuning - target)
                    .abs()
                    .total_cmp(&(b.1.detuning - target).abs())
            })
            .map_or(0, |(i, _)| i)
    }

    /// Errors with [`Error::Unstable`] unless the selected root is stable.
    pub fn require_stable(&self) -> Result<&Self> {
        if self.stable {
            Ok(self)
        } else {
            Err(Error::Unstable {
                max_real_part: -self.margin,
            })
        }
    }

    /// Verifies the defining relations for α, β and the closure of Δ.
    pub fn check_consistency(&self, d: &DerivedParams) -> Result<()> {
        let (alpha, beta) = fields_at(d, self.kappa, self.gamma, self.eta, self.detuning);
        let alpha_res = (self.alpha - alpha).norm();
        if alpha_res > 1e-12 * alpha.norm() {
            return Err(Error::InconsistentMeanField {
                what: "optical amplitude",
                residual: alpha_res,
            });
        }
        let beta_res = (self.beta - beta).norm();
        if beta_res > 1e-12 * beta.norm() {
            return Err(Error::InconsistentMeanField {
                what: "atomic amplitude",
                residual: beta_res,
            });
        }
        let closure = self.detuning - d.shifted_detuning - 2.0 * d.coupling * self.beta.re;
        let scale = self
            .detuning
            .abs()
            .max(d.shifted_detuning.abs())
            .max(self.kappa);
        if closure.abs() > 1e-10 * scale {
            return Err(Error::InconsistentMeanField {
                what: "detuning closure",
                residual: closure.abs(),
            });
        }
        Ok(())
    }
}

fn bogoliubov_denominator(d: &DerivedParams, gamma: f64) -> f64 {
    d.omega_plus * d.omega_minus + 0.25 * gamma * gamma
}

/// `(α, β)` for a given effective detuning.
pub fn fields_at(d: &DerivedParams, kappa: f64, gamma: f64, eta: f64, detuning: f64) -> (C64, C64) {
    let alpha = -C64::new(eta, 0.0) / C64::new(0.5 * kappa, detuning);
    let beta = -d.coupling * alpha.norm_sqr() * C64::new(d.omega_minus, 0.5 * gamma)
        / bogoliubov_denominator(d, gamma);
    (alpha, beta)
}

fn check_rates(kappa: f64, gamma: f64, eta: f64) -> Result<()> {
    for (name, v) in [("kappa", kappa), ("gamma", gamma)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(
                name,
                format!("must be finite and > 0, got {v}"),
            ));
        }
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::invalid(
            "eta",
            format!("must be finite and >= 0, got {eta}"),
        ));
    }
    Ok(())
}

/// The cubic `(Δ − δ_c)(Δ² + κ²/4) + K` whose real roots are the
/// admissible effective detunings.
pub fn detuning_polynomial(
    d: &DerivedParams,
    kappa: f64,
    gamma: f64,
    eta: f64,
) -> Result<RealPolynomial> {
    let k = 2.0 * d.coupling * d.coupling * eta * eta * d.omega_minus
        / bogoliubov_denominator(d, gamma);
    let q = 0.25 * kappa * kappa;
    let dc = d.shifted_detuning;
    RealPolynomial::new(vec![k - dc * q, q, -dc, 1.0])
}

/// Solves the mean-field equations exactly through the detuning cubic and
/// classifies every real root by stability.
pub fn solve_mean_fields(
    d: &DerivedParams,
    kappa: f64,
    gamma: f64,
    eta: f64,
) -> Result<MeanFields> {
    check_rates(kappa, gamma, eta)?;
    let poly = detuning_polynomial(d, kappa, gamma, eta)?;
    let mut detunings: Vec<f64> = cubic_roots(&poly)?
        .iter()
        .filter(|r| r.is_real)
        .map(|r| r.value.re)
        .collect();
    if detunings.is_empty() {
        // Odd degree guarantees a real root; fall back to the root with the
        // smallest imaginary part if the flagging tolerance missed it.
        let roots = cubic_roots(&poly)?;
        let best = roots
            .iter()
            .min_by(|a, b| a.value.im.abs().total_cmp(&b.value.im.abs()))
            .expect("cubic has three roots");
        detunings.push(best.value.re);
    }
    detunings.sort_by(f64::total_cmp);

    let mut all_roots = Vec::with_capacity(detunings.len());
    for detuning in detunings {
        let (alpha, beta) = fields_at(d, kappa, gamma, eta, detuning);
        let chi0 = DriftMatrix::from_parts(DriftParts {
            detuning,
            alpha,
            coupling: d.coupling,
            bogoliubov_freq: d.bogoliubov_freq,
            scattering_freq: d.scattering_freq,
            kappa,
            gamma,
        })?;
        let verdict = is_stable(&chi0)?;
        all_roots.push(MeanFieldRoot {
            detuning,
            alpha,
            beta,
            stable: verdict.stable,
            margin: verdict.margin,
        });
    }

    let stable: Vec<usize> = (0..all_roots.len())
        .filter(|&i| all_roots[i].stable)
        .collect();
    let selected = match stable.len() {
        0 => (0..all_roots.len())
            .max_by(|&a, &b| all_roots[a].margin.total_cmp(&all_roots[b].margin))
            .unwrap_or(0),
        1 => stable[0],
        _ => {
            log::warn!(
                "{} stable mean-field roots; keeping the one closest to the bare detuning",
                stable.len()
            );
            let dc = d.shifted_detuning;
            stable
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    (all_roots[a].detuning - dc)
                        .abs()
                        .total_cmp(&(all_roots[b].detuning - dc).abs())
                })
                .unwrap_or(stable[0])
        }
    };
    let r = all_roots[selected];
    Ok(MeanFields {
        alpha: r.alpha,
        beta: r.beta,
        detuning: r.detuning,
        eta,
        kappa,
        gamma,
        all_roots,
        selected,
        stable: r.stable,
        margin: r.margin,
    })
}

/// Outcome of the stability analysis of one drift matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// `−max Re λ(χ₀)` (rad/s).
    pub margin: f64,
    pub hurwitz_stable: bool,
    pub eigen_stable: bool,
    /// Eigenvalues of χ₀, largest real part first.
    pub eigenvalues: [C64; 4],
    /// Coefficients `a₀..a₄` of `det(sI − χ₀)`.
    pub char_poly: [f64; 5],
}

/// Routh–Hurwitz test on a monic-normalised quartic: true when every root
/// lies strictly in the open left half-plane.
pub fn routh_hurwitz(p: &RealPolynomial) -> bool {
    if p.degree() != 4 {
        return false;
    }
    let c = p.coeffs();
    let lead = c[4];
    let (a3, a2, a1, a0) = (c[3] / lead, c[2] / lead, c[1] / lead, c[0] / lead);
    if !(a3 > 0.0 && a2 > 0.0 && a1 > 0.0 && a0 > 0.0) {
        return false;
    }
    let h2 = a3 * a2 - a1;
    let h3 = a1 * h2 - a3 * a3 * a0;
    h2 > 0.0 && h3 > 0.0
}

/// Stability verdict for χ₀ by Routh–Hurwitz, cross-checked against the
/// eigenvalues. Near-marginal systems (`|max Re λ| ≤ 1e−9 κ`) are unstable.
pub fn is_stable(chi0: &DriftMatrix) -> Result<StabilityVerdict> {
    let poly = char_poly(chi0.matrix())?;
    let eigenvalues = quartic_eigenvalues(chi0.matrix())?;
    let margin = -eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let kappa = chi0.kappa();
    let eigen_stable = margin > MARGINAL_FRACTION * kappa;
    let hurwitz_stable = routh_hurwitz(&poly);
    if hurwitz_stable != eigen_stable && margin.abs() > MISMATCH_FRACTION * kappa {
        return Err(Error::StabilityMismatch {
            hurwitz: hurwitz_stable,
            eigen: eigen_stable,
            margin,
        });
    }
    let mut coeffs = [0.0; 5];
    coeffs[..poly.coeffs().len()].copy_from_slice(poly.coeffs());
    Ok(StabilityVerdict {
        stable: eigen_stable && hurwitz_stable,
        margin,
        hurwitz_stable,
        eigen_stable,
        eigenvalues,
        char_poly: coeffs,
    })
}

/// Result of tuning the coupling laser to `Δ = ω_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tuning {
    /// Tuned coupling-laser frequency (rad/s).
    pub omega_c: f64,
    /// Achieved effective detuning Δ.
    pub detuning: f64,
    pub mechanical_freq: f64,
    /// `|Δ − ω_m|` at the returned frequency.
    pub residual: f64,
    /// Dressed cavity resonance ω₀ + N U₀/2 at the returned frequency.
    pub shifted_cavity_freq: f64,
    /// `ω̃₀ − ω_m`, the tuning that ignores the mean-field shift.
    pub naive_omega_c: f64,
    /// `omega_c − naive_omega_c`.
    pub naive_discrepancy: f64,
    /// Index of the stable Δ ≈ ω_m root in the mean-field solution.
    pub root_index: usize,
    pub candidates: Vec<TuneCandidateSummary>,
}

/// Coefficients of the tuning cubic in `x = ω_c − ω_a`.
pub fn tuning_polynomial(p: &PhysicalParams) -> Result<RealPolynomial> {
    let d = derive_at(p, p.omega0)?;
    let n = d.atom_number;
    let wm = d.mechanical_freq;
    let g2 = p.g0 * p.g0;
    let photons = p.eta * p.eta / (wm * wm + 0.25 * p.kappa * p.kappa);
    let c =
        2.0 * (n * g2 * g2 / 8.0) * photons * d.omega_minus / bogoliubov_denominator(&d, p.gamma);
    RealPolynomial::new(vec![c, -0.5 * n * g2, wm - (p.omega0 - p.omega_a), 1.0])
}

fn derive_at(p: &PhysicalParams, omega_c: f64) -> Result<DerivedParams> {
    derive(&p.with_omega_c(omega_c))
}

struct Probe {
    mf: MeanFields,
    index: usize,
}

impl Probe {
    fn root(&self) -> &MeanFieldRoot {
        &self.mf.all_roots[self.index]
    }
}

fn probe(p: &PhysicalParams, omega_c: f64) -> Result<Probe> {
    let d = derive_at(p, omega_c)?;
    let mf = solve_mean_fields(&d, p.kappa, p.gamma, p.eta)?;
    let index = mf.nearest_root(d.mechanical_freq);
    Ok(Probe { mf, index })
}

/// Finds the coupling frequency at which the stable mean-field detuning
/// equals the effective mechanical frequency.
pub fn tune_coupling_frequency(p: &PhysicalParams) -> Result<Tuning> {
    p.with_omega_c(p.omega0).validate()?;
    let wm = crate::model::mechanical_freq(p.omega_r, p.omega_sw);
    let poly = tuning_polynomial(p)?;
    let roots = cubic_roots(&poly)?;

    let mut candidates = Vec::new();
    let mut stable_freqs = Vec::new();
    for root in roots.iter().filter(|r| r.is_real) {
        let omega_c = p.omega_a + root.value.re;
        if !(omega_c > 0.0) || (omega_c - p.omega0).abs() > TUNING_WINDOW {
            continue;
        }
        match probe(p, omega_c) {
            Ok(pr) => {
                let r = pr.root();
                let close = (r.detuning - wm).abs() <= 1e-3 * wm;
                candidates.push(TuneCandidateSummary {
                    omega_c,
                    detuning: Some(r.detuning),
                    stable: r.stable && close,
                    margin: Some(r.margin),
                });
                if r.stable && close {
                    stable_freqs.push(omega_c);
                }
            }
            Err(e) => {
                log::debug!("tuning candidate {omega_c:e} rejected: {e}");
                candidates.push(TuneCandidateSummary {
                    omega_c,
                    detuning: None,
                    stable: false,
                    margin: None,
                });
            }
        }
    }

    let start = match stable_freqs.len() {
        0 => return Err(Error::NoStableRoot { candidates }),
        1 => stable_freqs[0],
        _ => return Err(Error::AmbiguousBranch { candidates }),
    };

    let (omega_c, best) = refine(p, start, wm)?;
    let residual = (best.root().detuning - wm).abs();
    if residual > TUNING_TOLERANCE * wm {
        return Err(Error::TuningFailed { residual });
    }
    if !best.root().stable {
        return Err(Error::NoStableRoot { candidates });
    }
    let d = derive_at(p, omega_c)?;
    let shifted = d.shifted_cavity_freq(p.omega0);
    Ok(Tuning {
        omega_c,
        detuning: best.root().detuning,
        mechanical_freq: wm,
        residual,
        shifted_cavity_freq: shifted,
        naive_omega_c: shifted - wm,
        naive_discrepancy: omega_c - (shifted - wm),
        root_index: best.index,
        candidates,
    })
}

/// Secant iteration on `Δ(ω_c) − ω_m`, re-solving the mean fields at each
/// iterate and keeping the best point seen.
fn refine(p: &PhysicalParams, start: f64, wm: f64) -> Result<(f64, Probe)> {
    let mut x0 = start;
    let mut p0 = probe(p, x0)?;
    let mut f0 = p0.root().detuning - wm;
    // dΔ/dω_c ≈ −1, so this first step is close to Newton.
    let mut x1 = x0 + f0;
    let mut best = (x0, f0.abs());
    let mut best_probe = None;
    for _ in 0..30 {
        if x1 == x0 || best.1 <= 1e-9 * wm {
            break;
        }
        let p1 = match probe(p, x1) {
            Ok(v) => v,
            Err(_) => break,
        };
        let f1 = p1.root().detuning - wm;
        if f1.abs() < best.1 {
            best = (x1, f1.abs());
            best_probe = Some(p1);
        } else {
            p0 = p1;
        }
        let slope = (f1 - f0) / (x1 - x0);
        let next = if slope.is_finite() && slope != 0.0 {
            x1 - f1 / slope
        } else {
            x1 + f1
        };
        x0 = x1;
        f0 = f1;
        x1 = next;
    }
    let chosen = match best_probe {
        Some(pr) => pr,
        None if best.0 == start => probe(p, start)?,
        None => p0,
    };
    Ok((best.0, chosen))
}
