//! Low-degree polynomials: closed-form cubic and quartic roots with Newton
//! polishing, and characteristic polynomials of 4x4 matrices.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::matrix::ComplexMatrix4;
use crate::error::{Error, Result};

/// Relative imaginary part tolerated before a characteristic polynomial is
/// declared non-real.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Roots with `|Im| <= REAL_ROOT_TOL * |root|` are treated as real.
pub const REAL_ROOT_TOL: f64 = 1e-9;

/// Real polynomial of degree at most four, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing zero coefficients are dropped so the leading one is nonzero.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        if coeffs.len() > 5 {
            return Err(Error::InvalidPolynomial(format!(
                "degree {} exceeds 4",
                coeffs.len() - 1
            )));
        }
        Ok(RealPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, x: C64) -> C64 {
        horner(&self.complex_coeffs(), x)
    }

    /// `Σ |c_k| |x|^k`, the natural scale for a relative residual at `x`.
    pub fn magnitude_at(&self, x: C64) -> f64 {
        let r = x.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.abs())
    }

    fn complex_coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect()
    }
}

/// One root of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: C64,
    pub is_real: bool,
}

fn horner(coeffs: &[C64], x: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Newton steps on `coeffs` from `x`, keeping only steps that reduce `|p|`.
fn polish(coeffs: &[C64], mut x: C64, max_steps: usize) -> C64 {
    let (mut px, _) = horner_with_derivative(coeffs, x);
    for _ in 0..max_steps {
        let (p, dp) = horner_with_derivative(coeffs, x);
        if p == C64::new(0.0, 0.0) || dp == C64::new(0.0, 0.0) {
            break;
        }
        let next = x - p / dp;
        let pn = horner(coeffs, next);
        if !(pn.norm() < px.norm()) {
            break;
        }
        x = next;
        px = pn;
    }
    x
}

/// Roots of a real cubic: Cardano / trigonometric closed form followed by a
/// Newton polish of each root on the original polynomial.
pub fn cubic_roots(p: &RealPolynomial) -> Result<[Root; 3]> {
    if p.degree() != 3 {
        return Err(Error::InvalidPolynomial(format!(
            "cubic solver needs degree 3, got {}",
            p.degree()
        )));
    }
    let c = p.coeffs();
    let lead = c[3];
    let (a, b, cc) = (c[2] / lead, c[1] / lead, c[0] / lead);

    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * cc) / 54.0;
    let q3 = q * q * q;

    let raw: [C64; 3] = if r * r < q3 {
        // Three distinct real roots.
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let m = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        [
            C64::new(m * (theta / 3.0).cos() - a / 3.0, 0.0),
            C64::new(m * ((theta + tau) / 3.0).cos() - a / 3.0, 0.0),
            C64::new(m * ((theta - tau) / 3.0).cos() - a / 3.0, 0.0),
        ]
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q3).max(0.0).sqrt()).cbrt();
        let big_b = if big_a == 0.0 { 0.0 } else { q / big_a };
        let re = -0.5 * (big_a + big_b) - a / 3.0;
        let im = 0.5 * 3f64.sqrt() * (big_a - big_b);
        [
            C64::new(big_a + big_b - a / 3.0, 0.0),
            C64::new(re, im),
            C64::new(re, -im),
        ]
    };

    let monic = [
        C64::new(cc, 0.0),
        C64::new(b, 0.0),
        C64::new(a, 0.0),
        C64::new(1.0, 0.0),
    ];
    let mut roots = raw.map(|z| {
        let polished = polish(&monic, z, 4);
        let is_real = polished.im.abs() <= REAL_ROOT_TOL * polished.norm();
        Root {
            value: if is_real {
                C64::new(polished.re, 0.0)
            } else {
                polished
            },
            is_real,
        }
    });
    // Keep complex roots as an exact conjugate pair.
    if !roots[1].is_real && !roots[2].is_real {
        let z = roots[1].value;
        roots[2].value = z.conj();
    }
    Ok(roots)
}

/// Roots of a complex cubic `x³ + a x² + b x + c` by Cardano's formula.
fn complex_cubic_roots(a: C64, b: C64, c: C64) -> [C64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3a = -q / 2.0 + disc;
    let u3b = -q / 2.0 - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let omega = C64::new(-0.5, 0.5 * 3f64.sqrt());
    let shift = a / 3.0;
    if u3.norm() == 0.0 {
        // p == q == 0: triple root.
        return [-shift; 3];
    }
    let u = u3.powf(1.0 / 3.0);
    let mut out = [C64::new(0.0, 0.0); 3];
    let mut uk = u;
    for o in out.iter_mut() {
        *o = uk - p / (3.0 * uk) - shift;
        uk *= omega;
    }
    let monic = [c, b, a, C64::new(1.0, 0.0)];
    out.map(|z| polish(&monic, z, 4))
}

fn quadratic_roots(b: C64, c: C64) -> [C64; 2] {
    // x² + b x + c, cancellation-free form.
    let disc = (b * b - 4.0 * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [C64::new(0.0, 0.0); 2];
    }
    [q, c / q]
}

/// Roots of a complex quartic given ascending coefficients, by Ferrari's
/// method with variable scaling and Newton polishing.
pub(crate) fn quartic_roots(coeffs: [C64; 5]) -> [C64; 4] {
    let lead = coeffs[4];
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();

    // Scale x = s y so the monic coefficients are O(1).
    let s = (0..4)
        .map(|k| monic[k].norm().powf(1.0 / (4 - k) as f64))
        .fold(0.0, f64::max);
    let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
    let scaled: Vec<C64> = (0..5).map(|k| monic[k] / s.powi(4 - k as i32)).collect();
    let (b, c, d, e) = (scaled[3], scaled[2], scaled[1], scaled[0]);

    // Depressed quartic y⁴ + p y² + q y + r via y = x + b/4.
    let b2 = b * b;
    let p = c - 3.0 * b2 / 8.0;
    let q = d - b * c / 2.0 + b2 * b / 8.0;
    let r = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;

    let ys: [C64; 4] = if q.norm() <= 1e-14 * (1.0 + p.norm() + r.norm()) {
        // Biquadratic.
        let [z1, z2] = quadratic_roots(p, r);
        let (s1, s2) = (z1.sqrt(), z2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        // Resolvent cubic 8m³ + 8p m² + (2p² − 8r) m − q² = 0.
        let ms = complex_cubic_roots(p, (2.0 * p * p - 8.0 * r) / 8.0, -q * q / 8.0);
        let m = ms
            .into_iter()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or_default();
        let sq = (2.0 * m).sqrt();
        let t = q / (2.0 * sq);
        let [y1, y2] = quadratic_roots(-sq, p / 2.0 + m + t);
        let [y3, y4] = quadratic_roots(sq, p / 2.0 + m - t);
        [y1, y2, y3, y4]
    };

    ys.map(|y| {
        let x = (y - b / 4.0) * s;
        polish(&monic, x, 6)
    })
}

/// Characteristic polynomial `det(sI − M)` via the Faddeev–LeVerrier
/// recurrence, with complex coefficients (ascending degree).
pub fn char_poly_complex(m: &ComplexMatrix4) -> [C64; 5] {
    let n = 4;
    let mut coeffs = [C64::new(0.0, 0.0); 5];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut mk = ComplexMatrix4::zero();
    for k in 1..=n {
        mk = *m * mk + ComplexMatrix4::identity().scale(coeffs[n - k + 1]);
        coeffs[n - k] = -(*m * mk).trace() / k as f64;
    }
    coeffs
}

/// Real characteristic polynomial of a matrix whose spectrum is closed under
/// conjugation. Rejects matrices whose coefficients carry a relative
/// imaginary part above [`SYMMETRY_TOL`].
pub fn char_poly(m: &ComplexMatrix4) -> Result<RealPolynomial> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    let c = char_poly_complex(m);
    let rho = m.norm_inf().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (k, ck) in c.iter().enumerate() {
        let scale = ck.norm().max(rho.powi(4 - k as i32));
        if scale > 0.0 {
            worst = worst.max(ck.im.abs() / scale);
        }
    }
    if worst > SYMMETRY_TOL {
        return Err(Error::SymmetryViolation {
            relative_imag: worst,
        });
    }
    RealPolynomial::new(c.map(|z| z.re).to_vec())
}

/// Eigenvalues of a 4x4 matrix with a real characteristic polynomial,
/// sorted by real part, largest first.
pub fn quartic_eigenvalues(m: &ComplexMatrix4) -> Result<[C64; 4]> {
    let p = char_poly(m)?;
    let mut full = [C64::new(0.0, 0.0); 5];
    for (k, &c) in p.coeffs().iter().enumerate() {
        full[k] = C64::new(c, 0.0);
    }
    let mut roots = quartic_roots(full);
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(roots)
}

/// Eigenvalues of an arbitrary 4x4 complex matrix (no symmetry assumed).
pub(crate) fn general_eigenvalues(m: &ComplexMatrix4) -> [C64; 4] {
    quartic_roots(char_poly_complex(m))
}
