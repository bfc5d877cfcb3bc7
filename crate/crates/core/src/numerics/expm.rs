use num_complex::Complex64 as C64;

use super::matrix::{invert4, ComplexMatrix4};
use super::poly::general_eigenvalues;
use crate::error::{Error, Result};

/// Eigenvector matrices with a condition estimate above this fall back to
/// scaling and squaring.
pub const EIGENVECTOR_CONDITION_LIMIT: f64 = 1e8;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Cached eigendecomposition `M = V diag(λ) V⁻¹`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: [C64; 4],
    pub vectors: ComplexMatrix4,
    pub inverse: ComplexMatrix4,
}

impl Eigendecomposition {
    /// Attempts a well-conditioned decomposition; `None` if the matrix is
    /// defective or close to it.
    pub fn try_new(m: &ComplexMatrix4) -> Option<Self> {
        let scale = m.max_abs();
        if scale == 0.0 {
            return None;
        }
        let values = general_eigenvalues(m);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (values[i] - values[j]).norm() <= 1e-8 * scale {
                    return None;
                }
            }
        }
        let mut vectors = ComplexMatrix4::zero();
        for (k, &lambda) in values.iter().enumerate() {
            let shifted = *m - ComplexMatrix4::identity().scale(lambda);
            let adj = shifted.adjugate();
            let best = (0..4)
                .max_by(|&a, &b| {
                    let na: f64 = adj.column(a).iter().map(|z| z.norm_sqr()).sum();
                    let nb: f64 = adj.column(b).iter().map(|z| z.norm_sqr()).sum();
                    na.total_cmp(&nb)
                })
                .unwrap_or(0);
            let v = adj.column(best);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return None;
            }
            for i in 0..4 {
                vectors.0[i][k] = v[i] / norm;
            }
        }
        let inverse = invert4(&vectors).ok()?;
        if vectors.norm_inf() * inverse.norm_inf() > EIGENVECTOR_CONDITION_LIMIT {
            return None;
        }
        let rebuilt = vectors * ComplexMatrix4::diagonal(values) * inverse;
        if (rebuilt - *m).max_abs() > 1e-10 * scale {
            return None;
        }
        Some(Eigendecomposition {
            values,
            vectors,
            inverse,
        })
    }

    pub fn exp(&self, t: f64) -> ComplexMatrix4 {
        let d = self.values.map(|l| (l * t).exp());
        self.vectors * ComplexMatrix4::diagonal(d) * self.inverse
    }
}

/// Matrix exponential `e^{M t}` for `t ≥ 0`.
///
/// Uses the eigendecomposition when the eigenvector matrix is well
/// conditioned, otherwise degree-13 Padé with scaling and squaring.
pub fn expm(m: &ComplexMatrix4, t: f64) -> Result<ComplexMatrix4> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "time must be finite and non-negative"));
    }
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    if t == 0.0 {
        return Ok(ComplexMatrix4::identity());
    }
    if let Some(eig) = Eigendecomposition::try_new(m) {
        return Ok(eig.exp(t));
    }
    expm_pade(&m.scale_real(t))
}

/// Scaling-and-squaring Padé(13) exponential of `a`.
pub fn expm_pade(a: &ComplexMatrix4) -> Result<ComplexMatrix4> {
    let norm = a.norm_one();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(s));
    let id = ComplexMatrix4::identity();
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;

    let u_inner = a6 * (a6.scale(b(13)) + a4.scale(b(11)) + a2.scale(b(9)))
        + a6.scale(b(7))
        + a4.scale(b(5))
        + a2.scale(b(3))
        + id.scale(b(1));
    let u = a * u_inner;
    let v = a6 * (a6.scale(b(12)) + a4.scale(b(10)) + a2.scale(b(8)))
        + a6.scale(b(6))
        + a4.scale(b(4))
        + a2.scale(b(2))
        + id.scale(b(0));

    let mut r = invert4(&(v - u))? * (v + u);
    for _ in 0..s {
        r = r * r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let m = ComplexMatrix4::diagonal([C64::new(-1.0, 2.0); 4]);
        assert_eq!(expm(&m, 0.0).unwrap(), ComplexMatrix4::identity());
    }

    #[test]
    fn diagonal_is_entrywise() {
        let d = [
            C64::new(-1.0, 2.0),
            C64::new(-1.0, -2.0),
            C64::new(0.5, 0.0),
            C64::new(-3.0, 7.0),
        ];
        let t = 0.7;
        let e = expm(&ComplexMatrix4::diagonal(d), t).unwrap();
        for i in 0..4 {
            assert!((e[(i, i)] - (d[i] * t).exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn jordan_block_uses_pade() {
        // Defective: e^{Jt} = e^{-t} [[1, t], [0, 1]] on the leading block.
        let mut m = ComplexMatrix4::diagonal([C64::new(-1.0, 0.0); 4]);
        m.0[0][1] = C64::new(1.0, 0.0);
        m.0[2][3] = C64::new(1.0, 0.0);
        assert!(Eigendecomposition::try_new(&m).is_none());
        let t = 2.5;
        let e = expm(&m, t).unwrap();
        let et = (-t).exp();
        assert!((e[(0, 0)].re - et).abs() < 1e-14);
        assert!((e[(0, 1)].re - t * et).abs() < 1e-14);
        assert!(e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn pade_agrees_with_eigen_route() {
        let m = ComplexMatrix4([
            [
                C64::new(-0.5, -3.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, -0.4),
                C64::new(0.0, -0.4),
            ],
            [
                C64::new(0.0, 0.0),
                C64::new(-0.5, 3.0),
                C64::new(0.0, 0.4),
                C64::new(0.0, 0.4),
            ],
            [
                C64::new(0.0, -0.4),
                C64::new(0.0, -0.4),
                C64::new(-0.01, -4.0),
                C64::new(0.0, -1.0),
            ],
            [
                C64::new(0.0, 0.4),
                C64::new(0.0, 0.4),
                C64::new(0.0, 1.0),
                C64::new(-0.01, 4.0),
            ],
        ]);
        let t = 3.3;
        let eig = Eigendecomposition::try_new(&m)
            .expect("diagonalizable")
            .exp(t);
        let pade = expm_pade(&m.scale_real(t)).unwrap();
        assert!((eig - pade).max_abs() < 1e-11, "{}", (eig - pade).max_abs());
    }

    #[test]
    fn negative_time_rejected() {
        assert!(expm(&ComplexMatrix4::identity(), -1.0).is_err());
    }
}
