use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Condition-number ceiling above which an inverse is refused.
pub const CONDITION_LIMIT: f64 = 1e14;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[C64; 4]; 4]);

impl ComplexMatrix4 {
    pub const fn zero() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diagonal(d: [C64; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Builds a matrix from rows, rejecting NaN or infinite entries.
    pub fn from_rows(rows: [[C64; 4]; 4]) -> Result<Self> {
        let m = ComplexMatrix4(rows);
        if !m.is_finite() {
            return Err(Error::invalid("matrix", "entries must be finite"));
        }
        Ok(m)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z = z.conj());
        m
    }

    /// Conjugates indices by a permutation: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permute(&self, p: [usize; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[p[i]][p[j]];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn column(&self, j: usize) -> [C64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    /// `max |(self * other - I)_ij|`.
    pub fn identity_residual(&self, other: &Self) -> f64 {
        (*self * *other - Self::identity()).max_abs()
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> C64 {
        (0..4)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                self.0[0][j] * self.minor(0, j) * sign
            })
            .sum()
    }

    /// Determinant of the 3x3 submatrix with `row` and `col` removed.
    pub fn minor(&self, row: usize, col: usize) -> C64 {
        let mut sub = [[ZERO; 3]; 3];
        let mut si = 0;
        for i in (0..4).filter(|&i| i != row) {
            let mut sj = 0;
            for j in (0..4).filter(|&j| j != col) {
                sub[si][sj] = self.0[i][j];
                sj += 1;
            }
            si += 1;
        }
        sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
            - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
            + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
    }

    /// Classical adjugate (transpose of the cofactor matrix).
    pub fn adjugate(&self) -> Self {
        let mut adj = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                adj.0[j][i] = self.minor(i, j) * sign;
            }
        }
        adj
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for ComplexMatrix4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Inverts a 4x4 complex matrix by LU factorisation with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot vanishes and with
/// [`Error::IllConditioned`] when `‖M‖∞·‖M⁻¹‖∞` exceeds [`CONDITION_LIMIT`].
pub fn invert4(m: &ComplexMatrix4) -> Result<ComplexMatrix4> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular { pivot: 0.0 });
    }

    let mut lu = m.0;
    let mut perm = [0usize, 1, 2, 3];
    let mut min_pivot = f64::INFINITY;
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&a, &b| lu[a][k].norm().total_cmp(&lu[b][k].norm()))
            .unwrap_or(k);
        let pivot_mag = lu[p][k].norm();
        min_pivot = min_pivot.min(pivot_mag);
        if pivot_mag <= f64::EPSILON * scale * 1e-3 || pivot_mag == 0.0 {
            return Err(Error::Singular { pivot: pivot_mag });
        }
        if p != k {
            lu.swap(p, k);
            perm.swap(p, k);
        }
        let inv_pivot = lu[k][k].inv();
        for i in (k + 1)..4 {
            let f = lu[i][k] * inv_pivot;
            lu[i][k] = f;
            for j in (k + 1)..4 {
                let u = lu[k][j];
                lu[i][j] -= f * u;
            }
        }
    }

    // Solve L U x = P e_j for each unit vector.
    let mut inv = ComplexMatrix4::zero();
    for col in 0..4 {
        let mut x = [ZERO; 4];
        for i in 0..4 {
            let mut s = if perm[i] == col { ONE } else { ZERO };
            for k in 0..i {
                s -= lu[i][k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..4).rev() {
            let mut s = x[i];
            for k in (i + 1)..4 {
                s -= lu[i][k] * x[k];
            }
            x[i] = s / lu[i][i];
        }
        for i in 0..4 {
            inv.0[i][col] = x[i];
        }
    }

    let estimate = m.norm_inf() * inv.norm_inf();
    if !estimate.is_finite() || estimate > CONDITION_LIMIT {
        if !estimate.is_finite() {
            return Err(Error::Singular { pivot: min_pivot });
        }
        return Err(Error::IllConditioned {
            estimate,
            threshold: CONDITION_LIMIT,
        });
    }
    Ok(inv)
}
