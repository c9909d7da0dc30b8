//! Dirac-representation matrix algebra on 4-spinors.
//!
//! [`Mat4`] and [`Spinor`] are small `Copy` value types; everything in this
//! module is a pure function of its inputs.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

/// Largest hermiticity defect accepted by [`eigen_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A 4x4 complex matrix acting on Dirac spinors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex; 4]; 4]);

/// A 4-component Dirac spinor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spinor(pub [Complex; 4]);

impl Mat4 {
    pub const fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 4])
    }

    pub fn diag(d: [Complex; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = Complex::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
        }
        Spinor(out)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Mat4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> Complex {
        let m = &self.0;
        let minor = |skip: usize| -> Complex {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let a = |r: usize, c: usize| m[r][cols[c]];
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1))
                - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        (0..4)
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                m[0][c] * minor(c) * sign
            })
            .sum()
    }
}

impl Default for Mat4 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Mul<Spinor> for Mat4 {
    type Output = Spinor;
    fn mul(self, rhs: Spinor) -> Spinor {
        self.apply(&rhs)
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        self + (-rhs)
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.scale_re(-1.0)
    }
}

impl Spinor {
    pub const fn zero() -> Self {
        Spinor([ZERO; 4])
    }

    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        Spinor([a, b, c, d])
    }

    pub fn from_real(v: [f64; 4]) -> Self {
        Spinor(v.map(|x| Complex::new(x, 0.0)))
    }

    pub fn basis(i: usize) -> Self {
        let mut s = Self::zero();
        s.0[i] = ONE;
        s
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Spinor) -> Complex {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex) -> Self {
        Spinor(self.0.map(|z| z * s))
    }

    pub fn conj(&self) -> Self {
        Spinor(self.0.map(|z| z.conj()))
    }

    /// Returns the spinor scaled to unit norm; the zero spinor is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            self.scale(Complex::new(1.0 / n, 0.0))
        }
    }

    /// `<self|m|self>`.
    pub fn expectation(&self, m: &Mat4) -> Complex {
        self.inner(&m.apply(self))
    }

    pub fn max_diff(&self, other: &Spinor) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Spinor {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        &self.0[i]
    }
}

impl IndexMut<usize> for Spinor {
    fn index_mut(&mut self, i: usize) -> &mut Complex {
        &mut self.0[i]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        let mut s = self;
        s += rhs;
        s
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        self + rhs.scale(Complex::new(-1.0, 0.0))
    }
}

/// Pauli matrices (x, y, z).
pub fn pauli() -> [[[Complex; 2]; 2]; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

/// Builds `[[a, b], [c, d]]` from 2x2 blocks.
fn blocks(
    a: [[Complex; 2]; 2],
    b: [[Complex; 2]; 2],
    c: [[Complex; 2]; 2],
    d: [[Complex; 2]; 2],
) -> Mat4 {
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = a[i][j];
            m.0[i][j + 2] = b[i][j];
            m.0[i + 2][j] = c[i][j];
            m.0[i + 2][j + 2] = d[i][j];
        }
    }
    m
}

/// The Dirac matrices `alpha_x, alpha_y, alpha_z` and `beta` in the standard
/// (Dirac) representation.
pub fn dirac_matrices() -> ([Mat4; 3], Mat4) {
    let zero = [[ZERO; 2]; 2];
    let id = [[ONE, ZERO], [ZERO, ONE]];
    let neg_id = [[-ONE, ZERO], [ZERO, -ONE]];
    let alpha = pauli().map(|s| blocks(zero, s, s, zero));
    let beta = blocks(id, zero, zero, neg_id);
    (alpha, beta)
}

pub fn alpha(axis: usize) -> Mat4 {
    dirac_matrices().0[axis]
}

pub fn beta() -> Mat4 {
    dirac_matrices().1
}

/// `ab + ba`.
pub fn anticommutator(a: &Mat4, b: &Mat4) -> Mat4 {
    *a * *b + *b * *a
}

/// `ab - ba`.
pub fn commutator(a: &Mat4, b: &Mat4) -> Mat4 {
    *a * *b - *b * *a
}

/// Largest entrywise modulus of `a - a^dagger`; zero exactly for hermitian `a`.
pub fn hermiticity_defect(a: &Mat4) -> f64 {
    a.max_diff(&a.adjoint())
}

/// Eigen-decomposition of a hermitian 4x4 matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: [f64; 4],
    /// `vectors[k]` belongs to `values[k]`; orthonormal.
    pub vectors: [Spinor; 4],
}

impl HermitianEigen {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex) -> Mat4 {
        let mut m = Mat4::zero();
        for (lambda, v) in self.values.iter().zip(self.vectors.iter()) {
            let w = f(*lambda);
            for i in 0..4 {
                for j in 0..4 {
                    m.0[i][j] += w * v.0[i] * v.0[j].conj();
                }
            }
        }
        m
    }
}

/// Cyclic complex Jacobi diagonalisation.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies a
/// real Givens rotation, so the working matrix stays hermitian throughout.
pub fn eigen_hermitian(a: &Mat4) -> Result<HermitianEigen> {
    let defect = hermiticity_defect(a);
    if defect > HERMITIAN_TOL || !a.is_finite() {
        return Err(Error::NotHermitian { defect });
    }
    // symmetrise so that roundoff-level asymmetry does not leak into the result
    let mut w = (*a + a.adjoint()).scale_re(0.5);
    let mut v = Mat4::identity();
    let scale = w.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w.0[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = w.0[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let tau = (w.0[q][q].re - w.0[p][p].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = D R with D = diag(.., conj(phase) at q, ..)
                let mut g = Mat4::identity();
                g.0[p][p] = Complex::new(c, 0.0);
                g.0[p][q] = Complex::new(s, 0.0);
                g.0[q][p] = phase.conj() * (-s);
                g.0[q][q] = phase.conj() * c;
                w = g.adjoint() * w * g;
                w.0[p][q] = ZERO;
                w.0[q][p] = ZERO;
                v = v * g;
            }
        }
    }

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| w.0[i][i].re.total_cmp(&w.0[j][j].re));
    let values = [0, 1, 2, 3].map(|k| w.0[order[k]][order[k]].re);
    let vectors = [0, 1, 2, 3].map(|k| {
        let col = order[k];
        Spinor([v.0[0][col], v.0[1][col], v.0[2][col], v.0[3][col]])
    });
    Ok(HermitianEigen { values, vectors })
}
