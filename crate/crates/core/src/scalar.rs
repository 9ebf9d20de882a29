//! Scalar abstraction shared by every numerical routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating point type the solver can be instantiated with.
///
/// Implemented for `f32` and `f64`. All constants inside the crate are
/// produced through [`Real::lit`], so any other type satisfying the bounds
/// (a double-double or fixed-precision wrapper, say) can be plugged in.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default relative tolerance for algebraic residual checks.
    ///
    /// `1e-10` in double precision, a few hundred ulps otherwise.
    fn residual_tolerance() -> Self {
        let floor = Self::lit(1e-10);
        let scaled = Self::epsilon() * Self::lit(1e3);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point in physical space. Two-dimensional meshes leave the last entry at zero.
pub type Point<T> = [T; 3];

/// Dense 3x3 matrix stored row-major; 2D code uses the leading 2x2 block.
pub type Mat3<T> = [[T; 3]; 3];

#[inline]
pub(crate) fn zero3<T: Real>() -> [T; 3] {
    [T::zero(); 3]
}

#[inline]
pub(crate) fn zero33<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T; 3], b: &[T; 3], d: usize) -> T {
    let mut s = T::zero();
    for i in 0..d {
        s += a[i] * b[i];
    }
    s
}

/// `m^T v` restricted to the leading `d` block.
#[inline]
pub(crate) fn mat_t_vec<T: Real>(m: &Mat3<T>, v: &[T; 3], d: usize) -> [T; 3] {
    let mut out = zero3();
    for i in 0..d {
        for k in 0..d {
            out[i] += m[k][i] * v[k];
        }
    }
    out
}

/// `a^T h a` restricted to the leading `d` block.
#[inline]
pub(crate) fn congruence<T: Real>(a: &Mat3<T>, h: &Mat3<T>, d: usize) -> Mat3<T> {
    let mut tmp = zero33();
    for i in 0..d {
        for j in 0..d {
            let mut s = T::zero();
            for k in 0..d {
                s += h[i][k] * a[k][j];
            }
            tmp[i][j] = s;
        }
    }
    let mut out = zero33();
    for i in 0..d {
        for j in 0..d {
            let mut s = T::zero();
            for k in 0..d {
                s += a[k][i] * tmp[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub(crate) fn determinant<T: Real>(m: &Mat3<T>, d: usize) -> T {
    match d {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Inverse of the leading `d x d` block via the adjugate.
pub(crate) fn inverse<T: Real>(m: &Mat3<T>, d: usize) -> Mat3<T> {
    let det = determinant(m, d);
    let mut inv = zero33();
    match d {
        1 => inv[0][0] = T::one() / det,
        2 => {
            inv[0][0] = m[1][1] / det;
            inv[0][1] = -m[0][1] / det;
            inv[1][0] = -m[1][0] / det;
            inv[1][1] = m[0][0] / det;
        }
        _ => {
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
                }
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m: Mat3<f64> = [[2.0, 1.0, 0.5], [0.3, 3.0, -1.0], [1.0, 0.0, 4.0]];
        let inv = inverse(&m, 3);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-14);
            }
        }
        let inv2 = inverse(&m, 2);
        let det2 = determinant(&m, 2);
        assert!((det2 - 5.7).abs() < 1e-14);
        assert!((inv2[0][0] - 3.0 / 5.7).abs() < 1e-14);
    }

    #[test]
    fn residual_tolerance_depends_on_precision() {
        assert_eq!(f64::residual_tolerance(), 1e-10);
        assert!(f32::residual_tolerance() > 1e-5);
    }
}
