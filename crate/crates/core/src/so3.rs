//! Rotation algebra on rotation vectors and unit quaternions.
//!
//! Rotations are stored as unit quaternions; 3x3 matrices are produced on
//! demand. All maps switch to second-order series expansions below
//! [`EPS_PSI`] so that values and derivatives stay finite at the identity.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Angle (rad) below which exponential, logarithm and tangent maps use
/// their series expansions.
pub const EPS_PSI: f64 = 1e-4;

/// Vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector3<T>(pub [T; 3]);

/// 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix3<T>(pub [[T; 3]; 3]);

/// Unit quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vector3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    #[inline]
    pub fn zeros() -> Self {
        Self([T::zero(); 3])
    }

    /// Unit vector along axis `i` (0, 1 or 2).
    #[inline]
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zeros();
        v.0[i] = T::one();
        v
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn cross(&self, o: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Self([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// Componentwise product, used for diagonal operators.
    #[inline]
    pub fn component_mul(&self, o: &Self) -> Self {
        Self([self.0[0] * o.0[0], self.0[1] * o.0[1], self.0[2] * o.0[2]])
    }

    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.re().abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Vector3<f64> {
    /// Converts constant data into another scalar type.
    #[inline]
    pub fn lift<U: Real>(&self) -> Vector3<U> {
        Vector3([U::from_f64(self.0[0]), U::from_f64(self.0[1]), U::from_f64(self.0[2])])
    }
}

impl<T: Real> Vector3<T> {
    /// Drops derivative information.
    #[inline]
    pub fn re(&self) -> Vector3<f64> {
        Vector3([self.0[0].re(), self.0[1].re(), self.0[2].re()])
    }
}

impl<T: Real> Default for Vector3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T> Index<usize> for Vector3<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector3<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vector3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> AddAssign for Vector3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vector3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> SubAssign for Vector3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vector3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T: Real> Mul<T> for Vector3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Matrix3<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_diagonal(d: &Vector3<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    #[inline]
    pub fn mul_vec(&self, v: &Vector3<T>) -> Vector3<T> {
        let m = &self.0;
        Vector3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ])
    }

    /// `selfᵀ · v` without forming the transpose.
    #[inline]
    pub fn tr_mul_vec(&self, v: &Vector3<T>) -> Vector3<T> {
        let m = &self.0;
        Vector3([
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ])
    }

    pub fn scale(&self, s: T) -> Self {
        let mut r = *self;
        for row in r.0.iter_mut() {
            for c in row.iter_mut() {
                *c = *c * s;
            }
        }
        r
    }

    /// Axial vector of the skew-symmetric part (inverse of [`skew`]).
    pub fn vee(&self) -> Vector3<T> {
        let m = &self.0;
        let half = T::from_f64(0.5);
        Vector3([
            (m[2][1] - m[1][2]) * half,
            (m[0][2] - m[2][0]) * half,
            (m[1][0] - m[0][1]) * half,
        ])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.re().abs()).fold(0.0, f64::max)
    }
}

impl Matrix3<f64> {
    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

impl<T: Real> Add for Matrix3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        r
    }
}

impl<T: Real> Sub for Matrix3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        r
    }
}

impl<T: Real> Mul for Matrix3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] =
                    self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        r
    }
}

impl<T: Real> Mul<Vector3<T>> for Matrix3<T> {
    type Output = Vector3<T>;
    fn mul(self, v: Vector3<T>) -> Vector3<T> {
        self.mul_vec(&v)
    }
}

/// Skew-symmetric matrix with `skew(v) · b = v × b`.
pub fn skew<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    let z = T::zero();
    Matrix3([[z, -v[2], v[1]], [v[2], z, -v[0]], [-v[1], v[0], z]])
}

impl<T: Real> UnitQuaternion<T> {
    pub fn identity() -> Self {
        Self { w: T::one(), x: T::zero(), y: T::zero(), z: T::zero() }
    }

    /// Builds from raw components without normalizing.
    #[inline]
    pub fn from_parts(w: T, v: Vector3<T>) -> Self {
        Self { w, x: v[0], y: v[1], z: v[2] }
    }

    #[inline]
    pub fn vector(&self) -> Vector3<T> {
        Vector3([self.x, self.y, self.z])
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm_squared().sqrt();
        Self { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    #[inline]
    pub fn inverse(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn from_rotvec(psi: &Vector3<T>) -> Self {
        exp_rotvec(psi)
    }

    pub fn to_rotvec(&self) -> Vector3<T> {
        log_rotation(self)
    }

    /// Rotates `v`.
    #[inline]
    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        // v + 2w (u × v) + 2 u × (u × v)
        let u = self.vector();
        let two = T::from_f64(2.0);
        let t = u.cross(v) * two;
        *v + t * self.w + u.cross(&t)
    }

    /// Applies the inverse rotation to `v`.
    #[inline]
    pub fn rotate_inverse(&self, v: &Vector3<T>) -> Vector3<T> {
        self.inverse().rotate(v)
    }

    pub fn matrix(&self) -> Matrix3<T> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let one = T::one();
        let two = T::from_f64(2.0);
        Matrix3([
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ])
    }

    /// Group product, re-normalized once drift exceeds a few ulps.
    pub fn compose(&self, other: &Self) -> Self {
        let p = *self * *other;
        if (p.norm_squared().re() - 1.0).abs() > 4.0 * f64::EPSILON {
            p.normalize()
        } else {
            p
        }
    }
}

impl UnitQuaternion<f64> {
    pub fn lift<U: Real>(&self) -> UnitQuaternion<U> {
        UnitQuaternion {
            w: U::from_f64(self.w),
            x: U::from_f64(self.x),
            y: U::from_f64(self.y),
            z: U::from_f64(self.z),
        }
    }

    /// Converts an orthogonal matrix with unit determinant (Shepperd's method).
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let a = &m.0;
        let tr = a[0][0] + a[1][1] + a[2][2];
        let q = if tr >= a[0][0] && tr >= a[1][1] && tr >= a[2][2] {
            let s = 2.0 * (1.0 + tr).sqrt();
            Self {
                w: 0.25 * s,
                x: (a[2][1] - a[1][2]) / s,
                y: (a[0][2] - a[2][0]) / s,
                z: (a[1][0] - a[0][1]) / s,
            }
        } else if a[0][0] >= a[1][1] && a[0][0] >= a[2][2] {
            let s = 2.0 * (1.0 + a[0][0] - a[1][1] - a[2][2]).sqrt();
            Self {
                w: (a[2][1] - a[1][2]) / s,
                x: 0.25 * s,
                y: (a[0][1] + a[1][0]) / s,
                z: (a[0][2] + a[2][0]) / s,
            }
        } else if a[1][1] >= a[2][2] {
            let s = 2.0 * (1.0 + a[1][1] - a[0][0] - a[2][2]).sqrt();
            Self {
                w: (a[0][2] - a[2][0]) / s,
                x: (a[0][1] + a[1][0]) / s,
                y: 0.25 * s,
                z: (a[1][2] + a[2][1]) / s,
            }
        } else {
            let s = 2.0 * (1.0 + a[2][2] - a[0][0] - a[1][1]).sqrt();
            Self {
                w: (a[1][0] - a[0][1]) / s,
                x: (a[0][2] + a[2][0]) / s,
                y: (a[1][2] + a[2][1]) / s,
                z: 0.25 * s,
            }
        };
        q.normalize()
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        2.0 * self.vector().norm().atan2(self.w.abs())
    }
}

/// Hamilton product (no re-normalization).
impl<T: Real> Mul for UnitQuaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }
}

/// Exponential map from a rotation vector to a rotation.
pub fn exp_rotvec<T: Real>(psi: &Vector3<T>) -> UnitQuaternion<T> {
    let t2 = psi.norm_squared();
    let (w, c) = if t2.re() < EPS_PSI * EPS_PSI {
        // half-angle series: cos(ψ/2) and sin(ψ/2)/ψ to second order
        (T::one() - t2 / T::from_f64(8.0), T::from_f64(0.5) - t2 / T::from_f64(48.0))
    } else {
        let t = t2.sqrt();
        let h = t * T::from_f64(0.5);
        (h.cos(), h.sin() / t)
    };
    UnitQuaternion::from_parts(w, *psi * c)
}

/// Logarithm: rotation vector with norm in `[0, π]`.
///
/// At exactly π the quaternion sign is fixed so that the first nonzero
/// component of the axis is positive.
pub fn log_rotation<T: Real>(q: &UnitQuaternion<T>) -> Vector3<T> {
    let mut w = q.w;
    let mut v = q.vector();
    let flip = if w.re() == 0.0 {
        v.0.iter().map(|c| c.re()).find(|c| *c != 0.0).is_some_and(|c| c < 0.0)
    } else {
        w.re() < 0.0
    };
    if flip {
        w = -w;
        v = -v;
    }
    let s2 = v.norm_squared();
    let half = 0.5 * EPS_PSI;
    let factor = if s2.re() < half * half {
        // atan(s/w)/s to second order in s/w
        let x2 = s2 / (w * w);
        T::from_f64(2.0) / w * (T::one() - x2 / T::from_f64(3.0))
    } else {
        let s = s2.sqrt();
        T::from_f64(2.0) * s.atan2(w) / s
    };
    v * factor
}

/// Tangent map `T(ψ)` with `δθ = T(ψ)·δψ`, `δθ` the spatial spin of `exp(ψ)`.
pub fn tangent_map<T: Real>(psi: &Vector3<T>) -> Matrix3<T> {
    let t2 = psi.norm_squared();
    let k = skew(psi);
    let k2 = k * k;
    let (a, b) = if t2.re() < EPS_PSI * EPS_PSI {
        (T::from_f64(0.5), T::from_f64(1.0 / 6.0))
    } else {
        let t = t2.sqrt();
        let sh = (t * T::from_f64(0.5)).sin();
        // (1 - cos ψ)/ψ² written as 2 sin²(ψ/2)/ψ² to avoid cancellation
        (T::from_f64(2.0) * sh * sh / t2, (T::one() - t.sin() / t) / t2)
    };
    Matrix3::identity() + k.scale(a) + k2.scale(b)
}

/// Group product of two rotations, re-normalized.
pub fn compose<T: Real>(a: &UnitQuaternion<T>, b: &UnitQuaternion<T>) -> UnitQuaternion<T> {
    a.compose(b)
}

pub fn rotate<T: Real>(q: &UnitQuaternion<T>, v: &Vector3<T>) -> Vector3<T> {
    q.rotate(v)
}

/// `log(aᵀ·b)`, invariant under a common left rotation of `a` and `b`.
pub fn relative_rotvec<T: Real>(a: &UnitQuaternion<T>, b: &UnitQuaternion<T>) -> Vector3<T> {
    log_rotation(&(a.inverse() * *b))
}
