//! Scalar abstraction shared by the rotation kernel, the constitutive law and
//! the element densities.
//!
//! Everything that is differentiated during the Newton solve is written once,
//! generically over [`Real`], and evaluated either with plain floats or with
//! forward-mode dual numbers (first order for Jacobians of non-conservative
//! terms, second order for energy Hessians).

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::{Const, U1};
use num_dual::{DualNum, DualSVec64, Dual2SVec64, Derivative};
use num_traits::{Float, NumOps};

/// Real scalar usable by the generic kernels: `f32`, `f64` and dual numbers.
pub trait Real: Copy + Debug + PartialOrd + NumOps + Neg<Output = Self> + 'static {
    fn from_f64(v: f64) -> Self;
    /// Primal value, used for branch decisions and diagnostics.
    fn re(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, other: Self) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re().is_finite()
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn re(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            #[inline]
            fn sin(self) -> Self {
                Float::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                Float::cos(self)
            }
            #[inline]
            fn atan2(self, other: Self) -> Self {
                Float::atan2(self, other)
            }
        }
    };
}

impl_real_float!(f32);
impl_real_float!(f64);

impl<const N: usize> Real for DualSVec64<N> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Self::from_re(v)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn sqrt(self) -> Self {
        DualNum::sqrt(&self)
    }
    #[inline]
    fn sin(self) -> Self {
        DualNum::sin(&self)
    }
    #[inline]
    fn cos(self) -> Self {
        DualNum::cos(&self)
    }
    #[inline]
    fn atan2(self, other: Self) -> Self {
        DualNum::atan2(&self, other)
    }
}

impl<const N: usize> Real for Dual2SVec64<N> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Self::from_re(v)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn sqrt(self) -> Self {
        DualNum::sqrt(&self)
    }
    #[inline]
    fn sin(self) -> Self {
        DualNum::sin(&self)
    }
    #[inline]
    fn cos(self) -> Self {
        DualNum::cos(&self)
    }
    #[inline]
    fn atan2(self, other: Self) -> Self {
        DualNum::atan2(&self, other)
    }
}

/// Value, gradient and Hessian of a scalar function of `N` variables.
#[derive(Clone, Debug)]
pub struct Second<const N: usize> {
    pub value: f64,
    pub grad: [f64; N],
    pub hess: [[f64; N]; N],
}

/// Evaluates `f` at `x` with second-order forward differentiation.
pub fn second_order<const N: usize, F>(x: &[f64; N], f: F) -> Second<N>
where
    F: FnOnce(&[Dual2SVec64<N>; N]) -> Dual2SVec64<N>,
{
    let vars: [Dual2SVec64<N>; N] =
        std::array::from_fn(|i| Dual2SVec64::<N>::from_re(x[i]).derivative(i));
    let out = f(&vars);
    let g = out.v1.unwrap_generic(U1, Const::<N>);
    let h = out.v2.unwrap_generic(Const::<N>, Const::<N>);
    Second {
        value: out.re,
        grad: std::array::from_fn(|i| g[(0, i)]),
        hess: std::array::from_fn(|i| std::array::from_fn(|j| h[(i, j)])),
    }
}

/// Value and Jacobian of a vector function `R^N -> R^M`.
#[derive(Clone, Debug)]
pub struct First<const M: usize, const N: usize> {
    pub value: [f64; M],
    pub jac: [[f64; N]; M],
}

/// Evaluates `f` at `x` with first-order forward differentiation.
pub fn first_order<const M: usize, const N: usize, F>(x: &[f64; N], f: F) -> First<M, N>
where
    F: FnOnce(&[DualSVec64<N>; N]) -> [DualSVec64<N>; M],
{
    let vars: [DualSVec64<N>; N] = std::array::from_fn(|i| {
        let mut d = DualSVec64::<N>::from_re(x[i]);
        d.eps = Derivative::derivative_generic(Const::<N>, U1, i);
        d
    });
    let out = f(&vars);
    let mut value = [0.0; M];
    let mut jac = [[0.0; N]; M];
    for (m, o) in out.into_iter().enumerate() {
        value[m] = o.re;
        let d = o.eps.unwrap_generic(Const::<N>, U1);
        for n in 0..N {
            jac[m][n] = d[(n, 0)];
        }
    }
    First { value, jac }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_polynomial() {
        // f = x^2 y + sin(z)
        let s = second_order(&[2.0, 3.0, 0.5], |v| v[0] * v[0] * v[1] + v[2].sin());
        assert!((s.value - (12.0 + 0.5f64.sin())).abs() < 1e-15);
        assert_eq!(s.grad[0], 12.0);
        assert_eq!(s.grad[1], 4.0);
        assert!((s.grad[2] - 0.5f64.cos()).abs() < 1e-15);
        assert_eq!(s.hess[0][0], 6.0);
        assert_eq!(s.hess[0][1], 4.0);
        assert_eq!(s.hess[1][0], 4.0);
        assert!((s.hess[2][2] + 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn first_order_vector_function() {
        let j = first_order(&[1.0, 2.0], |v| [v[0] * v[1], v[1].atan2(v[0])]);
        assert_eq!(j.value[0], 2.0);
        assert_eq!(j.jac[0], [2.0, 1.0]);
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        assert!((j.jac[1][0] + 2.0 / 5.0).abs() < 1e-15);
        assert!((j.jac[1][1] - 1.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn f32_is_a_real() {
        fn hyp<T: Real>(a: T, b: T) -> T {
            (a * a + b * b).sqrt()
        }
        assert_eq!(hyp(3.0f32, 4.0f32), 5.0f32);
    }
}
