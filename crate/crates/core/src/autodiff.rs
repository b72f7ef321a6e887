//! Forward-mode differentiation arithmetic.
//!
//! Two number types cover everything the variational code needs:
//!
//! * [`Dual`] carries a value and one directional derivative. Nesting it
//!   (`Dual<Dual<f64>>`) gives exact second partials.
//! * [`Taylor`] carries normalized Taylor coefficients `f^(k)(0)/k!` of a
//!   quantity evaluated along a curve parameter. Feeding the jet of a curve
//!   into a Lagrangian evaluated over `Taylor<Dual<f64>, 3>` yields the
//!   partial derivatives of the Lagrangian *and* their first two total
//!   derivatives along the curve in one pass.
//!
//! Lagrangians and equation expressions are written once, generic over
//! [`Scalar`], and evaluated with whichever number type the caller needs.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Arithmetic required by the generic evaluators.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;
    /// Leading real value, used for branch decisions (signs, thresholds).
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    /// `|self|` by the sign of the leading value.
    fn abs(self) -> Self {
        if self.re() < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// `value + eps * deriv` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T = f64> {
    pub value: T,
    pub deriv: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(value: T, deriv: T) -> Self {
        Dual { value, deriv }
    }
    pub fn constant(value: T) -> Self {
        Dual { value, deriv: T::zero() }
    }
    pub fn variable(value: T) -> Self {
        Dual { value, deriv: T::one() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.value + o.value, self.deriv + o.deriv)
    }
}
impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.value - o.value, self.deriv - o.deriv)
    }
}
impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.value * o.value, self.deriv * o.value + self.value * o.deriv)
    }
}
impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.value.recip();
        let v = self.value * inv;
        Dual::new(v, (self.deriv - v * o.deriv) * inv)
    }
}
impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.value, -self.deriv)
    }
}
impl<T: Scalar> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Scalar> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Scalar> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    fn re(&self) -> f64 {
        self.value.re()
    }
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        Dual::new(r, self.deriv / (r + r))
    }
    fn recip(self) -> Self {
        let inv = self.value.recip();
        Dual::new(inv, -(self.deriv * inv * inv))
    }
}

/// Truncated power series `c[0] + c[1] t + ... + c[N-1] t^(N-1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<T, const N: usize> {
    pub c: [T; N],
}

impl<T: Scalar, const N: usize> Taylor<T, N> {
    pub fn new(c: [T; N]) -> Self {
        Taylor { c }
    }
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); N];
        c[0] = v;
        Taylor { c }
    }
    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> T {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k].scale(f)
    }
}

impl<T: Scalar, const N: usize> Add for Taylor<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Taylor::new(std::array::from_fn(|i| self.c[i] + o.c[i]))
    }
}
impl<T: Scalar, const N: usize> Sub for Taylor<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Taylor::new(std::array::from_fn(|i| self.c[i] - o.c[i]))
    }
}
impl<T: Scalar, const N: usize> Mul for Taylor<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Taylor::new(std::array::from_fn(|k| {
            let mut acc = T::zero();
            for i in 0..=k {
                acc += self.c[i] * o.c[k - i];
            }
            acc
        }))
    }
}
impl<T: Scalar, const N: usize> Div for Taylor<T, N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv0 = o.c[0].recip();
        let mut q = [T::zero(); N];
        for k in 0..N {
            let mut acc = self.c[k];
            for i in 1..=k {
                acc -= o.c[i] * q[k - i];
            }
            q[k] = acc * inv0;
        }
        Taylor::new(q)
    }
}
impl<T: Scalar, const N: usize> Neg for Taylor<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Taylor::new(self.c.map(|v| -v))
    }
}
impl<T: Scalar, const N: usize> AddAssign for Taylor<T, N> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Scalar, const N: usize> SubAssign for Taylor<T, N> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Scalar, const N: usize> MulAssign for Taylor<T, N> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar, const N: usize> Scalar for Taylor<T, N> {
    fn from_f64(v: f64) -> Self {
        Taylor::constant(T::from_f64(v))
    }
    fn re(&self) -> f64 {
        self.c[0].re()
    }
    fn sqrt(self) -> Self {
        // r^2 = a  =>  2 r0 r_k = a_k - sum_{i=1}^{k-1} r_i r_{k-i}
        let mut r = [T::zero(); N];
        r[0] = self.c[0].sqrt();
        let inv2r0 = (r[0] + r[0]).recip();
        for k in 1..N {
            let mut acc = self.c[k];
            for i in 1..k {
                acc -= r[i] * r[k - i];
            }
            r[k] = acc * inv2r0;
        }
        Taylor::new(r)
    }
    fn recip(self) -> Self {
        Taylor::constant(T::one()) / self
    }
}

/// Central-difference derivative with one Richardson extrapolation step.
/// Test oracle for the forward-mode paths.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}
