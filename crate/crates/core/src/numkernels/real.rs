//! Scalar abstraction shared by every kernel.
//!
//! Gramians of sparsely actuated networks are graded: their smallest
//! eigenvalues sit dozens of orders of magnitude below the largest. `f64` is
//! the default backend; [`Mpf`] carries a fixed number of significand bits
//! through MPFR for problems whose Gramian spectrum falls below double
//! precision. Kernels are written once against [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::{Assign, Float};

pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + Sum
{
    /// Significand bits, including the implicit leading bit.
    const BITS: u32;

    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// `self += a * b` without an intermediate allocation.
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    /// `self -= a * b` without an intermediate allocation.
    fn mul_sub_assign(&mut self, a: &Self, b: &Self);

    /// `self = a * b`, reusing `self`'s storage.
    fn set_mul(&mut self, a: &Self, b: &Self);

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Unit roundoff times two: the gap between 1 and the next value.
    fn epsilon() -> Self;

    /// log2 of [`Real::epsilon`]; usable when the epsilon itself underflows `f64`.
    fn log2_epsilon() -> f64 {
        1.0 - Self::BITS as f64
    }

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn signum(&self) -> Self {
        if *self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc *= &base;
            }
            base = base.square();
            n >>= 1;
        }
        acc
    }

    /// `sqrt(a^2 + b^2)` without destructive overflow.
    fn hypot(&self, other: &Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        let ratio = small / &big;
        big * (Self::one() + ratio.square()).sqrt()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Real for f64 {
    const BITS: u32 = f64::MANTISSA_DIGITS;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline]
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    #[inline]
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    #[inline]
    fn set_mul(&mut self, a: &Self, b: &Self) {
        *self = a * b;
    }
    #[inline]
    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
}

/// MPFR float with `BITS` significand bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mpf<const BITS: u32>(Float);

pub type Mp128 = Mpf<128>;
pub type Mp256 = Mpf<256>;
pub type Mp512 = Mpf<512>;
pub type Mp1024 = Mpf<1024>;
pub type Mp2048 = Mpf<2048>;

impl<const BITS: u32> Mpf<BITS> {
    pub fn into_inner(self) -> Float {
        self.0
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }
}

impl<const BITS: u32> fmt::Debug for Mpf<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(24)))
    }
}

impl<const BITS: u32> fmt::Display for Mpf<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.0.to_string_radix(10, Some(20))),
        }
    }
}

impl<const BITS: u32> Neg for Mpf<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mpf(-self.0)
    }
}

macro_rules! mpf_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident) => {
        impl<const BITS: u32> $tr for Mpf<BITS> {
            type Output = Self;
            #[inline]
            fn $method(self, rhs: Self) -> Self {
                Mpf(self.0.$method(rhs.0))
            }
        }
        impl<'a, const BITS: u32> $tr<&'a Mpf<BITS>> for Mpf<BITS> {
            type Output = Self;
            #[inline]
            fn $method(self, rhs: &'a Self) -> Self {
                Mpf(self.0.$method(&rhs.0))
            }
        }
        impl<const BITS: u32> $atr for Mpf<BITS> {
            #[inline]
            fn $amethod(&mut self, rhs: Self) {
                self.0.$amethod(rhs.0);
            }
        }
        impl<'a, const BITS: u32> $atr<&'a Mpf<BITS>> for Mpf<BITS> {
            #[inline]
            fn $amethod(&mut self, rhs: &'a Self) {
                self.0.$amethod(&rhs.0);
            }
        }
    };
}

mpf_binop!(Add, add, AddAssign, add_assign);
mpf_binop!(Sub, sub, SubAssign, sub_assign);
mpf_binop!(Mul, mul, MulAssign, mul_assign);
mpf_binop!(Div, div, DivAssign, div_assign);

impl<const BITS: u32> Sum for Mpf<BITS> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, v| acc + v)
    }
}

impl<const BITS: u32> Real for Mpf<BITS> {
    const BITS: u32 = BITS;

    fn from_f64(v: f64) -> Self {
        Mpf(Float::with_val(BITS, v))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn abs(&self) -> Self {
        Mpf(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        Mpf(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        Mpf(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Mpf(self.0.clone().ln())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.0 += &a.0 * &b.0;
    }
    #[inline]
    fn set_mul(&mut self, a: &Self, b: &Self) {
        self.0.assign(&a.0 * &b.0);
    }
    #[inline]
    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        self.0 -= &a.0 * &b.0;
    }
    fn zero() -> Self {
        Mpf(Float::new(BITS))
    }
    fn epsilon() -> Self {
        Mpf(Float::with_val(BITS, 1u32) >> (BITS - 1))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// `(e^z - 1) / z`, continuous through `z = 0`.
pub fn phi1<T: Real>(z: &T) -> T {
    let half = T::from_f64(0.5);
    if z.abs() >= half {
        return (z.exp() - T::one()) / z;
    }
    // alternating-free Taylor series: sum z^k / (k+1)!
    let eps = T::epsilon();
    let mut term = T::one();
    let mut acc = T::one();
    let mut k = 1usize;
    loop {
        term = term * z / T::from_usize(k + 1);
        acc += &term;
        if term.abs() <= eps.clone() * acc.abs() || k > 4 * T::BITS as usize {
            break;
        }
        k += 1;
    }
    acc
}
