//! Scalar field abstraction shared by the numeric kernels.
//!
//! The dynamic program and the simplex solver only need ordered-field
//! arithmetic, so they are written against [`Scalar`]. Exact rationals are
//! the production instantiation; floats are accepted for quick exploration
//! but carry no exactness guarantee (the simplex compares against zero
//! without tolerances).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar: Num + Signed + FromPrimitive + Clone + PartialOrd + Debug {
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn from_count(value: u64) -> Self {
        <Self as FromPrimitive>::from_u64(value).expect("u64 is representable")
    }

    /// `num / den`; panics when `den == 0`.
    fn from_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let n = <Self as FromPrimitive>::from_i64(num).expect("i64 is representable");
        let d = <Self as FromPrimitive>::from_i64(den).expect("i64 is representable");
        n / d
    }

    /// `self -= f * p`. Heap-backed types override this to avoid clones.
    fn mul_sub(&mut self, f: &Self, p: &Self) {
        *self = self.clone() - f.clone() * p.clone();
    }

    /// `self /= p`.
    fn div_by(&mut self, p: &Self) {
        *self = self.clone() / p.clone();
    }
}

macro_rules! exact_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = true;
        }
    )*};
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = false;
        }
    )*};
}

exact_scalar!(Ratio<i64>, Ratio<i128>);
float_scalar!(f32, f64);

impl Scalar for Ratio<BigInt> {
    const EXACT: bool = true;

    fn mul_sub(&mut self, f: &Self, p: &Self) {
        *self -= f * p;
    }

    fn div_by(&mut self, p: &Self) {
        *self /= p;
    }
}
/// Clones `a` when it compares greater than `b`, otherwise `b`.
pub fn max_of<S: Scalar>(a: &S, b: &S) -> S {
    if a > b {
        a.clone()
    } else {
        b.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn fractions_agree_across_exact_types() {
        let a = <Ratio<i64> as Scalar>::from_fraction(3, 5);
        let b = <BigRational as Scalar>::from_fraction(6, 10);
        assert_eq!(*a.numer(), 3);
        assert_eq!(b, BigRational::new(3.into(), 5.into()));
        assert!((<f64 as Scalar>::from_fraction(3, 5) - 0.6).abs() < 1e-12);
        assert!(<BigRational as Scalar>::EXACT);
        assert!(!<f64 as Scalar>::EXACT);
    }
}
