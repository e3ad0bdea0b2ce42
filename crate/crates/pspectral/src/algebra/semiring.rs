//! Semirings parameterizing the sparse kernels.
//!
//! A semiring bundles an additive commutative monoid `(add, zero)` with a
//! multiplicative operator `(mul, one)`. Kernels such as [`vxm`](crate::algebra::vxm)
//! fold with `add` seeded at `zero` and combine with `mul`, so swapping the
//! semiring changes the computation: plus-times recovers ordinary linear
//! algebra, min-plus recovers single-step shortest-path relaxation.

use std::marker::PhantomData;

/// An algebraic semiring over a scalar type.
///
/// Implementations must satisfy, for all representable scalars:
/// `add(x, zero()) == x`, `mul(x, one()) == x`, `add` associative and
/// commutative, and `mul` distributing over `add`. These laws are checked on
/// sampled values in the test suite for every shipped semiring.
pub trait Semiring: Send + Sync {
    type Scalar: Copy + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero() -> Self::Scalar;
    fn one() -> Self::Scalar;
    fn add(a: Self::Scalar, b: Self::Scalar) -> Self::Scalar;
    fn mul(a: Self::Scalar, b: Self::Scalar) -> Self::Scalar;
}

/// Ordinary arithmetic: `add = +`, `mul = *`, identities 0 and 1.
pub struct PlusTimes<T>(PhantomData<T>);

impl Semiring for PlusTimes<f64> {
    type Scalar = f64;

    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn add(a: f64, b: f64) -> f64 {
        a + b
    }
    fn mul(a: f64, b: f64) -> f64 {
        a * b
    }
}

impl Semiring for PlusTimes<i64> {
    type Scalar = i64;

    fn zero() -> i64 {
        0
    }
    fn one() -> i64 {
        1
    }
    fn add(a: i64, b: i64) -> i64 {
        a + b
    }
    fn mul(a: i64, b: i64) -> i64 {
        a * b
    }
}

/// Tropical semiring: `add = min` with identity +inf, `mul = +` with identity 0.
///
/// One `vxm` under min-plus performs a single relaxation step of the
/// shortest-path recurrence.
pub struct MinPlus;

impl Semiring for MinPlus {
    type Scalar = f64;

    fn zero() -> f64 {
        f64::INFINITY
    }
    fn one() -> f64 {
        0.0
    }
    fn add(a: f64, b: f64) -> f64 {
        a.min(b)
    }
    fn mul(a: f64, b: f64) -> f64 {
        a + b
    }
}
