//! Exact scalar traits.
//!
//! The algebra never rounds. Chains and matrices are generic over these
//! traits; the crate root fixes the concrete choices `Int` and `Rat`.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Commutative ring element with exact arithmetic.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Send
        + Sync
        + 'static
{
}

/// Coefficient ring of a chain: ordered, printable, parseable and receiving
/// the integers.
pub trait Ring: Scalar + Signed + Display + FromStr + From<i64> {
    /// Short ring tag used in diagnostics and JSON (`"Z"` or `"Q"`).
    const TAG: &'static str;
}

impl Ring for i64 {
    const TAG: &'static str = "Z";
}

impl Ring for Ratio<i64> {
    const TAG: &'static str = "Q";
}

/// Euclidean integer type used by the Smith normal form.
pub trait IntegerScalar: Scalar + Integer + Signed + Display + Hash {}

impl<T> IntegerScalar for T where T: Scalar + Integer + Signed + Display + Hash {}

/// Canonical representative of `value` modulo `order` in `[0, order)`.
/// An order of zero means the free cyclic group and leaves the value alone.
pub fn reduce_mod<T: IntegerScalar>(value: T, order: &T) -> T {
    if order.is_zero() {
        value
    } else {
        value.mod_floor(&order.abs())
    }
}

/// Greatest common divisor with `gcd(0, 0) = 0`, always nonnegative.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Extended Euclid: returns `(g, x, y)` with `x·a + y·b = g = gcd(a, b) ≥ 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}
