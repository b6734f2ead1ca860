//! Integer scalar abstraction shared by the cyclotomic arithmetic and the
//! enumerator.
//!
//! Everything in this crate is exact. The generic parameter selects the
//! integer type that backs rational coefficients (for [`Cyclotomic`]) or the
//! scaled constraint rows (for the enumerator). Machine integers are faster;
//! [`BigInt`] never overflows.
//!
//! [`Cyclotomic`]: crate::cyclotomic::Cyclotomic

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type.
pub trait Scalar:
    Integer + Signed + Clone + FromPrimitive + ToPrimitive + Hash + Debug + Display + Send + Sync + 'static
{
    /// Lossless conversion from an arbitrary-precision integer, `None` on overflow.
    fn from_bigint(value: &BigInt) -> Option<Self>;

    fn to_bigint(&self) -> BigInt;
}

/// Scalar types usable inside the enumerator, which needs overflow-checked
/// arithmetic on its hot path.
pub trait SolverInt: Scalar + CheckedAdd + CheckedSub + CheckedMul {}

impl<T: Scalar + CheckedAdd + CheckedSub + CheckedMul> SolverInt for T {}

macro_rules! machine_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_bigint(value: &BigInt) -> Option<Self> {
                <$t as num_traits::cast::FromPrimitive>::from_i128(value.to_i128()?)
            }

            fn to_bigint(&self) -> BigInt {
                BigInt::from(*self)
            }
        }
    )*};
}

machine_scalar!(i32, i64, i128);

impl Scalar for BigInt {
    fn from_bigint(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_conversion_reports_overflow() {
        let big = BigInt::from(i64::MAX) * 4;
        assert_eq!(<i64 as Scalar>::from_bigint(&big), None);
        assert_eq!(<i128 as Scalar>::from_bigint(&big), Some(i64::MAX as i128 * 4));
        assert_eq!(<i32 as Scalar>::from_bigint(&BigInt::from(-7)), Some(-7));
    }
}
