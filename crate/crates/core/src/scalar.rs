//! Exact rational scalars.
//!
//! Every coefficient in this crate is a [`Scalar`], an arbitrary-precision
//! rational number. No floating point is used anywhere: cohomology ranks and
//! operator orders must be exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

/// Arbitrary-precision rational number.
pub type Scalar = BigRational;

/// Scalar from an integer.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Scalar `n/d`. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a scalar as `p` or `p/q` with `q > 0` in lowest terms.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Sign of the Koszul factor `(-1)^parity`.
pub fn sign_of(parity: bool) -> Scalar {
    if parity {
        -int(1)
    } else {
        int(1)
    }
}

/// True when `s` is a (positive or negative) unit sign, i.e. `±1`.
pub fn is_pm_one(s: &Scalar) -> bool {
    s.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn formatting() {
        assert_eq!(format_scalar(&int(3)), "3");
        assert_eq!(format_scalar(&frac(3, 2)), "3/2");
        assert_eq!(format_scalar(&frac(4, -2)), "-2");
        assert_eq!(format_scalar(&Scalar::zero()), "0");
    }
}
