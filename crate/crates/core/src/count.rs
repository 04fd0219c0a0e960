//! Exact counting formulas for the subgraph families and cyclic orders.
//!
//! Every function is generic over an exact integer scalar. Fixed-width
//! types report [`Error::Overflow`] instead of wrapping; `BigUint` never
//! overflows.

use std::fmt::{Debug, Display};

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::matching::Signature;

/// Exact (integer) scalar usable for counting.
pub trait ExactInt: Clone + Ord + Num + CheckedMul + CheckedAdd + FromPrimitive + Debug + Display {}

impl<T> ExactInt for T where T: Clone + Ord + Num + CheckedMul + CheckedAdd + FromPrimitive + Debug + Display {}

fn lift<T: ExactInt>(v: usize) -> Result<T> {
    T::from_usize(v).ok_or(Error::Overflow)
}

pub(crate) fn mul<T: ExactInt>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn add<T: ExactInt>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn exact_div<T: ExactInt>(a: T, b: T) -> Result<T> {
    if b.is_zero() || !(a.clone() % b.clone()).is_zero() {
        // every division in this module is exact; anything else is a bug upstream
        return Err(Error::Overflow);
    }
    Ok(a / b)
}

pub fn factorial<T: ExactInt>(n: usize) -> Result<T> {
    (2..=n).try_fold(T::one(), |acc, i| mul(&acc, &lift(i)?))
}

pub fn pow2<T: ExactInt>(e: usize) -> Result<T> {
    let two = lift::<T>(2)?;
    (0..e).try_fold(T::one(), |acc, _| mul(&acc, &two))
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial<T: ExactInt>(n: usize, k: usize) -> Result<T> {
    if k > n {
        return Ok(T::zero());
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        // acc = C(n, i) here, and C(n, i) * (n - i) = C(n, i + 1) * (i + 1)
        acc = exact_div(mul(&acc, &lift(n - i)?)?, lift(i + 1)?)?;
    }
    Ok(acc)
}

/// `|H^(p,s)(n)| = C(n,p) C(n-p,s) 2^s`.
pub fn family_size<T: ExactInt>(n: usize, sig: Signature) -> Result<T> {
    sig.validate(n)?;
    let a = binomial::<T>(n, sig.p)?;
    let b = binomial::<T>(n - sig.p, sig.s)?;
    mul(&mul(&a, &b)?, &pow2(sig.s)?)
}

/// Star size in closed form: `(2p+s) (n-1)! / (p! s! (n-p-s)!) 2^(s-1)`.
pub fn star_size<T: ExactInt>(n: usize, sig: Signature) -> Result<T> {
    sig.validate(n)?;
    let (p, s) = (sig.p, sig.s);
    let numerator = mul(&mul(&lift::<T>(2 * p + s)?, &factorial(n - 1)?)?, &pow2(s)?)?;
    let denominator = mul(
        &mul(&mul(&factorial::<T>(p)?, &factorial(s)?)?, &factorial(n - p - s)?)?,
        &lift(2)?,
    )?;
    exact_div(numerator, denominator)
}

/// Star size as the sum over "x on a full edge" and "x is a singleton".
pub fn star_size_two_term<T: ExactInt>(n: usize, sig: Signature) -> Result<T> {
    sig.validate(n)?;
    let (p, s) = (sig.p, sig.s);
    let on_edge = if p == 0 {
        T::zero()
    } else {
        mul(&mul(&binomial::<T>(n - 1, p - 1)?, &binomial(n - p, s)?)?, &pow2(s)?)?
    };
    let as_singleton = if s == 0 {
        T::zero()
    } else {
        mul(
            &mul(&binomial::<T>(n - 1, p)?, &binomial(n - p - 1, s - 1)?)?,
            &pow2(s - 1)?,
        )?
    };
    add(&on_edge, &as_singleton)
}

/// `2n |star| = (2p+s) |family|`, evaluated exactly.
pub fn identity_holds<T: ExactInt>(n: usize, sig: Signature) -> Result<bool> {
    let lhs = mul(&lift::<T>(2 * n)?, &star_size::<T>(n, sig)?)?;
    let rhs = mul(&lift::<T>(sig.order())?, &family_size::<T>(n, sig)?)?;
    Ok(lhs == rhs)
}

/// Number of cyclic orders (out of `(n-1)! 2^n`) in which a fixed member is
/// a B-interval: `2^(n-s) p! s! (n-p-s)!`. The R-interval count is equal.
pub fn interval_order_count<T: ExactInt>(n: usize, sig: Signature) -> Result<T> {
    sig.validate(n)?;
    let (p, s) = (sig.p, sig.s);
    mul(
        &mul(&pow2::<T>(n - s)?, &factorial(p)?)?,
        &mul(&factorial(s)?, &factorial(n - p - s)?)?,
    )
}

/// `(n-1)! 2^n` orders, or `(n-1)! 2^(n-1)` when the last orientation is pinned.
pub fn order_count<T: ExactInt>(n: usize, restricted: bool) -> Result<T> {
    if n == 0 {
        return Err(Error::UnsupportedSize(0, usize::MAX));
    }
    let bits = if restricted { n - 1 } else { n };
    mul(&factorial::<T>(n - 1)?, &pow2(bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BigCount, Count};

    fn sig(p: usize, s: usize) -> Signature {
        Signature::new(p, s)
    }

    #[test]
    fn family_sizes() {
        assert_eq!(family_size::<Count>(6, sig(1, 2)).unwrap(), 240);
        assert_eq!(family_size::<Count>(4, sig(1, 2)).unwrap(), 48);
        assert_eq!(family_size::<Count>(3, sig(1, 1)).unwrap(), 12);
        for n in 1..10 {
            assert_eq!(family_size::<Count>(n, sig(0, 1)).unwrap(), 2 * n as u128);
        }
    }

    #[test]
    fn star_sizes() {
        assert_eq!(star_size::<Count>(6, sig(1, 2)).unwrap(), 80);
        assert_eq!(star_size::<Count>(4, sig(1, 1)).unwrap(), 9);
        assert_eq!(star_size::<Count>(3, sig(1, 1)).unwrap(), 6);
        assert_eq!(star_size::<Count>(6, sig(2, 1)).unwrap(), 50);
    }

    #[test]
    fn closed_and_two_term_forms_agree() {
        for n in 1..=20 {
            for p in 0..=n {
                for s in 0..=(n - p) {
                    if 2 * p + s == 0 {
                        continue;
                    }
                    let a = star_size::<Count>(n, sig(p, s)).unwrap();
                    let b = star_size_two_term::<Count>(n, sig(p, s)).unwrap();
                    assert_eq!(a, b, "n={n} p={p} s={s}");
                    assert!(identity_holds::<Count>(n, sig(p, s)).unwrap());
                }
            }
        }
    }

    #[test]
    fn invalid_signatures_rejected() {
        assert!(family_size::<Count>(2, sig(1, 2)).is_err());
        assert!(family_size::<Count>(3, sig(0, 0)).is_err());
        assert!(star_size::<Count>(2, sig(1, 2)).is_err());
    }

    #[test]
    fn fixed_width_overflow_is_reported() {
        assert_eq!(factorial::<u64>(21), Err(Error::Overflow));
        assert!(factorial::<BigCount>(40).is_ok());
        // (n-1)! for n = 40 does not fit in u128
        assert_eq!(star_size::<Count>(40, sig(3, 3)), Err(Error::Overflow));
        let big = star_size::<BigCount>(40, sig(3, 3)).unwrap();
        let two_term = star_size_two_term::<BigCount>(40, sig(3, 3)).unwrap();
        assert_eq!(big, two_term);
        assert!(identity_holds::<BigCount>(60, sig(10, 7)).unwrap());
    }

    #[test]
    fn interval_counts() {
        assert_eq!(interval_order_count::<Count>(3, sig(1, 1)).unwrap(), 4);
        assert_eq!(interval_order_count::<Count>(4, sig(1, 1)).unwrap(), 16);
        assert_eq!(order_count::<Count>(4, false).unwrap(), 96);
        assert_eq!(order_count::<Count>(3, true).unwrap(), 8);
        // each order has n B-intervals
        for (n, p, s) in [(3, 1, 1), (4, 1, 1), (6, 1, 2), (7, 2, 3)] {
            let lhs =
                family_size::<Count>(n, sig(p, s)).unwrap() * interval_order_count::<Count>(n, sig(p, s)).unwrap();
            let rhs = order_count::<Count>(n, false).unwrap() * n as u128;
            assert_eq!(lhs, rhs);
        }
    }
}
