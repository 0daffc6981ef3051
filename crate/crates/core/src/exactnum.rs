//! Exact arithmetic substrate.
//!
//! Edge weights grow without bound under repeated mutation, so every weight is
//! an arbitrary-precision [`Nat`]. Sums of square roots are compared exactly:
//! fixed-point intervals with doubling precision decide the strict cases, and
//! a square-class decomposition decides equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision nonnegative integer.
pub type Nat = BigUint;

/// Starting precision (fractional bits) of the interval comparison.
const START_PRECISION: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not a perfect square")]
pub struct NotAPerfectSquare(pub Nat);

/// Returns `r` with `r * r == n`.
///
/// Newton iteration on big integers (`BigUint::sqrt`) followed by an exactness
/// check.
pub fn isqrt_exact(n: &Nat) -> Result<Nat, NotAPerfectSquare> {
    let r = n.sqrt();
    if &r * &r == *n {
        Ok(r)
    } else {
        Err(NotAPerfectSquare(n.clone()))
    }
}

pub fn is_perfect_square(n: &Nat) -> bool {
    isqrt_exact(n).is_ok()
}

/// A finite sum `Σ √tᵢ` of square roots of nonnegative integers.
///
/// Terms are kept sorted ascending with zeros dropped, so two sums compare
/// structurally equal iff they hold the same multiset of radicands. Numeric
/// comparison goes through [`compare_radical_sums`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RadicalSum {
    terms: Vec<Nat>,
}

impl RadicalSum {
    pub fn new<I: IntoIterator<Item = Nat>>(terms: I) -> Self {
        let mut terms: Vec<Nat> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        terms.sort();
        RadicalSum { terms }
    }

    pub fn terms(&self) -> &[Nat] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies the value by the integer `k` (each radicand by `k²`).
    pub fn scaled(&self, k: u32) -> RadicalSum {
        let f = Nat::from(k) * Nat::from(k);
        RadicalSum::new(self.terms.iter().map(|t| t * &f))
    }

    /// Lower and upper bounds on the value, in units of `2^-precision`.
    fn bounds(&self, precision: usize) -> (Nat, Nat) {
        let mut lo = Nat::zero();
        let mut hi = Nat::zero();
        for t in &self.terms {
            let scaled = t << (2 * precision);
            let r = scaled.sqrt();
            if &r * &r == scaled {
                hi += &r;
            } else {
                hi += &r + 1u32;
            }
            lo += r;
        }
        (lo, hi)
    }

    /// An `f64` approximation, for display only.
    pub fn approx(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.to_string().parse::<f64>().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "sqrt({t})")?;
        }
        Ok(())
    }
}

/// Exact test of `Σ √xᵢ = Σ √yⱼ`.
///
/// Radicands are grouped into square classes (`s ~ t` iff `s·t` is a perfect
/// square). Within a class with representative `r`, `√t = (√(t·r) / r)·√r`
/// and `√(t·r)` is an integer. Square roots of pairwise inequivalent
/// representatives are linearly independent over ℚ, so the sums are equal iff
/// every class collects a zero integer coefficient.
pub fn radical_sums_equal(x: &RadicalSum, y: &RadicalSum) -> bool {
    let mut classes: Vec<(Nat, BigInt)> = Vec::new();
    let signed = x
        .terms
        .iter()
        .map(|t| (t, true))
        .chain(y.terms.iter().map(|t| (t, false)));
    for (t, positive) in signed {
        let mut placed = false;
        for (rep, coeff) in classes.iter_mut() {
            if let Ok(root) = isqrt_exact(&(t * &*rep)) {
                let root = BigInt::from(root);
                if positive {
                    *coeff += root;
                } else {
                    *coeff -= root;
                }
                placed = true;
                break;
            }
        }
        if !placed {
            // t is its own representative: √(t·t) = t.
            let root = BigInt::from(t.clone());
            classes.push((t.clone(), if positive { root } else { -root }));
        }
    }
    classes.iter().all(|(_, c)| c.is_zero())
}

/// Exact trichotomy of `Σ √xᵢ` against `Σ √yⱼ`.
///
/// Interval arithmetic starting at 128 fractional bits, doubling while the
/// intervals overlap. The first overlap triggers the symbolic equality test;
/// once the sums are known to differ the doubling is guaranteed to separate
/// them.
pub fn compare_radical_sums(x: &RadicalSum, y: &RadicalSum) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    let mut precision = START_PRECISION;
    let mut known_unequal = false;
    loop {
        let (xl, xh) = x.bounds(precision);
        let (yl, yh) = y.bounds(precision);
        if xh < yl {
            return Ordering::Less;
        }
        if xl > yh {
            return Ordering::Greater;
        }
        if xl == xh && yl == yh && xl == yl {
            return Ordering::Equal;
        }
        if !known_unequal {
            if radical_sums_equal(x, y) {
                return Ordering::Equal;
            }
            known_unequal = true;
        }
        precision *= 2;
    }
}

/// Adds two signed square roots `s₁√p + s₂√q` whose product `p·q` is a
/// perfect square. The result is returned as `(negative, r)` meaning `±√r`.
pub(crate) fn add_signed_radicals(
    p_negative: bool,
    p: &Nat,
    q_negative: bool,
    q: &Nat,
) -> Result<(bool, Nat), NotAPerfectSquare> {
    if p.is_zero() {
        return Ok((q_negative && !q.is_zero(), q.clone()));
    }
    if q.is_zero() {
        return Ok((p_negative, p.clone()));
    }
    let cross = isqrt_exact(&(p * q))? << 1;
    if p_negative == q_negative {
        return Ok((p_negative, p + q + cross));
    }
    let value = BigInt::from(p + q) - BigInt::from(cross);
    let magnitude = value.abs().to_biguint().expect("nonnegative");
    debug_assert!(!value.is_negative());
    if magnitude.is_zero() {
        return Ok((false, magnitude));
    }
    // the larger radicand dictates the sign
    let negative = if p > q { p_negative } else { q_negative };
    Ok((negative, magnitude))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(v: &[u64]) -> RadicalSum {
        RadicalSum::new(v.iter().map(|&t| Nat::from(t)))
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt_exact(&Nat::from(0u32)).unwrap(), Nat::from(0u32));
        assert_eq!(isqrt_exact(&Nat::from(36u32)).unwrap(), Nat::from(6u32));
        assert_eq!(
            isqrt_exact(&Nat::from(35u32)),
            Err(NotAPerfectSquare(Nat::from(35u32)))
        );
    }

    #[test]
    fn isqrt_huge_square() {
        let r: Nat = Nat::from(3u32).pow(500) + 17u32;
        assert_eq!(isqrt_exact(&(&r * &r)).unwrap(), r);
        assert!(isqrt_exact(&(&r * &r + 1u32)).is_err());
    }

    #[test]
    fn zero_terms_dropped() {
        assert_eq!(rs(&[0, 4, 0]), rs(&[4]));
        assert!(rs(&[0, 0]).is_zero());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_radical_sums(&rs(&[4]), &rs(&[1, 1])), Ordering::Equal);
        assert_eq!(compare_radical_sums(&rs(&[2, 2]), &rs(&[8])), Ordering::Equal);
        // (√2+√3)² = 5 + 2√6 > 9 since 24 > 16
        assert_eq!(compare_radical_sums(&rs(&[2, 3]), &rs(&[9])), Ordering::Greater);
        assert_eq!(compare_radical_sums(&rs(&[9]), &rs(&[2, 3])), Ordering::Less);
    }

    #[test]
    fn equality_needs_symbolic_step() {
        // √2 + √8 + √18 = 6√2 = √72
        assert_eq!(compare_radical_sums(&rs(&[2, 8, 18]), &rs(&[72])), Ordering::Equal);
        // √12 + √27 = 5√3 = √75, paired with √5 on both sides
        assert_eq!(compare_radical_sums(&rs(&[12, 27, 5]), &rs(&[75, 5])), Ordering::Equal);
        assert!(!radical_sums_equal(&rs(&[12, 27, 5]), &rs(&[75, 6])));
    }

    #[test]
    fn near_miss_resolved() {
        // √(n²+1) + √(n²-1) is just below 2n
        let n = Nat::from(10u64).pow(30);
        let x = RadicalSum::new([&n * &n + 1u32, &n * &n - 1u32]);
        let y = RadicalSum::new([Nat::from(4u32) * &n * &n]);
        assert_eq!(compare_radical_sums(&x, &y), Ordering::Less);
    }

    #[test]
    fn signed_radical_addition() {
        let n = |v: u32| Nat::from(v);
        // √2 + √8 = √18
        assert_eq!(add_signed_radicals(false, &n(2), false, &n(8)).unwrap(), (false, n(18)));
        // √2 - √8 = -√2
        assert_eq!(add_signed_radicals(false, &n(2), true, &n(8)).unwrap(), (true, n(2)));
        // -√9 + √9 = 0
        assert_eq!(add_signed_radicals(true, &n(9), false, &n(9)).unwrap(), (false, n(0)));
        assert!(add_signed_radicals(false, &n(2), false, &n(3)).is_err());
    }
}
