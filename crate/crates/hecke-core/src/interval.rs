//! Rational interval arithmetic and a few numeric helpers.
//!
//! Intervals have exact rational endpoints and are used wherever a certified
//! enclosure of a real value is needed: evaluating field elements at the real
//! embeddings, comparing eigenvalue magnitudes, and bounding heights.

use core::cmp::Ordering;
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Closed interval `[lo, hi]` with rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(v: BigRational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from(BigInt::from(2))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if determined: +1 if the whole interval is positive, -1 if
    /// negative, 0 if the interval straddles or touches zero.
    pub fn sign(&self) -> i8 {
        if self.lo.is_positive() {
            1
        } else if self.hi.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn add_point(&self, v: &BigRational) -> RatInterval {
        RatInterval {
            lo: &self.lo + v,
            hi: &self.hi + v,
        }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let mut candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        candidates.sort();
        let [lo, .., hi] = candidates;
        RatInterval { lo, hi }
    }

    pub fn mul_point(&self, v: &BigRational) -> RatInterval {
        let a = &self.lo * v;
        let b = &self.hi * v;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    /// Enclosure of `|self|`.
    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = if -&self.lo > self.hi { -self.lo.clone() } else { self.hi.clone() };
            RatInterval { lo: BigRational::zero(), hi }
        }
    }

    /// Division by an interval that does not contain zero.
    pub fn div(&self, other: &RatInterval) -> RatInterval {
        assert!(other.sign() != 0, "interval division through zero");
        let inv = RatInterval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid())
    }

    /// Enclosing interval with dyadic endpoints of at most `bits` fractional
    /// bits; widens by at most `2^{1-bits}`.
    pub fn outward_round(&self, bits: usize) -> RatInterval {
        RatInterval {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }
}

/// Floor of log2 of a positive rational, within +-1. Cheap, based on bit
/// lengths; used only to steer precision choices, never for exactness.
pub fn approx_log2(x: &BigRational) -> f64 {
    debug_assert!(x.is_positive());
    approx_log2_uint(x.numer().magnitude()) - approx_log2_uint(x.denom().magnitude())
}

fn approx_log2_uint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::neg_infinity();
    }
    if bits <= 53 {
        x.to_f64().unwrap().log2()
    } else {
        let shifted = x >> (bits - 53);
        shifted.to_f64().unwrap().log2() + (bits - 53) as f64
    }
}

/// Natural log of a positive rational, accurate to ~1e-12 relative error.
pub fn approx_ln(x: &BigRational) -> f64 {
    approx_log2(x) * core::f64::consts::LN_2
}

/// f64 value of a rational: top 53 bits of numerator and denominator with
/// the exponents recombined. Accurate to a few ulps, saturating past the
/// f64 range.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let (mn, en) = split_top(x.numer().magnitude());
    let (md, ed) = split_top(x.denom().magnitude());
    sign * (mn / md) * ((en - ed) as f64).exp2()
}

/// `x = m * 2^e` with `m` holding the top 53 bits.
fn split_top(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    if bits <= 53 {
        (x.to_f64().unwrap(), 0)
    } else {
        let shifted = x >> (bits - 53);
        (shifted.to_f64().unwrap(), (bits - 53) as i64)
    }
}

/// Exact rational from an f64 (every finite f64 is dyadic).
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

/// Certified enclosure of `sqrt(v)` for `v >= 0`, of width `2^-bits`.
pub fn sqrt_enclosure(v: &BigRational, bits: u32) -> RatInterval {
    assert!(!v.is_negative());
    if v.is_zero() {
        return RatInterval::point(BigRational::zero());
    }
    // floor(sqrt(v * 4^k)) / 2^k
    let k = bits as usize;
    let scaled_num = v.numer().magnitude() * v.denom().magnitude() << (2 * k);
    let root = scaled_num.sqrt();
    let denom = v.denom().magnitude() << k;
    let lo = BigRational::new(
        BigInt::from_biguint(Sign::Plus, root.clone()),
        BigInt::from_biguint(Sign::Plus, denom.clone()),
    );
    let hi = BigRational::new(
        BigInt::from_biguint(Sign::Plus, root + BigUint::one()),
        BigInt::from_biguint(Sign::Plus, denom),
    );
    RatInterval { lo, hi }
}

/// Best rational approximation to `x` with denominator at most `max_den`,
/// via continued-fraction convergents.
pub fn bounded_reconstruct(x: &BigRational, max_den: &BigInt) -> BigRational {
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p = x.numer().div_floor_ref(x.denom());
    let mut q = BigInt::one();
    let mut rem = x - BigRational::from(p.clone());
    while !rem.is_zero() {
        let inv = rem.recip();
        let a = inv.numer().div_floor_ref(inv.denom());
        rem = inv - BigRational::from(a.clone());
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        if &q_next > max_den {
            break;
        }
        p_prev = core::mem::replace(&mut p, p_next);
        q_prev = core::mem::replace(&mut q, q_next);
    }
    BigRational::new(p, q)
}

trait DivFloorRef {
    fn div_floor_ref(&self, other: &BigInt) -> BigInt;
}

impl DivFloorRef for BigInt {
    fn div_floor_ref(&self, other: &BigInt) -> BigInt {
        num_integer::Integer::div_floor(self, other)
    }
}

/// Ceiling of an exact rational.
pub fn rational_ceil(x: &BigRational) -> BigInt {
    num_integer::Integer::div_ceil(x.numer(), x.denom())
}

fn is_shallow_dyadic(x: &BigRational, bits: usize) -> bool {
    let d = x.denom().magnitude();
    d.count_ones() == 1 && (d.bits() as usize) <= bits + 1
}

/// Largest dyadic `k/2^bits` not exceeding `x`.
pub fn dyadic_floor(x: &BigRational, bits: usize) -> BigRational {
    if is_shallow_dyadic(x, bits) {
        return x.clone();
    }
    let scaled = x * BigRational::from(BigInt::one() << bits);
    BigRational::new(rational_floor(&scaled), BigInt::one() << bits)
}

/// Smallest dyadic `k/2^bits` not less than `x`.
pub fn dyadic_ceil(x: &BigRational, bits: usize) -> BigRational {
    if is_shallow_dyadic(x, bits) {
        return x.clone();
    }
    let scaled = x * BigRational::from(BigInt::one() << bits);
    BigRational::new(rational_ceil(&scaled), BigInt::one() << bits)
}

/// Nearest-or-floor dyadic approximation, for midpoints where either side
/// is fine.
pub fn dyadic_round(x: &BigRational, bits: usize) -> BigRational {
    dyadic_floor(x, bits)
}

pub fn rational_floor(x: &BigRational) -> BigInt {
    num_integer::Integer::div_floor(x.numer(), x.denom())
}

/// Compare two intervals when they are disjoint; `None` if they overlap.
pub fn interval_cmp(a: &RatInterval, b: &RatInterval) -> Option<Ordering> {
    if a.hi < b.lo {
        Some(Ordering::Less)
    } else if b.hi < a.lo {
        Some(Ordering::Greater)
    } else if a.lo == a.hi && b.lo == b.hi && a.lo == b.lo {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Evaluate a polynomial (rational coefficients, ascending) over an interval
/// by Horner's rule.
pub fn horner_interval(coeffs: &[BigRational], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add_point(c);
    }
    acc
}

/// Horner evaluation with outward rounding to dyadics after every step, so
/// endpoint bit sizes stay bounded by `round_bits` instead of compounding.
/// Each rounding widens the enclosure by at most `2^-round_bits`.
pub fn horner_interval_rounded(
    coeffs: &[BigRational],
    x: &RatInterval,
    round_bits: usize,
) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add_point(c).outward_round(round_bits);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn interval_mul_signs() {
        let a = RatInterval::new(r(-1, 1), r(2, 1));
        let b = RatInterval::new(r(-3, 1), r(1, 2));
        let p = a.mul(&b);
        assert_eq!(p.lo, r(-6, 1));
        assert_eq!(p.hi, r(3, 1));
    }

    #[test]
    fn sqrt_enclosure_tight() {
        let v = r(2, 1);
        let enc = sqrt_enclosure(&v, 64);
        assert!(enc.width() <= r(1, 1) / BigRational::from(BigInt::from(1u128 << 64)));
        let mid = enc.mid();
        let err = (rational_to_f64(&mid) - 2f64.sqrt()).abs();
        assert!(err < 1e-15);
    }

    #[test]
    fn reconstruct_recovers_simple_fraction() {
        // 22/7 plus noise smaller than reconstruction tolerance
        let noisy = r(22, 7) + r(1, 1_000_000_000);
        let rec = bounded_reconstruct(&noisy, &BigInt::from(1000));
        assert_eq!(rec, r(22, 7));
    }

    #[test]
    fn log2_of_big_values() {
        let x = BigRational::from(BigInt::from_u128(1u128 << 100).unwrap());
        assert!((approx_log2(&x) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn ceil_floor() {
        assert_eq!(rational_ceil(&r(7, 2)), BigInt::from(4));
        assert_eq!(rational_ceil(&r(-7, 2)), BigInt::from(-3));
        assert_eq!(rational_floor(&r(7, 2)), BigInt::from(3));
        assert_eq!(rational_ceil(&r(4, 2)), BigInt::from(2));
    }
}
