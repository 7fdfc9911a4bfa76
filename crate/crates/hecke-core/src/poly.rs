//! Small polynomial toolkit used by the field layer.
//!
//! Polynomials are coefficient vectors in ascending degree order with no
//! trailing zeros (the zero polynomial is the empty vector). Only the
//! operations the field construction actually needs are provided: cyclotomic
//! polynomials, the palindromic half substitution `Phi(x) = x^d psi(x + 1/x)`,
//! exact evaluation, and the extended gcd over the rationals that backs
//! field inversion.

use alloc::{vec, vec::Vec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<BigRational>;

fn trim_int(p: &mut IntPoly) {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
}

fn trim_rat(p: &mut RatPoly) {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
}

pub fn int_poly_degree(p: &IntPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

/// x^n - 1.
fn x_n_minus_1(n: usize) -> IntPoly {
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = -BigInt::one();
    coeffs[n] = BigInt::one();
    coeffs
}

fn divisors(n: usize) -> Vec<usize> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

/// Exact division of integer polynomials; panics if the division is not exact
/// or the divisor is not monic. Sufficient for cyclotomic recursion, where
/// every divisor is monic.
fn exact_div_monic(num: &IntPoly, den: &IntPoly) -> IntPoly {
    assert!(!den.is_empty() && den.last().unwrap().is_one(), "divisor must be monic");
    let mut rem = num.clone();
    trim_int(&mut rem);
    let dd = den.len() - 1;
    if rem.len() < den.len() {
        assert!(rem.is_empty(), "non-exact polynomial division");
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    while rem.len() >= den.len() {
        let k = rem.len() - den.len();
        let lead = rem.last().unwrap().clone();
        quot[k] = lead.clone();
        for (i, dc) in den.iter().enumerate() {
            rem[k + i] -= &lead * dc;
        }
        trim_int(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.is_empty(), "non-exact polynomial division");
    trim_int(&mut quot);
    quot
}

/// The n-th cyclotomic polynomial, by recursive exact division:
/// `Phi_n(x) = (x^n - 1) / prod_{d | n, d < n} Phi_d(x)`.
pub fn cyclotomic(n: usize) -> IntPoly {
    assert!(n > 0);
    if n == 1 {
        return vec![-BigInt::one(), BigInt::one()];
    }
    let mut result = x_n_minus_1(n);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic(d);
        result = exact_div_monic(&result, &phi_d);
    }
    result
}

/// Given a palindromic polynomial `P` of even degree `2d`, returns the unique
/// `psi` of degree `d` with `P(x) = x^d psi(x + 1/x)`.
///
/// Uses `x^j + x^{-j} = p_j(x + 1/x)` with `p_0 = 2`, `p_1 = y`,
/// `p_{j+1} = y p_j - p_{j-1}`.
pub fn palindromic_half(p: &IntPoly) -> IntPoly {
    let deg = p.len() - 1;
    assert!(deg % 2 == 0, "degree must be even");
    let d = deg / 2;
    for j in 0..=deg {
        assert_eq!(p[j], p[deg - j], "input must be palindromic");
    }
    // power sums p_j as integer polynomials in y
    let mut pj: Vec<IntPoly> = Vec::with_capacity(d + 1);
    pj.push(vec![BigInt::from(2)]);
    if d >= 1 {
        pj.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for j in 2..=d {
        // y * p_{j-1} - p_{j-2}
        let mut next = vec![BigInt::zero(); pj[j - 1].len() + 1];
        for (i, c) in pj[j - 1].iter().enumerate() {
            next[i + 1] = c.clone();
        }
        for (i, c) in pj[j - 2].iter().enumerate() {
            next[i] -= c;
        }
        trim_int(&mut next);
        pj.push(next);
    }
    let mut out = vec![BigInt::zero(); d + 1];
    out[0] = p[d].clone();
    for j in 1..=d {
        for (i, c) in pj[j].iter().enumerate() {
            out[i] += &p[d + j] * c;
        }
    }
    trim_int(&mut out);
    out
}

/// Exact evaluation of an integer polynomial at a rational point.
pub fn eval_int_at_rational(p: &IntPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from(c.clone());
    }
    acc
}

pub fn eval_rat_at_rational(p: &RatPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn rat_poly_is_zero(p: &RatPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// Remainder of `a` modulo `b` over the rationals.
fn rat_poly_rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut rem = a.clone();
    trim_rat(&mut rem);
    let lead = b.last().expect("division by zero polynomial");
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let factor = rem.last().unwrap() / lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &factor * bc;
            rem[k + i] -= t;
        }
        trim_rat(&mut rem);
    }
    rem
}

/// Extended gcd over `Q[y]`: returns `(g, s)` with `g = gcd(a, b)` (not
/// normalized) and `s a = g (mod b)`. Used to invert field elements against
/// the minimal polynomial, where the gcd is a nonzero constant.
pub fn rat_poly_half_ext_gcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    trim_rat(&mut r0);
    trim_rat(&mut r1);
    let mut s0: RatPoly = vec![BigRational::one()];
    let mut s1: RatPoly = Vec::new();
    while !rat_poly_is_zero(&r1) {
        // quotient of r0 by r1
        let (q, r) = rat_poly_div_rem(&r0, &r1);
        let next_s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = next_s;
    }
    (r0, s0)
}

fn rat_poly_div_rem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut rem = a.clone();
    trim_rat(&mut rem);
    let lead = b.last().expect("division by zero polynomial");
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let factor = rem.last().unwrap() / lead;
        quot[k] = factor.clone();
        for (i, bc) in b.iter().enumerate() {
            let t = &factor * bc;
            rem[k + i] -= t;
        }
        trim_rat(&mut rem);
    }
    trim_rat(&mut quot);
    (quot, rem)
}

fn rat_poly_mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ac) in a.iter().enumerate() {
        if ac.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            let t = ac * bc;
            out[i + j] += t;
        }
    }
    trim_rat(&mut out);
    out
}

fn rat_poly_sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, bc) in b.iter().enumerate() {
        out[i] -= bc;
    }
    trim_rat(&mut out);
    out
}

#[allow(unused)]
pub fn rat_poly_rem_pub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    rat_poly_rem(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn ip(v: &[i64]) -> IntPoly {
        let mut p: IntPoly = v.iter().map(|&c| BigInt::from(c)).collect();
        trim_int(&mut p);
        p
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), ip(&[-1, 1]));
        assert_eq!(cyclotomic(2), ip(&[1, 1]));
        assert_eq!(cyclotomic(6), ip(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), ip(&[1, 0, -1, 0, 1]));
        // Phi_14 = x^6 - x^5 + x^4 - x^3 + x^2 - x + 1
        assert_eq!(cyclotomic(14), ip(&[1, -1, 1, -1, 1, -1, 1]));
    }

    #[test]
    fn half_substitution() {
        // Phi_6 = x^2 - x + 1 -> psi = y - 1 (lambda_3 = 1)
        assert_eq!(palindromic_half(&cyclotomic(6)), ip(&[-1, 1]));
        // Phi_12 = x^4 - x^2 + 1 -> psi = y^2 - 3
        assert_eq!(palindromic_half(&cyclotomic(12)), ip(&[-3, 0, 1]));
        // Phi_14 -> psi = y^3 - y^2 - 2y + 1
        assert_eq!(palindromic_half(&cyclotomic(14)), ip(&[1, -2, -1, 1]));
        // Phi_36 = x^12 - x^6 + 1 -> psi = y^6 - 6y^4 + 9y^2 - 3
        assert_eq!(palindromic_half(&cyclotomic(36)), ip(&[-3, 0, 9, 0, -6, 0, 1]));
    }

    #[test]
    fn ext_gcd_inverts() {
        // invert y modulo y^2 - 2: inverse is y/2
        let a: RatPoly = vec![BigRational::zero(), BigRational::one()];
        let m: RatPoly = vec![
            BigRational::from_i64(-2).unwrap(),
            BigRational::zero(),
            BigRational::one(),
        ];
        let (g, s) = rat_poly_half_ext_gcd(&a, &m);
        assert_eq!(g.len(), 1);
        let inv: RatPoly = s.iter().map(|c| c / &g[0]).collect();
        let prod = rat_poly_mul(&a, &inv);
        let red = rat_poly_rem(&prod, &m);
        assert_eq!(red, vec![BigRational::one()]);
    }
}
