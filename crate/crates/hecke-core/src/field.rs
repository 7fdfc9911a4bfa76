//! Exact arithmetic in `K = Q(lambda_q)`, `lambda_q = 2cos(pi/q)`.
//!
//! A [`FieldContext`] fixes the field once: the minimal polynomial `psi` of
//! `lambda_q` (obtained from the cyclotomic polynomial `Phi_2q` through the
//! palindromic substitution `Phi_2q(x) = x^d psi(x + 1/x)`), isolating
//! intervals for all `d` real roots of `psi`, precomputed reduction rows, and
//! a table of named constants. Elements are coefficient vectors in the power
//! basis `1, lambda, ..., lambda^{d-1}` over arbitrary-precision rationals.
//!
//! The context is immutable after construction and all operations are pure,
//! so it can be shared freely across threads.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::{format, vec, vec::Vec};
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::interval::{
    self, bounded_reconstruct, dyadic_ceil, dyadic_floor, dyadic_round, rational_from_f64,
    sqrt_enclosure, RatInterval,
};
use crate::poly::{self, IntPoly, RatPoly};

/// Exact element of `Q(lambda_q)`: `sum coeffs[i] * lambda^i`, always reduced
/// modulo the minimal polynomial (so `coeffs.len() == degree`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// True if the element is a rational number (no lambda part).
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Canonical serialization: one `"p/q"` (or bare `"p"`) string per power
    /// basis coefficient, ascending powers, lowest terms.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_string).collect()
    }

    pub fn from_coeff_strings(strings: &[String]) -> Result<FieldElement, String> {
        let mut coeffs = Vec::with_capacity(strings.len());
        for s in strings {
            let r = BigRational::from_str(s.trim())
                .map_err(|e| format!("bad coefficient {:?}: {}", s, e))?;
            coeffs.push(r);
        }
        if coeffs.is_empty() {
            return Err("empty coefficient list".to_string());
        }
        Ok(FieldElement { coeffs })
    }

    /// Single-string canonical form, used as a cache key.
    pub fn canonical_string(&self) -> String {
        self.coeff_strings().join(",")
    }
}

fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement[{}]", self.canonical_string())
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeff_strings())
    }
}

impl<'de> serde::Deserialize<'de> for FieldElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        FieldElement::from_coeff_strings(&strings).map_err(serde::de::Error::custom)
    }
}

/// Outcome of the in-field square root decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqrtOutcome {
    /// `root * root == operand` exactly; nonnegative at the distinguished root.
    Root(FieldElement),
    /// Certified: negative at some real embedding, or a quadratic
    /// non-residue at a good prime.
    NotASquare,
    /// Resource budget exhausted without a decision. Never a wrong answer.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    DivisionByZero,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DivisionByZero => write!(f, "division by zero field element"),
        }
    }
}

#[derive(Clone, Debug)]
struct RootEnclosure {
    lo: BigRational,
    hi: BigRational,
    /// Sign of psi at `lo`; the sign at `hi` is the opposite. Meaningless
    /// when `exact`.
    sign_lo: i8,
    /// Endpoint equality: the root is the rational `lo` itself (degree 1 only).
    exact: bool,
}

impl RootEnclosure {
    fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

#[derive(Clone, Debug)]
struct WitnessPrime {
    p: u64,
    roots: Vec<u64>,
}

/// Precomputed data for `K_q = Q(lambda_q)`.
pub struct FieldContext {
    q: u32,
    degree: usize,
    min_poly: IntPoly,
    min_poly_rat: RatPoly,
    min_poly_deriv_rat: RatPoly,
    /// `lambda^{degree+j} mod psi`, `j = 0..degree-1`, as integer rows.
    reduction: Vec<Vec<BigInt>>,
    /// Isolating intervals for the real roots of psi, ascending. The
    /// distinguished root `2cos(pi/q)` is the largest, i.e. the last.
    roots: Vec<RootEnclosure>,
    /// The same roots refined to the deep base width, for high-precision
    /// evaluation without re-refining from scratch.
    roots_deep: Vec<RootEnclosure>,
    named: BTreeMap<String, FieldElement>,
    witness_primes: Vec<WitnessPrime>,
}

const BASE_ROOT_BITS: u32 = 64;
const DEEP_ROOT_BITS: u32 = 320;
const QUICK_WITNESS_PRIMES: usize = 24;
const FULL_WITNESS_PRIMES: usize = 64;

impl FieldContext {
    pub fn new(q: u32) -> FieldContext {
        assert!(q >= 3, "q must be at least 3");
        let phi = poly::cyclotomic(2 * q as usize);
        let min_poly = poly::palindromic_half(&phi);
        let degree = min_poly.len() - 1;
        let min_poly_rat: RatPoly = min_poly
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let min_poly_deriv_rat: RatPoly = min_poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| BigRational::from(BigInt::from(i) * c))
            .collect();

        let reduction = build_reduction_rows(&min_poly, degree);
        let roots = isolate_roots(&min_poly, q, degree);
        let witness_primes = find_witness_primes(&min_poly, QUICK_WITNESS_PRIMES, 3);

        let mut ctx = FieldContext {
            q,
            degree,
            min_poly,
            min_poly_rat,
            min_poly_deriv_rat,
            reduction,
            roots,
            roots_deep: Vec::new(),
            named: BTreeMap::new(),
            witness_primes,
        };
        ctx.roots_deep = ctx
            .roots
            .iter()
            .map(|enc| {
                let mut deep = enc.clone();
                ctx.refine_to_width(&mut deep, DEEP_ROOT_BITS);
                deep
            })
            .collect();
        ctx.named = ctx.build_named();
        ctx
    }

    fn build_named(&self) -> BTreeMap<String, FieldElement> {
        let mut named = BTreeMap::new();
        let l = self.lambda();
        let l2 = self.mul(&l, &l);
        let one = self.one();
        named.insert("l".to_string(), l.clone());
        named.insert("l1".to_string(), self.sub(&l2, &one));
        named.insert("l2".to_string(), self.sub(&l2, &self.from_int(2)));
        if self.q % 2 == 1 {
            // lambda' = 2 - lambda^2: the Galois conjugate 2cos((q-2)pi/q).
            named.insert("lp".to_string(), self.sub(&self.from_int(2), &l2));
        }
        if self.q == 7 {
            named.insert("u7".to_string(), self.add(&l2, &l));
        }
        if self.q == 18 {
            let l4 = self.mul(&l2, &l2);
            let u = self.add(
                &self.sub(&self.scale_int(&l4, 2), &self.scale_int(&l2, 4)),
                &one,
            );
            named.insert("u18".to_string(), u);
        }
        named
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic integer minimal polynomial of lambda, ascending coefficients.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Index of the distinguished real embedding (the one sending lambda to
    /// `2cos(pi/q)`, the largest root).
    pub fn distinguished_root(&self) -> usize {
        self.roots.len() - 1
    }

    pub fn named(&self, name: &str) -> Option<&FieldElement> {
        self.named.get(name)
    }

    pub fn named_elements(&self) -> impl Iterator<Item = (&str, &FieldElement)> {
        self.named.iter().map(|(k, v)| (k.as_str(), v))
    }

    // ---- constructors ----

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![BigRational::zero(); self.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        self.from_rational(BigRational::from(n.clone()))
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        let mut coeffs = vec![BigRational::zero(); self.degree];
        coeffs[0] = r;
        FieldElement { coeffs }
    }

    pub fn lambda(&self) -> FieldElement {
        let mut coeffs = vec![BigRational::zero(); self.degree];
        if self.degree == 1 {
            // q = 3: lambda = 1
            coeffs[0] = BigRational::one();
        } else {
            coeffs[1] = BigRational::one();
        }
        FieldElement { coeffs }
    }

    /// Build an element from arbitrary-degree power-basis coefficients,
    /// reducing modulo the minimal polynomial.
    pub fn from_power_coeffs(&self, coeffs: &[BigRational]) -> FieldElement {
        self.reduce_poly(coeffs.to_vec())
    }

    fn check(&self, x: &FieldElement) {
        assert_eq!(
            x.coeffs.len(),
            self.degree,
            "field element degree mismatch (wrong context?)"
        );
    }

    // ---- ring operations ----

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        FieldElement {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        FieldElement {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: x.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, x: &FieldElement, r: &BigRational) -> FieldElement {
        FieldElement {
            coeffs: x.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    pub fn scale_int(&self, x: &FieldElement, n: i64) -> FieldElement {
        self.scale(x, &BigRational::from(BigInt::from(n)))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        let d = self.degree;
        let mut conv = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in x.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                conv[i + j] += t;
            }
        }
        self.reduce_poly(conv)
    }

    fn reduce_poly(&self, mut coeffs: Vec<BigRational>) -> FieldElement {
        let d = self.degree;
        assert!(
            coeffs.len() <= 2 * d - 1 || coeffs[2 * d - 1..].iter().all(|c| c.is_zero()),
            "reduce_poly input degree too large"
        );
        for i in (d..coeffs.len()).rev() {
            if coeffs[i].is_zero() {
                continue;
            }
            let c = core::mem::replace(&mut coeffs[i], BigRational::zero());
            let row = &self.reduction[i - d];
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    coeffs[j] += &c * &BigRational::from(r.clone());
                }
            }
        }
        coeffs.truncate(d);
        coeffs.resize(d, BigRational::zero());
        FieldElement { coeffs }
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(x);
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.degree == 1 {
            return Ok(self.from_rational(x.coeffs[0].recip()));
        }
        let mut a: RatPoly = x.coeffs.clone();
        while matches!(a.last(), Some(c) if c.is_zero()) {
            a.pop();
        }
        let (g, s) = poly::rat_poly_half_ext_gcd(&a, &self.min_poly_rat);
        debug_assert_eq!(g.len(), 1, "minimal polynomial must be irreducible");
        let ginv = g[0].recip();
        let coeffs: Vec<BigRational> = s.iter().map(|c| c * &ginv).collect();
        Ok(self.reduce_poly(coeffs))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, x: &FieldElement, n: i64) -> Result<FieldElement, FieldError> {
        let base = if n < 0 { self.inv(x)? } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    // ---- order and embeddings ----

    /// Exact sign of `x` at the given real root of psi. Refines the isolating
    /// interval until the sign is certain; terminates because a nonzero
    /// element of an irreducible extension evaluates to a nonzero real at
    /// every root.
    pub fn sign_at(&self, x: &FieldElement, root: usize) -> i8 {
        self.check(x);
        if x.is_zero() {
            return 0;
        }
        let enc = &self.roots[root];
        if enc.exact {
            return poly::sign_of(&poly::eval_rat_at_rational(&x.coeffs, &enc.lo));
        }
        let s = interval::horner_interval_rounded(&x.coeffs, &interval_of(enc), 96).sign();
        if s != 0 {
            return s;
        }
        let mut enc = self.roots_deep[root].clone();
        let mut bits = DEEP_ROOT_BITS;
        loop {
            let img = interval::horner_interval_rounded(
                &x.coeffs,
                &interval_of(&enc),
                bits as usize + 32,
            );
            let s = img.sign();
            if s != 0 {
                return s;
            }
            bits += 128;
            self.refine_to_width(&mut enc, bits);
            if enc.exact {
                return poly::sign_of(&poly::eval_rat_at_rational(&x.coeffs, &enc.lo));
            }
        }
    }

    /// Sign at the distinguished embedding.
    pub fn sign(&self, x: &FieldElement) -> i8 {
        self.sign_at(x, self.distinguished_root())
    }

    /// Exact order of `x` and `y` under the distinguished embedding.
    pub fn compare(&self, x: &FieldElement, y: &FieldElement) -> Ordering {
        match self.sign(&self.sub(x, y)) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn abs(&self, x: &FieldElement) -> FieldElement {
        if self.sign(x) < 0 {
            self.neg(x)
        } else {
            x.clone()
        }
    }

    fn bisect_once(&self, enc: &mut RootEnclosure) {
        let mid = (&enc.lo + &enc.hi) / BigRational::from(BigInt::from(2));
        let s = poly::sign_of(&poly::eval_int_at_rational(&self.min_poly, &mid));
        if s == 0 {
            enc.lo = mid.clone();
            enc.hi = mid;
            enc.exact = true;
            return;
        }
        if s == enc.sign_lo {
            enc.lo = mid;
        } else {
            enc.hi = mid;
        }
    }

    /// Shrink a root enclosure to width at most `2^-bits`. Interval Newton
    /// steps do the heavy lifting (quadratic convergence); bisection is the
    /// fallback whenever a Newton step fails to shrink the box. Endpoints are
    /// rounded outward to dyadics at the working precision after every
    /// Newton step, so their bit size stays proportional to the target.
    fn refine_to_width(&self, enc: &mut RootEnclosure, bits: u32) {
        if enc.exact {
            return;
        }
        let round_bits = bits as usize + 8;
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
        let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
        let mut sign_valid = true;
        while &enc.hi - &enc.lo > target {
            let x = interval_of(enc);
            let width = x.width();
            let dpsi =
                interval::horner_interval_rounded(&self.min_poly_deriv_rat, &x, round_bits);
            let mut newton_ok = false;
            if dpsi.sign() != 0 {
                let m = dyadic_round(&x.mid(), round_bits);
                let fm = poly::eval_rat_at_rational(&self.min_poly_rat, &m);
                if fm.is_zero() {
                    enc.lo = m.clone();
                    enc.hi = m;
                    enc.exact = true;
                    return;
                }
                let step = RatInterval::point(fm).div(&dpsi);
                let n_lo = dyadic_floor(&(&m - &step.hi), round_bits);
                let n_hi = dyadic_ceil(&(&m - &step.lo), round_bits);
                let new_lo = if n_lo > enc.lo { n_lo } else { enc.lo.clone() };
                let new_hi = if n_hi < enc.hi { n_hi } else { enc.hi.clone() };
                if new_lo <= new_hi && &new_hi - &new_lo <= &three_quarters * &width {
                    enc.lo = new_lo;
                    enc.hi = new_hi;
                    sign_valid = false;
                    newton_ok = true;
                }
            }
            if !newton_ok {
                if !sign_valid {
                    let s = poly::sign_of(&poly::eval_int_at_rational(&self.min_poly, &enc.lo));
                    debug_assert!(s != 0, "rational endpoint cannot be a root");
                    enc.sign_lo = s;
                    sign_valid = true;
                }
                self.bisect_once(enc);
                if enc.exact {
                    return;
                }
            }
        }
        if !sign_valid {
            let s = poly::sign_of(&poly::eval_int_at_rational(&self.min_poly, &enc.lo));
            enc.sign_lo = s;
        }
    }

    fn is_lambda_element(&self, x: &FieldElement) -> bool {
        self.degree > 1
            && x.coeffs[1].is_one()
            && x.coeffs
                .iter()
                .enumerate()
                .all(|(i, c)| i == 1 || c.is_zero())
    }

    /// Certified enclosure of `x` at one real embedding, of width at most
    /// `2^-precision`.
    pub fn embed_at(&self, x: &FieldElement, root: usize, precision: u32) -> RatInterval {
        self.check(x);
        // lambda itself is the root value; skip the polynomial evaluation
        if self.is_lambda_element(x) {
            let round = precision as usize + 12;
            if precision + 2 <= DEEP_ROOT_BITS && !self.roots_deep.is_empty() {
                let enc = &self.roots_deep[root];
                if !enc.exact {
                    return interval_of(enc).outward_round(round);
                }
            }
            let mut enc = self.roots_deep[root].clone();
            self.refine_to_width(&mut enc, precision + 2);
            return interval_of(&enc).outward_round(round);
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << precision as usize);
        let mut enc = self.roots[root].clone();
        let mut tried_deep = false;
        loop {
            let img = if enc.exact {
                RatInterval::point(poly::eval_rat_at_rational(&x.coeffs, &enc.lo))
            } else {
                interval::horner_interval_rounded(
                    &x.coeffs,
                    &interval_of(&enc),
                    precision as usize + 12,
                )
            };
            if img.width() <= target {
                return img;
            }
            if !tried_deep && !self.roots_deep.is_empty() {
                enc = self.roots_deep[root].clone();
                tried_deep = true;
                continue;
            }
            // widen the enclosure precision by the observed bit deficit
            let deficit = interval::approx_log2(&(img.width() / &target)).max(1.0) as u32;
            let have = (-interval::approx_log2(&enc.width())).max(0.0) as u32;
            self.refine_to_width(&mut enc, have + deficit + 2);
        }
    }

    /// One certified enclosure per real embedding, ascending root order.
    /// The distinguished embedding is the last entry.
    pub fn embed_all(&self, x: &FieldElement, precision: u32) -> Vec<RatInterval> {
        (0..self.roots.len())
            .map(|i| self.embed_at(x, i, precision))
            .collect()
    }

    /// f64 approximation at the distinguished embedding.
    pub fn to_f64(&self, x: &FieldElement) -> f64 {
        self.embed_at(x, self.distinguished_root(), 60).to_f64()
    }

    // ---- subfield membership ----

    /// Whether `x` lies in `lambda * Q(lambda^2)`.
    ///
    /// For odd q this is all of `Q(lambda)`. For even q the minimal
    /// polynomial is even, so reduction preserves coefficient parity and the
    /// test is that all even-index coefficients vanish.
    pub fn in_lambda_q_lambda2(&self, x: &FieldElement) -> bool {
        self.check(x);
        if self.q % 2 == 1 {
            return true;
        }
        x.coeffs.iter().step_by(2).all(|c| c.is_zero())
    }

    /// Whether `x` lies in the even-power span `Q(lambda^2)` (the invariant
    /// trace field for even q).
    pub fn in_q_lambda2(&self, x: &FieldElement) -> bool {
        self.check(x);
        if self.q % 2 == 1 {
            return true;
        }
        x.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    // ---- square roots ----

    /// Decide whether `d` is a square in the field.
    ///
    /// Strategy: (i) a negative sign at any real embedding certifies
    /// NotASquare (the field is totally real); (ii) attempt-and-verify
    /// reconstruction of a candidate root from high-precision embeddings,
    /// verified exactly by squaring; (iii) quadratic-residue witnesses modulo
    /// primes where psi splits; (iv) Undetermined once budgets are exhausted.
    pub fn sqrt(&self, d: &FieldElement) -> SqrtOutcome {
        self.check(d);
        if d.is_zero() {
            return SqrtOutcome::Root(self.zero());
        }
        if self.degree == 1 {
            return self.sqrt_rational(&d.coeffs[0]);
        }
        for i in 0..self.roots.len() {
            if self.sign_at(d, i) < 0 {
                return SqrtOutcome::NotASquare;
            }
        }
        if let Some(out) = self.witness_scan(d, QUICK_WITNESS_PRIMES) {
            return out;
        }
        for (prec, den_bits) in [(96u32, 24u32), (192, 56), (384, 120), (768, 248)] {
            if let Some(root) = self.sqrt_attempt(d, prec, den_bits) {
                return SqrtOutcome::Root(root);
            }
        }
        if let Some(out) = self.witness_scan(d, FULL_WITNESS_PRIMES) {
            return out;
        }
        SqrtOutcome::Undetermined
    }

    fn sqrt_rational(&self, r: &BigRational) -> SqrtOutcome {
        if r.is_negative() {
            return SqrtOutcome::NotASquare;
        }
        let n = r.numer().sqrt();
        let d = r.denom().sqrt();
        if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
            SqrtOutcome::Root(self.from_rational(BigRational::new(n, d)))
        } else {
            SqrtOutcome::NotASquare
        }
    }

    /// Try to reconstruct an exact square root from numeric data. Returns the
    /// root normalized to be nonnegative at the distinguished embedding.
    fn sqrt_attempt(&self, d: &FieldElement, prec: u32, den_bits: u32) -> Option<FieldElement> {
        let n = self.roots.len();
        // high-precision root midpoints and exact Vandermonde inverse
        let mut mids = Vec::with_capacity(n);
        for i in 0..n {
            let mut enc = self.roots_deep[i].clone();
            self.refine_to_width(&mut enc, prec);
            mids.push((&enc.lo + &enc.hi) / BigRational::from(BigInt::from(2)));
        }
        let vinv = vandermonde_inverse(&mids)?;
        // sqrt approximations of the embedding values
        let mut mags = Vec::with_capacity(n);
        for i in 0..n {
            let img = self.embed_at(d, i, prec);
            let mid = img.mid();
            if !mid.is_positive() {
                // value is certified nonnegative; a nonpositive midpoint can
                // only happen for genuinely tiny values, refine harder
                let img = self.embed_at(d, i, prec * 2);
                mags.push(sqrt_enclosure(&img.mid().abs(), prec).mid());
            } else {
                mags.push(sqrt_enclosure(&mid, prec).mid());
            }
        }
        let max_den = BigInt::one() << den_bits as usize;
        // fix the first sign, flip the rest
        for mask in 0u64..(1u64 << (n - 1)) {
            let rhs: Vec<BigRational> = (0..n)
                .map(|i| {
                    if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                        -mags[i].clone()
                    } else {
                        mags[i].clone()
                    }
                })
                .collect();
            let mut coeffs = Vec::with_capacity(n);
            for row in &vinv {
                let mut acc = BigRational::zero();
                for (c, r) in row.iter().zip(&rhs) {
                    acc += c * r;
                }
                coeffs.push(bounded_reconstruct(&acc, &max_den));
            }
            let candidate = FieldElement { coeffs };
            if self.mul(&candidate, &candidate) == *d {
                let root = if self.sign(&candidate) < 0 {
                    self.neg(&candidate)
                } else {
                    candidate
                };
                return Some(root);
            }
        }
        None
    }

    /// Quadratic-residue scan. `Some(NotASquare)` on a certified witness,
    /// `None` if all informative primes up to the budget gave residues.
    fn witness_scan(&self, d: &FieldElement, budget: usize) -> Option<SqrtOutcome> {
        let mut used = 0usize;
        // precomputed primes first, then extend the search on demand
        let mut next_p = 3u64;
        let mut idx = 0usize;
        while used < budget {
            let wp;
            let wp_ref = if idx < self.witness_primes.len() {
                let r = &self.witness_primes[idx];
                next_p = r.p + 2;
                idx += 1;
                r
            } else {
                match next_witness_prime(&self.min_poly, &mut next_p) {
                    Some(w) => {
                        wp = w;
                        &wp
                    }
                    None => return None,
                }
            };
            match self.witness_check(d, wp_ref) {
                WitnessResult::NonResidue => return Some(SqrtOutcome::NotASquare),
                WitnessResult::Residue => used += 1,
                WitnessResult::NoInformation => {}
            }
        }
        None
    }

    fn witness_check(&self, d: &FieldElement, wp: &WitnessPrime) -> WitnessResult {
        let p = wp.p;
        // all denominators must be invertible mod p
        let mut coeffs_mod = Vec::with_capacity(d.coeffs.len());
        for c in &d.coeffs {
            let den = c.denom().mod_floor(&BigInt::from(p));
            let den = den.to_u64().unwrap();
            if den == 0 {
                return WitnessResult::NoInformation;
            }
            let num = c.numer().mod_floor(&BigInt::from(p)).to_u64().unwrap();
            coeffs_mod.push(mul_mod(num, pow_mod(den, p - 2, p), p));
        }
        let mut informative = false;
        for &t in &wp.roots {
            let mut v = 0u64;
            for c in coeffs_mod.iter().rev() {
                v = (mul_mod(v, t, p) + c) % p;
            }
            if v == 0 {
                continue;
            }
            informative = true;
            let e = pow_mod(v, (p - 1) / 2, p);
            if e == p - 1 {
                return WitnessResult::NonResidue;
            }
        }
        if informative {
            WitnessResult::Residue
        } else {
            WitnessResult::NoInformation
        }
    }

    // ---- printing ----

    /// Human-readable form in the CLI expression syntax, e.g.
    /// `"531/7*l^2 + 402/7*l - 319/7"`.
    pub fn to_human(&self, x: &FieldElement) -> String {
        self.check(x);
        let mut out = String::new();
        for (i, c) in x.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let neg = c.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let var = match i {
                0 => String::new(),
                1 => "l".to_string(),
                _ => format!("l^{}", i),
            };
            if i == 0 {
                out.push_str(&rational_string(&mag));
            } else if mag.is_one() {
                out.push_str(&var);
            } else {
                out.push_str(&format!("{}*{}", rational_string(&mag), var));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

enum WitnessResult {
    NonResidue,
    Residue,
    NoInformation,
}

fn interval_of(enc: &RootEnclosure) -> RatInterval {
    RatInterval::new(enc.lo.clone(), enc.hi.clone())
}

/// Exact inverse of the Vandermonde matrix `V[i][j] = nodes[i]^j`, built
/// from Lagrange basis polynomials: column `i` of the inverse holds the
/// coefficients of `L_i`, the polynomial that is 1 at `nodes[i]` and 0 at
/// the others. O(n^2) ring operations, no elimination blowup.
/// `None` if the nodes are not pairwise distinct.
fn vandermonde_inverse(nodes: &[BigRational]) -> Option<Vec<Vec<BigRational>>> {
    let n = nodes.len();
    // master = prod (y - node_j)
    let mut master = vec![BigRational::one()];
    for node in nodes {
        let mut next = vec![BigRational::zero(); master.len() + 1];
        for (i, c) in master.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * node;
        }
        master = next;
    }
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for (i, node) in nodes.iter().enumerate() {
        // synthetic division: master / (y - node), degree n-1
        let mut quot = vec![BigRational::zero(); n];
        let mut carry = master[n].clone();
        for j in (0..n).rev() {
            quot[j] = carry.clone();
            carry = &master[j] + &carry * node;
        }
        // normalize so L_i(node) = 1
        let mut value = BigRational::zero();
        for c in quot.iter().rev() {
            value = value * node + c;
        }
        if value.is_zero() {
            return None; // repeated node
        }
        let scale = value.recip();
        for (j, c) in quot.into_iter().enumerate() {
            inv[j][i] = c * &scale;
        }
    }
    Some(inv)
}

fn build_reduction_rows(min_poly: &IntPoly, degree: usize) -> Vec<Vec<BigInt>> {
    // lambda^degree = -(psi_0 + psi_1 lambda + ...)
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(degree.max(1) - 1);
    let base: Vec<BigInt> = min_poly[..degree].iter().map(|c| -c.clone()).collect();
    rows.push(base);
    for _ in 1..degree.saturating_sub(1) {
        let prev = rows.last().unwrap().clone();
        let mut next = vec![BigInt::zero(); degree];
        // multiply by lambda, then fold the overflow term
        let overflow = prev[degree - 1].clone();
        for j in 1..degree {
            next[j] = prev[j - 1].clone();
        }
        if !overflow.is_zero() {
            for (j, r) in rows[0].iter().enumerate() {
                next[j] += &overflow * r;
            }
        }
        rows.push(next);
    }
    rows
}

/// Isolating intervals for all real roots of psi, certified by exact sign
/// changes at rational separators between the (numerically known) roots
/// `2cos(k pi/q)`, `gcd(k, 2q) = 1`.
fn isolate_roots(min_poly: &IntPoly, q: u32, degree: usize) -> Vec<RootEnclosure> {
    let mut approx: Vec<f64> = (1..q)
        .filter(|k| num_integer::gcd(*k as u64, 2 * q as u64) == 1)
        .map(|k| 2.0 * (core::f64::consts::PI * k as f64 / q as f64).cos())
        .collect();
    approx.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(approx.len(), degree, "wrong number of conjugates");

    let mut separators = Vec::with_capacity(degree + 1);
    separators.push(BigRational::from(BigInt::from(-2)));
    for w in approx.windows(2) {
        separators.push(rational_from_f64((w[0] + w[1]) / 2.0));
    }
    separators.push(BigRational::from(BigInt::from(2)));

    let signs: Vec<i8> = separators
        .iter()
        .map(|s| poly::sign_of(&poly::eval_int_at_rational(min_poly, s)))
        .collect();
    let mut roots = Vec::with_capacity(degree);
    for i in 0..degree {
        assert!(
            signs[i] != 0 && signs[i] == -signs[i + 1],
            "root separators failed to certify a sign change"
        );
        let mut enc = RootEnclosure {
            lo: separators[i].clone(),
            hi: separators[i + 1].clone(),
            sign_lo: signs[i],
            exact: false,
        };
        // eager refinement to the base width
        let mut steps = 0;
        while !enc.exact && steps < 4 * BASE_ROOT_BITS {
            let mid = (&enc.lo + &enc.hi) / BigRational::from(BigInt::from(2));
            let s = poly::sign_of(&poly::eval_int_at_rational(min_poly, &mid));
            if s == 0 {
                enc.lo = mid.clone();
                enc.hi = mid;
                enc.exact = true;
                break;
            }
            if s == enc.sign_lo {
                enc.lo = mid;
            } else {
                enc.hi = mid;
            }
            steps += 1;
            if (&enc.hi - &enc.lo)
                < BigRational::new(BigInt::one(), BigInt::one() << BASE_ROOT_BITS as usize)
            {
                break;
            }
        }
        if !enc.exact {
            // clean dyadic endpoints keep later interval arithmetic cheap;
            // the outward shift is far below the root separation, so the
            // endpoint signs are unaffected
            enc.lo = interval::dyadic_floor(&enc.lo, BASE_ROOT_BITS as usize + 8);
            enc.hi = interval::dyadic_ceil(&enc.hi, BASE_ROOT_BITS as usize + 8);
        }
        roots.push(enc);
    }
    roots
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut i = 3;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 2;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Find the next odd prime `p >= *next_p` where psi is squarefree mod p and
/// has at least one root; advances `next_p` past it.
fn next_witness_prime(min_poly: &IntPoly, next_p: &mut u64) -> Option<WitnessPrime> {
    next_witness_prime_below(min_poly, next_p, 2_000_000)
}

fn next_witness_prime_below(
    min_poly: &IntPoly,
    next_p: &mut u64,
    limit: u64,
) -> Option<WitnessPrime> {
    let degree = min_poly.len() - 1;
    let mut p = *next_p;
    if p % 2 == 0 {
        p += 1;
    }
    while p < limit {
        if is_prime_u64(p) {
            let coeffs: Vec<u64> = min_poly
                .iter()
                .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
                .collect();
            if fp_poly_squarefree(&coeffs, p) && fp_poly_has_root(&coeffs, p) {
                let mut roots = Vec::new();
                for t in 0..p {
                    let mut v = 0u64;
                    for c in coeffs.iter().rev() {
                        v = (mul_mod(v, t, p) + c) % p;
                    }
                    if v == 0 {
                        roots.push(t);
                        if roots.len() == degree {
                            break;
                        }
                    }
                }
                *next_p = p + 2;
                return Some(WitnessPrime { p, roots });
            }
        }
        p += 2;
    }
    *next_p = p;
    None
}

/// Root-existence test via `deg gcd(x^p - x, psi) >= 1` over `F_p`, so that
/// rootless primes are rejected without the linear root scan.
fn fp_poly_has_root(coeffs: &[u64], p: u64) -> bool {
    let modulus: Vec<u64> = coeffs.to_vec();
    if modulus.len() <= 1 {
        return false;
    }
    // x^p mod psi by square and multiply
    let mut acc = vec![0u64, 1]; // x... start from exponent bits
    let mut result = vec![1u64];
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_poly_mulmod(&result, &acc, &modulus, p);
        }
        e >>= 1;
        if e > 0 {
            acc = fp_poly_mulmod(&acc, &acc, &modulus, p);
        }
    }
    // x^p - x
    let mut diff = result;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    while matches!(diff.last(), Some(0)) {
        diff.pop();
    }
    if diff.is_empty() {
        return true; // psi divides x^p - x: splits completely
    }
    fp_poly_gcd_degree(&modulus, &diff, p) >= 1
}

fn fp_poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ac) in a.iter().enumerate() {
        if ac == 0 {
            continue;
        }
        for (j, &bc) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(ac, bc, p)) % p;
        }
    }
    // reduce mod monic-ish modulus
    let lead_inv = pow_mod(*modulus.last().unwrap(), p - 2, p);
    while prod.len() >= modulus.len() {
        let k = prod.len() - modulus.len();
        let f = mul_mod(*prod.last().unwrap(), lead_inv, p);
        for (i, &mc) in modulus.iter().enumerate() {
            let sub = mul_mod(f, mc, p);
            prod[k + i] = (prod[k + i] + p - sub) % p;
        }
        while matches!(prod.last(), Some(0)) {
            prod.pop();
        }
        if prod.is_empty() {
            break;
        }
    }
    prod
}

fn fp_poly_gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let trim = |v: &mut Vec<u64>| {
        while matches!(v.last(), Some(0)) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lead_inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let f = mul_mod(*a.last().unwrap(), lead_inv, p);
            for (i, &bc) in b.iter().enumerate() {
                let sub = mul_mod(f, bc, p);
                a[k + i] = (a[k + i] + p - sub) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Bounded-work prime collection at construction time: whatever shows up
/// below the scan limit, capped at `count`. The sqrt path extends the search
/// on demand when it actually needs a certificate.
fn find_witness_primes(min_poly: &IntPoly, count: usize, start: u64) -> Vec<WitnessPrime> {
    let mut out = Vec::with_capacity(count);
    let mut next_p = start;
    while out.len() < count {
        match next_witness_prime_below(min_poly, &mut next_p, 5_000) {
            Some(w) => out.push(w),
            None => break,
        }
    }
    out
}

fn fp_poly_squarefree(coeffs: &[u64], p: u64) -> bool {
    // gcd(f, f') over F_p must be constant
    let mut a: Vec<u64> = coeffs.to_vec();
    let mut b: Vec<u64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| mul_mod(i as u64 % p, *c, p))
        .collect();
    let trim = |v: &mut Vec<u64>| {
        while matches!(v.last(), Some(0)) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lead_inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let f = mul_mod(*a.last().unwrap(), lead_inv, p);
            for (i, bc) in b.iter().enumerate() {
                let sub = mul_mod(f, *bc, p);
                a[k + i] = (a[k + i] + p - sub) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn elem(ctx: &FieldContext, coeffs: &[(i64, i64)]) -> FieldElement {
        ctx.from_power_coeffs(
            &coeffs
                .iter()
                .map(|&(n, d)| r(n, d))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn min_polys_for_small_q() {
        let want: &[(u32, &[i64])] = &[
            (3, &[-1, 1]),
            (4, &[-2, 0, 1]),
            (5, &[-1, -1, 1]),
            (6, &[-3, 0, 1]),
            (7, &[1, -2, -1, 1]),
            (18, &[-3, 0, 9, 0, -6, 0, 1]),
        ];
        for (q, coeffs) in want {
            let ctx = FieldContext::new(*q);
            let got: Vec<BigInt> = ctx.min_poly().to_vec();
            let expect: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
            assert_eq!(got, expect, "q = {}", q);
            assert_eq!(ctx.degree(), coeffs.len() - 1);
        }
    }

    #[test]
    fn psi_of_lambda_is_zero() {
        for q in 3..=30 {
            let ctx = FieldContext::new(q);
            let l = ctx.lambda();
            let mut acc = ctx.zero();
            let mut power = ctx.one();
            for c in ctx.min_poly().to_vec() {
                acc = ctx.add(&acc, &ctx.scale(&power, &BigRational::from(c)));
                power = ctx.mul(&power, &l);
            }
            assert!(acc.is_zero(), "psi(lambda) != 0 for q = {}", q);
        }
    }

    #[test]
    fn lambda_cubed_reduction_q7() {
        // lambda^3 = lambda^2 + 2 lambda - 1
        let ctx = FieldContext::new(7);
        let l = ctx.lambda();
        let l3 = ctx.mul(&ctx.mul(&l, &l), &l);
        assert_eq!(l3, elem(&ctx, &[(-1, 1), (2, 1), (1, 1)]));
    }

    #[test]
    fn field_inverse_roundtrip() {
        let ctx = FieldContext::new(7);
        let x = elem(&ctx, &[(3, 2), (-1, 1), (5, 7)]);
        let inv = ctx.inv(&x).unwrap();
        assert!(ctx.mul(&x, &inv).is_one());
        assert_eq!(ctx.inv(&ctx.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn lambda_prime_is_conjugate_q7() {
        // psi(2 - lambda^2) = 0
        let ctx = FieldContext::new(7);
        let lp = ctx.named("lp").unwrap().clone();
        let mut acc = ctx.zero();
        let mut power = ctx.one();
        for c in ctx.min_poly().to_vec() {
            acc = ctx.add(&acc, &ctx.scale(&power, &BigRational::from(c)));
            power = ctx.mul(&power, &lp);
        }
        assert!(acc.is_zero());
        // and it is negative at the distinguished root (~ -1.247)
        assert_eq!(ctx.sign(&lp), -1);
    }

    #[test]
    fn sign_and_compare() {
        let ctx = FieldContext::new(7);
        let l = ctx.lambda();
        assert_eq!(ctx.sign(&l), 1);
        assert_eq!(ctx.sign(&ctx.zero()), 0);
        assert_eq!(ctx.compare(&l, &ctx.one()), Ordering::Greater);
        let half_l = ctx.scale(&l, &r(1, 2));
        assert_eq!(ctx.compare(&half_l, &half_l), Ordering::Equal);
        // 671 - 372 lambda ~ 0.679 < lambda/2 ~ 0.901
        let x = ctx.sub(&ctx.from_int(671), &ctx.scale_int(&l, 372));
        assert_eq!(ctx.compare(&x, &half_l), Ordering::Less);
        assert_eq!(ctx.sign(&x), 1);
    }

    #[test]
    fn embeddings_q7() {
        let ctx = FieldContext::new(7);
        let l = ctx.lambda();
        let embeds = ctx.embed_all(&l, 40);
        let vals: Vec<f64> = embeds.iter().map(|e| e.to_f64()).collect();
        let want = [-1.2469796037, 0.4450418679, 1.8019377358];
        for (v, w) in vals.iter().zip(want.iter()) {
            assert!((v - w).abs() < 1e-9, "got {:?}", vals);
        }
        // distinguished root is the largest
        assert_eq!(ctx.distinguished_root(), 2);
    }

    #[test]
    fn embed_u18() {
        let ctx = FieldContext::new(18);
        let u = ctx.named("u18").unwrap().clone();
        let v = ctx.to_f64(&u);
        assert!((v - 15.5817).abs() < 1e-3, "u18 ~ {}", v);
    }

    #[test]
    fn sqrt_of_lambda_squared() {
        let ctx = FieldContext::new(7);
        let l = ctx.lambda();
        let l2 = ctx.mul(&l, &l);
        match ctx.sqrt(&l2) {
            SqrtOutcome::Root(root) => assert_eq!(root, l),
            other => panic!("expected root, got {:?}", other),
        }
    }

    #[test]
    fn sqrt_two_not_square_in_cubic() {
        let ctx = FieldContext::new(7);
        assert_eq!(ctx.sqrt(&ctx.from_int(2)), SqrtOutcome::NotASquare);
    }

    #[test]
    fn sqrt_rational_case() {
        let ctx = FieldContext::new(3);
        assert_eq!(
            ctx.sqrt(&ctx.from_rational(r(9, 4))),
            SqrtOutcome::Root(ctx.from_rational(r(3, 2)))
        );
        assert_eq!(ctx.sqrt(&ctx.from_int(2)), SqrtOutcome::NotASquare);
        assert_eq!(ctx.sqrt(&ctx.from_int(-1)), SqrtOutcome::NotASquare);
    }

    #[test]
    fn sqrt_u18_discriminant() {
        // (16 l^4 + 2)^2 - 4 = (u^2 - u^-2)^2
        let ctx = FieldContext::new(18);
        let l = ctx.lambda();
        let l4 = ctx.pow(&l, 4).unwrap();
        let tr = ctx.add(&ctx.scale_int(&l4, 16), &ctx.from_int(2));
        let disc = ctx.sub(&ctx.mul(&tr, &tr), &ctx.from_int(4));
        let u = ctx.named("u18").unwrap().clone();
        let u2 = ctx.mul(&u, &u);
        let expected = ctx.sub(&u2, &ctx.inv(&u2).unwrap());
        match ctx.sqrt(&disc) {
            SqrtOutcome::Root(root) => {
                assert!(root == expected || root == ctx.neg(&expected));
            }
            other => panic!("expected root, got {:?}", other),
        }
    }

    #[test]
    fn lambda_q_lambda2_membership() {
        let ctx = FieldContext::new(18);
        let l = ctx.lambda();
        let l3 = ctx.pow(&l, 3).unwrap();
        assert!(ctx.in_lambda_q_lambda2(&l3));
        assert!(!ctx.in_lambda_q_lambda2(&ctx.one()));
        assert!(ctx.in_q_lambda2(&ctx.one()));
        assert!(!ctx.in_q_lambda2(&l3));
        let ctx7 = FieldContext::new(7);
        assert!(ctx7.in_lambda_q_lambda2(&ctx7.from_int(5)));
    }

    #[test]
    fn human_format() {
        let ctx = FieldContext::new(7);
        let x = elem(&ctx, &[(-319, 7), (402, 7), (531, 7)]);
        assert_eq!(ctx.to_human(&x), "531/7*l^2 + 402/7*l - 319/7");
        assert_eq!(ctx.to_human(&ctx.zero()), "0");
        let l2m1 = ctx.named("l1").unwrap();
        assert_eq!(ctx.to_human(l2m1), "l^2 - 1");
    }

    #[test]
    fn coeff_string_roundtrip() {
        let ctx = FieldContext::new(7);
        let x = elem(&ctx, &[(-319, 7), (402, 7), (531, 7)]);
        let strings = x.coeff_strings();
        assert_eq!(strings, vec!["-319/7", "402/7", "531/7"]);
        let back = FieldElement::from_coeff_strings(&strings).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn named_constants_q7() {
        let ctx = FieldContext::new(7);
        let u7 = ctx.named("u7").unwrap();
        // u7 = l^2 + l satisfies u^2 - (l^2+2) u + 1 = 0
        let l = ctx.lambda();
        let l2 = ctx.mul(&l, &l);
        let tr = ctx.add(&l2, &ctx.from_int(2));
        let check = ctx.add(
            &ctx.sub(&ctx.mul(u7, u7), &ctx.mul(&tr, u7)),
            &ctx.one(),
        );
        assert!(check.is_zero());
    }

    #[test]
    fn degree_counts() {
        // phi(2q)/2
        let cases = [(3u32, 1usize), (7, 3), (9, 3), (12, 4), (18, 6), (30, 8)];
        for (q, d) in cases {
            assert_eq!(FieldContext::new(q).degree(), d, "q = {}", q);
        }
    }

    #[test]
    fn f64_of_huge_element() {
        let ctx = FieldContext::new(7);
        let big = ctx.from_rational(BigRational::from(
            BigInt::from_u128(10).unwrap().pow(40),
        ));
        let v = ctx.to_f64(&big);
        assert!((v.log10() - 40.0).abs() < 1e-6);
    }
}
