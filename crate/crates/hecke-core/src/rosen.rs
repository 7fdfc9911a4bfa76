//! The Rosen lambda-continued fraction algorithm, run in exact arithmetic.
//!
//! A point `x` expands as `x = a_0 lambda - 1/(a_1 lambda - ...)` where every
//! remainder is pinned to the half-open interval `(-lambda/2, lambda/2]`.
//! The expansion either terminates (the point is a cusp), revisits an exact
//! tail (the point is a hyperbolic fixed point and the digit stream is
//! eventually periodic), or runs out of budget. Tail comparisons are exact,
//! so the first revisit yields both the minimal preperiod and the minimal
//! period.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{FieldContext, FieldElement};
use crate::group::{self, classify, ElementKind, GroupMatrix, ProjPoint};
use crate::interval::rational_ceil;
use crate::words::{canonical_cycle, symmetry_class, DigitSeq};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExpansionStatus {
    /// The expansion terminated: the input is a cusp.
    Finite,
    /// The tail at `preperiod` repeats with the given minimal period.
    Preperiodic { preperiod: usize, period: Vec<BigInt> },
    /// Step budget exhausted without termination or a repeat.
    Undetermined,
}

/// Result of running the lambda-continued fraction algorithm.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CFExpansion {
    pub digits: Vec<BigInt>,
    pub status: ExpansionStatus,
    /// Number of digit steps actually run.
    pub steps: usize,
    /// The purely periodic tail point, when preperiodic.
    pub periodic_tail: Option<FieldElement>,
    /// All visited tails, when recording was requested.
    pub tail_trace: Option<Vec<FieldElement>>,
}

impl CFExpansion {
    pub fn is_finite(&self) -> bool {
        matches!(self.status, ExpansionStatus::Finite)
    }

    pub fn period(&self) -> Option<&[BigInt]> {
        match &self.status {
            ExpansionStatus::Preperiodic { period, .. } => Some(period),
            _ => None,
        }
    }

    /// Period as a small-integer digit sequence, when it fits.
    pub fn period_seq(&self) -> Option<DigitSeq> {
        let period = self.period()?;
        let mut out = Vec::with_capacity(period.len());
        for d in period {
            out.push(i64::try_from(d).ok()?);
        }
        Some(DigitSeq::new(out))
    }
}

// Serialization goes through a wire form with decimal-string digits, since
// the digits themselves can exceed machine integers.
#[derive(Serialize, Deserialize)]
struct CFExpansionWire {
    digits: Vec<String>,
    status: StatusWire,
    steps: usize,
    periodic_tail: Option<FieldElement>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum StatusWire {
    Finite,
    Preperiodic { preperiod: usize, period: Vec<String> },
    Undetermined,
}

impl From<CFExpansion> for CFExpansionWire {
    fn from(e: CFExpansion) -> Self {
        CFExpansionWire {
            digits: e.digits.iter().map(|d| d.to_string()).collect(),
            status: match e.status {
                ExpansionStatus::Finite => StatusWire::Finite,
                ExpansionStatus::Preperiodic { preperiod, period } => StatusWire::Preperiodic {
                    preperiod,
                    period: period.iter().map(|d| d.to_string()).collect(),
                },
                ExpansionStatus::Undetermined => StatusWire::Undetermined,
            },
            steps: e.steps,
            periodic_tail: e.periodic_tail,
        }
    }
}

impl TryFrom<CFExpansionWire> for CFExpansion {
    type Error = String;

    fn try_from(w: CFExpansionWire) -> Result<Self, String> {
        let parse = |s: &String| {
            s.parse::<BigInt>()
                .map_err(|e| alloc::format!("bad digit {:?}: {}", s, e))
        };
        let digits = w.digits.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let status = match w.status {
            StatusWire::Finite => ExpansionStatus::Finite,
            StatusWire::Preperiodic { preperiod, period } => ExpansionStatus::Preperiodic {
                preperiod,
                period: period.iter().map(parse).collect::<Result<Vec<_>, _>>()?,
            },
            StatusWire::Undetermined => ExpansionStatus::Undetermined,
        };
        Ok(CFExpansion {
            digits,
            status,
            steps: w.steps,
            periodic_tail: w.periodic_tail,
            tail_trace: None,
        })
    }
}

impl Serialize for CFExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CFExpansionWire::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CFExpansion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = CFExpansionWire::deserialize(d)?;
        CFExpansion::try_from(wire).map_err(serde::de::Error::custom)
    }
}

/// Orbit identity derived from an expansion.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum OrbitKind {
    /// Finite expansion: the point lies in the single cusp orbit.
    Cusp,
    /// Eventually periodic: labeled by the rotation class of the period.
    /// `special` is `None` only if the squareness budget ran out.
    HyperbolicClass {
        cycle: DigitSeq,
        special: Option<bool>,
    },
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OrbitLabel {
    pub kind: OrbitKind,
    /// Period up to rotation, negation, and reversal, for table-style
    /// reporting.
    pub symmetry_label: Option<DigitSeq>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PeriodError {
    NotHyperbolic,
    Undetermined,
}

impl fmt::Display for PeriodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodError::NotHyperbolic => write!(f, "period matrix is not hyperbolic"),
            PeriodError::Undetermined => write!(f, "specialness undetermined"),
        }
    }
}

pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// The unique digit `a` with `x - a lambda` in `(-lambda/2, lambda/2]`,
/// together with the remainder.
///
/// The digit and the interval condition are certified with interval
/// arithmetic whenever the enclosures separate cleanly; only boundary-grazing
/// cases fall through to exact sign computations, which then walk `a` into
/// place.
pub fn rosen_digit(ctx: &FieldContext, x: &FieldElement) -> (BigInt, FieldElement) {
    let dist = ctx.distinguished_root();
    let lam = ctx.lambda();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut prec = 8u32;
    let mut candidate: Option<BigInt> = None;
    while candidate.is_none() {
        let xe = ctx.embed_at(x, dist, prec);
        let le = ctx.embed_at(&lam, dist, prec.max(48));
        let ratio = xe.div(&le);
        let lo = rational_ceil(&(&ratio.lo - &half));
        let hi = rational_ceil(&(&ratio.hi - &half));
        if lo == hi {
            let a_rat = BigRational::from(lo.clone());
            // certified containment: enclosure of x - a lambda strictly
            // inside the certified bounds for (-lambda/2, lambda/2)
            let r_enc = xe.add(&le.mul_point(&a_rat).neg());
            let half_enc = le.mul_point(&half);
            if r_enc.hi < half_enc.lo && r_enc.lo > -half_enc.lo.clone() {
                let r = ctx.sub(x, &ctx.scale(&lam, &a_rat));
                return (lo, r);
            }
            candidate = Some(lo);
        } else if prec >= 256 && ratio.width() <= quarter {
            // boundary-grazing; the exact walk settles the last +-1
            candidate = Some(rational_ceil(&(ratio.mid() - &half)));
        } else {
            prec = prec.saturating_mul(2);
        }
    }
    // exact fallback around the candidate digit
    let half_lam = ctx.scale(&lam, &half);
    let mut a = candidate.unwrap();
    loop {
        let r = ctx.sub(x, &ctx.scale(&lam, &BigRational::from(a.clone())));
        if ctx.sign(&ctx.sub(&r, &half_lam)) > 0 {
            a += 1;
            continue;
        }
        if ctx.sign(&ctx.add(&r, &half_lam)) <= 0 {
            a -= 1;
            continue;
        }
        return (a, r);
    }
}

/// Run the lambda-continued fraction algorithm.
///
/// Infinity is the cusp representative and expands as the empty finite
/// expansion. Cycle detection compares exact tails, so a reported period is
/// minimal and starts at the minimal preperiod.
pub fn expand(ctx: &FieldContext, point: &ProjPoint, max_steps: usize) -> CFExpansion {
    expand_with_options(ctx, point, max_steps, false)
}

pub fn expand_with_options(
    ctx: &FieldContext,
    point: &ProjPoint,
    max_steps: usize,
    record_tails: bool,
) -> CFExpansion {
    assert!(max_steps >= 1);
    let mut x = match point {
        ProjPoint::Infinity => {
            return CFExpansion {
                digits: Vec::new(),
                status: ExpansionStatus::Finite,
                steps: 0,
                periodic_tail: None,
                tail_trace: record_tails.then(Vec::new),
            }
        }
        ProjPoint::Finite(x) => x.clone(),
    };
    let mut digits: Vec<BigInt> = Vec::new();
    let mut seen: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
    let mut tails: Vec<FieldElement> = Vec::new();
    for step in 0..max_steps {
        if let Some(&j) = seen.get(x.coeffs()) {
            let period = digits[j..].to_vec();
            debug_assert!(!period.is_empty());
            return CFExpansion {
                digits,
                status: ExpansionStatus::Preperiodic {
                    preperiod: j,
                    period,
                },
                steps: step,
                periodic_tail: Some(tails[j].clone()),
                tail_trace: record_tails.then_some(tails),
            };
        }
        seen.insert(x.coeffs().to_vec(), step);
        tails.push(x.clone());
        let (a, r) = rosen_digit(ctx, &x);
        debug_assert!(step == 0 || !a.is_zero(), "nonzero digits after index 0");
        digits.push(a);
        if r.is_zero() {
            return CFExpansion {
                steps: digits.len(),
                digits,
                status: ExpansionStatus::Finite,
                periodic_tail: None,
                tail_trace: record_tails.then_some(tails),
            };
        }
        x = ctx.neg(&ctx.inv(&r).expect("nonzero remainder"));
    }
    CFExpansion {
        digits,
        status: ExpansionStatus::Undetermined,
        steps: max_steps,
        periodic_tail: None,
        tail_trace: record_tails.then_some(tails),
    }
}

/// Expand a finite field point.
pub fn expand_element(ctx: &FieldContext, x: &FieldElement, max_steps: usize) -> CFExpansion {
    expand(ctx, &ProjPoint::Finite(x.clone()), max_steps)
}

/// Exact value of a finite expansion `a_0 lambda - 1/(a_1 lambda - ...)`.
pub fn evaluate_finite(ctx: &FieldContext, digits: &[BigInt]) -> ProjPoint {
    let lam = ctx.lambda();
    let mut val = ProjPoint::Infinity;
    for a in digits.iter().rev() {
        let al = ctx.scale(&lam, &BigRational::from(a.clone()));
        val = match val {
            ProjPoint::Infinity => ProjPoint::Finite(al),
            ProjPoint::Finite(z) => {
                if z.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(ctx.sub(&al, &ctx.inv(&z).unwrap()))
                }
            }
        };
    }
    val
}

pub fn evaluate_finite_i64(ctx: &FieldContext, digits: &[i64]) -> ProjPoint {
    let big: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
    evaluate_finite(ctx, &big)
}

/// The fixing matrix `S T^{-a_n} ... S T^{-a_0}` of the purely periodic
/// point with period `(a_0, ..., a_n)`.
pub fn period_matrix(ctx: &FieldContext, period: &[BigInt]) -> GroupMatrix {
    let s = group::generator(ctx, group::Gen::S);
    let mut acc = GroupMatrix::identity(ctx);
    for a in period.iter().rev() {
        acc = acc.mul(ctx, &s).mul(ctx, &group::t_power(ctx, &(-a)));
    }
    acc
}

pub fn period_matrix_seq(ctx: &FieldContext, period: &DigitSeq) -> GroupMatrix {
    let big: Vec<BigInt> = period.digits().iter().map(|&d| BigInt::from(d)).collect();
    period_matrix(ctx, &big)
}

/// The purely periodic point realizing a candidate period, i.e. the fixed
/// point of the period matrix that the continued-fraction dynamics repel
/// from. Requires the matrix to be special hyperbolic.
pub fn evaluate_periodic(ctx: &FieldContext, period: &DigitSeq) -> Result<ProjPoint, PeriodError> {
    let m = period_matrix_seq(ctx, period);
    let spec = classify(ctx, &m).map_err(|_| PeriodError::Undetermined)?;
    if spec.kind != ElementKind::Hyperbolic {
        return Err(PeriodError::NotHyperbolic);
    }
    if !spec.special {
        return Err(PeriodError::NotHyperbolic);
    }
    let fps =
        group::fixed_points_with_spec(ctx, &m, &spec).map_err(|_| PeriodError::Undetermined)?;
    Ok(fps.repelling)
}

/// Orbit label of an expansion: cusp, a rotation class of the period, or
/// unknown.
pub fn orbit_label(ctx: &FieldContext, e: &CFExpansion) -> OrbitLabel {
    match &e.status {
        ExpansionStatus::Finite => OrbitLabel {
            kind: OrbitKind::Cusp,
            symmetry_label: None,
        },
        ExpansionStatus::Undetermined => OrbitLabel {
            kind: OrbitKind::Unknown,
            symmetry_label: None,
        },
        ExpansionStatus::Preperiodic { .. } => {
            let Some(seq) = e.period_seq() else {
                // period digits beyond machine integers; label honestly
                return OrbitLabel {
                    kind: OrbitKind::Unknown,
                    symmetry_label: None,
                };
            };
            let m = period_matrix_seq(ctx, &seq);
            let special = classify(ctx, &m).ok().map(|s| s.special);
            OrbitLabel {
                kind: OrbitKind::HyperbolicClass {
                    cycle: canonical_cycle(&seq),
                    special,
                },
                symmetry_label: Some(symmetry_class(&seq)),
            }
        }
    }
}

/// Whether a candidate digit cycle is realized as an actual continued
/// fraction period: the fixed point of its matrix must expand purely
/// periodically with a rotation of the candidate as its period.
pub fn validate_period(ctx: &FieldContext, candidate: &DigitSeq) -> Result<bool, PeriodError> {
    let m = period_matrix_seq(ctx, candidate);
    let spec = classify(ctx, &m).map_err(|_| PeriodError::Undetermined)?;
    if spec.kind != ElementKind::Hyperbolic {
        return Err(PeriodError::NotHyperbolic);
    }
    if !spec.special {
        return Ok(false);
    }
    let fps =
        group::fixed_points_with_spec(ctx, &m, &spec).map_err(|_| PeriodError::Undetermined)?;
    let point = match fps.repelling {
        ProjPoint::Finite(x) => x,
        ProjPoint::Infinity => return Ok(false),
    };
    let budget = 8 * candidate.len() + 64;
    let e = expand_element(ctx, &point, budget);
    match (&e.status, e.period_seq()) {
        (ExpansionStatus::Preperiodic { preperiod: 0, .. }, Some(found)) => {
            Ok(canonical_cycle(&found) == canonical_cycle(candidate))
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::words::DigitSeq;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&d| BigInt::from(d)).collect()
    }

    #[test]
    fn digit_of_lambda() {
        let ctx = FieldContext::new(7);
        let (a, r) = rosen_digit(&ctx, &ctx.lambda());
        assert_eq!(a, BigInt::one());
        assert!(r.is_zero());
    }

    #[test]
    fn digit_at_boundary() {
        // x = lambda/2 stays put: the interval is half-open on the right
        let ctx = FieldContext::new(7);
        let half_lam = ctx.scale(
            &ctx.lambda(),
            &BigRational::new(BigInt::one(), BigInt::from(2)),
        );
        let (a, r) = rosen_digit(&ctx, &half_lam);
        assert!(a.is_zero());
        assert_eq!(r, half_lam);
    }

    #[test]
    fn digit_of_671() {
        let ctx = FieldContext::new(7);
        let (a, r) = rosen_digit(&ctx, &ctx.from_int(671));
        assert_eq!(a, BigInt::from(372));
        assert_eq!(
            r,
            ctx.sub(&ctx.from_int(671), &ctx.scale_int(&ctx.lambda(), 372))
        );
    }

    #[test]
    fn expand_lambda_sq_minus_one_q7() {
        let ctx = FieldContext::new(7);
        let x = ctx.named("l1").unwrap().clone();
        let e = expand_element(&ctx, &x, 100);
        match &e.status {
            ExpansionStatus::Preperiodic { preperiod, period } => {
                assert_eq!(*preperiod, 0);
                assert_eq!(*period, big(&[1, -1]));
            }
            other => panic!("unexpected status {:?}", other),
        }
        assert_eq!(e.periodic_tail.unwrap(), x);
    }

    #[test]
    fn expand_half_q3() {
        let ctx = FieldContext::new(3);
        let x = ctx.from_rational(BigRational::new(BigInt::one(), BigInt::from(2)));
        let e = expand_element(&ctx, &x, 100);
        assert!(e.is_finite());
        assert_eq!(e.digits, big(&[0, -2]));
        // reconstruction
        assert_eq!(
            evaluate_finite(&ctx, &e.digits),
            ProjPoint::Finite(x)
        );
    }

    #[test]
    fn expand_infinity() {
        let ctx = FieldContext::new(7);
        let e = expand(&ctx, &ProjPoint::Infinity, 10);
        assert!(e.is_finite());
        assert!(e.digits.is_empty());
        assert_eq!(evaluate_finite(&ctx, &[]), ProjPoint::Infinity);
    }

    #[test]
    fn expand_2lambda_plus_2_q9() {
        let ctx = FieldContext::new(9);
        let x = ctx.add(&ctx.scale_int(&ctx.lambda(), 2), &ctx.from_int(2));
        let e = expand_element(&ctx, &x, 1000);
        let seq = e.period_seq().expect("preperiodic");
        assert_eq!(
            symmetry_class(&seq),
            symmetry_class(&DigitSeq::new(vec![3, -4, 1, 1]))
        );
    }

    #[test]
    fn expand_671_is_special_hyperbolic() {
        let ctx = FieldContext::new(7);
        let e = expand_element(&ctx, &ctx.from_int(671), 10_000);
        let label = orbit_label(&ctx, &e);
        match label.kind {
            OrbitKind::HyperbolicClass { ref cycle, special } => {
                assert_eq!(special, Some(true));
                // distinct from the orbit of lambda^2 - 1
                assert_ne!(*cycle, canonical_cycle(&DigitSeq::new(vec![1, -1])));
            }
            other => panic!("expected hyperbolic class, got {:?}", other),
        }
    }

    #[test]
    fn evaluate_finite_examples() {
        let ctx = FieldContext::new(3);
        assert_eq!(
            evaluate_finite_i64(&ctx, &[0]),
            ProjPoint::Finite(ctx.zero())
        );
        let ctx7 = FieldContext::new(7);
        assert_eq!(
            evaluate_finite_i64(&ctx7, &[1]),
            ProjPoint::Finite(ctx7.lambda())
        );
        assert_eq!(
            evaluate_finite_i64(&ctx, &[0, -2]),
            ProjPoint::Finite(ctx.from_rational(BigRational::new(
                BigInt::one(),
                BigInt::from(2)
            )))
        );
    }

    #[test]
    fn finite_reconstruction_roundtrip() {
        let ctx = FieldContext::new(7);
        // arbitrary finite expansion digits
        let digits = big(&[3, 2, -1, 4, -2]);
        if let ProjPoint::Finite(x) = evaluate_finite(&ctx, &digits) {
            let e = expand_element(&ctx, &x, 100);
            assert!(e.is_finite());
            assert_eq!(evaluate_finite(&ctx, &e.digits), ProjPoint::Finite(x));
        } else {
            panic!("expected finite value");
        }
    }

    #[test]
    fn period_matrix_q7() {
        let ctx = FieldContext::new(7);
        let m = period_matrix(&ctx, &big(&[1, -1]));
        // S T S T^{-1}
        let expect = group::word_to_matrix(
            &ctx,
            &[
                (group::Gen::S, 1),
                (group::Gen::T, 1),
                (group::Gen::S, 1),
                (group::Gen::T, -1),
            ],
        );
        assert_eq!(m, expect);
        // fixes lambda^2 - 1
        let x = ctx.named("l1").unwrap().clone();
        assert_eq!(
            group::mobius_apply(&ctx, &m, &ProjPoint::Finite(x.clone())),
            ProjPoint::Finite(x)
        );
    }

    #[test]
    fn period_matrix_trace_q18() {
        let ctx = FieldContext::new(18);
        let m = period_matrix(&ctx, &big(&[2, 2, -2, -2]));
        let l4 = ctx.pow(&ctx.lambda(), 4).unwrap();
        let want = ctx.add(&ctx.scale_int(&l4, 16), &ctx.from_int(2));
        assert_eq!(m.trace(&ctx), want);
    }

    #[test]
    fn validate_simple_periods() {
        let ctx7 = FieldContext::new(7);
        assert_eq!(
            validate_period(&ctx7, &DigitSeq::new(vec![1, -1])),
            Ok(true)
        );
        let ctx18 = FieldContext::new(18);
        assert_eq!(
            validate_period(&ctx18, &DigitSeq::new(vec![2, 2, -2, -2])),
            Ok(true)
        );
        // (1,1,1,1) gives an elliptic word
        assert_eq!(
            validate_period(&ctx18, &DigitSeq::new(vec![1, 1, 1, 1])),
            Err(PeriodError::NotHyperbolic)
        );
        // a non-primitive candidate is never a minimal period
        assert_eq!(
            validate_period(&ctx18, &DigitSeq::new(vec![2, 2, -2, -2, 2, 2, -2, -2])),
            Ok(false)
        );
    }

    #[test]
    fn shift_compatibility() {
        let ctx = FieldContext::new(7);
        let x = ctx.from_int(671);
        let e = expand_with_options(&ctx, &ProjPoint::Finite(x), 200, true);
        let tails = e.tail_trace.as_ref().unwrap();
        // expansion of the tail at step i carries the digit suffix
        let i = 3.min(tails.len() - 1);
        let sub = expand_element(&ctx, &tails[i], 200);
        assert_eq!(&sub.digits[..5], &e.digits[i..i + 5]);
    }

    #[test]
    fn expansion_serde_roundtrip() {
        let ctx = FieldContext::new(7);
        let e = expand_element(&ctx, &ctx.named("l1").unwrap().clone(), 50);
        let json = serde_json::to_string(&e).unwrap();
        let back: CFExpansion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn undetermined_on_tiny_budget() {
        let ctx = FieldContext::new(11);
        let e = expand_element(&ctx, &ctx.from_int(2), 5);
        assert_eq!(e.status, ExpansionStatus::Undetermined);
        assert_eq!(e.steps, 5);
        let label = orbit_label(&ctx, &e);
        assert_eq!(label.kind, OrbitKind::Unknown);
    }
}
