//! Trace identities, the three-term trace recurrence for products
//! `M_k = D^k C B^k A`, and verification of parametric families of special
//! hyperbolic elements.
//!
//! A family is verified by checking the recurrence hypotheses exactly
//! (`tr B = tr D`, and the three base traces are `tr B^n`, `tr B^{n+2}`,
//! `tr B^{n+4}` for the family unit), then confirming for each k that the
//! member is special hyperbolic with the predicted trace, that its fixed
//! points lie in `lambda Q(lambda^2)`, and that distinct members are
//! pairwise non-conjugate.

use alloc::string::String;
use alloc::{vec, vec::Vec};
use core::fmt;

use num_traits::Float;
use crate::field::{FieldContext, FieldElement};
use crate::group::{
    classify, fixed_points_with_spec, m_word, ElementKind, GroupMatrix, ProjPoint,
};
use crate::words::{conjugate_test, digits_to_word, Convention, DigitSeq, FamilySpec};

/// Exact check of `tr(AB) + tr(AB^{-1}) = tr(A) tr(B)`.
pub fn trace_identity_check(ctx: &FieldContext, a: &GroupMatrix, b: &GroupMatrix) -> bool {
    let lhs = ctx.add(
        &a.mul(ctx, b).trace(ctx),
        &a.mul(ctx, &b.inverse(ctx)).trace(ctx),
    );
    let rhs = ctx.mul(&a.trace(ctx), &b.trace(ctx));
    lhs == rhs
}

/// The four word matrices of a family.
pub struct FamilyMatrices {
    pub a: GroupMatrix,
    pub b: GroupMatrix,
    pub c: GroupMatrix,
    pub d: GroupMatrix,
}

pub fn family_matrices(ctx: &FieldContext, f: &FamilySpec) -> FamilyMatrices {
    FamilyMatrices {
        a: m_word(ctx, f.a.digits()),
        b: m_word(ctx, f.b.digits()),
        c: m_word(ctx, f.c.digits()),
        d: m_word(ctx, f.d.digits()),
    }
}

/// `M_k = D^k C B^k A` by binary exponentiation.
pub fn family_matrix(ctx: &FieldContext, f: &FamilySpec, k: usize) -> GroupMatrix {
    let fm = family_matrices(ctx, f);
    let bk = fm.b.pow(ctx, k as i64);
    let dk = fm.d.pow(ctx, k as i64);
    dk.mul(ctx, &fm.c).mul(ctx, &bk).mul(ctx, &fm.a)
}

/// Exact `tr(D^k C B^k A)`.
pub fn family_trace(ctx: &FieldContext, f: &FamilySpec, k: usize) -> FieldElement {
    family_matrix(ctx, f, k).trace(ctx)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    /// `tr B != tr D`: the recurrence hypothesis fails.
    TraceHypothesis,
    /// B itself is not special hyperbolic, so there is no family unit.
    BaseNotSpecial,
    /// The base traces are not `u^n, u^{n+2}, u^{n+4}` powers of the unit.
    ExponentPattern { index: usize },
    /// Direct trace of `M_k` disagrees with the predicted unit power.
    TraceMismatch { k: usize },
    /// `M_k` is not special hyperbolic.
    NotSpecial { k: usize },
    /// A fixed point of `M_k` fell outside `lambda Q(lambda^2)`.
    FixedPointNotInSubfield { k: usize },
    /// Two members are conjugate; the family does not separate orbits.
    Conjugate { k1: usize, k2: usize },
    /// Squareness budget exhausted at member `k`.
    Undetermined { k: usize },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::TraceHypothesis => write!(f, "tr(B) != tr(D)"),
            FamilyError::BaseNotSpecial => write!(f, "B is not special hyperbolic"),
            FamilyError::ExponentPattern { index } => {
                write!(f, "base trace {} is not the expected unit power", index)
            }
            FamilyError::TraceMismatch { k } => write!(f, "trace mismatch at k = {}", k),
            FamilyError::NotSpecial { k } => write!(f, "M_{} is not special hyperbolic", k),
            FamilyError::FixedPointNotInSubfield { k } => {
                write!(f, "fixed point of M_{} outside lambda Q(lambda^2)", k)
            }
            FamilyError::Conjugate { k1, k2 } => {
                write!(f, "members k = {} and k = {} are conjugate", k1, k2)
            }
            FamilyError::Undetermined { k } => {
                write!(f, "specialness undetermined at k = {}", k)
            }
        }
    }
}

/// Check the three-term recurrence
/// `tr M_k = (tr B^2 - 1)(tr M_{k-1} - tr M_{k-2}) + tr M_{k-3}`
/// against directly computed traces for `3 <= k <= k_max`.
pub fn recurrence_check(
    ctx: &FieldContext,
    f: &FamilySpec,
    k_max: usize,
) -> Result<bool, FamilyError> {
    assert!(k_max >= 3);
    let fm = family_matrices(ctx, f);
    if fm.b.trace(ctx) != fm.d.trace(ctx) {
        return Err(FamilyError::TraceHypothesis);
    }
    let trb = fm.b.trace(ctx);
    let coeff = ctx.sub(&ctx.mul(&trb, &trb), &ctx.one());
    let mut traces: Vec<FieldElement> = Vec::with_capacity(k_max + 1);
    let mut bk = GroupMatrix::identity(ctx);
    let mut dk = GroupMatrix::identity(ctx);
    for k in 0..=k_max {
        if k > 0 {
            bk = bk.mul(ctx, &fm.b);
            dk = dk.mul(ctx, &fm.d);
        }
        let mk = dk.mul(ctx, &fm.c).mul(ctx, &bk).mul(ctx, &fm.a);
        traces.push(mk.trace(ctx));
    }
    for k in 3..=k_max {
        let predicted = ctx.add(
            &ctx.mul(&coeff, &ctx.sub(&traces[k - 1], &traces[k - 2])),
            &traces[k - 3],
        );
        if predicted != traces[k] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Find `(n, sign)` with `t = (sign * u)^n + (sign * u)^{-n}` exactly, or
/// `None`. Requires `|u| > 1`; the exponent is bracketed numerically around
/// `log|t| / log|u|` and confirmed exactly.
pub fn unit_power_decompose(
    ctx: &FieldContext,
    t: &FieldElement,
    u: &FieldElement,
) -> Option<(u64, i8)> {
    if *t == ctx.from_int(2) {
        return Some((0, 1));
    }
    let abs_u = ctx.to_f64(&ctx.abs(u));
    assert!(abs_u > 1.0, "unit must have magnitude > 1");
    let abs_t = ctx.to_f64(&ctx.abs(t));
    if abs_t <= 1.0 {
        return None;
    }
    let est = (abs_t.ln() / abs_u.ln()).round() as i64;
    let lo = (est - 2).max(1) as u64;
    let hi = (est + 2) as u64;
    for n in lo..=hi {
        let un = ctx.pow(u, n as i64).ok()?;
        let sum = ctx.add(&un, &ctx.inv(&un).ok()?);
        if sum == *t {
            return Some((n, 1));
        }
        // odd powers of -u flip the sign of the sum
        if n % 2 == 1 && ctx.neg(&sum) == *t {
            return Some((n, -1));
        }
    }
    None
}

/// Outcome of a verified family.
#[derive(Clone, Debug)]
pub struct FamilyVerdict {
    pub family: FamilySpec,
    /// Traces of `M_0`, `M_1`, `M_2`.
    pub base_traces: [FieldElement; 3],
    /// The family unit: the eigenvalue of `B` with magnitude > 1.
    pub unit: FieldElement,
    /// Exponents of the base traces over the unit: `(n, n+2, n+4)`.
    pub exponents: (u64, u64, u64),
    pub verified_k_max: usize,
    pub all_special: bool,
}

/// Full verification of one family up to `k_max`.
pub fn verify_family(
    ctx: &FieldContext,
    f: &FamilySpec,
    k_max: usize,
) -> Result<FamilyVerdict, FamilyError> {
    let fm = family_matrices(ctx, f);
    if fm.b.trace(ctx) != fm.d.trace(ctx) {
        return Err(FamilyError::TraceHypothesis);
    }
    let spec_b = classify(ctx, &fm.b).map_err(|_| FamilyError::BaseNotSpecial)?;
    if !(spec_b.kind == ElementKind::Hyperbolic && spec_b.special) {
        return Err(FamilyError::BaseNotSpecial);
    }
    let unit = spec_b.eigenvalue.expect("special implies eigenvalue");

    // base traces must be consecutive even-step powers of the unit
    let mut base_traces = Vec::with_capacity(3);
    let mut exponents = Vec::with_capacity(3);
    for k in 0..3 {
        let tr = family_trace(ctx, f, k);
        match unit_power_decompose(ctx, &tr, &unit) {
            Some((n, 1)) => exponents.push(n),
            _ => return Err(FamilyError::ExponentPattern { index: k }),
        }
        base_traces.push(tr);
    }
    let n = exponents[0];
    if exponents[1] != n + 2 || exponents[2] != n + 4 {
        return Err(FamilyError::ExponentPattern { index: 1 });
    }
    if f.base_power >= 0 && f.base_power as u64 != n {
        return Err(FamilyError::ExponentPattern { index: 0 });
    }

    // member-by-member checks
    let mut bk = GroupMatrix::identity(ctx);
    let mut dk = GroupMatrix::identity(ctx);
    for k in 0..=k_max {
        if k > 0 {
            bk = bk.mul(ctx, &fm.b);
            dk = dk.mul(ctx, &fm.d);
        }
        let mk = dk.mul(ctx, &fm.c).mul(ctx, &bk).mul(ctx, &fm.a);
        // exact trace identity tr(M_k) = u^{n+2k} + u^{-(n+2k)}
        let e = (n + 2 * k as u64) as i64;
        let ue = ctx.pow(&unit, e).unwrap();
        let predicted = ctx.add(&ue, &ctx.inv(&ue).unwrap());
        if mk.trace(ctx) != predicted {
            return Err(FamilyError::TraceMismatch { k });
        }
        let spec = classify(ctx, &mk).map_err(|_| FamilyError::Undetermined { k })?;
        if !(spec.kind == ElementKind::Hyperbolic && spec.special) {
            return Err(FamilyError::NotSpecial { k });
        }
        let fps = fixed_points_with_spec(ctx, &mk, &spec)
            .map_err(|_| FamilyError::Undetermined { k })?;
        for p in [&fps.attracting, &fps.repelling] {
            match p {
                ProjPoint::Finite(x) if ctx.in_lambda_q_lambda2(x) => {}
                _ => return Err(FamilyError::FixedPointNotInSubfield { k }),
            }
        }
    }

    // pairwise non-conjugacy of the members as group elements
    let words: Vec<_> = (0..=k_max)
        .map(|k| digits_to_word(ctx.q(), &f.digits(k), Convention::MNotation))
        .collect();
    for k1 in 0..=k_max {
        for k2 in (k1 + 1)..=k_max {
            if conjugate_test(&words[k1], &words[k2]) {
                return Err(FamilyError::Conjugate { k1, k2 });
            }
        }
    }

    Ok(FamilyVerdict {
        family: f.clone(),
        base_traces: [
            base_traces[0].clone(),
            base_traces[1].clone(),
            base_traces[2].clone(),
        ],
        unit,
        exponents: (n, n + 2, n + 4),
        verified_k_max: k_max,
        all_special: true,
    })
}

fn family(a: &[i64], b: &[i64], c: &[i64], d: &[i64], base_power: i64) -> FamilySpec {
    FamilySpec {
        a: DigitSeq::new(a.to_vec()),
        b: DigitSeq::new(b.to_vec()),
        c: DigitSeq::new(c.to_vec()),
        d: DigitSeq::new(d.to_vec()),
        unit_name: String::from("u18"),
        base_power,
    }
}

/// The thirteen verified infinite families in `G_18`, as
/// `M_k = D^k C B^k A` quadruples.
pub fn g18_families() -> Vec<FamilySpec> {
    vec![
        family(&[2], &[-4, -1, 4, 1], &[-2, -2, 2], &[1, -4, -1, 4], 1),
        family(&[4], &[2, -2, -2, 2], &[1, -4, -1], &[2, 2, -2, -2], 1),
        family(&[-4], &[-1, 8, 1, -2], &[-2, 1, 2], &[-2, -1, 8, 1], 1),
        family(&[-1], &[-4, 2, 1, -2], &[-2, 1, 8], &[1, -1, -1, 16], 1),
        family(&[16], &[1, -2, -1, 8], &[-1, -1, 1], &[8, 1, -2, -1], 1),
        family(
            &[4],
            &[2, -2, -2, 2],
            &[2, -2, -1, 4, 1, -2, -2],
            &[2, 2, -2, -2],
            2,
        ),
        family(
            &[4],
            &[1, -2, -4, 2],
            &[1, -2, -2, 4, 2, -2, -1],
            &[2, 4, -2, -1],
            2,
        ),
        family(
            &[2],
            &[-4, -1, 4, 1],
            &[-4, -1, 2, 2, -2, -1, 4],
            &[1, -4, -1, 4],
            2,
        ),
        family(
            &[2],
            &[-2, -1, 8, 1],
            &[-2, -1, 4, 2, -4, -1, 2],
            &[1, -8, -1, 2],
            2,
        ),
        family(
            &[-4],
            &[-1, 8, 1, -2],
            &[-1, 8, -1, -1, 1, 8, 1],
            &[-2, -1, 8, 1],
            2,
        ),
        family(
            &[2],
            &[-8, -1, 2, 1],
            &[-8, -1, 1, 2, -1, -1, 8],
            &[1, -2, -1, 8],
            2,
        ),
        family(
            &[2],
            &[-1, -1, 16, 1],
            &[-1, -1, 8, 2, -8, -1, 1],
            &[1, -16, -1, 1],
            2,
        ),
        family(
            &[16],
            &[1, -2, -1, 8],
            &[1, -2, -2, 1, 2, -2, -1],
            &[8, 1, -2, -1],
            2,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generator, word_to_matrix, Gen};

    #[test]
    fn trace_identity_basics() {
        let ctx = FieldContext::new(7);
        let i = GroupMatrix::identity(&ctx);
        assert!(trace_identity_check(&ctx, &i, &i));
        let s = generator(&ctx, Gen::S);
        let t = generator(&ctx, Gen::T);
        assert!(trace_identity_check(&ctx, &s, &t));
        let w1 = word_to_matrix(&ctx, &[(Gen::S, 1), (Gen::T, 2), (Gen::S, 1), (Gen::T, -3)]);
        let w2 = word_to_matrix(&ctx, &[(Gen::T, 1), (Gen::S, 1), (Gen::T, -2)]);
        assert!(trace_identity_check(&ctx, &w1, &w2));
    }

    #[test]
    fn family1_base_traces() {
        let ctx = FieldContext::new(18);
        let fams = g18_families();
        let f = &fams[0];
        let l = ctx.lambda();
        let l2 = ctx.mul(&l, &l);
        let l4 = ctx.mul(&l2, &l2);
        // tr M_0 = 16 l^4 + 2
        let tr0 = family_trace(&ctx, f, 0);
        assert_eq!(tr0, ctx.add(&ctx.scale_int(&l4, 16), &ctx.from_int(2)));
        // tr M_1 = 1847952 l^4 - 3838464 l^2 + 1391618
        let tr1 = family_trace(&ctx, f, 1);
        let want1 = ctx.add(
            &ctx.sub(
                &ctx.scale_int(&l4, 1_847_952),
                &ctx.scale_int(&l2, 3_838_464),
            ),
            &ctx.from_int(1_391_618),
        );
        assert_eq!(tr1, want1);
        // tr M_2 = 110983509904 l^4 - 235185378816 l^2 + 85747037186
        let tr2 = family_trace(&ctx, f, 2);
        let want2 = ctx.add(
            &ctx.sub(
                &ctx.scale(&l4, &num_rational::BigRational::from(num_bigint::BigInt::from(110_983_509_904i64))),
                &ctx.scale(&l2, &num_rational::BigRational::from(num_bigint::BigInt::from(235_185_378_816i64))),
            ),
            &ctx.from_rational(num_rational::BigRational::from(num_bigint::BigInt::from(
                85_747_037_186i64,
            ))),
        );
        assert_eq!(tr2, want2);
    }

    #[test]
    fn family1_unit_powers() {
        let ctx = FieldContext::new(18);
        let u = ctx.named("u18").unwrap().clone();
        let fams = g18_families();
        for k in 0..3usize {
            let tr = family_trace(&ctx, &fams[0], k);
            let (n, s) = unit_power_decompose(&ctx, &tr, &u).unwrap();
            assert_eq!((n, s), ((4 * k + 2) as u64, 1));
        }
    }

    #[test]
    fn recurrence_family1() {
        let ctx = FieldContext::new(18);
        let fams = g18_families();
        assert_eq!(recurrence_check(&ctx, &fams[0], 6), Ok(true));
    }

    #[test]
    fn recurrence_random_quadruple() {
        // any A, B, C, D with tr B = tr D satisfies the recurrence; use D = B
        let ctx = FieldContext::new(7);
        let f = FamilySpec {
            a: DigitSeq::new(vec![2, -1]),
            b: DigitSeq::new(vec![3, -2, 1]),
            c: DigitSeq::new(vec![-1, 4]),
            d: DigitSeq::new(vec![3, -2, 1]),
            unit_name: String::new(),
            base_power: -1,
        };
        assert_eq!(recurrence_check(&ctx, &f, 5), Ok(true));
    }

    #[test]
    fn recurrence_hypothesis_violation() {
        let ctx = FieldContext::new(7);
        let f = FamilySpec {
            a: DigitSeq::new(vec![2, -1]),
            b: DigitSeq::new(vec![3, -2, 1]),
            c: DigitSeq::new(vec![-1, 4]),
            d: DigitSeq::new(vec![5]),
            unit_name: String::new(),
            base_power: -1,
        };
        assert_eq!(recurrence_check(&ctx, &f, 5), Err(FamilyError::TraceHypothesis));
    }

    #[test]
    fn decompose_trivial() {
        let ctx = FieldContext::new(18);
        let u = ctx.named("u18").unwrap().clone();
        assert_eq!(
            unit_power_decompose(&ctx, &ctx.from_int(2), &u),
            Some((0, 1))
        );
        let l4 = ctx.pow(&ctx.lambda(), 4).unwrap();
        let t = ctx.add(&ctx.scale_int(&l4, 16), &ctx.from_int(2));
        assert_eq!(unit_power_decompose(&ctx, &t, &u), Some((2, 1)));
        assert_eq!(unit_power_decompose(&ctx, &ctx.from_int(3), &u), None);
    }

    #[test]
    fn verify_family1_small() {
        let ctx = FieldContext::new(18);
        let fams = g18_families();
        let verdict = verify_family(&ctx, &fams[0], 2).expect("family 1 verifies");
        assert!(verdict.all_special);
        assert_eq!(verdict.exponents, (1, 3, 5));
        // the eigenvalue of B is u18^2
        let u = ctx.named("u18").unwrap().clone();
        let u2 = ctx.mul(&u, &u);
        assert!(verdict.unit == u2 || verdict.unit == ctx.neg(&u2));
    }

    #[test]
    fn corrupted_family_fails() {
        let ctx = FieldContext::new(18);
        let fams = g18_families();
        let mut bad = fams[0].clone();
        bad.c = DigitSeq::new(vec![-2, -2, 4]); // one digit changed
        assert!(verify_family(&ctx, &bad, 1).is_err());
    }
}
