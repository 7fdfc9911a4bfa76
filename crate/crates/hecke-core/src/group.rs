//! 2x2 determinant-one matrices over `Q(lambda_q)` and their action on the
//! projective line.
//!
//! Matrices stay in SL(2); all orbit and conjugacy logic elsewhere treats `M`
//! and `-M` as the same element. Words in the generators are evaluated with
//! `T^n` in closed form, so evaluation is linear in word length rather than
//! in the size of the exponents.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::field::{FieldContext, FieldElement, SqrtOutcome};

/// Row-major 2x2 matrix over the field, determinant 1.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupMatrix {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

/// Point of `P^1(R)` with exact coordinates in the field.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ProjPoint {
    Finite(FieldElement),
    Infinity,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gen {
    S,
    T,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ElementKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Trace classification of a group element.
///
/// `special` means hyperbolic with eigenvalues in the field itself; in that
/// case `eigenvalue` holds the root `t` with `|t| > 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectralData {
    pub trace: FieldElement,
    pub kind: ElementKind,
    pub special: bool,
    pub eigenvalue: Option<FieldElement>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClassifyError {
    /// The square-root decision procedure ran out of budget: the element is
    /// hyperbolic but its specialness is unknown.
    Undetermined,
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "specialness undetermined (sqrt budget exhausted)")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FixedPointError {
    /// Fixed points are only exact for special hyperbolic or parabolic input.
    NotSpecial,
    Undetermined,
}

impl fmt::Display for FixedPointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointError::NotSpecial => {
                write!(f, "matrix is not special hyperbolic or parabolic")
            }
            FixedPointError::Undetermined => write!(f, "specialness undetermined"),
        }
    }
}

/// Both fixed points of a special hyperbolic element, or the single fixed
/// point of a parabolic one (repeated).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixedPoints {
    pub attracting: ProjPoint,
    pub repelling: ProjPoint,
    pub parabolic: bool,
}

/// Parity form of a word matrix for even q: either the diagonal lies in the
/// even-power span and the off-diagonal in lambda times it, or vice versa.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParityForm {
    Form1,
    Form2,
}

impl GroupMatrix {
    pub fn identity(ctx: &FieldContext) -> GroupMatrix {
        GroupMatrix {
            a: ctx.one(),
            b: ctx.zero(),
            c: ctx.zero(),
            d: ctx.one(),
        }
    }

    pub fn mul(&self, ctx: &FieldContext, rhs: &GroupMatrix) -> GroupMatrix {
        GroupMatrix {
            a: ctx.add(&ctx.mul(&self.a, &rhs.a), &ctx.mul(&self.b, &rhs.c)),
            b: ctx.add(&ctx.mul(&self.a, &rhs.b), &ctx.mul(&self.b, &rhs.d)),
            c: ctx.add(&ctx.mul(&self.c, &rhs.a), &ctx.mul(&self.d, &rhs.c)),
            d: ctx.add(&ctx.mul(&self.c, &rhs.b), &ctx.mul(&self.d, &rhs.d)),
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self, ctx: &FieldContext) -> GroupMatrix {
        GroupMatrix {
            a: self.d.clone(),
            b: ctx.neg(&self.b),
            c: ctx.neg(&self.c),
            d: self.a.clone(),
        }
    }

    pub fn neg(&self, ctx: &FieldContext) -> GroupMatrix {
        GroupMatrix {
            a: ctx.neg(&self.a),
            b: ctx.neg(&self.b),
            c: ctx.neg(&self.c),
            d: ctx.neg(&self.d),
        }
    }

    /// Binary exponentiation; negative powers go through the inverse.
    pub fn pow(&self, ctx: &FieldContext, n: i64) -> GroupMatrix {
        let base = if n < 0 { self.inverse(ctx) } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = GroupMatrix::identity(ctx);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(ctx, &sq);
            }
        }
        acc
    }

    pub fn det(&self, ctx: &FieldContext) -> FieldElement {
        ctx.sub(&ctx.mul(&self.a, &self.d), &ctx.mul(&self.b, &self.c))
    }

    pub fn trace(&self, ctx: &FieldContext) -> FieldElement {
        ctx.add(&self.a, &self.d)
    }

    /// Equal up to global sign (the PSL identification).
    pub fn eq_up_to_sign(&self, ctx: &FieldContext, rhs: &GroupMatrix) -> bool {
        self == rhs || *self == rhs.neg(ctx)
    }

    pub fn is_identity_up_to_sign(&self, ctx: &FieldContext) -> bool {
        self.eq_up_to_sign(ctx, &GroupMatrix::identity(ctx))
    }

    pub fn to_human(&self, ctx: &FieldContext) -> String {
        alloc::format!(
            "[[{}, {}], [{}, {}]]",
            ctx.to_human(&self.a),
            ctx.to_human(&self.b),
            ctx.to_human(&self.c),
            ctx.to_human(&self.d)
        )
    }
}

/// The generator `S = [[0,-1],[1,0]]` or `T = [[1,lambda],[0,1]]`.
pub fn generator(ctx: &FieldContext, which: Gen) -> GroupMatrix {
    match which {
        Gen::S => GroupMatrix {
            a: ctx.zero(),
            b: ctx.neg(&ctx.one()),
            c: ctx.one(),
            d: ctx.zero(),
        },
        Gen::T => t_power(ctx, &BigInt::from(1)),
    }
}

/// `T^n = [[1, n lambda], [0, 1]]` in closed form.
pub fn t_power(ctx: &FieldContext, n: &BigInt) -> GroupMatrix {
    let nl = ctx.scale(&ctx.lambda(), &BigRational::from(n.clone()));
    GroupMatrix {
        a: ctx.one(),
        b: nl,
        c: ctx.zero(),
        d: ctx.one(),
    }
}

/// Evaluate a word given as `(generator, exponent)` pairs, leftmost factor
/// first.
pub fn word_to_matrix(ctx: &FieldContext, word: &[(Gen, i64)]) -> GroupMatrix {
    let mut acc = GroupMatrix::identity(ctx);
    for &(gen, exp) in word {
        let factor = match gen {
            Gen::S => generator(ctx, Gen::S).pow(ctx, exp),
            Gen::T => t_power(ctx, &BigInt::from(exp)),
        };
        acc = acc.mul(ctx, &factor);
    }
    acc
}

/// `M(n_1, ..., n_k) = S T^{n_k} ... S T^{n_1}`.
pub fn m_word(ctx: &FieldContext, digits: &[i64]) -> GroupMatrix {
    let s = generator(ctx, Gen::S);
    let mut acc = GroupMatrix::identity(ctx);
    for &n in digits.iter().rev() {
        acc = acc.mul(ctx, &s).mul(ctx, &t_power(ctx, &BigInt::from(n)));
    }
    acc
}

/// Moebius action `x -> (ax + b) / (cx + d)` with exact infinity handling.
pub fn mobius_apply(ctx: &FieldContext, m: &GroupMatrix, p: &ProjPoint) -> ProjPoint {
    match p {
        ProjPoint::Infinity => {
            if m.c.is_zero() {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(ctx.div(&m.a, &m.c).unwrap())
            }
        }
        ProjPoint::Finite(x) => {
            let num = ctx.add(&ctx.mul(&m.a, x), &m.b);
            let den = ctx.add(&ctx.mul(&m.c, x), &m.d);
            if den.is_zero() {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(ctx.div(&num, &den).unwrap())
            }
        }
    }
}

/// Trace classification, with the exact specialness test
/// `trace^2 - 4` square in the field.
pub fn classify(ctx: &FieldContext, m: &GroupMatrix) -> Result<SpectralData, ClassifyError> {
    let trace = m.trace(ctx);
    let two = ctx.from_int(2);
    let abs_trace = ctx.abs(&trace);
    let kind = match ctx.compare(&abs_trace, &two) {
        Ordering::Greater => ElementKind::Hyperbolic,
        Ordering::Equal => {
            if m.b.is_zero() && m.c.is_zero() {
                ElementKind::Identity
            } else {
                ElementKind::Parabolic
            }
        }
        Ordering::Less => ElementKind::Elliptic,
    };
    if kind != ElementKind::Hyperbolic {
        return Ok(SpectralData {
            trace,
            kind,
            special: false,
            eigenvalue: None,
        });
    }
    let disc = ctx.sub(&ctx.mul(&trace, &trace), &ctx.from_int(4));
    match ctx.sqrt(&disc) {
        SqrtOutcome::Root(r) => {
            // t = (trace + sign(trace) r) / 2 so that |t| > 1
            let signed_r = if ctx.sign(&trace) < 0 { ctx.neg(&r) } else { r };
            let t = ctx.scale(
                &ctx.add(&trace, &signed_r),
                &BigRational::new(BigInt::from(1), BigInt::from(2)),
            );
            Ok(SpectralData {
                trace,
                kind,
                special: true,
                eigenvalue: Some(t),
            })
        }
        SqrtOutcome::NotASquare => Ok(SpectralData {
            trace,
            kind,
            special: false,
            eigenvalue: None,
        }),
        SqrtOutcome::Undetermined => Err(ClassifyError::Undetermined),
    }
}

/// Exact fixed points of a special hyperbolic or parabolic element.
///
/// For hyperbolic `M` with eigenvalue `|t| > 1`, the attracting point is the
/// one with `c x + d = t` (Moebius derivative `1/t^2` there).
pub fn fixed_points_exact(
    ctx: &FieldContext,
    m: &GroupMatrix,
) -> Result<FixedPoints, FixedPointError> {
    let spec = classify(ctx, m).map_err(|_| FixedPointError::Undetermined)?;
    fixed_points_with_spec(ctx, m, &spec)
}

/// Same as [`fixed_points_exact`] with the classification already in hand.
pub fn fixed_points_with_spec(
    ctx: &FieldContext,
    m: &GroupMatrix,
    spec: &SpectralData,
) -> Result<FixedPoints, FixedPointError> {
    match spec.kind {
        ElementKind::Parabolic => {
            let p = if m.c.is_zero() {
                ProjPoint::Infinity
            } else {
                // x = (a - d) / 2c
                let num = ctx.sub(&m.a, &m.d);
                let den = ctx.scale_int(&m.c, 2);
                ProjPoint::Finite(ctx.div(&num, &den).unwrap())
            };
            Ok(FixedPoints {
                attracting: p.clone(),
                repelling: p,
                parabolic: true,
            })
        }
        ElementKind::Hyperbolic if spec.special => {
            let t = spec.eigenvalue.clone().expect("special implies eigenvalue");
            let t_inv = ctx.sub(&spec.trace, &t); // t + 1/t = trace
            if m.c.is_zero() {
                // fixed points are infinity and b / (d - a)
                let finite = ProjPoint::Finite(
                    ctx.div(&m.b, &ctx.sub(&m.d, &m.a))
                        .expect("hyperbolic with c = 0 has a != d"),
                );
                // infinity is attracting iff a is the eigenvalue with |a| > 1
                if m.a == t {
                    Ok(FixedPoints {
                        attracting: ProjPoint::Infinity,
                        repelling: finite,
                        parabolic: false,
                    })
                } else {
                    Ok(FixedPoints {
                        attracting: finite,
                        repelling: ProjPoint::Infinity,
                        parabolic: false,
                    })
                }
            } else {
                let attracting = ctx.div(&ctx.sub(&t, &m.d), &m.c).unwrap();
                let repelling = ctx.div(&ctx.sub(&t_inv, &m.d), &m.c).unwrap();
                Ok(FixedPoints {
                    attracting: ProjPoint::Finite(attracting),
                    repelling: ProjPoint::Finite(repelling),
                    parabolic: false,
                })
            }
        }
        _ => Err(FixedPointError::NotSpecial),
    }
}

/// Which parity form a word matrix has (even q only). Violating both forms
/// means the matrix is not a word in the generators; that is an internal
/// consistency failure.
pub fn even_q_form_check(ctx: &FieldContext, m: &GroupMatrix) -> ParityForm {
    assert!(ctx.q() % 2 == 0, "parity forms only exist for even q");
    let even = |x: &FieldElement| ctx.in_q_lambda2(x);
    let odd = |x: &FieldElement| ctx.in_lambda_q_lambda2(x);
    if even(&m.a) && even(&m.d) && odd(&m.b) && odd(&m.c) {
        ParityForm::Form1
    } else if odd(&m.a) && odd(&m.d) && even(&m.b) && even(&m.c) {
        ParityForm::Form2
    } else {
        panic!("matrix violates both parity forms");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn ctx7() -> FieldContext {
        FieldContext::new(7)
    }

    #[test]
    fn s_squared_is_minus_identity() {
        let ctx = ctx7();
        let s = generator(&ctx, Gen::S);
        let s2 = s.mul(&ctx, &s);
        assert_eq!(s2, GroupMatrix::identity(&ctx).neg(&ctx));
        assert!(s2.is_identity_up_to_sign(&ctx));
    }

    #[test]
    fn t_fixes_infinity() {
        let ctx = ctx7();
        let tq = t_power(&ctx, &BigInt::from(7));
        assert_eq!(
            mobius_apply(&ctx, &tq, &ProjPoint::Infinity),
            ProjPoint::Infinity
        );
    }

    #[test]
    fn st_has_order_q_in_psl() {
        for q in [3u32, 7, 18] {
            let ctx = FieldContext::new(q);
            let st = generator(&ctx, Gen::S).mul(&ctx, &generator(&ctx, Gen::T));
            let p = st.pow(&ctx, q as i64);
            assert!(p.is_identity_up_to_sign(&ctx), "q = {}", q);
            // and no smaller power is trivial
            for k in 1..q {
                assert!(!st.pow(&ctx, k as i64).is_identity_up_to_sign(&ctx));
            }
        }
    }

    #[test]
    fn word_matrices_q18() {
        let ctx = FieldContext::new(18);
        let l = ctx.lambda();
        let l2 = ctx.mul(&l, &l);
        let l3 = ctx.mul(&l2, &l);
        let l4 = ctx.mul(&l2, &l2);
        // M(4,1,-4,-1) = [[4l^2+1, 16l^3], [4l^3, 16l^4-4l^2+1]]
        let m = m_word(&ctx, &[4, 1, -4, -1]);
        assert_eq!(m.a, ctx.add(&ctx.scale_int(&l2, 4), &ctx.one()));
        assert_eq!(m.b, ctx.scale_int(&l3, 16));
        assert_eq!(m.c, ctx.scale_int(&l3, 4));
        assert_eq!(
            m.d,
            ctx.add(
                &ctx.sub(&ctx.scale_int(&l4, 16), &ctx.scale_int(&l2, 4)),
                &ctx.one()
            )
        );
        // M(2,2,-2,-2) = [[4l^2+1, 8l^3], [8l^3, 16l^4-4l^2+1]]
        let m2 = m_word(&ctx, &[2, 2, -2, -2]);
        assert_eq!(m2.a, m.a);
        assert_eq!(m2.b, ctx.scale_int(&l3, 8));
        assert_eq!(m2.c, ctx.scale_int(&l3, 8));
        assert_eq!(m2.d, m.d);
        assert!(m2.det(&ctx).is_one());
    }

    #[test]
    fn empty_word_is_identity() {
        let ctx = ctx7();
        assert_eq!(m_word(&ctx, &[]), GroupMatrix::identity(&ctx));
        assert_eq!(word_to_matrix(&ctx, &[]), GroupMatrix::identity(&ctx));
    }

    #[test]
    fn mobius_examples() {
        let ctx = ctx7();
        let s = generator(&ctx, Gen::S);
        // S . 0 = infinity
        assert_eq!(
            mobius_apply(&ctx, &s, &ProjPoint::Finite(ctx.zero())),
            ProjPoint::Infinity
        );
        // (S T S T^-1) fixes l^2 - 1
        let m = word_to_matrix(&ctx, &[(Gen::S, 1), (Gen::T, 1), (Gen::S, 1), (Gen::T, -1)]);
        let x = ctx.named("l1").unwrap().clone();
        assert_eq!(
            mobius_apply(&ctx, &m, &ProjPoint::Finite(x.clone())),
            ProjPoint::Finite(x)
        );
    }

    #[test]
    fn classify_generators() {
        let ctx = ctx7();
        let s = generator(&ctx, Gen::S);
        let t = generator(&ctx, Gen::T);
        let cs = classify(&ctx, &s).unwrap();
        assert_eq!(cs.kind, ElementKind::Elliptic);
        assert!(cs.trace.is_zero());
        let ct = classify(&ctx, &t).unwrap();
        assert_eq!(ct.kind, ElementKind::Parabolic);
        let ci = classify(&ctx, &GroupMatrix::identity(&ctx)).unwrap();
        assert_eq!(ci.kind, ElementKind::Identity);
        let cni = classify(&ctx, &GroupMatrix::identity(&ctx).neg(&ctx)).unwrap();
        assert_eq!(cni.kind, ElementKind::Identity);
    }

    #[test]
    fn classify_stst_inverse_special() {
        let ctx = ctx7();
        let m = word_to_matrix(&ctx, &[(Gen::S, 1), (Gen::T, 1), (Gen::S, 1), (Gen::T, -1)]);
        let spec = classify(&ctx, &m).unwrap();
        assert_eq!(spec.kind, ElementKind::Hyperbolic);
        assert!(spec.special);
        // trace = -(2 + l^2)
        let l2 = ctx.mul(&ctx.lambda(), &ctx.lambda());
        assert_eq!(spec.trace, ctx.neg(&ctx.add(&l2, &ctx.from_int(2))));
        // eigenvalue with |t| > 1 is -u7
        let u7 = ctx.named("u7").unwrap().clone();
        assert_eq!(spec.eigenvalue.unwrap(), ctx.neg(&u7));
    }

    #[test]
    fn fixed_points_of_stst_inverse() {
        let ctx = ctx7();
        let m = word_to_matrix(&ctx, &[(Gen::S, 1), (Gen::T, 1), (Gen::S, 1), (Gen::T, -1)]);
        let fps = fixed_points_exact(&ctx, &m).unwrap();
        assert!(!fps.parabolic);
        let l1 = ctx.named("l1").unwrap().clone(); // l^2 - 1
        // l^2 - 1 is a fixed point (the repelling one for this orientation)
        assert_eq!(fps.repelling, ProjPoint::Finite(l1));
        // both fixed points are genuinely fixed
        for p in [&fps.attracting, &fps.repelling] {
            assert_eq!(mobius_apply(&ctx, &m, p), *p);
        }
        // attracting point is the limit of iteration from a generic start
        let mut p = ProjPoint::Finite(ctx.from_int(10));
        for _ in 0..40 {
            p = mobius_apply(&ctx, &m, &p);
        }
        if let (ProjPoint::Finite(lim), ProjPoint::Finite(att)) = (&p, &fps.attracting) {
            let diff = ctx.sub(lim, att);
            let mag = ctx.embed_at(&ctx.mul(&diff, &diff), ctx.distinguished_root(), 140);
            assert!(mag.hi < crate::interval::rational_from_f64(1e-40));
        } else {
            panic!("expected finite points");
        }
    }

    #[test]
    fn parabolic_fixed_point() {
        let ctx = ctx7();
        let t = generator(&ctx, Gen::T);
        let fps = fixed_points_exact(&ctx, &t).unwrap();
        assert!(fps.parabolic);
        assert_eq!(fps.attracting, ProjPoint::Infinity);
    }

    #[test]
    fn non_special_is_rejected() {
        // S T^3 at q=3 is hyperbolic but not special
        let ctx = FieldContext::new(3);
        let m = word_to_matrix(&ctx, &[(Gen::S, 1), (Gen::T, 3)]);
        let spec = classify(&ctx, &m).unwrap();
        assert_eq!(spec.kind, ElementKind::Hyperbolic);
        assert!(!spec.special);
        assert_eq!(
            fixed_points_exact(&ctx, &m),
            Err(FixedPointError::NotSpecial)
        );
    }

    #[test]
    fn parity_forms_q18() {
        let ctx = FieldContext::new(18);
        let t = generator(&ctx, Gen::T);
        let s = generator(&ctx, Gen::S);
        assert_eq!(even_q_form_check(&ctx, &t), ParityForm::Form1);
        assert_eq!(even_q_form_check(&ctx, &s), ParityForm::Form2);
        let m = m_word(&ctx, &[4, 1, -4, -1]);
        assert_eq!(even_q_form_check(&ctx, &m), ParityForm::Form1);
    }

    #[test]
    fn matrix_serde_roundtrip() {
        let ctx = FieldContext::new(18);
        let m = m_word(&ctx, &[4, 1, -4, -1]);
        let json = serde_json::to_string(&m).unwrap();
        let back: GroupMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
