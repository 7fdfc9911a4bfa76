//! Batch orbit censuses, heights, and systematic periodic-part searches.
//!
//! Everything here is sequential and pure; the CLI crate layers rayon,
//! checkpoints, and caching on top of the same per-point entry points, so
//! parallel runs reduce to exactly the reports produced here.

use alloc::string::String;
use alloc::{format, vec, vec::Vec};
use core::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{FieldContext, FieldElement};
use crate::group::{classify, ElementKind};
use crate::interval::{approx_ln, RatInterval};
use crate::rosen::{
    self, expand_element, orbit_label, rosen_digit, validate_period, OrbitKind, OrbitLabel,
    PeriodError,
};
use crate::words::{symmetry_class, DigitSeq};

/// The set of points a census walks over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanSet {
    /// Rational integers `lo..=hi`.
    Integers { lo: i64, hi: i64 },
    /// Products `g_1^{e_1} ... g_m^{e_m}` with every exponent in `lo..=hi`.
    UnitGrid {
        gens: Vec<FieldElement>,
        lo: i64,
        hi: i64,
    },
    /// Sums `c_1 b_1 + ... + c_m b_m` with every coefficient in `lo..=hi`.
    CoeffGrid {
        basis: Vec<FieldElement>,
        lo: i64,
        hi: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub set: ScanSet,
    /// Multiplied into every point, e.g. lambda for even q integer scans.
    pub premul: Option<FieldElement>,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), String> {
        let (lo, hi, dims) = match &self.set {
            ScanSet::Integers { lo, hi } => (*lo, *hi, 1),
            ScanSet::UnitGrid { gens, lo, hi } => (*lo, *hi, gens.len()),
            ScanSet::CoeffGrid { basis, lo, hi } => (*lo, *hi, basis.len()),
        };
        if lo > hi {
            return Err(format!("empty range {}..{}", lo, hi));
        }
        if dims == 0 {
            return Err("no generators/basis elements given".into());
        }
        Ok(())
    }

    fn range_len(&self) -> u64 {
        let (lo, hi) = match &self.set {
            ScanSet::Integers { lo, hi }
            | ScanSet::UnitGrid { lo, hi, .. }
            | ScanSet::CoeffGrid { lo, hi, .. } => (*lo, *hi),
        };
        (hi - lo + 1) as u64
    }

    /// Total number of points.
    pub fn len(&self) -> u64 {
        let r = self.range_len();
        match &self.set {
            ScanSet::Integers { .. } => r,
            ScanSet::UnitGrid { gens, .. } => r.pow(gens.len() as u32),
            ScanSet::CoeffGrid { basis, .. } => r.pow(basis.len() as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The point at a scan index; indices enumerate the grid in mixed-radix
    /// order, so any index partition yields the same census.
    pub fn point(&self, ctx: &FieldContext, index: u64) -> FieldElement {
        let r = self.range_len();
        let x = match &self.set {
            ScanSet::Integers { lo, .. } => ctx.from_int(*lo + index as i64),
            ScanSet::UnitGrid { gens, lo, .. } => {
                let mut rem = index;
                let mut acc = ctx.one();
                for g in gens {
                    let e = *lo + (rem % r) as i64;
                    rem /= r;
                    acc = ctx.mul(&acc, &ctx.pow(g, e).expect("unit grid generator not invertible"));
                }
                acc
            }
            ScanSet::CoeffGrid { basis, lo, .. } => {
                let mut rem = index;
                let mut acc = ctx.zero();
                for b in basis {
                    let c = *lo + (rem % r) as i64;
                    rem /= r;
                    acc = ctx.add(&acc, &ctx.scale_int(b, c));
                }
                acc
            }
        };
        match &self.premul {
            Some(m) => ctx.mul(m, &x),
            None => x,
        }
    }
}

/// One orbit row of a census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub label: OrbitKind,
    pub symmetry_label: Option<DigitSeq>,
    pub count: u64,
    /// First representative in scan order.
    pub representative: FieldElement,
    pub first_index: u64,
}

/// Census outcome: orbit rows plus a separate tally of expansions that hit
/// the step budget. Counts always sum to the scanned-set size.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    pub undetermined: u64,
    pub total: u64,
}

impl CensusReport {
    pub fn add_point(&mut self, index: u64, point: &FieldElement, label: OrbitLabel) {
        self.total += 1;
        if matches!(label.kind, OrbitKind::Unknown) {
            self.undetermined += 1;
            return;
        }
        match self.rows.iter_mut().find(|r| r.label == label.kind) {
            Some(row) => {
                row.count += 1;
                if index < row.first_index {
                    row.first_index = index;
                    row.representative = point.clone();
                }
            }
            None => self.rows.push(CensusRow {
                label: label.kind,
                symmetry_label: label.symmetry_label,
                count: 1,
                representative: point.clone(),
                first_index: index,
            }),
        }
    }

    /// Associative merge; the canonical sort makes the result independent of
    /// merge order.
    pub fn merge(&mut self, other: CensusReport) {
        self.total += other.total;
        self.undetermined += other.undetermined;
        for row in other.rows {
            match self.rows.iter_mut().find(|r| r.label == row.label) {
                Some(existing) => {
                    existing.count += row.count;
                    if row.first_index < existing.first_index {
                        existing.first_index = row.first_index;
                        existing.representative = row.representative;
                    }
                }
                None => self.rows.push(row),
            }
        }
    }

    /// Deterministic output order: count descending, then label.
    pub fn finalize(&mut self) {
        self.rows
            .sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    }

    pub fn counts_sum(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum::<u64>() + self.undetermined
    }
}

/// Expand one point and label it; the shared worker for censuses.
pub fn census_label(ctx: &FieldContext, x: &FieldElement, max_steps: usize) -> OrbitLabel {
    let e = expand_element(ctx, x, max_steps);
    orbit_label(ctx, &e)
}

/// Sequential census over a scan set.
pub fn run_census(ctx: &FieldContext, spec: &ScanSpec, max_steps: usize) -> CensusReport {
    spec.validate().expect("invalid scan spec");
    let mut report = CensusReport::default();
    for index in 0..spec.len() {
        let x = spec.point(ctx, index);
        let label = census_label(ctx, &x, max_steps);
        report.add_point(index, &x, label);
    }
    report.finalize();
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightError {
    ZeroPair,
}

impl fmt::Display for HeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "height of the zero pair is undefined")
    }
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    // gcd of reduced fractions: gcd of numerators over lcm of denominators
    BigRational::new(
        a.numer().gcd(b.numer()),
        a.denom().lcm(b.denom()),
    )
}

/// Positive rational content of the combined coefficient lists.
fn pair_content(p: &FieldElement, q: &FieldElement) -> BigRational {
    let mut content = BigRational::zero();
    for c in p.coeffs().iter().chain(q.coeffs()) {
        if c.is_zero() {
            continue;
        }
        content = if content.is_zero() {
            c.abs()
        } else {
            rational_gcd(&content, &c.abs())
        };
    }
    content
}

/// Divide both coordinates by the rational content of their combined
/// coefficients, giving a primitive integral representative of `[p : q]`.
pub fn content_reduce_pair(
    ctx: &FieldContext,
    p: &FieldElement,
    q: &FieldElement,
) -> (FieldElement, FieldElement) {
    let content = pair_content(p, q);
    if content.is_zero() || content.is_one() {
        return (p.clone(), q.clone());
    }
    let inv = content.recip();
    (ctx.scale(p, &inv), ctx.scale(q, &inv))
}

/// Height of the projective pair `[p : q]`: the product over the real
/// embeddings of `|sigma(p)| + |sigma(q)|`, after content reduction. The
/// returned interval is a certified enclosure; `precision` is the bit width
/// requested from each embedding.
pub fn height(
    ctx: &FieldContext,
    p: &FieldElement,
    q: &FieldElement,
    precision: u32,
) -> Result<RatInterval, HeightError> {
    if p.is_zero() && q.is_zero() {
        return Err(HeightError::ZeroPair);
    }
    let (p, q) = content_reduce_pair(ctx, p, q);
    let mut acc = RatInterval::point(BigRational::one());
    for root in 0..ctx.root_count() {
        let ep = ctx.embed_at(&p, root, precision).abs();
        let eq = ctx.embed_at(&q, root, precision).abs();
        acc = acc.mul(&ep.add(&eq));
    }
    Ok(acc)
}

/// Natural log of the height, as a plain double.
pub fn log_height(
    ctx: &FieldContext,
    p: &FieldElement,
    q: &FieldElement,
    precision: u32,
) -> Result<f64, HeightError> {
    let h = height(ctx, p, q, precision)?;
    Ok(approx_ln(&h.mid()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryStatus {
    /// The expansion terminated after this many digit steps.
    Terminated(usize),
    StepLimit,
}

/// Log-height along a continued fraction expansion.
///
/// The tail is carried as an exact projective pair updated by the digit
/// matrices, so heights see the unimodular structure of the orbit rather
/// than cleared denominators; at step `i` the recorded value is
/// `log h(tail_i / lambda)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightTrajectory {
    pub steps: Vec<(usize, f64)>,
    pub status: TrajectoryStatus,
}

pub fn height_trajectory(
    ctx: &FieldContext,
    x: &FieldElement,
    max_steps: usize,
) -> HeightTrajectory {
    let lam = ctx.lambda();
    let mut p = x.clone();
    let mut q = ctx.one();
    let mut steps = Vec::new();
    for i in 0..max_steps {
        if q.is_zero() {
            return HeightTrajectory {
                steps,
                status: TrajectoryStatus::Terminated(i),
            };
        }
        let lam_q = ctx.mul(&lam, &q);
        let h = log_height(ctx, &p, &lam_q, 64).expect("pair never both zero");
        steps.push((i, h));
        let tail = ctx.div(&p, &q).unwrap();
        let (a, r) = rosen_digit(ctx, &tail);
        if r.is_zero() {
            return HeightTrajectory {
                steps,
                status: TrajectoryStatus::Terminated(i + 1),
            };
        }
        // x -> -1 / (x - a lambda) on the pair
        let new_q = ctx.sub(&p, &ctx.mul(&ctx.scale(&lam, &BigRational::from(a)), &q));
        let new_p = ctx.neg(&q);
        let (rp, rq) = content_reduce_pair(ctx, &new_p, &new_q);
        p = rp;
        q = rq;
    }
    HeightTrajectory {
        steps,
        status: TrajectoryStatus::StepLimit,
    }
}

/// Constraint set for systematic periodic-part searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConstraints {
    /// Every digit is a signed power of two.
    pub pow2_magnitudes: bool,
    /// Equal numbers of positive and negative digits.
    pub balanced_signs: bool,
    /// The digit product equals `2^length`.
    pub product_is_pow2_len: bool,
    /// For non-pow2 searches, the magnitude bound (ignored otherwise).
    pub max_abs: i64,
}

impl SearchConstraints {
    /// The constraint set observed for the q = 18 searches.
    pub fn paper_q18() -> SearchConstraints {
        SearchConstraints {
            pow2_magnitudes: true,
            balanced_signs: true,
            product_is_pow2_len: true,
            max_abs: 0,
        }
    }
}

/// One surviving periodic part: special hyperbolic and realized as an
/// actual continued-fraction period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub class: DigitSeq,
    pub trace: FieldElement,
    pub eigenvalue: Option<FieldElement>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub hits: Vec<SearchHit>,
    /// Candidates whose specialness could not be decided within budget.
    pub undetermined: Vec<DigitSeq>,
    /// Number of symmetry classes examined.
    pub classes_examined: u64,
}

/// Enumerate all digit sequences of the given length satisfying the
/// constraints, deduplicate by symmetry class, and keep the classes that are
/// special hyperbolic and validate as genuine periods. Output is sorted and
/// independent of enumeration order.
pub fn search_periodic(
    ctx: &FieldContext,
    length: usize,
    constraints: &SearchConstraints,
) -> SearchOutcome {
    assert!(length >= 1);
    let mut outcome = SearchOutcome::default();
    let consider = |seq: &[i64], outcome: &mut SearchOutcome| {
        let seq = DigitSeq::new(seq.to_vec());
        // process each symmetry class once, via its canonical representative
        if symmetry_class(&seq) != seq {
            return;
        }
        // a non-primitive sequence is never a minimal period
        if !seq.is_primitive() {
            return;
        }
        outcome.classes_examined += 1;
        let m = rosen::period_matrix_seq(ctx, &seq);
        match classify(ctx, &m) {
            Err(_) => outcome.undetermined.push(seq),
            Ok(spec) => {
                if spec.kind != ElementKind::Hyperbolic || !spec.special {
                    return;
                }
                match validate_period(ctx, &seq) {
                    Ok(true) => outcome.hits.push(SearchHit {
                        class: seq,
                        trace: spec.trace,
                        eigenvalue: spec.eigenvalue,
                    }),
                    Ok(false) => {}
                    Err(PeriodError::Undetermined) => outcome.undetermined.push(seq),
                    Err(PeriodError::NotHyperbolic) => {}
                }
            }
        }
    };

    if constraints.pow2_magnitudes {
        enumerate_pow2(length, constraints, &mut |seq, out| consider(seq, out), &mut outcome);
    } else {
        assert!(constraints.max_abs >= 1, "generic search needs a magnitude bound");
        enumerate_bounded(length, constraints, &mut |seq, out| consider(seq, out), &mut outcome);
    }
    outcome.hits.sort_by(|a, b| a.class.cmp(&b.class));
    outcome.undetermined.sort();
    outcome
}

/// Walk signed power-of-two digit vectors. With the product constraint the
/// exponents are compositions of `length`; sign masks respect the balance
/// constraint.
fn enumerate_pow2(
    length: usize,
    constraints: &SearchConstraints,
    consider: &mut dyn FnMut(&[i64], &mut SearchOutcome),
    outcome: &mut SearchOutcome,
) {
    assert!(length <= 20, "pow2 search length out of range");
    let masks: Vec<u32> = (0u32..(1 << length))
        .filter(|m| {
            !constraints.balanced_signs || m.count_ones() as usize * 2 == length
        })
        .collect();
    // exponent vectors: sum = length when the product constraint is on,
    // otherwise each exponent up to log2(max_abs)
    let mut exps = vec![0u32; length];
    let mut seq = vec![0i64; length];
    if constraints.product_is_pow2_len {
        compositions(length as u32, length, &mut exps, 0, &mut |exps| {
            for &mask in &masks {
                for i in 0..length {
                    let mag = 1i64 << exps[i];
                    seq[i] = if (mask >> i) & 1 == 1 { -mag } else { mag };
                }
                consider(&seq, outcome);
            }
        });
    } else {
        let max_exp = (constraints.max_abs.max(1) as f64).log2() as u32;
        odometer(length, max_exp, &mut exps, &mut |exps| {
            for &mask in &masks {
                for i in 0..length {
                    let mag = 1i64 << exps[i];
                    seq[i] = if (mask >> i) & 1 == 1 { -mag } else { mag };
                }
                consider(&seq, outcome);
            }
        });
    }
}

/// All ways to write `total` as an ordered sum of `slots` nonnegative parts.
fn compositions(
    total: u32,
    slots: usize,
    buf: &mut [u32],
    pos: usize,
    f: &mut impl FnMut(&[u32]),
) {
    if pos == slots - 1 {
        buf[pos] = total;
        f(buf);
        return;
    }
    for v in 0..=total {
        buf[pos] = v;
        compositions(total - v, slots, buf, pos + 1, f);
    }
}

fn odometer(slots: usize, max: u32, buf: &mut [u32], f: &mut impl FnMut(&[u32])) {
    fn rec(slots: usize, max: u32, buf: &mut [u32], pos: usize, f: &mut impl FnMut(&[u32])) {
        if pos == slots {
            f(buf);
            return;
        }
        for v in 0..=max {
            buf[pos] = v;
            rec(slots, max, buf, pos + 1, f);
        }
    }
    rec(slots, max, buf, 0, f);
}

fn enumerate_bounded(
    length: usize,
    constraints: &SearchConstraints,
    consider: &mut dyn FnMut(&[i64], &mut SearchOutcome),
    outcome: &mut SearchOutcome,
) {
    let max = constraints.max_abs;
    let mut seq = vec![0i64; length];
    fn rec(
        length: usize,
        max: i64,
        balanced: bool,
        seq: &mut Vec<i64>,
        pos: usize,
        consider: &mut dyn FnMut(&[i64], &mut SearchOutcome),
        outcome: &mut SearchOutcome,
    ) {
        if pos == length {
            if balanced {
                let negs = seq.iter().filter(|&&d| d < 0).count();
                if negs * 2 != length {
                    return;
                }
            }
            consider(seq, outcome);
            return;
        }
        for mag in 1..=max {
            for sign in [1i64, -1] {
                seq[pos] = sign * mag;
                rec(length, max, balanced, seq, pos + 1, consider, outcome);
            }
        }
    }
    rec(
        length,
        max,
        constraints.balanced_signs,
        &mut seq,
        0,
        consider,
        outcome,
    );
}

/// Check that a table row reproduces: the representative expands
/// preperiodically with the expected period up to rotation, negation, and
/// reversal.
pub fn spot_check_table(
    ctx: &FieldContext,
    representative: &FieldElement,
    expected_period: &DigitSeq,
    max_steps: usize,
) -> bool {
    let e = expand_element(ctx, representative, max_steps);
    match e.period_seq() {
        Some(found) => symmetry_class(&found) == symmetry_class(expected_period),
        None => false,
    }
}
