use std::time::Instant;

use hecke_core::census::{run_census, search_periodic, ScanSet, ScanSpec, SearchConstraints};
use hecke_core::field::FieldContext;
use hecke_core::traces::{family_trace, g18_families, unit_power_decompose, verify_family};

#[test]
#[ignore]
fn probe_family_base_powers() {
    let ctx = FieldContext::new(18);
    let u = ctx.named("u18").unwrap().clone();
    for (i, f) in g18_families().iter().enumerate() {
        let t0 = Instant::now();
        // exponent of tr(M_0) over u18 itself and over the family unit
        let tr0 = family_trace(&ctx, f, 0);
        let over_u18 = unit_power_decompose(&ctx, &tr0, &u);
        let spec_b = hecke_core::group::classify(&ctx, &hecke_core::group::m_word(&ctx, f.b.digits())).unwrap();
        let unit = spec_b.eigenvalue.clone();
        let n = unit
            .as_ref()
            .and_then(|ub| unit_power_decompose(&ctx, &tr0, ub));
        let ub_over_u18 = unit
            .as_ref()
            .map(|ub| {
                (0..9i64)
                    .find(|&e| {
                        ctx.pow(&u, e).map(|p| p == *ub || ctx.neg(&p) == *ub).unwrap_or(false)
                    })
            });
        println!(
            "family {:2}: tr(M_0) = u18^{:?}, n over unit = {:?}, eigen(B) = +-u18^{:?}, special B = {}, {:?}",
            i + 1,
            over_u18,
            n,
            ub_over_u18,
            spec_b.special,
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_verify_all_families() {
    let ctx = FieldContext::new(18);
    let t0 = Instant::now();
    for (i, f) in g18_families().iter().enumerate() {
        let t = Instant::now();
        let v = verify_family(&ctx, f, 3);
        match v {
            Ok(verdict) => println!(
                "family {:2}: ok exponents {:?} in {:?}",
                i + 1,
                verdict.exponents,
                t.elapsed()
            ),
            Err(e) => println!("family {:2}: FAILED {:?} after {:?}", i + 1, e, t.elapsed()),
        }
    }
    println!("total {:?}", t0.elapsed());
}

#[test]
#[ignore]
fn probe_census_timing() {
    let ctx = FieldContext::new(7);
    let t0 = Instant::now();
    let spec = ScanSpec {
        set: ScanSet::Integers { lo: 1, hi: 1000 },
        premul: None,
    };
    let report = run_census(&ctx, &spec, 10_000);
    println!("census [1,1000]: {:?}", t0.elapsed());
    for row in &report.rows {
        println!(
            "  {:?} count {} rep {}",
            row.label,
            row.count,
            ctx.to_human(&row.representative)
        );
    }
    println!("undetermined {}", report.undetermined);
}

#[test]
#[ignore]
fn probe_search_l8() {
    let ctx = FieldContext::new(18);
    let t0 = Instant::now();
    let outcome = search_periodic(&ctx, 8, &SearchConstraints::paper_q18());
    println!(
        "search L=8: {:?}, classes examined {}, undetermined {}",
        t0.elapsed(),
        outcome.classes_examined,
        outcome.undetermined.len()
    );
    for h in &outcome.hits {
        println!("  {}", h.class);
    }
}

#[test]
#[ignore]
fn probe_expand_profile() {
    use hecke_core::rosen::{expand_element, rosen_digit};
    let ctx = FieldContext::new(7);
    // measure step counts
    let mut total_steps = 0usize;
    let t0 = Instant::now();
    for n in 500..600 {
        let e = expand_element(&ctx, &ctx.from_int(n), 10_000);
        total_steps += e.steps;
    }
    let full = t0.elapsed();
    println!("100 points, {} steps, {:?} ({:?}/step)", total_steps, full, full / total_steps as u32);

    // time digit vs inversion on a long expansion path
    let x0 = ctx.from_int(577);
    let mut x = x0.clone();
    let mut t_digit = std::time::Duration::ZERO;
    let mut t_inv = std::time::Duration::ZERO;
    let mut steps = 0;
    loop {
        let t = Instant::now();
        let (_a, r) = rosen_digit(&ctx, &x);
        t_digit += t.elapsed();
        if r.is_zero() { break; }
        let t = Instant::now();
        x = ctx.neg(&ctx.inv(&r).unwrap());
        t_inv += t.elapsed();
        steps += 1;
        if steps > 2000 { break; }
    }
    println!("x=577: {} steps, digit {:?}, inv {:?}", steps, t_digit, t_inv);
}

#[test]
#[ignore]
fn probe_digit_parts() {
    use hecke_core::rosen::{expand_with_options};
    use hecke_core::group::ProjPoint;
    let ctx = FieldContext::new(7);
    // collect real tails
    let e = expand_with_options(&ctx, &ProjPoint::Finite(ctx.from_int(577)), 10_000, true);
    let tails = e.tail_trace.unwrap();
    println!("{} tails", tails.len());
    // coefficient sizes
    for (i, t) in tails.iter().enumerate().step_by(8) {
        let bits: Vec<(u64, u64)> = t.coeffs().iter().map(|c| (c.numer().magnitude().bits(), c.denom().magnitude().bits())).collect();
        println!("tail {}: coeff bits {:?}", i, bits);
    }
    let lam = ctx.lambda();
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let half_lam = ctx.scale(&lam, &half);
    // time embed vs sign on all tails
    let t0 = Instant::now();
    for t in &tails {
        let _ = ctx.embed_at(t, ctx.distinguished_root(), 8);
    }
    println!("embed_at prec 8 on all tails: {:?}", t0.elapsed());
    let t0 = Instant::now();
    for t in &tails {
        let r = ctx.sub(t, &half_lam);
        let _ = ctx.sign(&r);
    }
    println!("sub+sign on all tails: {:?}", t0.elapsed());
    let t0 = Instant::now();
    for t in &tails {
        let _ = hecke_core::rosen::rosen_digit(&ctx, t);
    }
    println!("rosen_digit on all tails: {:?}", t0.elapsed());
}
