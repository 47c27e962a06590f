// Exploratory probe for the membership search: recognizer terms applied to
// numerals must reach the boolean witnesses at bounded fuel.

use bvdomains::engeler::{t_star, DenoteCtx, ValEnv};
use bvdomains::lambda::app;
use std::time::Instant;

#[test]
fn recognizer_diagonal_reaches_true() {
    let ctx = DenoteCtx::new();
    let t = t_star();
    for n in 0..=5u64 {
        let start = Instant::now();
        let term = app(ctx.num_term(n), ctx.numeral_term(n));
        let mut found = None;
        for fuel in [10u32, 20, 40, 80, 160] {
            if ctx
                .denote_member(&term, &ValEnv::new(), &t, fuel)
                .unwrap()
                .is_yes()
            {
                found = Some(fuel);
                break;
            }
        }
        println!(
            "num_{n} #{n}: fuel {:?} in {:?}",
            found,
            start.elapsed()
        );
        assert!(found.is_some(), "num_{n} #{n} must reach t*");
    }
}

#[test]
fn recognizer_off_diagonal_reaches_false() {
    let ctx = DenoteCtx::new();
    let f = bvdomains::engeler::f_star();
    let start = Instant::now();
    for m in 0..=3u64 {
        for n in 0..=3u64 {
            if m == n {
                continue;
            }
            let term = app(ctx.num_term(m), ctx.numeral_term(n));
            let yes = ctx
                .denote_member(&term, &ValEnv::new(), &f, 80)
                .unwrap()
                .is_yes();
            println!("num_{m} #{n} -> f*: {yes} ({:?})", start.elapsed());
            assert!(yes, "num_{m} #{n} must reach f*");
        }
    }
}

#[test]
fn fingerprint_tracing_works() {
    let ctx = DenoteCtx::new();
    let t = t_star();
    for n in 0..=5u64 {
        let start = Instant::now();
        let k = ctx.apply_member_demands(&ctx.num_term(n), &ctx.numeral_term(n), &t, 80);
        println!(
            "fingerprint {n}: {:?} elems in {:?}",
            k.as_ref().map(|k| k.len()),
            start.elapsed()
        );
        assert!(k.is_some());
    }
}
