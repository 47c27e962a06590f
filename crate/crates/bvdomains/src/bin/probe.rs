use bvdomains::engeler::{t_star, DenoteCtx, ValEnv};
use bvdomains::lambda::app;
use std::sync::atomic::Ordering;
use std::time::Instant;

fn main() {
    let ctx = DenoteCtx::new();
    let t = t_star();
    let n = 4u64;
    let term = app(ctx.num_term(n), ctx.numeral_term(n));
    let start = Instant::now();
    let r = ctx.denote_member(&term, &ValEnv::new(), &t, 100).unwrap();
    eprintln!(
        "num_{n} #{n} fuel 100: {r:?} ({:?}) member_calls={} apply_calls={} envs={}",
        start.elapsed(),
        ctx.stats.member_calls.load(Ordering::Relaxed),
        ctx.stats.apply_calls.load(Ordering::Relaxed),
        ctx.stats.envs.load(Ordering::Relaxed),
    );
}
