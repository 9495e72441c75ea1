//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. The figure-scale run (criterion 9) is skipped unless
//! `--include-ignored` is passed or `HYPMOMENTS_ACCEPTANCE_FIGURE=1` is set.

use std::process::ExitCode;
use std::time::Instant;

use hypmoments::curves::{trace_sweep, BuiltinFamily, TraceSweep};
use hypmoments::ffield::{build_field, PrimeFieldContext};
use hypmoments::moments::{
    chebyshev_sum, histogram_build, ks_distance, mixed_empirical, theorem1_empirical, theorem1_samples,
    theorem3_empirical, theorem4_empirical, MomentReport,
};
use hypmoments::theory::density::Theorem1Cdf;
use hypmoments::theory::theorem1_limit;
use hypmoments::verify::{verify_combinatorics, verify_density, verify_identities};
use num_bigint::BigInt;
use num_rational::BigRational;

const P_SMALL: u64 = 10007;
const P_LARGE: u64 = 100003;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome { passed, summary: summary.into() }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Legendre sweep and its pullback at one prime.
struct LegendreData {
    ctx: PrimeFieldContext,
    plus: TraceSweep,
    minus: TraceSweep,
}

impl LegendreData {
    fn new(p: u64) -> hypmoments::Result<Self> {
        let ctx = build_field(p)?;
        let leg = BuiltinFamily::Legendre.family();
        let plus = trace_sweep(&leg, &ctx, threads())?;
        let minus = plus.negated(&leg)?;
        Ok(Self { ctx, plus, minus })
    }
}

fn describe(r: &MomentReport) -> String {
    format!("({},{}) dev {:.2e}/{:.2e}", r.n, r.m, r.deviation, r.tolerance())
}

fn all_within(reports: &[MomentReport]) -> (bool, String) {
    let ok = reports.iter().all(MomentReport::within_tolerance);
    let worst = reports
        .iter()
        .max_by(|a, b| (a.deviation / a.tolerance()).total_cmp(&(b.deviation / b.tolerance())))
        .map(describe)
        .unwrap_or_default();
    (ok, worst)
}

fn criterion1() -> hypmoments::Result<Outcome> {
    let r = verify_identities(&[7, 13, 19, 31, 37, 61])?;
    let n: u64 = r.checks.iter().map(|c| c.checked).sum();
    Ok(match r.first_failure() {
        None => outcome(true, format!("{} identity families, {n} exact equalities", r.checks.len())),
        Some(c) => outcome(false, format!("{} failed: {:?}", c.name, c.counterexample)),
    })
}

fn criterion2(small: &LegendreData, large: &LegendreData) -> hypmoments::Result<Outcome> {
    let mut reports = Vec::new();
    for m in 0..=6 {
        let r = theorem1_empirical(2, &small.plus, &small.minus, m)?;
        assert_eq!(r.limit, theorem1_limit(m));
        reports.push(r);
    }
    let want: Vec<BigRational> = [1, 0, 2, 0, 10, 0, 70].iter().map(|&k| BigRational::from_integer(BigInt::from(k))).collect();
    let limits_ok = reports.iter().zip(&want).all(|(r, w)| &r.limit == w);
    let (within, worst) = all_within(&reports);
    let mut shrink = Vec::new();
    for m in [2, 4] {
        let big = theorem1_empirical(2, &large.plus, &large.minus, m)?;
        shrink.push((m, reports[m as usize].deviation / big.deviation));
    }
    let shrinks = shrink.iter().all(|(_, f)| *f >= 2.0);
    let factors: Vec<String> = shrink.iter().map(|(m, f)| format!("m={m} x{f:.1}")).collect();
    Ok(outcome(limits_ok && within && shrinks, format!("worst {worst}; shrink {}", factors.join(", "))))
}

fn criterion3(small: &LegendreData) -> hypmoments::Result<Outcome> {
    let pairs = [(1, 1), (2, 2), (2, 0), (3, 1), (4, 2)];
    let limits = [0, 1, 1, 0, 2];
    let mut reports = Vec::new();
    for (n, m) in pairs {
        reports.push(mixed_empirical(&small.plus, &small.minus, n, m)?);
    }
    let limits_ok = reports.iter().zip(limits).all(|(r, l)| r.limit == BigRational::from_integer(BigInt::from(l)));
    let (within, worst) = all_within(&reports);
    Ok(outcome(limits_ok && within, format!("worst {worst}")))
}

fn criterion4(small: &LegendreData) -> hypmoments::Result<Outcome> {
    let mut reports = Vec::new();
    for d in [2, 3, 4, 6] {
        let sweep = if d == 2 {
            small.plus.clone()
        } else {
            trace_sweep(&BuiltinFamily::for_degree(d)?.family(), &small.ctx, threads())?
        };
        for m in 0..=6 {
            reports.push(theorem3_empirical(d, &sweep, m)?);
        }
    }
    let clausen = trace_sweep(&BuiltinFamily::Clausen.family(), &small.ctx, threads())?;
    let limits = [1, 0, 1, 0, 3, 0, 15];
    let mut limits_ok = true;
    for m in 0..=6 {
        let r = theorem4_empirical(&clausen, &small.ctx, m)?;
        limits_ok &= r.limit == BigRational::from_integer(BigInt::from(limits[m as usize]));
        reports.push(r);
    }
    let (within, worst) = all_within(&reports);
    Ok(outcome(limits_ok && within, format!("{} moments, worst {worst}", reports.len())))
}

fn criterion5(large: &LegendreData) -> Outcome {
    let p = large.ctx.p() as f64;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for m in 1..=6u32 {
        let s = chebyshev_sum(&large.plus, m).abs();
        let bound = 3.0 * (m + 1) as f64 / p.sqrt() + 10.0 * m as f64 / p;
        ok &= s <= bound;
        worst = worst.max(s / bound);
    }
    outcome(ok, format!("max |sum| / bound = {worst:.3}"))
}

fn criterion6() -> Outcome {
    let t = Instant::now();
    let r = verify_combinatorics(30);
    let secs = t.elapsed().as_secs_f64();
    let ok = r.passed && secs < 1.0;
    let detail = match r.first_failure() {
        Some(c) => format!("{} failed: {:?}", c.name, c.counterexample),
        None => format!("{} identity families exact to order 30", r.checks.len()),
    };
    outcome(ok, format!("{detail} in {secs:.3}s"))
}

fn criterion7() -> hypmoments::Result<Outcome> {
    let r = verify_density()?;
    Ok(match r.first_failure() {
        None => outcome(true, format!("{} oracles within tolerance", r.checks.len())),
        Some(c) => outcome(false, format!("{}: error {:?} > {:?}", c.name, c.error, c.tolerance)),
    })
}

fn criterion8(small: &LegendreData, large: &LegendreData, cdf: &Theorem1Cdf) -> hypmoments::Result<Outcome> {
    let ks = |data: &LegendreData| -> hypmoments::Result<f64> {
        let samples = theorem1_samples(2, &data.plus, &data.minus)?;
        ks_distance(&samples, |t| cdf.eval(t))
    };
    let (a, b) = (ks(small)?, ks(large)?);
    Ok(outcome(a <= 0.05 && b <= a, format!("KS {a:.4} at p={P_SMALL}, {b:.4} at p={P_LARGE}")))
}

fn criterion9(cdf: &Theorem1Cdf) -> hypmoments::Result<Outcome> {
    let p = 524287;
    let data = LegendreData::new(p)?;
    let samples = theorem1_samples(2, &data.plus, &data.minus)?;
    let h = histogram_build(&samples, -4.0, 4.0, 80)?;
    let ks = ks_distance(&samples, |t| cdf.eval(t))?;
    let peak = h.heights().iter().cloned().fold(0.0, f64::max);
    Ok(outcome(ks <= 0.05, format!("p={p}: {} samples, KS {ks:.4}, peak height {peak:.3}", h.total)))
}

fn report(n: u32, elapsed: f64, result: hypmoments::Result<Outcome>, failures: &mut u32) {
    let o = result.unwrap_or_else(|e| outcome(false, format!("error: {e}")));
    if !o.passed {
        *failures += 1;
    }
    println!("criterion {n}: {} ({elapsed:.1}s) {}", if o.passed { "PASS" } else { "FAIL" }, o.summary);
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    // Under `cargo test` the harness flags arrive here; a listing request gets no work.
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let figure = args.iter().any(|a| a == "--include-ignored" || a == "--ignored")
        || std::env::var("HYPMOMENTS_ACCEPTANCE_FIGURE").is_ok_and(|v| v == "1");

    let mut failures = 0;
    let timed = |f: &mut dyn FnMut() -> hypmoments::Result<Outcome>| {
        let t = Instant::now();
        let r = f();
        (t.elapsed().as_secs_f64(), r)
    };

    let (t, r) = timed(&mut criterion1);
    report(1, t, r, &mut failures);

    let t0 = Instant::now();
    let data = LegendreData::new(P_SMALL).and_then(|s| Ok((s, LegendreData::new(P_LARGE)?)));
    println!("sweeps: legendre at p={P_SMALL} and p={P_LARGE} in {:.1}s", t0.elapsed().as_secs_f64());
    let t0 = Instant::now();
    let cdf = Theorem1Cdf::new(401);
    println!("limiting cdf table in {:.1}s", t0.elapsed().as_secs_f64());

    match (&data, &cdf) {
        (Ok((small, large)), Ok(cdf)) => {
            let (t, r) = timed(&mut || criterion2(small, large));
            report(2, t, r, &mut failures);
            let (t, r) = timed(&mut || criterion3(small));
            report(3, t, r, &mut failures);
            let (t, r) = timed(&mut || criterion4(small));
            report(4, t, r, &mut failures);
            let (t, r) = timed(&mut || Ok(criterion5(large)));
            report(5, t, r, &mut failures);
            let (t, r) = timed(&mut || Ok(criterion6()));
            report(6, t, r, &mut failures);
            let (t, r) = timed(&mut criterion7);
            report(7, t, r, &mut failures);
            let (t, r) = timed(&mut || criterion8(small, large, cdf));
            report(8, t, r, &mut failures);
            if figure {
                let (t, r) = timed(&mut || criterion9(cdf));
                report(9, t, r, &mut failures);
            } else {
                println!("criterion 9: SKIPPED (pass --include-ignored or set HYPMOMENTS_ACCEPTANCE_FIGURE=1)");
            }
        }
        _ => {
            let e = data.err().or(cdf.err()).map(|e| e.to_string()).unwrap_or_default();
            for n in 2..=8 {
                println!("criterion {n}: FAIL setup error: {e}");
            }
            failures += 7;
        }
    }

    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
