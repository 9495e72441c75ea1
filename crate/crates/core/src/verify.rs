//! Self-check suites: exact hypergeometric identities, exact combinatorics
//! and density oracles, each returning a serializable report.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::curves::{trace_sweep, BuiltinFamily, TraceValue};
use crate::error::{Error, Result};
use crate::ffield::{build_field, GaussTable, PrimeFieldContext};
use crate::hypfun::{clausen_argument, clausen_trace_value, hp_direct, hp_via_traces, HypDatum};
use crate::theory::combinatorics::theorem1_gamma_ratio;
use crate::theory::density::{semicircle_cdf, semicircle_moment, DensityKind, DensitySpec, Theorem1Cdf};
use crate::theory::meijer::meijer_transform_report;
use crate::theory::{
    binomial, catalan, catalan_gamma_identity, combmom_check, multiplicity_nm, sym2_multiplicity, theorem1_limit,
    theorem3_limit,
};

/// A failing instance of an exact identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub p: u64,
    pub d: Option<u32>,
    pub lambda: u64,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub p: Option<u64>,
    pub d: Option<u32>,
    /// Number of instances evaluated.
    pub checked: u64,
    pub passed: bool,
    /// Largest observed error for tolerance checks.
    pub error: Option<f64>,
    pub tolerance: Option<f64>,
    pub counterexample: Option<Counterexample>,
}

impl CheckRecord {
    fn exact(name: impl Into<String>, p: Option<u64>, d: Option<u32>, checked: u64, cx: Option<Counterexample>) -> Self {
        Self { name: name.into(), p, d, checked, passed: cx.is_none(), error: None, tolerance: None, counterexample: cx }
    }

    fn within(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            p: None,
            d: None,
            checked: 1,
            passed: error <= tolerance,
            error: Some(error),
            tolerance: Some(tolerance),
            counterexample: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckRecord>) -> Self {
        Self { suite: suite.into(), passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| !c.passed)
    }
}

const DEGREES: [u32; 4] = [2, 3, 4, 6];

fn mismatch(p: u64, d: Option<u32>, lambda: u64, expected: impl ToString, actual: impl ToString) -> Counterexample {
    Counterexample { p, d, lambda, expected: expected.to_string(), actual: actual.to_string() }
}

/// `H_p({1/d, (d-1)/d}; {1, 1} | lambda) = a_d(lambda)` for good `lambda` off `{0, 1}`.
fn length_two_identity(ctx: &PrimeFieldContext, gauss: &GaussTable<f64>, d: u32) -> Result<CheckRecord> {
    let p = ctx.p();
    let datum = HypDatum::length2(d)?;
    let sweep = trace_sweep(&BuiltinFamily::for_degree(d)?.family(), ctx, 1)?;
    let (mut checked, mut cx) = (0, None);
    for l in 2..p {
        if let TraceValue::Good(a) = sweep.get(l) {
            let h = hp_direct(ctx, gauss, &datum, l)?;
            checked += 1;
            if h != a {
                cx = Some(mismatch(p, Some(d), l, a, h));
                break;
            }
        }
    }
    Ok(CheckRecord::exact(format!("length2 d={d}"), Some(p), Some(d), checked, cx))
}

/// `H_p(alpha_d, beta | mu) = a_d(lambda) + a_d(-lambda)` for `mu = lambda^2`,
/// and `0` for nonresidue `mu`.
fn length_four_identity(ctx: &PrimeFieldContext, gauss: &GaussTable<f64>, d: u32) -> Result<CheckRecord> {
    let p = ctx.p();
    let datum = HypDatum::theorem1(d)?;
    let family = BuiltinFamily::for_degree(d)?.family();
    let plus = trace_sweep(&family, ctx, 1)?;
    let minus = plus.negated(&family)?;
    let (mut checked, mut cx) = (0, None);
    for mu in 2..p {
        let via = match hp_via_traces(ctx, d, &plus, &minus, mu) {
            Ok(v) => v,
            Err(Error::BoundaryLambda(_)) => continue,
            Err(e) => return Err(e),
        };
        let h = hp_direct(ctx, gauss, &datum, mu)?;
        checked += 1;
        if h != via {
            cx = Some(mismatch(p, Some(d), mu, via, h));
            break;
        }
    }
    Ok(CheckRecord::exact(format!("length4 d={d}"), Some(p), Some(d), checked, cx))
}

/// `H_p({1/2,1/2,1/2}; {1,1,1} | lambda/(lambda+1)) = phi(lambda+1)(a_Cl(lambda)^2 - p)`.
fn clausen_identity(ctx: &PrimeFieldContext, gauss: &GaussTable<f64>) -> Result<CheckRecord> {
    let p = ctx.p();
    let datum = HypDatum::clausen();
    let sweep = trace_sweep(&BuiltinFamily::Clausen.family(), ctx, 1)?;
    let (mut checked, mut cx) = (0, None);
    for l in 1..p - 1 {
        let (TraceValue::Good(a), Some(mu)) = (sweep.get(l), clausen_argument(p, l)) else {
            continue;
        };
        let want = clausen_trace_value(ctx, a, l);
        let h = hp_direct(ctx, gauss, &datum, mu)?;
        checked += 1;
        if h != want {
            cx = Some(mismatch(p, None, l, want, h));
            break;
        }
    }
    Ok(CheckRecord::exact("clausen", Some(p), None, checked, cx))
}

/// Exact dual-path identities at each prime, for every built-in datum whose
/// modulus divides `p - 1`.
pub fn verify_identities(primes: &[u64]) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for &p in primes {
        let ctx = build_field(p)?;
        let gauss = GaussTable::new(&ctx)?;
        for d in DEGREES {
            if HypDatum::length2(d)?.admits(p) {
                checks.push(length_two_identity(&ctx, &gauss, d)?);
            }
        }
        for d in DEGREES {
            if HypDatum::theorem1(d)?.admits(p) {
                checks.push(length_four_identity(&ctx, &gauss, d)?);
            }
        }
        checks.push(clausen_identity(&ctx, &gauss)?);
    }
    Ok(SuiteReport::new("identities", checks))
}

fn first_failure<I, F>(range: I, mut test: F) -> (u64, Option<Counterexample>)
where
    I: IntoIterator<Item = u32>,
    F: FnMut(u32) -> Option<(String, String)>,
{
    let mut n = 0;
    for m in range {
        n += 1;
        if let Some((want, got)) = test(m) {
            return (n, Some(mismatch(0, None, m as u64, want, got)));
        }
    }
    (n, None)
}

fn differ(a: &BigInt, b: &BigInt) -> Option<(String, String)> {
    (a != b).then(|| (a.to_string(), b.to_string()))
}

/// Exact combinatorial identities up to `max_order`. In counterexamples
/// `lambda` holds the failing order.
pub fn verify_combinatorics(max_order: u32) -> SuiteReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, (n, cx): (u64, Option<Counterexample>)| {
        checks.push(CheckRecord::exact(name, None, None, n, cx));
    };
    push(
        "catalan recurrence",
        first_failure(0..max_order, |n| {
            let rhs = (0..=n).fold(BigInt::zero(), |acc, i| acc + catalan(i) * catalan(n - i));
            differ(&catalan(n + 1), &rhs)
        }),
    );
    push(
        "catalan closed form",
        first_failure(0..=max_order, |n| differ(&(binomial(2 * n, n) / (n + 1)), &catalan(n))),
    );
    push(
        "multiplicities sum to 2^m",
        first_failure(0..=max_order, |m| {
            let total = (0..=m).try_fold(BigInt::zero(), |acc, r| Ok::<_, Error>(acc + multiplicity_nm(m, r)? * (r + 1)));
            match total {
                Ok(t) => differ(&(BigInt::from(1) << m), &t),
                Err(e) => Some(("integral".into(), e.to_string())),
            }
        }),
    );
    push(
        "multiplicity of trivial is catalan",
        first_failure(0..=max_order, |m| {
            let want = if m % 2 == 0 { catalan(m / 2) } else { BigInt::zero() };
            match multiplicity_nm(m, 0) {
                Ok(v) => differ(&want, &v),
                Err(e) => Some((want.to_string(), e.to_string())),
            }
        }),
    );
    push(
        "sym2 binomial transform",
        first_failure(0..=max_order, |m| {
            let s = (0..=m).fold(BigInt::zero(), |acc, i| acc + binomial(m, i) * sym2_multiplicity(i));
            differ(&catalan(m), &s)
        }),
    );
    push(
        "combmom",
        first_failure(0..=max_order, |m| {
            let (l, r) = combmom_check(m);
            differ(&l, &r)
        }),
    );
    push(
        "catalan gamma identity",
        first_failure(0..=max_order, |m| {
            let (l, r) = catalan_gamma_identity(m);
            match r.as_rational() {
                Some(q) if q.is_integer() => differ(&l, q.numer()),
                _ => Some((l.to_string(), r.to_string())),
            }
        }),
    );
    SuiteReport::new("combinatorics", checks)
}

/// Normalization and moment oracles for the limiting densities, plus the
/// Meijer transform identities.
pub fn verify_density() -> Result<SuiteReport> {
    let spec = DensitySpec::new(DensityKind::MeijerTheorem1);
    let mut checks = vec![CheckRecord::within("theorem1 pdf integrates to 1", (spec.moment(0)? - 1.0).abs(), 1e-6)];
    for m in 1..=4 {
        let want = num_traits::ToPrimitive::to_f64(&theorem1_limit(m)).unwrap_or(f64::NAN);
        checks.push(CheckRecord::within(format!("theorem1 moment m={m}"), (spec.moment(m)? - want).abs(), 1e-3));
    }
    let table = Theorem1Cdf::new(801)?;
    checks.push(CheckRecord::within("theorem1 cdf reaches 1", (table.total() - 1.0).abs(), 1e-6));
    for m in 0..=4 {
        let want = num_traits::ToPrimitive::to_f64(&theorem3_limit(m)).unwrap_or(f64::NAN);
        checks.push(CheckRecord::within(format!("semicircle moment m={m}"), (semicircle_moment(m)? - want).abs(), 1e-9));
    }
    let cdf_ends = semicircle_cdf(-2.0f64).abs() + (semicircle_cdf(2.0f64) - 1.0).abs() + (semicircle_cdf(0.0f64) - 0.5).abs();
    checks.push(CheckRecord::within("semicircle cdf endpoints", cdf_ends, 1e-15));
    for c in meijer_transform_report()? {
        checks.push(CheckRecord::within(format!("meijer {}", c.name), (c.lhs - c.rhs).abs(), c.tolerance));
    }
    let ratio = theorem1_gamma_ratio(0).to_f64();
    checks.push(CheckRecord::within("gamma ratio m=0 equals pi/4", (ratio - std::f64::consts::FRAC_PI_4).abs(), 1e-15));
    Ok(SuiteReport::new("density", checks))
}
