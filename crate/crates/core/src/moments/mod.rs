//! Empirical moments of trace sweeps, accumulated exactly, and their
//! comparison with the limiting values.

mod histogram;
mod ks;

pub use histogram::{histogram_build, Histogram};
pub use ks::ks_distance;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::curves::{BuiltinFamily, CurveFamily, TraceSweep};
use crate::error::{Error, Result};
use crate::ffield::{GaussTable, PrimeFieldContext};
use crate::hypfun::{check_pair, clausen_argument, hp_direct, HypDatum};
use crate::theory::{chebyshev_u, theorem1_limit, theorem2_limit, theorem3_limit, theorem4_limit};

/// Integer sum that stays in `i128` until it would overflow, then spills
/// into a big integer.
#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    small: i128,
    big: BigInt,
}

impl ExactSum {
    pub fn add_i128(&mut self, x: i128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += BigInt::from(self.small) + BigInt::from(x);
                self.small = 0;
            }
        }
    }

    pub fn add_big(&mut self, x: &BigInt) {
        self.big += x;
    }

    /// Adds `base^m`.
    pub fn add_power(&mut self, base: i64, m: u32) {
        match (base as i128).checked_pow(m) {
            Some(v) => self.add_i128(v),
            None => self.add_big(&BigInt::from(base).pow(m)),
        }
    }

    /// Adds `x^n * y^m`.
    pub fn add_product_power(&mut self, x: i64, n: u32, y: i64, m: u32) {
        let v = (x as i128).checked_pow(n).and_then(|a| (y as i128).checked_pow(m).and_then(|b| a.checked_mul(b)));
        match v {
            Some(v) => self.add_i128(v),
            None => self.add_big(&(BigInt::from(x).pow(n) * BigInt::from(y).pow(m))),
        }
    }

    pub fn merge(&mut self, other: &ExactSum) {
        self.add_big(&other.big);
        self.add_i128(other.small);
    }

    pub fn value(&self) -> BigInt {
        &self.big + BigInt::from(self.small)
    }
}

/// Which limit a report compares against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum MomentSpec {
    /// Length-4 data, `H_p(alpha_d, beta | lambda^2)`.
    Theorem1 { d: u32 },
    /// Mixed moments of a pair of families.
    Theorem2 { first: String, second: String },
    /// Length-2 data, `H_p({1/d, (d-1)/d}; {1, 1} | lambda)`.
    Theorem3 { d: u32 },
    /// The Clausen datum `{1/2, 1/2, 1/2; 1, 1, 1}`.
    Theorem4,
}

impl MomentSpec {
    pub fn id(&self) -> String {
        match self {
            Self::Theorem1 { d } => format!("theorem1:d={d}"),
            Self::Theorem2 { first, second } => format!("theorem2:{first}/{second}"),
            Self::Theorem3 { d } => format!("theorem3:d={d}"),
            Self::Theorem4 => "theorem4".into(),
        }
    }
}

/// One empirical moment against its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub p: u64,
    pub spec: MomentSpec,
    /// First order; zero except for mixed moments.
    pub n: u32,
    pub m: u32,
    /// Exact sum before normalization.
    pub sum: BigInt,
    pub empirical: f64,
    pub limit: BigRational,
    pub deviation: f64,
    pub excluded: u64,
    /// Twice the exponent of `p` divided out (the exponent can be a half-integer).
    pub normalization_twice: u32,
}

impl MomentReport {
    #[allow(clippy::too_many_arguments)]
    fn new(p: u64, spec: MomentSpec, n: u32, m: u32, sum: BigInt, normalization_twice: u32, limit: BigRational, excluded: u64) -> Self {
        let empirical = normalize(&sum, p, normalization_twice);
        let deviation = (empirical - limit.to_f64().unwrap_or(f64::NAN)).abs();
        Self { p, spec, n, m, sum, empirical, limit, deviation, excluded, normalization_twice }
    }

    /// The exponent of `p` divided out.
    pub fn normalization(&self) -> f64 {
        self.normalization_twice as f64 / 2.0
    }

    /// `K p^(-1/2)` with `K = 10 * 2^(n+m)`.
    pub fn tolerance(&self) -> f64 {
        10.0 * 2f64.powi((self.n + self.m) as i32) / (self.p as f64).sqrt()
    }

    pub fn within_tolerance(&self) -> bool {
        self.deviation <= self.tolerance()
    }
}

impl Serialize for MomentReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            p: u64,
            spec: String,
            n: u32,
            m: u32,
            empirical: String,
            limit: String,
            deviation: f64,
            excluded: u64,
            normalization: f64,
            sum: &'a str,
        }
        let sum = self.sum.to_string();
        Row {
            p: self.p,
            spec: self.spec.id(),
            n: self.n,
            m: self.m,
            empirical: format!("{:.12}", self.empirical),
            limit: self.limit.to_string(),
            deviation: self.deviation,
            excluded: self.excluded,
            normalization: self.normalization(),
            sum: &sum,
        }
        .serialize(s)
    }
}

/// `sum / p^(e/2)`: exact division by `p^floor(e/2)`, then one division by
/// `sqrt(p)` when `e` is odd.
fn normalize(sum: &BigInt, p: u64, e_twice: u32) -> f64 {
    let q = BigRational::new(sum.clone(), BigInt::from(p).pow(e_twice / 2));
    let v = q.to_f64().unwrap_or(f64::NAN);
    if e_twice % 2 == 1 {
        v / (p as f64).sqrt()
    } else {
        v
    }
}

/// Sums `term(lambda)` over `lambda` in `0..p`, skipping `None`, in parallel
/// chunks merged in index order.
fn accumulate<F>(p: u64, term: F) -> (ExactSum, u64)
where
    F: Fn(u64, &mut ExactSum) -> bool + Sync,
{
    const CHUNK: u64 = 4096;
    let chunks: Vec<u64> = (0..p).step_by(CHUNK as usize).collect();
    let parts: Vec<(ExactSum, u64)> = chunks
        .par_iter()
        .map(|&start| {
            let mut acc = ExactSum::default();
            let mut skipped = 0;
            for l in start..(start + CHUNK).min(p) {
                if !term(l, &mut acc) {
                    skipped += 1;
                }
            }
            (acc, skipped)
        })
        .collect();
    parts.iter().fold((ExactSum::default(), 0), |(mut acc, sk), (a, s)| {
        acc.merge(a);
        (acc, sk + s)
    })
}

fn builtin_for(d: u32) -> Result<CurveFamily> {
    Ok(BuiltinFamily::for_degree(d)?.family())
}

fn check_same_prime(a: &TraceSweep, b: &TraceSweep) -> Result<()> {
    if a.p != b.p {
        return Err(Error::SweepMismatch(format!("sweeps at different primes {} and {}", a.p, b.p)));
    }
    Ok(())
}

fn check_family(sweep: &TraceSweep, family: &CurveFamily) -> Result<()> {
    if !sweep.is_for(family) {
        return Err(Error::SweepMismatch(format!(
            "sweep is for `{}`, expected `{}`",
            sweep.family_name,
            family.name()
        )));
    }
    Ok(())
}

fn pair_context(d: u32, plus: &TraceSweep, minus: &TraceSweep) -> Result<CurveFamily> {
    check_same_prime(plus, minus)?;
    let family = builtin_for(d)?;
    check_family(plus, &family)?;
    check_family(minus, &family.pullback_neg())?;
    Ok(family)
}

/// Values `a(lambda) + a(-lambda)` for `lambda^2` off `{0, 1}` and good in
/// both sweeps; `None` elsewhere.
fn theorem1_value(plus: &TraceSweep, minus: &TraceSweep, l: u64) -> Option<i64> {
    let p = plus.p;
    if l == 0 || l == 1 || l == p - 1 {
        return None;
    }
    let i = l as usize;
    (!plus.bad[i] && !minus.bad[i]).then(|| plus.traces[i] + minus.traces[i])
}

/// `p^(-m/2-1) sum_lambda H_p(alpha_d, beta | lambda^2)^m` over `lambda` with
/// `lambda^2` off `{0, 1}`.
pub fn theorem1_empirical(d: u32, sweep_plus: &TraceSweep, sweep_minus: &TraceSweep, m: u32) -> Result<MomentReport> {
    pair_context(d, sweep_plus, sweep_minus)?;
    let p = sweep_plus.p;
    let (acc, excluded) = accumulate(p, |l, acc| match theorem1_value(sweep_plus, sweep_minus, l) {
        Some(h) => {
            acc.add_power(h, m);
            true
        }
        None => false,
    });
    Ok(MomentReport::new(p, MomentSpec::Theorem1 { d }, 0, m, acc.value(), m + 2, theorem1_limit(m), excluded))
}

/// As [`theorem1_empirical`], with the excluded `lambda` contributing their
/// exact value `H_p(alpha_d, beta | lambda^2)` from the Gauss-sum definition.
/// Needs `p = 1 mod M(alpha_d)`.
pub fn theorem1_empirical_with_boundary(
    ctx: &PrimeFieldContext,
    gauss: &GaussTable<f64>,
    d: u32,
    sweep_plus: &TraceSweep,
    sweep_minus: &TraceSweep,
    m: u32,
) -> Result<MomentReport> {
    check_pair(ctx, &builtin_for(d)?, sweep_plus, sweep_minus)?;
    let mut r = theorem1_empirical(d, sweep_plus, sweep_minus, m)?;
    let datum = HypDatum::theorem1(d)?;
    let p = ctx.p();
    let mut extra = ExactSum::default();
    for l in 0..p {
        if theorem1_value(sweep_plus, sweep_minus, l).is_none() {
            let h = hp_direct(ctx, gauss, &datum, l * l % p)?;
            extra.add_power(h, m);
        }
    }
    extra.add_big(&r.sum);
    Ok(MomentReport::new(p, r.spec.clone(), 0, m, extra.value(), r.normalization_twice, std::mem::take(&mut r.limit), 0))
}

/// `p^(-1-(n+m)/2) sum_lambda a_1(lambda)^n a_2(lambda)^m` over `lambda` good in both.
pub fn mixed_empirical(sweep1: &TraceSweep, sweep2: &TraceSweep, n: u32, m: u32) -> Result<MomentReport> {
    check_same_prime(sweep1, sweep2)?;
    let p = sweep1.p;
    let (acc, excluded) = accumulate(p, |l, acc| {
        let i = l as usize;
        if sweep1.bad[i] || sweep2.bad[i] {
            return false;
        }
        acc.add_product_power(sweep1.traces[i], n, sweep2.traces[i], m);
        true
    });
    let spec = MomentSpec::Theorem2 { first: sweep1.family_name.clone(), second: sweep2.family_name.clone() };
    Ok(MomentReport::new(p, spec, n, m, acc.value(), n + m + 2, theorem2_limit(n, m), excluded))
}

/// `p^(-m/2-1) sum_lambda H_p({1/d, (d-1)/d}; {1, 1} | lambda)^m` over
/// `lambda` off `{0, 1}`, with `H_p = a_d(lambda)`.
pub fn theorem3_empirical(d: u32, sweep: &TraceSweep, m: u32) -> Result<MomentReport> {
    check_family(sweep, &builtin_for(d)?)?;
    let p = sweep.p;
    let (acc, excluded) = accumulate(p, |l, acc| {
        let i = l as usize;
        if l <= 1 || sweep.bad[i] {
            return false;
        }
        acc.add_power(sweep.traces[i], m);
        true
    });
    Ok(MomentReport::new(p, MomentSpec::Theorem3 { d }, 0, m, acc.value(), m + 2, theorem3_limit(m), excluded))
}

/// `p^(-1-m) sum_mu H_p({1/2,1/2,1/2}; {1,1,1} | mu)^m`, computed as
/// `sum_lambda [phi(lambda+1) (a_Cl(lambda)^2 - p)]^m` over `lambda` off
/// `{0, -1}`; `mu = lambda / (lambda + 1)` then runs over `F_p` minus `{0, 1}`.
pub fn theorem4_empirical(clausen_sweep: &TraceSweep, ctx: &PrimeFieldContext, m: u32) -> Result<MomentReport> {
    check_family(clausen_sweep, &BuiltinFamily::Clausen.family())?;
    let p = ctx.p();
    if clausen_sweep.p != p {
        return Err(Error::SweepMismatch(format!("sweep at p = {} used with p = {p}", clausen_sweep.p)));
    }
    let (acc, excluded) = accumulate(p, |l, acc| {
        let i = l as usize;
        if l == 0 || l == p - 1 || clausen_sweep.bad[i] {
            return false;
        }
        let a = clausen_sweep.traces[i];
        let h = ctx.quadchar(l + 1) as i64 * (a * a - p as i64);
        acc.add_power(h, m);
        true
    });
    Ok(MomentReport::new(p, MomentSpec::Theorem4, 0, m, acc.value(), 2 * m + 2, theorem4_limit(m), excluded))
}

/// As [`theorem4_empirical`], adding `H_p(. | 0)^m + H_p(. | 1)^m` from the
/// Gauss-sum definition. Needs odd `p`.
pub fn theorem4_empirical_with_boundary(
    clausen_sweep: &TraceSweep,
    ctx: &PrimeFieldContext,
    gauss: &GaussTable<f64>,
    m: u32,
) -> Result<MomentReport> {
    let r = theorem4_empirical(clausen_sweep, ctx, m)?;
    let datum = HypDatum::clausen();
    let mut acc = ExactSum::default();
    acc.add_big(&r.sum);
    for mu in [0, 1] {
        acc.add_power(hp_direct(ctx, gauss, &datum, mu)?, m);
    }
    Ok(MomentReport::new(r.p, r.spec, 0, m, acc.value(), r.normalization_twice, r.limit, 0))
}

/// `(1/p) sum_{good lambda} U_m(a(lambda) / (2 sqrt p))`.
pub fn chebyshev_sum(sweep: &TraceSweep, m: u32) -> f64 {
    let scale = 2.0 * (sweep.p as f64).sqrt();
    let s: f64 = sweep
        .traces
        .iter()
        .zip(&sweep.bad)
        .filter(|(_, b)| !**b)
        .map(|(a, _)| chebyshev_u(m, *a as f64 / scale))
        .sum();
    s / sweep.p as f64
}

/// Normalized length-4 values `H_p(alpha_d, beta | lambda^2) / sqrt(p)`, in `[-4, 4]`.
pub fn theorem1_samples(d: u32, sweep_plus: &TraceSweep, sweep_minus: &TraceSweep) -> Result<Vec<f64>> {
    pair_context(d, sweep_plus, sweep_minus)?;
    let r = (sweep_plus.p as f64).sqrt();
    Ok((0..sweep_plus.p)
        .filter_map(|l| theorem1_value(sweep_plus, sweep_minus, l))
        .map(|h| h as f64 / r)
        .collect())
}

/// Normalized length-2 values `a_d(lambda) / sqrt(p)`, in `[-2, 2]`.
pub fn theorem3_samples(d: u32, sweep: &TraceSweep) -> Result<Vec<f64>> {
    check_family(sweep, &builtin_for(d)?)?;
    let r = (sweep.p as f64).sqrt();
    Ok((2..sweep.p)
        .filter(|&l| !sweep.bad[l as usize])
        .map(|l| sweep.traces[l as usize] as f64 / r)
        .collect())
}

/// Sum of `H_p(. | mu)^m` over all `mu`, as a check helper: the Clausen
/// reindexing `mu = lambda / (lambda + 1)` is a bijection onto `F_p` minus `{1}`.
pub fn clausen_reindexing_is_bijective(p: u64) -> bool {
    let mut seen = vec![false; p as usize];
    for l in 0..p {
        if let Some(mu) = clausen_argument(p, l) {
            if std::mem::replace(&mut seen[mu as usize], true) {
                return false;
            }
        }
    }
    seen.iter().enumerate().all(|(mu, s)| *s == (mu != 1))
}

/// Zero sums are common for odd orders; expose the exact check.
pub fn is_exactly_zero(r: &MomentReport) -> bool {
    r.sum.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::trace_sweep;
    use crate::ffield::build_field;
    use num_traits::One;

    fn legendre_pair(p: u64) -> (PrimeFieldContext, TraceSweep, TraceSweep) {
        let ctx = build_field(p).unwrap();
        let leg = BuiltinFamily::Legendre.family();
        let plus = trace_sweep(&leg, &ctx, 1).unwrap();
        let minus = plus.negated(&leg).unwrap();
        (ctx, plus, minus)
    }

    #[test]
    fn exact_sum_spills() {
        let mut s = ExactSum::default();
        s.add_i128(i128::MAX);
        s.add_i128(i128::MAX);
        s.add_power(-3, 200);
        let want = BigInt::from(i128::MAX) * 2 + BigInt::from(3).pow(200);
        assert_eq!(s.value(), want);
        let mut t = ExactSum::default();
        t.add_product_power(1 << 40, 3, -7, 5);
        assert_eq!(t.value(), BigInt::from(1i64 << 40).pow(3) * BigInt::from(-7).pow(5));
    }

    #[test]
    fn zeroth_moment_counts_terms() {
        let (_, plus, minus) = legendre_pair(101);
        let r = theorem1_empirical(2, &plus, &minus, 0).unwrap();
        assert_eq!(r.limit, BigRational::one());
        assert_eq!(r.excluded, 3);
        assert!((r.empirical - 98.0 / 101.0).abs() < 1e-15);
        assert!(r.excluded <= 4 + 2);
    }

    #[test]
    fn mismatched_sweeps_rejected() {
        let (_, plus, minus) = legendre_pair(29);
        assert!(matches!(theorem1_empirical(2, &plus, &plus, 2), Err(Error::SweepMismatch(_))));
        assert!(matches!(theorem1_empirical(3, &plus, &minus, 2), Err(Error::SweepMismatch(_))));
        let (_, other, _) = legendre_pair(31);
        assert!(matches!(mixed_empirical(&plus, &other, 1, 1), Err(Error::SweepMismatch(_))));
        let ctx = build_field(29).unwrap();
        assert!(matches!(theorem4_empirical(&plus, &ctx, 2), Err(Error::SweepMismatch(_))));
    }

    #[test]
    fn mixed_accumulator_is_exact() {
        let (_, plus, minus) = legendre_pair(13);
        let r = mixed_empirical(&plus, &minus, 3, 3).unwrap();
        let mut direct = BigInt::zero();
        for l in 0..13usize {
            if !plus.bad[l] && !minus.bad[l] {
                direct += BigInt::from(plus.traces[l]).pow(3) * BigInt::from(minus.traces[l]).pow(3);
            }
        }
        assert_eq!(r.sum, direct);
        assert_eq!(r.normalization(), 4.0);
        let want = direct.to_f64().unwrap() / 13f64.powi(4);
        assert!((r.empirical - want).abs() < 1e-15 * want.abs().max(1.0));
    }

    #[test]
    fn half_integer_normalization() {
        let (_, plus, minus) = legendre_pair(101);
        let r = theorem1_empirical(2, &plus, &minus, 1).unwrap();
        assert_eq!(r.normalization(), 1.5);
        let want = r.sum.to_f64().unwrap() / 101f64.powf(1.5);
        assert!((r.empirical - want).abs() < 1e-12);
    }

    #[test]
    fn odd_moments_small() {
        for p in [13u64, 29, 53, 97] {
            let (_, plus, minus) = legendre_pair(p);
            for m in [1u32, 3, 5] {
                let r = theorem1_empirical(2, &plus, &minus, m).unwrap();
                let pf = p as f64;
                let bound = 4.0 * (4.0 * pf.sqrt()).powi(m as i32) / pf.powf(m as f64 / 2.0 + 1.0) * (r.excluded as f64);
                assert!(r.empirical.abs() <= bound, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn boundary_variant_counts_everything() {
        let (ctx, plus, minus) = legendre_pair(37);
        let g = GaussTable::new(&ctx).unwrap();
        let r0 = theorem1_empirical_with_boundary(&ctx, &g, 2, &plus, &minus, 0).unwrap();
        assert_eq!(r0.excluded, 0);
        assert_eq!(r0.sum, BigInt::from(37));
        let plain = theorem1_empirical(2, &plus, &minus, 2).unwrap();
        let full = theorem1_empirical_with_boundary(&ctx, &g, 2, &plus, &minus, 2).unwrap();
        // lambda = 0 contributes H(0)^2 = 1; lambda = +-1 contribute H(1)^2 each.
        let h1 = hp_direct(&ctx, &g, &HypDatum::theorem1(2).unwrap(), 1).unwrap();
        assert_eq!(full.sum - plain.sum, BigInt::from(1 + 2 * h1 * h1));
    }

    #[test]
    fn theorem3_and_4_bookkeeping() {
        let ctx = build_field(61).unwrap();
        let leg = BuiltinFamily::Legendre.family();
        let s = trace_sweep(&leg, &ctx, 1).unwrap();
        let r = theorem3_empirical(2, &s, 0).unwrap();
        assert_eq!(r.excluded, 2);
        assert_eq!(r.sum, BigInt::from(59));
        let cl = trace_sweep(&BuiltinFamily::Clausen.family(), &ctx, 1).unwrap();
        let r = theorem4_empirical(&cl, &ctx, 0).unwrap();
        assert_eq!(r.excluded, 2);
        assert_eq!(r.normalization(), 1.0);
        let g = GaussTable::new(&ctx).unwrap();
        assert_eq!(theorem4_empirical_with_boundary(&cl, &ctx, &g, 0).unwrap().sum, BigInt::from(61));
        assert!(clausen_reindexing_is_bijective(61));
    }

    /// The Clausen-side sum equals the sum of direct Gauss-sum values over mu.
    #[test]
    fn theorem4_matches_direct_values() {
        let ctx = build_field(29).unwrap();
        let g = GaussTable::new(&ctx).unwrap();
        let cl = trace_sweep(&BuiltinFamily::Clausen.family(), &ctx, 1).unwrap();
        let datum = HypDatum::clausen();
        for m in 0..=4 {
            let full = theorem4_empirical_with_boundary(&cl, &ctx, &g, m).unwrap();
            let direct: BigInt = (0..29).map(|mu| BigInt::from(hp_direct(&ctx, &g, &datum, mu).unwrap()).pow(m)).sum();
            assert_eq!(full.sum, direct, "m={m}");
        }
    }

    #[test]
    fn chebyshev_sums() {
        let (_, plus, _) = legendre_pair(13);
        assert!((chebyshev_sum(&plus, 0) - 11.0 / 13.0).abs() < 1e-15);
        let direct: f64 = (2..13).map(|l| plus.traces[l] as f64 / 13f64.sqrt()).sum::<f64>() / 13.0;
        assert!((chebyshev_sum(&plus, 1) - direct).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let (_, plus, minus) = legendre_pair(29);
        let r = theorem1_empirical(2, &plus, &minus, 2).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["p", "spec", "n", "m", "empirical", "limit", "deviation", "excluded", "normalization"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["limit"], "2");
        assert!(v["empirical"].is_string());
        assert_eq!(v["spec"], "theorem1:d=2");
    }

    #[test]
    fn samples_lie_in_support() {
        let (_, plus, minus) = legendre_pair(101);
        let s = theorem1_samples(2, &plus, &minus).unwrap();
        assert_eq!(s.len(), 98);
        assert!(s.iter().all(|x| x.abs() <= 4.0));
        let s3 = theorem3_samples(2, &plus).unwrap();
        assert!(s3.iter().all(|x| x.abs() <= 2.0));
    }
}
