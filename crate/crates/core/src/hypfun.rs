//! Finite-field hypergeometric functions `H_p(alpha, beta | lambda)`, by the
//! Gauss-sum definition and through curve traces.

use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rustfft::FftNum;
use serde::{Deserialize, Serialize};

use crate::curves::{BuiltinFamily, TraceSweep, TraceValue};
use crate::error::{Error, Result};
use crate::ffield::{pow_mod, CharacterIndex, GaussTable, PrimeFieldContext};
use crate::scalar::Real;

/// A hypergeometric datum `{alpha; beta}` with `beta[0] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypDatum {
    alpha: Vec<Rational64>,
    beta: Vec<Rational64>,
    modulus: u64,
}

impl HypDatum {
    pub fn new(alpha: Vec<Rational64>, beta: Vec<Rational64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::InvalidDatum(format!(
                "alpha and beta must be nonempty and of equal length (got {} and {})",
                alpha.len(),
                beta.len()
            )));
        }
        if !beta[0].is_one() {
            return Err(Error::InvalidDatum(format!("beta[0] must be 1, got {}", beta[0])));
        }
        let modulus = alpha
            .iter()
            .chain(&beta)
            .fold(1i64, |acc, r| acc.lcm(r.denom())) as u64;
        Ok(Self { alpha, beta, modulus })
    }

    /// Parses `[(num, den)]` pairs.
    pub fn from_pairs(alpha: &[(i64, i64)], beta: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| -> Result<Vec<Rational64>> {
            v.iter()
                .map(|&(n, d)| {
                    if d == 0 {
                        Err(Error::InvalidDatum("zero denominator".into()))
                    } else {
                        Ok(Rational64::new(n, d))
                    }
                })
                .collect()
        };
        Self::new(conv(alpha)?, conv(beta)?)
    }

    /// The length-4 datum `alpha_d`, `beta = {1, 1/2, 1, 1/2}`.
    pub fn theorem1(d: u32) -> Result<Self> {
        check_degree(d)?;
        let d = d as i64;
        let r = Rational64::new;
        let half = r(1, 2);
        let e = r(1, 2 * d);
        Self::new(
            vec![e, Rational64::one() - e, e + half, half - e],
            vec![r(1, 1), half, r(1, 1), half],
        )
    }

    /// `{1/d, (d-1)/d; 1, 1}`.
    pub fn length2(d: u32) -> Result<Self> {
        check_degree(d)?;
        let d = d as i64;
        Self::from_pairs(&[(1, d), (d - 1, d)], &[(1, 1), (1, 1)])
    }

    /// `{1/2, 1/2, 1/2; 1, 1, 1}`.
    pub fn clausen() -> Self {
        Self::from_pairs(&[(1, 2); 3], &[(1, 1); 3]).expect("valid datum")
    }

    pub fn alpha(&self) -> &[Rational64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Rational64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn admits(&self, p: u64) -> bool {
        p % self.modulus == 1
    }
}

impl fmt::Display for HypDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rational64]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "{{{}; {}}}", list(&self.alpha), list(&self.beta))
    }
}

fn check_degree(d: u32) -> Result<()> {
    match d {
        2 | 3 | 4 | 6 => Ok(()),
        _ => Err(Error::InvalidDatum(format!("d must be one of 2, 3, 4, 6; got {d}"))),
    }
}

pub fn datum_modulus(datum: &HypDatum) -> u64 {
    datum.modulus()
}

fn exponent(ctx: &PrimeFieldContext, r: &Rational64) -> CharacterIndex {
    ctx.character_of_fraction(*r.numer(), *r.denom())
        .expect("exponent integral when p = 1 mod M")
}

/// `H_p(alpha, beta | lambda)` as a complex number, straight from the sum
/// over characters. `H_p(.|0) = 1` by convention.
pub fn hp_direct_complex<T: Real + FftNum>(
    ctx: &PrimeFieldContext,
    gauss: &GaussTable<T>,
    datum: &HypDatum,
    lambda: u64,
) -> Result<Complex<T>> {
    let p = ctx.p();
    if !datum.admits(p) {
        return Err(Error::ModulusMismatch { p, modulus: datum.modulus() });
    }
    if gauss.len() as u64 != ctx.group_order() {
        return Err(Error::InvalidInput("Gauss table built for a different prime".into()));
    }
    let lambda = lambda % p;
    if lambda == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let q = ctx.group_order() as i64;
    let a: Vec<i64> = datum.alpha.iter().map(|r| exponent(ctx, r).value() as i64).collect();
    let b: Vec<i64> = datum.beta.iter().map(|r| exponent(ctx, r).value() as i64).collect();
    let g = |j: i64| gauss.get(ctx.character(j));

    let denom = a
        .iter()
        .zip(&b)
        .fold(Complex::new(T::one(), T::zero()), |acc, (&ai, &bi)| acc * g(ai) * g(-bi));

    // omega^k((-1)^n lambda) = exp(2 pi i k L / q) with L = dlog((-1)^n lambda).
    let arg = if datum.len() % 2 == 1 { p - lambda } else { lambda };
    let l = ctx.dlog(arg).expect("nonzero") as i64;
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 0..q {
        let term = a
            .iter()
            .zip(&b)
            .fold(Complex::new(T::one(), T::zero()), |acc, (&ai, &bi)| acc * g(k + ai) * g(-k - bi));
        let theta = T::TAU() * T::from_i64((k * l) % q).unwrap() / T::from_i64(q).unwrap();
        sum = sum + term * Complex::new(theta.cos(), theta.sin());
    }
    Ok(sum / denom / T::from_i64(1 - p as i64).unwrap())
}

/// `H_p(alpha, beta | lambda)` rounded to an integer, with the rounding guard
/// `|Im| <= 1e-6 sqrt(p)` and `|Re - round(Re)| <= 1e-6 sqrt(p)`.
pub fn hp_direct<T: Real + FftNum>(
    ctx: &PrimeFieldContext,
    gauss: &GaussTable<T>,
    datum: &HypDatum,
    lambda: u64,
) -> Result<i64> {
    let z = hp_direct_complex(ctx, gauss, datum, lambda)?;
    let (re, im) = (z.re.to_f64().unwrap(), z.im.to_f64().unwrap());
    let guard = 1e-6 * (ctx.p() as f64).sqrt();
    let rounded = re.round();
    if im.abs() > guard || (re - rounded).abs() > guard || !re.is_finite() {
        return Err(Error::PrecisionLoss { p: ctx.p(), lambda, re, im });
    }
    Ok(rounded as i64)
}

/// A square root of `mu` when one exists.
pub fn sqrt_mod(ctx: &PrimeFieldContext, mu: u64) -> Option<u64> {
    let p = ctx.p();
    let mu = mu % p;
    if mu == 0 {
        return Some(0);
    }
    let ind = ctx.dlog(mu)? as u64;
    ind.is_multiple_of(2).then(|| pow_mod(ctx.primitive_root(), ind / 2, p))
}

/// `H_p(alpha_d, beta | mu)` through curve traces: `a_d(lambda) + a_d(-lambda)`
/// with `lambda^2 = mu`, and `0` when `mu` is a nonresidue.
pub fn hp_via_traces(
    ctx: &PrimeFieldContext,
    d: u32,
    sweep_plus: &TraceSweep,
    sweep_minus: &TraceSweep,
    mu: u64,
) -> Result<i64> {
    let family = BuiltinFamily::for_degree(d)?.family();
    check_pair(ctx, &family, sweep_plus, sweep_minus)?;
    let p = ctx.p();
    let mu = mu % p;
    if mu <= 1 {
        return Err(Error::BoundaryLambda(mu));
    }
    let Some(lambda) = sqrt_mod(ctx, mu) else {
        return Ok(0);
    };
    match (sweep_plus.get(lambda), sweep_minus.get(lambda)) {
        (TraceValue::Good(x), TraceValue::Good(y)) => Ok(x + y),
        _ => Err(Error::BoundaryLambda(mu)),
    }
}

pub(crate) fn check_pair(
    ctx: &PrimeFieldContext,
    family: &crate::curves::CurveFamily,
    plus: &TraceSweep,
    minus: &TraceSweep,
) -> Result<()> {
    let p = ctx.p();
    if plus.p != p || minus.p != p {
        return Err(Error::SweepMismatch(format!(
            "sweeps at p = {} and {} used with p = {p}",
            plus.p, minus.p
        )));
    }
    if !plus.is_for(family) {
        return Err(Error::SweepMismatch(format!(
            "first sweep is `{}`, expected `{}`",
            plus.family_name,
            family.name()
        )));
    }
    if !minus.is_for(&family.pullback_neg()) {
        return Err(Error::SweepMismatch(format!(
            "second sweep is `{}`, expected the pullback of `{}` under lambda -> -lambda",
            minus.family_name,
            family.name()
        )));
    }
    Ok(())
}

/// `phi(lambda + 1) (a_Cl(lambda)^2 - p)`, the Clausen side of the length-3 identity.
pub fn clausen_trace_value(ctx: &PrimeFieldContext, a: i64, lambda: u64) -> i64 {
    let s = ctx.quadchar(lambda + 1) as i64;
    s * (a * a - ctx.p() as i64)
}

/// `lambda / (lambda + 1)` in `F_p`, for `lambda != -1`.
pub fn clausen_argument(p: u64, lambda: u64) -> Option<u64> {
    let den = (lambda + 1) % p;
    (!den.is_zero()).then(|| lambda % p * crate::ffield::inv_mod(den, p) % p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{trace_single, trace_sweep};
    use crate::ffield::build_field;
    use num_rational::Ratio;

    fn brute_legendre_trace(p: i64, l: i64) -> i64 {
        // y^2 = x(1-x)(x-l), enumerated over all pairs.
        let mut n = 1;
        for x in 0..p {
            let rhs = (x * (1 - x) % p * (x - l) % p).rem_euclid(p);
            for y in 0..p {
                if (y * y) % p == rhs {
                    n += 1;
                }
            }
        }
        p + 1 - n
    }

    fn table(ctx: &PrimeFieldContext) -> GaussTable<f64> {
        GaussTable::new(ctx).unwrap()
    }

    #[test]
    fn moduli() {
        assert_eq!(HypDatum::theorem1(2).unwrap().modulus(), 4);
        assert_eq!(HypDatum::theorem1(3).unwrap().modulus(), 6);
        assert_eq!(HypDatum::theorem1(4).unwrap().modulus(), 8);
        assert_eq!(HypDatum::theorem1(6).unwrap().modulus(), 12);
        assert_eq!(datum_modulus(&HypDatum::length2(2).unwrap()), 2);
        assert_eq!(HypDatum::length2(6).unwrap().modulus(), 6);
        assert_eq!(HypDatum::clausen().modulus(), 2);
        let a3 = HypDatum::theorem1(3).unwrap();
        assert_eq!(
            a3.alpha(),
            &[Ratio::new(1, 6), Ratio::new(5, 6), Ratio::new(2, 3), Ratio::new(1, 3)]
        );
    }

    #[test]
    fn rejects_malformed() {
        assert!(HypDatum::from_pairs(&[(1, 2)], &[(1, 2)]).is_err());
        assert!(HypDatum::from_pairs(&[(1, 2)], &[(1, 1), (1, 1)]).is_err());
        assert!(HypDatum::from_pairs(&[(1, 0)], &[(1, 1)]).is_err());
        assert!(HypDatum::theorem1(5).is_err());
    }

    #[test]
    fn value_at_zero_is_one() {
        let ctx = build_field(13).unwrap();
        let t = table(&ctx);
        for d in [2, 3, 4, 6] {
            let datum = HypDatum::theorem1(d).unwrap();
            if datum.admits(13) {
                assert_eq!(hp_direct(&ctx, &t, &datum, 0).unwrap(), 1);
            }
        }
    }

    #[test]
    fn modulus_mismatch() {
        let ctx = build_field(7).unwrap();
        let t = table(&ctx);
        let err = hp_direct(&ctx, &t, &HypDatum::theorem1(2).unwrap(), 2).unwrap_err();
        assert!(matches!(err, Error::ModulusMismatch { p: 7, modulus: 4 }));
    }

    #[test]
    fn nonresidue_vanishes() {
        let ctx = build_field(13).unwrap();
        let t = table(&ctx);
        assert_eq!(ctx.quadchar(2), -1);
        assert_eq!(hp_direct(&ctx, &t, &HypDatum::theorem1(3).unwrap(), 2).unwrap(), 0);
    }

    #[test]
    fn length_two_matches_point_count() {
        let ctx = build_field(13).unwrap();
        let t = table(&ctx);
        let h = hp_direct(&ctx, &t, &HypDatum::length2(2).unwrap(), 4).unwrap();
        assert_eq!(h, brute_legendre_trace(13, 4));
    }

    #[test]
    fn traces_path_example_and_cross_check() {
        let p = 13;
        let ctx = build_field(p).unwrap();
        let t = table(&ctx);
        let leg = BuiltinFamily::Legendre.family();
        let plus = trace_sweep(&leg, &ctx, 1).unwrap();
        let minus = plus.negated(&leg).unwrap();
        let v = hp_via_traces(&ctx, 2, &plus, &minus, 9).unwrap();
        assert_eq!(v, brute_legendre_trace(13, 3) + brute_legendre_trace(13, 10));
        let datum = HypDatum::theorem1(2).unwrap();
        for mu in 2..p {
            assert_eq!(hp_via_traces(&ctx, 2, &plus, &minus, mu).unwrap(), hp_direct(&ctx, &t, &datum, mu).unwrap());
        }
        assert!(matches!(hp_via_traces(&ctx, 2, &plus, &minus, 1), Err(Error::BoundaryLambda(1))));
        assert!(matches!(hp_via_traces(&ctx, 2, &plus, &minus, 0), Err(Error::BoundaryLambda(0))));
        assert!(matches!(hp_via_traces(&ctx, 2, &plus, &plus, 4), Err(Error::SweepMismatch(_))));
        assert!(matches!(hp_via_traces(&ctx, 3, &plus, &minus, 4), Err(Error::SweepMismatch(_))));
    }

    #[test]
    fn clausen_identity_small() {
        let p = 13;
        let ctx = build_field(p).unwrap();
        let t = table(&ctx);
        let cl = BuiltinFamily::Clausen.family();
        let datum = HypDatum::clausen();
        for l in 1..p - 1 {
            let a = trace_single(&cl, &ctx, l).unwrap().good().unwrap();
            let mu = clausen_argument(p, l).unwrap();
            assert_eq!(hp_direct(&ctx, &t, &datum, mu).unwrap(), clausen_trace_value(&ctx, a, l));
        }
        assert_eq!(clausen_argument(p, p - 1), None);
    }

    #[test]
    fn single_precision_path_is_close_or_flags_precision() {
        let ctx = build_field(13).unwrap();
        let t32: GaussTable<f32> = GaussTable::new(&ctx).unwrap();
        let t64 = table(&ctx);
        let datum = HypDatum::theorem1(2).unwrap();
        for mu in 0..13 {
            let z32 = hp_direct_complex(&ctx, &t32, &datum, mu).unwrap();
            let z64 = hp_direct_complex(&ctx, &t64, &datum, mu).unwrap();
            assert!((z32.re as f64 - z64.re).abs() < 1e-3 && (z32.im as f64 - z64.im).abs() < 1e-3);
            match hp_direct(&ctx, &t32, &datum, mu) {
                Ok(v) => assert_eq!(v, hp_direct(&ctx, &t64, &datum, mu).unwrap()),
                Err(e) => assert!(matches!(e, Error::PrecisionLoss { .. })),
            }
        }
    }

    #[test]
    fn sqrt_mod_roundtrip() {
        let ctx = build_field(61).unwrap();
        for x in 0..61u64 {
            let mu = x * x % 61;
            let r = sqrt_mod(&ctx, mu).unwrap();
            assert_eq!(r * r % 61, mu);
        }
        assert_eq!(sqrt_mod(&ctx, 2).is_some(), ctx.quadchar(2) == 1);
    }
}
