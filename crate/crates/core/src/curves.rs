//! One-parameter elliptic-curve families, their reduction mod p, and
//! Frobenius-trace sweeps `lambda -> a_p(lambda)` over all of `F_p`.
//!
//! Every family is handled through the completed cubic
//! `f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6`, obtained from the long Weierstrass
//! form by `y -> (y - a1 x - a3) / 2`. For odd `p` and a good fiber,
//! `#E(F_p) = p + 1 + sum_x phi(f(x))`, so `a_p = -sum_x phi(f(x))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ffield::{inv_mod, PrimeFieldContext};
use crate::poly::{ModPoly, RationalPoly};

/// Names of the five Weierstrass coefficients, in storage order.
pub const COEFF_NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

/// Built-in families: the four length-2 families indexed by `d`, their
/// Legendre pullback `lambda -> -lambda`, and the Clausen family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinFamily {
    Legendre,
    LegendreNeg,
    D3,
    D4,
    D6,
    Clausen,
}

impl BuiltinFamily {
    pub const ALL: [BuiltinFamily; 6] = [
        Self::Legendre,
        Self::LegendreNeg,
        Self::D3,
        Self::D4,
        Self::D6,
        Self::Clausen,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Legendre => "legendre",
            Self::LegendreNeg => "legendre_neg",
            Self::D3 => "d3",
            Self::D4 => "d4",
            Self::D6 => "d6",
            Self::Clausen => "clausen",
        }
    }

    /// The family attached to `d` in the length-2 identities.
    pub fn for_degree(d: u32) -> Result<Self> {
        match d {
            2 => Ok(Self::Legendre),
            3 => Ok(Self::D3),
            4 => Ok(Self::D4),
            6 => Ok(Self::D6),
            _ => Err(Error::InvalidInput(format!("d must be one of 2, 3, 4, 6; got {d}"))),
        }
    }
}

impl FromStr for BuiltinFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.id() == s || (s == "d2" && *f == Self::Legendre))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

impl fmt::Display for BuiltinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A family `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `Q(lambda)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFamily {
    name: String,
    coeffs: [RationalPoly; 5],
    b2: RationalPoly,
    b4: RationalPoly,
    b6: RationalPoly,
    discriminant: RationalPoly,
    c4: RationalPoly,
    c6: RationalPoly,
}

pub fn builtin_family(id: &str) -> Result<CurveFamily> {
    Ok(BuiltinFamily::from_str(id)?.family())
}

/// Builds a family from its coefficients `[a1, a2, a3, a4, a6]`.
pub fn custom_family(name: &str, coeffs: [RationalPoly; 5]) -> Result<CurveFamily> {
    CurveFamily::new(name, coeffs)
}

impl BuiltinFamily {
    pub fn family(self) -> CurveFamily {
        let l = RationalPoly::lambda;
        let int = |n: &[i64]| RationalPoly::from_integers(n, 1);
        let zero = RationalPoly::zero;
        let coeffs = match self {
            // y^2 = x(1-x)(x-l); under x -> -x this is y^2 = x^3 + (1+l)x^2 + l x.
            Self::Legendre => [zero(), int(&[1, 1]), zero(), l(), zero()],
            Self::LegendreNeg => [zero(), int(&[1, -1]), zero(), int(&[0, -1]), zero()],
            // y^2 + xy + (l/27) y = x^3
            Self::D3 => [int(&[1]), zero(), RationalPoly::from_integers(&[0, 1], 27), zero(), zero()],
            // y^2 = x(x^2 + x + l/4)
            Self::D4 => [zero(), int(&[1]), zero(), RationalPoly::from_integers(&[0, 1], 4), zero()],
            // y^2 + xy = x^3 - l/432
            Self::D6 => [int(&[1]), zero(), zero(), zero(), RationalPoly::from_integers(&[0, -1], 432)],
            // y^2 = (x-1)(x^2+l) = x^3 - x^2 + l x - l
            Self::Clausen => [zero(), int(&[-1]), zero(), l(), int(&[0, -1])],
        };
        CurveFamily::new(self.id(), coeffs).expect("built-in families are nonsingular")
    }
}

impl CurveFamily {
    pub fn new(name: &str, coeffs: [RationalPoly; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = &coeffs;
        let k = |n: i64| BigRational::from_integer(BigInt::from(n));
        let b2 = &(a1 * a1) + &a2.scale(&k(4));
        let b4 = &a4.scale(&k(2)) + &(a1 * a3);
        let b6 = &(a3 * a3) + &a6.scale(&k(4));
        let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&a2.scale(&k(4)) * a6)) - &(&(a1 * a3) * a4))
            + &(a2 * &(a3 * a3)))
            - &(a4 * a4);
        let discriminant = &(&(&(-&(&(&b2 * &b2) * &b8)) - &b4.pow(3).scale(&k(8)))
            - &(&b6 * &b6).scale(&k(27)))
            + &(&(&b2 * &b4) * &b6).scale(&k(9));
        if discriminant.is_zero() {
            return Err(Error::SingularFamily);
        }
        let c4 = &(&b2 * &b2) - &b4.scale(&k(24));
        let c6 = &(&(-&b2.pow(3)) + &(&b2 * &b4).scale(&k(36))) - &b6.scale(&k(216));
        Ok(Self { name: name.to_string(), coeffs, b2, b4, b6, discriminant, c4, c6 })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coeffs(&self) -> &[RationalPoly; 5] {
        &self.coeffs
    }

    pub fn discriminant(&self) -> &RationalPoly {
        &self.discriminant
    }

    pub fn c4(&self) -> &RationalPoly {
        &self.c4
    }

    pub fn c6(&self) -> &RationalPoly {
        &self.c6
    }

    /// `b2, b4, b6` of the completed cubic.
    pub fn b_invariants(&self) -> [&RationalPoly; 3] {
        [&self.b2, &self.b4, &self.b6]
    }

    /// The family `lambda -> -lambda`.
    pub fn pullback_neg(&self) -> CurveFamily {
        let coeffs = self.coeffs.clone().map(|c| c.negate_argument());
        CurveFamily::new(&format!("{}_neg", self.name), coeffs)
            .expect("pullback of a nonsingular family is nonsingular")
    }

    /// SHA-256 of the canonical coefficient encoding, first 16 hex digits.
    /// The name does not enter the hash.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for (label, c) in COEFF_NAMES.iter().zip(&self.coeffs) {
            h.update(label.as_bytes());
            h.update(b":");
            h.update(c.common_denominator().to_string().as_bytes());
            h.update(b"/");
            for n in c.numerators() {
                h.update(n.to_string().as_bytes());
                h.update(b",");
            }
            h.update(b";");
        }
        hex::encode(&h.finalize()[..8])
    }

    /// Reduction modulo `p`.
    pub fn reduce(&self, p: u64) -> Result<ReducedFamily> {
        let bad = || Error::BadPrime { p, family: self.name.clone() };
        if p < 5 {
            return Err(bad());
        }
        let r = |f: &RationalPoly| f.reduce(p).ok_or_else(bad);
        // Coefficient denominators must be units too, not only those of the b's.
        for c in &self.coeffs {
            r(c)?;
        }
        Ok(ReducedFamily {
            p,
            b2: r(&self.b2)?,
            b4: r(&self.b4)?,
            b6: r(&self.b6)?,
            discriminant: r(&self.discriminant)?,
            c4: r(&self.c4)?,
            j_degree_bound: (3 * self.c4.degree().unwrap_or(0))
                .max(self.discriminant.degree().unwrap_or(0)),
        })
    }
}

/// A family reduced modulo a prime `p >= 5` not dividing any denominator.
#[derive(Clone, Debug)]
pub struct ReducedFamily {
    p: u64,
    b2: ModPoly,
    b4: ModPoly,
    b6: ModPoly,
    discriminant: ModPoly,
    c4: ModPoly,
    j_degree_bound: usize,
}

impl ReducedFamily {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_bad(&self, lambda: u64) -> bool {
        self.discriminant.eval(lambda) == 0
    }

    pub fn c4_at(&self, lambda: u64) -> u64 {
        self.c4.eval(lambda)
    }

    /// Coefficients `(f(0), f(1)-f(0), f(2)-2f(1)+f(0))` of the completed cubic
    /// at `lambda`; the third difference is the constant 24.
    fn forward_differences(&self, lambda: u64) -> [u32; 3] {
        let p = self.p;
        let b2 = self.b2.eval(lambda);
        let b4 = self.b4.eval(lambda);
        let b6 = self.b6.eval(lambda);
        let d1 = (4 + b2 + 2 * b4) % p;
        let d2 = (24 + 2 * b2) % p;
        [b6 as u32, d1 as u32, d2 as u32]
    }

    /// `f(x)` by direct evaluation.
    fn cubic_at(&self, lambda: u64, x: u64) -> u64 {
        let p = self.p;
        let (b2, b4, b6) = (self.b2.eval(lambda), self.b4.eval(lambda), self.b6.eval(lambda));
        let x = x % p;
        ((((4 * x + b2) % p) * x + 2 * b4) % p * x + b6) % p
    }

    /// `j(lambda) = c4^3 / Delta`; `None` on a bad fiber.
    pub fn j_invariant(&self, lambda: u64) -> Option<u64> {
        let p = self.p;
        let d = self.discriminant.eval(lambda);
        (d != 0).then(|| {
            let c = self.c4.eval(lambda);
            c * c % p * c % p * inv_mod(d, p) % p
        })
    }
}

/// Frobenius trace of one fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceValue {
    Good(i64),
    BadReduction,
}

impl TraceValue {
    pub fn good(self) -> Option<i64> {
        match self {
            Self::Good(a) => Some(a),
            Self::BadReduction => None,
        }
    }
}

/// `a_p(lambda) = p + 1 - #E_lambda(F_p)`, by direct evaluation of the cubic.
pub fn trace_single(family: &CurveFamily, ctx: &PrimeFieldContext, lambda: u64) -> Result<TraceValue> {
    let red = family.reduce(ctx.p())?;
    Ok(trace_reduced(&red, ctx, lambda))
}

fn trace_reduced(red: &ReducedFamily, ctx: &PrimeFieldContext, lambda: u64) -> TraceValue {
    let lambda = lambda % red.p;
    if red.is_bad(lambda) {
        return TraceValue::BadReduction;
    }
    let s: i64 = (0..red.p)
        .map(|x| ctx.quadchar(red.cubic_at(lambda, x)) as i64)
        .sum();
    TraceValue::Good(-s)
}

/// Traces of one family at one prime, for every `lambda` in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSweep {
    pub p: u64,
    pub family_name: String,
    pub family_hash: String,
    /// `a_p(lambda)`; zero where `bad[lambda]`.
    pub traces: Vec<i64>,
    pub bad: Vec<bool>,
}

impl TraceSweep {
    pub fn get(&self, lambda: u64) -> TraceValue {
        let i = (lambda % self.p) as usize;
        if self.bad[i] {
            TraceValue::BadReduction
        } else {
            TraceValue::Good(self.traces[i])
        }
    }

    pub fn good_count(&self) -> usize {
        self.bad.iter().filter(|b| !**b).count()
    }

    pub fn is_for(&self, family: &CurveFamily) -> bool {
        self.family_hash == family.content_hash()
    }

    /// Reindexes `lambda -> -lambda`, giving the sweep of `family.pullback_neg()`.
    pub fn negated(&self, family: &CurveFamily) -> Result<TraceSweep> {
        if !self.is_for(family) {
            return Err(Error::SweepMismatch(format!(
                "sweep of `{}` is not a sweep of `{}`",
                self.family_name,
                family.name()
            )));
        }
        let pulled = family.pullback_neg();
        let p = self.p as usize;
        let idx = |l: usize| (p - l) % p;
        Ok(TraceSweep {
            p: self.p,
            family_name: pulled.name().to_string(),
            family_hash: pulled.content_hash(),
            traces: (0..p).map(|l| self.traces[idx(l)]).collect(),
            bad: (0..p).map(|l| self.bad[idx(l)]).collect(),
        })
    }
}

const LANES: usize = 8;
const BLOCK: usize = 64 * LANES;

/// Character sums `sum_x phi(f_k(x))` for `LANES` cubics given by forward
/// differences, interleaved so the independent recurrences overlap.
fn lane_sums(chi: &[i8], p: u32, init: &[[u32; 3]; LANES]) -> [i32; LANES] {
    let d3 = 24 % p;
    let mut f = [0u32; LANES];
    let mut d1 = [0u32; LANES];
    let mut d2 = [0u32; LANES];
    for k in 0..LANES {
        [f[k], d1[k], d2[k]] = init[k];
    }
    let addm = |a: u32, b: u32| {
        let s = a + b;
        s.min(s.wrapping_sub(p))
    };
    let mut acc = [0i32; LANES];
    for _ in 0..p {
        for k in 0..LANES {
            acc[k] += chi[f[k] as usize] as i32;
            f[k] = addm(f[k], d1[k]);
            d1[k] = addm(d1[k], d2[k]);
            d2[k] = addm(d2[k], d3);
        }
    }
    acc
}

/// Computes the full sweep with `threads` workers. The result does not
/// depend on the worker count.
pub fn trace_sweep(family: &CurveFamily, ctx: &PrimeFieldContext, threads: usize) -> Result<TraceSweep> {
    let p = ctx.p();
    if p >= 1 << 31 {
        return Err(Error::InvalidInput(format!("sweeps need p < 2^31, got {p}")));
    }
    let red = family.reduce(p)?;
    let chi = ctx.quadchar_table();
    let n = p as usize;

    let block = |start: usize| -> Vec<(i64, bool)> {
        let end = (start + BLOCK).min(n);
        let mut out = Vec::with_capacity(end - start);
        let mut lambda = start;
        while lambda < end {
            let lanes = (end - lambda).min(LANES);
            let mut init = [[0u32; 3]; LANES];
            for (k, slot) in init.iter_mut().enumerate().take(lanes) {
                *slot = red.forward_differences((lambda + k) as u64);
            }
            let sums = lane_sums(chi, p as u32, &init);
            for (k, s) in sums.iter().enumerate().take(lanes) {
                let l = (lambda + k) as u64;
                let bad = red.is_bad(l);
                out.push((if bad { 0 } else { -(*s as i64) }, bad));
            }
            lambda += lanes;
        }
        out
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let starts: Vec<usize> = (0..n).step_by(BLOCK).collect();
    let blocks: Vec<Vec<(i64, bool)>> = pool.install(|| starts.par_iter().map(|&s| block(s)).collect());

    let (traces, bad) = blocks.into_iter().flatten().unzip();
    Ok(TraceSweep {
        p,
        family_name: family.name().to_string(),
        family_hash: family.content_hash(),
        traces,
        bad,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionKind {
    Good,
    Multiplicative,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadFiber {
    pub lambda: u64,
    pub kind: ReductionKind,
}

/// Reduction types of the `F_p`-rational bad fibers, plus whether `j` is
/// nonconstant mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub p: u64,
    pub family: String,
    pub fibers: Vec<BadFiber>,
    pub j_nonconstant: bool,
}

impl ReductionReport {
    pub fn kind_at(&self, lambda: u64) -> ReductionKind {
        self.fibers
            .iter()
            .find(|f| f.lambda == lambda)
            .map_or(ReductionKind::Good, |f| f.kind)
    }

    pub fn has_additive(&self) -> bool {
        self.fibers.iter().any(|f| f.kind == ReductionKind::Additive)
    }
}

pub fn classify_reduction(family: &CurveFamily, ctx: &PrimeFieldContext) -> Result<ReductionReport> {
    let p = ctx.p();
    let red = family.reduce(p)?;
    let fibers = (0..p)
        .filter(|&l| red.is_bad(l))
        .map(|l| BadFiber {
            lambda: l,
            kind: if red.c4_at(l) == 0 {
                ReductionKind::Additive
            } else {
                ReductionKind::Multiplicative
            },
        })
        .collect();

    // c4^3 - j0 * Delta has degree <= bound, so bound + 1 equal samples force
    // j to be constant mod p.
    let samples: Vec<u64> = (0..p)
        .filter_map(|l| red.j_invariant(l))
        .take(red.j_degree_bound + 1)
        .collect();
    let j_nonconstant = samples.windows(2).any(|w| w[0] != w[1]);
    Ok(ReductionReport { p, family: family.name().to_string(), fibers, j_nonconstant })
}

/// The computable part of the generic-pair hypothesis: both `j`-invariants
/// nonconstant and no additive fibers. Non-isogeny of twists is not decided;
/// `separating_fiber` records a `lambda0` where exactly one family is
/// multiplicative and the other good, which rules out a geometric
/// isomorphism up to twist by a character lisse there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericPairCheck {
    pub first: ReductionReport,
    pub second: ReductionReport,
    pub j_nonconstant: bool,
    pub good_or_multiplicative: bool,
    pub separating_fiber: Option<u64>,
}

impl GenericPairCheck {
    pub fn passes(&self) -> bool {
        self.j_nonconstant && self.good_or_multiplicative
    }
}

pub fn check_generic_pair(
    first: &CurveFamily,
    second: &CurveFamily,
    ctx: &PrimeFieldContext,
) -> Result<GenericPairCheck> {
    let r1 = classify_reduction(first, ctx)?;
    let r2 = classify_reduction(second, ctx)?;
    let separating_fiber = r1
        .fibers
        .iter()
        .chain(&r2.fibers)
        .map(|f| f.lambda)
        .find(|&l| {
            let (k1, k2) = (r1.kind_at(l), r2.kind_at(l));
            matches!(
                (k1, k2),
                (ReductionKind::Multiplicative, ReductionKind::Good)
                    | (ReductionKind::Good, ReductionKind::Multiplicative)
            )
        });
    Ok(GenericPairCheck {
        j_nonconstant: r1.j_nonconstant && r2.j_nonconstant,
        good_or_multiplicative: !r1.has_additive() && !r2.has_additive(),
        separating_fiber,
        first: r1,
        second: r2,
    })
}

/// Quadratic twist `d y^2 = f(x)`: traces scale by `phi(d)`.
pub fn quadratic_twist(family: &CurveFamily, d: i64) -> Result<CurveFamily> {
    if d == 0 {
        return Err(Error::InvalidInput("twist parameter must be nonzero".into()));
    }
    // d y^2 = x^3 + a2 x^2 + a4 x + a6 (after completing the square) becomes
    // Y^2 = X^3 + d a2 X^2 + d^2 a4 X + d^3 a6 with X = d x, Y = d^2 y.
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let [b2, b4, b6] = family.b_invariants();
    // 4-scaled cubic: y'^2 = x^3 + (b2/4) x^2 + (b4/2) x + b6/4.
    let dd = BigRational::from_integer(BigInt::from(d));
    let a2 = b2.scale(&quarter).scale(&dd);
    let a4 = b4.scale(&half).scale(&(&dd * &dd));
    let a6 = b6.scale(&quarter).scale(&(&dd * &dd * &dd));
    CurveFamily::new(
        &format!("{}_twist{d}", family.name()),
        [RationalPoly::zero(), a2, RationalPoly::zero(), a4, a6],
    )
}
