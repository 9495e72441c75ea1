//! Exact Catalan combinatorics: limits of the moment theorems and the
//! multiplicity identities behind them.

use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `C(n) = (2n)! / (n! (n+1)!)`.
pub fn catalan(n: u32) -> BigInt {
    factorial(2 * n) / (factorial(n) * factorial(n + 1))
}

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Multiplicity of `Sym^r` in the `m`-fold tensor power of the standard
/// representation: `binom(m, (m+r)/2) * 2(r+1) / (m+r+2)`, zero on parity
/// mismatch or `r > m`.
pub fn multiplicity_nm(m: u32, r: u32) -> Result<BigInt> {
    if r > m || (m + r) % 2 == 1 {
        return Ok(BigInt::zero());
    }
    let num = binomial(m, (m + r) / 2) * (2 * (r + 1));
    let den = BigInt::from(m + r + 2);
    let (q, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::NonIntegral { m, r });
    }
    Ok(q)
}

/// Multiplicity of the trivial representation in `(Sym^2)^{tensor m}`:
/// `(-1)^m sum_i (-1)^i binom(m, i) C(i)`.
pub fn sym2_multiplicity(m: u32) -> BigInt {
    let s = alternating_catalan_sum(m);
    if m.is_multiple_of(2) {
        s
    } else {
        -s
    }
}

fn alternating_catalan_sum(m: u32) -> BigInt {
    (0..=m).fold(BigInt::zero(), |acc, i| {
        let t = binomial(m, i) * catalan(i);
        if i % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

/// Both sides of `C(m) C(m+1) = sum_s binom(2m, 2s) C(m-s) C(s)`.
pub fn combmom_check(m: u32) -> (BigInt, BigInt) {
    let lhs = catalan(m) * catalan(m + 1);
    let rhs = (0..=m).fold(BigInt::zero(), |acc, s| acc + binomial(2 * m, 2 * s) * catalan(m - s) * catalan(s));
    (lhs, rhs)
}

/// `c * sqrt(pi)^k` with exact rational `c`; closed under products and
/// quotients, which is all half-integer Gamma ratios need.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SqrtPiMonomial {
    #[serde(serialize_with = "ser_rational")]
    pub coeff: BigRational,
    pub sqrt_pi_power: i32,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl SqrtPiMonomial {
    pub fn rational(coeff: BigRational) -> Self {
        Self { coeff, sqrt_pi_power: 0 }
    }

    pub fn pi() -> Self {
        Self { coeff: BigRational::one(), sqrt_pi_power: 2 }
    }

    /// `Gamma(n)` for a positive integer `n`.
    pub fn gamma_integer(n: u32) -> Self {
        assert!(n >= 1, "Gamma has a pole at {n}");
        Self::rational(BigRational::from_integer(factorial(n - 1)))
    }

    /// `Gamma(m + 1/2) = (2m-1)!! / 2^m * sqrt(pi)`.
    pub fn gamma_half_integer(m: u32) -> Self {
        let double_factorial = (1..=m).fold(BigInt::one(), |acc, k| acc * (2 * k - 1));
        Self {
            coeff: BigRational::new(double_factorial, BigInt::one() << m),
            sqrt_pi_power: 1,
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.coeff.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.sqrt().powi(self.sqrt_pi_power)
    }

    /// The rational value when no `sqrt(pi)` factor remains.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.sqrt_pi_power == 0).then_some(&self.coeff)
    }
}

impl Mul for SqrtPiMonomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { coeff: self.coeff * rhs.coeff, sqrt_pi_power: self.sqrt_pi_power + rhs.sqrt_pi_power }
    }
}

impl Div for SqrtPiMonomial {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self { coeff: self.coeff / rhs.coeff, sqrt_pi_power: self.sqrt_pi_power - rhs.sqrt_pi_power }
    }
}

impl fmt::Display for SqrtPiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sqrt_pi_power {
            0 => write!(f, "{}", self.coeff),
            k => write!(f, "{} * sqrt(pi)^{k}", self.coeff),
        }
    }
}

/// `Gamma(m+1/2) Gamma(m+3/2) / (Gamma(m+2) Gamma(m+3))`, an exact multiple of `pi`.
pub fn theorem1_gamma_ratio(m: u32) -> SqrtPiMonomial {
    SqrtPiMonomial::gamma_half_integer(m) * SqrtPiMonomial::gamma_half_integer(m + 1)
        / (SqrtPiMonomial::gamma_integer(m + 2) * SqrtPiMonomial::gamma_integer(m + 3))
}

/// Both sides of `C(m) C(m+1) = (4 * 16^m / pi) Gamma(m+1/2) Gamma(m+3/2) / (Gamma(m+2) Gamma(m+3))`.
/// The right side is reduced exactly; it carries no `sqrt(pi)` factor.
pub fn catalan_gamma_identity(m: u32) -> (BigInt, SqrtPiMonomial) {
    let lhs = catalan(m) * catalan(m + 1);
    let prefactor = SqrtPiMonomial::rational(BigRational::from_integer(BigInt::from(4) << (4 * m)))
        / SqrtPiMonomial::pi();
    (lhs, prefactor * theorem1_gamma_ratio(m))
}

fn int(b: BigInt) -> BigRational {
    BigRational::from_integer(b)
}

/// Length-4 limit: `C(m/2) C(m/2 + 1)` for even `m`, else 0.
pub fn theorem1_limit(m: u32) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    int(catalan(m / 2) * catalan(m / 2 + 1))
}

/// Mixed limit: `C(n/2) C(m/2)` when both orders are even, else 0.
pub fn theorem2_limit(n: u32, m: u32) -> BigRational {
    if n % 2 == 1 || m % 2 == 1 {
        return BigRational::zero();
    }
    int(catalan(n / 2) * catalan(m / 2))
}

/// Length-2 limit: `C(m/2)` for even `m`, else 0.
pub fn theorem3_limit(m: u32) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    int(catalan(m / 2))
}

/// Clausen limit: `sum_i (-1)^i binom(m, i) C(i)` for even `m`, else 0.
pub fn theorem4_limit(m: u32) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let s = alternating_catalan_sum(m);
    debug_assert!(!s.is_negative());
    int(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(b(n))
    }

    #[test]
    fn catalan_values() {
        let first: Vec<BigInt> = (0..8).map(catalan).collect();
        assert_eq!(first, [1, 1, 2, 5, 14, 42, 132, 429].map(b));
        for n in 0..=30 {
            assert_eq!(catalan(n), binomial(2 * n, n) / (n + 1));
        }
    }

    #[test]
    fn binomial_rows() {
        for n in 0..40u32 {
            let row: Vec<BigInt> = (0..=n).map(|k| binomial(n, k)).collect();
            assert_eq!(row.iter().sum::<BigInt>(), BigInt::one() << n);
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
        assert_eq!(binomial(3, 5), b(0));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity_nm(4, 0).unwrap(), b(2));
        assert_eq!(multiplicity_nm(4, 2).unwrap(), b(3));
        assert_eq!(multiplicity_nm(4, 4).unwrap(), b(1));
        assert_eq!(multiplicity_nm(3, 0).unwrap(), b(0));
        assert_eq!(multiplicity_nm(2, 5).unwrap(), b(0));
        for m in 0..=20 {
            assert_eq!(multiplicity_nm(m, m).unwrap(), b(1));
        }
    }

    #[test]
    fn multiplicity_dimension_count() {
        for m in 0..=30u32 {
            let total = (0..=m)
                .map(|r| multiplicity_nm(m, r).unwrap() * (r + 1))
                .fold(BigInt::zero(), |a, x| a + x);
            assert_eq!(total, BigInt::one() << m);
            // The trivial multiplicity is the Catalan moment.
            if m % 2 == 0 {
                assert_eq!(multiplicity_nm(m, 0).unwrap(), catalan(m / 2));
            }
        }
    }

    /// Tensoring with the standard representation: n_{m+1}(r) = n_m(r-1) + n_m(r+1).
    #[test]
    fn multiplicity_clebsch_gordan_recurrence() {
        for m in 0..30u32 {
            for r in 0..=m + 1 {
                let below = if r == 0 { b(0) } else { multiplicity_nm(m, r - 1).unwrap() };
                let rhs = below + multiplicity_nm(m, r + 1).unwrap();
                assert_eq!(multiplicity_nm(m + 1, r).unwrap(), rhs);
            }
        }
    }

    #[test]
    fn sym2_examples_and_binomial_transform() {
        assert_eq!(sym2_multiplicity(0), b(1));
        assert_eq!(sym2_multiplicity(1), b(0));
        for m in 0..=30u32 {
            let a = sym2_multiplicity(m);
            assert!(!a.is_negative());
            let s = (0..=m).fold(BigInt::zero(), |acc, i| acc + binomial(m, i) * sym2_multiplicity(i));
            assert_eq!(s, catalan(m));
        }
    }

    /// Independent oracle: count the trivial summand of (Sym^2)^m by
    /// iterated tensoring with Sym^2 = V_0 + V_2 on the weight lattice.
    #[test]
    fn sym2_matches_tensor_iteration() {
        let mut mult = vec![BigInt::one()]; // multiplicities of V_0, V_1, ...
        for m in 0..=20u32 {
            assert_eq!(sym2_multiplicity(m), mult[0]);
            // V_r tensor Sym^2 = V_{r+2} + V_r + V_{r-2} (r >= 2), V_1: V_3 + V_1, V_0: V_2.
            let mut next = vec![BigInt::zero(); mult.len() + 2];
            for (r, c) in mult.iter().enumerate() {
                next[r + 2] += c;
                if r >= 1 {
                    next[r] += c;
                }
                if r >= 2 {
                    next[r - 2] += c;
                }
            }
            mult = next;
        }
    }

    #[test]
    fn combmom_examples() {
        assert_eq!(combmom_check(1), (b(2), b(2)));
        assert_eq!(combmom_check(2).0, b(10));
        for m in 1..=30 {
            let (l, r) = combmom_check(m);
            assert_eq!(l, r);
        }
    }

    #[test]
    fn catalan_gamma() {
        let (l, r) = catalan_gamma_identity(0);
        assert_eq!(l, b(1));
        assert_eq!(r.as_rational(), Some(&q(1)));
        assert_eq!(catalan_gamma_identity(1).1.as_rational(), Some(&q(2)));
        for m in 0..=30 {
            let (l, r) = catalan_gamma_identity(m);
            assert_eq!(r.as_rational(), Some(&int(l)));
        }
        // Gamma(1/2) Gamma(3/2) / (Gamma(2) Gamma(3)) = pi / 4
        let r0 = theorem1_gamma_ratio(0);
        assert_eq!(r0.sqrt_pi_power, 2);
        assert_eq!(r0.coeff, BigRational::new(b(1), b(4)));
        assert!((r0.to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn limits() {
        let t1: Vec<_> = (0..=6).map(theorem1_limit).collect();
        assert_eq!(t1, [1, 0, 2, 0, 10, 0, 70].map(q));
        assert_eq!(theorem2_limit(2, 4), q(2));
        assert_eq!(theorem2_limit(2, 2), q(1));
        assert_eq!(theorem2_limit(1, 1), q(0));
        assert_eq!(theorem2_limit(3, 1), q(0));
        let t3: Vec<_> = (0..=6).map(theorem3_limit).collect();
        assert_eq!(t3, [1, 0, 1, 0, 2, 0, 5].map(q));
        let t4: Vec<_> = (0..=6).map(theorem4_limit).collect();
        assert_eq!(t4, [1, 0, 1, 0, 3, 0, 15].map(q));
    }

    /// Even moments of 1 + 2 cos(theta) under Haar measure on SO(3) give the
    /// Clausen limits; the density is (1 - cos theta) / pi on [0, pi].
    #[test]
    fn theorem4_limit_matches_o3_integral() {
        let n = 20000;
        for m in [2u32, 4, 6] {
            let h = std::f64::consts::PI / n as f64;
            let s: f64 = (0..n)
                .map(|i| {
                    let th = (i as f64 + 0.5) * h;
                    (1.0 + 2.0 * th.cos()).powi(m as i32) * (1.0 - th.cos()) / std::f64::consts::PI * h
                })
                .sum();
            let lim: f64 = num_traits::ToPrimitive::to_f64(&theorem4_limit(m)).unwrap();
            assert!((s - lim).abs() < 1e-6, "m={m}: {s} vs {lim}");
        }
    }

    proptest! {
        #[test]
        fn catalan_recurrence(n in 0u32..40) {
            // C(n+1) = sum_i C(i) C(n-i)
            let s = (0..=n).fold(BigInt::zero(), |a, i| a + catalan(i) * catalan(n - i));
            prop_assert_eq!(catalan(n + 1), s);
        }

        #[test]
        fn multiplicity_is_nonnegative_integer(m in 0u32..60, r in 0u32..60) {
            let v = multiplicity_nm(m, r).unwrap();
            prop_assert!(!v.is_negative());
        }
    }
}
