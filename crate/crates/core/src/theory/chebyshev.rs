//! Chebyshev polynomials of the second kind.

use num_traits::{FromPrimitive, Num};

/// `U_m(x) = sum_k (-1)^k binom(m-k, k) (2x)^(m-2k)`, by explicit sums.
///
/// Near `|x| = 1` the monomial sum cancels badly, so for `|x| >= 0.77` the
/// equivalent expansion `U_m(x) = sum_k 2^k binom(m+k+1, 2k+1) (x-1)^k` is
/// used, with `U_m(-x) = (-1)^m U_m(x)`. Either way the summed magnitudes
/// stay below about `1e6` for `m <= 20`.
///
/// Works over any ordered numeric type with small-integer conversion, so the
/// same code evaluates in `f32`, `f64` or exact rationals.
pub fn chebyshev_u<T: Clone + Num + FromPrimitive + PartialOrd>(m: u32, x: T) -> T {
    let cut = T::from_u32(77).expect("small integer") / T::from_u32(100).expect("small integer");
    let neg_cut = T::zero() - cut.clone();
    if x >= cut {
        shifted_sum(m, x)
    } else if x <= neg_cut {
        let v = shifted_sum(m, T::zero() - x);
        if m.is_multiple_of(2) {
            v
        } else {
            T::zero() - v
        }
    } else {
        monomial_sum(m, x)
    }
}

fn monomial_sum<T: Clone + Num + FromPrimitive>(m: u32, x: T) -> T {
    let two_x = T::from_u8(2).expect("small integer") * x;
    let mut acc = T::zero();
    for k in 0..=m / 2 {
        let mut term = T::from_u128(binom(m - k, k)).expect("binomial representable");
        for _ in 0..(m - 2 * k) {
            term = term * two_x.clone();
        }
        acc = if k % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn shifted_sum<T: Clone + Num + FromPrimitive>(m: u32, x: T) -> T {
    let two = T::from_u8(2).expect("small integer");
    let y = two * (x - T::one());
    let mut acc = T::zero();
    let mut pw = T::one();
    for k in 0..=m {
        let c = T::from_u128(binom(m + k + 1, 2 * k + 1)).expect("binomial representable");
        acc = acc + c * pw.clone();
        pw = pw * y.clone();
    }
    acc
}

fn binom(n: u32, k: u32) -> u128 {
    let k = k.min(n - k) as u128;
    (0..k).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn low_degree() {
        for x in [-1.5f64, -0.3, 0.0, 0.7, 2.0] {
            assert_eq!(chebyshev_u(0, x), 1.0);
            assert_eq!(chebyshev_u(1, x), 2.0 * x);
            assert!((chebyshev_u(2, x) - (4.0 * x * x - 1.0)).abs() < 1e-12);
        }
        assert_eq!(chebyshev_u(2, 0.5f64), 0.0);
    }

    #[test]
    fn exact_rational_evaluation() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(chebyshev_u(2, half.clone()), BigRational::from_integer(0.into()));
        // U_m(1/2) cycles 1, 1, 0, -1, -1, 0.
        let cyc = [1, 1, 0, -1, -1, 0];
        for m in 0..30u32 {
            let want = BigRational::from_integer(cyc[m as usize % 6].into());
            assert_eq!(chebyshev_u(m, half.clone()), want);
        }
    }

    #[test]
    fn both_branches_agree_at_the_cut() {
        for m in 0..=20u32 {
            for x in [0.77f64, 0.5, 0.95, -0.8] {
                let a = monomial_sum(m, x);
                let b = if x > 0.0 { shifted_sum(m, x) } else { chebyshev_u(m, x) };
                assert!((a - b).abs() < 1e-8, "m={m} x={x}");
            }
        }
        let q = BigRational::new(BigInt::from(-9), BigInt::from(10));
        for m in 0..=20u32 {
            assert_eq!(chebyshev_u(m, q.clone()), monomial_sum(m, q.clone()));
        }
    }

    #[test]
    fn single_precision() {
        let v: f32 = chebyshev_u(4, 0.3f32);
        let w: f64 = chebyshev_u(4, 0.3f64);
        assert!((v as f64 - w).abs() < 1e-5);
    }

    #[test]
    fn recurrence() {
        for m in 1..20u32 {
            for x in [-0.9f64, -0.2, 0.4, 1.3] {
                let lhs = chebyshev_u(m + 1, x);
                let rhs = 2.0 * x * chebyshev_u(m, x) - chebyshev_u(m - 1, x);
                assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
            }
        }
    }

    proptest! {
        #[test]
        fn trigonometric_form(m in 0u32..=20, theta in 0.01f64..3.13) {
            let lhs = chebyshev_u(m, theta.cos());
            let rhs = ((m + 1) as f64 * theta).sin() / theta.sin();
            prop_assert!((lhs - rhs).abs() < 1e-9, "m={} theta={}: {} vs {}", m, theta, lhs, rhs);
        }
    }
}
