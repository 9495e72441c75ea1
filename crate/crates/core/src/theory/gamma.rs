//! Complex log-Gamma, accurate far into the left half-plane and at large
//! imaginary part (the regime of Mellin-Barnes integrands).

use num_complex::Complex;

use crate::scalar::Real;

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Below this modulus the argument is shifted up before Stirling's series.
const SHIFT_RADIUS: f64 = 15.0;

/// A logarithm of `Gamma(z)`. The imaginary part is determined only modulo
/// `2 pi`; callers exponentiate sums of these values.
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let one = Complex::new(T::one(), T::zero());
        return Complex::new(T::PI().ln(), T::zero()) - ln_sin_pi(z) - ln_gamma(one - z);
    }
    let mut w = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    while w.norm() < T::lit(SHIFT_RADIUS) {
        shift = shift + w.ln();
        w = w + T::one();
    }
    let mut series = Complex::new(T::zero(), T::zero());
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pw = inv;
    for c in STIRLING {
        series = series + pw * T::lit(c);
        pw = pw * inv2;
    }
    (w - half) * w.ln() - w + T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + series - shift
}

/// A logarithm of `sin(pi w)` that avoids overflow for large `|Im w|`.
fn ln_sin_pi<T: Real>(w: Complex<T>) -> Complex<T> {
    let pi = T::PI();
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let ln_half = Complex::new(T::lit(0.5).ln(), T::zero());
    let quarter_turn = Complex::new(T::zero(), pi * T::lit(0.5));
    if w.im > T::one() {
        // sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 pi i w})
        -i * w * pi + ln_half + quarter_turn + (one - (i * w * (pi + pi)).exp()).ln()
    } else if w.im < -T::one() {
        // sin(pi w) = (-i/2) e^{i pi w} (1 - e^{-2 pi i w})
        i * w * pi + ln_half - quarter_turn + (one - (-i * w * (pi + pi)).exp()).ln()
    } else {
        (w * pi).sin().ln()
    }
}
