//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 2000 }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        Self { abs_tol: tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let s = f(c - dx) + f(c + dx);
        k = k + s * T::lit(WGK[i]);
        if i % 2 == 1 {
            g = g + s * T::lit(WG[i / 2]);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, opts: &QuadOptions) -> Result<QuadEstimate<T>> {
    if a == b {
        return Ok(QuadEstimate { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![Panel { a, b, value: v, error: e }];
    let mut evaluations = 15;
    loop {
        let value = panels.iter().fold(T::zero(), |s, p| s + p.value);
        let error = panels.iter().fold(T::zero(), |s, p| s + p.error);
        let target = T::lit(opts.abs_tol).max(T::lit(opts.rel_tol) * value.abs());
        if error <= target {
            return Ok(QuadEstimate { value, error, evaluations });
        }
        if !value.is_finite() || !error.is_finite() || panels.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure {
                estimate: error.to_f64().unwrap_or(f64::INFINITY),
                tolerance: target.to_f64().unwrap_or(0.0),
            });
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].error.partial_cmp(&panels[j].error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let m = T::lit(0.5) * (a + b);
        if m <= a || m >= b {
            // Interval can no longer be split in this precision.
            return Err(Error::QuadratureFailure {
                estimate: error.to_f64().unwrap_or(f64::INFINITY),
                tolerance: target.to_f64().unwrap_or(0.0),
            });
        }
        for (lo, hi) in [(a, m), (m, b)] {
            let (v, e) = gk15(&mut f, lo, hi);
            panels.push(Panel { a: lo, b: hi, value: v, error: e });
        }
        evaluations += 30;
    }
}
