//! `G^{2,0}_{2,2}` by numerical Mellin-Barnes integration.
//!
//! The contour is the wedge `s(t) = c + kappa |t| + i t` with `c < min(b)`.
//! It has the poles of `Gamma(b_j - s)` on its right, like the vertical line
//! `Re s = c`, and the two are equivalent because those poles are real. Along
//! the wedge `|z^s|` decays like `z^(kappa |t|)`, so for `z < 1` the tail is
//! exponentially small; at `z = 1` the decay is the algebraic `|t|^nu`.
//!
//! For real parameters and `z > 0` the integrand at `-t` is minus the
//! conjugate of that at `t`, so `G = Im(I) / pi` with
//! `I = int_0^inf Phi(s) z^s (kappa + i) dt`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::theory::combinatorics::theorem1_gamma_ratio;
use crate::theory::gamma::ln_gamma;
use crate::theory::quadrature::{integrate, QuadOptions};

const KAPPA: f64 = 1.0;
const MAX_HEIGHT: f64 = 1e7;

/// `G^{2,0}_{2,2}[a1, a2; b1, b2 | z]` for real parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeijerG22 {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl MeijerG22 {
    /// `[2, 3; 1/2, 3/2]`, the kernel of the length-4 limiting density.
    pub const THEOREM1: MeijerG22 = MeijerG22 { a: [2.0, 3.0], b: [0.5, 1.5] };

    /// Every parameter shifted by `rho`.
    pub fn shifted(&self, rho: f64) -> Self {
        Self { a: self.a.map(|x| x + rho), b: self.b.map(|x| x + rho) }
    }

    /// `nu = b1 + b2 - a1 - a2`.
    pub fn nu(&self) -> f64 {
        self.b[0] + self.b[1] - self.a[0] - self.a[1]
    }

    fn ln_phi<T: Real>(&self, s: Complex<T>) -> Complex<T> {
        let c = |x: f64| Complex::new(T::lit(x), T::zero());
        ln_gamma(c(self.b[0]) - s) + ln_gamma(c(self.b[1]) - s) - ln_gamma(c(self.a[0]) - s) - ln_gamma(c(self.a[1]) - s)
    }

    /// Evaluates at `z` in `(0, 1]` to absolute accuracy `tol`.
    pub fn eval<T: Real>(&self, z: T, tol: f64) -> Result<T> {
        let zf = z.to_f64().unwrap_or(f64::NAN);
        if !(zf > 0.0 && zf <= 1.0) {
            return Err(Error::DomainError(zf));
        }
        let ln_z = z.ln();
        if zf == 1.0 && self.nu() >= -1.0 {
            return Err(Error::DomainError(zf));
        }
        let kappa = T::lit(KAPPA);
        let c = T::lit(self.b[0].min(self.b[1]) - 0.1);
        let dir = Complex::new(kappa, T::one());
        let integrand = |t: T| -> T {
            let s = Complex::new(c + kappa * t, t);
            ((self.ln_phi(s) + s * ln_z).exp() * dir).im
        };
        let envelope = |t: T| -> f64 {
            let s = Complex::new(c + kappa * t, t);
            (self.ln_phi(s).re + (s * ln_z).re).exp().to_f64().unwrap() * (KAPPA * KAPPA + 1.0).sqrt()
        };

        let floor = 100.0 * T::epsilon().to_f64().unwrap();
        let panel_opts = QuadOptions { abs_tol: (tol / 64.0).max(floor), rel_tol: 0.0, max_intervals: 400 };
        let decay = KAPPA * (-zf.ln());
        let nu_excess = -self.nu() - 1.0;
        let mut total = T::zero();
        let mut quad_err = 0.0;
        let (mut lo, mut hi) = (0.0, 1.0);
        loop {
            let r = integrate(integrand, T::lit(lo), T::lit(hi), &panel_opts)?;
            total = total + r.value;
            quad_err += r.error.to_f64().unwrap();
            let e = envelope(T::lit(hi));
            let alg = if nu_excess > 0.0 { hi / nu_excess } else { f64::INFINITY };
            let exp = if decay > 0.0 { 1.0 / decay } else { f64::INFINITY };
            let tail = 2.0 * e * alg.min(exp);
            if tail + quad_err <= tol {
                return Ok(total / T::PI());
            }
            if hi >= MAX_HEIGHT {
                return Err(Error::QuadratureFailure { estimate: tail + quad_err, tolerance: tol });
            }
            lo = hi;
            hi *= 2.0;
        }
    }
}

/// Default absolute accuracy for a scalar type.
pub fn default_tolerance<T: Real>() -> f64 {
    (1e-10f64).max(1e4 * T::epsilon().to_f64().unwrap())
}

/// `G^{2,0}_{2,2}[2, 3; 1/2, 3/2 | z]` for `z` in `(0, 1]`.
pub fn meijer_g_t1<T: Real>(z: T) -> Result<T> {
    MeijerG22::THEOREM1.eval(z, default_tolerance::<T>())
}

#[derive(Clone, Debug, Serialize)]
pub struct MeijerCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl MeijerCheck {
    fn new(name: String, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let passed = (lhs - rhs).abs() <= tolerance;
        Self { name, lhs, rhs, tolerance, passed }
    }
}

/// Shift identity `z^rho G[a; b | z] = G[a + rho; b + rho | z]` for the
/// length-4 kernel, and the moment chain
/// `int_0^1 w^(-1/2) G[m+3/2, m+5/2; m, m+1 | w] dw = Gamma(1/2+m) Gamma(3/2+m) / (Gamma(2+m) Gamma(3+m))`.
pub fn meijer_transform_report() -> Result<Vec<MeijerCheck>> {
    let tol = 1e-7;
    let g = MeijerG22::THEOREM1;
    let mut checks = Vec::new();
    for rho in [0.0f64, -1.0, 0.5] {
        for z in [0.3f64, 0.9] {
            let lhs = z.powf(rho) * g.eval(z, 1e-10)?;
            let rhs = g.shifted(rho).eval(z, 1e-10)?;
            checks.push(MeijerCheck::new(format!("shift rho={rho} z={z}"), lhs, rhs, tol));
        }
    }
    for m in 0..=2u32 {
        let kernel = MeijerG22 { a: [m as f64 + 1.5, m as f64 + 2.5], b: [m as f64, m as f64 + 1.0] };
        // w = u^2 removes the w^(-1/2) endpoint factor.
        let inner = |u: f64| 2.0 * kernel.eval(u * u, 1e-11).unwrap_or(f64::NAN);
        let lhs = integrate(inner, 0.0, 1.0, &QuadOptions::abs(1e-9))?.value;
        let rhs = theorem1_gamma_ratio(m).to_f64();
        checks.push(MeijerCheck::new(format!("moment chain m1={m}"), lhs, rhs, tol));
    }
    Ok(checks)
}

/// Fails with the first identity outside tolerance.
pub fn meijer_transform_checks() -> Result<Vec<MeijerCheck>> {
    let report = meijer_transform_report()?;
    if let Some(bad) = report.iter().find(|c| !c.passed) {
        return Err(Error::CheckFailure(format!(
            "{}: {} vs {} (tolerance {})",
            bad.name, bad.lhs, bad.rhs, bad.tolerance
        )));
    }
    Ok(report)
}
