//! Limiting densities: the semicircle law, its product on `[-2, 2]^2`, and
//! the length-4 density `(4 / (pi |t|)) G^{2,0}_{2,2}[2, 3; 1/2, 3/2 | t^2/16]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::theory::meijer::meijer_g_t1;
use crate::theory::quadrature::{integrate, QuadOptions};

/// Below this `|t|` the length-4 pdf is evaluated at the cap instead.
pub const PDF_CAP: f64 = 1e-4;

pub fn semicircle_pdf<T: Real>(x: T) -> T {
    let four = T::lit(4.0);
    if x.abs() >= T::lit(2.0) {
        return T::zero();
    }
    (four - x * x).sqrt() / (T::lit(2.0) * T::PI())
}

/// `1/2 + (x sqrt(4 - x^2) + 4 asin(x/2)) / (4 pi)`, clamped to `[0, 1]`.
pub fn semicircle_cdf<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    if x <= -two {
        return T::zero();
    }
    if x >= two {
        return T::one();
    }
    let v = T::lit(0.5) + (x * (T::lit(4.0) - x * x).sqrt() + T::lit(4.0) * (x / two).asin()) / (T::lit(4.0) * T::PI());
    v.max(T::zero()).min(T::one())
}

/// `E[x^m]` under the semicircle law, integrated against the cdf in the
/// variable `x = 2 sin(theta)`, where `dF = (2/pi) cos^2(theta) d theta`.
pub fn semicircle_moment(m: u32) -> Result<f64> {
    let f = |th: f64| (2.0 * th.sin()).powi(m as i32) * 2.0 / std::f64::consts::PI * th.cos().powi(2);
    let h = std::f64::consts::FRAC_PI_2;
    Ok(integrate(f, -h, h, &QuadOptions::abs(1e-13))?.value)
}

pub fn product_semicircle_pdf<T: Real>(x1: T, x2: T) -> T {
    semicircle_pdf(x1) * semicircle_pdf(x2)
}

/// Probability of the rectangle `[a1, b1] x [a2, b2]`.
pub fn product_semicircle_probability<T: Real>(a1: T, b1: T, a2: T, b2: T) -> T {
    (semicircle_cdf(b1) - semicircle_cdf(a1)) * (semicircle_cdf(b2) - semicircle_cdf(a2))
}

/// Length-4 limiting pdf on `[-4, 4]`.
pub fn theorem1_pdf<T: Real>(t: T) -> Result<T> {
    let a = t.abs();
    let tf = t.to_f64().unwrap_or(f64::NAN);
    if a.is_nan() || a > T::lit(4.0) {
        return Err(Error::DomainError(tf));
    }
    let a = a.max(T::lit(PDF_CAP));
    if a >= T::lit(4.0) {
        return Ok(T::zero());
    }
    let g = meijer_g_t1(a * a / T::lit(16.0))?;
    Ok(T::lit(4.0) / (T::PI() * a) * g)
}

/// `P(a <= T <= b)` under the length-4 law, by adaptive quadrature.
pub fn theorem1_cdf(a: f64, b: f64) -> Result<f64> {
    if !(-4.0..=4.0).contains(&a) || !(-4.0..=4.0).contains(&b) || a >= b {
        return Err(Error::DomainError(if (-4.0..=4.0).contains(&a) { b } else { a }));
    }
    theorem1_integral(|_| 1.0, a, b, 1e-9)
}

/// `int_a^b w(t) pdf(t) dt`, split at 0 where the pdf has a kink.
fn theorem1_integral(w: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let f = |t: f64| w(t) * theorem1_pdf(t).unwrap_or(f64::NAN);
    let opts = QuadOptions::abs(tol);
    if a < 0.0 && b > 0.0 {
        Ok(integrate(f, a, 0.0, &opts)?.value + integrate(f, 0.0, b, &opts)?.value)
    } else {
        Ok(integrate(f, a, b, &opts)?.value)
    }
}

/// `int t^m pdf(t) dt` over `[-4, 4]`.
pub fn theorem1_moment(m: u32) -> Result<f64> {
    theorem1_integral(|t| t.powi(m as i32), -4.0, 4.0, 1e-9)
}

/// Tabulated length-4 cdf: exact node values from quadrature, cubic Hermite
/// interpolation in between, symmetry for negative arguments.
#[derive(Clone, Debug)]
pub struct Theorem1Cdf {
    step: f64,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl Theorem1Cdf {
    pub fn new(nodes: usize) -> Result<Self> {
        let nodes = nodes.max(2);
        let step = 4.0 / (nodes - 1) as f64;
        let pdf = (0..nodes)
            .map(|i| theorem1_pdf(i as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        let mut cdf = Vec::with_capacity(nodes);
        cdf.push(0.5);
        for i in 1..nodes {
            let piece = theorem1_integral(|_| 1.0, (i - 1) as f64 * step, i as f64 * step, 1e-11)?;
            cdf.push(cdf[i - 1] + piece);
        }
        Ok(Self { step, cdf, pdf })
    }

    /// Value of the cdf at `4`; equals 1 up to quadrature error.
    pub fn total(&self) -> f64 {
        *self.cdf.last().expect("nonempty")
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0 - self.eval(-t);
        }
        if t >= 4.0 {
            return 1.0;
        }
        let x = t / self.step;
        let i = (x.floor() as usize).min(self.cdf.len() - 2);
        let u = x - i as f64;
        let h = self.step;
        let (y0, y1, d0, d1) = (self.cdf[i], self.cdf[i + 1], self.pdf[i], self.pdf[i + 1]);
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        (h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Semicircle,
    ProductSemicircle,
    MeijerTheorem1,
}

/// A limiting density with the quadrature tolerance used for its integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub kind: DensityKind,
    pub tolerance: f64,
}

impl DensitySpec {
    pub fn new(kind: DensityKind) -> Self {
        let tolerance = match kind {
            DensityKind::Semicircle | DensityKind::ProductSemicircle => 1e-12,
            DensityKind::MeijerTheorem1 => 1e-9,
        };
        Self { kind, tolerance }
    }

    /// Support of each coordinate.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            DensityKind::Semicircle | DensityKind::ProductSemicircle => (-2.0, 2.0),
            DensityKind::MeijerTheorem1 => (-4.0, 4.0),
        }
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            DensityKind::ProductSemicircle => 2,
            _ => 1,
        }
    }

    /// Moment of order `m` (for the product, the mixed moment `E[x1^m x2^n]`
    /// is [`Self::mixed_moment`]; here `n = 0`).
    pub fn moment(&self, m: u32) -> Result<f64> {
        self.mixed_moment(m, 0)
    }

    pub fn mixed_moment(&self, m: u32, n: u32) -> Result<f64> {
        match self.kind {
            DensityKind::Semicircle if n == 0 => semicircle_moment(m),
            DensityKind::ProductSemicircle => Ok(semicircle_moment(m)? * semicircle_moment(n)?),
            DensityKind::MeijerTheorem1 if n == 0 => {
                theorem1_integral(|t| t.powi(m as i32), -4.0, 4.0, self.tolerance)
            }
            _ => Err(Error::InvalidInput("mixed moments need a two-dimensional density".into())),
        }
    }
}

/// One row `t, pdf, cdf` of a density table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub t: f64,
    pub pdf: f64,
    pub cdf: f64,
}

/// Uniform-grid table over the support of a one-dimensional density.
pub fn density_table(kind: DensityKind, grid: usize) -> Result<Vec<DensityRow>> {
    let (lo, hi) = DensitySpec::new(kind).support();
    density_table_on(kind, lo, hi, grid)
}

/// Uniform-grid table over `[lo, hi]`, which must lie in the support.
pub fn density_table_on(kind: DensityKind, lo: f64, hi: f64, grid: usize) -> Result<Vec<DensityRow>> {
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points".into()));
    }
    let (s_lo, s_hi) = DensitySpec::new(kind).support();
    if !(s_lo <= lo && lo < hi && hi <= s_hi) {
        return Err(Error::InvalidInput(format!("range [{lo}, {hi}] is not inside the support [{s_lo}, {s_hi}]")));
    }
    let n = (grid - 1) as f64;
    let at = |i: usize| (lo * (n - i as f64) + hi * i as f64) / n;
    match kind {
        DensityKind::Semicircle => Ok((0..grid)
            .map(|i| {
                let t = at(i);
                DensityRow { t, pdf: semicircle_pdf(t), cdf: semicircle_cdf(t) }
            })
            .collect()),
        DensityKind::MeijerTheorem1 => {
            let mut rows = Vec::with_capacity(grid);
            let mut cdf = if lo > s_lo { theorem1_integral(|_| 1.0, s_lo, lo, 1e-11)? } else { 0.0 };
            for i in 0..grid {
                let t = at(i);
                if i > 0 {
                    cdf += theorem1_integral(|_| 1.0, at(i - 1), t, 1e-11)?;
                }
                rows.push(DensityRow { t, pdf: theorem1_pdf(t)?, cdf });
            }
            Ok(rows)
        }
        DensityKind::ProductSemicircle => {
            Err(Error::InvalidInput("the product density is two-dimensional; tabulate its marginals".into()))
        }
    }
}

pub fn write_density_csv<W: Write>(mut out: W, rows: &[DensityRow]) -> Result<()> {
    writeln!(out, "t,pdf,cdf")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.t, r.pdf, r.cdf)?;
    }
    Ok(())
}
