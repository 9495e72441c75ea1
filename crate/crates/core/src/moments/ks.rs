use crate::error::{Error, Result};

/// Kolmogorov-Smirnov distance `sup_x |F_n(x) - F(x)|` between the empirical
/// cdf of `samples` and `cdf`, taking both one-sided gaps at each sample.
/// The samples need not be sorted.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    }))
}
