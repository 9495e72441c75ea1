use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform bins over `[lo, hi]`, right-open except the last, which is closed.
/// Values outside the range are counted in the end bins and tallied
/// separately.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub clamped_below: u64,
    pub clamped_above: u64,
}

pub fn histogram_build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if bins == 0 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::BadRange { lo, hi, bins });
    }
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    let mut counts = vec![0u64; bins];
    let (mut below, mut above) = (0, 0);
    for &v in values {
        if v.is_nan() {
            return Err(Error::InvalidInput("NaN in histogram input".into()));
        }
        let i = if v < lo {
            below += 1;
            0
        } else if v > hi {
            above += 1;
            bins - 1
        } else {
            let mut i = (((v - lo) / width) as usize).min(bins - 1);
            // Guard the float division against landing one bin off.
            while i > 0 && v < bin_edges[i] {
                i -= 1;
            }
            while i + 1 < bins && v >= bin_edges[i + 1] {
                i += 1;
            }
            i
        };
        counts[i] += 1;
    }
    Ok(Histogram { bin_edges, counts, total: values.len() as u64, clamped_below: below, clamped_above: above })
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// `count / (total * width)`, so the heights integrate to 1; all zero when empty.
    pub fn heights(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, e)| if self.total == 0 { 0.0 } else { c as f64 / (self.total as f64 * (e[1] - e[0])) })
            .collect()
    }

    /// CSV with header `bin_lo,bin_hi,count,height`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_lo,bin_hi,count,height")?;
        for ((e, c), h) in self.bin_edges.windows(2).zip(&self.counts).zip(self.heights()) {
            writeln!(out, "{},{},{},{}", e[0], e[1], c, h)?;
        }
        Ok(())
    }
}
