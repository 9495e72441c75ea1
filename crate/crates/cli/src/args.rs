use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypmoments::theory::density::DensityKind;

#[derive(Parser, Debug)]
#[command(name = "hypmoments", version, about = "Finite-field hypergeometric moments from elliptic-curve trace sweeps")]
pub struct Cli {
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: Threads,

    /// Directory for cached sweeps.
    #[arg(long, global = true, env = "HYPMOMENTS_CACHE", default_value = ".hypmoments-cache")]
    pub cache_dir: PathBuf,

    /// Write the table or report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute (or load) the trace sweep of a family and print the cache file path.
    Sweep(SweepArgs),
    /// Run a self-check suite and print a JSON report.
    Verify(VerifyArgs),
    /// Empirical moments against their limits.
    Moments(MomentsArgs),
    /// Histogram of normalized values, optionally with an SVG overlay.
    Histogram(HistogramArgs),
    /// Tabulate a limiting density as `t,pdf,cdf`.
    Density(DensityArgs),
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Built-in family: legendre, legendre_neg, d3, d4, d6, clausen.
    #[arg(long)]
    pub family: Option<String>,
    /// JSON file `{"families": [...]}`; every listed family is swept.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    #[arg(long)]
    pub p: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Identities,
    Combinatorics,
    Density,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Primes for the identity suite.
    #[arg(long, value_delimiter = ',', default_value = "7,13,19,31,37,61")]
    pub primes: Vec<u64>,
    /// Largest order for the combinatorics suite.
    #[arg(long, default_value_t = 30)]
    pub max_order: u32,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    /// 1, 2, 3 or 4.
    #[arg(long)]
    pub theorem: u32,
    /// Degree for theorems 1 and 3: 2, 3, 4 or 6.
    #[arg(long)]
    pub d: Option<u32>,
    /// Two family ids for theorem 2.
    #[arg(long, value_delimiter = ',')]
    pub pair: Option<Vec<String>>,
    /// Family file with two families for theorem 2.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    #[arg(long)]
    pub p: u64,
    /// First order for theorem 2.
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Orders: `k`, `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "0..6")]
    pub m: Orders,
    /// Add the boundary terms from the Gauss-sum definition (theorems 1 and 4).
    #[arg(long)]
    pub boundary: bool,
}

#[derive(Args, Debug)]
pub struct HistogramArgs {
    /// 1 or 3.
    #[arg(long)]
    pub theorem: u32,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    /// Also write an SVG with the limiting density overlaid.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Theorem1,
    Semicircle,
}

impl Kind {
    pub fn density_kind(self) -> DensityKind {
        match self {
            Self::Theorem1 => DensityKind::MeijerTheorem1,
            Self::Semicircle => DensityKind::Semicircle,
        }
    }
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Number of grid points.
    #[arg(long, default_value_t = 801)]
    pub grid: usize,
    /// Sub-range `lo,hi` of the support.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<Range>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Fixed(usize),
}

impl Threads {
    pub fn resolve(self) -> usize {
        match self {
            Self::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Self::Fixed(n) => n,
        }
    }
}

impl FromStr for Threads {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Self::Fixed(n)),
            _ => Err(format!("expected a positive integer or `auto`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orders(Vec<u32>);

impl Orders {
    pub fn orders(&self) -> Vec<u32> {
        self.0.clone()
    }
}

impl FromStr for Orders {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected `k`, `a..b` or `k1,k2,...`, got `{s}`");
        let v = if let Some((a, b)) = s.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            (a..=b).collect()
        } else {
            s.split(',').map(|k| k.trim().parse().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Self(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected `lo,hi`, got `{s}`");
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = a.trim().parse().map_err(|_| bad())?;
        let hi: f64 = b.trim().parse().map_err(|_| bad())?;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(bad());
        }
        Ok(Self { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!("0..6".parse::<Orders>().unwrap().orders(), (0..=6).collect::<Vec<_>>());
        assert_eq!("2..=3".parse::<Orders>().unwrap().orders(), vec![2, 3]);
        assert_eq!("4".parse::<Orders>().unwrap().orders(), vec![4]);
        assert_eq!("1,3,5".parse::<Orders>().unwrap().orders(), vec![1, 3, 5]);
        assert!("5..2".parse::<Orders>().is_err());
        assert!("x".parse::<Orders>().is_err());
    }

    #[test]
    fn threads() {
        assert_eq!("auto".parse::<Threads>().unwrap(), Threads::Auto);
        assert_eq!("3".parse::<Threads>().unwrap().resolve(), 3);
        assert!("0".parse::<Threads>().is_err());
        assert!(Threads::Auto.resolve() >= 1);
    }

    #[test]
    fn range() {
        assert_eq!("-1,2.5".parse::<Range>().unwrap(), Range { lo: -1.0, hi: 2.5 });
        assert!("2,1".parse::<Range>().is_err());
    }
}
