//! `hypmoments`: trace sweeps, identity checks, moment tables, histograms and
//! density tables from the command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

mod args;
mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command, DensityArgs, Format, HistogramArgs, MomentsArgs, Suite, SweepArgs, VerifyArgs};
use hypmoments::cache::{load_family_file, SweepCache};
use hypmoments::curves::{builtin_family, BuiltinFamily, CurveFamily, TraceSweep};
use hypmoments::ffield::{build_field, GaussTable, PrimeFieldContext};
use hypmoments::moments::{
    histogram_build, mixed_empirical, theorem1_empirical, theorem1_empirical_with_boundary, theorem1_samples,
    theorem3_empirical, theorem3_samples, theorem4_empirical, theorem4_empirical_with_boundary, MomentReport,
};
use hypmoments::theory::density::{density_table_on, write_density_csv, DensityKind, DensitySpec};
use hypmoments::verify::{verify_combinatorics, verify_density, verify_identities, SuiteReport};

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

struct Env {
    threads: usize,
    cache_dir: PathBuf,
    output: Option<PathBuf>,
    format: Format,
}

impl Env {
    fn cache(&self) -> Result<SweepCache> {
        SweepCache::open(&self.cache_dir).with_context(|| format!("cache directory {}", self.cache_dir.display()))
    }

    /// Loads a sweep from the cache or computes and stores it.
    fn sweep(&self, cache: &SweepCache, family: &CurveFamily, ctx: &PrimeFieldContext) -> Result<TraceSweep> {
        let (s, fresh) = cache.get_or_compute(family, ctx, self.threads)?;
        let verb = if fresh { "computed" } else { "loaded" };
        eprintln!("{verb} {} at p = {}", family.name(), ctx.p());
        Ok(s)
    }

    fn write_output(&self, bytes: &[u8]) -> Result<()> {
        match &self.output {
            Some(path) => write_file(path, bytes),
            None => Ok(io::stdout().lock().write_all(bytes)?),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<Status> {
    let threads = cli.threads.resolve();
    // Moment accumulation runs on the global pool; sweeps build their own.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    let env = Env { threads, cache_dir: cli.cache_dir, output: cli.output, format: cli.format };
    match cli.command {
        Command::Sweep(a) => cmd_sweep(&env, a),
        Command::Verify(a) => cmd_verify(&env, a),
        Command::Moments(a) => cmd_moments(&env, a),
        Command::Histogram(a) => cmd_histogram(&env, a),
        Command::Density(a) => cmd_density(&env, a),
    }
}

fn families(family: Option<&str>, file: Option<&Path>) -> Result<Vec<CurveFamily>> {
    match (family, file) {
        (Some(id), None) => Ok(vec![builtin_family(id)?]),
        (None, Some(path)) => load_family_file(path).with_context(|| format!("family file {}", path.display())),
        _ => bail!("give exactly one of --family and --family-file"),
    }
}

fn cmd_sweep(env: &Env, a: SweepArgs) -> Result<Status> {
    let ctx = build_field(a.p)?;
    let cache = env.cache()?;
    let mut out = String::new();
    for family in families(a.family.as_deref(), a.family_file.as_deref())? {
        env.sweep(&cache, &family, &ctx)?;
        out.push_str(&format!("{}\n", cache.csv_path(&family, a.p).display()));
    }
    env.write_output(out.as_bytes())?;
    Ok(Status::Ok)
}

fn cmd_verify(env: &Env, a: VerifyArgs) -> Result<Status> {
    let report: SuiteReport = match a.suite {
        Suite::Identities => verify_identities(&a.primes)?,
        Suite::Combinatorics => verify_combinatorics(a.max_order),
        Suite::Density => verify_density()?,
    };
    env.write_output(format!("{}\n", serde_json::to_string_pretty(&report)?).as_bytes())?;
    match report.first_failure() {
        None => Ok(Status::Ok),
        Some(c) => {
            match &c.counterexample {
                Some(x) => eprintln!(
                    "check `{}` failed: p = {}, d = {}, lambda = {}: expected {}, got {}",
                    c.name,
                    x.p,
                    x.d.map_or("-".into(), |d| d.to_string()),
                    x.lambda,
                    x.expected,
                    x.actual
                ),
                None => eprintln!("check `{}` failed: error {:?} above tolerance {:?}", c.name, c.error, c.tolerance),
            }
            Ok(Status::CheckFailed)
        }
    }
}

/// The first sweep and, when `family` has a pullback partner, the negated one.
fn pair_sweeps(env: &Env, cache: &SweepCache, family: &CurveFamily, ctx: &PrimeFieldContext) -> Result<(TraceSweep, TraceSweep)> {
    let plus = env.sweep(cache, family, ctx)?;
    let minus = plus.negated(family)?;
    Ok((plus, minus))
}

fn cmd_moments(env: &Env, a: MomentsArgs) -> Result<Status> {
    let ctx = build_field(a.p)?;
    let cache = env.cache()?;
    let orders = a.m.orders();
    let need_d = || a.d.context("--d is required for this theorem");
    let mut rows: Vec<MomentReport> = Vec::new();
    match a.theorem {
        1 => {
            let d = need_d()?;
            let family = BuiltinFamily::for_degree(d)?.family();
            let (plus, minus) = pair_sweeps(env, &cache, &family, &ctx)?;
            let gauss = if a.boundary { Some(GaussTable::new(&ctx)?) } else { None };
            for m in orders {
                rows.push(match &gauss {
                    Some(g) => theorem1_empirical_with_boundary(&ctx, g, d, &plus, &minus, m)?,
                    None => theorem1_empirical(d, &plus, &minus, m)?,
                });
            }
        }
        2 => {
            let pair = match (&a.pair, &a.family_file) {
                (Some(p), None) => p.iter().map(|id| builtin_family(id)).collect::<hypmoments::Result<Vec<_>>>()?,
                (None, Some(path)) => load_family_file(path)?,
                _ => bail!("theorem 2 needs exactly one of --pair and --family-file"),
            };
            let [first, second] = pair.as_slice() else {
                bail!("theorem 2 needs exactly two families, got {}", pair.len());
            };
            let s1 = env.sweep(&cache, first, &ctx)?;
            let s2 = if second.content_hash() == first.pullback_neg().content_hash() {
                let mut s = s1.negated(first)?;
                s.family_name = second.name().to_string();
                s
            } else {
                env.sweep(&cache, second, &ctx)?
            };
            for m in orders {
                rows.push(mixed_empirical(&s1, &s2, a.n, m)?);
            }
        }
        3 => {
            let d = need_d()?;
            let sweep = env.sweep(&cache, &BuiltinFamily::for_degree(d)?.family(), &ctx)?;
            for m in orders {
                rows.push(theorem3_empirical(d, &sweep, m)?);
            }
        }
        4 => {
            let sweep = env.sweep(&cache, &BuiltinFamily::Clausen.family(), &ctx)?;
            let gauss = if a.boundary { Some(GaussTable::new(&ctx)?) } else { None };
            for m in orders {
                rows.push(match &gauss {
                    Some(g) => theorem4_empirical_with_boundary(&sweep, &ctx, g, m)?,
                    None => theorem4_empirical(&sweep, &ctx, m)?,
                });
            }
        }
        t => bail!("unknown theorem {t}; expected 1, 2, 3 or 4"),
    }
    let text = match env.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
        Format::Csv => moments_csv(&rows),
    };
    env.write_output(text.as_bytes())?;
    Ok(Status::Ok)
}

fn moments_csv(rows: &[MomentReport]) -> String {
    let mut out = String::from("p,spec,n,m,empirical,limit,deviation,excluded,normalization\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.12},{},{:e},{},{}\n",
            r.p,
            r.spec.id(),
            r.n,
            r.m,
            r.empirical,
            r.limit,
            r.deviation,
            r.excluded,
            r.normalization()
        ));
    }
    out
}

fn cmd_histogram(env: &Env, a: HistogramArgs) -> Result<Status> {
    let ctx = build_field(a.p)?;
    let cache = env.cache()?;
    let family = BuiltinFamily::for_degree(a.d)?.family();
    let (samples, kind) = match a.theorem {
        1 => {
            let (plus, minus) = pair_sweeps(env, &cache, &family, &ctx)?;
            (theorem1_samples(a.d, &plus, &minus)?, DensityKind::MeijerTheorem1)
        }
        3 => {
            let sweep = env.sweep(&cache, &family, &ctx)?;
            (theorem3_samples(a.d, &sweep)?, DensityKind::Semicircle)
        }
        t => bail!("histograms are defined for theorems 1 and 3, not {t}"),
    };
    let (lo, hi) = DensitySpec::new(kind).support();
    let hist = histogram_build(&samples, lo, hi, a.bins)?;
    match env.format {
        Format::Csv => {
            let mut buf = Vec::new();
            hist.write_csv(&mut buf)?;
            env.write_output(&buf)?;
        }
        Format::Json => env.write_output(format!("{}\n", serde_json::to_string_pretty(&hist)?).as_bytes())?,
    }
    if let Some(path) = &a.svg {
        let title = format!("theorem {} d = {} p = {}", a.theorem, a.d, a.p);
        write_file(path, svg::histogram_overlay(&hist, kind, &title)?.as_bytes())?;
    }
    Ok(Status::Ok)
}

fn cmd_density(env: &Env, a: DensityArgs) -> Result<Status> {
    let kind = a.kind.density_kind();
    let (lo, hi) = match a.range {
        Some(r) => (r.lo, r.hi),
        None => DensitySpec::new(kind).support(),
    };
    let rows = density_table_on(kind, lo, hi, a.grid)?;
    match env.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_density_csv(&mut buf, &rows)?;
            env.write_output(&buf)?;
        }
        Format::Json => env.write_output(format!("{}\n", serde_json::to_string_pretty(&rows)?).as_bytes())?,
    }
    Ok(Status::Ok)
}
