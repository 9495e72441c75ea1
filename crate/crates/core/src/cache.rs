//! On-disk sweep cache and the JSON family-file format.
//!
//! A sweep of family `F` at `p` is stored as `<name>-<hash>-<p>.csv` with
//! header `lambda,a,bad`, beside `<name>-<hash>-<p>.meta.json`. The hash is
//! the content hash of the exact coefficients, so a renamed family with the
//! same coefficients finds the same data only under its own name, and a
//! changed family never matches stale data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::curves::{trace_sweep, CurveFamily, TraceSweep, COEFF_NAMES};
use crate::error::{Error, Result};
use crate::ffield::PrimeFieldContext;
use crate::poly::RationalPoly;

pub const ARTIFACT_VERSION: u32 = 1;

/// An integer written either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Num(i64),
    Str(String),
}

impl JsonInt {
    fn parse(&self) -> Result<BigInt> {
        match self {
            Self::Num(n) => Ok(BigInt::from(*n)),
            Self::Str(s) => s.trim().parse().map_err(|_| Error::InvalidInput(format!("not an integer: `{s}`"))),
        }
    }
}

/// A polynomial as a denominator and ascending integer numerators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySpec {
    denominator: JsonInt,
    coefficients: Vec<JsonInt>,
}

impl PolySpec {
    pub fn from_poly(f: &RationalPoly) -> Self {
        Self {
            denominator: JsonInt::Str(f.common_denominator().to_string()),
            coefficients: f.numerators().iter().map(|n| JsonInt::Str(n.to_string())).collect(),
        }
    }

    pub fn to_poly(&self) -> Result<RationalPoly> {
        let den = self.denominator.parse()?;
        let nums = self.coefficients.iter().map(JsonInt::parse).collect::<Result<Vec<_>>>()?;
        RationalPoly::from_big(nums, den).ok_or_else(|| Error::InvalidInput("zero denominator".into()))
    }
}

/// One family in a family file; absent coefficients are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    #[serde(flatten)]
    pub coefficients: BTreeMap<String, PolySpec>,
}

impl FamilySpec {
    pub fn from_family(f: &CurveFamily) -> Self {
        Self { name: f.name().to_string(), coefficients: coefficient_map(f) }
    }

    pub fn to_family(&self) -> Result<CurveFamily> {
        if let Some(k) = self.coefficients.keys().find(|k| !COEFF_NAMES.contains(&k.as_str())) {
            return Err(Error::InvalidInput(format!("unknown coefficient `{k}` in family `{}`", self.name)));
        }
        let mut coeffs: [RationalPoly; 5] = Default::default();
        for (slot, label) in coeffs.iter_mut().zip(COEFF_NAMES) {
            if let Some(spec) = self.coefficients.get(label) {
                *slot = spec.to_poly()?;
            }
        }
        CurveFamily::new(&self.name, coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub families: Vec<FamilySpec>,
}

/// Reads `{"families": [...]}`.
pub fn load_family_file(path: &Path) -> Result<Vec<CurveFamily>> {
    let file: FamilyFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.families.is_empty() {
        return Err(Error::InvalidInput(format!("{} lists no families", path.display())));
    }
    file.families.iter().map(FamilySpec::to_family).collect()
}

fn coefficient_map(f: &CurveFamily) -> BTreeMap<String, PolySpec> {
    COEFF_NAMES.iter().zip(f.coeffs()).map(|(k, c)| (k.to_string(), PolySpec::from_poly(c))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub family: String,
    pub hash: String,
    pub coefficients: BTreeMap<String, PolySpec>,
    pub p: u64,
    pub version: u32,
}

/// Directory of cached sweeps.
#[derive(Clone, Debug)]
pub struct SweepCache {
    dir: PathBuf,
}

impl SweepCache {
    /// Opens `dir`, creating it if needed.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn stem(family: &CurveFamily, p: u64) -> String {
        let name: String = family
            .name()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
            .collect();
        format!("{name}-{}-{p}", family.content_hash())
    }

    pub fn csv_path(&self, family: &CurveFamily, p: u64) -> PathBuf {
        self.dir.join(format!("{}.csv", Self::stem(family, p)))
    }

    pub fn meta_path(&self, family: &CurveFamily, p: u64) -> PathBuf {
        self.dir.join(format!("{}.meta.json", Self::stem(family, p)))
    }

    /// The cached sweep, if present. Present but inconsistent files give
    /// `CacheCorrupt`.
    pub fn load(&self, family: &CurveFamily, p: u64) -> Result<Option<TraceSweep>> {
        let (csv, meta) = (self.csv_path(family, p), self.meta_path(family, p));
        if !csv.exists() || !meta.exists() {
            return Ok(None);
        }
        let corrupt = |path: &Path, reason: String| Error::CacheCorrupt { path: path.display().to_string(), reason };
        let m: SweepMeta = serde_json::from_str(&fs::read_to_string(&meta)?).map_err(|e| corrupt(&meta, e.to_string()))?;
        let hash = family.content_hash();
        if m.hash != hash || m.p != p || m.coefficients != coefficient_map(family) {
            return Err(corrupt(&meta, format!("metadata does not describe family hash {hash} at p = {p}")));
        }
        if m.version != ARTIFACT_VERSION {
            return Err(corrupt(&meta, format!("artifact version {} (expected {ARTIFACT_VERSION})", m.version)));
        }
        let text = fs::read_to_string(&csv)?;
        let (traces, bad) = parse_sweep_csv(&text, p).map_err(|r| corrupt(&csv, r))?;
        Ok(Some(TraceSweep { p, family_name: family.name().to_string(), family_hash: hash, traces, bad }))
    }

    /// Writes both files atomically (temp file then rename).
    pub fn store(&self, family: &CurveFamily, sweep: &TraceSweep) -> Result<()> {
        if !sweep.is_for(family) {
            return Err(Error::SweepMismatch(format!("sweep of `{}` stored as `{}`", sweep.family_name, family.name())));
        }
        let meta = SweepMeta {
            family: family.name().to_string(),
            hash: sweep.family_hash.clone(),
            coefficients: coefficient_map(family),
            p: sweep.p,
            version: ARTIFACT_VERSION,
        };
        atomic_write(&self.csv_path(family, sweep.p), sweep_csv(sweep).as_bytes())?;
        atomic_write(&self.meta_path(family, sweep.p), serde_json::to_string_pretty(&meta)?.as_bytes())
    }

    /// Loads the sweep or computes and stores it. The flag is true when it
    /// was computed.
    pub fn get_or_compute(&self, family: &CurveFamily, ctx: &PrimeFieldContext, threads: usize) -> Result<(TraceSweep, bool)> {
        if let Some(s) = self.load(family, ctx.p())? {
            return Ok((s, false));
        }
        let s = trace_sweep(family, ctx, threads)?;
        self.store(family, &s)?;
        Ok((s, true))
    }
}

pub fn sweep_csv(sweep: &TraceSweep) -> String {
    let mut out = String::with_capacity(sweep.traces.len() * 12 + 16);
    out.push_str("lambda,a,bad\n");
    for (l, (a, b)) in sweep.traces.iter().zip(&sweep.bad).enumerate() {
        if *b {
            let _ = writeln!(out, "{l},,1");
        } else {
            let _ = writeln!(out, "{l},{a},0");
        }
    }
    out
}

fn parse_sweep_csv(text: &str, p: u64) -> std::result::Result<(Vec<i64>, Vec<bool>), String> {
    let mut lines = text.lines();
    if lines.next() != Some("lambda,a,bad") {
        return Err("missing header `lambda,a,bad`".into());
    }
    let mut traces = Vec::with_capacity(p as usize);
    let mut bad = Vec::with_capacity(p as usize);
    for (i, line) in lines.enumerate() {
        let row = || format!("row {}: `{line}`", i + 1);
        let mut f = line.split(',');
        let (Some(l), Some(a), Some(b), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(row());
        };
        if l.parse::<usize>().ok() != Some(i) {
            return Err(format!("{}: lambda out of sequence", row()));
        }
        match (b, a) {
            ("1", "") => {
                traces.push(0);
                bad.push(true);
            }
            ("0", a) => {
                traces.push(a.parse().map_err(|_| row())?);
                bad.push(false);
            }
            _ => return Err(row()),
        }
    }
    if traces.len() as u64 != p {
        return Err(format!("{} rows for p = {p}", traces.len()));
    }
    Ok((traces, bad))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
