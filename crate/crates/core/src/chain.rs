//! Chain records shared by the SV and GARCH fits, and the per-day volatility
//! summaries they produce.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::fsio::write_atomic;

/// Run metadata written at the top of a chain file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainMeta {
    pub model: String,
    pub seed: u64,
    pub burn_in: usize,
    pub n_kept: usize,
    /// Sampler settings in effect after burn-in, as `key = value` pairs.
    pub settings: Vec<(String, String)>,
    /// Acceptance rate per update block over the kept draws.
    pub acceptance: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl ChainMeta {
    pub fn acceptance_of(&self, block: &str) -> Option<f64> {
        self.acceptance.iter().find(|(k, _)| k == block).map(|(_, v)| *v)
    }
}

/// Renders a chain as a `# key = value` header followed by CSV draw records.
pub fn format_chain(meta: &ChainMeta, columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# svhmc chain");
    let _ = writeln!(out, "# model = {}", meta.model);
    let _ = writeln!(out, "# seed = {}", meta.seed);
    let _ = writeln!(out, "# burn_in = {}", meta.burn_in);
    let _ = writeln!(out, "# n_kept = {}", meta.n_kept);
    for (k, v) in &meta.settings {
        let _ = writeln!(out, "# {k} = {v}");
    }
    for (k, v) in &meta.acceptance {
        let _ = writeln!(out, "# accept.{k} = {v}");
    }
    for w in &meta.warnings {
        let _ = writeln!(out, "# warning = {w}");
    }
    let _ = writeln!(out, "iter,{}", columns.join(","));
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(out, "{}", i + 1);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Posterior mean and standard deviation of the daily variance.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPath {
    pub dates: Vec<NaiveDate>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl VolatilityPath {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// `date,<prefix>_vol_mean,<prefix>_vol_sd`.
    pub fn to_csv(&self, prefix: &str) -> String {
        let mut out = format!("date,{prefix}_vol_mean,{prefix}_vol_sd\n");
        for ((d, m), s) in self.dates.iter().zip(&self.mean).zip(&self.sd) {
            let _ = writeln!(out, "{},{m},{s}", d.format("%Y-%m-%d"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path, prefix: &str) -> Result<()> {
        write_atomic(path, self.to_csv(prefix).as_bytes())
    }
}

/// Reads a volatility CSV written by [`VolatilityPath::write_csv`]; the second
/// and third columns are taken as mean and SD whatever their prefix.
pub fn load_volatility(path: &Path) -> Result<VolatilityPath> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("date,") => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: 1,
                msg: "expected `date,...` header".into(),
            })
        }
    }
    let mut out = VolatilityPath {
        dates: Vec::new(),
        mean: Vec::new(),
        sd: Vec::new(),
    };
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_owned(),
            line: i as u64 + 1,
            msg,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(err(format!("expected 3 fields, got {}", fields.len())));
        }
        let date = NaiveDate::parse_from_str(fields[0], "%Y-%m-%d")
            .map_err(|e| err(format!("bad date {:?}: {e}", fields[0])))?;
        let num = |s: &str| f64::from_str(s).map_err(|e| err(format!("bad number {s:?}: {e}")));
        out.dates.push(date);
        out.mean.push(num(fields[1])?);
        out.sd.push(num(fields[2])?);
    }
    Ok(out)
}

/// Running mean and variance (Welford) of a vector-valued draw.
#[derive(Debug, Clone)]
pub(crate) struct RunningMoments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningMoments {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub(crate) fn push(&mut self, xs: impl IntoIterator<Item = f64>) {
        self.count += 1;
        let k = self.count as f64;
        for ((x, m), s) in xs.into_iter().zip(self.mean.iter_mut()).zip(self.m2.iter_mut()) {
            let d = x - *m;
            *m += d / k;
            *s += d * (x - *m);
        }
    }

    pub(crate) fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub(crate) fn sd(&self) -> Vec<f64> {
        let denom = (self.count.max(2) - 1) as f64;
        self.m2.iter().map(|s| (s / denom).sqrt()).collect()
    }
}
