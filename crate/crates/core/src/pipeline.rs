//! Run configuration and the pipeline stages behind the `svhmc` binary.
//!
//! A [`RunConfig`] is read from TOML with the blocks `[data]`, `[synth]`,
//! `[sv]`, `[hmc]`, `[garch]`, `[rv]` and `[eval]` plus a top-level `seed`.
//! Every key is optional. Stages read and write fixed file names inside the
//! output directory unless `[data]` or `[eval]` point elsewhere:
//!
//! | stage      | writes                                                        |
//! |------------|---------------------------------------------------------------|
//! | simulate   | `daily.csv`, `truth.csv`, `intraday.csv` (with an intraday layer) |
//! | fit sv     | `sv_chain.txt`, `sv_volatility.csv`, `sv_diagnostics.csv`     |
//! | fit garch  | `garch_chain.txt`, `garch_volatility.csv`, `garch_diagnostics.csv` |
//! | rv         | `rv_<d>min.csv` per interval, `signature.csv`                 |
//! | evaluate   | `scores.csv`, `scores.txt`                                    |
//! | report     | `report.txt`                                                  |

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crate::chain::load_volatility;
use crate::diagnostics::summary_csv;
use crate::error::{Error, Result};
use crate::evaluate::compare;
use crate::fsio::write_atomic;
use crate::garch::{run_garch_fit, GarchFitConfig, GarchParams};
use crate::hmc::HmcConfig;
use crate::realized::{adjusted_rv, load_rv, signature_csv, signature_sweep, DEFAULT_DELTAS};
use crate::sampler::{run_sv_fit, PriorSpec, SvFitConfig};
use crate::sv::SvParams;
use crate::synth::{simulate, IntradaySpec, SynthSpec, TruthModel};
use crate::timeseries::{load_daily_returns, load_intraday, DailyColumn, SessionCalendar};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataBlock {
    pub daily: Option<PathBuf>,
    /// `auto`, `return` or `close`.
    pub daily_column: String,
    pub intraday: Option<PathBuf>,
    /// `HH:MM-HH:MM` intervals; Tokyo hours when absent.
    pub sessions: Option<Vec<String>>,
}

impl Default for DataBlock {
    fn default() -> Self {
        Self {
            daily: None,
            daily_column: "auto".into(),
            intraday: None,
            sessions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthBlock {
    /// `sv`, `garch` or `diffusion`.
    pub model: String,
    pub n_days: usize,
    pub start: String,
    pub label: String,
    pub mu: f64,
    pub phi: f64,
    pub sigma_eta_sq: f64,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub daily_variance: f64,
    pub intraday: bool,
    pub tick_interval_secs: u32,
    pub noise_std: f64,
    pub overnight_share: f64,
}

impl Default for SynthBlock {
    fn default() -> Self {
        Self {
            model: "sv".into(),
            n_days: 2000,
            start: "2000-01-03".into(),
            label: "synthetic".into(),
            mu: -7.87,
            phi: 0.975,
            sigma_eta_sq: 0.045,
            omega: 2e-6,
            alpha: 0.05,
            beta: 0.93,
            daily_variance: 1e-4,
            intraday: false,
            tick_interval_secs: 10,
            noise_std: 0.0,
            overnight_share: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvBlock {
    pub n_burn: usize,
    pub n_keep: usize,
    pub prior_shape: f64,
    pub prior_scale: f64,
    pub trace_indices: Vec<usize>,
    pub tune_window: usize,
    pub fixed_phi: Option<f64>,
}

impl Default for SvBlock {
    fn default() -> Self {
        let d = SvFitConfig::default();
        Self {
            n_burn: d.n_burn,
            n_keep: d.n_keep,
            prior_shape: d.priors.ig_shape,
            prior_scale: d.priors.ig_scale,
            trace_indices: d.trace_indices,
            tune_window: d.tune_window,
            fixed_phi: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmcBlock {
    pub step_size: f64,
    pub n_steps: usize,
    pub target_accept: f64,
    pub tune: bool,
    /// Seed of the SV chain; the global seed when absent.
    pub seed: Option<u64>,
}

impl Default for HmcBlock {
    fn default() -> Self {
        let d = HmcConfig::default();
        Self {
            step_size: d.step_size,
            n_steps: d.n_steps,
            target_accept: d.target_accept,
            tune: d.tune,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GarchBlock {
    pub n_burn: usize,
    pub n_keep: usize,
    pub adapt_window: usize,
    pub target_accept: f64,
    pub seed: Option<u64>,
}

impl Default for GarchBlock {
    fn default() -> Self {
        let d = GarchFitConfig::default();
        Self {
            n_burn: d.n_burn,
            n_keep: d.n_keep,
            adapt_window: d.adapt_window,
            target_accept: d.target_accept,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RvBlock {
    /// Sampling intervals in minutes.
    pub deltas: Vec<u32>,
}

impl Default for RvBlock {
    fn default() -> Self {
        Self {
            deltas: DEFAULT_DELTAS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalBlock {
    /// Models to score; each needs `<model>_volatility.csv`.
    pub models: Vec<String>,
    pub sv_volatility: Option<PathBuf>,
    pub garch_volatility: Option<PathBuf>,
    /// Directory holding the `rv_<d>min.csv` files.
    pub rv_dir: Option<PathBuf>,
}

impl Default for EvalBlock {
    fn default() -> Self {
        Self {
            models: vec!["sv".into(), "garch".into()],
            sv_volatility: None,
            garch_volatility: None,
            rv_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataBlock,
    pub synth: SynthBlock,
    pub sv: SvBlock,
    pub hmc: HmcBlock,
    pub garch: GarchBlock,
    pub rv: RvBlock,
    pub eval: EvalBlock,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.data.daily,
            &mut cfg.data.intraday,
            &mut cfg.eval.sv_volatility,
            &mut cfg.eval.garch_volatility,
            &mut cfg.eval.rv_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Replaces the global seed and drops per-block seeds.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.hmc.seed = None;
        self.garch.seed = None;
    }

    pub fn calendar(&self) -> Result<SessionCalendar> {
        match &self.data.sessions {
            Some(s) => SessionCalendar::parse(s),
            None => Ok(SessionCalendar::tokyo()),
        }
    }

    pub fn daily_column(&self) -> Result<DailyColumn> {
        match self.data.daily_column.to_ascii_lowercase().as_str() {
            "auto" => Ok(DailyColumn::Auto),
            "return" => Ok(DailyColumn::Return),
            "close" => Ok(DailyColumn::Close),
            other => Err(Error::Config(format!("daily_column {other:?} is not auto|return|close"))),
        }
    }

    pub fn synth_spec(&self) -> Result<SynthSpec> {
        let s = &self.synth;
        let model = match s.model.as_str() {
            "sv" => TruthModel::Sv(SvParams {
                mu: s.mu,
                phi: s.phi,
                sigma_eta_sq: s.sigma_eta_sq,
            }),
            "garch" => TruthModel::Garch(GarchParams::new(s.omega, s.alpha, s.beta)?),
            "diffusion" => TruthModel::Diffusion {
                daily_variance: s.daily_variance,
            },
            other => return Err(Error::Config(format!("synth model {other:?} is not sv|garch|diffusion"))),
        };
        let mut spec = SynthSpec::new(model, s.n_days, self.seed);
        spec.start = NaiveDate::parse_from_str(&s.start, "%Y-%m-%d")
            .map_err(|e| Error::Config(format!("synth start {:?}: {e}", s.start)))?;
        spec.label = s.label.clone();
        if s.intraday {
            spec = spec.with_intraday(IntradaySpec {
                calendar: self.calendar()?,
                tick_interval_secs: s.tick_interval_secs,
                noise_std: s.noise_std,
                overnight_share: s.overnight_share,
                ..IntradaySpec::default()
            });
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn sv_fit_config(&self) -> Result<SvFitConfig> {
        let hmc = HmcConfig {
            step_size: self.hmc.step_size,
            n_steps: self.hmc.n_steps,
            target_accept: self.hmc.target_accept,
            tune: self.hmc.tune,
            seed: self.hmc.seed.unwrap_or(self.seed),
        };
        let cfg = SvFitConfig {
            priors: PriorSpec {
                ig_shape: self.sv.prior_shape,
                ig_scale: self.sv.prior_scale,
            },
            hmc,
            n_burn: self.sv.n_burn,
            n_keep: self.sv.n_keep,
            seed: hmc.seed,
            trace_indices: self.sv.trace_indices.clone(),
            tune_window: self.sv.tune_window,
            fixed_phi: self.sv.fixed_phi,
            init: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn garch_fit_config(&self) -> Result<GarchFitConfig> {
        let cfg = GarchFitConfig {
            n_burn: self.garch.n_burn,
            n_keep: self.garch.n_keep,
            seed: self.garch.seed.unwrap_or(self.seed),
            adapt_window: self.garch.adapt_window,
            target_accept: self.garch.target_accept,
            init: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every block and every file the config names. Files that a
    /// stage expects in the output directory are checked when it runs.
    pub fn validate(&self) -> Result<()> {
        self.calendar().map_err(config_err)?;
        self.daily_column()?;
        self.synth_spec().map_err(config_err)?;
        self.sv_fit_config().map_err(config_err)?;
        self.garch_fit_config().map_err(config_err)?;
        if self.rv.deltas.is_empty() || self.rv.deltas.contains(&0) {
            return Err(Error::Config(format!("rv deltas {:?} must be non-empty and positive", self.rv.deltas)));
        }
        if self.eval.models.is_empty() {
            return Err(Error::Config("eval models is empty".into()));
        }
        for m in &self.eval.models {
            if m != "sv" && m != "garch" {
                return Err(Error::Config(format!("eval model {m:?} is not sv|garch")));
            }
        }
        for p in [&self.data.daily, &self.data.intraday, &self.eval.sv_volatility, &self.eval.garch_volatility]
            .into_iter()
            .flatten()
        {
            if !p.is_file() {
                return Err(Error::Config(format!("{} does not exist", p.display())));
            }
        }
        if let Some(d) = &self.eval.rv_dir {
            if !d.is_dir() {
                return Err(Error::Config(format!("{} is not a directory", d.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    Sv,
    Garch,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::Sv => "sv",
            FitModel::Garch => "garch",
        }
    }
}

/// What a stage produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Human-readable summary for the terminal.
    pub message: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_WARNINGS: i32 = 3;

/// Process exit code for a failed stage.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

pub fn rv_file_name(delta_min: u32) -> String {
    format!("rv_{delta_min}min.csv")
}

/// A validated config bound to an output directory.
#[derive(Debug, Clone)]
pub struct Pipeline {
    cfg: RunConfig,
    out: PathBuf,
}

impl Pipeline {
    pub fn new(cfg: RunConfig, out: impl Into<PathBuf>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, out: out.into() })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    fn daily_path(&self) -> PathBuf {
        self.cfg.data.daily.clone().unwrap_or_else(|| self.out.join("daily.csv"))
    }

    fn intraday_path(&self) -> PathBuf {
        self.cfg.data.intraday.clone().unwrap_or_else(|| self.out.join("intraday.csv"))
    }

    fn volatility_path(&self, model: FitModel) -> PathBuf {
        let given = match model {
            FitModel::Sv => &self.cfg.eval.sv_volatility,
            FitModel::Garch => &self.cfg.eval.garch_volatility,
        };
        given
            .clone()
            .unwrap_or_else(|| self.out.join(format!("{}_volatility.csv", model.name())))
    }

    fn rv_dir(&self) -> PathBuf {
        self.cfg.eval.rv_dir.clone().unwrap_or_else(|| self.out.clone())
    }

    fn write(&self, name: &str, contents: &str, outcome: &mut Outcome) -> Result<()> {
        let path = self.out.join(name);
        write_atomic(&path, contents.as_bytes())?;
        outcome.files.push(path);
        Ok(())
    }

    fn require(path: &Path, stage: &str) -> Result<()> {
        if path.is_file() {
            Ok(())
        } else {
            Err(Error::Validation(format!("{stage}: input {} not found", path.display())))
        }
    }

    pub fn simulate(&self) -> Result<Outcome> {
        let spec = self.cfg.synth_spec()?;
        let sim = simulate(&spec)?;
        let mut out = Outcome::default();
        self.write("daily.csv", &sim.daily.to_csv(), &mut out)?;
        self.write("truth.csv", &sim.truth_csv(), &mut out)?;
        if let Some(panel) = &sim.intraday {
            self.write("intraday.csv", &panel.to_csv(), &mut out)?;
        }
        out.message = format!("simulated {} days ({} model)", sim.daily.len(), self.cfg.synth.model);
        Ok(out)
    }

    pub fn fit(&self, model: FitModel) -> Result<Outcome> {
        let path = self.daily_path();
        Self::require(&path, "fit")?;
        let y = load_daily_returns(&path, self.cfg.daily_column()?)?;
        let name = model.name();
        let (chain_file, vol, rows, warnings) = match model {
            FitModel::Sv => {
                let c = run_sv_fit(&y, &self.cfg.sv_fit_config()?)?;
                (c.to_chain_file(), c.volatility(), c.summaries()?, c.meta.warnings)
            }
            FitModel::Garch => {
                let c = run_garch_fit(&y, &self.cfg.garch_fit_config()?)?;
                (c.to_chain_file(), c.volatility(), c.summaries()?, c.meta.warnings)
            }
        };
        let mut out = Outcome {
            warnings,
            ..Outcome::default()
        };
        for (param, s) in &rows {
            if s.flagged {
                out.warnings.push(format!("{name}: tau_int window for {param} did not close"));
            }
        }
        self.write(&format!("{name}_chain.txt"), &chain_file, &mut out)?;
        self.write(&format!("{name}_volatility.csv"), &vol.to_csv(name), &mut out)?;
        self.write(&format!("{name}_diagnostics.csv"), &summary_csv(&rows), &mut out)?;
        let mut msg = format!("{name} fit on {} days\n", y.len());
        for (param, s) in &rows {
            msg.push_str(&format!("  {param:<14} {:>12.6} ({:.6})  tau_int {:.1}\n", s.mean, s.se, s.tau_int));
        }
        out.message = msg;
        Ok(out)
    }

    pub fn rv(&self) -> Result<Outcome> {
        let daily_path = self.daily_path();
        let intraday_path = self.intraday_path();
        Self::require(&daily_path, "rv")?;
        Self::require(&intraday_path, "rv")?;
        let daily = load_daily_returns(&daily_path, self.cfg.daily_column()?)?;
        let panel = load_intraday(&intraday_path, &self.cfg.calendar()?)?;
        let mut out = Outcome::default();
        out.warnings.extend(panel.warnings().iter().map(|w| format!("{}: {}", w.date, w.message)));
        if panel.dropped() > 0 {
            out.warnings.push(format!("{} ticks outside the sessions were dropped", panel.dropped()));
        }
        for &d in &self.cfg.rv.deltas {
            let rv = adjusted_rv(&panel, &daily, d)?;
            out.warnings.extend(rv.excluded.iter().map(|w| format!("{d} min, {}: {}", w.date, w.message)));
            self.write(&rv_file_name(d), &rv.to_csv(), &mut out)?;
        }
        let rows = signature_sweep(&panel, &daily, &self.cfg.rv.deltas)?;
        let table = signature_csv(&rows);
        self.write("signature.csv", &table, &mut out)?;
        out.message = table;
        Ok(out)
    }

    pub fn evaluate(&self) -> Result<Outcome> {
        let mut paths = Vec::new();
        for m in &self.cfg.eval.models {
            let model = if m == "sv" { FitModel::Sv } else { FitModel::Garch };
            let p = self.volatility_path(model);
            Self::require(&p, "evaluate")?;
            paths.push((m.as_str(), load_volatility(&p)?));
        }
        let dir = self.rv_dir();
        let mut rvs = Vec::new();
        for &d in &self.cfg.rv.deltas {
            let p = dir.join(rv_file_name(d));
            Self::require(&p, "evaluate")?;
            rvs.push(load_rv(&p, d)?);
        }
        let models: Vec<(&str, &crate::chain::VolatilityPath)> = paths.iter().map(|(n, v)| (*n, v)).collect();
        let table = compare(&models, &rvs)?;
        let mut out = Outcome::default();
        self.write("scores.csv", &table.to_csv(), &mut out)?;
        let summary = table.summary();
        self.write("scores.txt", &summary, &mut out)?;
        out.message = summary;
        Ok(out)
    }

    /// Concatenates every stage output present in the output directory.
    pub fn report(&self) -> Result<Outcome> {
        let mut names: Vec<String> = vec!["daily.csv".into(), "truth.csv".into()];
        for m in ["sv", "garch"] {
            names.push(format!("{m}_diagnostics.csv"));
            names.push(format!("{m}_chain.txt"));
        }
        names.push("signature.csv".into());
        names.push("scores.csv".into());
        names.push("scores.txt".into());

        let mut report = format!("# svhmc run report\n# seed = {}\n", self.cfg.seed);
        let mut found = 0;
        for name in &names {
            let path = self.out.join(name);
            if !path.is_file() {
                continue;
            }
            found += 1;
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            report.push_str(&format!("\n## {name}\n"));
            if name.ends_with(".txt") && name.contains("_chain") {
                // Header only; the draws stay in the chain file.
                for line in text.lines().take_while(|l| l.starts_with('#')) {
                    report.push_str(line);
                    report.push('\n');
                }
            } else if name == "daily.csv" || name == "truth.csv" {
                let rows = text.lines().count().saturating_sub(1);
                report.push_str(&format!("{rows} rows\n"));
            } else {
                report.push_str(&text);
            }
        }
        if found == 0 {
            return Err(Error::Validation(format!(
                "report: no stage outputs in {}",
                self.out.display()
            )));
        }
        let mut out = Outcome::default();
        self.write("report.txt", &report, &mut out)?;
        out.message = format!("report covers {found} files");
        Ok(out)
    }
}
