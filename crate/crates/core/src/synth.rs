//! Synthetic ground truth: SV and GARCH daily returns, and intraday log-price
//! diffusions with an overnight gap and optional microstructure noise.
//!
//! Every generator is a pure function of its spec and seed.

use std::fmt::Write as _;

use chrono::{Datelike, Days, NaiveDate, NaiveTime, Weekday};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::garch::GarchParams;
use crate::rng::{self, Stage, StreamRng};
use crate::sv::{LatentPath, SvParams};
use crate::timeseries::{IntradayDay, IntradayPanel, ReturnSeries, SessionCalendar, Tick};

/// Daily-variance process driving the simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthModel {
    Sv(SvParams),
    Garch(GarchParams),
    /// Constant daily variance.
    Diffusion { daily_variance: f64 },
}

/// Intraday layer: prices inside `calendar` sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradaySpec {
    pub calendar: SessionCalendar,
    /// Spacing of recorded ticks; the price path itself moves every second.
    pub tick_interval_secs: u32,
    /// Standard deviation of i.i.d. Gaussian noise added to observed log-prices.
    pub noise_std: f64,
    /// Fraction of each day's variance realized overnight, in `[0, 1)`.
    pub overnight_share: f64,
    /// Log-price before the first day.
    pub initial_log_price: f64,
}

impl Default for IntradaySpec {
    fn default() -> Self {
        Self {
            calendar: SessionCalendar::tokyo(),
            tick_interval_secs: 1,
            noise_std: 0.0,
            overnight_share: 0.0,
            initial_log_price: 100f64.ln(),
        }
    }
}

impl IntradaySpec {
    pub fn validate(&self) -> Result<()> {
        if self.tick_interval_secs == 0 {
            return Err(Error::Config("tick_interval_secs must be >= 1".into()));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config(format!("noise_std {} must be >= 0", self.noise_std)));
        }
        if !(0.0..1.0).contains(&self.overnight_share) {
            return Err(Error::Config(format!(
                "overnight_share {} must lie in [0, 1)",
                self.overnight_share
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub model: TruthModel,
    pub n_days: usize,
    pub start: NaiveDate,
    pub seed: u64,
    pub label: String,
    pub intraday: Option<IntradaySpec>,
}

impl SynthSpec {
    pub fn new(model: TruthModel, n_days: usize, seed: u64) -> Self {
        Self {
            model,
            n_days,
            start: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            seed,
            label: "synthetic".into(),
            intraday: None,
        }
    }

    pub fn with_intraday(mut self, intraday: IntradaySpec) -> Self {
        self.intraday = Some(intraday);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_days < 2 {
            return Err(Error::Config(format!("n_days {} must be >= 2", self.n_days)));
        }
        match self.model {
            TruthModel::Sv(p) => {
                // sigma_eta_sq = 0 is allowed here: it gives a constant path.
                if !(p.mu.is_finite() && p.phi.abs() < 1.0 && p.sigma_eta_sq >= 0.0) {
                    return Err(Error::Config(format!("invalid SV parameters {p:?}")));
                }
            }
            TruthModel::Garch(p) => p.validate()?,
            TruthModel::Diffusion { daily_variance } => {
                if !(daily_variance > 0.0 && daily_variance.is_finite()) {
                    return Err(Error::Config(format!("daily_variance {daily_variance} must be > 0")));
                }
            }
        }
        if let Some(i) = &self.intraday {
            i.validate()?;
        }
        Ok(())
    }
}

/// Weekdays starting at `start` (or the next weekday).
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Latent SV path: `h_1` from the stationary law, then the AR(1) recursion.
fn sv_path(p: &SvParams, n: usize, rng: &mut StreamRng) -> Vec<f64> {
    let sd = p.sigma_eta_sq.sqrt();
    let stationary_sd = (p.sigma_eta_sq / (1.0 - p.phi * p.phi)).sqrt();
    let mut h = Vec::with_capacity(n);
    let mut cur = p.mu + stationary_sd * rng.sample::<f64, _>(StandardNormal);
    h.push(cur);
    for _ in 1..n {
        cur = p.mu + p.phi * (cur - p.mu) + sd * rng.sample::<f64, _>(StandardNormal);
        h.push(cur);
    }
    h
}

/// SV returns `y_t = exp(h_t / 2) eps_t` and the latent path that drove them.
pub fn gen_sv(spec: &SynthSpec) -> Result<(ReturnSeries, LatentPath)> {
    spec.validate()?;
    let TruthModel::Sv(p) = spec.model else {
        return Err(Error::Config("gen_sv needs an SV truth model".into()));
    };
    let mut rng = rng::stream(spec.seed, Stage::SimulateDaily);
    let h = sv_path(&p, spec.n_days, &mut rng);
    let y = h
        .iter()
        .map(|hi| (0.5 * hi).exp() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let series = ReturnSeries::new(spec.label.clone(), business_days(spec.start, spec.n_days), y)?;
    Ok((series, LatentPath::new(h)?))
}

/// GARCH(1,1) returns and their conditional variances, started at the
/// unconditional variance.
pub fn gen_garch(spec: &SynthSpec) -> Result<(ReturnSeries, Vec<f64>)> {
    spec.validate()?;
    let TruthModel::Garch(p) = spec.model else {
        return Err(Error::Config("gen_garch needs a GARCH truth model".into()));
    };
    let mut rng = rng::stream(spec.seed, Stage::SimulateDaily);
    let mut var = Vec::with_capacity(spec.n_days);
    let mut y = Vec::with_capacity(spec.n_days);
    let mut s2 = p.unconditional_variance();
    for _ in 0..spec.n_days {
        let r = s2.sqrt() * rng.sample::<f64, _>(StandardNormal);
        var.push(s2);
        y.push(r);
        s2 = p.omega + p.alpha * r * r + p.beta * s2;
    }
    let series = ReturnSeries::new(spec.label.clone(), business_days(spec.start, spec.n_days), y)?;
    Ok((series, var))
}

/// One simulated trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDay {
    pub day: IntradayDay,
    /// Overnight log-price jump before the open.
    pub overnight: f64,
    /// Efficient log-price change over each session.
    pub session_moves: Vec<f64>,
    /// Efficient log-price at the close.
    pub close_log_price: f64,
}

impl SimDay {
    /// Close-to-close efficient log-return of the day.
    pub fn daily_return(&self) -> f64 {
        self.overnight + self.session_moves.iter().sum::<f64>()
    }
}

/// Simulates one day of the log-price diffusion with total variance
/// `daily_variance`, of which `overnight_share` arrives in the overnight gap
/// and the rest spreads evenly over traded seconds.
pub fn gen_intraday_day(
    spec: &IntradaySpec,
    date: NaiveDate,
    daily_variance: f64,
    prev_close_log_price: f64,
    rng: &mut StreamRng,
) -> SimDay {
    let sessions = spec.calendar.sessions();
    let traded = spec.calendar.day_seconds() as f64;
    let spot_sd = ((1.0 - spec.overnight_share) * daily_variance / traded).sqrt();
    let overnight = (spec.overnight_share * daily_variance).sqrt() * rng.sample::<f64, _>(StandardNormal);
    let mut x = prev_close_log_price + overnight;
    let observe = |x: f64, rng: &mut StreamRng| {
        if spec.noise_std > 0.0 {
            (x + spec.noise_std * rng.sample::<f64, _>(StandardNormal)).exp()
        } else {
            x.exp()
        }
    };

    let mut buckets = Vec::with_capacity(sessions.len());
    let mut session_moves = Vec::with_capacity(sessions.len());
    for session in sessions {
        let len = session.seconds();
        let open_secs = chrono::Timelike::num_seconds_from_midnight(&session.open);
        let mut ticks = Vec::with_capacity((len / spec.tick_interval_secs + 2) as usize);
        let start = x;
        for s in 0..=len {
            if s > 0 {
                x += spot_sd * rng.sample::<f64, _>(StandardNormal);
            }
            if s % spec.tick_interval_secs == 0 || s == len {
                let time = NaiveTime::from_num_seconds_from_midnight_opt(open_secs + s, 0)
                    .expect("session inside the day");
                ticks.push(Tick {
                    time,
                    price: observe(x, rng),
                });
            }
        }
        session_moves.push(x - start);
        buckets.push(ticks);
    }
    SimDay {
        day: IntradayDay {
            date,
            sessions: buckets,
        },
        overnight,
        session_moves,
        close_log_price: x,
    }
}

/// Intraday panel for `dates` with per-day total variances, plus the implied
/// close-to-close daily returns.
pub fn gen_intraday(
    spec: &IntradaySpec,
    seed: u64,
    dates: &[NaiveDate],
    daily_variance: &[f64],
) -> Result<(IntradayPanel, ReturnSeries)> {
    spec.validate()?;
    if dates.len() != daily_variance.len() {
        return Err(Error::Contract(format!(
            "{} dates but {} variances",
            dates.len(),
            daily_variance.len()
        )));
    }
    let mut close = spec.initial_log_price;
    let mut days = Vec::with_capacity(dates.len());
    let mut returns = Vec::with_capacity(dates.len());
    for (i, (&date, &v)) in dates.iter().zip(daily_variance).enumerate() {
        let mut day_rng = rng::substream(seed, Stage::SimulateIntraday, i as u64);
        let sim = gen_intraday_day(spec, date, v, close, &mut day_rng);
        returns.push(sim.daily_return());
        close = sim.close_log_price;
        days.push(sim.day);
    }
    let panel = IntradayPanel::new(spec.calendar.clone(), days)?;
    Ok((panel, ReturnSeries::new("synthetic", dates.to_vec(), returns)?))
}

/// Output of [`simulate`]: observables plus the variance path that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub daily: ReturnSeries,
    pub true_variance: Vec<f64>,
    pub intraday: Option<IntradayPanel>,
}

impl Simulation {
    /// `date,true_h,true_variance`.
    pub fn truth_csv(&self) -> String {
        let mut out = String::from("date,true_h,true_variance\n");
        for (d, v) in self.daily.dates().iter().zip(&self.true_variance) {
            let _ = writeln!(out, "{},{},{v}", d.format("%Y-%m-%d"), v.ln());
        }
        out
    }
}

/// Runs the full generator. With an intraday layer the daily returns are the
/// close-to-close returns implied by the simulated prices; GARCH variances
/// then feed back from those returns.
pub fn simulate(spec: &SynthSpec) -> Result<Simulation> {
    spec.validate()?;
    let Some(intraday) = &spec.intraday else {
        let (daily, true_variance) = match spec.model {
            TruthModel::Sv(_) => {
                let (y, h) = gen_sv(spec)?;
                (y, h.h().iter().map(|v| v.exp()).collect())
            }
            TruthModel::Garch(_) => gen_garch(spec)?,
            TruthModel::Diffusion { daily_variance } => {
                let mut rng = rng::stream(spec.seed, Stage::SimulateDaily);
                let sd = daily_variance.sqrt();
                let y = (0..spec.n_days).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
                let dates = business_days(spec.start, spec.n_days);
                (ReturnSeries::new(spec.label.clone(), dates, y)?, vec![daily_variance; spec.n_days])
            }
        };
        return Ok(Simulation {
            daily,
            true_variance,
            intraday: None,
        });
    };

    let dates = business_days(spec.start, spec.n_days);
    let mut daily_rng = rng::stream(spec.seed, Stage::SimulateDaily);
    let sv_h = match spec.model {
        TruthModel::Sv(p) => Some(sv_path(&p, spec.n_days, &mut daily_rng)),
        _ => None,
    };
    let mut close = intraday.initial_log_price;
    let mut garch_state = match spec.model {
        TruthModel::Garch(p) => p.unconditional_variance(),
        _ => 0.0,
    };
    let mut days = Vec::with_capacity(spec.n_days);
    let mut returns = Vec::with_capacity(spec.n_days);
    let mut true_variance = Vec::with_capacity(spec.n_days);
    for (i, &date) in dates.iter().enumerate() {
        let v = match spec.model {
            TruthModel::Sv(_) => sv_h.as_ref().expect("sv path")[i].exp(),
            TruthModel::Garch(_) => garch_state,
            TruthModel::Diffusion { daily_variance } => daily_variance,
        };
        let mut day_rng = rng::substream(spec.seed, Stage::SimulateIntraday, i as u64);
        let sim = gen_intraday_day(intraday, date, v, close, &mut day_rng);
        let r = sim.daily_return();
        if let TruthModel::Garch(p) = spec.model {
            garch_state = p.omega + p.alpha * r * r + p.beta * garch_state;
        }
        close = sim.close_log_price;
        returns.push(r);
        true_variance.push(v);
        days.push(sim.day);
    }
    Ok(Simulation {
        daily: ReturnSeries::new(spec.label.clone(), dates, returns)?,
        true_variance,
        intraday: Some(IntradayPanel::new(intraday.calendar.clone(), days)?),
    })
}
