//! Realized variance from intraday prices, the Hansen-Lunde scale factor,
//! and sampling-interval sweeps.
//!
//! Prices are sampled on a `delta`-minute grid inside each session by
//! previous tick; returns never span the gap between sessions, so RV covers
//! traded hours only and the scale factor absorbs the rest of the day.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{NaiveDate, NaiveTime, Timelike};

use crate::error::{Error, Result};
use crate::fsio::write_atomic;
use crate::timeseries::{DayWarning, IntradayPanel, ReturnSeries, Session, Tick};

/// Sampling intervals (minutes) swept by default.
pub const DEFAULT_DELTAS: [u32; 7] = [1, 2, 3, 5, 10, 15, 20];

/// Per-day intraday log-returns at one sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayReturns {
    pub interval_secs: u32,
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<Vec<f64>>,
    pub excluded: Vec<DayWarning>,
}

/// Previous-tick prices on the session grid `open, open + delta, ...` up to
/// the close. Grid points before the first tick are skipped.
fn session_grid_prices(session: &Session, ticks: &[Tick], delta_secs: u32) -> Vec<f64> {
    let open = session.open.num_seconds_from_midnight();
    let n_points = session.seconds() / delta_secs + 1;
    let mut out = Vec::with_capacity(n_points as usize);
    let mut idx = 0usize;
    let mut last: Option<f64> = None;
    for k in 0..n_points {
        let grid = open + k * delta_secs;
        while idx < ticks.len() && ticks[idx].time.num_seconds_from_midnight() <= grid {
            last = Some(ticks[idx].price);
            idx += 1;
        }
        if let Some(p) = last {
            out.push(p);
        }
    }
    out
}

pub fn intraday_returns(panel: &IntradayPanel, delta_min: u32) -> Result<IntradayReturns> {
    if delta_min == 0 {
        return Err(Error::Contract("sampling interval must be >= 1 minute".into()));
    }
    intraday_returns_secs(panel, delta_min * 60)
}

/// Same as [`intraday_returns`] with the interval in seconds.
pub fn intraday_returns_secs(panel: &IntradayPanel, delta_secs: u32) -> Result<IntradayReturns> {
    if delta_secs == 0 {
        return Err(Error::Contract("sampling interval must be >= 1 second".into()));
    }
    let sessions = panel.calendar().sessions();
    let mut out = IntradayReturns {
        interval_secs: delta_secs,
        dates: Vec::with_capacity(panel.days().len()),
        returns: Vec::with_capacity(panel.days().len()),
        excluded: Vec::new(),
    };
    for day in panel.days() {
        let mut rets = Vec::new();
        let mut usable = false;
        for (session, ticks) in sessions.iter().zip(&day.sessions) {
            let prices = session_grid_prices(session, ticks, delta_secs);
            if prices.len() >= 2 {
                usable = true;
            }
            rets.extend(prices.windows(2).map(|w| (w[1] / w[0]).ln()));
        }
        if usable {
            out.dates.push(day.date);
            out.returns.push(rets);
        } else {
            out.excluded.push(DayWarning {
                date: day.date,
                message: format!("fewer than 2 grid points in every session at {delta_secs} s"),
            });
        }
    }
    Ok(out)
}

/// Realized variance per day at one sampling interval, with its scale factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RvSeries {
    pub dates: Vec<NaiveDate>,
    pub rv: Vec<f64>,
    pub interval_min: u32,
    /// Hansen-Lunde factor; 1 until [`apply_hl_factor`] sets it.
    pub hl_factor: f64,
    /// `hl_factor * rv` per day.
    pub adjusted: Vec<f64>,
    pub excluded: Vec<DayWarning>,
}

impl RvSeries {
    pub fn mean_rv(&self) -> f64 {
        self.rv.iter().sum::<f64>() / self.rv.len() as f64
    }

    /// `date,rv,c_rv`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,rv,c_rv\n");
        for ((d, r), a) in self.dates.iter().zip(&self.rv).zip(&self.adjusted) {
            let _ = writeln!(out, "{},{r},{a}", d.format("%Y-%m-%d"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    fn set_factor(&mut self, c: f64) {
        self.hl_factor = c;
        self.adjusted = self.rv.iter().map(|r| c * r).collect();
    }
}

/// Reads a file written by [`RvSeries::write_csv`]. The scale factor is
/// recovered as `sum(c_rv) / sum(rv)`.
pub fn load_rv(path: &Path, interval_min: u32) -> Result<RvSeries> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
        path: path.to_owned(),
        line: 0,
        msg: e.to_string(),
    })?;
    let mut out = RvSeries {
        dates: Vec::new(),
        rv: Vec::new(),
        interval_min,
        hl_factor: f64::NAN,
        adjusted: Vec::new(),
        excluded: Vec::new(),
    };
    for rec in reader.records() {
        let err = |line: u64, msg: String| Error::Parse {
            path: path.to_owned(),
            line,
            msg,
        };
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(err(line, format!("expected 3 fields, got {}", rec.len())));
        }
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| err(line, format!("bad date {:?}: {e}", &rec[0])))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| err(line, format!("bad number {s:?}: {e}")));
        out.dates.push(date);
        out.rv.push(num(&rec[1])?);
        out.adjusted.push(num(&rec[2])?);
    }
    let total: f64 = out.rv.iter().sum();
    if total > 0.0 {
        out.hl_factor = out.adjusted.iter().sum::<f64>() / total;
    }
    Ok(out)
}

/// Sum of squared intraday returns per day.
pub fn realized_volatility(panel: &IntradayPanel, delta_min: u32) -> Result<RvSeries> {
    let r = intraday_returns(panel, delta_min)?;
    let rv: Vec<f64> = r.returns.iter().map(|d| d.iter().map(|x| x * x).sum()).collect();
    Ok(RvSeries {
        dates: r.dates,
        adjusted: rv.clone(),
        rv,
        interval_min: delta_min,
        hl_factor: 1.0,
        excluded: r.excluded,
    })
}

/// `c = sum (R_t - mean R)^2 / sum RV_t` over the dates both series share.
pub fn hl_factor(daily: &ReturnSeries, rv: &RvSeries) -> Result<f64> {
    let index: HashMap<NaiveDate, f64> = daily
        .dates()
        .iter()
        .copied()
        .zip(daily.values().iter().copied())
        .collect();
    let (mut returns, mut rvs) = (Vec::new(), Vec::new());
    for (d, v) in rv.dates.iter().zip(&rv.rv) {
        if let Some(r) = index.get(d) {
            returns.push(*r);
            rvs.push(*v);
        }
    }
    if returns.is_empty() {
        return Err(Error::Validation("daily returns and RV share no dates".into()));
    }
    let total_rv: f64 = rvs.iter().sum();
    if !(total_rv > 0.0) {
        return Err(Error::Validation(format!(
            "total realized variance at {} min is zero",
            rv.interval_min
        )));
    }
    let mean = returns.iter().sum::<f64>() / returns.len() as f64;
    let ss: f64 = returns.iter().map(|r| (r - mean).powi(2)).sum();
    Ok(ss / total_rv)
}

/// Computes the scale factor and stores it, with the adjusted series, on `rv`.
pub fn apply_hl_factor(daily: &ReturnSeries, rv: &mut RvSeries) -> Result<f64> {
    let c = hl_factor(daily, rv)?;
    rv.set_factor(c);
    Ok(c)
}

/// Adjusted RV at `delta_min`.
pub fn adjusted_rv(panel: &IntradayPanel, daily: &ReturnSeries, delta_min: u32) -> Result<RvSeries> {
    let mut rv = realized_volatility(panel, delta_min)?;
    apply_hl_factor(daily, &mut rv)?;
    Ok(rv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureRow {
    pub delta_min: u32,
    pub mean_rv: f64,
    pub hl_factor: f64,
}

/// Mean RV and scale factor for each sampling interval.
pub fn signature_sweep(panel: &IntradayPanel, daily: &ReturnSeries, deltas: &[u32]) -> Result<Vec<SignatureRow>> {
    if deltas.is_empty() {
        return Err(Error::Contract("signature sweep needs at least one interval".into()));
    }
    deltas
        .iter()
        .map(|&d| {
            let rv = adjusted_rv(panel, daily, d)?;
            Ok(SignatureRow {
                delta_min: d,
                mean_rv: rv.mean_rv(),
                hl_factor: rv.hl_factor,
            })
        })
        .collect()
}

/// `delta_min,mean_rv,hl_factor`.
pub fn signature_csv(rows: &[SignatureRow]) -> String {
    let mut out = String::from("delta_min,mean_rv,hl_factor\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.delta_min, r.mean_rv, r.hl_factor);
    }
    out
}

/// Grid times of one session, exposed for inspection and tests.
pub fn session_grid(session: &Session, delta_min: u32) -> Vec<NaiveTime> {
    let open = session.open.num_seconds_from_midnight();
    (0..=session.seconds() / (delta_min * 60))
        .map(|k| NaiveTime::from_num_seconds_from_midnight_opt(open + k * delta_min * 60, 0).expect("in day"))
        .collect()
}
