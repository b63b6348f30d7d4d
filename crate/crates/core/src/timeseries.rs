//! Daily return series, intraday price panels and exchange session calendars.
//!
//! Daily files are `date,return` or `date,close` CSV (detected from the
//! header). Intraday files are `date,time,price` CSV in local exchange time.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime, Timelike};

use crate::error::{Error, Result};
use crate::fsio::write_atomic;

const DATE_FMT: &str = "%Y-%m-%d";

/// Daily log-returns with their calendar dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Validation(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::Validation(format!(
                "return series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        check_strictly_increasing(&dates)?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite return {v} on {}",
                dates[i]
            )));
        }
        Ok(Self {
            label: label.into(),
            dates,
            values,
        })
    }

    /// Close-to-close log-returns `ln(p_t / p_{t-1})`; the first date is consumed.
    pub fn from_closes(label: impl Into<String>, dates: &[NaiveDate], closes: &[f64]) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::Validation(format!(
                "{} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        check_strictly_increasing(dates)?;
        if let Some((i, p)) = closes.iter().enumerate().find(|(_, p)| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::Validation(format!("price {p} on {} is not positive", dates[i])));
        }
        let values = closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        Self::new(label, dates.get(1..).unwrap_or_default().to_vec(), values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,return\n");
        for (d, v) in self.dates.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", d.format(DATE_FMT), v);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

fn check_strictly_increasing(dates: &[NaiveDate]) -> Result<()> {
    for w in dates.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Validation(format!(
                "dates must be strictly increasing: {} followed by {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Which value column a daily file carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DailyColumn {
    /// Decide from the header (`return` or `close`).
    #[default]
    Auto,
    Return,
    Close,
}

pub fn load_daily_returns(path: &Path, column: DailyColumn) -> Result<ReturnSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_col = find("date").ok_or_else(|| Error::Parse {
        path: path.to_owned(),
        line: 1,
        msg: "missing `date` column".into(),
    })?;
    let (value_col, is_close) = match (column, find("return"), find("close")) {
        (DailyColumn::Return | DailyColumn::Auto, Some(c), _) => (c, false),
        (DailyColumn::Close | DailyColumn::Auto, _, Some(c)) => (c, true),
        _ => {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: 1,
                msg: "expected a `return` or `close` column".into(),
            })
        }
    };

    let mut dates = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(date_col), DATE_FMT).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line,
            msg: format!("bad date {:?}: {e}", field(date_col)),
        })?;
        let value = f64::from_str(field(value_col)).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line,
            msg: format!("bad number {:?}: {e}", field(value_col)),
        })?;
        dates.push(date);
        values.push(value);
    }

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if is_close {
        ReturnSeries::from_closes(label, &dates, &values)
    } else {
        ReturnSeries::new(label, dates, values)
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Parse {
            path: path.to_owned(),
            line,
            msg: format!("{kind:?}"),
        },
    }
}

/// One continuous trading session, `open <= t <= close`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Session {
    pub open: NaiveTime,
    pub close: NaiveTime,
}

impl Session {
    pub fn new(open: NaiveTime, close: NaiveTime) -> Result<Self> {
        if open >= close {
            return Err(Error::Validation(format!("session {open}-{close} has open >= close")));
        }
        Ok(Self { open, close })
    }

    pub fn contains(&self, t: NaiveTime) -> bool {
        self.open <= t && t <= self.close
    }

    pub fn seconds(&self) -> u32 {
        self.close.num_seconds_from_midnight() - self.open.num_seconds_from_midnight()
    }
}

impl FromStr for Session {
    type Err = Error;

    /// Parses `HH:MM-HH:MM`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| Error::Config(format!("session {s:?} is not HH:MM-HH:MM")))?;
        let parse = |t: &str| {
            NaiveTime::parse_from_str(t.trim(), "%H:%M")
                .map_err(|e| Error::Config(format!("session {s:?}: {e}")))
        };
        Session::new(parse(a)?, parse(b)?)
    }
}

impl std::fmt::Display for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.open.format("%H:%M"), self.close.format("%H:%M"))
    }
}

/// Trading sessions of one exchange day, in clock order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionCalendar {
    sessions: Vec<Session>,
}

impl SessionCalendar {
    pub fn new(mut sessions: Vec<Session>) -> Result<Self> {
        if sessions.is_empty() {
            return Err(Error::Validation("calendar needs at least one session".into()));
        }
        sessions.sort_by_key(|s| s.open);
        for w in sessions.windows(2) {
            if w[1].open <= w[0].close {
                return Err(Error::Validation(format!("sessions {} and {} overlap", w[0], w[1])));
            }
        }
        Ok(Self { sessions })
    }

    pub fn parse<S: AsRef<str>>(specs: &[S]) -> Result<Self> {
        let sessions = specs
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<Session>>>()?;
        Self::new(sessions)
    }

    /// Tokyo Stock Exchange: morning 9:00-11:00, afternoon 12:30-15:00.
    pub fn tokyo() -> Self {
        Self::parse(&["09:00-11:00", "12:30-15:00"]).expect("static calendar")
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    /// Total traded time per day in seconds.
    pub fn day_seconds(&self) -> u32 {
        self.sessions.iter().map(Session::seconds).sum()
    }

    pub fn session_of(&self, t: NaiveTime) -> Option<usize> {
        self.sessions.iter().position(|s| s.contains(t))
    }
}

impl Default for SessionCalendar {
    fn default() -> Self {
        Self::tokyo()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub time: NaiveTime,
    pub price: f64,
}

/// One trading day's observations, split by session.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayDay {
    pub date: NaiveDate,
    /// `sessions[k]` holds the ticks inside calendar session `k`.
    pub sessions: Vec<Vec<Tick>>,
}

impl IntradayDay {
    pub fn tick_count(&self) -> usize {
        self.sessions.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayWarning {
    pub date: NaiveDate,
    pub message: String,
}

/// Intraday prices over many days, restricted to calendar sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayPanel {
    calendar: SessionCalendar,
    days: Vec<IntradayDay>,
    dropped: usize,
    warnings: Vec<DayWarning>,
}

impl IntradayPanel {
    /// Validates `days` against `calendar`. Days with an empty session are
    /// moved out of the panel and reported as warnings.
    pub fn new(calendar: SessionCalendar, days: Vec<IntradayDay>) -> Result<Self> {
        let mut kept = Vec::with_capacity(days.len());
        let mut warnings = Vec::new();
        let mut prev_date: Option<NaiveDate> = None;
        for day in days {
            if prev_date.is_some_and(|d| day.date <= d) {
                return Err(Error::Validation(format!("intraday day {} out of order", day.date)));
            }
            prev_date = Some(day.date);
            if day.sessions.len() != calendar.sessions().len() {
                return Err(Error::Validation(format!(
                    "{}: {} session buckets for a {}-session calendar",
                    day.date,
                    day.sessions.len(),
                    calendar.sessions().len()
                )));
            }
            for (k, ticks) in day.sessions.iter().enumerate() {
                let session = calendar.sessions()[k];
                for w in ticks.windows(2) {
                    if w[1].time <= w[0].time {
                        return Err(Error::Validation(format!(
                            "{}: timestamps not increasing at {}",
                            day.date, w[1].time
                        )));
                    }
                }
                if let Some(t) = ticks.iter().find(|t| !session.contains(t.time)) {
                    return Err(Error::Validation(format!(
                        "{}: tick at {} outside session {session}",
                        day.date, t.time
                    )));
                }
                if let Some(t) = ticks.iter().find(|t| !(t.price > 0.0 && t.price.is_finite())) {
                    return Err(Error::Validation(format!(
                        "{}: non-positive price {} at {}",
                        day.date, t.price, t.time
                    )));
                }
            }
            if let Some(k) = day.sessions.iter().position(Vec::is_empty) {
                warnings.push(DayWarning {
                    date: day.date,
                    message: format!("session {} has no observations; day excluded", calendar.sessions()[k]),
                });
                continue;
            }
            kept.push(day);
        }
        Ok(Self {
            calendar,
            days: kept,
            dropped: 0,
            warnings,
        })
    }

    pub fn calendar(&self) -> &SessionCalendar {
        &self.calendar
    }

    pub fn days(&self) -> &[IntradayDay] {
        &self.days
    }

    /// Observations discarded at load time for falling outside every session.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn warnings(&self) -> &[DayWarning] {
        &self.warnings
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,time,price\n");
        for day in &self.days {
            let date = day.date.format(DATE_FMT).to_string();
            for tick in day.sessions.iter().flatten() {
                let _ = writeln!(out, "{date},{},{}", tick.time.format("%H:%M:%S"), tick.price);
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Loads `date,time,price` records, keeping only ticks inside `calendar`'s sessions.
pub fn load_intraday(path: &Path, calendar: &SessionCalendar) -> Result<IntradayPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                path: path.to_owned(),
                line: 1,
                msg: format!("missing `{name}` column"),
            })
    };
    let (date_col, time_col, price_col) = (col("date")?, col("time")?, col("price")?);

    let n_sessions = calendar.sessions().len();
    let mut days: Vec<IntradayDay> = Vec::new();
    let mut last: Option<(NaiveDate, NaiveTime)> = None;
    let mut dropped = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_err = |msg: String| Error::Parse {
            path: path.to_owned(),
            line,
            msg,
        };
        let date = NaiveDate::parse_from_str(field(date_col), DATE_FMT)
            .map_err(|e| parse_err(format!("bad date {:?}: {e}", field(date_col))))?;
        let time = parse_clock(field(time_col))
            .ok_or_else(|| parse_err(format!("bad time {:?}", field(time_col))))?;
        let price = f64::from_str(field(price_col))
            .map_err(|e| parse_err(format!("bad price {:?}: {e}", field(price_col))))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(parse_err(format!("price {price} is not positive")));
        }
        if let Some(prev) = last {
            if (date, time) <= prev {
                return Err(Error::Validation(format!(
                    "line {line}: timestamp {date} {time} not after {} {}",
                    prev.0, prev.1
                )));
            }
        }
        last = Some((date, time));

        let Some(k) = calendar.session_of(time) else {
            dropped += 1;
            continue;
        };
        if days.last().is_none_or(|d| d.date != date) {
            days.push(IntradayDay {
                date,
                sessions: vec![Vec::new(); n_sessions],
            });
        }
        let day = days.last_mut().expect("pushed above");
        day.sessions[k].push(Tick { time, price });
    }

    let mut panel = IntradayPanel::new(calendar.clone(), days)?;
    panel.dropped = dropped;
    Ok(panel)
}

fn parse_clock(s: &str) -> Option<NaiveTime> {
    NaiveTime::parse_from_str(s, "%H:%M:%S")
        .or_else(|_| NaiveTime::parse_from_str(s, "%H:%M"))
        .ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FMT).unwrap()
    }

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn closes_become_log_returns() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "date,close\n2020-01-01,100\n2020-01-02,110\n2020-01-03,100\n");
        let r = load_daily_returns(&p, DailyColumn::Auto).unwrap();
        assert_eq!(r.dates(), &[d("2020-01-02"), d("2020-01-03")]);
        assert_eq!(r.values()[0], (1.1f64).ln());
        assert_eq!(r.values()[1], (100.0f64 / 110.0).ln());
    }

    #[test]
    fn constant_price_gives_zero_returns() {
        let dates = [d("2020-01-01"), d("2020-01-02"), d("2020-01-03")];
        let r = ReturnSeries::from_closes("x", &dates, &[100.0, 100.0, 100.0]).unwrap();
        assert_eq!(r.values(), &[0.0, 0.0]);
    }

    #[test]
    fn duplicate_date_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "date,return\n2020-01-01,0.1\n2020-01-01,0.2\n2020-01-02,0.0\n");
        assert!(matches!(load_daily_returns(&p, DailyColumn::Auto), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_record_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "date,return\n2020-01-01,0.1\n2020-01-02,abc\n");
        match load_daily_returns(&p, DailyColumn::Auto) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_column_choice_is_honoured() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "date,return\n2020-01-01,0.1\n2020-01-02,0.2\n");
        assert!(load_daily_returns(&p, DailyColumn::Close).is_err());
        assert_eq!(load_daily_returns(&p, DailyColumn::Return).unwrap().len(), 2);
    }

    #[test]
    fn two_ticks_in_morning_session() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "i.csv", "date,time,price\n2020-01-06,09:00:00,100\n2020-01-06,10:00:00,101\n");
        let cal = SessionCalendar::parse(&["09:00-11:00"]).unwrap();
        let panel = load_intraday(&p, &cal).unwrap();
        assert_eq!(panel.days().len(), 1);
        assert_eq!(panel.days()[0].tick_count(), 2);
        assert_eq!(panel.dropped(), 0);
    }

    #[test]
    fn lunch_break_tick_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let body = "date,time,price\n2020-01-06,09:00,100\n2020-01-06,10:00,101\n\
                    2020-01-06,11:30,102\n2020-01-06,12:30,101\n2020-01-06,15:00,100\n";
        let p = write(&dir, "i.csv", body);
        let panel = load_intraday(&p, &SessionCalendar::tokyo()).unwrap();
        assert_eq!(panel.dropped(), 1);
        assert_eq!(panel.days()[0].tick_count(), 4);
    }

    #[test]
    fn out_of_order_ticks_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "i.csv", "date,time,price\n2020-01-06,10:00,100\n2020-01-06,09:30,101\n");
        assert!(matches!(
            load_intraday(&p, &SessionCalendar::tokyo()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn empty_session_excludes_day_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "i.csv", "date,time,price\n2020-01-06,09:00,100\n2020-01-06,10:00,101\n");
        let panel = load_intraday(&p, &SessionCalendar::tokyo()).unwrap();
        assert!(panel.days().is_empty());
        assert_eq!(panel.warnings().len(), 1);
        assert_eq!(panel.warnings()[0].date, d("2020-01-06"));
    }

    #[test]
    fn calendar_rejects_overlap_and_inverted_sessions() {
        assert!(SessionCalendar::parse(&["09:00-11:00", "10:30-12:00"]).is_err());
        assert!("11:00-09:00".parse::<Session>().is_err());
        assert_eq!(SessionCalendar::tokyo().day_seconds(), (120 + 150) * 60);
    }

    #[test]
    fn intraday_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let body = "date,time,price\n2020-01-06,09:00:00,100\n2020-01-06,11:00:00,100.5\n\
                    2020-01-06,12:30:00,101.25\n2020-01-06,15:00:00,99.75\n";
        let p = write(&dir, "i.csv", body);
        let panel = load_intraday(&p, &SessionCalendar::tokyo()).unwrap();
        assert_eq!(panel.to_csv(), body);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn series() -> impl Strategy<Value = (Vec<f64>, u32)> {
            (prop::collection::vec(-0.2f64..0.2, 2..60), 0u32..5000)
        }

        proptest! {
            #[test]
            fn daily_csv_round_trip_is_bit_exact((vals, offset) in series()) {
                let start = d("2000-01-03") + chrono::Days::new(offset as u64);
                let dates: Vec<_> = (0..vals.len()).map(|i| start + chrono::Days::new(i as u64)).collect();
                let r = ReturnSeries::new("p", dates, vals).unwrap();
                let dir = tempfile::tempdir().unwrap();
                let path = dir.path().join("p.csv");
                r.write_csv(&path).unwrap();
                let back = load_daily_returns(&path, DailyColumn::Auto).unwrap();
                prop_assert_eq!(back.dates(), r.dates());
                let same = back.values().iter().zip(r.values()).all(|(a, b)| a.to_bits() == b.to_bits());
                prop_assert!(same);
            }

            #[test]
            fn cumulative_returns_reconstruct_final_price(
                moves in prop::collection::vec(-0.1f64..0.1, 2..200),
                p0 in 1.0f64..1000.0,
            ) {
                let mut closes = vec![p0];
                for m in &moves {
                    let last = *closes.last().unwrap();
                    closes.push(last * m.exp());
                }
                let dates: Vec<_> = (0..closes.len()).map(|i| d("2001-01-01") + chrono::Days::new(i as u64)).collect();
                let r = ReturnSeries::from_closes("c", &dates, &closes).unwrap();
                let rebuilt = p0 * r.values().iter().sum::<f64>().exp();
                let last = *closes.last().unwrap();
                prop_assert!(((rebuilt - last) / last).abs() < 1e-12);
            }
        }
    }
}
