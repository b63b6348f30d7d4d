//! Accuracy of model variance paths against scaled realized variance.

use std::collections::HashMap;
use std::fmt::Write as _;

use chrono::NaiveDate;

use crate::chain::VolatilityPath;
use crate::error::{Error, Result};
use crate::realized::RvSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rmspe {
    pub value: f64,
    pub n_days: usize,
}

fn range(dates: &[NaiveDate]) -> String {
    match (dates.first(), dates.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => "empty".into(),
    }
}

/// `sqrt(mean(((model_t - cRV_t) / cRV_t)^2))` over the dates both carry.
pub fn rmspe(model: &VolatilityPath, rv: &RvSeries) -> Result<Rmspe> {
    let proxy: HashMap<NaiveDate, f64> = rv.dates.iter().copied().zip(rv.adjusted.iter().copied()).collect();
    let mut ss = 0.0;
    let mut n = 0usize;
    for (d, m) in model.dates.iter().zip(&model.mean) {
        let Some(&c_rv) = proxy.get(d) else { continue };
        if !(c_rv > 0.0) {
            return Err(Error::Validation(format!(
                "adjusted RV at {} min is {c_rv} on {d}",
                rv.interval_min
            )));
        }
        ss += ((m - c_rv) / c_rv).powi(2);
        n += 1;
    }
    if n == 0 {
        return Err(Error::Validation(format!(
            "model dates {} and RV dates {} do not overlap",
            range(&model.dates),
            range(&rv.dates)
        )));
    }
    Ok(Rmspe {
        value: (ss / n as f64).sqrt(),
        n_days: n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub model: String,
    pub delta_min: u32,
    pub rmspe: f64,
    pub n_days: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn get(&self, model: &str, delta_min: u32) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.model == model && r.delta_min == delta_min)
    }

    pub fn deltas(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.rows.iter().map(|r| r.delta_min).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Lowest-RMSPE model at `delta_min`; ties go to the first listed.
    pub fn winner(&self, delta_min: u32) -> Option<&ScoreRow> {
        self.rows
            .iter()
            .filter(|r| r.delta_min == delta_min)
            .fold(None, |best: Option<&ScoreRow>, r| match best {
                Some(b) if b.rmspe <= r.rmspe => Some(b),
                _ => Some(r),
            })
    }

    /// Interval at which `model` scores best.
    pub fn best_delta(&self, model: &str) -> Option<u32> {
        self.rows
            .iter()
            .filter(|r| r.model == model)
            .min_by(|a, b| a.rmspe.total_cmp(&b.rmspe))
            .map(|r| r.delta_min)
    }

    /// `model,delta_min,rmspe,n_days`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,delta_min,rmspe,n_days\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.model, r.delta_min, r.rmspe, r.n_days);
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for d in self.deltas() {
            let cells: Vec<String> = self
                .rows
                .iter()
                .filter(|r| r.delta_min == d)
                .map(|r| format!("{}={:.4}", r.model, r.rmspe))
                .collect();
            let win = self.winner(d).map(|r| r.model.as_str()).unwrap_or("-");
            let _ = writeln!(out, "delta {d:>2} min: {} -> {win}", cells.join("  "));
        }
        out
    }
}

/// RMSPE of every model at every sampling interval.
pub fn compare(models: &[(&str, &VolatilityPath)], rvs: &[RvSeries]) -> Result<ScoreTable> {
    let mut rows = Vec::with_capacity(models.len() * rvs.len());
    for rv in rvs {
        for (name, path) in models {
            let score = rmspe(path, rv)?;
            rows.push(ScoreRow {
                model: (*name).to_string(),
                delta_min: rv.interval_min,
                rmspe: score.value,
                n_days: score.n_days,
            });
        }
    }
    Ok(ScoreTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dates(n: usize) -> Vec<NaiveDate> {
        (0..n as u64)
            .map(|i| NaiveDate::from_ymd_opt(2021, 2, 1).unwrap() + chrono::Days::new(i))
            .collect()
    }

    fn rv(adjusted: &[f64], delta: u32) -> RvSeries {
        RvSeries {
            dates: dates(adjusted.len()),
            rv: adjusted.to_vec(),
            interval_min: delta,
            hl_factor: 1.0,
            adjusted: adjusted.to_vec(),
            excluded: vec![],
        }
    }

    fn path(values: &[f64]) -> VolatilityPath {
        VolatilityPath {
            dates: dates(values.len()),
            mean: values.to_vec(),
            sd: vec![0.0; values.len()],
        }
    }

    #[test]
    fn perfect_and_doubled_paths() {
        let c = [1e-4, 3e-4, 2e-4];
        assert_eq!(rmspe(&path(&c), &rv(&c, 5)).unwrap().value, 0.0);
        let doubled: Vec<f64> = c.iter().map(|v| 2.0 * v).collect();
        assert!((rmspe(&path(&doubled), &rv(&c, 5)).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_ratios() {
        let c = [1.0, 2.0, 4.0];
        let m = [1.1, 1.8, 4.0];
        let want = ((0.01 + 0.01 + 0.0) / 3.0f64).sqrt();
        assert!((rmspe(&path(&m), &rv(&c, 5)).unwrap().value - want).abs() < 1e-12);
    }

    #[test]
    fn zero_proxy_and_disjoint_dates_error() {
        match rmspe(&path(&[1.0, 1.0]), &rv(&[1.0, 0.0], 5)) {
            Err(Error::Validation(msg)) => assert!(msg.contains("2021-02-02")),
            other => panic!("{other:?}"),
        }
        let mut late = rv(&[1.0, 1.0], 5);
        late.dates = vec![NaiveDate::from_ymd_opt(2030, 1, 1).unwrap(), NaiveDate::from_ymd_opt(2030, 1, 2).unwrap()];
        assert!(rmspe(&path(&[1.0, 1.0]), &late).is_err());
    }

    #[test]
    fn alignment_uses_date_intersection() {
        let mut short = rv(&[2.0, 2.0], 5);
        short.dates = dates(3)[1..].to_vec();
        let score = rmspe(&path(&[100.0, 2.0, 2.0]), &short).unwrap();
        assert_eq!(score.n_days, 2);
        assert_eq!(score.value, 0.0);
    }

    #[test]
    fn compare_flags_winners() {
        let c = [1.0, 2.0, 3.0];
        let good = path(&[1.1, 2.0, 3.0]);
        let bad = path(&[2.0, 4.0, 6.0]);
        let table = compare(&[("sv", &good), ("garch", &bad)], &[rv(&c, 1), rv(&c, 5)]).unwrap();
        assert_eq!(table.rows.len(), 4);
        assert_eq!(table.winner(5).unwrap().model, "sv");
        assert!(table.to_csv().starts_with("model,delta_min,rmspe,n_days\n"));
        assert!(table.summary().contains("-> sv"));

        let twins = compare(&[("a", &good), ("b", &good)], &[rv(&c, 5)]).unwrap();
        assert_eq!(twins.rows[0].rmspe, twins.rows[1].rmspe);

        let single = compare(&[("sv", &good)], &[rv(&c, 5)]).unwrap();
        assert_eq!(single.rows[0].rmspe, rmspe(&good, &rv(&c, 5)).unwrap().value);
    }

    proptest! {
        #[test]
        fn scale_invariant_and_positive_when_different(
            vals in prop::collection::vec((1e-6f64..1e-2, 1e-6f64..1e-2), 1..50),
            k in 1e-3f64..1e3,
        ) {
            let (m, c): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
            let base = rmspe(&path(&m), &rv(&c, 5)).unwrap().value;
            let ms: Vec<f64> = m.iter().map(|v| v * k).collect();
            let cs: Vec<f64> = c.iter().map(|v| v * k).collect();
            let scaled = rmspe(&path(&ms), &rv(&cs, 5)).unwrap().value;
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
            if m.iter().zip(&c).any(|(a, b)| a != b) {
                prop_assert!(base > 0.0);
            }
        }
    }
}
