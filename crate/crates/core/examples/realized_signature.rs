//! Realized variance across sampling intervals with and without
//! microstructure noise, and the scale factor that maps it to daily variance.
//!
//! cargo run --release --example realized_signature

use svhmc::realized::{signature_sweep, DEFAULT_DELTAS};
use svhmc::synth::{business_days, gen_intraday, IntradaySpec};
use svhmc::SessionCalendar;

fn main() -> svhmc::Result<()> {
    let dates = business_days(chrono::NaiveDate::from_ymd_opt(2005, 1, 3).unwrap(), 500);
    let variances = vec![1.5e-4; dates.len()];
    for noise in [0.0, 5e-4] {
        let spec = IntradaySpec {
            calendar: SessionCalendar::tokyo(),
            tick_interval_secs: 10,
            noise_std: noise,
            overnight_share: 0.4,
            ..IntradaySpec::default()
        };
        let (panel, daily) = gen_intraday(&spec, 3, &dates, &variances)?;
        println!("noise sd {noise:e}");
        println!("  delta  mean RV      c");
        for row in signature_sweep(&panel, &daily, &DEFAULT_DELTAS)? {
            println!("  {:>5}  {:.3e}  {:.3}", row.delta_min, row.mean_rv, row.hl_factor);
        }
    }
    Ok(())
}
