//! End to end: SV data with intraday prices, both models fitted, RMSPE
//! against scaled realized variance at each sampling interval.
//!
//! cargo run --release --example rank_models

use svhmc::realized::DEFAULT_DELTAS;
use svhmc::synth::IntradaySpec;
use svhmc::{adjusted_rv, compare, run_garch_fit, run_sv_fit, simulate};
use svhmc::{GarchFitConfig, SvFitConfig, SvParams, SynthSpec, TruthModel};

fn main() -> svhmc::Result<()> {
    let truth = SvParams::new(-7.87, 0.975, 0.045)?;
    let spec = SynthSpec::new(TruthModel::Sv(truth), 500, 21).with_intraday(IntradaySpec {
        tick_interval_secs: 10,
        noise_std: 6e-4,
        overnight_share: 0.5,
        ..IntradaySpec::default()
    });
    let sim = simulate(&spec)?;
    let panel = sim.intraday.as_ref().expect("intraday layer");

    let sv = run_sv_fit(&sim.daily, &SvFitConfig { n_burn: 2_000, n_keep: 8_000, seed: 21, ..Default::default() })?;
    let garch = run_garch_fit(&sim.daily, &GarchFitConfig { n_burn: 2_000, n_keep: 8_000, seed: 21, ..Default::default() })?;

    let rvs = DEFAULT_DELTAS
        .iter()
        .map(|&d| adjusted_rv(panel, &sim.daily, d))
        .collect::<svhmc::Result<Vec<_>>>()?;
    let (sv_path, garch_path) = (sv.volatility(), garch.volatility());
    let table = compare(&[("sv", &sv_path), ("garch", &garch_path)], &rvs)?;
    print!("{}", table.summary());
    for m in ["sv", "garch"] {
        println!("{m}: lowest RMSPE at {} min", table.best_delta(m).unwrap_or(0));
    }
    Ok(())
}
