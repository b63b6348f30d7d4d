//! Simulate daily returns from the SV model and write them with the truth.
//!
//! cargo run --example simulate_sv -- [out_dir]

use std::path::PathBuf;

use svhmc::diagnostics::{mean, sample_variance};
use svhmc::fsio::write_atomic;
use svhmc::{simulate, SvParams, SynthSpec, TruthModel};

fn main() -> svhmc::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/simulate_sv".into()));
    let truth = SvParams::new(-7.87, 0.975, 0.045)?;
    let spec = SynthSpec::new(TruthModel::Sv(truth), 2000, 42);
    let sim = simulate(&spec)?;

    let y = sim.daily.values();
    let kurt = {
        let m = mean(y);
        let v = sample_variance(y);
        y.iter().map(|r| (r - m).powi(4)).sum::<f64>() / y.len() as f64 / (v * v)
    };
    println!("days            {}", y.len());
    println!("return sd       {:.5}", sample_variance(y).sqrt());
    println!("kurtosis        {kurt:.2}  (3 for a Gaussian)");
    println!("var(h)          {:.3}", truth.stationary_variance());
    println!("mean exp(h)     {:.3e}", mean(&sim.true_variance));

    sim.daily.write_csv(&out.join("daily.csv"))?;
    write_atomic(&out.join("truth.csv"), sim.truth_csv().as_bytes())?;
    println!("wrote {}/daily.csv and truth.csv", out.display());
    Ok(())
}
