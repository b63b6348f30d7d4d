//! Integrated autocorrelation time and standard errors on an AR(1) trace.
//!
//! cargo run --release --example diagnostics_table

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use svhmc::diagnostics::{acf, jackknife_se, summarize, tau_int};

fn main() -> svhmc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:>5} {:>9} {:>14} {:>8} {:>10} {:>10}", "rho", "exact", "tau_int", "window", "se", "jackknife");
    for rho in [0.0, 0.5, 0.9, 0.99] {
        let mut x = 0.0;
        let trace: Vec<f64> = (0..200_000)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                x = rho * x + e;
                x
            })
            .collect();
        let t = tau_int(&trace)?;
        let s = summarize(&trace)?;
        let jk = jackknife_se(&trace, 1000)?;
        println!(
            "{rho:>5} {:>9.2} {:>8.2}({:.2}) {:>8} {:>10.4} {:>10.4}",
            (1.0 + rho) / (1.0 - rho),
            t.tau,
            t.err,
            t.window,
            s.se,
            jk
        );
    }
    let lags = acf(&[1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 3.0, 2.0], 3)?;
    println!("acf of a short periodic trace: {lags:.3?}");
    Ok(())
}
