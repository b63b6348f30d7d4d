//! Fit the SV model to simulated returns and print a diagnostics table.
//!
//! cargo run --release --example fit_sv_hmc

use svhmc::hmc::HmcConfig;
use svhmc::synth::gen_sv;
use svhmc::{run_sv_fit, SvFitConfig, SvParams, SynthSpec, TruthModel};

fn main() -> svhmc::Result<()> {
    let truth = SvParams::new(-7.87, 0.975, 0.045)?;
    let (y, h) = gen_sv(&SynthSpec::new(TruthModel::Sv(truth), 1000, 7))?;

    let cfg = SvFitConfig {
        n_burn: 2_000,
        n_keep: 8_000,
        seed: 7,
        hmc: HmcConfig { step_size: 0.1, n_steps: 10, ..Default::default() },
        ..Default::default()
    };
    let chain = run_sv_fit(&y, &cfg)?;

    println!("{:<14}{:>12}{:>12}{:>10}{:>10}", "parameter", "truth", "mean", "sd", "tau_int");
    let truths = [truth.phi, truth.mu, truth.sigma_eta_sq, h.h()[9]];
    for ((name, s), t) in chain.summaries()?.iter().zip(truths) {
        println!(
            "{name:<14}{t:>12.4}{:>12.4}{:>10.4}{:>7.1}({:.1})",
            s.mean, s.sd, s.tau_int, s.tau_int_err
        );
    }
    for (block, rate) in &chain.meta.acceptance {
        println!("acceptance {block}: {rate:.3}");
    }
    for w in &chain.meta.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
