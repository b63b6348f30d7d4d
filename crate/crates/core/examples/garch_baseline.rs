//! GARCH(1,1) by maximum likelihood and by MCMC on the same data.
//!
//! cargo run --release --example garch_baseline

use svhmc::garch::{fit_mle, garch_loglik};
use svhmc::synth::gen_garch;
use svhmc::{run_garch_fit, GarchFitConfig, GarchParams, SynthSpec, TruthModel};

fn main() -> svhmc::Result<()> {
    let truth = GarchParams::new(2e-6, 0.08, 0.9)?;
    let (y, _) = gen_garch(&SynthSpec::new(TruthModel::Garch(truth), 3000, 11))?;

    let mle = fit_mle(y.values());
    println!("truth  {truth:?}  loglik {:.2}", garch_loglik(y.values(), &truth));
    println!("mle    {mle:?}  loglik {:.2}", garch_loglik(y.values(), &mle));

    let chain = run_garch_fit(&y, &GarchFitConfig { n_burn: 5_000, n_keep: 20_000, seed: 11, ..Default::default() })?;
    for (name, s) in chain.summaries()? {
        println!("mcmc   {name:<6} {:.4e} +- {:.1e}  tau_int {:.1}", s.mean, s.sd, s.tau_int);
    }
    println!("acceptance {:.3}", chain.meta.acceptance_of("rwm").unwrap_or(f64::NAN));
    Ok(())
}
