//! Properties of the leapfrog integrator on the SV latent-path Hamiltonian:
//! time reversibility and energy error shrinking with the square of the step.
//!
//! cargo run --release --example leapfrog_reversibility

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use svhmc::hmc::{leapfrog, Potential};
use svhmc::sv::SvPotential;
use svhmc::synth::gen_sv;
use svhmc::{SvParams, SynthSpec, TruthModel};

fn main() -> svhmc::Result<()> {
    let theta = SvParams::new(-1.0, 0.95, 0.05)?;
    let (y, h) = gen_sv(&SynthSpec::new(TruthModel::Sv(theta), 200, 5))?;
    let pot = SvPotential::from_series(&y, theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p: Vec<f64> = (0..h.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let energy = |x: &[f64], q: &[f64]| -> svhmc::Result<f64> {
        Ok(pot.energy(x)? + 0.5 * q.iter().map(|v| v * v).sum::<f64>())
    };
    let h0 = energy(h.h(), &p)?;

    let (x1, p1) = leapfrog(&pot, h.h(), &p, 0.05, 20)?;
    let back: Vec<f64> = p1.iter().map(|v| -v).collect();
    let (x2, _) = leapfrog(&pot, &x1, &back, 0.05, 20)?;
    let drift = x2.iter().zip(h.h()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("round trip max |dh| = {drift:.2e}");

    println!("{:>8} {:>6} {:>12}", "step", "steps", "|dH|");
    for step in [0.2, 0.1, 0.05, 0.025, 0.0125] {
        let n = (1.0 / step) as usize;
        let (x, q) = leapfrog(&pot, h.h(), &p, step, n)?;
        println!("{step:>8} {n:>6} {:>12.3e}", (energy(&x, &q)? - h0).abs());
    }
    Ok(())
}
