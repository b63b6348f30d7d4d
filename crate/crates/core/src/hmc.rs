//! Hybrid Monte Carlo over the whole latent path.
//!
//! One update refreshes every momentum from `N(0, 1)`, integrates Hamilton's
//! equations with a reversible, volume-preserving integrator, and accepts the
//! end point with probability `min(1, exp(-dH))`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sv::{LatentPath, SvParams, SvPotential};
use crate::timeseries::ReturnSeries;

/// Negative log target density and its gradient.
pub trait Potential {
    fn dim(&self) -> usize;
    fn energy(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<()>;
}

/// Discretization of Hamilton's equations for unit-mass kinetic energy.
///
/// Implementations must be time-reversible and volume-preserving for the
/// Metropolis correction to leave the target invariant.
pub trait Integrator {
    /// Advances `(x, p)` in place by `n_steps` steps of size `step`.
    /// `scratch` has the length of `x`.
    fn integrate<P: Potential + ?Sized>(
        &self,
        potential: &P,
        x: &mut [f64],
        p: &mut [f64],
        step: f64,
        n_steps: usize,
        scratch: &mut [f64],
    ) -> Result<()>;
}

/// Second-order leapfrog, position-momentum-position splitting:
///
/// ```text
/// x(t + dt/2) = x(t) + dt/2 p(t)
/// p(t + dt)   = p(t) - dt dU/dx(x(t + dt/2))
/// x(t + dt)   = x(t + dt/2) + dt/2 p(t + dt)
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct Leapfrog;

impl Integrator for Leapfrog {
    fn integrate<P: Potential + ?Sized>(
        &self,
        potential: &P,
        x: &mut [f64],
        p: &mut [f64],
        step: f64,
        n_steps: usize,
        grad: &mut [f64],
    ) -> Result<()> {
        let half = 0.5 * step;
        for k in 0..n_steps {
            for (xi, pi) in x.iter_mut().zip(p.iter()) {
                *xi += half * pi;
            }
            potential
                .gradient(x, grad)
                .map_err(|e| Error::Divergence(format!("step {k}: {e}")))?;
            for (pi, gi) in p.iter_mut().zip(grad.iter()) {
                *pi -= step * gi;
            }
            for (xi, pi) in x.iter_mut().zip(p.iter()) {
                *xi += half * pi;
            }
        }
        if x.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Divergence("non-finite phase-space point".into()));
        }
        Ok(())
    }
}

/// Runs `n_steps` leapfrog steps from `(x, p)` and returns the end point.
pub fn leapfrog<P: Potential + ?Sized>(
    potential: &P,
    x: &[f64],
    p: &[f64],
    step: f64,
    n_steps: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != p.len() || x.len() != potential.dim() {
        return Err(Error::Contract(format!(
            "state {}, momenta {}, potential dim {}",
            x.len(),
            p.len(),
            potential.dim()
        )));
    }
    let (mut x, mut p) = (x.to_vec(), p.to_vec());
    let mut scratch = vec![0.0; x.len()];
    Leapfrog.integrate(potential, &mut x, &mut p, step, n_steps, &mut scratch)?;
    Ok((x, p))
}

/// Leapfrog on the SV latent-path Hamiltonian. `path` must carry momenta.
pub fn leapfrog_sv(
    path: &LatentPath,
    y: &ReturnSeries,
    theta: &SvParams,
    step: f64,
    n_steps: usize,
) -> Result<LatentPath> {
    let p = path
        .momenta()
        .ok_or_else(|| Error::Contract("leapfrog needs momenta".into()))?;
    let potential = SvPotential::from_series(y, *theta)?;
    let (h, p) = leapfrog(&potential, path.h(), p, step, n_steps)?;
    LatentPath::with_momenta(h, p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmcConfig {
    /// Leapfrog step size.
    pub step_size: f64,
    /// Leapfrog steps per trajectory.
    pub n_steps: usize,
    pub target_accept: f64,
    /// Adapt `step_size` during burn-in.
    pub tune: bool,
    pub seed: u64,
}

impl Default for HmcConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            n_steps: 10,
            target_accept: 0.65,
            tune: true,
            seed: 0,
        }
    }
}

impl HmcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Config(format!("hmc step_size {} must be > 0", self.step_size)));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("hmc n_steps must be >= 1".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::Config(format!(
                "hmc target_accept {} must lie in (0, 1)",
                self.target_accept
            )));
        }
        Ok(())
    }

    /// Fictitious time covered by one trajectory.
    pub fn trajectory_length(&self) -> f64 {
        self.step_size * self.n_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmcStepReport {
    /// `H(end) - H(start)`; `+inf` for a diverged trajectory.
    pub delta_h: f64,
    pub accepted: bool,
    pub accept_prob: f64,
}

impl HmcStepReport {
    pub fn diverged(&self) -> bool {
        self.delta_h == f64::INFINITY
    }
}

/// `min(1, exp(-dH))`; zero for `+inf` and NaN.
pub fn accept_probability(delta_h: f64) -> f64 {
    if delta_h.is_nan() {
        0.0
    } else if delta_h <= 0.0 {
        1.0
    } else {
        (-delta_h).exp()
    }
}

/// Metropolis decision for energy change `delta_h` given a uniform draw `u`.
pub fn metropolis(delta_h: f64, u: f64) -> HmcStepReport {
    let accept_prob = accept_probability(delta_h);
    HmcStepReport {
        delta_h,
        accepted: u < accept_prob,
        accept_prob,
    }
}

/// Acceptance rates within this distance of the target leave the step unchanged.
pub const TUNE_DEADBAND: f64 = 0.02;

/// Multiplicative step-size update from a window of reports.
///
/// Uses the mean Metropolis probability of the window as the acceptance
/// estimate and rescales by `exp(rate - target)`.
pub fn tune_step_size(history: &[HmcStepReport], cfg: &HmcConfig) -> f64 {
    if history.is_empty() || !cfg.tune {
        return cfg.step_size;
    }
    let rate = history.iter().map(|r| r.accept_prob).sum::<f64>() / history.len() as f64;
    let gap = rate - cfg.target_accept;
    if gap.abs() <= TUNE_DEADBAND {
        cfg.step_size
    } else {
        cfg.step_size * gap.exp()
    }
}

/// HMC sampler state for one chain.
#[derive(Debug, Clone)]
pub struct HmcSampler<I = Leapfrog> {
    cfg: HmcConfig,
    integrator: I,
    trajectory_length: f64,
    proposal: Vec<f64>,
    momenta: Vec<f64>,
    scratch: Vec<f64>,
}

impl HmcSampler<Leapfrog> {
    pub fn new(cfg: HmcConfig) -> Result<Self> {
        Self::with_integrator(cfg, Leapfrog)
    }
}

impl<I: Integrator> HmcSampler<I> {
    pub fn with_integrator(cfg: HmcConfig, integrator: I) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            trajectory_length: cfg.trajectory_length(),
            cfg,
            integrator,
            proposal: Vec::new(),
            momenta: Vec::new(),
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &HmcConfig {
        &self.cfg
    }

    /// Sets a new step size, keeping the trajectory length fixed.
    pub fn set_step_size(&mut self, step_size: f64) {
        self.cfg.step_size = step_size;
        self.cfg.n_steps = ((self.trajectory_length / step_size).round() as usize).max(1);
    }

    /// Applies `tune_step_size` to a window of reports.
    pub fn adapt(&mut self, window: &[HmcStepReport]) {
        let next = tune_step_size(window, &self.cfg);
        if next != self.cfg.step_size {
            self.set_step_size(next);
        }
    }

    /// One HMC transition of `x` in place.
    pub fn step<P, R>(&mut self, potential: &P, x: &mut [f64], rng: &mut R) -> Result<HmcStepReport>
    where
        P: Potential + ?Sized,
        R: Rng + ?Sized,
    {
        let n = x.len();
        if n != potential.dim() {
            return Err(Error::Contract(format!(
                "state has {n} entries, potential {}",
                potential.dim()
            )));
        }
        self.momenta.resize(n, 0.0);
        self.scratch.resize(n, 0.0);
        self.proposal.clear();
        self.proposal.extend_from_slice(x);
        for p in self.momenta.iter_mut() {
            *p = rng.sample(StandardNormal);
        }
        let kinetic = |p: &[f64]| 0.5 * p.iter().map(|v| v * v).sum::<f64>();
        let h_start = kinetic(&self.momenta) + potential.energy(x)?;

        let end = self
            .integrator
            .integrate(
                potential,
                &mut self.proposal,
                &mut self.momenta,
                self.cfg.step_size,
                self.cfg.n_steps,
                &mut self.scratch,
            )
            .and_then(|_| potential.energy(&self.proposal));
        let delta_h = match end {
            Ok(u) => {
                let d = kinetic(&self.momenta) + u - h_start;
                if d.is_finite() {
                    d
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        };
        let report = metropolis(delta_h, rng.random::<f64>());
        if report.accepted {
            x.copy_from_slice(&self.proposal);
        }
        Ok(report)
    }
}

/// One HMC update of the SV latent path at fixed parameters.
pub fn hmc_step<R: Rng + ?Sized>(
    path: &LatentPath,
    y: &ReturnSeries,
    theta: &SvParams,
    cfg: &HmcConfig,
    rng: &mut R,
) -> Result<(LatentPath, HmcStepReport)> {
    let potential = SvPotential::from_series(y, *theta)?;
    if path.len() != y.len() {
        return Err(Error::Contract(format!(
            "latent path has {} states, return series has {}",
            path.len(),
            y.len()
        )));
    }
    let mut sampler = HmcSampler::new(*cfg)?;
    let mut h = path.h().to_vec();
    let report = sampler.step(&potential, &mut h, rng)?;
    Ok((LatentPath::new(h)?, report))
}
