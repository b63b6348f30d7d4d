//! Gibbs updates of the SV parameters given the latent path, and the full
//! sampler alternating them with HMC updates of the path.
//!
//! Priors: flat on `mu`, uniform on `phi` in `(-1, 1)`, inverse-gamma on
//! `sigma_eta_sq`. Under these, `mu` and `sigma_eta_sq` have closed-form
//! conditionals; `phi` is drawn by an independence Metropolis-Hastings step
//! whose proposal is the Gaussian part of its conditional.

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::chain::{format_chain, ChainMeta, RunningMoments, VolatilityPath};
use crate::diagnostics::{summarize, TraceSummary};
use crate::error::{Error, Result};
use crate::hmc::{HmcConfig, HmcSampler, HmcStepReport, Potential};
use crate::sv::{SvParams, SvPotential};
use crate::timeseries::ReturnSeries;

/// Inverse-gamma prior on `sigma_eta_sq`; `mu` flat and `phi` uniform on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub ig_shape: f64,
    pub ig_scale: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            ig_shape: 2.5,
            ig_scale: 0.025,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.ig_shape > 0.0 && self.ig_scale > 0.0) {
            return Err(Error::Config(format!(
                "inverse-gamma prior needs positive shape and scale, got ({}, {})",
                self.ig_shape, self.ig_scale
            )));
        }
        Ok(())
    }
}

/// Mean and variance of the Gaussian conditional of `mu` under a flat prior.
pub fn mu_conditional(h: &[f64], phi: f64, sigma_eta_sq: f64) -> (f64, f64) {
    let n = h.len();
    let stationary = 1.0 - phi * phi;
    let lag = 1.0 - phi;
    let weight = stationary + (n as f64 - 1.0) * lag * lag;
    let mut acc = stationary * h[0];
    for w in h.windows(2) {
        acc += lag * (w[1] - phi * w[0]);
    }
    (acc / weight, sigma_eta_sq / weight)
}

pub fn sample_mu<R: Rng + ?Sized>(h: &[f64], phi: f64, sigma_eta_sq: f64, rng: &mut R) -> f64 {
    let (m, v) = mu_conditional(h, phi, sigma_eta_sq);
    m + v.sqrt() * rng.sample::<f64, _>(StandardNormal)
}

/// Sum of squared AR(1) residuals, with the stationary weight on `h_1`.
pub fn ar_sum_of_squares(h: &[f64], mu: f64, phi: f64) -> f64 {
    let x0 = h[0] - mu;
    let mut ss = x0 * x0 * (1.0 - phi * phi);
    for w in h.windows(2) {
        let r = w[1] - mu - phi * (w[0] - mu);
        ss += r * r;
    }
    ss
}

/// Shape and scale of the inverse-gamma conditional of `sigma_eta_sq`.
pub fn sigma_eta_sq_conditional(h: &[f64], mu: f64, phi: f64, prior: &PriorSpec) -> (f64, f64) {
    (
        prior.ig_shape + 0.5 * h.len() as f64,
        prior.ig_scale + 0.5 * ar_sum_of_squares(h, mu, phi),
    )
}

pub fn sample_sigma_eta_sq<R: Rng + ?Sized>(
    h: &[f64],
    mu: f64,
    phi: f64,
    prior: &PriorSpec,
    rng: &mut R,
) -> f64 {
    let (shape, scale) = sigma_eta_sq_conditional(h, mu, phi, prior);
    let g = Gamma::new(shape, 1.0 / scale).expect("positive shape and scale");
    1.0 / g.sample(rng)
}

/// Gaussian proposal for `phi`: the AR(1) least-squares value and its
/// conditional standard deviation. `None` when the path has no lagged
/// variation (n = 1 or a flat path at `mu`).
pub fn phi_proposal(h: &[f64], mu: f64, sigma_eta_sq: f64) -> Option<(f64, f64)> {
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for w in h.windows(2) {
        let (prev, cur) = (w[0] - mu, w[1] - mu);
        sxx += prev * prev;
        sxy += prev * cur;
    }
    (sxx > 0.0).then(|| (sxy / sxx, (sigma_eta_sq / sxx).sqrt()))
}

/// Log acceptance ratio for moving `phi` from `current` to `proposed` under
/// the independence proposal: only the stationary factor of `h_1` remains.
pub fn phi_log_accept_ratio(current: f64, proposed: f64, h1: f64, mu: f64, sigma_eta_sq: f64) -> f64 {
    if proposed.abs() >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let x0 = h1 - mu;
    let log_g = |phi: f64| {
        let s = 1.0 - phi * phi;
        0.5 * s.ln() - x0 * x0 * s / (2.0 * sigma_eta_sq)
    };
    log_g(proposed) - log_g(current)
}

/// Metropolis-Hastings update of `phi`; returns the new value and whether
/// the proposal was accepted.
pub fn sample_phi<R: Rng + ?Sized>(
    h: &[f64],
    current: f64,
    mu: f64,
    sigma_eta_sq: f64,
    rng: &mut R,
) -> (f64, bool) {
    let proposed = match phi_proposal(h, mu, sigma_eta_sq) {
        Some((m, sd)) => m + sd * rng.sample::<f64, _>(StandardNormal),
        None => rng.random_range(-1.0..1.0),
    };
    let log_ratio = phi_log_accept_ratio(current, proposed, h[0], mu, sigma_eta_sq);
    let u: f64 = rng.random();
    if u.ln() < log_ratio {
        (proposed, true)
    } else {
        (current, false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvFitConfig {
    pub priors: PriorSpec,
    pub hmc: HmcConfig,
    pub n_burn: usize,
    pub n_keep: usize,
    /// Seed of the chain; the HMC seed field is ignored in favour of this.
    pub seed: u64,
    /// 1-based latent indices whose full traces are kept.
    pub trace_indices: Vec<usize>,
    /// Burn-in iterations per step-size adaptation.
    pub tune_window: usize,
    /// Holds `phi` at a value instead of sampling it.
    pub fixed_phi: Option<f64>,
    /// Starting parameters; derived from the data when absent.
    pub init: Option<SvParams>,
}

impl Default for SvFitConfig {
    fn default() -> Self {
        Self {
            priors: PriorSpec::default(),
            hmc: HmcConfig::default(),
            n_burn: 10_000,
            n_keep: 40_000,
            seed: 0,
            trace_indices: vec![10],
            tune_window: 100,
            fixed_phi: None,
            init: None,
        }
    }
}

impl SvFitConfig {
    pub fn validate(&self) -> Result<()> {
        self.priors.validate()?;
        self.hmc.validate()?;
        if self.n_burn == 0 || self.n_keep == 0 {
            return Err(Error::Contract(format!(
                "n_burn and n_keep must be >= 1 (got {}, {})",
                self.n_burn, self.n_keep
            )));
        }
        if self.tune_window == 0 {
            return Err(Error::Config("tune_window must be >= 1".into()));
        }
        if self.trace_indices.contains(&0) {
            return Err(Error::Config("trace indices are 1-based".into()));
        }
        if let Some(phi) = self.fixed_phi {
            if !(phi.abs() < 1.0) {
                return Err(Error::Config(format!("fixed phi {phi} must satisfy |phi| < 1")));
            }
        }
        if let Some(init) = &self.init {
            init.validate()?;
        }
        Ok(())
    }
}

/// Acceptance rates outside this band at the end of burn-in raise a warning.
pub const SV_TUNING_BAND: (f64, f64) = (0.10, 0.95);

/// Retained draws of an SV fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SvChain {
    pub meta: ChainMeta,
    pub dates: Vec<NaiveDate>,
    pub params: Vec<SvParams>,
    /// `(1-based index, trace of h_index)` for each requested index.
    pub latent_traces: Vec<(usize, Vec<f64>)>,
    /// Posterior mean of `exp(h_t)` per day.
    pub vol_mean: Vec<f64>,
    pub vol_sd: Vec<f64>,
    /// Posterior mean of `h_t` per day.
    pub h_mean: Vec<f64>,
    pub h_sd: Vec<f64>,
}

impl SvChain {
    pub fn mu_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.mu).collect()
    }

    pub fn phi_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.phi).collect()
    }

    pub fn sigma_eta_sq_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.sigma_eta_sq).collect()
    }

    pub fn latent_trace(&self, index: usize) -> Option<&[f64]> {
        self.latent_traces
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, t)| t.as_slice())
    }

    pub fn volatility(&self) -> VolatilityPath {
        VolatilityPath {
            dates: self.dates.clone(),
            mean: self.vol_mean.clone(),
            sd: self.vol_sd.clone(),
        }
    }

    /// Rows `phi, mu, sigma_eta_sq, h_k...` in the order of the summary table.
    pub fn summaries(&self) -> Result<Vec<(String, TraceSummary)>> {
        let mut rows = vec![
            ("phi".to_string(), summarize(&self.phi_trace())?),
            ("mu".to_string(), summarize(&self.mu_trace())?),
            ("sigma_eta_sq".to_string(), summarize(&self.sigma_eta_sq_trace())?),
        ];
        for (i, trace) in &self.latent_traces {
            rows.push((format!("h_{i}"), summarize(trace)?));
        }
        Ok(rows)
    }

    pub fn to_chain_file(&self) -> String {
        let mut columns = vec!["mu".to_string(), "phi".into(), "sigma_eta_sq".into()];
        columns.extend(self.latent_traces.iter().map(|(i, _)| format!("h_{i}")));
        let rows: Vec<Vec<f64>> = self
            .params
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut row = vec![p.mu, p.phi, p.sigma_eta_sq];
                row.extend(self.latent_traces.iter().map(|(_, t)| t[k]));
                row
            })
            .collect();
        format_chain(&self.meta, &columns, &rows)
    }
}

fn initial_params(y: &[f64]) -> SvParams {
    let var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
    SvParams {
        mu: if var > 0.0 { var.ln() } else { -10.0 },
        phi: 0.9,
        sigma_eta_sq: 0.05,
    }
}

/// Fits the SV model: per iteration one HMC update of the latent path, then
/// `mu`, `phi` and `sigma_eta_sq` from their conditionals.
pub fn run_sv_fit(y: &ReturnSeries, cfg: &SvFitConfig) -> Result<SvChain> {
    cfg.validate()?;
    let mut rng = crate::rng::stream(cfg.seed, crate::rng::Stage::SvFit);
    let values = y.values();
    let n = values.len();
    if let Some(&i) = cfg.trace_indices.iter().find(|&&i| i > n) {
        return Err(Error::Config(format!("trace index h_{i} beyond series length {n}")));
    }

    let mut theta = cfg.init.unwrap_or_else(|| initial_params(values));
    if let Some(phi) = cfg.fixed_phi {
        theta.phi = phi;
    }
    let mut h = vec![theta.mu; n];
    let mut potential = SvPotential::new(values, theta)?;
    let mut hmc = HmcSampler::new(cfg.hmc)?;

    let mut window: Vec<HmcStepReport> = Vec::with_capacity(cfg.tune_window);
    let mut last_window_rate = None;
    // Log step sizes adapted in the second half of burn-in; the frozen step
    // is their geometric mean.
    let mut late_steps = Vec::new();
    for it in 0..cfg.n_burn {
        let report = gibbs_sweep(&mut h, &mut theta, &mut potential, &mut hmc, cfg, &mut rng)?;
        window.push(report.0);
        if window.len() == cfg.tune_window {
            last_window_rate = Some(mean_accept(&window));
            hmc.adapt(&window);
            window.clear();
            if cfg.hmc.tune && 2 * (it + 1) > cfg.n_burn {
                late_steps.push(hmc.config().step_size.ln());
            }
        }
    }
    if !late_steps.is_empty() {
        hmc.set_step_size((late_steps.iter().sum::<f64>() / late_steps.len() as f64).exp());
    }
    let mut warnings = Vec::new();
    let end_rate = if window.is_empty() {
        last_window_rate.unwrap_or(0.0)
    } else {
        mean_accept(&window)
    };
    if end_rate < SV_TUNING_BAND.0 || end_rate > SV_TUNING_BAND.1 {
        warnings.push(format!(
            "HMC acceptance {end_rate:.3} at end of burn-in outside [{}, {}]",
            SV_TUNING_BAND.0, SV_TUNING_BAND.1
        ));
    }

    let mut params = Vec::with_capacity(cfg.n_keep);
    let mut traces: Vec<(usize, Vec<f64>)> = cfg
        .trace_indices
        .iter()
        .map(|&i| (i, Vec::with_capacity(cfg.n_keep)))
        .collect();
    let mut vol = RunningMoments::new(n);
    let mut lat = RunningMoments::new(n);
    let (mut hmc_accepted, mut phi_accepted, mut divergences) = (0usize, 0usize, 0usize);
    for _ in 0..cfg.n_keep {
        let (report, phi_ok) = gibbs_sweep(&mut h, &mut theta, &mut potential, &mut hmc, cfg, &mut rng)?;
        hmc_accepted += report.accepted as usize;
        phi_accepted += phi_ok as usize;
        divergences += report.diverged() as usize;
        params.push(theta);
        for (i, trace) in traces.iter_mut() {
            trace.push(h[*i - 1]);
        }
        vol.push(h.iter().map(|v| v.exp()));
        lat.push(h.iter().copied());
    }
    if divergences > 0 {
        warnings.push(format!("{divergences} divergent trajectories after burn-in"));
    }

    let kept = cfg.n_keep as f64;
    let mut acceptance = vec![("hmc".to_string(), hmc_accepted as f64 / kept)];
    if cfg.fixed_phi.is_none() {
        acceptance.push(("phi".to_string(), phi_accepted as f64 / kept));
    }
    let hc = hmc.config();
    let meta = ChainMeta {
        model: "sv".into(),
        seed: cfg.seed,
        burn_in: cfg.n_burn,
        n_kept: cfg.n_keep,
        settings: vec![
            ("hmc_step_size".into(), hc.step_size.to_string()),
            ("hmc_n_steps".into(), hc.n_steps.to_string()),
            ("hmc_target_accept".into(), hc.target_accept.to_string()),
            ("prior_ig_shape".into(), cfg.priors.ig_shape.to_string()),
            ("prior_ig_scale".into(), cfg.priors.ig_scale.to_string()),
            ("n_obs".into(), n.to_string()),
        ],
        acceptance,
        warnings,
    };
    Ok(SvChain {
        meta,
        dates: y.dates().to_vec(),
        params,
        latent_traces: traces,
        vol_mean: vol.mean().to_vec(),
        vol_sd: vol.sd(),
        h_mean: lat.mean().to_vec(),
        h_sd: lat.sd(),
    })
}

fn mean_accept(window: &[HmcStepReport]) -> f64 {
    window.iter().map(|r| r.accept_prob).sum::<f64>() / window.len() as f64
}

fn gibbs_sweep<R: Rng + ?Sized>(
    h: &mut [f64],
    theta: &mut SvParams,
    potential: &mut SvPotential,
    hmc: &mut HmcSampler,
    cfg: &SvFitConfig,
    rng: &mut R,
) -> Result<(HmcStepReport, bool)> {
    potential.set_theta(*theta);
    debug_assert_eq!(potential.dim(), h.len());
    let report = hmc.step(potential, h, rng)?;
    theta.mu = sample_mu(h, theta.phi, theta.sigma_eta_sq, rng);
    let phi_ok = match cfg.fixed_phi {
        Some(_) => false,
        None => {
            let (phi, ok) = sample_phi(h, theta.phi, theta.mu, theta.sigma_eta_sq, rng);
            theta.phi = phi;
            ok
        }
    };
    theta.sigma_eta_sq = sample_sigma_eta_sq(h, theta.mu, theta.phi, &cfg.priors, rng);
    Ok((report, phi_ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{mean, sample_variance, tau_int};
    use crate::sv::log_joint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| -7.0 + rng.random_range(-1.0..1.0)).collect()
    }

    /// Mean and variance of a 1-D density known up to a constant, by
    /// trapezoid quadrature on a uniform grid.
    fn grid_moments(lo: f64, hi: f64, points: usize, log_f: impl Fn(f64) -> f64) -> (f64, f64) {
        let dx = (hi - lo) / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| lo + i as f64 * dx).collect();
        let lf: Vec<f64> = xs.iter().map(|&x| log_f(x)).collect();
        let top = lf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lf
            .iter()
            .enumerate()
            .map(|(i, l)| (l - top).exp() * if i == 0 || i == points - 1 { 0.5 } else { 1.0 })
            .collect();
        let z: f64 = w.iter().sum();
        let m = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / z;
        let v = xs.iter().zip(&w).map(|(x, w)| (x - m).powi(2) * w).sum::<f64>() / z;
        (m, v)
    }

    #[test]
    fn mu_conditional_phi_zero_is_sample_mean() {
        let h = instance(1, 8);
        let (m, v) = mu_conditional(&h, 0.0, 0.3);
        assert!((m - mean(&h)).abs() < 1e-14);
        assert!((v - 0.3 / 8.0).abs() < 1e-16);
    }

    #[test]
    fn mu_conditional_single_state() {
        let (m, v) = mu_conditional(&[-6.5], 0.6, 0.2);
        assert_eq!(m, -6.5);
        assert!((v - 0.2 / (1.0 - 0.36)).abs() < 1e-15);
    }

    #[test]
    fn mu_conditional_matches_grid_quadrature() {
        let h = instance(2, 6);
        let (phi, s2) = (0.8, 0.15);
        let (m, v) = mu_conditional(&h, phi, s2);
        let (gm, gv) = grid_moments(m - 12.0 * v.sqrt(), m + 12.0 * v.sqrt(), 200_001, |mu| {
            log_joint(&h, &[0.0; 6], &SvParams { mu, phi, sigma_eta_sq: s2 }).unwrap()
        });
        assert!(((gm - m) / m).abs() < 1e-6, "{gm} vs {m}");
        assert!(((gv - v) / v).abs() < 1e-6, "{gv} vs {v}");
    }

    #[test]
    fn sigma_conditional_zero_residuals_keeps_prior_scale() {
        let prior = PriorSpec::default();
        let (a, b) = sigma_eta_sq_conditional(&[-7.0; 5], -7.0, 0.9, &prior);
        assert_eq!(a, prior.ig_shape + 2.5);
        assert_eq!(b, prior.ig_scale);
    }

    #[test]
    fn sigma_conditional_two_state_hand_calculation() {
        let prior = PriorSpec { ig_shape: 3.0, ig_scale: 0.5 };
        let (h1, h2, mu, phi): (f64, f64, f64, f64) = (-6.0, -6.6, -7.0, 0.5);
        let ss = (h1 - mu) * (h1 - mu) * (1.0 - phi * phi) + (h2 - mu - phi * (h1 - mu)).powi(2);
        let (a, b) = sigma_eta_sq_conditional(&[h1, h2], mu, phi, &prior);
        assert_eq!(a, 4.0);
        assert!((b - (0.5 + ss / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn sigma_draws_match_inverse_gamma_mean() {
        let h = instance(3, 12);
        let prior = PriorSpec::default();
        let (mu, phi) = (-7.0, 0.7);
        let (a, b) = sigma_eta_sq_conditional(&h, mu, phi, &prior);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws: Vec<f64> = (0..50_000).map(|_| sample_sigma_eta_sq(&h, mu, phi, &prior, &mut rng)).collect();
        let analytic_mean = b / (a - 1.0);
        let analytic_var = b * b / ((a - 1.0).powi(2) * (a - 2.0));
        let se = (analytic_var / draws.len() as f64).sqrt();
        assert!((mean(&draws) - analytic_mean).abs() < 3.0 * se);
    }

    #[test]
    fn phi_ratio_is_one_for_identical_proposal() {
        assert_eq!(phi_log_accept_ratio(0.93, 0.93, -6.0, -7.0, 0.1), 0.0);
        assert_eq!(phi_log_accept_ratio(0.5, 1.0, -6.0, -7.0, 0.1), f64::NEG_INFINITY);
        assert_eq!(phi_log_accept_ratio(0.5, -1.3, -6.0, -7.0, 0.1), f64::NEG_INFINITY);
    }

    #[test]
    fn phi_never_leaves_unit_interval() {
        // A near-unit-root path puts proposal mass beyond 1.
        let h: Vec<f64> = (0..30).map(|i| -7.0 + 0.05 * i as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut phi = 0.9;
        let mut rejected_outside = 0;
        for _ in 0..5000 {
            let before = phi;
            let (next, ok) = sample_phi(&h, phi, -7.0, 0.01, &mut rng);
            assert!(next.abs() < 1.0);
            if !ok {
                assert_eq!(next, before);
                rejected_outside += 1;
            }
            phi = next;
        }
        assert!(rejected_outside > 0);
    }

    #[test]
    fn phi_conditional_moments_match_grid() {
        let h = instance(6, 6);
        let (mu, s2) = (-7.0, 0.1);
        let (gm, gv) = grid_moments(-0.999_999, 0.999_999, 400_001, |phi| {
            log_joint(&h, &[0.0; 6], &SvParams { mu, phi, sigma_eta_sq: s2 }).unwrap()
        });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut phi = 0.0;
        let draws: Vec<f64> = (0..100_000)
            .map(|_| {
                phi = sample_phi(&h, phi, mu, s2, &mut rng).0;
                phi
            })
            .collect();
        let tau = tau_int(&draws).unwrap().tau;
        let se = (gv * tau / draws.len() as f64).sqrt();
        assert!((mean(&draws) - gm).abs() < 4.0 * se, "{} vs {gm}", mean(&draws));
        assert!(((sample_variance(&draws) - gv) / gv).abs() < 0.05);
    }

    #[test]
    fn degenerate_path_falls_back_to_uniform_proposal() {
        assert!(phi_proposal(&[-7.0; 4], -7.0, 0.1).is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (phi, _) = sample_phi(&[-7.0; 4], 0.2, -7.0, 0.1, &mut rng);
        assert!(phi.abs() < 1.0);
    }

    #[test]
    fn fit_rejects_empty_keep_and_bad_trace_index() {
        let y = crate::synth::tests_support::short_sv_series(50, 1);
        let cfg = SvFitConfig { n_keep: 0, ..Default::default() };
        assert!(matches!(run_sv_fit(&y, &cfg), Err(Error::Contract(_))));
        let cfg = SvFitConfig { n_burn: 10, n_keep: 10, trace_indices: vec![51], ..Default::default() };
        assert!(matches!(run_sv_fit(&y, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn fit_is_deterministic_and_respects_invariants() {
        let y = crate::synth::tests_support::short_sv_series(120, 2);
        let cfg = SvFitConfig { n_burn: 300, n_keep: 400, seed: 99, ..Default::default() };
        let a = run_sv_fit(&y, &cfg).unwrap();
        let b = run_sv_fit(&y, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_chain_file(), b.to_chain_file());
        assert_eq!(a.params.len(), 400);
        assert!(a.params.iter().all(|p| p.phi.abs() < 1.0 && p.sigma_eta_sq > 0.0));
        assert_eq!(a.latent_trace(10).unwrap().len(), 400);
        assert_eq!(a.vol_mean.len(), 120);
        let c = run_sv_fit(&y, &SvFitConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.params, c.params);
    }

    #[test]
    fn fixed_phi_is_held() {
        let y = crate::synth::tests_support::short_sv_series(40, 3);
        let cfg = SvFitConfig { n_burn: 50, n_keep: 50, fixed_phi: Some(0.7), ..Default::default() };
        let chain = run_sv_fit(&y, &cfg).unwrap();
        assert!(chain.params.iter().all(|p| p.phi == 0.7));
        assert!(chain.meta.acceptance_of("phi").is_none());
    }
}
