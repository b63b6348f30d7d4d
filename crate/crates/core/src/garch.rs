//! GARCH(1,1) with normal errors and zero conditional mean:
//!
//! ```text
//! y_t = sigma_t eps_t,  sigma_t^2 = omega + alpha y_{t-1}^2 + beta sigma_{t-1}^2
//! ```
//!
//! started at the unconditional variance. Estimated by random-walk Metropolis
//! in an unconstrained parametrization, with a flat prior on the stationary
//! region `omega > 0, alpha, beta >= 0, alpha + beta < 1`.

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::chain::{format_chain, ChainMeta, RunningMoments, VolatilityPath};
use crate::diagnostics::{summarize, TraceSummary};
use crate::error::{Error, Result};
use crate::timeseries::ReturnSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { omega, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.omega > 0.0
            && self.omega.is_finite()
            && self.alpha >= 0.0
            && self.beta >= 0.0
            && self.alpha + self.beta < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "GARCH parameters need omega > 0, alpha, beta >= 0, alpha + beta < 1; got {self:?}"
            )))
        }
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.omega / (1.0 - self.alpha - self.beta)
    }

    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// Conditional variance path `sigma_t^2`.
pub fn garch_filter(y: &[f64], theta: &GarchParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut s2 = theta.unconditional_variance();
    for t in 0..y.len() {
        if t > 0 {
            let prev = y[t - 1];
            s2 = theta.omega + theta.alpha * prev * prev + theta.beta * s2;
        }
        out.push(s2);
    }
    out
}

/// Gaussian log-likelihood `sum -1/2 ln(2 pi sigma_t^2) - y_t^2 / (2 sigma_t^2)`.
pub fn garch_loglik(y: &[f64], theta: &GarchParams) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut s2 = theta.unconditional_variance();
    let mut total = 0.0;
    for (t, &r) in y.iter().enumerate() {
        if t > 0 {
            let prev = y[t - 1];
            s2 = theta.omega + theta.alpha * prev * prev + theta.beta * s2;
        }
        total -= 0.5 * (ln_2pi + s2.ln() + r * r / s2);
    }
    total
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates `(ln omega, logit(alpha + beta), logit(alpha / (alpha + beta)))`.
fn to_unconstrained(p: &GarchParams) -> [f64; 3] {
    let s = p.alpha + p.beta;
    [p.omega.ln(), logit(s), logit(p.alpha / s)]
}

fn from_unconstrained(u: &[f64; 3]) -> GarchParams {
    let s = logistic(u[1]);
    let w = logistic(u[2]);
    GarchParams {
        omega: u[0].exp(),
        alpha: s * w,
        beta: s * (1.0 - w),
    }
}

/// Log posterior in unconstrained coordinates: likelihood plus the log
/// Jacobian of the map back to `(omega, alpha, beta)`.
fn log_target(y: &[f64], u: &[f64; 3]) -> f64 {
    let p = from_unconstrained(u);
    let s = logistic(u[1]);
    let w = logistic(u[2]);
    let jac = u[0] + 2.0 * s.ln() + (1.0 - s).ln() + w.ln() + (1.0 - w).ln();
    let ll = garch_loglik(y, &p);
    if p.validate().is_err() || !ll.is_finite() || !jac.is_finite() {
        f64::NEG_INFINITY
    } else {
        ll + jac
    }
}

fn default_start(y: &[f64]) -> GarchParams {
    let var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
    GarchParams {
        omega: 0.05 * var.max(1e-300),
        alpha: 0.05,
        beta: 0.9,
    }
}

/// Maximum-likelihood point by Nelder-Mead in unconstrained coordinates.
pub fn fit_mle(y: &[f64]) -> GarchParams {
    let start = to_unconstrained(&default_start(y));
    let f = |u: &[f64; 3]| {
        let ll = garch_loglik(y, &from_unconstrained(u));
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    from_unconstrained(&nelder_mead(f, start, 0.5, 4000, 1e-12))
}

fn nelder_mead(f: impl Fn(&[f64; 3]) -> f64, start: [f64; 3], step: f64, max_iter: usize, tol: f64) -> [f64; 3] {
    let mut simplex: Vec<([f64; 3], f64)> = (0..4)
        .map(|k| {
            let mut v = start;
            if k > 0 {
                v[k - 1] += step;
            }
            (v, f(&v))
        })
        .collect();
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[3].1 - simplex[0].1).abs() <= tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = [0.0; 3];
        for (v, _) in &simplex[..3] {
            for i in 0..3 {
                centroid[i] += v[i] / 3.0;
            }
        }
        let worst = simplex[3].0;
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let contracted = lerp(&centroid, &worst, 0.5);
            let fc = f(&contracted);
            if fc < simplex[3].1 {
                simplex[3] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let v = lerp(&best, &entry.0, 0.5);
                    *entry = (v, f(&v));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarchFitConfig {
    pub n_burn: usize,
    pub n_keep: usize,
    pub seed: u64,
    /// Burn-in iterations per proposal adaptation.
    pub adapt_window: usize,
    pub target_accept: f64,
    pub init: Option<GarchParams>,
}

impl Default for GarchFitConfig {
    fn default() -> Self {
        Self {
            n_burn: 10_000,
            n_keep: 40_000,
            seed: 0,
            adapt_window: 100,
            target_accept: 0.3,
            init: None,
        }
    }
}

impl GarchFitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_burn == 0 || self.n_keep == 0 {
            return Err(Error::Contract(format!(
                "n_burn and n_keep must be >= 1 (got {}, {})",
                self.n_burn, self.n_keep
            )));
        }
        if self.adapt_window == 0 {
            return Err(Error::Config("adapt_window must be >= 1".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::Config(format!(
                "garch target_accept {} must lie in (0, 1)",
                self.target_accept
            )));
        }
        if let Some(p) = &self.init {
            p.validate()?;
        }
        Ok(())
    }
}

/// Acceptance rates outside this band at the end of burn-in raise a warning.
pub const GARCH_TUNING_BAND: (f64, f64) = (0.10, 0.60);

#[derive(Debug, Clone, PartialEq)]
pub struct GarchChain {
    pub meta: ChainMeta,
    pub dates: Vec<NaiveDate>,
    pub params: Vec<GarchParams>,
    /// Posterior mean of `sigma_t^2` per day.
    pub vol_mean: Vec<f64>,
    pub vol_sd: Vec<f64>,
}

impl GarchChain {
    pub fn omega_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.omega).collect()
    }

    pub fn alpha_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.alpha).collect()
    }

    pub fn beta_trace(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.beta).collect()
    }

    pub fn volatility(&self) -> VolatilityPath {
        VolatilityPath {
            dates: self.dates.clone(),
            mean: self.vol_mean.clone(),
            sd: self.vol_sd.clone(),
        }
    }

    pub fn summaries(&self) -> Result<Vec<(String, TraceSummary)>> {
        Ok(vec![
            ("omega".to_string(), summarize(&self.omega_trace())?),
            ("alpha".to_string(), summarize(&self.alpha_trace())?),
            ("beta".to_string(), summarize(&self.beta_trace())?),
        ])
    }

    pub fn to_chain_file(&self) -> String {
        let columns = ["omega".to_string(), "alpha".into(), "beta".into()];
        let rows: Vec<Vec<f64>> = self.params.iter().map(|p| vec![p.omega, p.alpha, p.beta]).collect();
        format_chain(&self.meta, &columns, &rows)
    }
}

/// Lower-triangular Cholesky factor of a 3x3 symmetric positive-definite matrix.
fn cholesky3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn covariance3(draws: &[[f64; 3]]) -> [[f64; 3]; 3] {
    let n = draws.len() as f64;
    let mut m = [0.0; 3];
    for d in draws {
        for i in 0..3 {
            m[i] += d[i] / n;
        }
    }
    let mut c = [[0.0; 3]; 3];
    for d in draws {
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] += (d[i] - m[i]) * (d[j] - m[j]) / (n - 1.0);
            }
        }
    }
    c
}

/// Random-walk Metropolis on the unconstrained GARCH coordinates.
///
/// During the first half of burn-in the proposal is isotropic with an
/// adapted scale; afterwards it follows the empirical covariance of the
/// burn-in draws, rescaled toward the target acceptance. Everything is frozen
/// once burn-in ends.
pub fn run_garch_fit(y: &ReturnSeries, cfg: &GarchFitConfig) -> Result<GarchChain> {
    cfg.validate()?;
    let values = y.values();
    let mut rng = crate::rng::stream(cfg.seed, crate::rng::Stage::GarchFit);

    let mut u = to_unconstrained(&cfg.init.unwrap_or_else(|| default_start(values)));
    let mut lp = log_target(values, &u);
    if !lp.is_finite() {
        return Err(Error::Validation("GARCH starting point has zero posterior density".into()));
    }
    let mut chol = [[0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [0.0, 0.0, 0.1]];
    let mut scale = 1.0;
    let mut history: Vec<[f64; 3]> = Vec::with_capacity(cfg.n_burn);
    let mut window_accepts = 0usize;
    let mut window_len = 0usize;
    let mut end_rate = 0.0;

    let propose = |u: &[f64; 3], chol: &[[f64; 3]; 3], scale: f64, rng: &mut crate::rng::StreamRng| {
        let z: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let mut out = *u;
        for i in 0..3 {
            for j in 0..=i {
                out[i] += scale * chol[i][j] * z[j];
            }
        }
        out
    };

    for it in 0..cfg.n_burn {
        let cand = propose(&u, &chol, scale, &mut rng);
        let lc = log_target(values, &cand);
        let accept = rng.random::<f64>().ln() < lc - lp;
        if accept {
            u = cand;
            lp = lc;
        }
        history.push(u);
        window_accepts += accept as usize;
        window_len += 1;
        if window_len == cfg.adapt_window {
            let rate = window_accepts as f64 / window_len as f64;
            end_rate = rate;
            scale *= (rate - cfg.target_accept).exp();
            if it + 1 >= cfg.n_burn / 2 && history.len() >= 50 {
                let recent = &history[history.len() / 2..];
                let mut cov = covariance3(recent);
                for (i, row) in cov.iter_mut().enumerate() {
                    row[i] += 1e-10;
                }
                if let Some(l) = cholesky3(&cov) {
                    let rescale = 2.38 / 3f64.sqrt();
                    chol = l.map(|row| row.map(|v| v * rescale));
                }
            }
            window_accepts = 0;
            window_len = 0;
        }
    }
    if window_len > 0 {
        end_rate = window_accepts as f64 / window_len as f64;
    }
    let mut warnings = Vec::new();
    if end_rate < GARCH_TUNING_BAND.0 || end_rate > GARCH_TUNING_BAND.1 {
        warnings.push(format!(
            "GARCH acceptance {end_rate:.3} at end of burn-in outside [{}, {}]",
            GARCH_TUNING_BAND.0, GARCH_TUNING_BAND.1
        ));
    }

    let mut params = Vec::with_capacity(cfg.n_keep);
    let mut vol = RunningMoments::new(values.len());
    let mut accepted = 0usize;
    for _ in 0..cfg.n_keep {
        let cand = propose(&u, &chol, scale, &mut rng);
        let lc = log_target(values, &cand);
        if rng.random::<f64>().ln() < lc - lp {
            u = cand;
            lp = lc;
            accepted += 1;
        }
        let p = from_unconstrained(&u);
        vol.push(garch_filter(values, &p));
        params.push(p);
    }

    let meta = ChainMeta {
        model: "garch".into(),
        seed: cfg.seed,
        burn_in: cfg.n_burn,
        n_kept: cfg.n_keep,
        settings: vec![
            ("proposal_scale".into(), scale.to_string()),
            ("n_obs".into(), values.len().to_string()),
        ],
        acceptance: vec![("rwm".into(), accepted as f64 / cfg.n_keep as f64)],
        warnings,
    };
    Ok(GarchChain {
        meta,
        dates: y.dates().to_vec(),
        params,
        vol_mean: vol.mean().to_vec(),
        vol_sd: vol.sd(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_garch, SynthSpec, TruthModel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain loop transcription of the recursion, independent of `garch_filter`.
    fn oracle_filter(y: &[f64], w: f64, a: f64, b: f64) -> Vec<f64> {
        let mut s = vec![0.0; y.len()];
        s[0] = w / (1.0 - a - b);
        for t in 1..y.len() {
            s[t] = w + a * y[t - 1].powi(2) + b * s[t - 1];
        }
        s
    }

    fn oracle_loglik(y: &[f64], w: f64, a: f64, b: f64) -> f64 {
        let s = oracle_filter(y, w, a, b);
        let mut ll = 0.0;
        for t in 0..y.len() {
            ll += -0.5 * (2.0 * std::f64::consts::PI * s[t]).ln() - y[t].powi(2) / (2.0 * s[t]);
        }
        ll
    }

    fn random_y(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-0.05..0.05)).collect()
    }

    #[test]
    fn no_dynamics_gives_constant_variance() {
        let p = GarchParams::new(3e-4, 0.0, 0.0).unwrap();
        assert!(garch_filter(&random_y(20, 1), &p).iter().all(|v| *v == 3e-4));
    }

    #[test]
    fn zero_returns_converge_geometrically() {
        let p = GarchParams::new(1.0, 0.0, 0.5).unwrap();
        let s = garch_filter(&[0.0; 30], &p);
        // Starting at the unconditional variance 2, the recursion stays there.
        assert!(s.iter().all(|v| (v - 2.0).abs() < 1e-15));
        // From any other start it halves the gap each day.
        let mut cur: f64 = 1.0;
        for _ in 0..60 {
            cur = 1.0 + 0.5 * cur;
        }
        assert!((cur - 2.0).abs() < 1e-12);
    }

    #[test]
    fn filter_and_loglik_match_loop_oracle() {
        let y = random_y(50, 2);
        let p = GarchParams::new(2e-5, 0.12, 0.8).unwrap();
        let got = garch_filter(&y, &p);
        let want = oracle_filter(&y, 2e-5, 0.12, 0.8);
        for (g, w) in got.iter().zip(&want) {
            assert!(((g - w) / w).abs() < 1e-12);
        }
        let ll = garch_loglik(&y, &p);
        let oracle = oracle_loglik(&y, 2e-5, 0.12, 0.8);
        assert!(((ll - oracle) / oracle).abs() < 1e-10);
    }

    #[test]
    fn single_zero_observation_loglik() {
        let p = GarchParams::new(1.0, 0.0, 0.0).unwrap();
        let ll = garch_loglik(&[0.0], &p);
        assert!((ll + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn one_point_loglik_peaks_at_squared_return() {
        let y = [0.03];
        let at = |w: f64| garch_loglik(&y, &GarchParams::new(w, 0.0, 0.0).unwrap());
        let best = at(0.03 * 0.03);
        assert!(at(0.03 * 0.03 * 1.2) < best);
        assert!(at(0.03 * 0.03 * 0.8) < best);
    }

    #[test]
    fn parameter_validation() {
        assert!(GarchParams::new(0.0, 0.1, 0.8).is_err());
        assert!(GarchParams::new(1e-6, -0.1, 0.8).is_err());
        assert!(GarchParams::new(1e-6, 0.3, 0.7).is_err());
    }

    #[test]
    fn transform_round_trips() {
        let p = GarchParams::new(3e-6, 0.07, 0.9).unwrap();
        let back = from_unconstrained(&to_unconstrained(&p));
        assert!((back.omega - p.omega).abs() < 1e-18);
        assert!((back.alpha - p.alpha).abs() < 1e-14);
        assert!((back.beta - p.beta).abs() < 1e-14);
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let l = cholesky3(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-12);
            }
        }
        assert!(cholesky3(&[[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_none());
    }

    #[test]
    fn mle_recovers_generating_parameters() {
        let truth = GarchParams::new(1e-6, 0.1, 0.85).unwrap();
        let (y, _) = gen_garch(&SynthSpec::new(TruthModel::Garch(truth), 5000, 3)).unwrap();
        let mle = fit_mle(y.values());
        assert!((mle.alpha - 0.1).abs() < 0.04, "{mle:?}");
        assert!((mle.beta - 0.85).abs() < 0.06, "{mle:?}");
    }

    #[test]
    fn fit_is_deterministic_and_stationary() {
        let truth = GarchParams::new(1e-6, 0.1, 0.85).unwrap();
        let (y, _) = gen_garch(&SynthSpec::new(TruthModel::Garch(truth), 400, 4)).unwrap();
        let cfg = GarchFitConfig { n_burn: 1000, n_keep: 1000, seed: 5, ..Default::default() };
        let a = run_garch_fit(&y, &cfg).unwrap();
        assert_eq!(a, run_garch_fit(&y, &cfg).unwrap());
        assert!(a.params.iter().all(|p| p.validate().is_ok()));
        assert_eq!(a.vol_mean.len(), 400);
        assert!(a.vol_mean.iter().all(|v| *v > 0.0));
        assert!(matches!(
            run_garch_fit(&y, &GarchFitConfig { n_keep: 0, ..cfg }),
            Err(Error::Contract(_))
        ));
    }

    proptest! {
        #[test]
        fn filter_output_is_positive(
            omega in 1e-9f64..1e-2, alpha in 0.0f64..0.5, frac in 0.0f64..0.999,
            y in prop::collection::vec(-1.0f64..1.0, 1..100),
        ) {
            let beta = (1.0 - alpha) * frac * 0.999;
            let p = GarchParams::new(omega, alpha, beta).unwrap();
            prop_assert!(garch_filter(&y, &p).iter().all(|v| *v > 0.0 && v.is_finite()));
        }
    }
}
