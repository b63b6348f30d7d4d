//! The stochastic volatility model
//!
//! ```text
//! y_t = exp(h_t / 2) eps_t,            eps_t ~ N(0, 1)
//! h_t = mu + phi (h_{t-1} - mu) + eta_t,  eta_t ~ N(0, sigma_eta_sq)
//! ```
//!
//! with `h_1` drawn from the stationary law `N(mu, sigma_eta_sq / (1 - phi^2))`.
//! The latent path `h` is sampled with HMC on the potential `U(h) = -ln P(h)`,
//! whose exact gradient lives here.

use crate::error::{Error, Result};
use crate::hmc::Potential;
use crate::timeseries::ReturnSeries;

/// Parameter block `(mu, phi, sigma_eta_sq)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvParams {
    /// Mean of the log-variance.
    pub mu: f64,
    /// AR(1) persistence of the log-variance.
    pub phi: f64,
    /// Innovation variance of the log-variance.
    pub sigma_eta_sq: f64,
}

impl SvParams {
    pub fn new(mu: f64, phi: f64, sigma_eta_sq: f64) -> Result<Self> {
        let p = Self { mu, phi, sigma_eta_sq };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::Validation(format!("mu = {} is not finite", self.mu)));
        }
        if !(self.phi.abs() < 1.0) {
            return Err(Error::Validation(format!("|phi| = {} must be < 1", self.phi.abs())));
        }
        if !(self.sigma_eta_sq > 0.0 && self.sigma_eta_sq.is_finite()) {
            return Err(Error::Validation(format!(
                "sigma_eta_sq = {} must be positive",
                self.sigma_eta_sq
            )));
        }
        Ok(())
    }

    /// Stationary variance of `h`, `sigma_eta_sq / (1 - phi^2)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma_eta_sq / (1.0 - self.phi * self.phi)
    }
}

/// Log-variance states `h_1..h_n`, optionally with HMC momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPath {
    h: Vec<f64>,
    p: Option<Vec<f64>>,
}

impl LatentPath {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if let Some(v) = h.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("latent state {v}")));
        }
        Ok(Self { h, p: None })
    }

    pub fn with_momenta(h: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if h.len() != p.len() {
            return Err(Error::Contract(format!(
                "{} states but {} momenta",
                h.len(),
                p.len()
            )));
        }
        if let Some(v) = p.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("momentum {v}")));
        }
        let mut path = Self::new(h)?;
        path.p = Some(p);
        Ok(path)
    }

    /// Constant path at `level`.
    pub fn constant(n: usize, level: f64) -> Self {
        Self { h: vec![level; n], p: None }
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn momenta(&self) -> Option<&[f64]> {
        self.p.as_deref()
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.h
    }
}

/// `-ln P(h | y, theta)` up to a constant, prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SvPotential {
    y_sq: Vec<f64>,
    theta: SvParams,
}

impl SvPotential {
    pub fn new(y: &[f64], theta: SvParams) -> Result<Self> {
        theta.validate()?;
        if y.is_empty() {
            return Err(Error::Contract("empty return vector".into()));
        }
        Ok(Self {
            y_sq: y.iter().map(|v| v * v).collect(),
            theta,
        })
    }

    pub fn from_series(y: &ReturnSeries, theta: SvParams) -> Result<Self> {
        Self::new(y.values(), theta)
    }

    pub fn theta(&self) -> SvParams {
        self.theta
    }

    pub fn set_theta(&mut self, theta: SvParams) {
        self.theta = theta;
    }

    fn check_len(&self, h: &[f64]) -> Result<()> {
        if h.len() != self.y_sq.len() {
            return Err(Error::Contract(format!(
                "latent path has {} states, return series has {}",
                h.len(),
                self.y_sq.len()
            )));
        }
        Ok(())
    }
}

impl Potential for SvPotential {
    fn dim(&self) -> usize {
        self.y_sq.len()
    }

    fn energy(&self, h: &[f64]) -> Result<f64> {
        self.check_len(h)?;
        let SvParams { mu, phi, sigma_eta_sq: s2 } = self.theta;
        let mut measurement = 0.0;
        for (&hi, &y2) in h.iter().zip(&self.y_sq) {
            measurement += 0.5 * hi + 0.5 * y2 * (-hi).exp();
        }
        let x0 = h[0] - mu;
        let mut ar = x0 * x0 * (1.0 - phi * phi);
        for w in h.windows(2) {
            let r = w[1] - mu - phi * (w[0] - mu);
            ar += r * r;
        }
        let u = measurement + ar / (2.0 * s2);
        if !u.is_finite() {
            return Err(Error::NonFinite(format!("potential evaluated to {u}")));
        }
        Ok(u)
    }

    fn gradient(&self, h: &[f64], grad: &mut [f64]) -> Result<()> {
        self.check_len(h)?;
        let SvParams { mu, phi, sigma_eta_sq: s2 } = self.theta;
        let n = h.len();
        let inv_s2 = 1.0 / s2;
        // AR residual r_i couples h_i (weight 1) and h_{i-1} (weight -phi).
        grad[0] = (1.0 - phi * phi) * (h[0] - mu) * inv_s2;
        for i in 1..n {
            let r = (h[i] - mu - phi * (h[i - 1] - mu)) * inv_s2;
            grad[i] = r;
            grad[i - 1] -= phi * r;
        }
        for i in 0..n {
            grad[i] += 0.5 - 0.5 * self.y_sq[i] * (-h[i]).exp();
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient overflow".into()));
        }
        Ok(())
    }
}

fn check_lengths(h: &LatentPath, y: &ReturnSeries) -> Result<()> {
    if h.len() != y.len() {
        return Err(Error::Contract(format!(
            "latent path has {} states, return series has {}",
            h.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Log of the unnormalized latent-path density `P(h_1, ..., h_n)`.
pub fn log_prob_h(h: &LatentPath, y: &ReturnSeries, theta: &SvParams) -> Result<f64> {
    check_lengths(h, y)?;
    Ok(-SvPotential::from_series(y, *theta)?.energy(h.h())?)
}

/// `ln p(y, h | theta)` up to an additive constant free of `theta`: the
/// latent-path density plus the `theta`-dependent normalizers of the AR(1)
/// prior. Conditionals for `theta` are read off this function.
pub fn log_joint(h: &[f64], y: &[f64], theta: &SvParams) -> Result<f64> {
    let u = SvPotential::new(y, *theta)?.energy(h)?;
    let n = h.len() as f64;
    Ok(-u - 0.5 * n * theta.sigma_eta_sq.ln() + 0.5 * (1.0 - theta.phi * theta.phi).ln())
}

/// `sum p_i^2 / 2 - log_prob_h`.
pub fn hamiltonian(path: &LatentPath, y: &ReturnSeries, theta: &SvParams) -> Result<f64> {
    check_lengths(path, y)?;
    let p = path
        .momenta()
        .ok_or_else(|| Error::Contract("hamiltonian needs momenta".into()))?;
    let kinetic: f64 = p.iter().map(|v| 0.5 * v * v).sum();
    Ok(kinetic - log_prob_h(path, y, theta)?)
}

/// `dH/dh_i` for every state.
pub fn grad_h(h: &LatentPath, y: &ReturnSeries, theta: &SvParams) -> Result<Vec<f64>> {
    check_lengths(h, y)?;
    let mut g = vec![0.0; h.len()];
    SvPotential::from_series(y, *theta)?.gradient(h.h(), &mut g)?;
    Ok(g)
}
