//! Stochastic volatility estimation by hybrid Monte Carlo.
//!
//! The crate fits the log-normal stochastic volatility model to daily returns,
//! updating the latent log-variance path with HMC and the parameters by Gibbs
//! steps. A GARCH(1,1) baseline, realized-volatility proxies with the
//! Hansen-Lunde scale factor, RMSPE scoring and MCMC diagnostics complete the
//! pipeline. See the `examples/` directory for runnable walkthroughs.

pub mod chain;
pub mod diagnostics;
pub mod error;
pub mod evaluate;
pub mod fsio;
pub mod garch;
pub mod hmc;
pub mod pipeline;
pub mod realized;
pub mod rng;
pub mod sampler;
pub mod sv;
pub mod synth;
pub mod timeseries;

pub use chain::{ChainMeta, VolatilityPath};
pub use diagnostics::{summarize, tau_int, TauEstimate, TraceSummary};
pub use error::{Error, Result};
pub use evaluate::{compare, rmspe, ScoreTable};
pub use garch::{run_garch_fit, GarchChain, GarchFitConfig, GarchParams};
pub use hmc::{HmcConfig, HmcSampler, Leapfrog};
pub use realized::{adjusted_rv, signature_sweep, RvSeries};
pub use sampler::{run_sv_fit, SvChain, SvFitConfig};
pub use sv::{LatentPath, SvParams};
pub use synth::{simulate, SynthSpec, TruthModel};
pub use timeseries::{IntradayPanel, ReturnSeries, SessionCalendar};
