//! MCMC output analysis: autocorrelation, integrated autocorrelation time,
//! blocked jackknife errors, and the per-parameter summary table.

use std::fmt::Write as _;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Window factor of the self-consistent truncation `W >= c * tau(W)`.
pub const WINDOW_FACTOR: f64 = 6.0;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the `n - 1` denominator.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Biased-normalization sample autocorrelation for lags `0..=max_lag`.
///
/// Computed through a zero-padded FFT, so cost is `O(n log n)` regardless of
/// `max_lag`.
pub fn acf(trace: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = trace.len();
    if max_lag < 1 || n <= max_lag {
        return Err(Error::Contract(format!(
            "acf needs n > max_lag >= 1 (n = {n}, max_lag = {max_lag})"
        )));
    }
    if trace.iter().all(|x| *x == trace[0]) {
        return Err(Error::Validation("autocorrelation of a zero-variance trace".into()));
    }
    let m = mean(trace);
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = trace
        .iter()
        .map(|x| Complex::new(x - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    Ok(buf[..=max_lag].iter().map(|c| c.re / c0).collect())
}

/// Integrated autocorrelation time with its statistical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub err: f64,
    /// Summation window `W`.
    pub window: usize,
    /// The self-consistent window did not close before the maximum lag.
    pub flagged: bool,
}

/// `tau = 1 + 2 sum_{t=1..W} ACF(t)` with the smallest `W >= 6 tau(W)`,
/// searching lags up to `n / 2`.
pub fn tau_int(trace: &[f64]) -> Result<TauEstimate> {
    tau_int_with_max_lag(trace, trace.len() / 2)
}

pub fn tau_int_with_max_lag(trace: &[f64], max_lag: usize) -> Result<TauEstimate> {
    let rho = acf(trace, max_lag)?;
    let n = trace.len() as f64;
    let mut tau = 1.0;
    let mut window = max_lag;
    let mut flagged = true;
    for (w, r) in rho.iter().enumerate().skip(1) {
        tau += 2.0 * r;
        if w as f64 >= WINDOW_FACTOR * tau {
            window = w;
            flagged = false;
            break;
        }
    }
    let err = tau * (2.0 * (2.0 * window as f64 + 1.0) / n).sqrt();
    Ok(TauEstimate {
        tau,
        err,
        window,
        flagged,
    })
}

/// Delete-one-block jackknife standard error of the mean. Trailing draws
/// that do not fill a block are dropped.
pub fn jackknife_se(trace: &[f64], block_size: usize) -> Result<f64> {
    let block_size = block_size.max(1);
    let n_blocks = trace.len() / block_size;
    if n_blocks < 2 {
        return Err(Error::Contract(format!(
            "jackknife needs at least 2 blocks of {block_size}, trace has {}",
            trace.len()
        )));
    }
    let used = n_blocks * block_size;
    let block_sums: Vec<f64> = trace[..used]
        .chunks_exact(block_size)
        .map(|c| c.iter().sum())
        .collect();
    let total: f64 = block_sums.iter().sum();
    let rest = (used - block_size) as f64;
    let leave_out: Vec<f64> = block_sums.iter().map(|b| (total - b) / rest).collect();
    let centre = mean(&leave_out);
    let k = n_blocks as f64;
    let ss: f64 = leave_out.iter().map(|v| (v - centre).powi(2)).sum();
    Ok(((k - 1.0) / k * ss).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSummary {
    pub mean: f64,
    /// Posterior standard deviation.
    pub sd: f64,
    /// Statistical error of the mean (blocked jackknife).
    pub se: f64,
    pub tau_int: f64,
    pub tau_int_err: f64,
    pub flagged: bool,
    pub n: usize,
}

pub const MIN_SUMMARY_DRAWS: usize = 100;

/// Mean, SD, jackknife SE with blocks of `ceil(2 tau_int)`, and `tau_int`.
///
/// Constant traces summarize as `(c, 0, 0, NaN)` and are flagged.
pub fn summarize(trace: &[f64]) -> Result<TraceSummary> {
    let n = trace.len();
    if n < MIN_SUMMARY_DRAWS {
        return Err(Error::Contract(format!(
            "summary needs at least {MIN_SUMMARY_DRAWS} draws, got {n}"
        )));
    }
    let m = mean(trace);
    let var = sample_variance(trace);
    if !(var > 0.0) || trace.iter().all(|x| *x == trace[0]) {
        return Ok(TraceSummary {
            mean: m,
            sd: 0.0,
            se: 0.0,
            tau_int: f64::NAN,
            tau_int_err: f64::NAN,
            flagged: true,
            n,
        });
    }
    let tau = tau_int(trace)?;
    // At least 10 blocks even when the window never closed.
    let block = ((2.0 * tau.tau).ceil() as usize).clamp(1, n / 10);
    Ok(TraceSummary {
        mean: m,
        sd: var.sqrt(),
        se: jackknife_se(trace, block)?,
        tau_int: tau.tau,
        tau_int_err: tau.err,
        flagged: tau.flagged,
        n,
    })
}

/// `parameter,mean,sd,se,tau_int,tau_int_err` table.
pub fn summary_csv(rows: &[(String, TraceSummary)]) -> String {
    let mut out = String::from("parameter,mean,sd,se,tau_int,tau_int_err\n");
    for (name, s) in rows {
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{}",
            s.mean, s.sd, s.se, s.tau_int, s.tau_int_err
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn iid(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn ar1(n: usize, rho: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let innov = (1.0 - rho * rho).sqrt();
        let mut x: f64 = rng.sample(StandardNormal);
        (0..n)
            .map(|_| {
                x = rho * x + innov * rng.sample::<f64, _>(StandardNormal);
                x
            })
            .collect()
    }

    fn direct_acf(x: &[f64], lag: usize) -> f64 {
        let m = mean(x);
        let c0: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
        let ct: f64 = (0..x.len() - lag).map(|i| (x[i] - m) * (x[i + lag] - m)).sum();
        ct / c0
    }

    #[test]
    fn fft_acf_matches_direct_sum() {
        let x = ar1(3000, 0.7, 9);
        let r = acf(&x, 40).unwrap();
        assert_eq!(r[0], 1.0);
        for lag in 1..=40 {
            assert!((r[lag] - direct_acf(&x, lag)).abs() < 1e-12);
        }
    }

    #[test]
    fn iid_lag_one_is_near_zero() {
        let x = iid(100_000, 1);
        let r = acf(&x, 5).unwrap();
        assert!(r[1].abs() < 3.0 / (x.len() as f64).sqrt());
    }

    #[test]
    fn alternating_trace_has_lag_one_minus_one() {
        let n = 1000;
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&x, 2).unwrap();
        assert!((r[1] + (n as f64 - 1.0) / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ar1_acf_decays_geometrically() {
        let x = ar1(200_000, 0.9, 2);
        let r = acf(&x, 10).unwrap();
        for t in 1..=10 {
            assert!((r[t] - 0.9f64.powi(t as i32)).abs() < 0.03, "lag {t}: {}", r[t]);
        }
    }

    #[test]
    fn acf_argument_errors() {
        assert!(acf(&[1.0, 2.0], 2).is_err());
        assert!(acf(&[1.0, 2.0, 3.0], 0).is_err());
        assert!(matches!(acf(&[2.0; 10], 3), Err(Error::Validation(_))));
    }

    #[test]
    fn tau_of_iid_is_one() {
        let t = tau_int(&iid(100_000, 3)).unwrap();
        assert!(!t.flagged);
        assert!((t.tau - 1.0).abs() < 3.0 * t.err, "{t:?}");
    }

    #[test]
    fn tau_of_ar1_is_nineteen() {
        let t = tau_int(&ar1(1_000_000, 0.9, 4)).unwrap();
        assert!(!t.flagged);
        assert!((t.tau - 19.0).abs() < t.err, "{t:?}");
    }

    #[test]
    fn drifting_trace_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..2000).map(|i| i as f64 + 1e-6 * rng.random::<f64>()).collect();
        assert!(tau_int(&x).unwrap().flagged);
    }

    #[test]
    fn jackknife_iid_matches_classical() {
        let x = iid(100_000, 6);
        let classical = (sample_variance(&x) / x.len() as f64).sqrt();
        let jk = jackknife_se(&x, 1).unwrap();
        assert!(((jk - classical) / classical).abs() < 1e-10);
        let blocked = jackknife_se(&x, 10).unwrap();
        assert!(((blocked - classical) / classical).abs() < 0.1);
    }

    #[test]
    fn jackknife_constant_and_too_short() {
        assert_eq!(jackknife_se(&[4.0; 50], 5).unwrap(), 0.0);
        assert!(jackknife_se(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn jackknife_absorbs_ar1_correlation() {
        let x = ar1(400_000, 0.9, 7);
        let n = x.len() as f64;
        let expected = (19.0 * sample_variance(&x) / n).sqrt();
        let jk = jackknife_se(&x, 50).unwrap();
        assert!(((jk - expected) / expected).abs() < 0.2, "{jk} vs {expected}");
    }

    #[test]
    fn summarize_constant_trace() {
        let s = summarize(&[2.5; 200]).unwrap();
        assert_eq!((s.mean, s.sd, s.se), (2.5, 0.0, 0.0));
        assert!(s.flagged);
        assert!(s.tau_int.is_nan());
    }

    #[test]
    fn summarize_ar1() {
        let x = ar1(500_000, 0.9, 8);
        let s = summarize(&x).unwrap();
        assert!(s.mean.abs() < 5.0 * (19.0 / x.len() as f64).sqrt());
        assert!((s.sd - 1.0).abs() < 0.02);
        assert!((s.tau_int - 19.0).abs() < 2.0 * s.tau_int_err);
        let expected_se = (19.0 / x.len() as f64).sqrt();
        assert!(((s.se - expected_se) / expected_se).abs() < 0.2);
        assert!(summarize(&x[..50]).is_err());
    }

    #[test]
    fn summary_csv_layout() {
        let s = summarize(&iid(1000, 9)).unwrap();
        let csv = summary_csv(&[("phi".into(), s)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("parameter,mean,sd,se,tau_int,tau_int_err"));
        assert!(lines.next().unwrap().starts_with("phi,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn tau_is_affine_invariant(seed in any::<u64>(), scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
            let x = ar1(5000, 0.5, seed);
            let y: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
            let (a, b) = (tau_int(&x).unwrap(), tau_int(&y).unwrap());
            prop_assert!((a.tau - b.tau).abs() < 1e-9 * a.tau);
            prop_assert_eq!(a.window, b.window);
        }
    }
}
