use rand::Rng;
use serde::Serialize;

use super::{corner_count, parallel_samples, sample_plancherel, RngSeed, WindowDpp};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::partitions::descent_window;
use crate::stats;
use crate::variance::{corner_window_variance, pattern_window_variance, poissonized_variance, PatternSpec};

/// Where configurations come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CltSource {
    /// Plancherel diagrams of size `n`.
    Plancherel { n: usize },
    /// Exact sine-process samples on the window.
    Sine { phi: f64 },
}

/// Which count is taken over the window `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CltMode {
    /// `Σ_{i=a}^{b} c_i`
    Plain,
    /// `Σ_{i=a}^{b−1} (c_i − c_i c_{i+1})`
    Corners,
}

/// Normality diagnostics of an integer-valued count.
///
/// Moments describe the raw counts. `ks_statistic` is measured after adding
/// an independent uniform offset in `(−½, ½)` to every count, which removes
/// the lattice steps of the empirical CDF; `ks_statistic_lattice` is the
/// distance for the raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltReport {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    pub ks_statistic_lattice: f64,
    pub predicted_variance: f64,
}

/// Raw counts and their jittered copies, one pair per sample.
pub fn clt_samples(
    source: CltSource,
    mode: CltMode,
    a: i64,
    b: i64,
    samples: u64,
    seed: RngSeed,
) -> Result<Vec<(f64, f64)>> {
    if mode == CltMode::Corners && a >= b {
        return Err(Error::EmptyRange { a, b: b - 1 });
    }
    if a > b {
        return Err(Error::EmptyRange { a, b });
    }
    let count = move |w: &crate::partitions::DescentWindow| -> f64 {
        match mode {
            CltMode::Plain => w.count_ones() as f64,
            CltMode::Corners => corner_count(w, a, b - 1).expect("window covers [a, b]") as f64,
        }
    };
    let out = match source {
        CltSource::Plancherel { n } => parallel_samples(seed, samples, |_, rng| {
            let lambda = sample_plancherel(n, rng);
            let w = descent_window(&lambda, a, b).expect("nonempty window");
            (count(&w), rng.random::<f64>() - 0.5)
        }),
        CltSource::Sine { phi } => {
            let dpp = WindowDpp::new(&KernelSpec::sine(phi)?, a, b)?;
            parallel_samples(seed, samples, |_, rng| {
                let w = dpp.sample(rng);
                (count(&w), rng.random::<f64>() - 0.5)
            })
        }
    };
    Ok(out.into_iter().map(|(x, u)| (x, x + u)).collect())
}

/// Kernel-side variance of the count.
///
/// Sine source: exact finite-window sum. Plancherel source, plain count:
/// the poissonized variance at `θ = √n`. Plancherel corners: the sine
/// process at the local angle `arccos(u/2)` of the window midpoint.
pub fn clt_predicted_variance(source: CltSource, mode: CltMode, a: i64, b: i64) -> Result<f64> {
    match (source, mode) {
        (CltSource::Sine { phi }, CltMode::Plain) => {
            pattern_window_variance(&PatternSpec::single(), phi, (b - a + 1) as u64)
        }
        (CltSource::Sine { phi }, CltMode::Corners) => corner_window_variance(phi, (b - a) as u64),
        (CltSource::Plancherel { n }, CltMode::Plain) => {
            Ok(poissonized_variance(a, b, (n as f64).sqrt())?.value_inside_outside)
        }
        (CltSource::Plancherel { n }, CltMode::Corners) => {
            let mid = 0.5 * (a + b) as f64;
            let u = (mid / (n as f64).sqrt()).clamp(-2.0, 2.0);
            let phi = (u / 2.0).acos();
            if phi <= 0.0 || phi >= std::f64::consts::PI {
                return Err(Error::InvalidArgument("window midpoint lies outside the bulk".into()));
            }
            corner_window_variance(phi, (b - a) as u64)
        }
    }
}

pub fn clt_report(source: CltSource, mode: CltMode, a: i64, b: i64, samples: u64, seed: RngSeed) -> Result<CltReport> {
    let pairs = clt_samples(source, mode, a, b, samples, seed)?;
    let raw: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let jittered: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let predicted_variance = clt_predicted_variance(source, mode, a, b)?;
    let report = stats::normality_report(&raw, predicted_variance)?;
    Ok(CltReport {
        n_samples: report.n_samples,
        mean: report.mean,
        variance: report.variance,
        skewness: report.skewness,
        excess_kurtosis: report.excess_kurtosis,
        ks_statistic: stats::ks_normal(&jittered)?,
        ks_statistic_lattice: report.ks_statistic,
        predicted_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn jitter_is_bounded() {
        let pairs = clt_samples(CltSource::Sine { phi: FRAC_PI_2 }, CltMode::Corners, 0, 31, 200, RngSeed(4)).unwrap();
        for (x, y) in pairs {
            assert_eq!(x.fract(), 0.0);
            assert!((y - x).abs() < 0.5);
        }
    }

    #[test]
    fn sine_variance_matches_prediction() {
        let r = clt_report(CltSource::Sine { phi: FRAC_PI_2 }, CltMode::Plain, 0, 63, 4000, RngSeed(8)).unwrap();
        assert!((r.mean - 32.0).abs() < 4.0 * (r.variance / 4000.0).sqrt());
        // variance of the sample variance is about 2σ⁴/n for near-normal counts
        let se = r.predicted_variance * (2.0 / 4000.0f64).sqrt();
        assert!((r.variance - r.predicted_variance).abs() < 4.0 * se, "{} vs {}", r.variance, r.predicted_variance);
    }

    #[test]
    fn corner_window_guard() {
        assert!(clt_samples(CltSource::Sine { phi: 1.0 }, CltMode::Corners, 3, 3, 200, RngSeed(1)).is_err());
    }
}
