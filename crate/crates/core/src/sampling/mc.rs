use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{sample_plancherel, RngSeed};
use crate::cli::format_float;
use crate::error::{Error, Result};
use crate::partitions::{descent_window, DescentWindow, Partition};
use crate::stats;
use crate::variance::PatternSpec;

/// Runs `f` on samples `0..count`, each with its own stream, in parallel.
/// Results come back in index order.
pub fn parallel_samples<T, F>(seed: RngSeed, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count).into_par_iter().map(|i| f(i, &mut seed.stream(i))).collect()
}

/// `g(λ)` for `samples` independent Plancherel diagrams of size `n`.
pub fn plancherel_statistic_samples<F>(n: usize, samples: u64, seed: RngSeed, g: F) -> Vec<f64>
where
    F: Fn(&Partition) -> f64 + Sync,
{
    parallel_samples(seed, samples, |_, rng| g(&sample_plancherel(n, rng)))
}

/// `Σ_{i=a}^{b} (c_i − c_i c_{i+1})`: the number of corners whose
/// descent site lies in `[a, b]`. Needs `c_{b+1}` in the window.
pub fn corner_count(window: &DescentWindow, a: i64, b: i64) -> Option<i64> {
    let ones = window.pattern_count(a, b, &[0])? as i64;
    let pairs = window.pattern_count(a, b, &[0, 1])? as i64;
    Some(ones - pairs)
}

/// Summary of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McReport {
    pub n_samples: usize,
    pub seed: RngSeed,
    pub mean: f64,
    pub variance: f64,
    pub std_error_of_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl McReport {
    pub fn from_samples(samples: &[f64], seed: RngSeed) -> Result<Self> {
        let m = stats::summarize(samples)?;
        let std_error_of_variance = if samples.len() >= 4 { stats::batch_means_variance_se(samples)? } else { 0.0 };
        Ok(Self {
            n_samples: m.n_samples,
            seed,
            mean: m.mean,
            variance: m.variance,
            std_error_of_variance,
            skewness: m.skewness,
            excess_kurtosis: m.excess_kurtosis,
        })
    }

    pub const CSV_HEADER: &'static str = "n_samples,seed,mean,variance,std_error_of_variance,skewness,excess_kurtosis";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n_samples,
            self.seed,
            format_float(self.mean),
            format_float(self.variance),
            format_float(self.std_error_of_variance),
            format_float(self.skewness),
            format_float(self.excess_kurtosis)
        )
    }
}

/// Statistics of `S(λ) = Σ_{i=a}^{b} Π_{x∈x⃗} c_{i+x}(λ)` over Plancherel
/// samples of size `n`.
pub fn mc_linear_statistic(
    n: usize,
    a: i64,
    b: i64,
    pattern: &PatternSpec,
    samples: u64,
    seed: RngSeed,
) -> Result<McReport> {
    let values = linear_statistic_samples(n, a, b, pattern, samples, seed)?;
    McReport::from_samples(&values, seed)
}

pub(crate) fn linear_statistic_samples(
    n: usize,
    a: i64,
    b: i64,
    pattern: &PatternSpec,
    samples: u64,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::TooFewSamples { got: samples as usize, need: 2 });
    }
    if a > b {
        return Err(Error::EmptyRange { a, b });
    }
    let end = b + pattern.diameter();
    Ok(plancherel_statistic_samples(n, samples, seed, |lambda| {
        let w = descent_window(lambda, a, end).expect("nonempty window");
        w.pattern_count(a, b, pattern.offsets()).expect("window covers pattern") as f64
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_single_diagram() {
        let r = mc_linear_statistic(1, 0, 0, &PatternSpec::single(), 10, RngSeed(1)).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.std_error_of_variance, 0.0);
        assert!(matches!(
            mc_linear_statistic(5, 0, 0, &PatternSpec::single(), 1, RngSeed(1)),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn corner_examples() {
        // c = 1 1 0 1 0 0 1 on sites 0..6
        let w = DescentWindow::new(0, vec![true, true, false, true, false, false, true]);
        assert_eq!(corner_count(&w, 0, 5), Some(2));
        assert_eq!(corner_count(&w, 0, 6), None);
    }

    #[test]
    fn same_report_under_any_pool() {
        let run = || mc_linear_statistic(200, -5, 5, &PatternSpec::single(), 300, RngSeed(77)).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(one.csv_row(), four.csv_row());
    }
}
