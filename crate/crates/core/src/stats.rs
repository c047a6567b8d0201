//! Sample moments, a Kolmogorov–Smirnov distance to the standard normal,
//! batch-means standard errors and least-squares slope fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum sample count for the normality diagnostics.
pub const MIN_NORMALITY_SAMPLES: usize = 100;

/// Mean, unbiased variance and standardized third/fourth moments.
///
/// Skewness and excess kurtosis are `NaN` when the variance is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn summarize(samples: &[f64]) -> Result<Moments> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, need: 2 });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / (nf - 1.0);
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(Moments { n_samples: n, mean, variance, skewness, excess_kurtosis })
}

/// Standard normal CDF via `erfc`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function, Chebyshev-fitted rational approximation
/// with fractional error below 1.2e-7 everywhere (Numerical Recipes `erfcc`).
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let ans = t * poly.exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Sup distance between the empirical CDF of the standardized samples and
/// the standard normal CDF. Samples are standardized by their own mean and
/// unbiased standard deviation; constant samples give 0.5.
pub fn ks_normal(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < MIN_NORMALITY_SAMPLES {
        return Err(Error::TooFewSamples { got: n, need: MIN_NORMALITY_SAMPLES });
    }
    let m = summarize(samples)?;
    let sd = m.variance.sqrt();
    if sd == 0.0 {
        return Ok(0.5);
    }
    let mut z: Vec<f64> = samples
        .iter()
        .map(|&x| (x - m.mean) / sd)
        .collect();
    z.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        // handle ties as one jump of the empirical CDF
        let mut j = i;
        while j + 1 < n && z[j + 1] == z[i] {
            j += 1;
        }
        let cdf = normal_cdf(z[i]);
        d = d.max((cdf - i as f64 / nf).abs()).max(((j + 1) as f64 / nf - cdf).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Moments plus the KS distance and a kernel-side variance prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityReport {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    pub predicted_variance: f64,
}

pub fn normality_report(samples: &[f64], predicted_variance: f64) -> Result<NormalityReport> {
    let ks_statistic = ks_normal(samples)?;
    let m = summarize(samples)?;
    Ok(NormalityReport {
        n_samples: m.n_samples,
        mean: m.mean,
        variance: m.variance,
        skewness: m.skewness,
        excess_kurtosis: m.excess_kurtosis,
        ks_statistic,
        predicted_variance,
    })
}

/// Standard error of the unbiased variance estimate by batch means:
/// `⌊√n⌋` contiguous batches, each contributing its own unbiased variance.
/// Trailing samples that do not fill a batch are dropped.
pub fn batch_means_variance_se(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::TooFewSamples { got: n, need: 4 });
    }
    let batches = (n as f64).sqrt().floor() as usize;
    let size = n / batches;
    let vars: Vec<f64> = samples
        .chunks_exact(size)
        .take(batches)
        .map(|chunk| summarize(chunk).map(|m| m.variance))
        .collect::<Result<_>>()?;
    let spread = summarize(&vars)?;
    Ok((spread.variance / batches as f64).sqrt())
}

/// Ordinary least-squares slope of `variances` against `ln(lengths)`.
pub fn fit_log_slope(lengths: &[u64], variances: &[f64]) -> Result<f64> {
    if lengths.len() != variances.len() {
        return Err(Error::InvalidArgument(format!(
            "{} lengths but {} variances",
            lengths.len(),
            variances.len()
        )));
    }
    if lengths.len() < 3 {
        return Err(Error::DegenerateDesign(format!("{} points, at least 3 required", lengths.len())));
    }
    if lengths.contains(&0) {
        return Err(Error::InvalidArgument("lengths must be positive".into()));
    }
    for (i, l) in lengths.iter().enumerate() {
        if lengths[..i].contains(l) {
            return Err(Error::DegenerateDesign(format!("repeated length {l}")));
        }
    }
    let xs: Vec<f64> = lengths.iter().map(|&l| (l as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = variances.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(variances).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn summarize_examples() {
        let m = summarize(&[3.0; 10]).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(m.skewness.is_nan() && m.excess_kurtosis.is_nan());
        let m = summarize(&[-1.0, 1.0]).unwrap();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.variance, 2.0);
        assert!(matches!(summarize(&[1.0]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn generator_self_test() {
        let m = summarize(&normals(1_000_000, 7)).unwrap();
        assert!(m.skewness.abs() < 0.01, "{}", m.skewness);
        assert!(m.excess_kurtosis.abs() < 0.02, "{}", m.excess_kurtosis);
    }

    #[test]
    fn erfc_accuracy() {
        // 30-digit reference values
        let refs = [
            (0.0, 1.0),
            (0.5, 0.479500122186953462317253346108),
            (1.0, 0.157299207050285130658779364917),
            (2.0, 0.004677734981047265837930743633),
            (-1.0, 1.842700792949714869341220635083),
            (3.5, 7.43098372341412745523683756e-7),
        ];
        for (x, want) in refs {
            assert!((erfc(x) - want).abs() <= 1.2e-7 * want.max(1e-300) + 1e-16, "erfc({x})");
        }
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-7);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-7);
    }

    #[test]
    fn ks_examples() {
        let ks = ks_normal(&normals(10_000, 11)).unwrap();
        assert!(ks < 1.63 / 100.0, "{ks}");
        assert_eq!(ks_normal(&[2.5; 200]).unwrap(), 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let unif = Uniform::new(0.0, 1.0).unwrap();
        let u: Vec<f64> = (0..10_000).map(|_| unif.sample(&mut rng)).collect();
        assert!(ks_normal(&u).unwrap() > 0.05);
        assert!(matches!(ks_normal(&[0.0; 99]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn slope_examples() {
        let lengths = [64u64, 256, 1024, 4096];
        let vars: Vec<f64> = lengths.iter().map(|&l| 0.101321 * (l as f64).ln() + 0.3).collect();
        assert!((fit_log_slope(&lengths, &vars).unwrap() - 0.101321).abs() < 1e-12);
        assert!(matches!(fit_log_slope(&[8, 8, 16], &[1.0, 1.0, 2.0]), Err(Error::DegenerateDesign(_))));
        assert!(matches!(fit_log_slope(&[8, 16], &[1.0, 2.0]), Err(Error::DegenerateDesign(_))));
    }

    #[test]
    fn batch_means_on_normals() {
        // variance of the unbiased variance estimate for N(0,1) is 2/(n−1)
        let xs = normals(40_000, 5);
        let se = batch_means_variance_se(&xs).unwrap();
        let want = (2.0 / 40_000.0f64).sqrt();
        assert!((se / want - 1.0).abs() < 0.25, "{se} vs {want}");
    }
}
