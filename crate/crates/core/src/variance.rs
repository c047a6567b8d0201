//! Exact kernel-sum variances of linear statistics.
//!
//! For a projection kernel `K` the variance of `Σ_{i∈I} c_i` equals
//! `Σ_{i∈I} Σ_{j∉I} K(i, j)²`, and equivalently the trace form
//! `Σ_{i∈I} K(i, i) − Σ_{i,j∈I} K(i, j)²`. Both are computed for the
//! poissonized measure (Bessel kernel). Local patterns `c_{i+x⃗}` are handled
//! under the sine process, where covariances follow from correlation
//! determinants of unions of shifted offset sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{correlation, edge_cutoff, BesselKernel, KernelSpec};
use crate::stats;

/// Largest allowed pattern diameter.
pub const MAX_PATTERN_DIAMETER: i64 = 12;

/// A finite offset set `x⃗`, shifted so that its minimum is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PatternSpec {
    offsets: Vec<i64>,
}

impl PatternSpec {
    pub fn new(offsets: &[i64]) -> Result<Self> {
        let Some(&min) = offsets.iter().min() else {
            return Err(Error::InvalidPattern("pattern must be nonempty".into()));
        };
        let mut sorted: Vec<i64> = offsets.iter().map(|x| x - min).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPattern("offsets must be pairwise distinct".into()));
        }
        let diameter = *sorted.last().expect("nonempty");
        if diameter > MAX_PATTERN_DIAMETER {
            return Err(Error::InvalidPattern(format!(
                "diameter {diameter} exceeds {MAX_PATTERN_DIAMETER}"
            )));
        }
        Ok(Self { offsets: sorted })
    }

    /// The single-site pattern `{0}`.
    pub fn single() -> Self {
        Self { offsets: vec![0] }
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn diameter(&self) -> i64 {
        *self.offsets.last().expect("nonempty")
    }

    /// Sites `d + x` for `x ∈ x⃗`.
    fn shifted(&self, d: i64) -> impl Iterator<Item = i64> + '_ {
        self.offsets.iter().map(move |x| x + d)
    }
}

impl std::fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.offsets.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Both forms of the poissonized variance on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceBreakdown {
    pub a: i64,
    pub b: i64,
    pub theta: f64,
    /// `Σ_{i∈[a,b]} Σ_{j∉[a,b], |j|≤cutoff} J(i,j)²`
    pub value_inside_outside: f64,
    /// `Σ_{i∈[a,b]} J(i,i) − Σ_{i,j∈[a,b]} J(i,j)²`
    pub value_trace_form: f64,
    /// Upper estimate of the mass dropped by truncating `j` at the cutoff.
    pub truncation_bound: f64,
}

/// Poissonized variance of `Σ_{i=a}^{b} c_i` at parameter `θ`.
pub fn poissonized_variance(a: i64, b: i64, theta: f64) -> Result<VarianceBreakdown> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
    }
    check_interval(a, b, theta)?;
    let kernel = BesselKernel::new(theta)?;
    poissonized_variance_with(&kernel, a, b)
}

fn check_interval(a: i64, b: i64, theta: f64) -> Result<()> {
    if a > b {
        return Err(Error::EmptyRange { a, b });
    }
    let cutoff = edge_cutoff(theta);
    if a < -cutoff || b > cutoff {
        return Err(Error::IntervalBeyondEdge { a, b, cutoff });
    }
    Ok(())
}

/// [`poissonized_variance`] with a prebuilt kernel, for sweeps at fixed `θ`.
///
/// Rows `i` are evaluated in parallel; row sums are combined serially in
/// index order so the result does not depend on the thread count.
pub fn poissonized_variance_with(kernel: &BesselKernel, a: i64, b: i64) -> Result<VarianceBreakdown> {
    let theta = kernel.theta();
    check_interval(a, b, theta)?;
    let cutoff = edge_cutoff(theta);
    let rows: Vec<(f64, f64, f64)> = (a..=b)
        .into_par_iter()
        .map(|i| {
            let outside: f64 = (-cutoff..a).chain(b + 1..=cutoff).map(|j| sq(kernel.value(i, j))).sum();
            let inside: f64 = (a..=b).map(|j| sq(kernel.value(i, j))).sum();
            (outside, kernel.value(i, i), inside)
        })
        .collect();
    let mut io = 0.0;
    let mut diag = 0.0;
    let mut inside = 0.0;
    for (o, d, s) in rows {
        io += o;
        diag += d;
        inside += s;
    }
    Ok(VarianceBreakdown {
        a,
        b,
        theta,
        value_inside_outside: io,
        value_trace_form: diag - inside,
        truncation_bound: truncation_bound(kernel, a, b),
    })
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// `Σ_{i∈[a,b]} Σ_{|j|>C} J(i,j)²` bounded via
/// `J(i,j)² ≤ 2θ²(J_i² J_{j+1}² + J_{i+1}² J_j²)/(i−j)²` and a geometric
/// estimate of `Σ_{m>C} J_m²` from the last two table entries.
fn truncation_bound(kernel: &BesselKernel, a: i64, b: i64) -> f64 {
    let t = kernel.table();
    let theta = kernel.theta();
    let cutoff = edge_cutoff(theta);
    let last = t.get_or_zero(cutoff).abs();
    let prev = t.get_or_zero(cutoff - 1).abs();
    let tail = if prev > 0.0 && last < prev {
        let r = last / prev;
        sq(last) / (1.0 - r * r)
    } else {
        sq(last) * (cutoff as f64)
    };
    (a..=b)
        .map(|i| {
            let peak = sq(t.get_or_zero(i)).max(sq(t.get_or_zero(i + 1)));
            let gap = (cutoff + 1 - i.abs()).max(1) as f64;
            // both tails, both terms of the bound
            2.0 * 2.0 * 2.0 * sq(theta) * peak * tail / sq(gap)
        })
        .sum()
}

/// `ln(L)/π²`: the leading-order variance of `Σ c_i` over `L` sites.
pub fn predicted_log_variance(length: u64) -> Result<f64> {
    if length < 2 {
        return Err(Error::InvalidArgument(format!("length must be at least 2, got {length}")));
    }
    Ok((length as f64).ln() / (std::f64::consts::PI * std::f64::consts::PI))
}

/// Centered interval with `length` sites: `[−⌊L/2⌋, −⌊L/2⌋ + L − 1]`.
pub fn centered_interval(length: u64) -> (i64, i64) {
    let a = -((length / 2) as i64);
    (a, a + length as i64 - 1)
}

/// One row of a log-variance sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub length: u64,
    pub breakdown: VarianceBreakdown,
    pub predicted: f64,
}

/// Poissonized variances on centered intervals and their least-squares
/// slope against `ln L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogVarianceSweep {
    pub theta: f64,
    pub rows: Vec<SweepRow>,
    pub slope: f64,
}

pub fn log_variance_sweep(theta: f64, lengths: &[u64]) -> Result<LogVarianceSweep> {
    let kernel = BesselKernel::new(theta)?;
    let mut rows = Vec::with_capacity(lengths.len());
    for &length in lengths {
        let (a, b) = centered_interval(length);
        let breakdown = poissonized_variance_with(&kernel, a, b)?;
        rows.push(SweepRow { length, breakdown, predicted: predicted_log_variance(length)? });
    }
    let vars: Vec<f64> = rows.iter().map(|r| r.breakdown.value_inside_outside).collect();
    let slope = stats::fit_log_slope(lengths, &vars)?;
    Ok(LogVarianceSweep { theta, rows, slope })
}

fn sine(phi: f64) -> Result<KernelSpec> {
    if !(phi > 0.0 && phi < std::f64::consts::PI) {
        return Err(Error::InvalidArgument(format!("phi must lie in (0, π), got {phi}")));
    }
    KernelSpec::sine(phi)
}

/// `E[c_{i+x⃗}]` under the sine process: the correlation of the offset set.
pub fn pattern_expectation(pattern: &PatternSpec, phi: f64) -> Result<f64> {
    correlation(pattern.offsets(), &sine(phi)?)
}

/// `Cov(c_{0+p⃗}, c_{d+q⃗})` under the sine kernel `K`.
fn mixed_covariance_with(p: &PatternSpec, q: &PatternSpec, d: i64, kernel: &KernelSpec, ep: f64, eq: f64) -> Result<f64> {
    let mut union: Vec<i64> = p.shifted(0).chain(q.shifted(d)).collect();
    union.sort_unstable();
    union.dedup();
    Ok(correlation(&union, kernel)? - ep * eq)
}

/// `Cov(c_{0+x⃗}, c_{d+x⃗})`; overlapping shifts share sites since `c² = c`.
pub fn pattern_covariance(pattern: &PatternSpec, d: i64, phi: f64) -> Result<f64> {
    mixed_pattern_covariance(pattern, pattern, d, phi)
}

/// `Cov(c_{0+p⃗}, c_{d+q⃗})` for two patterns.
pub fn mixed_pattern_covariance(p: &PatternSpec, q: &PatternSpec, d: i64, phi: f64) -> Result<f64> {
    check_shift(d)?;
    let kernel = sine(phi)?;
    let ep = correlation(p.offsets(), &kernel)?;
    let eq = correlation(q.offsets(), &kernel)?;
    mixed_covariance_with(p, q, d, &kernel, ep, eq)
}

fn check_shift(d: i64) -> Result<()> {
    if d.abs() > 1_000_000 {
        return Err(Error::InvalidArgument(format!("|d| must be at most 1e6, got {d}")));
    }
    Ok(())
}

/// A truncated covariance sum with an estimate of the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    /// Remainder estimate `2C/tail` with `C` the largest `d²|cov_d|` over
    /// the outermost hundred shifts.
    pub remainder_bound: f64,
}

/// `Σ_{|d|≤tail} Cov(c_{0+x⃗}, c_{d+x⃗})`: the per-site variance growth of the
/// pattern count under the sine process.
pub fn pattern_variance_density(pattern: &PatternSpec, phi: f64, tail: i64) -> Result<DensityEstimate> {
    mixed_pattern_variance_density(pattern, pattern, phi, tail)
}

/// `Σ_{|d|≤tail} Cov(c_{0+p⃗}, c_{d+q⃗})`, summed from the outside in as
/// `±d` pairs.
pub fn mixed_pattern_variance_density(p: &PatternSpec, q: &PatternSpec, phi: f64, tail: i64) -> Result<DensityEstimate> {
    if tail < 1000 {
        return Err(Error::InvalidArgument(format!("tail must be at least 1000, got {tail}")));
    }
    check_shift(tail)?;
    let kernel = sine(phi)?;
    let ep = correlation(p.offsets(), &kernel)?;
    let eq = correlation(q.offsets(), &kernel)?;
    let cov = |d: i64| mixed_covariance_with(p, q, d, &kernel, ep, eq);

    const CHUNK: i64 = 4096;
    let chunks: Vec<(i64, i64)> = (0..)
        .map(|c| (1 + c * CHUNK, (1 + (c + 1) * CHUNK - 1).min(tail)))
        .take_while(|(lo, _)| *lo <= tail)
        .collect();
    let partials: Vec<(f64, f64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| -> Result<(f64, f64)> {
            let mut s = 0.0;
            let mut envelope: f64 = 0.0;
            for d in (lo..=hi).rev() {
                let pair = cov(d)? + cov(-d)?;
                s += pair;
                if d > tail - 100 {
                    envelope = envelope.max(pair.abs() * (d * d) as f64);
                }
            }
            Ok((s, envelope))
        })
        .collect::<Result<_>>()?;
    let mut value = 0.0;
    let mut envelope: f64 = 0.0;
    for (s, e) in partials.into_iter().rev() {
        value += s;
        envelope = envelope.max(e);
    }
    value += cov(0)?;
    Ok(DensityEstimate { value, remainder_bound: envelope / tail as f64 })
}

/// Per-site variance growth of the corner count `Σ (c_i − c_i c_{i+1})`:
/// `Σ_d [cov_d({0},{0}) − 2 cov_d({0},{0,1}) + cov_d({0,1},{0,1})]`.
pub fn corner_variance_density(phi: f64, tail: i64) -> Result<DensityEstimate> {
    let single = PatternSpec::single();
    let pair = PatternSpec::new(&[0, 1])?;
    let a = pattern_variance_density(&single, phi, tail)?;
    let ab = mixed_pattern_variance_density(&single, &pair, phi, tail)?;
    let b = pattern_variance_density(&pair, phi, tail)?;
    Ok(DensityEstimate {
        value: a.value - 2.0 * ab.value + b.value,
        remainder_bound: a.remainder_bound + 2.0 * ab.remainder_bound + b.remainder_bound,
    })
}

/// Exact sine-process variance of `Σ_{i=0}^{L−1} (α c_{i+p⃗} + β c_{i+q⃗})`
/// summed as `Σ_{|d|<L} (L − |d|) cov_d`.
fn window_combination_variance(terms: &[(f64, &PatternSpec)], phi: f64, length: u64) -> Result<f64> {
    if length == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    let kernel = sine(phi)?;
    let l = length as i64;
    let mut total = 0.0;
    for &(alpha, p) in terms {
        let ep = correlation(p.offsets(), &kernel)?;
        for &(beta, q) in terms {
            let eq = correlation(q.offsets(), &kernel)?;
            let parts: Vec<f64> = (-(l - 1)..l)
                .into_par_iter()
                .map(|d| mixed_covariance_with(p, q, d, &kernel, ep, eq).map(|c| (l - d.abs()) as f64 * c))
                .collect::<Result<_>>()?;
            total += alpha * beta * parts.iter().sum::<f64>();
        }
    }
    Ok(total)
}

/// Sine-process variance of the pattern count over `L` consecutive sites.
pub fn pattern_window_variance(pattern: &PatternSpec, phi: f64, length: u64) -> Result<f64> {
    window_combination_variance(&[(1.0, pattern)], phi, length)
}

/// Sine-process variance of the corner count over `L` consecutive sites.
pub fn corner_window_variance(phi: f64, length: u64) -> Result<f64> {
    let single = PatternSpec::single();
    let pair = PatternSpec::new(&[0, 1])?;
    window_combination_variance(&[(1.0, &single), (-1.0, &pair)], phi, length)
}

/// Variance of `Σ_{i=a}^{b} c_{i+x⃗}` under an arbitrary kernel, summing
/// `Cov(c_{i+x⃗}, c_{j+x⃗})` over all pairs `i, j ∈ [a, b]`.
pub fn kernel_pattern_variance(kernel: &KernelSpec, pattern: &PatternSpec, a: i64, b: i64) -> Result<f64> {
    if a > b {
        return Err(Error::EmptyRange { a, b });
    }
    if b - a > 100_000 {
        return Err(Error::InvalidArgument(format!("interval [{a}, {b}] is too long for a pairwise sum")));
    }
    let means: Vec<f64> = (a..=b)
        .map(|i| correlation(&pattern.shifted(i).collect::<Vec<_>>(), kernel))
        .collect::<Result<_>>()?;
    let rows: Vec<f64> = (a..=b)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut s = 0.0;
            for j in a..=b {
                let mut union: Vec<i64> = pattern.shifted(i).chain(pattern.shifted(j)).collect();
                union.sort_unstable();
                union.dedup();
                s += correlation(&union, kernel)? - means[(i - a) as usize] * means[(j - a) as usize];
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum())
}
