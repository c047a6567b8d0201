//! Young diagrams: construction, enumeration, dimensions, Plancherel weights,
//! descent sequences and the rotated profile.
//!
//! Diagrams are drawn in the rotated ("Russian") convention. The descent
//! sequence `c_k(λ)` is 1 exactly when `k = λ_i − i` for some row `i ≥ 1`,
//! with `λ_i = 0` past the last row, so the empty diagram has `c_k = 1` for
//! every `k ≤ −1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on `n` for [`enumerate_partitions`]; p(40) = 37338.
pub const DEFAULT_ENUMERATION_CAP: usize = 40;

/// A partition of `n` into weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
    size: usize,
}

impl Partition {
    /// Validates `parts` and builds the partition.
    pub fn new<I>(parts: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<i64>,
    {
        let mut out = Vec::new();
        let mut prev = i64::MAX;
        for (index, p) in parts.into_iter().enumerate() {
            let value: i64 = p.into();
            if value <= 0 {
                return Err(Error::NonPositivePart { index, value });
            }
            if value > prev {
                return Err(Error::NonMonotonic { index, value });
            }
            prev = value;
            out.push(value as usize);
        }
        let size = out.iter().sum();
        Ok(Self { parts: out, size })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Internal constructor for parts already known to be valid.
    pub(crate) fn from_sorted_parts(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        let size = parts.iter().sum();
        Self { parts, size }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of cells `n = |λ|`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of nonzero rows `m`.
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    /// Length of the first row, 0 for the empty diagram.
    pub fn first_row(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Conjugate (transposed) diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = (1..=self.first_row())
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition::from_sorted_parts(cols)
    }

    /// Hook lengths of all cells, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut hooks = Vec::with_capacity(self.size);
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = conj.parts[j] - i - 1;
                hooks.push(arm + leg + 1);
            }
        }
        hooks
    }

    /// Number of `i ≥ 1` with `λ_i − i ≥ k`, counting the infinite tail of
    /// empty rows. Finite for every `k`.
    fn count_at_or_above(&self, k: i64) -> i64 {
        let m = self.parts.len();
        // λ_i − i is strictly decreasing in i, so the matching rows form a prefix.
        let mut lo = 0usize;
        let mut hi = m;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.parts[mid] as i64 - (mid as i64 + 1) >= k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let tail = if lo == m {
            // rows i > m contribute −i ≥ k  ⇔  i ≤ −k
            (-k - m as i64).max(0)
        } else {
            0
        };
        lo as i64 + tail
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("-");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `"4,2,1"`; `"-"` (or an empty string) is the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::ParsePartition(s.to_string()))?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All partitions of `n` in lexicographically decreasing order of their part
/// sequences (`(n)` first, `(1^n)` last), with the default cap.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_sorted_parts(current.clone()));
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of standard Young tableaux of shape `λ`, by the hook-length formula.
pub fn dimension(lambda: &Partition) -> BigUint {
    let hook_product = lambda
        .hooks()
        .into_iter()
        .fold(BigUint::one(), |acc, h| acc * BigUint::from(h));
    let n_fact = factorial(lambda.size());
    debug_assert_eq!(&n_fact % &hook_product, BigUint::ZERO);
    n_fact / hook_product
}

/// An exact probability stored as a reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactProb(Ratio<BigUint>);

impl ExactProb {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator == BigUint::ZERO {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if numerator > denominator {
            return Err(Error::InvalidArgument("probability exceeds 1".into()));
        }
        Ok(Self(Ratio::new(numerator, denominator)))
    }

    pub fn numerator(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &Ratio<BigUint> {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        // Both parts may overflow f64 individually for large n; fall back to logs.
        match (self.numerator().to_f64(), self.denominator().to_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
            _ => (big_ln(self.numerator()) - big_ln(self.denominator())).exp(),
        }
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Plancherel weight `(dim λ)² / n!`.
pub fn plancherel_prob(lambda: &Partition) -> ExactProb {
    let d = dimension(lambda);
    ExactProb(Ratio::new(&d * &d, factorial(lambda.size())))
}

/// Poissonized Plancherel weight `e^{−η} η^n (dim λ)² / (n!)²`, which equals
/// `e^{−η} η^n / Π h²` over the hook lengths `h`. Evaluated in log space.
pub fn poissonized_prob(lambda: &Partition, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("eta must be finite and nonnegative, got {eta}")));
    }
    let n = lambda.size();
    if n == 0 {
        return Ok((-eta).exp());
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let log_hooks: f64 = lambda.hooks().iter().map(|&h| (h as f64).ln()).sum();
    Ok((-eta + n as f64 * eta.ln() - 2.0 * log_hooks).exp())
}

/// `c_k(λ)`: whether `k = λ_i − i` for some row `i ≥ 1`. O(log m).
pub fn descent(lambda: &Partition, k: i64) -> bool {
    lambda.count_at_or_above(k) - lambda.count_at_or_above(k + 1) == 1
}

/// Materialized descent bits `c_origin, …, c_{origin+len−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentWindow {
    origin: i64,
    bits: Vec<bool>,
}

impl DescentWindow {
    pub fn new(origin: i64, bits: Vec<bool>) -> Self {
        Self { origin, bits }
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Last index covered by the window.
    pub fn end(&self) -> i64 {
        self.origin + self.bits.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `c_k` for `k` inside the window, `None` outside.
    pub fn get(&self, k: i64) -> Option<bool> {
        let idx = k.checked_sub(self.origin)?;
        usize::try_from(idx).ok().and_then(|i| self.bits.get(i).copied())
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `Σ_{i=a}^{b} Π_{x ∈ offsets} c_{i+x}`; every index touched must lie in the window.
    pub fn pattern_count(&self, a: i64, b: i64, offsets: &[i64]) -> Option<usize> {
        let mut total = 0;
        for i in a..=b {
            let mut all = true;
            for &x in offsets {
                if !self.get(i + x)? {
                    all = false;
                }
            }
            total += all as usize;
        }
        Some(total)
    }
}

impl fmt::Display for DescentWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Descent bits on `[a, b]` in O(len + m).
pub fn descent_window(lambda: &Partition, a: i64, b: i64) -> Result<DescentWindow> {
    if a > b {
        return Err(Error::EmptyRange { a, b });
    }
    let len = (b - a + 1) as usize;
    let mut bits = vec![false; len];
    let m = lambda.rows() as i64;
    for (i, &p) in lambda.parts().iter().enumerate() {
        let k = p as i64 - (i as i64 + 1);
        if (a..=b).contains(&k) {
            bits[(k - a) as usize] = true;
        }
    }
    // empty rows i > m sit at k = −i ≤ −m − 1
    let tail_top = -m - 1;
    if a <= tail_top {
        for k in a..=tail_top.min(b) {
            bits[(k - a) as usize] = true;
        }
    }
    Ok(DescentWindow { origin: a, bits })
}

/// The upper boundary `Φ_λ` of the rotated diagram.
///
/// At integers, `Φ_λ(k) = k + 2·#{i ≥ 1 : λ_i − i ≥ k}`: summing the slopes
/// `1 − 2c_j` leftward from `Φ_λ(λ_1) = λ_1`. Linear in between.
pub fn profile_phi(lambda: &Partition, t: f64) -> f64 {
    let m = lambda.rows() as f64;
    let top = lambda.first_row() as f64;
    if t >= top || t <= -m || !t.is_finite() {
        return t.abs();
    }
    let k = t.floor() as i64;
    let at_k = k as f64 + 2.0 * lambda.count_at_or_above(k) as f64;
    let slope = if descent(lambda, k) { -1.0 } else { 1.0 };
    at_k + slope * (t - k as f64)
}

/// The limit shape `Ω(t) = (2/π)(t·arcsin(t/2) + √(4 − t²))` on `|t| ≤ 2`, `|t|` outside.
pub fn omega(t: f64) -> f64 {
    if t.abs() > 2.0 {
        return t.abs();
    }
    let s = (t / 2.0).clamp(-1.0, 1.0);
    std::f64::consts::FRAC_2_PI * (t * s.asin() + (4.0 - t * t).max(0.0).sqrt())
}

/// `F_λ(t) = Φ_λ(t) − √n Ω(t/√n)` with `n = |λ|` enforced. For `n = 0` the
/// scaled shape degenerates to `|t|`.
pub fn deviation_f(lambda: &Partition, t: f64, n: usize) -> Result<f64> {
    if n != lambda.size() {
        return Err(Error::SizeMismatch { expected: n, actual: lambda.size() });
    }
    let phi = profile_phi(lambda, t);
    if n == 0 {
        return Ok(phi - t.abs());
    }
    let root = (n as f64).sqrt();
    Ok(phi - root * omega(t / root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(parts: &[i64]) -> Partition {
        Partition::new(parts.iter().copied()).unwrap()
    }

    // Brute-force oracle: number of ways to fill the diagram with 1..n
    // increasing along rows and columns, removing the largest entry from a corner.
    fn count_syt(parts: &[usize]) -> u64 {
        if parts.is_empty() {
            return 1;
        }
        let mut total = 0;
        for i in 0..parts.len() {
            let is_corner = i + 1 == parts.len() || parts[i + 1] < parts[i];
            if is_corner {
                let mut smaller = parts.to_vec();
                smaller[i] -= 1;
                if smaller[i] == 0 {
                    smaller.pop();
                }
                total += count_syt(&smaller);
            }
        }
        total
    }

    // Oracle: p(n) by Euler's pentagonal recurrence.
    fn pentagonal_count(n: usize) -> u64 {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for i in 1..=n {
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > i {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[i] += sign * p[i - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= i {
                    p[i] += sign * p[i - g2];
                }
                k += 1;
            }
        }
        p[n] as u64
    }

    #[test]
    fn make_partition_validates() {
        let e = Partition::new(Vec::<i64>::new()).unwrap();
        assert_eq!(e.size(), 0);
        assert_eq!(p(&[2, 1]).size(), 3);
        assert!(matches!(Partition::new([1i64, 2]), Err(Error::NonMonotonic { index: 1, value: 2 })));
        assert!(matches!(Partition::new([2i64, 0]), Err(Error::NonPositivePart { .. })));
        assert!(matches!(Partition::new([-1i64]), Err(Error::NonPositivePart { .. })));
    }

    #[test]
    fn text_format() {
        assert_eq!(p(&[4, 2, 1]).to_string(), "4,2,1");
        assert_eq!(Partition::empty().to_string(), "-");
        assert_eq!("4,2,1".parse::<Partition>().unwrap(), p(&[4, 2, 1]));
        assert_eq!("-".parse::<Partition>().unwrap(), Partition::empty());
        assert!("2,x".parse::<Partition>().is_err());
        assert!("1,2".parse::<Partition>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        // brute force: all compositions of 4 that are weakly decreasing
        let mut brute = 0;
        for mask in 0u32..(1 << 3) {
            let mut parts = vec![1usize];
            for bit in 0..3 {
                if mask & (1 << bit) != 0 {
                    parts.push(1);
                } else {
                    *parts.last_mut().unwrap() += 1;
                }
            }
            if parts.windows(2).all(|w| w[0] >= w[1]) {
                brute += 1;
            }
        }
        assert_eq!(enumerate_partitions(4).unwrap().len(), brute);
        assert_eq!(brute, 5);
        for n in 0..=25 {
            assert_eq!(enumerate_partitions(n).unwrap().len() as u64, pentagonal_count(n));
        }
        assert_eq!(pentagonal_count(10), 42);
        assert!(matches!(enumerate_partitions(41), Err(Error::CapExceeded { n: 41, cap: 40 })));
    }

    #[test]
    fn enumeration_order_is_lex_decreasing() {
        let all = enumerate_partitions(6).unwrap();
        assert_eq!(all.first().unwrap(), &p(&[6]));
        assert_eq!(all.last().unwrap(), &p(&[1, 1, 1, 1, 1, 1]));
        for w in all.windows(2) {
            assert!(w[0].parts() > w[1].parts());
        }
    }

    #[test]
    fn dimensions_match_tableau_count() {
        assert_eq!(dimension(&p(&[5])), BigUint::from(1u32));
        assert_eq!(count_syt(&[2, 1]), 2);
        assert_eq!(count_syt(&[3, 2]), 5);
        assert_eq!(dimension(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(dimension(&p(&[3, 2])), BigUint::from(5u32));
        for n in 0..=9 {
            for lam in enumerate_partitions(n).unwrap() {
                assert_eq!(dimension(&lam), BigUint::from(count_syt(lam.parts())), "{lam}");
            }
        }
    }

    #[test]
    fn plancherel_values() {
        assert_eq!(plancherel_prob(&p(&[1])).to_string(), "1/1");
        assert_eq!(plancherel_prob(&p(&[2, 1])).to_string(), "2/3");
        let total = enumerate_partitions(6)
            .unwrap()
            .iter()
            .map(|l| plancherel_prob(l).as_ratio().clone())
            .fold(Ratio::from_integer(BigUint::ZERO), |a, b| a + b);
        assert!(total.is_one());
    }

    #[test]
    fn poissonized_values() {
        for eta in [0.0, 0.5, 3.0] {
            assert!((poissonized_prob(&Partition::empty(), eta).unwrap() - (-eta).exp()).abs() < 1e-15);
        }
        assert!((poissonized_prob(&p(&[1]), 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        // Poisson(4) mass beyond 30 is < 1e-13, so the truncated sum is 1 within 1e-10.
        let mut total = 0.0;
        for n in 0..=30 {
            for lam in enumerate_partitions(n).unwrap() {
                total += poissonized_prob(&lam, 4.0).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        assert!(poissonized_prob(&p(&[1]), -1.0).is_err());
    }

    #[test]
    fn descent_examples() {
        let e = Partition::empty();
        assert!(descent(&e, -1));
        assert!(!descent(&e, 0));
        let l = p(&[2, 1]);
        let got: Vec<bool> = (-3..=1).map(|k| descent(&l, k)).collect();
        assert_eq!(got, vec![true, false, true, false, true]);
        for k in 3..10 {
            assert!(!descent(&l, k));
        }
    }

    #[test]
    fn window_examples() {
        let w = descent_window(&Partition::empty(), -2, 1).unwrap();
        assert_eq!(w.to_string(), "1100");
        assert_eq!(descent_window(&p(&[2, 1]), -3, 1).unwrap().to_string(), "10101");
        assert_eq!(descent_window(&p(&[4]), 0, 3).unwrap().to_string(), "0001");
        assert!(matches!(descent_window(&p(&[4]), 3, 0), Err(Error::EmptyRange { .. })));
        assert_eq!(w.get(-2), Some(true));
        assert_eq!(w.get(2), None);
    }

    #[test]
    fn profile_examples() {
        for t in [-3.5, -1.0, 0.0, 0.25, 2.0] {
            assert_eq!(profile_phi(&Partition::empty(), t), t.abs());
        }
        let one = p(&[1]);
        assert_eq!(profile_phi(&one, 0.0), 2.0);
        assert_eq!(profile_phi(&one, 1.0), 1.0);
        assert_eq!(profile_phi(&one, -1.0), 1.0);
        assert_eq!(profile_phi(&one, 0.5), 1.5);
        assert_eq!(profile_phi(&p(&[2, 1]), 0.0), 2.0);
        assert_eq!(profile_phi(&p(&[2, 1]), 1.0), 3.0);
    }

    #[test]
    fn area_identity_small() {
        for n in 0..=12 {
            for lam in enumerate_partitions(n).unwrap() {
                let lo = -(lam.rows() as i64) - 1;
                let hi = lam.first_row() as i64 + 1;
                // trapezoid rule is exact on a piecewise-linear integrand with integer kinks
                let area: f64 = (lo..hi)
                    .map(|k| {
                        let f = |t: f64| profile_phi(&lam, t) - t.abs();
                        0.5 * (f(k as f64) + f(k as f64 + 1.0))
                    })
                    .sum();
                assert_eq!(area / 2.0, n as f64, "{lam}");
            }
        }
    }

    #[test]
    fn omega_values() {
        assert!((omega(0.0) - 4.0 / PI).abs() < 1e-15);
        assert!((omega(2.0) - 2.0).abs() < 1e-15);
        assert!((omega(-2.0) - 2.0).abs() < 1e-15);
        assert_eq!(omega(3.0), 3.0);
        for i in -40..=40 {
            let t = i as f64 * 0.1;
            assert!(omega(t) >= t.abs() - 1e-15);
            assert!((omega(t) - omega(-t)).abs() < 1e-15);
        }
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(deviation_f(&Partition::empty(), 1.3, 0).unwrap(), 0.0);
        let f = deviation_f(&p(&[1]), 0.0, 1).unwrap();
        assert!((f - (2.0 - 4.0 / PI)).abs() < 1e-15);
        assert!(matches!(deviation_f(&p(&[1]), 0.0, 2), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn hooks_and_conjugate() {
        let l = p(&[3, 1]);
        assert_eq!(l.conjugate(), p(&[2, 1, 1]));
        assert_eq!(l.hooks(), vec![4, 2, 1, 1]);
    }
}
