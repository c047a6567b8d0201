//! Integer-order Bessel functions `J_m(x)` on a symmetric order range, by
//! Miller's backward recurrence.

use crate::error::{Error, Result};

/// Order beyond which kernel contributions at parameter `θ` are negligible:
/// `⌈2θ + 8θ^{1/3} + 40⌉`. The transition zone around `2θ` has width of
/// order `θ^{1/3}`.
pub fn edge_cutoff(theta: f64) -> i64 {
    (2.0 * theta + 8.0 * theta.cbrt() + 40.0).ceil() as i64
}

// Rescale threshold during the recurrence; values stay far from overflow.
const BIG: f64 = 1e250;

/// `J_m(x)` for `m ∈ [−M, M]` at a fixed argument `x = 2θ`, plus suffix sums
/// of squares `Σ_{k ≥ m} J_k²` over the table.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    argument: f64,
    max_order: i64,
    values: Vec<f64>,
    tail_sq: Vec<f64>,
}

impl BesselTable {
    /// The argument `x` (equal to `2θ` for kernel use).
    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn max_order(&self) -> i64 {
        self.max_order
    }

    /// `J_m(x)` if `|m| ≤ M`.
    #[inline]
    pub fn get(&self, m: i64) -> Option<f64> {
        if m.abs() > self.max_order {
            None
        } else {
            Some(self.values[(m + self.max_order) as usize])
        }
    }

    /// `J_m(x)` with orders beyond the table read as 0. Only meaningful when
    /// the table reaches past the edge of the spectrum.
    #[inline]
    pub fn get_or_zero(&self, m: i64) -> f64 {
        self.get(m).unwrap_or(0.0)
    }

    /// `Σ_{k=m}^{M} J_k²`, clamped to the table: 0 above `M`, the full sum
    /// below `−M`.
    #[inline]
    pub fn tail_sum_sq(&self, m: i64) -> f64 {
        if m > self.max_order {
            0.0
        } else {
            let m = m.max(-self.max_order);
            self.tail_sq[(m + self.max_order) as usize]
        }
    }

    /// `Σ_m J_m²` over the table; 1 up to truncation.
    pub fn sum_sq(&self) -> f64 {
        self.tail_sum_sq(-self.max_order)
    }

    /// `J_0 + 2 Σ_{k ≥ 1} J_{2k}` over the table; 1 up to truncation.
    pub fn even_sum(&self) -> f64 {
        let mut s = 0.0;
        let mut k = self.max_order - self.max_order % 2;
        while k >= 2 {
            s += 2.0 * self.get_or_zero(k);
            k -= 2;
        }
        s + self.get_or_zero(0)
    }

    /// Orders `m ≥ 0` in the table, as a slice starting at `J_0`.
    pub fn nonnegative(&self) -> &[f64] {
        &self.values[self.max_order as usize..]
    }
}

/// Miller start-order padding above `max_order`.
fn start_padding(x: f64) -> i64 {
    (x.ceil() as i64).max(20) + 15
}

/// Builds `J_m(x)` for `|m| ≤ max_order`.
///
/// Backward recurrence `J_{m−1} = (2m/x) J_m − J_{m+1}` from an order
/// `max_order + max(⌈x⌉, 20) + 15` with arbitrary seed values, normalized
/// by `J_0 + 2 Σ J_{2k} = 1`. Negative orders follow from
/// `J_{−m} = (−1)^m J_m`. At `x = 0` the table is `δ_{m,0}`.
pub fn bessel_row(x: f64, max_order: i64) -> Result<BesselTable> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel argument must be finite and nonnegative, got {x}")));
    }
    if max_order < 0 {
        return Err(Error::InvalidArgument(format!("max_order must be nonnegative, got {max_order}")));
    }
    let m_max = max_order as usize;
    let mut pos = vec![0.0; m_max + 1];
    if x == 0.0 {
        pos[0] = 1.0;
    } else {
        let start = (max_order + start_padding(x)) as usize;
        let mut work = vec![0.0; start + 2];
        work[start] = 1e-300;
        for m in (1..=start).rev() {
            let next = (2.0 * m as f64 / x) * work[m] - work[m + 1];
            work[m - 1] = next;
            if next.abs() > BIG {
                for w in &mut work[m - 1..] {
                    *w /= BIG;
                }
            }
        }
        let mut norm = work[0];
        let mut k = 2;
        while k <= start {
            norm += 2.0 * work[k];
            k += 2;
        }
        for (m, slot) in pos.iter_mut().enumerate() {
            *slot = work[m] / norm;
        }
    }

    let len = 2 * m_max + 1;
    let mut values = vec![0.0; len];
    for m in 0..=m_max {
        values[m_max + m] = pos[m];
        values[m_max - m] = if m % 2 == 0 { pos[m] } else { -pos[m] };
    }
    let mut tail_sq = vec![0.0; len];
    let mut acc = 0.0;
    for i in (0..len).rev() {
        acc += values[i] * values[i];
        tail_sq[i] = acc;
    }
    Ok(BesselTable { argument: x, max_order, values, tail_sq })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power-series oracle: J_n(x) = Σ_k (−1)^k (x/2)^{2k+n} / (k! (k+n)!)
    fn series(n: u32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..40u32 {
            term *= -(x / 2.0).powi(2) / (k as f64 * (k + n) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn zero_argument() {
        let t = bessel_row(0.0, 5).unwrap();
        assert_eq!(t.get(0), Some(1.0));
        for m in 1..=5 {
            assert_eq!(t.get(m), Some(0.0));
            assert_eq!(t.get(-m), Some(0.0));
        }
        assert_eq!(t.get(6), None);
    }

    #[test]
    fn matches_power_series() {
        let oracle = series(0, 2.0);
        assert!((oracle - 0.22389077914123567).abs() < 1e-16);
        let t = bessel_row(2.0, 10).unwrap();
        assert!((t.get(0).unwrap() - oracle).abs() < 1e-15);
        for x in [0.5, 2.0, 7.5] {
            let t = bessel_row(x, 12).unwrap();
            for n in 0..=12 {
                let want = series(n, x);
                assert!((t.get(n as i64).unwrap() - want).abs() < 1e-13, "J_{n}({x})");
            }
        }
    }

    #[test]
    fn parity_and_sums() {
        let t = bessel_row(2.0, 10).unwrap();
        assert_eq!(t.get(-3).unwrap(), -t.get(3).unwrap());
        assert_eq!(t.get(-4).unwrap(), t.get(4).unwrap());
        for theta in [0.5, 5.0, 50.0, 500.0, 2000.0] {
            let t = bessel_row(2.0 * theta, edge_cutoff(theta)).unwrap();
            assert!((t.even_sum() - 1.0).abs() < 1e-12, "theta {theta}");
            assert!((t.sum_sq() - 1.0).abs() < 1e-10, "theta {theta}: {}", t.sum_sq());
        }
    }

    #[test]
    fn large_argument_reference_values() {
        // Reference values from a 40-digit evaluation.
        let t = bessel_row(100.0, 200).unwrap();
        assert!((t.get(0).unwrap() - 0.019985850304223122).abs() < 1e-14);
        assert!((t.get(50).unwrap() - (-0.038698339728525383)).abs() < 1e-14);
        assert!((t.get(99).unwrap() - 0.11524392532303780).abs() < 1e-14);
        assert!((t.get(150).unwrap() / 2.7229021718820481e-16 - 1.0).abs() < 1e-10);
        let t = bessel_row(4000.0, 4200).unwrap();
        assert!((t.get(0).unwrap() - (-0.012608844878571356)).abs() < 1e-13);
        assert!((t.get(1000).unwrap() - (-0.012813887788052151)).abs() < 1e-13);
        assert!((t.get(3999).unwrap() - 0.029807640625866836).abs() < 1e-13);
        assert!((t.get(4100).unwrap() / 4.5269630806521711e-9 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_row(-1.0, 3).is_err());
        assert!(bessel_row(f64::NAN, 3).is_err());
        assert!(bessel_row(1.0, -1).is_err());
    }
}
