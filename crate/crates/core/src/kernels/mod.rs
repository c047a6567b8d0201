//! Correlation kernels of the descent process.
//!
//! Under the poissonized Plancherel measure with parameter `η = θ²` the
//! descents form a determinantal process with the discrete Bessel kernel
//!
//! ```text
//! J(x, y; θ²) = θ (J_x(2θ) J_{y+1}(2θ) − J_{x+1}(2θ) J_y(2θ)) / (x − y)
//! ```
//!
//! whose diagonal is the tail series `Σ_{s≥1} J_{x+s}(2θ)²`. In the bulk it
//! degenerates to the discrete sine kernel `sin(φd)/(πd)` with local angle
//! `φ_x = arccos(x / 2θ)`.

mod bessel;
mod contour;

use std::f64::consts::PI;
use std::sync::Arc;

pub use bessel::{bessel_row, edge_cutoff, BesselTable};
pub use contour::{contour_kernel_oracle, ContourGrid, ContourOracle};

use crate::error::{Error, Result};
use crate::linalg;

/// Largest point set accepted by [`correlation`].
pub const MAX_CORRELATION_POINTS: usize = 12;

/// Discrete sine kernel `sin(φd)/(πd)`, with value `φ/π` at `d = 0`.
#[inline]
pub fn sine_kernel(d: i64, phi: f64) -> f64 {
    if d == 0 {
        phi / PI
    } else {
        let d = d as f64;
        (phi * d).sin() / (PI * d)
    }
}

/// The discrete Bessel kernel at a fixed `θ` with its Bessel table.
#[derive(Debug, Clone)]
pub struct BesselKernel {
    theta: f64,
    table: Arc<BesselTable>,
}

impl BesselKernel {
    /// Builds the table `J_m(2θ)` for `|m| ≤ edge_cutoff(θ) + 1`.
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("theta must be finite and nonnegative, got {theta}")));
        }
        let table = bessel_row(2.0 * theta, edge_cutoff(theta) + 1)?;
        Ok(Self { theta, table: Arc::new(table) })
    }

    /// Wraps an existing table; its argument must be `2θ`.
    pub fn with_table(theta: f64, table: Arc<BesselTable>) -> Result<Self> {
        check_table_argument(theta, &table)?;
        Ok(Self { theta, table })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn table(&self) -> &BesselTable {
        &self.table
    }

    /// `J(x, y; θ²)` reading orders past the table as zero.
    ///
    /// Exact up to the table's truncation whenever the table reaches the edge
    /// cutoff, which [`BesselKernel::new`] guarantees.
    #[inline]
    pub fn value(&self, x: i64, y: i64) -> f64 {
        let t = &*self.table;
        if x == y {
            return t.tail_sum_sq(x + 1);
        }
        let num = t.get_or_zero(x) * t.get_or_zero(y + 1) - t.get_or_zero(x + 1) * t.get_or_zero(y);
        self.theta * num / (x - y) as f64
    }

    /// `u_x = x/√n` with `n = θ²`.
    pub fn u(&self, x: i64) -> f64 {
        x as f64 / self.theta
    }

    /// Local angle `φ_x = arccos(u_x / 2)`, clamped to `[0, π]` off the bulk.
    pub fn local_angle(&self, x: i64) -> f64 {
        (self.u(x) / 2.0).clamp(-1.0, 1.0).acos()
    }
}

fn check_table_argument(theta: f64, table: &BesselTable) -> Result<()> {
    if (table.argument() - 2.0 * theta).abs() > 1e-12 * (2.0 * theta).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "table argument {} does not match 2θ = {}",
            table.argument(),
            2.0 * theta
        )));
    }
    Ok(())
}

/// `J(x, y; θ²)` from a precomputed table.
///
/// Orders past the table are treated as zero only when the table reaches
/// `edge_cutoff(θ)`, where the Bessel tail is superexponentially small;
/// otherwise a missing order is [`Error::TableTooSmall`]. Diagonal values
/// always need the full cutoff range.
pub fn bessel_kernel(x: i64, y: i64, theta: f64, table: &BesselTable) -> Result<f64> {
    check_table_argument(theta, table)?;
    let cutoff = edge_cutoff(theta);
    let certified = table.max_order() >= cutoff;
    let needed = if x == y {
        cutoff
    } else {
        [x, x + 1, y, y + 1].iter().map(|m| m.abs()).max().unwrap_or(0)
    };
    if needed > table.max_order() && !certified {
        return Err(Error::TableTooSmall { needed, max_order: table.max_order() });
    }
    if x == y {
        return Ok(table.tail_sum_sq(x + 1));
    }
    let num = table.get_or_zero(x) * table.get_or_zero(y + 1) - table.get_or_zero(x + 1) * table.get_or_zero(y);
    Ok(theta * num / (x - y) as f64)
}

/// A symmetric correlation kernel on `ℤ`.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// Discrete sine kernel with angle `φ`; density `φ/π`.
    Sine { phi: f64 },
    /// Discrete Bessel kernel.
    Bessel(BesselKernel),
}

impl KernelSpec {
    /// Sine kernel; `φ ∈ [0, π]` (the endpoints give the empty and the fully
    /// packed configuration).
    pub fn sine(phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("phi must lie in [0, π], got {phi}")));
        }
        Ok(KernelSpec::Sine { phi })
    }

    pub fn bessel(theta: f64) -> Result<Self> {
        Ok(KernelSpec::Bessel(BesselKernel::new(theta)?))
    }

    #[inline]
    pub fn eval(&self, x: i64, y: i64) -> f64 {
        match self {
            KernelSpec::Sine { phi } => sine_kernel(x - y, *phi),
            KernelSpec::Bessel(k) => k.value(x, y),
        }
    }

    /// Kernel matrix `[K(p_i, p_j)]` in row-major order.
    pub fn matrix(&self, points: &[i64]) -> Vec<f64> {
        let n = points.len();
        let mut m = vec![0.0; n * n];
        for (i, &a) in points.iter().enumerate() {
            for (j, &b) in points.iter().enumerate().skip(i) {
                let v = self.eval(a, b);
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        m
    }
}

/// `det[K(x_i, x_j)]`: the probability that every listed site holds a descent.
pub fn correlation(points: &[i64], kernel: &KernelSpec) -> Result<f64> {
    if points.len() > MAX_CORRELATION_POINTS {
        return Err(Error::TooManyPoints { count: points.len(), max: MAX_CORRELATION_POINTS });
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::DuplicatePoint(*p));
        }
    }
    let n = points.len();
    let mut m = kernel.matrix(points);
    Ok(linalg::determinant_in_place(&mut m, n))
}
