use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{dot, symmetric_eigen};
use crate::partitions::DescentWindow;

/// Largest window accepted by the determinantal sampler.
pub const MAX_DPP_WINDOW: usize = 512;

/// Eigenvalues may leave `[0, 1]` by this much before sampling is refused.
const EIGEN_TOLERANCE: f64 = 1e-8;

/// Spectral data of a kernel restricted to a window, reusable across
/// samples.
#[derive(Debug, Clone)]
pub struct WindowDpp {
    origin: i64,
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl WindowDpp {
    /// Restricts `kernel` to `[a, b]` and diagonalizes it.
    pub fn new(kernel: &KernelSpec, a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        let len = (b - a + 1) as usize;
        if len > MAX_DPP_WINDOW {
            return Err(Error::WindowTooLarge { len, max: MAX_DPP_WINDOW });
        }
        let points: Vec<i64> = (a..=b).collect();
        Self::from_matrix(a, &kernel.matrix(&points), len)
    }

    /// Uses an arbitrary symmetric `n × n` kernel matrix on sites
    /// `origin, …, origin + n − 1`.
    pub fn from_matrix(origin: i64, matrix: &[f64], n: usize) -> Result<Self> {
        if n > MAX_DPP_WINDOW {
            return Err(Error::WindowTooLarge { len: n, max: MAX_DPP_WINDOW });
        }
        if matrix.len() != n * n {
            return Err(Error::InvalidArgument(format!("matrix has {} entries, expected {}", matrix.len(), n * n)));
        }
        let eig = symmetric_eigen(matrix, n);
        let mut values = eig.values;
        for v in &mut values {
            if *v < -EIGEN_TOLERANCE || *v > 1.0 + EIGEN_TOLERANCE || !v.is_finite() {
                return Err(Error::EigenvalueOutOfRange { value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { origin, n, values, vectors: eig.vectors })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Clamped eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// One exact sample.
    ///
    /// Eigenvectors are kept independently with probability equal to their
    /// eigenvalue; the resulting projection process is then sampled one
    /// point at a time. After each pick a Householder reflection rotates the
    /// picked row onto the last basis column, which is then dropped, leaving
    /// an orthonormal basis of the conditioned projection.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DescentWindow {
        let n = self.n;
        let selected: Vec<usize> = (0..n).filter(|&j| rng.random::<f64>() < self.values[j]).collect();
        let k = selected.len();
        let mut bits = vec![false; n];

        // basis rows: slot r holds the coordinates of site sites[r]
        let mut v = vec![0.0; n * k];
        for (c, &j) in selected.iter().enumerate() {
            let col = &self.vectors[j * n..(j + 1) * n];
            for (i, &x) in col.iter().enumerate() {
                v[i * k + c] = x;
            }
        }
        let mut sites: Vec<usize> = (0..n).collect();
        let mut norms: Vec<f64> = v.chunks_exact(k.max(1)).map(|row| row.iter().map(|x| x * x).sum()).collect();
        if k == 0 {
            return DescentWindow::new(self.origin, bits);
        }

        let mut u = vec![0.0; k];
        for width in (1..=k).rev() {
            let total: f64 = norms.iter().sum();
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = norms.len() - 1;
            for (r, &p) in norms.iter().enumerate() {
                acc += p;
                if target < acc {
                    pick = r;
                    break;
                }
            }
            bits[sites[pick]] = true;
            if width == 1 {
                break;
            }

            let last = width - 1;
            let row = &v[pick * k..pick * k + width];
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            let alpha = if row[last] >= 0.0 { -norm } else { norm };
            u[..width].copy_from_slice(row);
            u[last] -= alpha;
            let uu: f64 = u[..width].iter().map(|x| x * x).sum();

            let slots = sites.len();
            let f_scale = if uu > 0.0 { 2.0 / uu } else { 0.0 };
            reflect_rows(&mut v[..slots * k], k, &u[..width], f_scale, &mut norms);

            let end = slots - 1;
            if pick != end {
                v.copy_within(end * k..end * k + width, pick * k);
            }
            sites.swap_remove(pick);
            norms.swap_remove(pick);
        }
        DescentWindow::new(self.origin, bits)
    }
}

/// Applies the reflection `I − f_scale·u uᵀ` to the first `u.len()` columns
/// of every row and stores the squared norm of all but the last column.
fn reflect_rows(v: &mut [f64], stride: usize, u: &[f64], f_scale: f64, norms: &mut [f64]) {
    let width = u.len();
    for (row, norm) in v.chunks_exact_mut(stride).zip(norms.iter_mut()) {
        let row = &mut row[..width];
        let f = f_scale * dot(row, u);
        *norm = reflect_and_norm(row, u, f, width - 1);
    }
}

/// `row ← row − f·u`, returning the squared norm of `row[..keep]`.
#[inline(always)]
fn reflect_and_norm(row: &mut [f64], u: &[f64], f: f64, keep: usize) -> f64 {
    const LANES: usize = 16;
    let (head, tail) = row.split_at_mut(keep);
    let (u_head, u_tail) = u.split_at(keep);
    let split = keep - keep % LANES;
    let mut acc = [0.0; LANES];
    for (x, y) in head[..split].chunks_exact_mut(LANES).zip(u_head[..split].chunks_exact(LANES)) {
        for l in 0..LANES {
            x[l] -= f * y[l];
            acc[l] += x[l] * x[l];
        }
    }
    let mut s = acc.iter().sum::<f64>();
    for (x, &y) in head[split..].iter_mut().zip(&u_head[split..]) {
        *x -= f * y;
        s += *x * *x;
    }
    for (x, &y) in tail.iter_mut().zip(u_tail) {
        *x -= f * y;
    }
    s
}

/// One exact sample of the determinantal process of `kernel` restricted to
/// `[a, b]`. For repeated sampling build a [`WindowDpp`] once instead.
pub fn dpp_window_sample<R: Rng + ?Sized>(kernel: &KernelSpec, a: i64, b: i64, rng: &mut R) -> Result<DescentWindow> {
    Ok(WindowDpp::new(kernel, a, b)?.sample(rng))
}
