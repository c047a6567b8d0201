//! Small dense linear algebra: LU determinants and a one-sided Jacobi
//! eigensolver for symmetric matrices. Matrices are row-major `n × n` slices.

/// Determinant by LU decomposition with partial pivoting. Consumes `a` as
/// scratch space. The empty matrix has determinant 1.
pub fn determinant_in_place(a: &mut [f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
        }
    }
    det
}

pub fn determinant(a: &[f64], n: usize) -> f64 {
    let mut scratch = a.to_vec();
    determinant_in_place(&mut scratch, n)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors stored as rows: `vectors[j * n + i]` is component `i` of
    /// the eigenvector for `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }
}

/// Cyclic one-sided (Hestenes) Jacobi.
///
/// Rotations are applied to the rows of `W = A + cI`, where the shift `c`
/// (a Gershgorin bound) makes `W` positive definite, until all rows are
/// pairwise orthogonal. The accumulated rotation `Q` then satisfies
/// `Q W Wᵀ Qᵀ` diagonal, so its rows are eigenvectors of `A`; eigenvalues
/// are the Rayleigh quotients `q·Aq`. Every update touches whole rows,
/// which keeps memory access contiguous.
///
/// Only symmetric input is meaningful; the upper triangle is trusted.
pub fn symmetric_eigen(a: &[f64], n: usize) -> SymmetricEigen {
    assert_eq!(a.len(), n * n);
    let mut sym = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            sym[i * n + j] = sym[j * n + i];
        }
    }
    let shift = (0..n)
        .map(|i| sym[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut w = sym.clone();
    for i in 0..n {
        w[i * n + i] += shift;
    }
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }

    let tol = 4.0 * f64::EPSILON;
    let mut norms = vec![0.0; n];
    for _sweep in 0..60 {
        for (i, norm) in norms.iter_mut().enumerate() {
            let row = &w[i * n..(i + 1) * n];
            *norm = dot(row, row);
        }
        let mut rotated = false;
        for p in 0..n {
            for r in p + 1..n {
                let alpha = norms[p];
                let beta = norms[r];
                let gamma = dot(&w[p * n..(p + 1) * n], &w[r * n..(r + 1) * n]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut w, n, p, r, c, s);
                rotate_rows(&mut q, n, p, r, c, s);
                norms[p] = c * c * alpha + s * s * beta - 2.0 * c * s * gamma;
                norms[r] = s * s * alpha + c * c * beta + 2.0 * c * s * gamma;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut scratch = vec![0.0; n];
    let rayleigh: Vec<f64> = (0..n)
        .map(|i| {
            let qi = &q[i * n..(i + 1) * n];
            for (k, out) in scratch.iter_mut().enumerate() {
                *out = dot(&sym[k * n..(k + 1) * n], qi);
            }
            dot(qi, &scratch)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| rayleigh[i].total_cmp(&rayleigh[j]));
    let values = order.iter().map(|&i| rayleigh[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend_from_slice(&q[i * n..(i + 1) * n]);
    }
    SymmetricEigen { n, values, vectors }
}

const LANES: usize = 16;

/// Dot product with independent lane accumulators so the loop vectorizes.
/// The summation order is fixed by the code, not by the compiler.
#[inline(always)]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0; LANES];
    let split = a.len() - a.len() % LANES;
    for (x, y) in a[..split].chunks_exact(LANES).zip(b[..split].chunks_exact(LANES)) {
        for l in 0..LANES {
            acc[l] += x[l] * y[l];
        }
    }
    let mut s = acc.iter().sum::<f64>();
    for (x, y) in a[split..].iter().zip(&b[split..]) {
        s += x * y;
    }
    s
}

/// `(row_p, row_r) ← (c·row_p − s·row_r, s·row_p + c·row_r)`.
fn rotate_rows(m: &mut [f64], n: usize, p: usize, r: usize, c: f64, s: f64) {
    let (head, tail) = m.split_at_mut(r * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rr = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rr.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&[], 0), 1.0);
        assert_eq!(determinant(&[3.0], 1), 3.0);
        assert!((determinant(&[1.0, 2.0, 3.0, 4.0], 2) + 2.0).abs() < 1e-15);
        // permutation matrix with a single swap
        assert!((determinant(&[0.0, 1.0, 1.0, 0.0], 2) + 1.0).abs() < 1e-15);
        let a = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        assert!((determinant(&a, 3) - 4.0).abs() < 1e-14);
        assert_eq!(determinant(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }

    #[test]
    fn jacobi_reconstructs() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { i as f64 } else { 0.0 };
            }
        }
        let eig = symmetric_eigen(&a, n);
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n).map(|k| eig.values[k] * eig.vector(k)[i] * eig.vector(k)[j]).sum();
                assert!((rec - a[i * n + j]).abs() < 1e-12);
                let dot: f64 = (0..n).map(|k| eig.vector(i)[k] * eig.vector(j)[k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_diagonal_and_degenerate() {
        let eig = symmetric_eigen(&[2.0, 0.0, 0.0, 1.0], 2);
        assert_eq!(eig.values, vec![1.0, 2.0]);
        let eig = symmetric_eigen(&[1.0, 1.0, 1.0, 1.0], 2);
        assert!(eig.values[0].abs() < 1e-15);
        assert!((eig.values[1] - 2.0).abs() < 1e-15);
        // eigenvalues ±1 have equal squares; the shift keeps them apart
        let eig = symmetric_eigen(&[0.0, 1.0, 1.0, 0.0], 2);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
        let v = eig.vector(0);
        assert!((v[0] + v[1]).abs() < 1e-15);
    }

    #[test]
    fn jacobi_on_sine_window() {
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let d = i as f64 - j as f64;
                a[i * n + j] = if i == j { 0.5 } else { (std::f64::consts::FRAC_PI_2 * d).sin() / (std::f64::consts::PI * d) };
            }
        }
        let eig = symmetric_eigen(&a, n);
        assert!(eig.values[0] > -1e-12 && eig.values[n - 1] < 1.0 + 1e-12);
        for j in 0..n {
            let v = eig.vector(j);
            for i in 0..n {
                let av: f64 = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                assert!((av - eig.values[j] * v[i]).abs() < 1e-12);
            }
        }
    }
}
