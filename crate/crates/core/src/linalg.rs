//! Small dense-matrix helpers backing the truncated SVD: row-major storage,
//! modified Gram-Schmidt orthonormalization, and a one-sided Jacobi SVD for
//! the projected core matrix.

use alloc::vec::Vec;

use crate::mathx;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.at(r, c)).collect()
    }

    /// self * other.
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self.at(i, k);
                if v == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    *out.at_mut(i, j) += v * other.at(k, j);
                }
            }
        }
        out
    }

    /// self^T * other.
    pub fn transpose_matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let v = self.at(r, i);
                if v == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    *out.at_mut(i, j) += v * other.at(r, j);
                }
            }
        }
        out
    }
}

/// Orthonormalizes the columns of `m` in place with twice-iterated modified
/// Gram-Schmidt. Columns that vanish (rank deficiency) are replaced by the
/// first canonical basis vector with a non-degenerate residual, keeping the
/// result deterministic and fully orthonormal.
pub fn orthonormalize_columns(m: &mut Mat) {
    let (rows, cols) = (m.rows, m.cols);
    for j in 0..cols {
        for _pass in 0..2 {
            for prev in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += m.at(r, prev) * m.at(r, j);
                }
                for r in 0..rows {
                    *m.at_mut(r, j) -= dot * m.at(r, prev);
                }
            }
        }
        let mut norm = 0.0;
        for r in 0..rows {
            norm += m.at(r, j) * m.at(r, j);
        }
        let norm = mathx::sqrt(norm);
        if norm > 1e-12 {
            for r in 0..rows {
                *m.at_mut(r, j) /= norm;
            }
        } else {
            replace_with_canonical(m, j);
        }
    }
}

fn replace_with_canonical(m: &mut Mat, j: usize) {
    let rows = m.rows;
    for basis in 0..rows {
        for r in 0..rows {
            *m.at_mut(r, j) = if r == basis { 1.0 } else { 0.0 };
        }
        for _pass in 0..2 {
            for prev in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += m.at(r, prev) * m.at(r, j);
                }
                for r in 0..rows {
                    *m.at_mut(r, j) -= dot * m.at(r, prev);
                }
            }
        }
        let mut norm = 0.0;
        for r in 0..rows {
            norm += m.at(r, j) * m.at(r, j);
        }
        let norm = mathx::sqrt(norm);
        if norm > 0.5 {
            for r in 0..rows {
                *m.at_mut(r, j) /= norm;
            }
            return;
        }
    }
    // more columns than rows: leave as zeros (caller guards against this)
}

/// One-sided Jacobi SVD of a tall matrix `m` (rows >= cols):
/// `m = u * diag(s) * j^T` with `u` orthonormal (rows x cols), `j` orthogonal
/// (cols x cols), singular values descending. Vanished `u` columns are filled
/// with deterministic canonical completions so `u` stays orthonormal even for
/// rank-deficient input.
pub fn onesided_jacobi_svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    assert!(m.rows >= m.cols, "jacobi svd expects a tall matrix");
    let (rows, cols) = (m.rows, m.cols);
    let mut w = m.clone();
    let mut j = Mat::zeros(cols, cols);
    for d in 0..cols {
        *j.at_mut(d, d) = 1.0;
    }

    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for r in 0..rows {
                    let (wp, wq) = (w.at(r, p), w.at(r, q));
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == 0.0 || mathx::abs(gamma) <= 1e-15 * mathx::sqrt(alpha * beta) {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (mathx::abs(zeta) + mathx::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / mathx::sqrt(1.0 + t * t);
                let s = c * t;
                for r in 0..rows {
                    let (wp, wq) = (w.at(r, p), w.at(r, q));
                    *w.at_mut(r, p) = c * wp - s * wq;
                    *w.at_mut(r, q) = s * wp + c * wq;
                }
                for r in 0..cols {
                    let (jp, jq) = (j.at(r, p), j.at(r, q));
                    *j.at_mut(r, p) = c * jp - s * jq;
                    *j.at_mut(r, q) = s * jp + c * jq;
                }
            }
        }
        if converged {
            break;
        }
    }

    let mut norms: Vec<f64> = (0..cols)
        .map(|c| {
            let mut sum = 0.0;
            for r in 0..rows {
                sum += w.at(r, c) * w.at(r, c);
            }
            mathx::sqrt(sum)
        })
        .collect();

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut u = Mat::zeros(rows, cols);
    let mut jj = Mat::zeros(cols, cols);
    let mut s = alloc::vec![0.0; cols];
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        for r in 0..cols {
            *jj.at_mut(r, dst) = j.at(r, src);
        }
        if norms[src] > 0.0 {
            for r in 0..rows {
                *u.at_mut(r, dst) = w.at(r, src) / norms[src];
            }
        }
    }
    // complete any zero columns of u deterministically
    for c in 0..cols {
        let mut norm = 0.0;
        for r in 0..rows {
            norm += u.at(r, c) * u.at(r, c);
        }
        if norm < 0.25 {
            replace_with_canonical(&mut u, c);
        }
    }
    norms.clear();
    (u, s, jj)
}
