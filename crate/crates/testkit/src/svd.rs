//! Dense full-SVD oracle via one-sided Jacobi rotations.
//!
//! Slow and exhaustive (full sweeps until convergence) but accurate to near
//! machine precision, independent of the randomized projection route used in
//! production.

/// Thin SVD of a dense row-major matrix: `a = u * diag(s) * v^T` with
/// `u` m x r, `s` length r, `v` n x r, where r = min(m, n), singular values
/// sorted descending.
pub struct DenseSvd {
    pub u: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

pub fn jacobi_svd(a: &[Vec<f64>]) -> DenseSvd {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    if m >= n {
        jacobi_tall(a)
    } else {
        // SVD of the transpose swaps the factor roles.
        let at: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
        let svd = jacobi_tall(&at);
        DenseSvd {
            u: svd.v,
            s: svd.s,
            v: svd.u,
        }
    }
}

fn jacobi_tall(a: &[Vec<f64>]) -> DenseSvd {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut w: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for row in w.iter() {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in w.iter_mut() {
                    let (wp, wq) = (row[p], row[q]);
                    row[p] = c * wp - s * wq;
                    row[q] = s * wp + c * wq;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        if converged {
            break;
        }
    }

    // Column norms are the singular values; normalize U columns.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| w.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = vec![vec![0.0; n]; m];
    let mut s = vec![0.0; n];
    let mut vv = vec![vec![0.0; n]; n];
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        if norms[src] > 0.0 {
            for i in 0..m {
                u[i][dst] = w[i][src] / norms[src];
            }
        }
        for i in 0..n {
            vv[i][dst] = v[i][src];
        }
    }
    DenseSvd { u, s, v: vv }
}

/// Frobenius norm of `a - u_k s_k v_k^T`, taking the first `k` columns of the
/// supplied factors.
pub fn reconstruction_error(
    a: &[Vec<f64>],
    u: &[Vec<f64>],
    s: &[f64],
    v: &[Vec<f64>],
    k: usize,
) -> f64 {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut err = 0.0;
    for i in 0..m {
        for j in 0..n {
            let mut approx = 0.0;
            for c in 0..k {
                approx += u[i][c] * s[c] * v[j][c];
            }
            let d = a[i][j] - approx;
            err += d * d;
        }
    }
    err.sqrt()
}

/// The optimal rank-k Frobenius error: the tail of the singular spectrum.
pub fn best_rank_k_error(s: &[f64], k: usize) -> f64 {
    s.iter().skip(k).map(|x| x * x).sum::<f64>().sqrt()
}
