//! One-sided Jacobi singular value decomposition.
//!
//! Rotates column pairs until all columns are mutually orthogonal, which
//! gives `A V = U diag(sigma)` directly. Intended for the small square
//! matrices arising in orthogonal alignment problems; accuracy on those is
//! excellent and the implementation is dependency-free.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};

const MAX_SWEEPS: usize = 64;

/// Full SVD `A = U diag(sigma) V^T` with singular values descending.
///
/// `U` is `m x n` with orthonormal columns wherever the corresponding
/// singular value is nonzero; zero singular values leave zero columns in
/// `U`. Requires `m >= n`.
pub fn svd_jacobi<S: Scalar>(a: &Array2<S>) -> Result<(Array2<S>, Vec<S>, Array2<S>)> {
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m,
        });
    }
    let mut u = a.clone();
    let mut v: Array2<S> = Array2::eye(n);
    let eps = S::epsilon() * sc::<S>(n.max(2) as f64);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = S::zero();
                let mut aqq = S::zero();
                let mut apq = S::zero();
                for r in 0..m {
                    let up = u[[r, p]];
                    let uq = u[[r, q]];
                    app += up * up;
                    aqq += uq * uq;
                    apq += up * uq;
                }
                if app == S::zero() || aqq == S::zero() {
                    continue;
                }
                if apq.abs() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (sc::<S>(2.0) * apq);
                let t = {
                    let sign = if zeta >= S::zero() { S::one() } else { -S::one() };
                    sign / (zeta.abs() + (S::one() + zeta * zeta).sqrt())
                };
                let c = (S::one() + t * t).sqrt().recip();
                let s = c * t;
                for r in 0..m {
                    let up = u[[r, p]];
                    let uq = u[[r, q]];
                    u[[r, p]] = c * up - s * uq;
                    u[[r, q]] = s * up + c * uq;
                }
                for r in 0..n {
                    let vp = v[[r, p]];
                    let vq = v[[r, q]];
                    v[[r, p]] = c * vp - s * vq;
                    v[[r, q]] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<S> = (0..n)
        .map(|c| (0..m).map(|r| u[[r, c]] * u[[r, c]]).sum::<S>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u_sorted = Array2::zeros((m, n));
    let mut v_sorted = Array2::zeros((n, n));
    let mut sigma_sorted = vec![S::zero(); n];
    for (dst, &src) in order.iter().enumerate() {
        sigma_sorted[dst] = sigma[src];
        let norm = sigma[src];
        for r in 0..m {
            u_sorted[[r, dst]] = if norm > S::zero() {
                u[[r, src]] / norm
            } else {
                S::zero()
            };
        }
        for r in 0..n {
            v_sorted[[r, dst]] = v[[r, src]];
        }
    }
    Ok((u_sorted, sigma_sorted, v_sorted))
}

/// Nearest orthogonal matrix to the square matrix `m`, i.e. the `U V^T`
/// factor of its SVD. Fails with `RankDeficient` when the smallest singular
/// value is numerically zero, because the factor is then not unique.
pub fn orthogonal_polar_factor<S: Scalar>(m: &Array2<S>) -> Result<Array2<S>> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: m.ncols(),
        });
    }
    if k == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let (u, sigma, v) = svd_jacobi(m)?;
    let largest = sigma[0];
    let floor = largest.max(S::one()) * sc::<S>(1e-12);
    if sigma[k - 1] <= floor {
        return Err(Error::RankDeficient);
    }
    Ok(u.dot(&v.t()))
}
