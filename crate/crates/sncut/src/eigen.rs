//! Symmetric eigensolvers.
//!
//! Dense path: Householder reduction to tridiagonal form followed by the
//! implicit-shift QL iteration with eigenvector accumulation. Iterative
//! path: Lanczos with full reorthogonalization for matrices too large to
//! factor densely. Both return eigenvalues in ascending order with
//! column-aligned eigenvectors.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};

/// Maximum QL iterations per eigenvalue before giving up.
const QL_MAX_ITER: usize = 50;

/// Copies `|a|` with the sign of `b`.
fn sign_like<S: Scalar>(a: S, b: S) -> S {
    if b >= S::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Householder reduction of a symmetric matrix (stored in `a`) to
/// tridiagonal form. On return `d` holds the diagonal, `e` the subdiagonal
/// (with `e[0]` zero), and `a` the accumulated orthogonal transform.
fn tridiagonalize<S: Scalar>(a: &mut Array2<S>, d: &mut [S], e: &mut [S]) {
    let n = d.len();
    for i in (1..n).rev() {
        // `l` counts the leading entries of row i still to be eliminated.
        let l = i;
        let mut h = S::zero();
        if l > 1 {
            let mut scale = S::zero();
            for k in 0..l {
                scale += a[[i, k]].abs();
            }
            if scale == S::zero() {
                e[i] = a[[i, l - 1]];
            } else {
                for k in 0..l {
                    let v = a[[i, k]] / scale;
                    a[[i, k]] = v;
                    h += v * v;
                }
                let f = a[[i, l - 1]];
                let g = if f >= S::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[[i, l - 1]] = f - g;
                let mut f_acc = S::zero();
                for j in 0..l {
                    a[[j, i]] = a[[i, j]] / h;
                    let mut g_acc = S::zero();
                    for k in 0..=j {
                        g_acc += a[[j, k]] * a[[i, k]];
                    }
                    for k in (j + 1)..l {
                        g_acc += a[[k, j]] * a[[i, k]];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[[i, j]];
                }
                let hh = f_acc / (h + h);
                for j in 0..l {
                    let f = a[[i, j]];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[[i, k]];
                        let updated = a[[j, k]] - delta;
                        a[[j, k]] = updated;
                    }
                }
            }
        } else {
            e[i] = a[[i, l - 1]];
        }
        d[i] = h;
    }
    d[0] = S::zero();
    e[0] = S::zero();
    for i in 0..n {
        let l = i;
        if d[i] != S::zero() {
            for j in 0..l {
                let mut g = S::zero();
                for k in 0..l {
                    g += a[[i, k]] * a[[k, j]];
                }
                for k in 0..l {
                    let updated = a[[k, j]] - g * a[[k, i]];
                    a[[k, j]] = updated;
                }
            }
        }
        d[i] = a[[i, i]];
        a[[i, i]] = S::one();
        for j in 0..l {
            a[[j, i]] = S::zero();
            a[[i, j]] = S::zero();
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `d` holds the diagonal (eigenvalues on return), `e` the subdiagonal in
/// `e[1..]`, and `z` accumulates eigenvectors into its columns.
fn tridiag_ql<S: Scalar>(d: &mut [S], e: &mut [S], z: &mut Array2<S>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= S::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Convergence(format!(
                    "QL iteration limit {QL_MAX_ITER} exceeded at eigenvalue {l}"
                )));
            }
            let two = sc::<S>(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(S::one());
            g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
            let mut s = S::one();
            let mut c = S::one();
            let mut p = S::zero();
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == S::zero() {
                    d[i + 1] -= p;
                    e[m] = S::zero();
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[[k, i + 1]];
                    z[[k, i + 1]] = s * z[[k, i]] + c * f;
                    z[[k, i]] = c * z[[k, i]] - s * f;
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = S::zero();
        }
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix. Returns eigenvalues in
/// ascending order and the matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen_dense<S: Scalar>(a: &Array2<S>) -> Result<(Vec<S>, Array2<S>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    let mut work = a.clone();
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    tridiagonalize(&mut work, &mut d, &mut e);
    tridiag_ql(&mut d, &mut e, &mut work)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<S> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, dst]] = work[[r, src]];
        }
    }
    Ok((values, vectors))
}

/// Smallest `k` eigenpairs of a symmetric operator given only through
/// matrix-vector products, via Lanczos with full reorthogonalization.
///
/// Deterministic for a fixed seed. `max_matvecs` caps the number of operator
/// applications; running out raises a convergence error. Residual targets
/// are relative to the largest Ritz value magnitude.
pub fn lanczos_smallest<S, F>(
    n: usize,
    apply: F,
    k: usize,
    tol: S,
    seed: u64,
    max_matvecs: usize,
) -> Result<(Vec<S>, Array2<S>)>
where
    S: Scalar,
    F: Fn(&Array1<S>) -> Array1<S>,
{
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    if tol <= S::zero() {
        return Err(Error::BadParameter {
            name: "tol",
            reason: "must be positive".to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Array1<S>> = Vec::new();
    let mut alpha: Vec<S> = Vec::new();
    let mut beta: Vec<S> = Vec::new();
    let mut matvecs = 0usize;

    let random_unit = |rng: &mut ChaCha8Rng, basis: &[Array1<S>]| -> Result<Array1<S>> {
        for _ in 0..16 {
            let mut v: Array1<S> =
                Array1::from_iter((0..n).map(|_| sc::<S>(rng.random_range(-1.0..1.0))));
            for q in basis {
                let c: S = v.iter().zip(q.iter()).map(|(&a, &b)| a * b).sum();
                v = v - q * c;
            }
            let norm = v.iter().map(|&x| x * x).sum::<S>().sqrt();
            if norm > sc::<S>(1e-8) {
                return Ok(v / norm);
            }
        }
        Err(Error::Convergence(
            "could not draw a vector independent of the current basis".to_string(),
        ))
    };

    basis.push(random_unit(&mut rng, &basis)?);
    let check_every = 8usize.max(k);
    loop {
        let j = basis.len() - 1;
        if matvecs >= max_matvecs {
            return Err(Error::Convergence(format!(
                "matrix-vector product budget {max_matvecs} exhausted"
            )));
        }
        let mut w = apply(&basis[j]);
        matvecs += 1;
        let a_j: S = basis[j].iter().zip(w.iter()).map(|(&a, &b)| a * b).sum();
        alpha.push(a_j);
        // Two reorthogonalization passes keep the basis orthonormal to
        // working precision even for clustered spectra.
        for _ in 0..2 {
            for q in &basis {
                let c: S = w.iter().zip(q.iter()).map(|(&a, &b)| a * b).sum();
                w = w - q * c;
            }
        }
        let b_j = w.iter().map(|&x| x * x).sum::<S>().sqrt();
        let dim = basis.len();
        let spectrum_done = dim == n;
        let should_check = spectrum_done || (dim >= 2 * k && dim % check_every == 0);
        if should_check {
            let (ritz, vecs, resid) = ritz_pairs(&alpha, &beta, b_j)?;
            let scale = ritz
                .iter()
                .map(|v| v.abs())
                .fold(S::zero(), |acc, v| acc.max(v))
                .max(S::one());
            let converged = (0..k).all(|i| resid[i] <= tol * scale);
            // A full basis is exact up to rounding, so it also terminates.
            if converged || spectrum_done {
                let mut y = Array2::zeros((n, k));
                for c in 0..k {
                    let mut col = Array1::zeros(n);
                    for (t, q) in basis.iter().enumerate() {
                        col = col + q * vecs[[t, c]];
                    }
                    let norm = col.iter().map(|&x| x * x).sum::<S>().sqrt();
                    if norm == S::zero() {
                        return Err(Error::Convergence(
                            "degenerate Ritz vector".to_string(),
                        ));
                    }
                    col = col / norm;
                    for r in 0..n {
                        y[[r, c]] = col[r];
                    }
                }
                return Ok((ritz[..k].to_vec(), y));
            }
        }
        if b_j <= sc::<S>(1e-12) {
            // Invariant subspace: restart the recurrence with a fresh
            // direction; zero coupling keeps the tridiagonal form valid.
            beta.push(S::zero());
            basis.push(random_unit(&mut rng, &basis)?);
        } else {
            beta.push(b_j);
            basis.push(w / b_j);
        }
    }
}

/// Eigen decomposition of the current Lanczos tridiagonal matrix, plus the
/// standard residual bound `|beta_last| * |last component|` per Ritz pair.
fn ritz_pairs<S: Scalar>(
    alpha: &[S],
    beta: &[S],
    beta_last: S,
) -> Result<(Vec<S>, Array2<S>, Vec<S>)> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![S::zero(); m];
    for i in 1..m {
        e[i] = beta[i - 1];
    }
    let mut z = Array2::eye(m);
    tridiag_ql(&mut d, &mut e, &mut z)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<S> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = Array2::zeros((m, m));
    let mut resid = vec![S::zero(); m];
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..m {
            vecs[[r, dst]] = z[[r, src]];
        }
        resid[dst] = (beta_last * z[[m - 1, src]]).abs();
    }
    Ok((values, vecs, resid))
}
