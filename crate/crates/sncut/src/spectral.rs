//! Continuous relaxation of the signed normalized cut.
//!
//! The relaxed problem is solved by the `k` smallest eigenpairs of the
//! normalized signed Laplacian. With eigenvector matrix `Y` (orthonormal
//! columns), the continuous solution is `Z = D^{-1/2} Y`, which satisfies
//! `Z^T D Z = I`; the sum of the `k` smallest eigenvalues is a lower bound
//! on the objective of every hard partition into `k` clusters.

use ndarray::Array2;

use crate::eigen::{lanczos_smallest, symmetric_eigen_dense};
use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};
use crate::sgraph::SignedGraph;

/// Largest size factored by the dense eigensolver; beyond this the Lanczos
/// path takes over.
pub const DENSE_EIGEN_MAX: usize = 2048;

/// Default residual tolerance for eigenpairs.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Matrix-vector product budget for the iterative path, as a multiple of n.
pub const MATVEC_BUDGET_FACTOR: usize = 10;

/// Output of the continuous relaxation.
#[derive(Debug, Clone)]
pub struct RelaxedSolution<S: Scalar = f64> {
    /// The `k` smallest eigenvalues of the normalized signed Laplacian,
    /// ascending.
    pub eigenvalues: Vec<S>,
    /// Matching orthonormal eigenvectors, one per column.
    pub y: Array2<S>,
    /// Degree-rescaled eigenvectors `D^{-1/2} Y`; rows live in the space the
    /// rounding step clusters.
    pub z: Array2<S>,
}

impl<S: Scalar> RelaxedSolution<S> {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn k(&self) -> usize {
        self.z.ncols()
    }

    /// Lower bound on the hard objective: sum of the kept eigenvalues.
    pub fn lower_bound(&self) -> S {
        self.eigenvalues.iter().copied().sum()
    }
}

/// Smallest `k` eigenpairs of a symmetric matrix, dense or iterative
/// depending on size. Residuals are checked against `tol` scaled by the
/// largest eigenvalue magnitude; failure is a convergence error.
pub fn smallest_eigenpairs<S: Scalar>(
    m: &Array2<S>,
    k: usize,
    tol: S,
    seed: u64,
) -> Result<(Vec<S>, Array2<S>)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    if tol <= S::zero() {
        return Err(Error::BadParameter {
            name: "tol",
            reason: "must be positive".to_string(),
        });
    }
    if n <= DENSE_EIGEN_MAX {
        let (vals, vecs) = symmetric_eigen_dense(m)?;
        let scale = vals
            .iter()
            .map(|v| v.abs())
            .fold(S::zero(), |acc, v| acc.max(v))
            .max(S::one());
        let mut out_vals = Vec::with_capacity(k);
        let mut out_vecs = Array2::zeros((n, k));
        for c in 0..k {
            out_vals.push(vals[c]);
            for r in 0..n {
                out_vecs[[r, c]] = vecs[[r, c]];
            }
            let y = out_vecs.column(c);
            let my = m.dot(&y);
            let resid = my
                .iter()
                .zip(y.iter())
                .map(|(&a, &b)| {
                    let d = a - vals[c] * b;
                    d * d
                })
                .sum::<S>()
                .sqrt();
            if resid > tol * scale {
                return Err(Error::Convergence(format!(
                    "dense eigenpair {c} residual {resid} exceeds tolerance"
                )));
            }
        }
        Ok((out_vals, out_vecs))
    } else {
        lanczos_smallest(n, |v| m.dot(v), k, tol, seed, MATVEC_BUDGET_FACTOR * n)
    }
}

/// Solves the relaxation for `k` clusters with default tolerance and seed.
pub fn relaxed_solution<S: Scalar>(g: &SignedGraph<S>, k: usize) -> Result<RelaxedSolution<S>> {
    relaxed_solution_seeded(g, k, sc::<S>(DEFAULT_EIG_TOL), 0)
}

/// Solves the relaxation with explicit eigensolver tolerance and seed.
pub fn relaxed_solution_seeded<S: Scalar>(
    g: &SignedGraph<S>,
    k: usize,
    tol: S,
    seed: u64,
) -> Result<RelaxedSolution<S>> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let inv_sqrt = g.signed_degree().inv_sqrt()?;
    let l_sym = g.normalized_signed_laplacian()?;
    let (eigenvalues, y) = smallest_eigenpairs(&l_sym, k, tol, seed)?;
    let mut z = y.clone();
    for r in 0..n {
        for c in 0..k {
            z[[r, c]] *= inv_sqrt[r];
        }
    }
    Ok(RelaxedSolution { eigenvalues, y, z })
}

/// Formats eigenvalues as CSV with an `index,eigenvalue` header.
pub fn spectrum_csv<S: Scalar>(values: &[S]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}
