//! Rounding the continuous relaxation to a hard partition.
//!
//! The relaxed rows `Z` are matched to a scaled one-nonzero-per-row matrix
//! `X` by alternating three steps that each hold the others fixed: an
//! orthogonal rotation `R` (nearest-orthogonal-matrix fit), a diagonal
//! column scaling `Lambda` (per-column least squares), and the assignment
//! `X` itself (row-wise argmax of `Z R Lambda`). A sweep is accepted only
//! if it does not increase the fit residual `phi = ||X - Z R Lambda||_F`,
//! which makes the residual trace non-increasing by construction; the
//! argmax and scaling heuristics alone do not guarantee that in corner
//! cases.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{self, MetricsReport, ReportOpts};
use crate::scalar::{sc, Scalar};
use crate::sgraph::{Partition, SignedGraph};
use crate::spectral::{relaxed_solution_seeded, RelaxedSolution};
use crate::svd::orthogonal_polar_factor;

/// Default number of random restarts in [`cluster`].
pub const DEFAULT_RESTARTS: usize = 8;
/// Default cap on alternation sweeps per restart.
pub const DEFAULT_MAX_SWEEPS: usize = 100;
/// Default termination threshold on the per-sweep residual drop.
pub const DEFAULT_PHI_TOL: f64 = 1e-7;
/// Floor substituted for vanishing diagonal scale entries.
pub const LAMBDA_FLOOR: f64 = 1e-12;

/// Tuning knobs for [`cluster`].
#[derive(Debug, Clone)]
pub struct ClusterOpts<S: Scalar = f64> {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop a restart once the residual drops by less than this in a sweep.
    pub phi_tol: S,
    /// Residual tolerance handed to the eigensolver.
    pub eig_tol: S,
}

impl<S: Scalar> Default for ClusterOpts<S> {
    fn default() -> Self {
        ClusterOpts {
            restarts: DEFAULT_RESTARTS,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            phi_tol: sc(DEFAULT_PHI_TOL),
            eig_tol: sc(crate::spectral::DEFAULT_EIG_TOL),
        }
    }
}

/// Final state of one rounding run.
#[derive(Debug, Clone)]
pub struct DiscreteState<S: Scalar = f64> {
    /// Scaled indicator matrix, one nonzero per row.
    pub x: Array2<S>,
    /// Orthogonal rotation aligning `Z` with `X`.
    pub r: Array2<S>,
    /// Diagonal column scaling.
    pub lambda: Vec<S>,
    /// Residual `||X - Z R Lambda||_F` of the final state.
    pub phi: S,
    /// Residual after the initial assignment and after each accepted sweep;
    /// non-increasing.
    pub sweep_phis: Vec<S>,
}

/// Seeds used for the restarts of [`cluster`]; exposed so tests can replay
/// exactly the runs the driver performs.
pub fn restart_seeds(seed: u64, restarts: usize) -> impl Iterator<Item = u64> {
    (0..restarts as u64).map(move |r| seed.wrapping_add(r))
}

/// Builds an initial rotation from `k` maximally spread rows of `z`.
///
/// Rows are normalized; the first is drawn uniformly by the seeded
/// generator, then each next pick minimizes accumulated cosine similarity
/// to previous picks (ties broken by index). Picked rows are orthonormalized
/// into the columns of the rotation. Fails with `DegenerateRows` when no
/// set of `k` independent rows exists.
pub fn init_rotation<S: Scalar>(z: &ArrayView2<S>, seed: u64) -> Result<Array2<S>> {
    let n = z.nrows();
    let k = z.ncols();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut unit_rows: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut nonzero = false;
    for i in 0..n {
        let norm = (0..k).map(|c| z[[i, c]] * z[[i, c]]).sum::<S>().sqrt();
        if norm > S::zero() {
            nonzero = true;
            unit_rows.push((0..k).map(|c| z[[i, c]] / norm).collect());
        } else {
            unit_rows.push(vec![S::zero(); k]);
        }
    }
    if !nonzero {
        return Err(Error::DegenerateRows { k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..n);
    let first = (0..n)
        .map(|off| (start + off) % n)
        .find(|&i| unit_rows[i].iter().any(|&v| v != S::zero()))
        .expect("some row is nonzero");

    let indep_tol = sc::<S>(1e-6);
    let mut cols: Vec<Vec<S>> = vec![unit_rows[first].clone()];
    let mut picked = vec![false; n];
    picked[first] = true;
    let mut spread = vec![S::zero(); n];
    let mut last = first;
    while cols.len() < k {
        for i in 0..n {
            if !picked[i] {
                let dot: S = (0..k).map(|c| unit_rows[i][c] * unit_rows[last][c]).sum();
                spread[i] += dot.abs();
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&i| !picked[i]).collect();
        order.sort_by(|&a, &b| {
            spread[a]
                .partial_cmp(&spread[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut chosen = None;
        for &i in &order {
            // Orthogonalize against current columns; keep the row only if a
            // meaningful residual survives.
            let mut resid = unit_rows[i].clone();
            for col in &cols {
                let dot: S = resid.iter().zip(col.iter()).map(|(&a, &b)| a * b).sum();
                for (r, c) in resid.iter_mut().zip(col.iter()) {
                    *r = *r - dot * *c;
                }
            }
            let norm = resid.iter().map(|&v| v * v).sum::<S>().sqrt();
            if norm > indep_tol {
                let unit: Vec<S> = resid.into_iter().map(|v| v / norm).collect();
                chosen = Some((i, unit));
                break;
            }
        }
        match chosen {
            Some((i, unit)) => {
                cols.push(unit);
                picked[i] = true;
                last = i;
            }
            None => return Err(Error::DegenerateRows { k }),
        }
    }
    let mut r = Array2::zeros((k, k));
    for (c, col) in cols.iter().enumerate() {
        for row in 0..k {
            r[[row, c]] = col[row];
        }
    }
    Ok(r)
}

/// Row-wise argmax assignment of `Z R Lambda` with amplitude scaling.
///
/// Ties pick the lowest column index. Each row of the returned matrix has
/// one nonzero, `c / sqrt(cluster size)` with `c = ||Z||_F / sqrt(number of
/// nonempty clusters)`. Empty clusters are permitted here; the rounding
/// loop repairs them.
pub fn assign_x<S: Scalar>(
    z: &ArrayView2<S>,
    r: &Array2<S>,
    lambda: &[S],
) -> (Array2<S>, Vec<usize>)
{
    let m = scaled_target(z, r, lambda);
    let assign = argmax_rows(&m);
    let x = build_x(z, &assign, lambda.len());
    (x, assign)
}

/// Orthogonal rotation that best aligns `Z` with `X` in Frobenius norm,
/// i.e. the orthogonal polar factor of `Z^T X`.
pub fn procrustes_r<S: Scalar>(z: &ArrayView2<S>, x: &Array2<S>) -> Result<Array2<S>> {
    let m = z.t().dot(x);
    orthogonal_polar_factor(&m)
}

/// Per-column least-squares diagonal scaling of `Z R` onto `X`. Vanishing
/// denominators and exact zeros are floored at [`LAMBDA_FLOOR`].
pub fn fit_lambda<S: Scalar>(z: &ArrayView2<S>, r: &Array2<S>, x: &Array2<S>) -> Vec<S> {
    let zr = z.dot(r);
    let k = r.ncols();
    let n = z.nrows();
    (0..k)
        .map(|j| {
            let mut num = S::zero();
            let mut den = S::zero();
            for i in 0..n {
                num += x[[i, j]] * zr[[i, j]];
                den += zr[[i, j]] * zr[[i, j]];
            }
            if den == S::zero() {
                return sc::<S>(LAMBDA_FLOOR);
            }
            let lam = num / den;
            if lam == S::zero() {
                sc::<S>(LAMBDA_FLOOR)
            } else {
                lam
            }
        })
        .collect()
}

/// Fit residual `||X - Z R diag(lambda)||_F`.
pub fn phi<S: Scalar>(z: &ArrayView2<S>, x: &Array2<S>, r: &Array2<S>, lambda: &[S]) -> S {
    let m = scaled_target(z, r, lambda);
    let mut acc = S::zero();
    for (a, b) in x.iter().zip(m.iter()) {
        let d = *a - *b;
        acc += d * d;
    }
    acc.sqrt()
}

fn scaled_target<S: Scalar>(z: &ArrayView2<S>, r: &Array2<S>, lambda: &[S]) -> Array2<S> {
    let mut m = z.dot(r);
    for (j, &lam) in lambda.iter().enumerate() {
        for i in 0..m.nrows() {
            m[[i, j]] *= lam;
        }
    }
    m
}

fn argmax_rows<S: Scalar>(m: &Array2<S>) -> Vec<usize> {
    let (n, k) = (m.nrows(), m.ncols());
    (0..n)
        .map(|i| {
            let mut best = 0usize;
            for j in 1..k {
                if m[[i, j]] > m[[i, best]] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

fn build_x<S: Scalar>(z: &ArrayView2<S>, assign: &[usize], k: usize) -> Array2<S> {
    let n = assign.len();
    let mut sizes = vec![0usize; k];
    for &c in assign {
        sizes[c] += 1;
    }
    let nonempty = sizes.iter().filter(|&&s| s > 0).count().max(1);
    let z_norm = z.iter().map(|&v| v * v).sum::<S>().sqrt();
    let scale = z_norm / sc::<S>(nonempty as f64).sqrt();
    let mut x = Array2::zeros((n, k));
    for (i, &c) in assign.iter().enumerate() {
        x[[i, c]] = scale / sc::<S>(sizes[c] as f64).sqrt();
    }
    x
}

/// Argmax assignment followed by empty-cluster repair: while some cluster is
/// empty, the row with the largest fit residual among clusters that can
/// spare a member (size two or more) moves into it.
fn assign_and_repair<S: Scalar>(
    z: &ArrayView2<S>,
    r: &Array2<S>,
    lambda: &[S],
) -> Result<(Array2<S>, Vec<usize>)> {
    let k = lambda.len();
    let m = scaled_target(z, r, lambda);
    let mut assign = argmax_rows(&m);
    loop {
        let mut sizes = vec![0usize; k];
        for &c in &assign {
            sizes[c] += 1;
        }
        let empty = match sizes.iter().position(|&s| s == 0) {
            Some(j) => j,
            None => break,
        };
        let x = build_x(z, &assign, k);
        let mut donor: Option<(usize, S)> = None;
        for i in 0..assign.len() {
            if sizes[assign[i]] < 2 {
                continue;
            }
            let mut resid = S::zero();
            for j in 0..k {
                let d = x[[i, j]] - m[[i, j]];
                resid += d * d;
            }
            let better = match donor {
                None => true,
                Some((_, best)) => resid > best,
            };
            if better {
                donor = Some((i, resid));
            }
        }
        match donor {
            Some((i, _)) => assign[i] = empty,
            None => {
                return Err(Error::Convergence(
                    "cannot repair empty cluster: all occupied clusters are singletons"
                        .to_string(),
                ))
            }
        }
    }
    let x = build_x(z, &assign, k);
    Ok((x, assign))
}

/// Rounds a relaxed solution to a partition by guarded alternation.
///
/// Starting from a seeded spread-row rotation and unit scaling, each sweep
/// refits the rotation to the current assignment, refits the scaling, and
/// reassigns rows; the sweep is kept only if the residual does not
/// increase. Stops when the drop falls below `tol`, a sweep would increase
/// the residual, or `max_sweeps` is reached.
pub fn discretize<S: Scalar>(
    rs: &RelaxedSolution<S>,
    seed: u64,
    max_sweeps: usize,
    tol: S,
) -> Result<(Partition, DiscreteState<S>)> {
    let z = rs.z.view();
    let k = rs.k();
    let n = rs.n();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut r = init_rotation(&z, seed)?;
    let mut lambda = vec![S::one(); k];
    let (mut x, mut assign) = assign_and_repair(&z, &r, &lambda)?;
    let mut cur_phi = phi(&z, &x, &r, &lambda);
    let mut sweep_phis = vec![cur_phi];
    let mut jitter_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..max_sweeps {
        let cross = z.t().dot(&x);
        let r_new = match orthogonal_polar_factor(&cross) {
            Ok(rot) => rot,
            Err(Error::RankDeficient) => {
                // The refit is ill-posed when the projected assignment
                // collapses, e.g. cluster sums of `Z` rows cancel. Retry
                // with seeded noise at escalating scale-aware magnitudes;
                // if the fit never becomes well-posed, keep the current
                // valid state instead of failing the restart.
                let scale = cross
                    .iter()
                    .fold(S::zero(), |acc, &v| acc.max(v.abs()))
                    .max(S::one());
                let mut recovered = None;
                let mut magnitude = scale * sc::<S>(1e-10);
                for _ in 0..4 {
                    let mut jittered = cross.clone();
                    for v in jittered.iter_mut() {
                        let unit: f64 = jitter_rng.random_range(-1.0..1.0);
                        *v += magnitude * sc::<S>(unit);
                    }
                    if let Ok(rot) = orthogonal_polar_factor(&jittered) {
                        recovered = Some(rot);
                        break;
                    }
                    magnitude *= sc::<S>(100.0);
                }
                match recovered {
                    Some(rot) => rot,
                    None => break,
                }
            }
            Err(e) => return Err(e),
        };
        let lambda_new = fit_lambda(&z, &r_new, &x);
        let (x_new, assign_new) = assign_and_repair(&z, &r_new, &lambda_new)?;
        let phi_new = phi(&z, &x_new, &r_new, &lambda_new);
        if phi_new > cur_phi {
            break;
        }
        let drop = cur_phi - phi_new;
        x = x_new;
        r = r_new;
        lambda = lambda_new;
        assign = assign_new;
        cur_phi = phi_new;
        sweep_phis.push(cur_phi);
        if drop <= tol {
            break;
        }
    }
    let partition = Partition::new(assign, k)?;
    Ok((
        partition,
        DiscreteState {
            x,
            r,
            lambda,
            phi: cur_phi,
            sweep_phis,
        },
    ))
}

/// End-to-end clustering: relaxation, several seeded rounding restarts, and
/// selection of the partition with the lowest objective value. Returns the
/// partition together with a report carrying the objective.
pub fn cluster<S: Scalar>(
    g: &SignedGraph<S>,
    k: usize,
    seed: u64,
    opts: &ClusterOpts<S>,
) -> Result<(Partition, MetricsReport)> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    if opts.restarts == 0 {
        return Err(Error::BadParameter {
            name: "restarts",
            reason: "must be at least 1".to_string(),
        });
    }
    let rs = relaxed_solution_seeded(g, k, opts.eig_tol, seed)?;
    let mut best: Option<(S, Partition)> = None;
    for rseed in restart_seeds(seed, opts.restarts) {
        let (p, _) = discretize(&rs, rseed, opts.max_sweeps, opts.phi_tol)?;
        let value = g.sncut(&p)?;
        let replace = match &best {
            None => true,
            Some((best_value, _)) => value < *best_value,
        };
        if replace {
            best = Some((value, p));
        }
    }
    let (_, partition) = best.expect("at least one restart ran");
    let report = metrics::report(g, &partition, None, None, None, &ReportOpts::default())?;
    Ok((partition, report))
}
