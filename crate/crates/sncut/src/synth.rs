//! Synthetic signed graphs with known structure, plus exhaustive baselines.
//!
//! The planted generator draws a balanced ground-truth partition, connects
//! same-cluster pairs with positive weights at one rate and cross-cluster
//! pairs at another, flipping a configurable fraction of the cross edges
//! negative. The exhaustive searcher enumerates every partition of a small
//! graph into exactly `k` clusters to certify global optima, and the curve
//! helper sweeps cluster counts to show how antonym violations trade off
//! against synonym fragmentation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construct::Thesaurus;
use crate::discrete::{cluster, ClusterOpts};
use crate::error::{Error, Result};
use crate::metrics::{count_ndc, count_nne};
use crate::scalar::{sc, Scalar};
use crate::sgraph::{Partition, SignedGraph};

/// Hard cap for exhaustive partition enumeration.
pub const BRUTE_FORCE_MAX_N: usize = 12;

/// Parameters of the planted-partition generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedConfig {
    /// Number of nodes.
    pub n: usize,
    /// Number of planted clusters, balanced sizes.
    pub k: usize,
    /// Edge probability inside a cluster.
    pub p_in: f64,
    /// Edge probability across clusters.
    pub p_out: f64,
    /// Fraction of cross-cluster edges drawn negative.
    pub frac_neg_out: f64,
    /// Lower bound of the absolute weight range.
    pub w_lo: f64,
    /// Upper bound of the absolute weight range.
    pub w_hi: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            n: 100,
            k: 5,
            p_in: 0.3,
            p_out: 0.05,
            frac_neg_out: 0.5,
            w_lo: 0.5,
            w_hi: 1.0,
            seed: 0,
        }
    }
}

impl PlantedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::BadParameter {
                name: "n",
                reason: format!("need at least 2 nodes, got {}", self.n),
            });
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::BadK {
                k: self.k,
                n: self.n,
            });
        }
        for (name, v) in [
            ("p_in", self.p_in),
            ("p_out", self.p_out),
            ("frac_neg_out", self.frac_neg_out),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::BadParameter {
                    name,
                    reason: format!("must lie in [0, 1], got {v}"),
                });
            }
        }
        if !(self.w_lo > 0.0) || self.w_hi < self.w_lo || !self.w_hi.is_finite() {
            return Err(Error::BadParameter {
                name: "w_lo",
                reason: format!(
                    "need 0 < w_lo <= w_hi, got [{}, {}]",
                    self.w_lo, self.w_hi
                ),
            });
        }
        Ok(())
    }
}

/// A generated graph with its ground truth.
#[derive(Debug, Clone)]
pub struct Planted<S: Scalar = f64> {
    pub graph: SignedGraph<S>,
    pub truth: Partition,
    /// Nodes that came out isolated and were patched with one positive
    /// in-cluster edge so degree normalization stays defined.
    pub patched: Vec<usize>,
}

/// Draws a planted-partition graph. Ground truth uses contiguous balanced
/// blocks; node labels are `n0..`. Deterministic for a fixed config.
pub fn generate_planted<S: Scalar>(cfg: &PlantedConfig) -> Result<Planted<S>> {
    cfg.validate()?;
    let n = cfg.n;
    let k = cfg.k;
    let mut assign = vec![0usize; n];
    // First n % k blocks take the extra node.
    let base = n / k;
    let extra = n % k;
    let mut node = 0usize;
    for c in 0..k {
        let size = base + usize::from(c < extra);
        for _ in 0..size {
            assign[node] = c;
            node += 1;
        }
    }
    let truth = Partition::new(assign.clone(), k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges: Vec<(usize, usize, S)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let same = assign[i] == assign[j];
            let p = if same { cfg.p_in } else { cfg.p_out };
            if rng.random_range(0.0..1.0) >= p {
                continue;
            }
            let mut w = rng.random_range(cfg.w_lo..=cfg.w_hi);
            if !same && rng.random_range(0.0..1.0) < cfg.frac_neg_out {
                w = -w;
            }
            edges.push((i, j, sc::<S>(w)));
        }
    }
    let mut has_edge = vec![false; n];
    for &(i, j, _) in &edges {
        has_edge[i] = true;
        has_edge[j] = true;
    }
    let mut patched = Vec::new();
    for i in 0..n {
        if has_edge[i] {
            continue;
        }
        // Attach to a same-cluster partner when one exists, otherwise any
        // other node, with a positive weight.
        let mates: Vec<usize> = (0..n).filter(|&j| j != i && assign[j] == assign[i]).collect();
        let pool: Vec<usize> = if mates.is_empty() {
            (0..n).filter(|&j| j != i).collect()
        } else {
            mates
        };
        let j = pool[rng.random_range(0..pool.len())];
        let w = rng.random_range(cfg.w_lo..=cfg.w_hi);
        edges.push((i.min(j), i.max(j), sc::<S>(w)));
        has_edge[i] = true;
        has_edge[j] = true;
        patched.push(i);
    }
    let labels: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let graph = SignedGraph::from_edges(n, &edges, Some(labels))?;
    Ok(Planted {
        graph,
        truth,
        patched,
    })
}

/// Enumerates every partition of `g`'s nodes into exactly `k` nonempty
/// clusters and returns one with the smallest objective value. Candidates
/// containing a zero-volume cluster are infeasible and skipped. Limited to
/// [`BRUTE_FORCE_MAX_N`] nodes.
pub fn brute_force_min_sncut<S: Scalar>(g: &SignedGraph<S>, k: usize) -> Result<(Partition, S)> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut best: Option<(Partition, S)> = None;
    let mut assign = vec![0usize; n];
    enumerate_exactly_k(&mut assign, 0, 0, n, k, &mut |a| {
        let p = Partition::new(a.to_vec(), k).expect("enumeration yields k nonempty blocks");
        match g.sncut(&p) {
            Ok(v) => {
                let better = match &best {
                    None => true,
                    Some((_, bv)) => v < *bv,
                };
                if better {
                    best = Some((p, v));
                }
                Ok(())
            }
            Err(Error::ZeroVolume(_)) => Ok(()),
            Err(e) => Err(e),
        }
    })?;
    best.ok_or_else(|| Error::BadParameter {
        name: "graph",
        reason: "no partition has positive volume in every cluster".to_string(),
    })
}

/// Recursive restricted-growth enumeration: position `pos` may reuse any of
/// the `used` block ids or open block `used` (canonical first-appearance
/// labeling), pruned so exactly `k` blocks remain reachable.
fn enumerate_exactly_k<F>(
    assign: &mut Vec<usize>,
    used: usize,
    pos: usize,
    n: usize,
    k: usize,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if pos == n {
        if used == k {
            visit(assign)?;
        }
        return Ok(());
    }
    // Remaining positions must still be able to open k - used new blocks.
    let remaining = n - pos;
    if used + remaining < k {
        return Ok(());
    }
    let top = if used < k { used + 1 } else { k };
    for c in 0..top {
        assign[pos] = c;
        let next_used = if c == used { used + 1 } else { used };
        enumerate_exactly_k(assign, next_used, pos + 1, n, k, visit)?;
    }
    Ok(())
}

/// One point of a cluster-count sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub nne: usize,
    pub ndc: usize,
}

/// Runs the full pipeline at each requested cluster count and reports the
/// two thesaurus counts. With no thesaurus given, one is derived from the
/// graph's own edge signs (negative edge: antonyms; positive: synonyms).
/// `k = 1` evaluates the single-cluster partition directly.
pub fn nne_ndc_curve<S: Scalar>(
    g: &SignedGraph<S>,
    thes: Option<&Thesaurus>,
    ks: &[usize],
    seed: u64,
    opts: &ClusterOpts<S>,
) -> Result<Vec<CurvePoint>> {
    let n = g.n();
    let labels = g.labels_or_indices();
    let derived;
    let thes = match thes {
        Some(t) => t,
        None => {
            let mut t = Thesaurus::new();
            for (i, j, w) in g.edges() {
                if w < S::zero() {
                    t.add_antonym(&labels[i], &labels[j])?;
                } else {
                    t.add_synonym(&labels[i], &labels[j])?;
                }
            }
            derived = t;
            &derived
        }
    };
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        if k == 0 || k > n {
            return Err(Error::BadK { k, n });
        }
        let p = if k == 1 {
            Partition::single_cluster(n)?
        } else {
            cluster(g, k, seed, opts)?.0
        };
        out.push(CurvePoint {
            k,
            nne: count_nne(&p, thes, &labels)?,
            ndc: count_ndc(&p, thes, &labels)?,
        });
    }
    Ok(out)
}

/// Formats curve points as CSV with a `K,nne,ndc` header.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("K,nne,ndc\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.k, p.nne, p.ndc));
    }
    out
}
