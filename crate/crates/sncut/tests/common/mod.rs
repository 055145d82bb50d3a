#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sncut::sgraph::SignedGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random signed graph without isolated vertices: each pair becomes an edge
/// with probability `density`, magnitude uniform in [0.2, 1.5], sign negative
/// with probability `neg_frac`. Vertices left isolated by the draw get one
/// positive edge to the next vertex so degree-normalized operations stay
/// defined.
pub fn random_graph(seed: u64, n: usize, density: f64, neg_frac: f64) -> SignedGraph<f64> {
    assert!(n >= 2);
    let mut rng = rng(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut degree = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_range(0.0..1.0) < density {
                let mag = rng.random_range(0.2..1.5);
                let w = if rng.random_range(0.0..1.0) < neg_frac {
                    -mag
                } else {
                    mag
                };
                edges.push((i, j, w));
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    for i in 0..n {
        if degree[i] == 0 {
            let j = (i + 1) % n;
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            edges.push((a, b, 1.0));
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    SignedGraph::from_edges(n, &edges, None).expect("random graph construction")
}

/// All assignments of `n` items into exactly `k` nonempty blocks, in
/// restricted-growth form (block ids appear in first-use order).
pub fn partitions_exactly_k(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut assign = vec![0usize; n];
    fn recurse(assign: &mut Vec<usize>, pos: usize, used: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        let n = assign.len();
        if pos == n {
            if used == k {
                out.push(assign.clone());
            }
            return;
        }
        // Remaining positions must be enough to open the blocks still missing.
        let remaining = n - pos;
        let hi = usize::min(used, k - 1);
        for c in 0..=hi {
            let new_used = if c == used { used + 1 } else { used };
            if new_used + remaining - 1 >= k {
                assign[pos] = c;
                recurse(assign, pos + 1, new_used, k, out);
            }
        }
    }
    recurse(&mut assign, 0, 0, k, &mut out);
    out
}

/// Quadratic form evaluated the long way: sum over undirected edges of
/// |w| (x_i - sgn(w) x_j)^2. Independent of the library's edge iteration
/// except through the public edge list.
pub fn quadratic_oracle(g: &SignedGraph<f64>, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, j, w) in g.edges() {
        let s = if w > 0.0 { 1.0 } else { -1.0 };
        let d = x[i] - s * x[j];
        total += w.abs() * d * d;
    }
    total
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, f64::max(a.abs(), b.abs()))
}
