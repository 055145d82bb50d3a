//! Signed weighted graphs and the cut quantities defined on them.
//!
//! A [`SignedGraph`] is a symmetric matrix of edge weights with zero
//! diagonal; weights may be negative. Degrees, volumes, and Laplacians are
//! built from absolute weights, so the signed Laplacian stays positive
//! semidefinite even with repulsion edges present. The clustering objective
//! ([`SignedGraph::sncut`]) charges each cluster for its boundary and twice
//! for the negative edges it keeps inside, normalized by cluster volume.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};

/// Magnitudes below this are treated as structural zeros and dropped when a
/// graph is assembled.
pub const STRUCTURAL_ZERO: f64 = 1e-12;

/// Symmetric signed weighted graph in compressed adjacency form.
///
/// Invariants held by construction: no self-loops, no stored entry with
/// magnitude below [`STRUCTURAL_ZERO`], exact symmetry (each undirected edge
/// is stored in both directions with the same weight).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph<S: Scalar = f64> {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    w: Vec<S>,
    labels: Option<Vec<String>>,
}

/// Per-node sums of absolute incident weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDegree<S: Scalar = f64> {
    d: Vec<S>,
}

impl<S: Scalar> SignedDegree<S> {
    pub fn values(&self) -> &[S] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn get(&self, i: usize) -> S {
        self.d[i]
    }

    /// Index of the first node with zero degree, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.d.iter().position(|&v| v == S::zero())
    }

    /// Elementwise `1 / sqrt(d)`. Fails on the first isolated node.
    pub fn inv_sqrt(&self) -> Result<Vec<S>> {
        if let Some(i) = self.first_zero() {
            return Err(Error::IsolatedVertex(i));
        }
        Ok(self.d.iter().map(|&v| v.sqrt().recip()).collect())
    }
}

/// Hard assignment of `n` nodes into `k` nonempty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assign: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition, validating that every assignment is below `k` and
    /// every cluster in `0..k` is nonempty.
    pub fn new(assign: Vec<usize>, k: usize) -> Result<Self> {
        let n = assign.len();
        if k == 0 || k > n {
            return Err(Error::BadK { k, n });
        }
        let mut seen = vec![false; k];
        for (node, &c) in assign.iter().enumerate() {
            if c >= k {
                return Err(Error::BadParameter {
                    name: "assignments",
                    reason: format!("node {node} assigned to cluster {c} but k = {k}"),
                });
            }
            seen[c] = true;
        }
        if let Some(j) = seen.iter().position(|&s| !s) {
            return Err(Error::EmptyCluster(j));
        }
        Ok(Partition { assign, k })
    }

    /// All nodes in one cluster.
    pub fn single_cluster(n: usize) -> Result<Self> {
        Partition::new(vec![0; n], 1)
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assign
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    /// Cluster sizes indexed by cluster id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.assign {
            sizes[c] += 1;
        }
        sizes
    }

    /// Node lists per cluster, each ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assign.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Relabels clusters in order of first appearance, so two partitions that
    /// agree up to cluster renaming compare equal.
    pub fn canonical(&self) -> Partition {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0usize;
        let assign = self
            .assign
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Partition {
            assign,
            k: self.k,
        }
    }
}

impl<S: Scalar> SignedGraph<S> {
    /// Assembles a graph from undirected edge triples `(i, j, w)`.
    ///
    /// Duplicate listings of the same pair must carry bitwise-equal weights;
    /// anything else is a conflict. Entries with `|w| < STRUCTURAL_ZERO` are
    /// dropped after conflict checking. Labels, when given, must have length
    /// `n` and be pairwise distinct.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, S)],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(ref ls) = labels {
            if ls.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: ls.len(),
                });
            }
            let mut set = std::collections::HashSet::with_capacity(n);
            for l in ls {
                if !set.insert(l.as_str()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        let mut map: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for &(i, j, w) in edges {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if i >= n {
                return Err(Error::NodeOutOfRange { node: i, n });
            }
            if j >= n {
                return Err(Error::NodeOutOfRange { node: j, n });
            }
            let key = (i.min(j), i.max(j));
            match map.get(&key) {
                Some(&prev) if prev != w => {
                    return Err(Error::ConflictingEdge {
                        i: key.0,
                        j: key.1,
                        first: format!("{prev}"),
                        second: format!("{w}"),
                    });
                }
                Some(_) => {}
                None => {
                    map.insert(key, w);
                }
            }
        }
        map.retain(|_, w| w.abs() >= sc::<S>(STRUCTURAL_ZERO));

        let mut deg_count = vec![0usize; n];
        for (&(i, j), _) in &map {
            deg_count[i] += 1;
            deg_count[j] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + deg_count[i];
        }
        let nnz = row_ptr[n];
        let mut col = vec![0usize; nnz];
        let mut w = vec![S::zero(); nnz];
        let mut cursor = row_ptr.clone();
        // BTreeMap iteration is ordered by (i, j), so each row's neighbor
        // list comes out sorted without a second pass.
        for (&(i, j), &wij) in &map {
            col[cursor[i]] = j;
            w[cursor[i]] = wij;
            cursor[i] += 1;
        }
        for (&(i, j), &wij) in &map {
            col[cursor[j]] = i;
            w[cursor[j]] = wij;
            cursor[j] += 1;
        }
        // The second insertion pass appends lower-index neighbors after the
        // upper ones, so rows need an explicit sort.
        for i in 0..n {
            let lo = row_ptr[i];
            let hi = row_ptr[i + 1];
            let mut pairs: Vec<(usize, S)> = col[lo..hi]
                .iter()
                .copied()
                .zip(w[lo..hi].iter().copied())
                .collect();
            pairs.sort_by_key(|&(c, _)| c);
            for (t, (c, wij)) in pairs.into_iter().enumerate() {
                col[lo + t] = c;
                w[lo + t] = wij;
            }
        }
        Ok(SignedGraph {
            n,
            row_ptr,
            col,
            w,
            labels,
        })
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges actually stored.
    pub fn edge_count(&self) -> usize {
        self.col.len() / 2
    }

    /// Number of stored undirected edges with negative weight.
    pub fn negative_edge_count(&self) -> usize {
        self.edges().filter(|&(_, _, w)| w < S::zero()).count()
    }

    /// Iterates undirected edges as `(i, j, w)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.n).flat_map(move |i| {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            self.col[lo..hi]
                .iter()
                .zip(self.w[lo..hi].iter())
                .filter(move |&(&j, _)| i < j)
                .map(move |(&j, &wij)| (i, j, wij))
        })
    }

    /// Neighbor indices and weights of node `i`.
    pub fn neighbors(&self, i: usize) -> (&[usize], &[S]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col[lo..hi], &self.w[lo..hi])
    }

    /// Weight of edge `(i, j)`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> S {
        let (cols, ws) = self.neighbors(i);
        match cols.binary_search(&j) {
            Ok(t) => ws[t],
            Err(_) => S::zero(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Node labels, falling back to decimal indices when none were attached.
    pub fn labels_or_indices(&self) -> Vec<String> {
        match &self.labels {
            Some(ls) => ls.clone(),
            None => (0..self.n).map(|i| i.to_string()).collect(),
        }
    }

    /// Replaces the label set (validated like in `from_edges`).
    pub fn set_labels(&mut self, labels: Option<Vec<String>>) -> Result<()> {
        if let Some(ref ls) = labels {
            if ls.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: ls.len(),
                });
            }
            let mut set = std::collections::HashSet::with_capacity(ls.len());
            for l in ls {
                if !set.insert(l.as_str()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        self.labels = labels;
        Ok(())
    }

    /// Dense copy of the weight matrix.
    pub fn to_dense(&self) -> Array2<S> {
        let mut a = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                a[[i, j]] = wij;
            }
        }
        a
    }

    /// Per-node sums of absolute incident weights.
    pub fn signed_degree(&self) -> SignedDegree<S> {
        let d = (0..self.n)
            .map(|i| {
                let (_, ws) = self.neighbors(i);
                ws.iter().map(|w| w.abs()).sum()
            })
            .collect();
        SignedDegree { d }
    }

    /// Sum of degrees over a node set. Nodes must be in range; repeats count
    /// once (the set is deduplicated through a membership mask).
    pub fn vol(&self, nodes: &[usize]) -> Result<S> {
        let mask = self.mask(nodes)?;
        let deg = self.signed_degree();
        let mut v = S::zero();
        for (i, &inside) in mask.iter().enumerate() {
            if inside {
                v += deg.get(i);
            }
        }
        Ok(v)
    }

    fn mask(&self, nodes: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &i in nodes {
            if i >= self.n {
                return Err(Error::NodeOutOfRange { node: i, n: self.n });
            }
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Ordered-pair sum of positive weights between two node sets:
    /// `sum over (i in A, j in B, i != j) of max(w_ij, 0)`.
    ///
    /// Both directions contribute when the sets overlap, so the positive
    /// links of a set with itself count each undirected edge twice.
    pub fn links_pos(&self, a: &[usize], b: &[usize]) -> Result<S> {
        self.links_signed(a, b, true)
    }

    /// Ordered-pair sum of absolute negative weights between two node sets.
    /// Same double-counting convention as [`SignedGraph::links_pos`].
    pub fn links_neg(&self, a: &[usize], b: &[usize]) -> Result<S> {
        self.links_signed(a, b, false)
    }

    fn links_signed(&self, a: &[usize], b: &[usize], positive: bool) -> Result<S> {
        let ma = self.mask(a)?;
        let mb = self.mask(b)?;
        let mut total = S::zero();
        for i in 0..self.n {
            if !ma[i] {
                continue;
            }
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                if !mb[j] {
                    continue;
                }
                if positive && wij > S::zero() {
                    total += wij;
                } else if !positive && wij < S::zero() {
                    total += -wij;
                }
            }
        }
        Ok(total)
    }

    /// Total absolute weight crossing from `a` to its complement, each
    /// boundary edge counted once.
    pub fn cut(&self, a: &[usize]) -> Result<S> {
        let mask = self.mask(a)?;
        let mut total = S::zero();
        for i in 0..self.n {
            if !mask[i] {
                continue;
            }
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                if !mask[j] {
                    total += wij.abs();
                }
            }
        }
        Ok(total)
    }

    /// Signed Laplacian `D - W` where `D` holds absolute-weight degrees.
    /// Symmetric and positive semidefinite.
    pub fn signed_laplacian(&self) -> Array2<S> {
        let deg = self.signed_degree();
        let mut l = self.to_dense().mapv(|v| -v);
        for i in 0..self.n {
            l[[i, i]] = deg.get(i);
        }
        l
    }

    /// Normalized signed Laplacian `I - D^{-1/2} W D^{-1/2}`.
    /// Fails on isolated nodes; eigenvalues lie in `[0, 2]`.
    pub fn normalized_signed_laplacian(&self) -> Result<Array2<S>> {
        let inv = self.signed_degree().inv_sqrt()?;
        let mut l = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            l[[i, i]] = S::one();
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                l[[i, j]] = -inv[i] * wij * inv[j];
            }
        }
        Ok(l)
    }

    /// Quadratic form `x^T (D - W) x`, evaluated edge-wise without forming
    /// the Laplacian. Nonnegative for every `x`.
    pub fn quadratic_form(&self, x: &[S]) -> Result<S> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let deg = self.signed_degree();
        let mut total = S::zero();
        for i in 0..self.n {
            total += deg.get(i) * x[i] * x[i];
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                total -= wij * x[i] * x[j];
            }
        }
        Ok(total)
    }

    /// Signed normalized cut of a partition: for each cluster, the boundary
    /// weight plus twice the internal negative links, divided by the cluster
    /// volume, summed over clusters.
    pub fn sncut(&self, p: &Partition) -> Result<S> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let k = p.k();
        let deg = self.signed_degree();
        let mut vol = vec![S::zero(); k];
        for (i, &c) in p.assignments().iter().enumerate() {
            vol[c] += deg.get(i);
        }
        let mut cut = vec![S::zero(); k];
        let mut neg_in = vec![S::zero(); k];
        let assign = p.assignments();
        for i in 0..self.n {
            let ci = assign[i];
            let (cols, ws) = self.neighbors(i);
            for (&j, &wij) in cols.iter().zip(ws) {
                if assign[j] != ci {
                    // Directed traversal visits (i, j) once per endpoint, so
                    // accumulating |w| on the origin cluster charges each
                    // boundary edge exactly once per cluster.
                    cut[ci] += wij.abs();
                } else if wij < S::zero() {
                    neg_in[ci] += -wij;
                }
            }
        }
        let mut total = S::zero();
        for j in 0..k {
            if vol[j] == S::zero() {
                return Err(Error::ZeroVolume(j));
            }
            total += (cut[j] + neg_in[j] + neg_in[j]) / vol[j];
        }
        Ok(total)
    }

    /// Same objective evaluated through dense matrix algebra: with indicator
    /// columns `X^j` (optionally scaled per cluster), sums
    /// `(X^j)^T (D - W) X^j / (X^j)^T D X^j`.
    ///
    /// Kept as a deliberately independent evaluation route; per-cluster
    /// scaling leaves the value unchanged.
    pub fn sncut_rayleigh(&self, p: &Partition, amplitudes: Option<&[S]>) -> Result<S> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let k = p.k();
        if let Some(a) = amplitudes {
            if a.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: a.len(),
                });
            }
        }
        let l = self.signed_laplacian();
        let deg = self.signed_degree();
        let mut total = S::zero();
        for j in 0..k {
            let amp = amplitudes.map_or(S::one(), |a| a[j]);
            let x: Array1<S> = Array1::from_iter(
                p.assignments()
                    .iter()
                    .map(|&c| if c == j { amp } else { S::zero() }),
            );
            let lx = l.dot(&x);
            let num: S = x.iter().zip(lx.iter()).map(|(&a, &b)| a * b).sum();
            let den: S = x
                .iter()
                .enumerate()
                .map(|(i, &v)| deg.get(i) * v * v)
                .sum();
            if den == S::zero() {
                return Err(Error::ZeroVolume(j));
            }
            total += num / den;
        }
        Ok(total)
    }
}

/// Reads a graph from the plain edge-list format:
/// a header line `n <count>`, then one `i j w` line per undirected edge.
pub fn read_graph<S: Scalar>(path: impl AsRef<Path>) -> Result<SignedGraph<S>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_graph_from(BufReader::new(file), &path.display().to_string())
}

/// Reader-based variant of [`read_graph`]; `origin` names the source in
/// parse errors.
pub fn read_graph_from<S: Scalar>(r: impl BufRead, origin: &str) -> Result<SignedGraph<S>> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, S)> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split_whitespace();
        if n.is_none() {
            let tag = parts.next().unwrap();
            let count = parts.next();
            if tag != "n" || count.is_none() || parts.next().is_some() {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: lineno + 1,
                    msg: format!("expected header `n <count>`, got {t:?}"),
                });
            }
            let count: usize = count.unwrap().parse().map_err(|e| Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: format!("bad node count: {e}"),
            })?;
            n = Some(count);
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: format!("expected `i j w`, got {t:?}"),
            });
        }
        let parse_idx = |s: &str| -> Result<usize> {
            s.parse().map_err(|e| Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: format!("bad node index {s:?}: {e}"),
            })
        };
        let i = parse_idx(fields[0])?;
        let j = parse_idx(fields[1])?;
        let wf: f64 = fields[2].parse().map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: lineno + 1,
            msg: format!("bad weight {:?}: {e}", fields[2]),
        })?;
        if !wf.is_finite() {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: format!("non-finite weight {wf}"),
            });
        }
        edges.push((i, j, sc::<S>(wf)));
    }
    let n = n.ok_or_else(|| Error::Parse {
        path: origin.to_string(),
        line: 0,
        msg: "missing header line `n <count>`".to_string(),
    })?;
    SignedGraph::from_edges(n, &edges, None)
}

/// Writes the edge-list format read by [`read_graph`]. Edges come out in
/// ascending `(i, j)` order, so output is deterministic.
pub fn write_graph<S: Scalar>(g: &SignedGraph<S>, mut w: impl Write) -> Result<()> {
    let mut buf = String::new();
    writeln!(buf, "n {}", g.n()).expect("string write");
    for (i, j, wij) in g.edges() {
        writeln!(buf, "{i} {j} {wij}").expect("string write");
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

/// Path-based variant of [`write_graph`].
pub fn write_graph_path<S: Scalar>(g: &SignedGraph<S>, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_graph(g, BufWriter::new(file))
}

/// Reads node labels, one per line, line order giving node order.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

/// Writes node labels, one per line.
pub fn write_labels(labels: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for l in labels {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a partition as `label<TAB>cluster` lines in node-index order.
pub fn write_partition(
    labels: &[String],
    p: &Partition,
    mut w: impl Write,
) -> Result<()> {
    if labels.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: labels.len(),
        });
    }
    for (label, &c) in labels.iter().zip(p.assignments()) {
        writeln!(w, "{label}\t{c}")?;
    }
    Ok(())
}

/// Reads a partition written by [`write_partition`], returning labels and
/// raw cluster ids in file order. Cluster ids are compacted by the caller if
/// needed; here they are validated only for being parseable.
pub fn read_partition(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<usize>)> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut labels = Vec::new();
    let mut assign = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split('\t');
        let label = parts.next().unwrap_or_default();
        let cluster = parts.next().ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            msg: "expected `label<TAB>cluster`".to_string(),
        })?;
        let c: usize = cluster.trim().parse().map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            msg: format!("bad cluster id {cluster:?}: {e}"),
        })?;
        labels.push(label.to_string());
        assign.push(c);
    }
    Ok((labels, assign))
}

/// Rebuilds a validated [`Partition`] from raw cluster ids, compacting them
/// to `0..k` in order of first appearance.
pub fn partition_from_raw(assign_raw: &[usize]) -> Result<Partition> {
    let mut map = BTreeMap::new();
    let mut assign = Vec::with_capacity(assign_raw.len());
    for &c in assign_raw {
        let next = map.len();
        let id = *map.entry(c).or_insert(next);
        assign.push(id);
    }
    let k = map.len();
    Partition::new(assign, k)
}
