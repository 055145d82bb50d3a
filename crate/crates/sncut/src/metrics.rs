//! Partition quality measures.
//!
//! Thesaurus-based: antonym pairs left inside a cluster (a count to drive
//! to zero) and disconnected synonym components in excess of one per
//! cluster. Gold-class based: purity and normalized entropy. Ratings
//! based: same-cluster accuracy on highly similar pairs. Plus the adjusted
//! Rand index for comparing two labelings outright.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construct::Thesaurus;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sgraph::{Partition, SignedGraph};

/// Word to gold class assignments. Class ids are compacted to dense indices
/// in order of first appearance.
#[derive(Debug, Clone, Default)]
pub struct GoldClasses {
    class_of: HashMap<String, usize>,
    class_names: Vec<String>,
}

impl GoldClasses {
    pub fn new() -> Self {
        GoldClasses::default()
    }

    /// Inserts a word with its class label. Re-listing a word with a
    /// different class is an error.
    pub fn insert(&mut self, word: &str, class: &str) -> Result<()> {
        let id = match self.class_names.iter().position(|c| c == class) {
            Some(i) => i,
            None => {
                self.class_names.push(class.to_string());
                self.class_names.len() - 1
            }
        };
        match self.class_of.get(word) {
            Some(&prev) if prev != id => Err(Error::ConflictingPair(
                word.to_string(),
                class.to_string(),
            )),
            _ => {
                self.class_of.insert(word.to_string(), id);
                Ok(())
            }
        }
    }

    pub fn class_of(&self, word: &str) -> Option<usize> {
        self.class_of.get(word).copied()
    }

    /// Number of distinct classes.
    pub fn q(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }
}

/// Reads gold classes as `word<TAB>class_id` lines.
pub fn read_gold_classes(path: impl AsRef<Path>) -> Result<GoldClasses> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut gold = GoldClasses::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                msg: format!("expected `word<TAB>class`, got {t:?}"),
            });
        }
        gold.insert(fields[0].trim(), fields[1].trim())?;
    }
    Ok(gold)
}

/// Word pairs with similarity ratings.
#[derive(Debug, Clone, Default)]
pub struct SimilarityPairs {
    pairs: Vec<(String, String, f64)>,
}

impl SimilarityPairs {
    pub fn new(pairs: Vec<(String, String, f64)>) -> Result<Self> {
        for (a, b, r) in &pairs {
            if !r.is_finite() {
                return Err(Error::BadParameter {
                    name: "rating",
                    reason: format!("non-finite rating for ({a:?}, {b:?})"),
                });
            }
        }
        Ok(SimilarityPairs { pairs })
    }

    pub fn pairs(&self) -> &[(String, String, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Reads rated pairs as `word1<TAB>word2<TAB>rating` lines.
pub fn read_similarity_pairs(path: impl AsRef<Path>) -> Result<SimilarityPairs> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut pairs = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                msg: format!("expected `word1<TAB>word2<TAB>rating`, got {t:?}"),
            });
        }
        let rating: f64 = fields[2].trim().parse().map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            msg: format!("bad rating {:?}: {e}", fields[2]),
        })?;
        pairs.push((
            fields[0].trim().to_string(),
            fields[1].trim().to_string(),
            rating,
        ));
    }
    SimilarityPairs::new(pairs)
}

/// Options for [`report`].
#[derive(Debug, Clone)]
pub struct ReportOpts {
    /// Ratings strictly above this mark a pair as highly similar.
    pub high_cut: f64,
    /// Report raw synonym component counts instead of the excess-over-one
    /// convention.
    pub ndc_raw: bool,
}

impl Default for ReportOpts {
    fn default() -> Self {
        ReportOpts {
            high_cut: 8.0,
            ndc_raw: false,
        }
    }
}

/// Flat metrics summary; absent inputs leave fields unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sncut: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nne: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ndc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simlex_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simlex_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_synonym_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_antonym_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_gold_words: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_simlex_pairs: Option<usize>,
}

impl Default for MetricsReport {
    fn default() -> Self {
        MetricsReport {
            sncut: 0.0,
            nne: None,
            ndc: None,
            error: None,
            purity: None,
            entropy: None,
            simlex_accuracy: None,
            simlex_coverage: None,
            oov_synonym_pairs: None,
            oov_antonym_pairs: None,
            oov_gold_words: None,
            oov_simlex_pairs: None,
        }
    }
}

fn cluster_of_word<'a>(p: &Partition, labels: &'a [String]) -> Result<HashMap<&'a str, usize>> {
    if labels.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: labels.len(),
        });
    }
    let mut map = HashMap::with_capacity(labels.len());
    for (label, &c) in labels.iter().zip(p.assignments()) {
        if map.insert(label.as_str(), c).is_some() {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(map)
}

/// Number of antonym pairs whose two words land in the same cluster.
/// Pairs with either word missing from `labels` are ignored.
pub fn count_nne(p: &Partition, thes: &Thesaurus, labels: &[String]) -> Result<usize> {
    let cluster = cluster_of_word(p, labels)?;
    let mut count = 0usize;
    for (a, b) in thes.antonyms() {
        if let (Some(&ca), Some(&cb)) = (cluster.get(a), cluster.get(b)) {
            if ca == cb {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Counts thesaurus pairs not fully covered by `labels`, as
/// `(synonym pairs, antonym pairs)`.
pub fn count_oov_pairs(thes: &Thesaurus, labels: &[String]) -> (usize, usize) {
    let vocab: std::collections::HashSet<&str> = labels.iter().map(|s| s.as_str()).collect();
    let syn = thes
        .synonyms()
        .filter(|(a, b)| !vocab.contains(a) || !vocab.contains(b))
        .count();
    let ant = thes
        .antonyms()
        .filter(|(a, b)| !vocab.contains(a) || !vocab.contains(b))
        .count();
    (syn, ant)
}

/// Connected components of the synonym graph inside each cluster, with
/// every member word a vertex. Returns the per-cluster component counts.
fn synonym_components(p: &Partition, thes: &Thesaurus, labels: &[String]) -> Result<Vec<usize>> {
    let cluster = cluster_of_word(p, labels)?;
    let members = p.clusters();
    // Adjacency restricted to in-cluster synonym pairs, over node indices.
    let mut index_of: HashMap<&str, usize> = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        index_of.insert(l.as_str(), i);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
    for (a, b) in thes.synonyms() {
        if let (Some(&ca), Some(&cb)) = (cluster.get(a), cluster.get(b)) {
            if ca == cb {
                let ia = index_of[a];
                let ib = index_of[b];
                adj[ia].push(ib);
                adj[ib].push(ia);
            }
        }
    }
    let mut counts = Vec::with_capacity(members.len());
    let mut seen = vec![false; labels.len()];
    for nodes in &members {
        let mut comps = 0usize;
        for &start in nodes {
            if seen[start] {
                continue;
            }
            comps += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        counts.push(comps);
    }
    Ok(counts)
}

/// Sum over clusters of synonym components in excess of one:
/// `sum_r max(components_r - 1, 0)`. Every member word counts as a vertex,
/// so clusters of unrelated singletons accrue excess components.
pub fn count_ndc(p: &Partition, thes: &Thesaurus, labels: &[String]) -> Result<usize> {
    Ok(synonym_components(p, thes, labels)?
        .into_iter()
        .map(|c| c.saturating_sub(1))
        .sum())
}

/// Raw total of synonym components across clusters, without subtracting the
/// one free component per cluster.
pub fn count_ndc_raw(p: &Partition, thes: &Thesaurus, labels: &[String]) -> Result<usize> {
    Ok(synonym_components(p, thes, labels)?.into_iter().sum())
}

/// Combined thesaurus error: `(nne + ndc) / n` over the full node count.
pub fn error_rate(p: &Partition, thes: &Thesaurus, labels: &[String]) -> Result<f64> {
    let nne = count_nne(p, thes, labels)?;
    let ndc = count_ndc(p, thes, labels)?;
    Ok((nne + ndc) as f64 / p.len() as f64)
}

/// Fraction of gold-covered words whose cluster's plurality class matches
/// their own: `(1/n) * sum_r max_i n_r_i` over covered words.
pub fn purity(p: &Partition, gold: &GoldClasses, labels: &[String]) -> Result<f64> {
    let table = contingency(p, gold, labels)?;
    let n: usize = table.iter().flatten().sum();
    if n == 0 {
        return Err(Error::BadParameter {
            name: "gold",
            reason: "no gold-labeled word appears among the nodes".to_string(),
        });
    }
    let hits: usize = table
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(hits as f64 / n as f64)
}

/// Cluster-size weighted normalized class entropy, in `[0, 1]`:
/// `sum_r (n_r/n) * (-1/log q) * sum_i (n_r_i/n_r) log(n_r_i/n_r)`, with
/// `0 log 0 = 0`. Fails when only one gold class is represented.
pub fn entropy(p: &Partition, gold: &GoldClasses, labels: &[String]) -> Result<f64> {
    let table = contingency(p, gold, labels)?;
    let n: usize = table.iter().flatten().sum();
    if n == 0 {
        return Err(Error::BadParameter {
            name: "gold",
            reason: "no gold-labeled word appears among the nodes".to_string(),
        });
    }
    let mut class_present = vec![false; gold.q()];
    for row in &table {
        for (i, &c) in row.iter().enumerate() {
            if c > 0 {
                class_present[i] = true;
            }
        }
    }
    let q = class_present.iter().filter(|&&b| b).count();
    if q <= 1 {
        return Err(Error::SingleClass);
    }
    let log_q = (q as f64).ln();
    let mut total = 0.0;
    for row in &table {
        let n_r: usize = row.iter().sum();
        if n_r == 0 {
            continue;
        }
        let mut h = 0.0;
        for &n_ri in row {
            if n_ri == 0 {
                continue;
            }
            let frac = n_ri as f64 / n_r as f64;
            h -= frac * frac.ln();
        }
        total += (n_r as f64 / n as f64) * h / log_q;
    }
    Ok(total)
}

/// Cluster-by-class counts over words that are both clustered and
/// gold-labeled.
fn contingency(
    p: &Partition,
    gold: &GoldClasses,
    labels: &[String],
) -> Result<Vec<Vec<usize>>> {
    if labels.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: labels.len(),
        });
    }
    let mut table = vec![vec![0usize; gold.q()]; p.k()];
    for (label, &c) in labels.iter().zip(p.assignments()) {
        if let Some(class) = gold.class_of(label) {
            table[c][class] += 1;
        }
    }
    Ok(table)
}

/// Number of gold entries whose word is not a node label.
pub fn count_oov_gold(gold: &GoldClasses, labels: &[String]) -> usize {
    let vocab: std::collections::HashSet<&str> = labels.iter().map(|s| s.as_str()).collect();
    gold.class_of
        .keys()
        .filter(|w| !vocab.contains(w.as_str()))
        .count()
}

/// Outcome of rating-based evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimlexEval {
    /// Fraction of covered high-similarity pairs sharing a cluster.
    pub accuracy: f64,
    /// Fraction of high-similarity pairs with both words clustered.
    pub coverage: f64,
    /// Pairs rated strictly above the cutoff.
    pub high_pairs: usize,
    /// High pairs with both words present.
    pub covered: usize,
    /// Covered pairs sharing a cluster.
    pub hits: usize,
}

/// Same-cluster accuracy over pairs rated strictly above `high_cut`.
/// Ratios with empty denominators are reported as zero.
pub fn simlex_eval(
    p: &Partition,
    pairs: &SimilarityPairs,
    labels: &[String],
    high_cut: f64,
) -> Result<SimlexEval> {
    let cluster = cluster_of_word(p, labels)?;
    let mut high_pairs = 0usize;
    let mut covered = 0usize;
    let mut hits = 0usize;
    for (a, b, rating) in pairs.pairs() {
        if *rating <= high_cut {
            continue;
        }
        high_pairs += 1;
        if let (Some(&ca), Some(&cb)) = (cluster.get(a.as_str()), cluster.get(b.as_str())) {
            covered += 1;
            if ca == cb {
                hits += 1;
            }
        }
    }
    let accuracy = if covered > 0 {
        hits as f64 / covered as f64
    } else {
        0.0
    };
    let coverage = if high_pairs > 0 {
        covered as f64 / high_pairs as f64
    } else {
        0.0
    };
    Ok(SimlexEval {
        accuracy,
        coverage,
        high_pairs,
        covered,
        hits,
    })
}

/// Number of rated pairs with either word missing from `labels`.
pub fn count_oov_simlex(pairs: &SimilarityPairs, labels: &[String]) -> usize {
    let vocab: std::collections::HashSet<&str> = labels.iter().map(|s| s.as_str()).collect();
    pairs
        .pairs()
        .iter()
        .filter(|(a, b, _)| !vocab.contains(a.as_str()) || !vocab.contains(b.as_str()))
        .count()
}

/// Adjusted Rand index between two labelings of the same items. Equals one
/// for identical partitions (up to renaming) and is near zero for
/// independent ones.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::BadParameter {
            name: "labelings",
            reason: "need at least two items".to_string(),
        });
    }
    let ka = a.iter().max().map_or(0, |&m| m + 1);
    let kb = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b.iter()) {
        table[x][y] += 1;
    }
    let choose2 = |v: u64| -> f64 { (v * v.saturating_sub(1)) as f64 / 2.0 };
    let sum_ij: f64 = table.iter().flatten().map(|&v| choose2(v)).sum();
    let sum_a: f64 = table
        .iter()
        .map(|row| choose2(row.iter().sum::<u64>()))
        .sum();
    let sum_b: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let total = choose2(n as u64);
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        // Both labelings are trivial in the same way, hence identical.
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / denom)
}

/// Assembles the flat report for whatever references are supplied.
pub fn report<S: Scalar>(
    g: &SignedGraph<S>,
    p: &Partition,
    thes: Option<&Thesaurus>,
    gold: Option<&GoldClasses>,
    simlex: Option<&SimilarityPairs>,
    opts: &ReportOpts,
) -> Result<MetricsReport> {
    let labels = g.labels_or_indices();
    let sncut = g
        .sncut(p)?
        .to_f64()
        .expect("objective value representable as f64");
    let mut rep = MetricsReport {
        sncut,
        ..MetricsReport::default()
    };
    if let Some(thes) = thes {
        let nne = count_nne(p, thes, &labels)?;
        let ndc = if opts.ndc_raw {
            count_ndc_raw(p, thes, &labels)?
        } else {
            count_ndc(p, thes, &labels)?
        };
        rep.nne = Some(nne);
        rep.ndc = Some(ndc);
        rep.error = Some((nne + ndc) as f64 / p.len() as f64);
        let (syn, ant) = count_oov_pairs(thes, &labels);
        rep.oov_synonym_pairs = Some(syn);
        rep.oov_antonym_pairs = Some(ant);
    }
    if let Some(gold) = gold {
        rep.purity = Some(purity(p, gold, &labels)?);
        rep.entropy = Some(entropy(p, gold, &labels)?);
        rep.oov_gold_words = Some(count_oov_gold(gold, &labels));
    }
    if let Some(pairs) = simlex {
        let ev = simlex_eval(p, pairs, &labels, opts.high_cut)?;
        rep.simlex_accuracy = Some(ev.accuracy);
        rep.simlex_coverage = Some(ev.coverage);
        rep.oov_simlex_pairs = Some(count_oov_simlex(pairs, &labels));
    }
    Ok(rep)
}
