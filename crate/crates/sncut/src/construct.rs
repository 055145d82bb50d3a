//! Building signed graphs from vector embeddings and thesaurus constraints.
//!
//! Similarity comes from a heat kernel on embedding distances, thresholded
//! into a sparse nonnegative graph. Synonym and antonym pairs from a
//! thesaurus are overlaid as sign constraints: synonyms reinforce the
//! (unthresholded) kernel weight positively, antonyms inject negative
//! weight, with separate strengths for the general thesaurus term and the
//! antonym-only term.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};
use crate::sgraph::SignedGraph;

/// Words with their embedding vectors, row-aligned.
#[derive(Debug, Clone)]
pub struct EmbeddingTable<S: Scalar = f64> {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Array2<S>,
}

impl<S: Scalar> EmbeddingTable<S> {
    /// Builds a table; words must be unique and match the vector row count.
    pub fn new(words: Vec<String>, vectors: Array2<S>) -> Result<Self> {
        if words.len() != vectors.nrows() {
            return Err(Error::DimensionMismatch {
                expected: words.len(),
                found: vectors.nrows(),
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(w.clone()));
            }
        }
        Ok(EmbeddingTable {
            words,
            index,
            vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.words.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vector(&self, i: usize) -> ArrayView1<'_, S> {
        self.vectors.row(i)
    }

    pub fn position(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Squared euclidean distance between two rows.
    pub fn dist2(&self, i: usize, j: usize) -> S {
        let a = self.vectors.row(i);
        let b = self.vectors.row(j);
        a.iter()
            .zip(b.iter())
            .map(|(&x, &y)| {
                let d = x - y;
                d * d
            })
            .sum()
    }

    /// Heat kernel value `exp(-dist2 / sigma)` between two rows.
    pub fn kernel(&self, i: usize, j: usize, sigma: S) -> S {
        (-self.dist2(i, j) / sigma).exp()
    }
}

/// Reads embeddings as `word x1 x2 ... xd` lines, whitespace separated.
/// When `keep` is given, only listed words are retained (file order kept).
pub fn load_embeddings<S: Scalar>(
    path: impl AsRef<Path>,
    keep: Option<&HashSet<String>>,
) -> Result<EmbeddingTable<S>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    load_embeddings_from(BufReader::new(file), &path.display().to_string(), keep)
}

/// Reader-based variant of [`load_embeddings`].
pub fn load_embeddings_from<S: Scalar>(
    r: impl BufRead,
    origin: &str,
    keep: Option<&HashSet<String>>,
) -> Result<EmbeddingTable<S>> {
    let mut words: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<S>> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut seen_content = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        // An optional leading header of two bare integers ("count dim", the
        // usual plain-text embedding convention) pins the dimension.
        if !seen_content {
            seen_content = true;
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() == 2 {
                if let (Ok(_), Ok(d)) = (toks[0].parse::<usize>(), toks[1].parse::<usize>()) {
                    dim = Some(d);
                    continue;
                }
            }
        }
        let mut parts = t.split_whitespace();
        let word = parts.next().unwrap().to_string();
        let coords: Vec<S> = parts
            .map(|s| {
                let v: f64 = s.parse().map_err(|e| Error::Parse {
                    path: origin.to_string(),
                    line: lineno + 1,
                    msg: format!("bad coordinate {s:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        path: origin.to_string(),
                        line: lineno + 1,
                        msg: format!("non-finite coordinate {v}"),
                    });
                }
                Ok(sc::<S>(v))
            })
            .collect::<Result<_>>()?;
        if coords.is_empty() {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: "expected a word followed by coordinates".to_string(),
            });
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: lineno + 1,
                    msg: format!("dimension {} does not match previous {d}", coords.len()),
                });
            }
            Some(_) => {}
        }
        if let Some(set) = keep {
            if !set.contains(&word) {
                continue;
            }
        }
        words.push(word);
        rows.push(coords);
    }
    let d = dim.unwrap_or(0);
    if words.is_empty() {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 0,
            msg: "no embeddings retained".to_string(),
        });
    }
    let mut vectors = Array2::zeros((words.len(), d));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            vectors[[i, j]] = v;
        }
    }
    EmbeddingTable::new(words, vectors)
}

/// Synonym and antonym word pairs. Pairs are unordered and stored
/// normalized; a pair may not appear on both lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Thesaurus {
    synonyms: BTreeSet<(String, String)>,
    antonyms: BTreeSet<(String, String)>,
}

fn norm_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Thesaurus {
    pub fn new() -> Self {
        Thesaurus::default()
    }

    pub fn add_synonym(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::BadParameter {
                name: "synonym pair",
                reason: format!("word {a:?} paired with itself"),
            });
        }
        let key = norm_pair(a, b);
        if self.antonyms.contains(&key) {
            return Err(Error::ConflictingPair(key.0, key.1));
        }
        self.synonyms.insert(key);
        Ok(())
    }

    pub fn add_antonym(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::BadParameter {
                name: "antonym pair",
                reason: format!("word {a:?} paired with itself"),
            });
        }
        let key = norm_pair(a, b);
        if self.synonyms.contains(&key) {
            return Err(Error::ConflictingPair(key.0, key.1));
        }
        self.antonyms.insert(key);
        Ok(())
    }

    pub fn synonyms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.synonyms.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn antonyms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.antonyms.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn synonym_count(&self) -> usize {
        self.synonyms.len()
    }

    pub fn antonym_count(&self) -> usize {
        self.antonyms.len()
    }
}

/// Reads a thesaurus as `word1<TAB>word2<TAB>{syn|ant}` lines.
pub fn read_thesaurus(path: impl AsRef<Path>) -> Result<Thesaurus> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_thesaurus_from(BufReader::new(file), &path.display().to_string())
}

/// Reader-based variant of [`read_thesaurus`].
pub fn read_thesaurus_from(r: impl BufRead, origin: &str) -> Result<Thesaurus> {
    let mut thes = Thesaurus::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: lineno + 1,
                msg: format!("expected `word1<TAB>word2<TAB>syn|ant`, got {t:?}"),
            });
        }
        match fields[2].trim() {
            "syn" => thes.add_synonym(fields[0].trim(), fields[1].trim())?,
            "ant" => thes.add_antonym(fields[0].trim(), fields[1].trim())?,
            other => {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: lineno + 1,
                    msg: format!("unknown relation {other:?} (expected syn or ant)"),
                })
            }
        }
    }
    Ok(thes)
}

/// Sparse symmetric sign pattern with entries in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<(usize, usize, i8)>,
}

impl SignMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries as `(i, j, sign)` with `i < j`, ascending.
    pub fn entries(&self) -> &[(usize, usize, i8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Vocabulary-aligned sign patterns built from a thesaurus, plus counts of
/// pairs dropped for missing words.
#[derive(Debug, Clone)]
pub struct ThesaurusMatrices {
    /// Synonyms `+1` and antonyms `-1` together.
    pub t: SignMatrix,
    /// Antonym entries only (all `-1`).
    pub t_ant: SignMatrix,
    pub dropped_synonyms: usize,
    pub dropped_antonyms: usize,
}

/// Projects a thesaurus onto a vocabulary. Pairs with either word missing
/// are dropped and counted.
pub fn thesaurus_matrices(thes: &Thesaurus, words: &[String]) -> Result<ThesaurusMatrices> {
    let mut pos: HashMap<&str, usize> = HashMap::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        if pos.insert(w.as_str(), i).is_some() {
            return Err(Error::DuplicateLabel(w.clone()));
        }
    }
    let n = words.len();
    let mut t: BTreeMap<(usize, usize), i8> = BTreeMap::new();
    let mut t_ant: BTreeMap<(usize, usize), i8> = BTreeMap::new();
    let mut dropped_synonyms = 0usize;
    let mut dropped_antonyms = 0usize;
    for (a, b) in thes.synonyms() {
        match (pos.get(a), pos.get(b)) {
            (Some(&i), Some(&j)) => {
                t.insert((i.min(j), i.max(j)), 1);
            }
            _ => dropped_synonyms += 1,
        }
    }
    for (a, b) in thes.antonyms() {
        match (pos.get(a), pos.get(b)) {
            (Some(&i), Some(&j)) => {
                let key = (i.min(j), i.max(j));
                t.insert(key, -1);
                t_ant.insert(key, -1);
            }
            _ => dropped_antonyms += 1,
        }
    }
    let pack = |m: BTreeMap<(usize, usize), i8>| SignMatrix {
        n,
        entries: m.into_iter().map(|((i, j), s)| (i, j, s)).collect(),
    };
    Ok(ThesaurusMatrices {
        t: pack(t),
        t_ant: pack(t_ant),
        dropped_synonyms,
        dropped_antonyms,
    })
}

/// Weights for kernel and thesaurus terms when assembling a signed graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<S: Scalar = f64> {
    /// Heat kernel bandwidth; similarity is `exp(-dist2 / sigma)`.
    pub sigma: S,
    /// Kernel values below this are dropped from the similarity graph.
    pub thresh: S,
    /// Weight on the thresholded similarity graph.
    pub gamma: S,
    /// Weight on the signed thesaurus overlay (synonyms and antonyms).
    pub beta: S,
    /// Extra weight on the antonym-only overlay.
    pub beta_ant: S,
}

impl<S: Scalar> Default for KernelParams<S> {
    fn default() -> Self {
        KernelParams {
            sigma: sc(0.2),
            thresh: sc(0.04),
            gamma: S::one(),
            beta: S::one(),
            beta_ant: S::one(),
        }
    }
}

impl<S: Scalar> KernelParams<S> {
    /// Checks ranges before any data is touched: positive bandwidth,
    /// nonnegative threshold and weights, and at least one active term.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > S::zero()) || !self.sigma.is_finite() {
            return Err(Error::BadParameter {
                name: "sigma",
                reason: format!("must be positive and finite, got {}", self.sigma),
            });
        }
        if self.thresh < S::zero() || !self.thresh.is_finite() {
            return Err(Error::BadParameter {
                name: "thresh",
                reason: format!("must be nonnegative and finite, got {}", self.thresh),
            });
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("beta_ant", self.beta_ant),
        ] {
            if v < S::zero() || !v.is_finite() {
                return Err(Error::BadParameter {
                    name,
                    reason: format!("must be nonnegative and finite, got {v}"),
                });
            }
        }
        if self.gamma == S::zero() && self.beta == S::zero() && self.beta_ant == S::zero() {
            return Err(Error::BadParameter {
                name: "gamma",
                reason: "all of gamma, beta, beta_ant are zero".to_string(),
            });
        }
        Ok(())
    }
}

/// Thresholded heat kernel similarity graph over the embedding vocabulary.
/// Nonnegative weights; pairs with kernel below `thresh` are absent.
pub fn heat_kernel_matrix<S: Scalar>(
    emb: &EmbeddingTable<S>,
    sigma: S,
    thresh: S,
) -> Result<SignedGraph<S>> {
    if !(sigma > S::zero()) || !sigma.is_finite() {
        return Err(Error::BadParameter {
            name: "sigma",
            reason: format!("must be positive and finite, got {sigma}"),
        });
    }
    if thresh < S::zero() || !thresh.is_finite() {
        return Err(Error::BadParameter {
            name: "thresh",
            reason: format!("must be nonnegative and finite, got {thresh}"),
        });
    }
    let n = emb.n();
    let rows: Vec<Vec<(usize, usize, S)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in (i + 1)..n {
                let w = emb.kernel(i, j, sigma);
                if w >= thresh {
                    out.push((i, j, w));
                }
            }
            out
        })
        .collect();
    let edges: Vec<(usize, usize, S)> = rows.into_iter().flatten().collect();
    SignedGraph::from_edges(n, &edges, Some(emb.words().to_vec()))
}

/// Combines the similarity graph with thesaurus sign constraints:
/// `gamma * W  +  beta * T (.) K  +  beta_ant * T_ant (.) K`,
/// where `K` is the unthresholded kernel evaluated on exactly the
/// thesaurus-linked pairs. The embedding table supplies those kernel
/// values, which the thresholded graph cannot reproduce.
pub fn combine<S: Scalar>(
    wk: &SignedGraph<S>,
    tm: &ThesaurusMatrices,
    emb: &EmbeddingTable<S>,
    params: &KernelParams<S>,
) -> Result<SignedGraph<S>> {
    params.validate()?;
    let n = wk.n();
    for found in [tm.t.n(), tm.t_ant.n(), emb.n()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
    if params.gamma > S::zero() {
        for (i, j, w) in wk.edges() {
            acc.insert((i, j), params.gamma * w);
        }
    }
    let mut overlay = |entries: &[(usize, usize, i8)], weight: S| {
        if weight == S::zero() {
            return;
        }
        for &(i, j, s) in entries {
            let sign = if s >= 0 { S::one() } else { -S::one() };
            let kij = emb.kernel(i, j, params.sigma);
            *acc.entry((i, j)).or_insert(S::zero()) += weight * sign * kij;
        }
    };
    overlay(tm.t.entries(), params.beta);
    overlay(tm.t_ant.entries(), params.beta_ant);
    let edges: Vec<(usize, usize, S)> = acc.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    SignedGraph::from_edges(n, &edges, Some(emb.words().to_vec()))
}

/// Summary of a graph assembly run, suitable for direct serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildReport {
    pub vocab_size: usize,
    pub dim: usize,
    pub kernel_edges: usize,
    pub synonyms_used: usize,
    pub antonyms_used: usize,
    pub dropped_synonyms: usize,
    pub dropped_antonyms: usize,
    pub edges: usize,
    pub negative_edges: usize,
}

/// Full assembly pipeline: kernel graph, thesaurus overlay, combination.
pub fn build_graph<S: Scalar>(
    emb: &EmbeddingTable<S>,
    thes: Option<&Thesaurus>,
    params: &KernelParams<S>,
) -> Result<(SignedGraph<S>, BuildReport)> {
    params.validate()?;
    let wk = heat_kernel_matrix(emb, params.sigma, params.thresh)?;
    let empty;
    let thes = match thes {
        Some(t) => t,
        None => {
            empty = Thesaurus::new();
            &empty
        }
    };
    let tm = thesaurus_matrices(thes, emb.words())?;
    let combined = combine(&wk, &tm, emb, params)?;
    let report = BuildReport {
        vocab_size: emb.n(),
        dim: emb.dim(),
        kernel_edges: wk.edge_count(),
        synonyms_used: tm.t.len() - tm.t_ant.len(),
        antonyms_used: tm.t_ant.len(),
        dropped_synonyms: tm.dropped_synonyms,
        dropped_antonyms: tm.dropped_antonyms,
        edges: combined.edge_count(),
        negative_edges: combined.negative_edge_count(),
    };
    Ok((combined, report))
}
