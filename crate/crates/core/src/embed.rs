//! Word-embedding store: text-format loading, cosine similarity, brute-force
//! nearest neighbours, and the mean/variance statistics used by selection,
//! clustering, and remote-association scoring.
//!
//! All arithmetic is f64 and every query is a deterministic function of the
//! loaded store: neighbour rankings sort by similarity descending with
//! lexicographic tie-breaks, and mean/variance canonicalize their word lists
//! so results do not depend on argument order.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("unreadable embedding input: {0}")]
    Io(#[from] std::io::Error),
    #[error("embedding line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("embedding line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("embedding has no usable entries")]
    Empty,
    #[error("out of vocabulary: {}", words.join(", "))]
    OutOfVocabulary { words: Vec<String> },
    #[error("invalid query vector: {0}")]
    InvalidQuery(String),
}

/// Similarity interval `[lo, hi]` with `lo <= hi`, both in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimilarityInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SimilarityInterval {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if (-1.0..=1.0).contains(&lo) && (-1.0..=1.0).contains(&hi) && lo <= hi {
            Some(SimilarityInterval { lo, hi })
        } else {
            None
        }
    }

    pub fn full() -> Self {
        SimilarityInterval { lo: -1.0, hi: 1.0 }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Counts reported by [`load_embedding`].
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct LoadReport {
    pub entries: usize,
    pub duplicates: usize,
    pub zero_norm_dropped: usize,
}

/// Immutable word → vector map with cached norms.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dimension: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    norms: Vec<f64>,
}

impl EmbeddingStore {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Words in load order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Build a store from in-memory pairs; test and fixture helper. Applies
    /// the same rules as the loader: duplicate words keep their first
    /// occurrence, zero-norm vectors are dropped.
    pub fn from_pairs(
        dimension: usize,
        pairs: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self, EmbedError> {
        let mut store = EmbeddingStore {
            dimension,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            norms: Vec::new(),
        };
        for (word, vec) in pairs {
            if vec.len() != dimension {
                return Err(EmbedError::DimensionMismatch {
                    line: store.words.len() + 1,
                    expected: dimension,
                    found: vec.len(),
                });
            }
            store.push(word, &vec);
        }
        if store.is_empty() {
            return Err(EmbedError::Empty);
        }
        Ok(store)
    }

    /// Appends unless duplicate or zero-norm; returns what happened.
    fn push(&mut self, word: String, vec: &[f64]) -> PushOutcome {
        if self.index.contains_key(&word) {
            return PushOutcome::Duplicate;
        }
        let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return PushOutcome::ZeroNorm;
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vec);
        self.norms.push(norm);
        PushOutcome::Stored
    }
}

enum PushOutcome {
    Stored,
    Duplicate,
    ZeroNorm,
}

/// Load the common text format: one entry per line, token followed by the
/// vector components. A two-token first line of integers is read as a
/// `count dim` header and skipped. Duplicate words keep their first
/// occurrence; zero-norm vectors are dropped. Both are counted in the
/// returned report.
pub fn load_embedding<R: BufRead>(
    input: R,
    expected_dimension: Option<usize>,
) -> Result<(EmbeddingStore, LoadReport), EmbedError> {
    let mut report = LoadReport::default();
    let mut store: Option<EmbeddingStore> = None;
    let mut vec_buf: Vec<f64> = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(token) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();

        if line_no == 1
            && rest.len() == 1
            && token.parse::<u64>().is_ok()
            && rest[0].parse::<u64>().is_ok()
        {
            continue; // "count dim" header
        }

        vec_buf.clear();
        for t in &rest {
            let v: f64 = t.parse().map_err(|_| EmbedError::Parse {
                line: line_no,
                msg: format!("'{t}' is not a number"),
            })?;
            vec_buf.push(v);
        }
        if vec_buf.is_empty() {
            return Err(EmbedError::Parse {
                line: line_no,
                msg: "no vector components".into(),
            });
        }

        let store = match &mut store {
            Some(s) => {
                if vec_buf.len() != s.dimension {
                    return Err(EmbedError::DimensionMismatch {
                        line: line_no,
                        expected: s.dimension,
                        found: vec_buf.len(),
                    });
                }
                s
            }
            None => {
                let dim = vec_buf.len();
                if let Some(expected) = expected_dimension {
                    if dim != expected {
                        return Err(EmbedError::DimensionMismatch {
                            line: line_no,
                            expected,
                            found: dim,
                        });
                    }
                }
                store = Some(EmbeddingStore {
                    dimension: dim,
                    words: Vec::new(),
                    index: HashMap::new(),
                    data: Vec::new(),
                    norms: Vec::new(),
                });
                store.as_mut().unwrap()
            }
        };

        match store.push(token.to_string(), &vec_buf) {
            PushOutcome::Stored => report.entries += 1,
            PushOutcome::Duplicate => report.duplicates += 1,
            PushOutcome::ZeroNorm => report.zero_norm_dropped += 1,
        }
    }

    let store = store.ok_or(EmbedError::Empty)?;
    if store.is_empty() {
        return Err(EmbedError::Empty);
    }
    if report.duplicates > 0 {
        log::warn!(
            "embedding load: {} duplicate tokens kept first occurrence",
            report.duplicates
        );
    }
    if report.zero_norm_dropped > 0 {
        log::warn!(
            "embedding load: {} zero-norm vectors dropped",
            report.zero_norm_dropped
        );
    }
    Ok((store, report))
}

fn missing_words<'a>(store: &EmbeddingStore, words: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut missing = Vec::new();
    for w in words {
        if !store.contains(w) && !missing.iter().any(|m| m == w) {
            missing.push(w.to_string());
        }
    }
    missing
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine of two raw vectors, clamped into `[-1, 1]`. `None` if either has
/// zero norm.
pub fn vec_cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine similarity of two stored words. Operands are ordered by word
/// before evaluation so `cosine(a, b)` and `cosine(b, a)` run the identical
/// float expression.
pub fn cosine(store: &EmbeddingStore, w1: &str, w2: &str) -> Result<f64, EmbedError> {
    let missing = missing_words(store, [w1, w2].into_iter());
    if !missing.is_empty() {
        return Err(EmbedError::OutOfVocabulary { words: missing });
    }
    if w1 == w2 {
        return Ok(1.0);
    }
    let (a, b) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
    let ia = store.index[a];
    let ib = store.index[b];
    let sim = dot(store.row(ia), store.row(ib)) / (store.norms[ia] * store.norms[ib]);
    Ok(sim.clamp(-1.0, 1.0))
}

fn sort_ranked(entries: &mut [(String, f64)]) {
    entries.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Top-`k` words by cosine to `query`, similarity descending with
/// lexicographic tie-breaks. `k` larger than the vocabulary returns the full
/// ranking. Excluded words never appear.
pub fn nearest(
    store: &EmbeddingStore,
    query: &[f64],
    k: usize,
    exclude: &std::collections::BTreeSet<String>,
) -> Result<Vec<(String, f64)>, EmbedError> {
    if query.len() != store.dimension {
        return Err(EmbedError::InvalidQuery(format!(
            "query has {} components, store dimension is {}",
            query.len(),
            store.dimension
        )));
    }
    let qnorm = dot(query, query).sqrt();
    if qnorm == 0.0 {
        return Err(EmbedError::InvalidQuery(
            "query vector has zero norm".into(),
        ));
    }
    let mut entries: Vec<(String, f64)> = Vec::with_capacity(store.len());
    for (i, word) in store.words.iter().enumerate() {
        if exclude.contains(word) {
            continue;
        }
        let sim = (dot(query, store.row(i)) / (qnorm * store.norms[i])).clamp(-1.0, 1.0);
        entries.push((word.clone(), sim));
    }
    sort_ranked(&mut entries);
    entries.truncate(k);
    Ok(entries)
}

/// Neighbours of `w` with similarity at least `threshold`, capped at `k`,
/// never including `w` itself. Out-of-vocabulary input degrades to an empty
/// list so selection can fall back to syntactic matching.
pub fn similar_words(
    store: &EmbeddingStore,
    w: &str,
    threshold: f64,
    k: usize,
) -> Vec<(String, f64)> {
    let Some(i) = store.index.get(w).copied() else {
        return Vec::new();
    };
    let query = store.row(i);
    let qnorm = store.norms[i];
    let mut entries: Vec<(String, f64)> = Vec::new();
    for (j, word) in store.words.iter().enumerate() {
        if j == i {
            continue;
        }
        let sim = (dot(query, store.row(j)) / (qnorm * store.norms[j])).clamp(-1.0, 1.0);
        if sim >= threshold {
            entries.push((word.clone(), sim));
        }
    }
    sort_ranked(&mut entries);
    entries.truncate(k);
    entries
}

/// Componentwise mean of the words' vectors. The word list is sorted and
/// deduplicated first, so the result is independent of argument order and
/// the mean of n copies of a word is exactly that word's vector.
pub fn mean_vector(store: &EmbeddingStore, words: &[String]) -> Result<Vec<f64>, EmbedError> {
    assert!(!words.is_empty(), "mean_vector needs a non-empty word list");
    let missing = missing_words(store, words.iter().map(String::as_str));
    if !missing.is_empty() {
        return Err(EmbedError::OutOfVocabulary { words: missing });
    }
    let mut canonical: Vec<&str> = words.iter().map(String::as_str).collect();
    canonical.sort_unstable();
    canonical.dedup();
    let mut mean = vec![0.0; store.dimension];
    for w in &canonical {
        for (m, x) in mean.iter_mut().zip(store.vector(w).unwrap()) {
            *m += x;
        }
    }
    let n = canonical.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    Ok(mean)
}

/// Population variance of the candidate's cosine similarities to the anchor
/// words. Anchors are sorted (multiplicity kept) so the result is
/// independent of their order.
pub fn similarity_variance(
    store: &EmbeddingStore,
    candidate: &str,
    anchors: &[String],
) -> Result<f64, EmbedError> {
    assert!(
        !anchors.is_empty(),
        "similarity_variance needs at least one anchor"
    );
    let missing = missing_words(
        store,
        std::iter::once(candidate).chain(anchors.iter().map(String::as_str)),
    );
    if !missing.is_empty() {
        return Err(EmbedError::OutOfVocabulary { words: missing });
    }
    let mut sorted: Vec<&str> = anchors.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    let sims: Vec<f64> = sorted
        .iter()
        .map(|a| cosine(store, candidate, a))
        .collect::<Result<_, _>>()?;
    let n = sims.len() as f64;
    let mean = sims.iter().sum::<f64>() / n;
    Ok(sims.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n)
}
