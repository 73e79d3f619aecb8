//! Remote-association solving.
//!
//! For three query words, candidates are the pool of words nearest to the
//! mean of the query vectors. The mean ranking scores a candidate by its
//! cosine to that mean; the variance-adjusted ranking subtracts the variance
//! of the candidate's similarities to the individual query words, which
//! pushes down words that hug only one of the three.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{mean_vector, nearest, similarity_variance, EmbedError, EmbeddingStore};

pub const DEFAULT_POOL: usize = 200;

#[derive(Debug, Error)]
pub enum CreativityError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("query words must be pairwise distinct: {0:?}")]
    DuplicateQueryWords([String; 3]),
}

/// One remote-association problem: three query words, optionally the
/// expected answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FratProblem {
    pub query_words: [String; 3],
    pub gold_answer: Option<String>,
}

impl FratProblem {
    pub fn new(
        query_words: [String; 3],
        gold_answer: Option<String>,
    ) -> Result<Self, CreativityError> {
        let q = &query_words;
        if q[0] == q[1] || q[0] == q[2] || q[1] == q[2] {
            return Err(CreativityError::DuplicateQueryWords(query_words));
        }
        Ok(FratProblem {
            query_words,
            gold_answer,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingKind {
    Mean,
    VarianceAdjusted,
}

/// Scored candidate list, score descending with lexicographic tie-breaks.
#[derive(Debug, Clone, Serialize)]
pub struct RankedCandidates {
    pub ranking_kind: RankingKind,
    pub entries: Vec<(String, f64)>,
    pub pool_size: usize,
}

impl RankedCandidates {
    /// 1-based rank of a word, if present.
    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|(w, _)| w == word)
            .map(|p| p + 1)
    }

    pub fn words(&self) -> Vec<String> {
        self.entries.iter().map(|(w, _)| w.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RankerOptions {
    /// Drop the query words themselves (and case variants) from the pool.
    /// Off by default: the plain pool regularly surfaces a query word and
    /// that is part of the observable behaviour.
    pub exclude_query_words: bool,
}

fn candidate_pool(
    store: &EmbeddingStore,
    query: &[String; 3],
    pool: usize,
    options: RankerOptions,
) -> Result<Vec<(String, f64)>, CreativityError> {
    let words: Vec<String> = query.to_vec();
    let mean = mean_vector(store, &words)?;
    let exclude: BTreeSet<String> = if options.exclude_query_words {
        store
            .words()
            .filter(|w| query.iter().any(|q| q.eq_ignore_ascii_case(w)))
            .map(str::to_string)
            .collect()
    } else {
        BTreeSet::new()
    };
    Ok(nearest(store, &mean, pool, &exclude)?)
}

/// Rank the pool by cosine to the mean of the query vectors.
pub fn rank_by_mean(
    store: &EmbeddingStore,
    query: &[String; 3],
    pool: usize,
    options: RankerOptions,
) -> Result<RankedCandidates, CreativityError> {
    let entries = candidate_pool(store, query, pool, options)?;
    Ok(RankedCandidates {
        ranking_kind: RankingKind::Mean,
        entries,
        pool_size: pool,
    })
}

/// Re-rank the same pool by `cosine to mean - variance of the similarities
/// to the individual query words`.
pub fn rank_variance_adjusted(
    store: &EmbeddingStore,
    query: &[String; 3],
    pool: usize,
    options: RankerOptions,
) -> Result<RankedCandidates, CreativityError> {
    let anchors: Vec<String> = query.to_vec();
    let mut entries = candidate_pool(store, query, pool, options)?;
    for (word, score) in entries.iter_mut() {
        *score -= similarity_variance(store, word, &anchors)?;
    }
    entries.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(RankedCandidates {
        ranking_kind: RankingKind::VarianceAdjusted,
        entries,
        pool_size: pool,
    })
}

/// Ranked words (no scores) for context-building around three seed words.
pub fn context_words(
    store: &EmbeddingStore,
    seeds: &[String; 3],
    pool: usize,
    kind: RankingKind,
) -> Result<Vec<String>, CreativityError> {
    let ranked = match kind {
        RankingKind::Mean => rank_by_mean(store, seeds, pool, RankerOptions::default())?,
        RankingKind::VarianceAdjusted => {
            rank_variance_adjusted(store, seeds, pool, RankerOptions::default())?
        }
    };
    Ok(ranked.words())
}

/// Hit counts at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitRate {
    pub k: usize,
    pub hits: usize,
    pub total: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KindMetrics {
    pub ranking_kind: RankingKind,
    pub hit_rates: Vec<HitRate>,
}

/// Benchmark summary over a problem list.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkMetrics {
    pub problems: usize,
    pub mean: KindMetrics,
    pub variance_adjusted: KindMetrics,
    /// Problems whose gold rank strictly improved / worsened / stayed put
    /// under the variance-adjusted reordering. Only problems whose gold
    /// answer appears in the pool are compared.
    pub gold_rank_improved: usize,
    pub gold_rank_worsened: usize,
    pub gold_rank_unchanged: usize,
    /// Problems skipped because a query word has no vector, plus problems
    /// whose gold never entered the pool. Both count as misses at every k.
    pub oov_problems: Vec<usize>,
    pub gold_not_in_pool: usize,
}

/// Evaluate both rankings over a problem set. Problems with out-of-vocabulary
/// query words count as misses and are reported by index.
pub fn evaluate_benchmark(
    store: &EmbeddingStore,
    problems: &[FratProblem],
    k_values: &[usize],
    pool: usize,
    options: RankerOptions,
) -> BenchmarkMetrics {
    assert!(
        !problems.is_empty(),
        "evaluate_benchmark needs at least one problem"
    );
    let mut mean_hits = vec![0usize; k_values.len()];
    let mut adj_hits = vec![0usize; k_values.len()];
    let mut improved = 0usize;
    let mut worsened = 0usize;
    let mut unchanged = 0usize;
    let mut oov_problems = Vec::new();
    let mut gold_not_in_pool = 0usize;

    for (idx, problem) in problems.iter().enumerate() {
        let Some(gold) = problem.gold_answer.as_deref() else {
            oov_problems.push(idx);
            continue;
        };
        let ranked_mean = match rank_by_mean(store, &problem.query_words, pool, options) {
            Ok(r) => r,
            Err(_) => {
                oov_problems.push(idx);
                continue;
            }
        };
        let ranked_adj = match rank_variance_adjusted(store, &problem.query_words, pool, options) {
            Ok(r) => r,
            Err(_) => {
                oov_problems.push(idx);
                continue;
            }
        };
        let mean_rank = ranked_mean.rank_of(gold);
        let adj_rank = ranked_adj.rank_of(gold);
        for (i, &k) in k_values.iter().enumerate() {
            if mean_rank.is_some_and(|r| r <= k) {
                mean_hits[i] += 1;
            }
            if adj_rank.is_some_and(|r| r <= k) {
                adj_hits[i] += 1;
            }
        }
        match (mean_rank, adj_rank) {
            (Some(m), Some(a)) if a < m => improved += 1,
            (Some(m), Some(a)) if a > m => worsened += 1,
            (Some(_), Some(_)) => unchanged += 1,
            _ => gold_not_in_pool += 1,
        }
    }

    let total = problems.len();
    let rates = |hits: &[usize]| -> Vec<HitRate> {
        k_values
            .iter()
            .zip(hits)
            .map(|(&k, &h)| HitRate {
                k,
                hits: h,
                total,
                rate: h as f64 / total as f64,
            })
            .collect()
    };
    BenchmarkMetrics {
        problems: total,
        mean: KindMetrics {
            ranking_kind: RankingKind::Mean,
            hit_rates: rates(&mean_hits),
        },
        variance_adjusted: KindMetrics {
            ranking_kind: RankingKind::VarianceAdjusted,
            hit_rates: rates(&adj_hits),
        },
        gold_rank_improved: improved,
        gold_rank_worsened: worsened,
        gold_rank_unchanged: unchanged,
        oov_problems,
        gold_not_in_pool,
    }
}
