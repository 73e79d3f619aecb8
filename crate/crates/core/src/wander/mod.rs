//! The mind-wandering loop.
//!
//! Each step expands the current focus symbols into a context, selects
//! background knowledge associatively, reasons over it together with seed
//! facts asserting the focus symbols, extracts the fresh predicate symbols
//! of the resulting (partial) interpretation, clusters them, and picks one
//! cluster as the next focus. Symbols already used as context never come
//! back, which keeps the chain from getting stuck.

mod cluster;

pub use cluster::{cluster_symbols, Cluster, ClusterSet};

use std::collections::BTreeSet;

use indexmap::IndexSet;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{mean_vector, vec_cosine, EmbeddingStore};
use crate::kb::{Atom, Clause, ClauseId, KnowledgeBase, Provenance, Term};
use crate::reasoner::{model_symbols, reason, Limits, ReasonerError, ReasonerStatus};
use crate::select::{associative_select, expand_context, Context, ContextOrigin, SelectionConfig};

#[derive(Debug, Error)]
pub enum WanderError {
    #[error("unwanderable start: none of the start symbols is in the embedding vocabulary or the knowledge base")]
    UnwanderableStart,
    #[error("undefined distance: no in-vocabulary words on one side")]
    UndefinedDistance,
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

/// Which cluster of the similarity-sorted sequence becomes the next focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterPick {
    Nearest,
    /// Index `floor((n - 1) / 2)` of the sorted sequence; lets the chain
    /// move away from the current context without jumping to the fringe.
    Middle,
    Farthest,
    Index(usize),
}

impl std::str::FromStr for ClusterPick {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(ClusterPick::Nearest),
            "middle" => Ok(ClusterPick::Middle),
            "farthest" => Ok(ClusterPick::Farthest),
            other => other
                .parse::<usize>()
                .map(ClusterPick::Index)
                .map_err(|_| format!("unknown cluster pick '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WanderConfig {
    /// Maximum number of wandering steps after the start.
    pub steps: usize,
    /// Cluster count is the symbol count divided by this (round half up).
    pub cluster_divisor: usize,
    pub cluster_pick: ClusterPick,
    pub selection: SelectionConfig,
    pub limits: Limits,
    pub rng_seed: u64,
}

impl Default for WanderConfig {
    fn default() -> Self {
        WanderConfig {
            steps: 10,
            cluster_divisor: 4,
            cluster_pick: ClusterPick::Middle,
            selection: SelectionConfig::default(),
            limits: Limits::default(),
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    MaxSteps,
    NoNewSymbols,
    EmptyModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    #[serde(rename = "focus")]
    pub focus_symbols: Vec<String>,
    /// Atom count of the interpretation this focus was extracted from
    /// (0 for the start step).
    pub model_size: usize,
    /// Number of clusters formed in this step (0 for the start step).
    pub cluster_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub steps: Vec<ChainStep>,
    pub terminated_reason: TerminationReason,
}

impl Chain {
    /// All focus symbols of the chain, first occurrence order.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for step in &self.steps {
            for s in &step.focus_symbols {
                if !out.contains(&s.as_str()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// Sort cluster indices by cosine between cluster centroid and the mean of
/// the context's seed vectors, descending; ties keep the lower index first.
/// Falls back to natural order when no seed has a vector.
pub fn order_clusters(
    store: &EmbeddingStore,
    clusters: &ClusterSet,
    context: &Context,
) -> Vec<usize> {
    let seeds_in_vocab: Vec<String> = context
        .seed_symbols
        .iter()
        .filter(|s| store.contains(s))
        .cloned()
        .collect();
    let mut indices: Vec<usize> = (0..clusters.len()).collect();
    let Ok(context_mean) = ({
        if seeds_in_vocab.is_empty() {
            return indices;
        }
        mean_vector(store, &seeds_in_vocab)
    }) else {
        return indices;
    };
    let sims: Vec<f64> = clusters
        .clusters
        .iter()
        .map(|c| vec_cosine(&c.centroid, &context_mean).unwrap_or(-1.0))
        .collect();
    indices.sort_by(|&a, &b| sims[b].total_cmp(&sims[a]).then_with(|| a.cmp(&b)));
    indices
}

/// Pick the focus cluster out of the similarity-sorted sequence.
pub fn choose_focus(
    store: &EmbeddingStore,
    clusters: &ClusterSet,
    context: &Context,
    pick: ClusterPick,
) -> Vec<String> {
    assert!(
        !clusters.is_empty(),
        "choose_focus needs at least one cluster"
    );
    let ordering = order_clusters(store, clusters, context);
    let n = ordering.len();
    let position = match pick {
        ClusterPick::Nearest => 0,
        ClusterPick::Middle => (n - 1) / 2,
        ClusterPick::Farthest => n - 1,
        ClusterPick::Index(i) => i.min(n - 1),
    };
    clusters.clusters[ordering[position]].members.clone()
}

fn round_half_up_div(n: usize, d: usize) -> usize {
    (2 * n + d) / (2 * d)
}

/// Run the mind-wandering loop from a set of start symbols.
pub fn wander(
    start_symbols: &IndexSet<String>,
    kb: &KnowledgeBase,
    store: &EmbeddingStore,
    cfg: &WanderConfig,
) -> Result<Chain, WanderError> {
    assert!(
        !start_symbols.is_empty(),
        "wander needs at least one start symbol"
    );
    let start_known = start_symbols
        .iter()
        .any(|s| store.contains(s) || kb.clauses_with_symbol(s).is_some());
    if !start_known {
        return Err(WanderError::UnwanderableStart);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut chain = Chain {
        steps: vec![ChainStep {
            focus_symbols: start_symbols.iter().cloned().collect(),
            model_size: 0,
            cluster_count: 0,
        }],
        terminated_reason: TerminationReason::MaxSteps,
    };
    let mut seeds: IndexSet<String> = start_symbols.clone();
    // Seed symbols of every context so far; later foci must avoid them.
    let mut visited: BTreeSet<String> = BTreeSet::new();

    for step in 1..=cfg.steps {
        let origin = if step == 1 {
            ContextOrigin::Formula
        } else {
            ContextOrigin::Cluster
        };
        let context = expand_context(store, &seeds, &cfg.selection, origin);
        visited.extend(seeds.iter().cloned());

        let selected = associative_select(kb, store, &context, &cfg.selection);
        let mut clauses: Vec<Clause> = selected
            .iter()
            .filter_map(|&id| kb.clause(id).cloned())
            .collect();
        for (j, seed) in seeds.iter().enumerate() {
            let mut fact = Clause::new(
                vec![],
                vec![vec![Atom::new(
                    seed.clone(),
                    vec![Term::Constant(format!("c_{seed}"))],
                )]],
                Provenance::Generated,
            );
            fact.id = ClauseId((kb.len() + j) as u32);
            clauses.push(fact);
        }

        let result = reason(&clauses, &cfg.limits)?;
        if result.status == ReasonerStatus::Refutation {
            chain.terminated_reason = TerminationReason::EmptyModel;
            break;
        }
        let symbols = model_symbols(&result)?;
        let derived: Vec<String> = symbols.into_iter().filter(|s| !seeds.contains(s)).collect();
        if derived.is_empty() {
            chain.terminated_reason = TerminationReason::EmptyModel;
            break;
        }

        let mut oov_dropped = 0usize;
        let candidates: Vec<String> = derived
            .into_iter()
            .filter(|s| !context.contains(s) && !visited.contains(s))
            .filter(|s| {
                if store.contains(s) {
                    true
                } else {
                    oov_dropped += 1;
                    false
                }
            })
            .collect();
        if oov_dropped > 0 {
            log::debug!("wander step {step}: dropped {oov_dropped} symbols without vectors");
        }
        if candidates.is_empty() {
            chain.terminated_reason = TerminationReason::NoNewSymbols;
            break;
        }

        let k = round_half_up_div(candidates.len(), cfg.cluster_divisor).max(1);
        let clusters = cluster_symbols(store, &candidates, k, rng.next_u64());
        let focus = choose_focus(store, &clusters, &context, cfg.cluster_pick);
        chain.steps.push(ChainStep {
            focus_symbols: focus.clone(),
            model_size: result.model.len(),
            cluster_count: clusters.len(),
        });
        seeds = focus.into_iter().collect();
    }
    Ok(chain)
}

/// `1 - cosine` between the mean vector of the chain's in-vocabulary focus
/// symbols and the mean vector of the sentence's in-vocabulary words.
/// Lower is closer.
pub fn chain_sentence_distance(
    store: &EmbeddingStore,
    chain: &Chain,
    sentence_words: &IndexSet<String>,
) -> Result<f64, WanderError> {
    let chain_words: Vec<String> = chain
        .symbols()
        .into_iter()
        .filter(|s| store.contains(s))
        .map(str::to_string)
        .collect();
    let sentence: Vec<String> = sentence_words
        .iter()
        .filter(|w| store.contains(w))
        .cloned()
        .collect();
    if chain_words.is_empty() || sentence.is_empty() {
        return Err(WanderError::UndefinedDistance);
    }
    let chain_mean =
        mean_vector(store, &chain_words).map_err(|_| WanderError::UndefinedDistance)?;
    let sentence_mean =
        mean_vector(store, &sentence).map_err(|_| WanderError::UndefinedDistance)?;
    match vec_cosine(&chain_mean, &sentence_mean) {
        Some(sim) => Ok(1.0 - sim),
        None => Err(WanderError::UndefinedDistance),
    }
}

/// Candidate whose chains are on average closest (minimum mean distance) to
/// the sentence. Chains with undefined distance are skipped; a candidate
/// with every chain skipped compares as infinitely far. Ties keep the first
/// candidate in input order.
pub fn choose_answer(
    store: &EmbeddingStore,
    chains_per_candidate: &[(String, Vec<Chain>)],
    sentence_words: &IndexSet<String>,
) -> String {
    assert!(
        chains_per_candidate
            .iter()
            .all(|(_, chains)| !chains.is_empty()),
        "every candidate needs at least one chain"
    );
    let mut best: Option<(usize, f64)> = None;
    for (i, (_, chains)) in chains_per_candidate.iter().enumerate() {
        let distances: Vec<f64> = chains
            .iter()
            .filter_map(|c| chain_sentence_distance(store, c, sentence_words).ok())
            .collect();
        let mean = if distances.is_empty() {
            f64::INFINITY
        } else {
            distances.iter().sum::<f64>() / distances.len() as f64
        };
        match best {
            Some((_, best_mean)) if mean >= best_mean => {}
            _ => best = Some((i, mean)),
        }
    }
    chains_per_candidate[best.expect("at least one candidate").0]
        .0
        .clone()
}
