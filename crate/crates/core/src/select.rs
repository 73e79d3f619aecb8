//! Context-driven axiom selection.
//!
//! Two stages: trigger-based syntactic selection keyed on shared predicate
//! symbols and their knowledge-base frequency (so symbols as frequent as
//! `isa` never pull in the whole base), and an associative filter that
//! removes clauses whose foreign symbols fall outside a cosine-similarity
//! interval around the context.

use std::collections::BTreeSet;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::embed::{cosine, similar_words, EmbeddingStore, SimilarityInterval};
use crate::kb::{ClauseId, KnowledgeBase};

/// Where a context's seed symbols came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextOrigin {
    Formula,
    Cluster,
}

/// The current set of symbols driving selection: seeds plus their embedding
/// neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub seed_symbols: IndexSet<String>,
    pub expanded_symbols: IndexSet<String>,
    pub origin: ContextOrigin,
}

impl Context {
    /// A context without any embedding expansion (expanded = seeds).
    pub fn bare<I: IntoIterator<Item = String>>(seeds: I, origin: ContextOrigin) -> Self {
        let seed_symbols: IndexSet<String> = seeds.into_iter().collect();
        let expanded_symbols = seed_symbols.clone();
        Context {
            seed_symbols,
            expanded_symbols,
            origin,
        }
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.expanded_symbols.contains(symbol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Admissible cosine range for foreign symbols of a selected clause.
    pub similarity_interval: SimilarityInterval,
    /// Minimum similarity for a word to join the expanded context.
    pub neighbor_threshold: f64,
    /// Cap on neighbours per seed symbol.
    pub neighbor_cap: usize,
    /// Symbols occurring in more clauses than this never trigger selection.
    pub frequency_cutoff: usize,
    /// Extra trigger rounds beyond the context symbols themselves.
    pub depth: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            similarity_interval: SimilarityInterval::full(),
            neighbor_threshold: 0.55,
            neighbor_cap: 10,
            frequency_cutoff: 1000,
            depth: 1,
        }
    }
}

/// Iterative trigger selection. Level 0 selects every clause containing a
/// context symbol whose occurrence count is within the frequency cutoff;
/// each further level (up to `cfg.depth`) lets the newly introduced
/// low-frequency symbols of already-selected clauses trigger in turn.
pub fn syntactic_select(
    kb: &KnowledgeBase,
    context: &Context,
    cfg: &SelectionConfig,
) -> BTreeSet<ClauseId> {
    let mut selected: BTreeSet<ClauseId> = BTreeSet::new();
    let mut used_triggers: BTreeSet<&str> = BTreeSet::new();
    let mut frontier: Vec<&str> = context
        .expanded_symbols
        .iter()
        .map(String::as_str)
        .collect();

    for _level in 0..=cfg.depth {
        let mut introduced: BTreeSet<&str> = BTreeSet::new();
        for symbol in frontier {
            if !used_triggers.insert(symbol) {
                continue;
            }
            if kb.occurrence_count(symbol) > cfg.frequency_cutoff {
                continue;
            }
            let Some(ids) = kb.clauses_with_symbol(symbol) else {
                continue;
            };
            for &id in ids {
                if selected.insert(id) {
                    if let Some(clause) = kb.clause(id) {
                        introduced.extend(clause.predicate_symbols());
                    }
                }
            }
        }
        if introduced.is_empty() {
            break;
        }
        frontier = introduced
            .into_iter()
            .filter(|s| !used_triggers.contains(s))
            .collect();
    }
    selected
}

/// Expand seed symbols with their embedding neighbours: seeds first, then
/// neighbours by descending similarity (lexicographic ties), where a word
/// reachable from several seeds counts its best similarity. Out-of-vocabulary
/// seeds contribute no neighbours.
pub fn expand_context(
    store: &EmbeddingStore,
    seeds: &IndexSet<String>,
    cfg: &SelectionConfig,
    origin: ContextOrigin,
) -> Context {
    let mut neighbor_sim: Vec<(String, f64)> = Vec::new();
    for seed in seeds {
        for (word, sim) in similar_words(store, seed, cfg.neighbor_threshold, cfg.neighbor_cap) {
            if seeds.contains(&word) {
                continue;
            }
            match neighbor_sim.iter_mut().find(|(w, _)| *w == word) {
                Some((_, best)) => *best = best.max(sim),
                None => neighbor_sim.push((word, sim)),
            }
        }
    }
    neighbor_sim.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut expanded = seeds.clone();
    expanded.extend(neighbor_sim.into_iter().map(|(w, _)| w));
    Context {
        seed_symbols: seeds.clone(),
        expanded_symbols: expanded,
        origin,
    }
}

/// Syntactic selection over the expanded context followed by the similarity
/// filter: a clause is dropped when some predicate symbol outside the
/// context has its best cosine to the context symbols outside the interval.
/// Symbols without a vector never cause removal.
pub fn associative_select(
    kb: &KnowledgeBase,
    store: &EmbeddingStore,
    context: &Context,
    cfg: &SelectionConfig,
) -> BTreeSet<ClauseId> {
    let base = syntactic_select(kb, context, cfg);
    let interval = cfg.similarity_interval;
    base.into_iter()
        .filter(|&id| {
            let Some(clause) = kb.clause(id) else {
                return false;
            };
            clause.predicate_symbols().iter().all(|sym| {
                if context.contains(sym) {
                    return true;
                }
                match best_context_similarity(store, context, sym) {
                    Some(best) => interval.contains(best),
                    None => true, // similarity unknown
                }
            })
        })
        .collect()
}

/// Max cosine between `symbol` and the in-vocabulary context symbols.
fn best_context_similarity(store: &EmbeddingStore, context: &Context, symbol: &str) -> Option<f64> {
    if !store.contains(symbol) {
        return None;
    }
    context
        .expanded_symbols
        .iter()
        .filter_map(|c| cosine(store, symbol, c).ok())
        .max_by(f64::total_cmp)
}
