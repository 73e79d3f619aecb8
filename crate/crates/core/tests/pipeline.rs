//! End-to-end flow at the library level: triples in, selection, reasoning,
//! chain scoring.

use std::collections::BTreeSet;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use indexmap::IndexSet;

use assoc_core::embed::{load_embedding, EmbeddingStore, SimilarityInterval};
use assoc_core::kb::{
    build_kb, parse_clause_file, parse_triples, triple_to_clause, SkolemGen, TripleFormat,
};
use assoc_core::reasoner::{reason, Limits, ReasonerStatus};
use assoc_core::select::{associative_select, expand_context, ContextOrigin, SelectionConfig};
use assoc_core::wander::{wander, ClusterPick, TerminationReason, WanderConfig};

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata")
        .join(name)
}

fn fixture_vectors(name: &str) -> EmbeddingStore {
    let file = std::fs::File::open(testdata(name)).unwrap();
    load_embedding(BufReader::new(file), None).unwrap().0
}

#[test]
fn triples_to_selection_to_model() {
    // ingest two triples, select for the dog/fur context, then reason from
    // a single dog fact
    let load = parse_triples(
        "dog,HasA,fur\npoodle,RelatedTo,dog\n".as_bytes(),
        TripleFormat::Csv,
    )
    .unwrap();
    let mut gen = SkolemGen::new();
    let clauses: Vec<_> = load
        .triples
        .iter()
        .map(|t| triple_to_clause(t, &mut gen))
        .collect();
    let kb = build_kb(clauses).unwrap();

    let store = fixture_vectors("dogfur_vectors.txt");
    let cfg = SelectionConfig {
        similarity_interval: SimilarityInterval::new(0.3, 0.9).unwrap(),
        neighbor_threshold: 0.99,
        ..Default::default()
    };
    let seeds: IndexSet<String> = ["dog", "fur"].iter().map(|s| s.to_string()).collect();
    let context = expand_context(&store, &seeds, &cfg, ContextOrigin::Formula);
    let selected = associative_select(&kb, &store, &context, &cfg);
    assert_eq!(
        selected.len(),
        1,
        "only the fur clause should survive the filter"
    );

    let mut input: Vec<_> = selected
        .iter()
        .map(|&id| kb.clause(id).unwrap().clone())
        .collect();
    input.extend(parse_clause_file("-> dog(a).").unwrap());
    let result = reason(&input, &Limits::default()).unwrap();
    assert_eq!(result.status, ReasonerStatus::Open);
    let atoms: BTreeSet<String> = result.model.iter().map(|a| a.to_string()).collect();
    assert!(atoms.contains("dog(a)"));
    assert!(atoms.contains("hasa(a,sk1(a))"));
    assert!(atoms.contains("fur(sk1(a))"));
}

#[test]
fn wander_fixture_reaches_animal_focus_then_stops() {
    let kb = build_kb(
        parse_clause_file(&std::fs::read_to_string(testdata("wander_kb.clauses")).unwrap())
            .unwrap(),
    )
    .unwrap();
    let store = fixture_vectors("wander_vectors.txt");
    let cfg = WanderConfig {
        steps: 5,
        cluster_divisor: 4,
        cluster_pick: ClusterPick::Middle,
        selection: SelectionConfig {
            similarity_interval: SimilarityInterval::new(0.0, 1.0).unwrap(),
            neighbor_threshold: 0.997,
            neighbor_cap: 5,
            frequency_cutoff: 100,
            depth: 1,
        },
        limits: Limits::default(),
        rng_seed: 42,
    };
    let start: IndexSet<String> = ["dog", "chew", "bone"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let chain = wander(&start, &kb, &store, &cfg).unwrap();

    assert_eq!(chain.steps[0].focus_symbols, vec!["dog", "chew", "bone"]);
    assert_eq!(chain.steps[1].focus_symbols, vec!["animal", "animals"]);
    assert_eq!(chain.steps[1].cluster_count, 3);
    assert_eq!(chain.steps[1].model_size, 13);
    assert_eq!(chain.steps.len(), 2);
    assert_eq!(chain.terminated_reason, TerminationReason::EmptyModel);
}

#[test]
fn cluster_pick_strategies_walk_the_sorted_sequence() {
    // On the engineered fixture the similarity order of the three clusters
    // around {dog, chew, bone} is food > animal > garden.
    let kb = build_kb(
        parse_clause_file(&std::fs::read_to_string(testdata("wander_kb.clauses")).unwrap())
            .unwrap(),
    )
    .unwrap();
    let store = fixture_vectors("wander_vectors.txt");
    let start: IndexSet<String> = ["dog", "chew", "bone"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let focus_for = |pick: ClusterPick| {
        let cfg = WanderConfig {
            steps: 1,
            cluster_divisor: 4,
            cluster_pick: pick,
            selection: SelectionConfig {
                similarity_interval: SimilarityInterval::new(0.0, 1.0).unwrap(),
                neighbor_threshold: 0.997,
                neighbor_cap: 5,
                frequency_cutoff: 100,
                depth: 1,
            },
            limits: Limits::default(),
            rng_seed: 42,
        };
        wander(&start, &kb, &store, &cfg).unwrap().steps[1]
            .focus_symbols
            .clone()
    };
    assert_eq!(
        focus_for(ClusterPick::Nearest),
        vec!["food", "kibble", "meat"]
    );
    assert_eq!(focus_for(ClusterPick::Middle), vec!["animal", "animals"]);
    assert_eq!(
        focus_for(ClusterPick::Farthest),
        vec!["flower", "garden", "grass", "lawn", "tree"]
    );
    assert_eq!(
        focus_for(ClusterPick::Index(0)),
        focus_for(ClusterPick::Nearest)
    );
    assert_eq!(
        focus_for(ClusterPick::Index(99)),
        focus_for(ClusterPick::Farthest)
    );
}

#[test]
fn dogbone_fixture_file_parses_and_reasons() {
    let clauses =
        parse_clause_file(&std::fs::read_to_string(testdata("dogbone.clauses")).unwrap()).unwrap();
    assert_eq!(clauses.len(), 13);
    let result = reason(&clauses, &Limits::default()).unwrap();
    assert_eq!(result.status, ReasonerStatus::Open);
    assert_eq!(result.model.len(), 11);
}
