//! Implementations of the six subcommands. Every command emits one JSON
//! document with the fully resolved configuration embedded, so a run can be
//! reproduced from its own output. Diagnostics go to stderr only.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use assoc_core::creativity::{
    evaluate_benchmark, rank_by_mean, rank_variance_adjusted, FratProblem, RankedCandidates,
    RankerOptions,
};
use assoc_core::embed::{load_embedding, EmbeddingStore, SimilarityInterval};
use assoc_core::kb::{
    build_kb, parse_clause_file, parse_triples, serialize_clauses, triple_to_clause, Clause,
    KnowledgeBase, SkolemGen, TripleFormat,
};
use assoc_core::reasoner::{reason, Limits};
use assoc_core::select::{
    associative_select, expand_context, syntactic_select, Context, ContextOrigin, SelectionConfig,
};
use assoc_core::wander::{wander, Chain, ClusterPick, WanderConfig};

use crate::args::{
    BenchArgs, FratArgs, IngestArgs, LimitFlags, ReasonArgs, SelectArgs, SelectionFlags, WanderArgs,
};
use crate::config::ConfigFile;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct ResolvedSelection {
    pub sim_lo: f64,
    pub sim_hi: f64,
    pub neighbor_threshold: f64,
    pub neighbor_cap: usize,
    pub frequency_cutoff: usize,
    pub depth: usize,
}

impl ResolvedSelection {
    fn resolve(flags: &SelectionFlags, cfg: &ConfigFile) -> Result<Self, CliError> {
        let defaults = SelectionConfig::default();
        Ok(ResolvedSelection {
            sim_lo: cfg.resolve(flags.sim_lo, "sim-lo", defaults.similarity_interval.lo)?,
            sim_hi: cfg.resolve(flags.sim_hi, "sim-hi", defaults.similarity_interval.hi)?,
            neighbor_threshold: cfg.resolve(
                flags.neighbor_threshold,
                "neighbor-threshold",
                defaults.neighbor_threshold,
            )?,
            neighbor_cap: cfg.resolve(flags.neighbor_cap, "neighbor-cap", defaults.neighbor_cap)?,
            frequency_cutoff: cfg.resolve(
                flags.frequency_cutoff,
                "frequency-cutoff",
                defaults.frequency_cutoff,
            )?,
            depth: cfg.resolve(flags.depth, "depth", defaults.depth)?,
        })
    }

    fn to_config(&self) -> Result<SelectionConfig, CliError> {
        let interval = SimilarityInterval::new(self.sim_lo, self.sim_hi).ok_or_else(|| {
            CliError::domain(format!(
                "invalid similarity interval [{}, {}]: need -1 <= lo <= hi <= 1",
                self.sim_lo, self.sim_hi
            ))
        })?;
        Ok(SelectionConfig {
            similarity_interval: interval,
            neighbor_threshold: self.neighbor_threshold,
            neighbor_cap: self.neighbor_cap,
            frequency_cutoff: self.frequency_cutoff,
            depth: self.depth,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct ResolvedLimits {
    pub timeout_ms: u64,
    pub max_atoms: usize,
    pub max_branch_depth: usize,
}

impl ResolvedLimits {
    fn resolve(flags: &LimitFlags, cfg: &ConfigFile) -> Result<Self, CliError> {
        Ok(ResolvedLimits {
            timeout_ms: cfg.resolve(flags.timeout_ms, "timeout-ms", 30_000)?,
            max_atoms: cfg.resolve(flags.max_atoms, "max-atoms", 100_000)?,
            max_branch_depth: cfg.resolve(flags.max_branch_depth, "max-branch-depth", 64)?,
        })
    }

    fn to_limits(&self) -> Limits {
        Limits {
            timeout: std::time::Duration::from_millis(self.timeout_ms),
            max_atoms: self.max_atoms,
            max_branch_depth: self.max_branch_depth,
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, CliError> {
    let clauses = parse_clause_file(&read_file(path)?)?;
    Ok(build_kb(clauses)?)
}

fn load_vectors(
    cfg: &ConfigFile,
    flag: Option<PathBuf>,
) -> Result<(EmbeddingStore, PathBuf), CliError> {
    let path: PathBuf = cfg.resolve_required(flag, "embedding", "embedding file")?;
    let file = fs::File::open(&path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let (store, report) = load_embedding(BufReader::new(file), None)?;
    log::info!(
        "embedding {}: {} entries, {} duplicates, {} zero-norm dropped",
        path.display(),
        report.entries,
        report.duplicates,
        report.zero_norm_dropped
    );
    Ok((store, path))
}

fn emit(out: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn comma_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn ingest(args: IngestArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    if args.triples.is_none() && args.clauses.is_none() {
        return Err(CliError::io(
            "ingest needs --triples and/or --clauses as input".to_string(),
        ));
    }
    let mut clauses: Vec<Clause> = Vec::new();
    let mut from_clause_file = 0usize;
    if let Some(path) = &args.clauses {
        clauses = parse_clause_file(&read_file(path)?)?;
        from_clause_file = clauses.len();
    }

    let mut triple_count = 0usize;
    let mut skipped = Vec::new();
    let mut format_used = None;
    if let Some(path) = &args.triples {
        let format_name: String = cfg.resolve(
            args.format.clone(),
            "format",
            match path.extension().and_then(|e| e.to_str()) {
                Some("tsv") => "tsv".to_string(),
                _ => "csv".to_string(),
            },
        )?;
        let format = match format_name.as_str() {
            "csv" => TripleFormat::Csv,
            "tsv" => TripleFormat::Tsv,
            other => {
                return Err(CliError::io(format!("unknown triple format '{other}'")));
            }
        };
        format_used = Some(format_name);
        let file = fs::File::open(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        let load = parse_triples(BufReader::new(file), format)?;
        let mut gen = SkolemGen::new();
        triple_count = load.triples.len();
        for triple in &load.triples {
            clauses.push(triple_to_clause(triple, &mut gen));
        }
        skipped = load.skipped;
    }

    let kb = build_kb(clauses)?;
    if let Some(out) = &args.out {
        fs::write(out, serialize_clauses(kb.clauses()))
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", out.display())))?;
    }
    let report = json!({
        "config": {
            "subcommand": "ingest",
            "triples": args.triples.as_ref().map(|p| p.display().to_string()),
            "clauses": args.clauses.as_ref().map(|p| p.display().to_string()),
            "format": format_used,
            "out": args.out.as_ref().map(|p| p.display().to_string()),
        },
        "clauses_from_file": from_clause_file,
        "triples": triple_count,
        "skipped": skipped,
        "clauses_total": kb.len(),
        "predicate_symbols": kb.symbol_index().len(),
    });
    emit(None, &report)
}

pub fn select(args: SelectArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let kb = load_kb(&args.kb)?;
    let selection = ResolvedSelection::resolve(&args.selection, cfg)?;
    let selection_cfg = selection.to_config()?;
    let seeds: IndexSet<String> = comma_list(&args.context).into_iter().collect();
    if seeds.is_empty() {
        return Err(CliError::domain("empty context".to_string()));
    }
    let mode: String = cfg.resolve(args.mode.clone(), "mode", "associative".to_string())?;

    let (context, ids, embedding_path) = match mode.as_str() {
        "syntactic" => {
            let context = Context::bare(seeds, ContextOrigin::Formula);
            let ids = syntactic_select(&kb, &context, &selection_cfg);
            (context, ids, None)
        }
        "associative" => {
            let (store, path) = load_vectors(cfg, args.embedding.clone())?;
            let context = expand_context(&store, &seeds, &selection_cfg, ContextOrigin::Formula);
            let ids = associative_select(&kb, &store, &context, &selection_cfg);
            (context, ids, Some(path))
        }
        other => return Err(CliError::io(format!("unknown selection mode '{other}'"))),
    };

    let selected: Vec<serde_json::Value> = ids
        .iter()
        .map(|id| {
            json!({
                "id": id.0,
                "clause": kb.clause(*id).map(|c| c.to_string()),
            })
        })
        .collect();
    let report = json!({
        "config": {
            "subcommand": "select",
            "kb": args.kb.display().to_string(),
            "embedding": embedding_path.map(|p| p.display().to_string()),
            "mode": mode,
            "selection": selection,
        },
        "context": {
            "seeds": context.seed_symbols.iter().collect::<Vec<_>>(),
            "expanded": context.expanded_symbols.iter().collect::<Vec<_>>(),
        },
        "selected": selected,
    });
    emit(args.out.as_deref(), &report)
}

pub fn reason_cmd(args: ReasonArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let mut clauses = parse_clause_file(&read_file(&args.kb)?)?;
    if let Some(facts) = &args.facts {
        clauses.extend(parse_clause_file(&read_file(facts)?)?);
    }
    let kb = build_kb(clauses)?;
    let limits = ResolvedLimits::resolve(&args.limits, cfg)?;
    let result = reason(kb.clauses(), &limits.to_limits())?;
    eprintln!(
        "reason: status={:?} inferences={} branches={} elapsed={:?}",
        result.status, result.stats.inferences, result.stats.branches, result.stats.elapsed
    );
    let model: Vec<String> = result.model.iter().map(|a| a.to_string()).collect();
    let report = json!({
        "config": {
            "subcommand": "reason",
            "kb": args.kb.display().to_string(),
            "facts": args.facts.as_ref().map(|p| p.display().to_string()),
            "limits": limits,
        },
        "status": result.status,
        "model": model,
        "stats": {
            "inferences": result.stats.inferences,
            "branches": result.stats.branches,
            "closed_branches": result.stats.closed_branches,
        },
    });
    emit(args.out.as_deref(), &report)
}

fn chain_dot(chain: &Chain) -> String {
    let mut dot = String::from(
        "digraph mind_wandering {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n",
    );
    for (i, step) in chain.steps.iter().enumerate() {
        dot.push_str(&format!(
            "  subgraph cluster_step{i} {{\n    label=\"step {i}\";\n"
        ));
        for sym in &step.focus_symbols {
            dot.push_str(&format!("    \"s{i}_{sym}\" [label=\"{sym}\"];\n"));
        }
        dot.push_str("  }\n");
    }
    for (i, pair) in chain.steps.windows(2).enumerate() {
        for from in &pair[0].focus_symbols {
            for to in &pair[1].focus_symbols {
                dot.push_str(&format!("  \"s{i}_{from}\" -> \"s{}_{to}\";\n", i + 1));
            }
        }
    }
    dot.push_str("}\n");
    dot
}

pub fn wander_cmd(args: WanderArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let kb = load_kb(&args.kb)?;
    let (store, embedding_path) = load_vectors(cfg, args.embedding.clone())?;
    let selection = ResolvedSelection::resolve(&args.selection, cfg)?;
    let limits = ResolvedLimits::resolve(&args.limits, cfg)?;
    let steps: usize = cfg.resolve(args.steps, "steps", 10)?;
    let cluster_divisor: usize = cfg.resolve(args.cluster_divisor, "cluster-divisor", 4)?;
    let cluster_pick: ClusterPick =
        cfg.resolve(args.cluster_pick, "cluster-pick", ClusterPick::Middle)?;
    let seed: u64 = cfg.resolve(args.seed, "seed", 0)?;
    if cluster_divisor == 0 {
        return Err(CliError::domain(
            "cluster-divisor must be at least 1".to_string(),
        ));
    }

    let start: IndexSet<String> = comma_list(&args.start).into_iter().collect();
    if start.is_empty() {
        return Err(CliError::domain("empty start symbol list".to_string()));
    }
    let wander_cfg = WanderConfig {
        steps,
        cluster_divisor,
        cluster_pick,
        selection: selection.to_config()?,
        limits: limits.to_limits(),
        rng_seed: seed,
    };
    let chain = wander(&start, &kb, &store, &wander_cfg)?;

    if let Some(dot_path) = &args.dot {
        fs::write(dot_path, chain_dot(&chain))
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", dot_path.display())))?;
    }
    let report = json!({
        "config": {
            "subcommand": "wander",
            "kb": args.kb.display().to_string(),
            "embedding": embedding_path.display().to_string(),
            "start": start.iter().collect::<Vec<_>>(),
            "steps": steps,
            "cluster_divisor": cluster_divisor,
            "cluster_pick": cluster_pick,
            "seed": seed,
            "selection": selection,
            "limits": limits,
        },
        "steps": chain.steps,
        "terminated_reason": chain.terminated_reason,
    });
    emit(args.out.as_deref(), &report)
}

fn ranking_json(ranked: &RankedCandidates, top: usize) -> serde_json::Value {
    let entries: Vec<serde_json::Value> = ranked
        .entries
        .iter()
        .take(top)
        .map(|(w, s)| json!({ "word": w, "score": s }))
        .collect();
    json!(entries)
}

fn query_words(raw: &str) -> Result<[String; 3], CliError> {
    let words = comma_list(raw);
    let n = words.len();
    let [a, b, c]: [String; 3] = words
        .try_into()
        .map_err(|_| CliError::domain(format!("a query needs exactly 3 words, got {n}")))?;
    Ok([a, b, c])
}

pub fn frat(args: FratArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let (store, embedding_path) = load_vectors(cfg, args.embedding.clone())?;
    let pool: usize = cfg.resolve(args.pool, "pool", assoc_core::creativity::DEFAULT_POOL)?;
    let top: usize = cfg.resolve(args.top, "top", 10)?;
    let rank: String = cfg.resolve(args.rank.clone(), "rank", "both".to_string())?;
    let exclude = args.exclude_query || cfg.resolve(None::<bool>, "exclude-query", false)?;
    let options = RankerOptions {
        exclude_query_words: exclude,
    };
    let query = query_words(&args.query)?;
    // Validates pairwise distinctness.
    FratProblem::new(query.clone(), None)?;

    let mut rankings = serde_json::Map::new();
    if rank == "mean" || rank == "both" {
        let ranked = rank_by_mean(&store, &query, pool, options)?;
        rankings.insert("mean".to_string(), ranking_json(&ranked, top));
    }
    if rank == "variance" || rank == "both" {
        let ranked = rank_variance_adjusted(&store, &query, pool, options)?;
        rankings.insert("variance_adjusted".to_string(), ranking_json(&ranked, top));
    }
    if rankings.is_empty() {
        return Err(CliError::io(format!(
            "unknown rank kind '{rank}' (expected mean, variance or both)"
        )));
    }

    let report = json!({
        "config": {
            "subcommand": "frat",
            "embedding": embedding_path.display().to_string(),
            "query": query,
            "pool": pool,
            "top": top,
            "rank": rank,
            "exclude_query_words": exclude,
        },
        "rankings": rankings,
    });
    emit(args.out.as_deref(), &report)
}

fn parse_problem_file(path: &Path) -> Result<Vec<FratProblem>, CliError> {
    let text = read_file(path)?;
    let mut problems = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(CliError::io(format!(
                "{} line {}: expected 'q1<TAB>q2<TAB>q3<TAB>gold'",
                path.display(),
                idx + 1
            )));
        }
        let problem = FratProblem::new(
            [
                fields[0].to_string(),
                fields[1].to_string(),
                fields[2].to_string(),
            ],
            Some(fields[3].to_string()),
        )?;
        problems.push(problem);
    }
    if problems.is_empty() {
        return Err(CliError::io(format!(
            "{}: no problems found",
            path.display()
        )));
    }
    Ok(problems)
}

pub fn frat_bench(args: BenchArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let (store, embedding_path) = load_vectors(cfg, args.embedding.clone())?;
    let pool: usize = cfg.resolve(args.pool, "pool", assoc_core::creativity::DEFAULT_POOL)?;
    let ks_raw: String = cfg.resolve(args.ks.clone(), "ks", "1,3,10".to_string())?;
    let jobs: usize = cfg.resolve(args.jobs, "jobs", 0)?;
    let exclude = args.exclude_query || cfg.resolve(None::<bool>, "exclude-query", false)?;
    let options = RankerOptions {
        exclude_query_words: exclude,
    };
    let k_values: Vec<usize> = ks_raw
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::io(format!("cannot parse --ks '{ks_raw}'")))?;

    let problems = parse_problem_file(&args.problems)?;
    let metrics = evaluate_benchmark(&store, &problems, &k_values, pool, options);

    // Per-problem detail rows, computed in parallel but emitted in input
    // order.
    let pool_builder = rayon::ThreadPoolBuilder::new().num_threads(jobs);
    let details: Vec<serde_json::Value> = pool_builder
        .build()
        .map_err(|e| CliError::io(format!("cannot build thread pool: {e}")))?
        .install(|| {
            problems
                .par_iter()
                .map(|p| {
                    let gold = p.gold_answer.as_deref().unwrap_or_default();
                    let (mean_rank, adjusted_rank) =
                        match rank_by_mean(&store, &p.query_words, pool, options) {
                            Ok(mean) => {
                                let adj =
                                    rank_variance_adjusted(&store, &p.query_words, pool, options)
                                        .ok();
                                (mean.rank_of(gold), adj.and_then(|a| a.rank_of(gold)))
                            }
                            Err(_) => (None, None),
                        };
                    json!({
                        "query": p.query_words,
                        "gold": gold,
                        "mean_rank": mean_rank,
                        "adjusted_rank": adjusted_rank,
                    })
                })
                .collect()
        });

    let report = json!({
        "config": {
            "subcommand": "frat-bench",
            "embedding": embedding_path.display().to_string(),
            "problems": args.problems.display().to_string(),
            "pool": pool,
            "ks": k_values,
            "jobs": jobs,
            "exclude_query_words": exclude,
        },
        "metrics": metrics,
        "problems": details,
    });
    emit(args.out.as_deref(), &report)
}
