//! Command-line surface. Most knobs are optional here and resolved against
//! the config file and built-in defaults in `cmds`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "assoc",
    version,
    about = "Associative reasoning toolkit: knowledge-base ingestion, axiom selection, a hypertableau reasoner, mind-wandering chains, and remote-association solving",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// off | error | warn | info | debug | trace
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Translate triple dumps and clause files into an indexed clause file.
    Ingest(IngestArgs),
    /// Select context-relevant clauses from a knowledge base.
    Select(SelectArgs),
    /// Run the hypertableau reasoner over clause files.
    Reason(ReasonArgs),
    /// Iterate select → reason → cluster into a mind-wandering chain.
    Wander(WanderArgs),
    /// Rank remote-association candidates for three query words.
    Frat(FratArgs),
    /// Evaluate a fRAT problem file and report hit rates.
    FratBench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct SelectionFlags {
    /// Lower bound of the similarity interval for the clause filter.
    #[arg(long, allow_hyphen_values = true)]
    pub sim_lo: Option<f64>,
    /// Upper bound of the similarity interval for the clause filter.
    #[arg(long, allow_hyphen_values = true)]
    pub sim_hi: Option<f64>,
    /// Minimum similarity for a word to join the expanded context.
    #[arg(long, allow_hyphen_values = true)]
    pub neighbor_threshold: Option<f64>,
    /// Neighbour cap per seed symbol.
    #[arg(long)]
    pub neighbor_cap: Option<usize>,
    /// Symbols in more clauses than this never trigger selection.
    #[arg(long)]
    pub frequency_cutoff: Option<usize>,
    /// Trigger rounds beyond the context symbols themselves.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LimitFlags {
    /// Reasoner timeout in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Upper bound on atoms per branch.
    #[arg(long)]
    pub max_atoms: Option<usize>,
    /// Upper bound on branch split depth.
    #[arg(long)]
    pub max_branch_depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Triple file (subject,relation,object per line).
    #[arg(long)]
    pub triples: Option<PathBuf>,
    /// csv | tsv (default: by file extension)
    #[arg(long)]
    pub format: Option<String>,
    /// Clause file to include as-is.
    #[arg(long)]
    pub clauses: Option<PathBuf>,
    /// Write the combined clause file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    /// Knowledge base clause file.
    #[arg(long)]
    pub kb: PathBuf,
    /// Comma-separated context symbols.
    #[arg(long)]
    pub context: String,
    /// Word-embedding file.
    #[arg(long, env = "ASSOC_EMBEDDING")]
    pub embedding: Option<PathBuf>,
    /// associative (default) | syntactic
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub selection: SelectionFlags,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReasonArgs {
    /// Knowledge base clause file.
    #[arg(long)]
    pub kb: PathBuf,
    /// Additional clause file, typically ground facts.
    #[arg(long)]
    pub facts: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitFlags,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WanderArgs {
    /// Comma-separated start symbols.
    #[arg(long)]
    pub start: String,
    /// Knowledge base clause file.
    #[arg(long)]
    pub kb: PathBuf,
    /// Word-embedding file.
    #[arg(long, env = "ASSOC_EMBEDDING")]
    pub embedding: Option<PathBuf>,
    /// Maximum number of wandering steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// nearest | middle | farthest | <index>
    #[arg(long)]
    pub cluster_pick: Option<assoc_core::wander::ClusterPick>,
    /// Cluster count divisor (symbols / divisor clusters).
    #[arg(long)]
    pub cluster_divisor: Option<usize>,
    /// RNG seed for cluster seeding.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub selection: SelectionFlags,
    #[command(flatten)]
    pub limits: LimitFlags,
    /// Write the chain JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a Graphviz rendering of the chain.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FratArgs {
    /// Three comma-separated query words.
    #[arg(long)]
    pub query: String,
    /// Word-embedding file.
    #[arg(long, env = "ASSOC_EMBEDDING")]
    pub embedding: Option<PathBuf>,
    /// Candidate pool size.
    #[arg(long)]
    pub pool: Option<usize>,
    /// mean | variance | both (default both)
    #[arg(long)]
    pub rank: Option<String>,
    /// How many entries to print per ranking.
    #[arg(long)]
    pub top: Option<usize>,
    /// Drop the query words (and case variants) from the pool.
    #[arg(long)]
    pub exclude_query: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Problem file: q1<TAB>q2<TAB>q3<TAB>gold per line.
    #[arg(long)]
    pub problems: PathBuf,
    /// Word-embedding file.
    #[arg(long, env = "ASSOC_EMBEDDING")]
    pub embedding: Option<PathBuf>,
    /// Candidate pool size.
    #[arg(long)]
    pub pool: Option<usize>,
    /// Comma-separated hit cutoffs, e.g. 1,3,10.
    #[arg(long)]
    pub ks: Option<String>,
    /// Worker threads for per-problem details (0 = rayon default).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Drop the query words (and case variants) from the pool.
    #[arg(long)]
    pub exclude_query: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
