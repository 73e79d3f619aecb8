//! Hypertableau-style forward reasoner.
//!
//! The tableau grows from the input facts. A clause fires on a branch when
//! all of its body atoms match branch atoms under one substitution; a single
//! head alternative appends its ground conjunction, several alternatives
//! split the branch (one child per alternative, explored depth-first in
//! clause order), and an empty head closes the branch. A fired
//! (clause, substitution) pair never refires on the same branch.
//!
//! All branches closed is a refutation. Otherwise the first fully saturated
//! open branch is returned: its atom set is a (partial) interpretation of
//! the input. When the time, atom, or split-depth limit is hit first, the
//! current branch's atoms are returned as a partial interpretation with
//! `ResourceLimit` status.
//!
//! The calculus is deliberately minimal: no factoring, no equality, no
//! negation. Soundness and termination arguments lean on range-restriction,
//! which is re-checked on entry.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::kb::{Atom, Clause, ClauseId, Term};

#[derive(Debug, Error)]
pub enum ReasonerError {
    #[error(
        "clause {clause} is not range-restricted: head variable {var} does not occur in the body"
    )]
    NotRangeRestricted { var: String, clause: String },
    #[error("fact {clause} is not ground")]
    NonGroundFact { clause: String },
    #[error("refutation result has no model")]
    RefutationHasNoModel,
    #[error("clause {clause} has a disjunctive head; the fixpoint oracle handles the Horn fragment only")]
    DisjunctiveClause { clause: String },
    #[error("limits must all be positive: {0}")]
    InvalidLimits(String),
}

/// Resource limits for one reasoning call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub timeout: Duration,
    pub max_atoms: usize,
    pub max_branch_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        // 30 s mirrors the prover budget the pipeline is tuned around.
        Limits {
            timeout: Duration::from_secs(30),
            max_atoms: 100_000,
            max_branch_depth: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonerStatus {
    Refutation,
    Open,
    ResourceLimit,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReasonerStats {
    pub inferences: usize,
    /// Branches created (the root plus one per split alternative).
    pub branches: usize,
    /// Branches closed by a constraint firing.
    pub closed_branches: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// One derivation step: the clause fired, the substitution used, and the
/// instantiated atoms of the chosen head alternative (empty for a closing
/// constraint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub clause: ClauseId,
    pub substitution: Vec<(String, Term)>,
    pub produced: Vec<Atom>,
}

#[derive(Debug, Clone)]
pub struct ReasonerResult {
    pub status: ReasonerStatus,
    pub model: BTreeSet<Atom>,
    pub stats: ReasonerStats,
    /// Derivation log of the returned branch (empty for refutations).
    pub derivation_log: Vec<LogEntry>,
}

/// Distinct predicate symbols of the model, lexicographically ordered.
/// Calling this on a refutation is a contract violation.
pub fn model_symbols(result: &ReasonerResult) -> Result<Vec<String>, ReasonerError> {
    if result.status == ReasonerStatus::Refutation {
        return Err(ReasonerError::RefutationHasNoModel);
    }
    let set: BTreeSet<&str> = result.model.iter().map(|a| a.predicate.as_str()).collect();
    Ok(set.into_iter().map(str::to_string).collect())
}

/// Run the hypertableau calculus over range-restricted clauses.
pub fn reason(clauses: &[Clause], limits: &Limits) -> Result<ReasonerResult, ReasonerError> {
    if limits.timeout.is_zero() {
        return Err(ReasonerError::InvalidLimits("timeout is zero".into()));
    }
    if limits.max_atoms == 0 {
        return Err(ReasonerError::InvalidLimits("max_atoms is zero".into()));
    }
    if limits.max_branch_depth == 0 {
        return Err(ReasonerError::InvalidLimits(
            "max_branch_depth is zero".into(),
        ));
    }
    for clause in clauses {
        if clause.body.is_empty() && !clause.heads.iter().flatten().all(Atom::is_ground) {
            return Err(ReasonerError::NonGroundFact {
                clause: clause.to_string(),
            });
        }
        if let Some(var) = clause.range_restriction_violation() {
            return Err(ReasonerError::NotRangeRestricted {
                var: var.to_string(),
                clause: clause.to_string(),
            });
        }
    }

    let start = Instant::now();
    let mut engine = Engine {
        clauses,
        limits,
        start,
        inferences: 0,
        branches: 1,
        closed_branches: 0,
    };

    let mut root = Branch::new();
    let mut seeding_overflow = false;
    'seed: for (idx, clause) in clauses.iter().enumerate() {
        if clause.is_fact() {
            let produced = clause.heads[0].clone();
            let new_count = produced.iter().filter(|a| !root.seen.contains(*a)).count();
            if root.atoms.len() + new_count > limits.max_atoms {
                seeding_overflow = true;
                break 'seed;
            }
            root.fired.entry(idx).or_default().insert(Vec::new());
            for atom in &produced {
                root.insert(atom.clone());
            }
            root.log.push(LogEntry {
                clause: clause.id,
                substitution: Vec::new(),
                produced,
            });
            engine.inferences += 1;
        }
    }

    let outcome = if seeding_overflow {
        Outcome::Limit(root)
    } else {
        engine.explore(root, 0)
    };
    let elapsed = start.elapsed();
    let stats = ReasonerStats {
        inferences: engine.inferences,
        branches: engine.branches,
        closed_branches: engine.closed_branches,
        elapsed,
    };
    Ok(match outcome {
        Outcome::Refuted => ReasonerResult {
            status: ReasonerStatus::Refutation,
            model: BTreeSet::new(),
            stats,
            derivation_log: Vec::new(),
        },
        Outcome::Open(branch) => ReasonerResult {
            status: ReasonerStatus::Open,
            model: branch.atoms.iter().cloned().collect(),
            stats,
            derivation_log: branch.log,
        },
        Outcome::Limit(branch) => ReasonerResult {
            status: ReasonerStatus::ResourceLimit,
            model: branch.atoms.iter().cloned().collect(),
            stats,
            derivation_log: branch.log,
        },
    })
}

enum Outcome {
    Refuted,
    Open(Branch),
    Limit(Branch),
}

#[derive(Debug, Clone)]
struct Branch {
    /// Atoms in derivation order; `seen` mirrors it for membership tests.
    atoms: Vec<Atom>,
    seen: HashSet<Atom>,
    /// Atom positions per predicate, ascending.
    by_predicate: HashMap<String, Vec<usize>>,
    /// Bindings (in clause-variable order) already fired here, per clause.
    fired: HashMap<usize, HashSet<Vec<Term>>>,
    log: Vec<LogEntry>,
}

impl Branch {
    fn new() -> Self {
        Branch {
            atoms: Vec::new(),
            seen: HashSet::new(),
            by_predicate: HashMap::new(),
            fired: HashMap::new(),
            log: Vec::new(),
        }
    }

    fn insert(&mut self, atom: Atom) -> bool {
        if self.seen.contains(&atom) {
            return false;
        }
        self.by_predicate
            .entry(atom.predicate.clone())
            .or_default()
            .push(self.atoms.len());
        self.seen.insert(atom.clone());
        self.atoms.push(atom);
        true
    }
}

struct Engine<'a> {
    clauses: &'a [Clause],
    limits: &'a Limits,
    start: Instant,
    inferences: usize,
    branches: usize,
    closed_branches: usize,
}

impl Engine<'_> {
    fn explore(&mut self, mut branch: Branch, depth: usize) -> Outcome {
        loop {
            if self.start.elapsed() > self.limits.timeout {
                return Outcome::Limit(branch);
            }
            let Some((idx, bindings)) = self.first_unfired(&branch) else {
                return Outcome::Open(branch); // saturated
            };
            let clause = &self.clauses[idx];
            branch
                .fired
                .entry(idx)
                .or_default()
                .insert(bindings.clone());
            self.inferences += 1;
            let variables = clause.body_variables();
            let substitution: Vec<(String, Term)> = variables
                .iter()
                .map(|v| v.to_string())
                .zip(bindings.iter().cloned())
                .collect();

            if clause.heads.is_empty() {
                branch.log.push(LogEntry {
                    clause: clause.id,
                    substitution,
                    produced: Vec::new(),
                });
                self.closed_branches += 1;
                return Outcome::Refuted; // branch closed
            }

            if clause.heads.len() == 1 {
                let produced: Vec<Atom> = clause.heads[0]
                    .iter()
                    .map(|a| instantiate(a, &substitution))
                    .collect();
                let new_count = produced
                    .iter()
                    .filter(|a| !branch.seen.contains(*a))
                    .count();
                if branch.atoms.len() + new_count > self.limits.max_atoms {
                    return Outcome::Limit(branch);
                }
                for atom in &produced {
                    debug_assert!(atom.is_ground());
                    branch.insert(atom.clone());
                }
                branch.log.push(LogEntry {
                    clause: clause.id,
                    substitution,
                    produced,
                });
                continue;
            }

            // Disjunctive head: one child branch per alternative.
            if depth + 1 > self.limits.max_branch_depth {
                return Outcome::Limit(branch);
            }
            for alt in &clause.heads {
                self.branches += 1;
                let mut child = branch.clone();
                let produced: Vec<Atom> =
                    alt.iter().map(|a| instantiate(a, &substitution)).collect();
                let new_count = produced.iter().filter(|a| !child.seen.contains(*a)).count();
                if child.atoms.len() + new_count > self.limits.max_atoms {
                    return Outcome::Limit(child);
                }
                for atom in &produced {
                    debug_assert!(atom.is_ground());
                    child.insert(atom.clone());
                }
                child.log.push(LogEntry {
                    clause: clause.id,
                    substitution: substitution.clone(),
                    produced,
                });
                match self.explore(child, depth + 1) {
                    Outcome::Refuted => continue,
                    open_or_limit => return open_or_limit,
                }
            }
            // every alternative led to a closed subtree
            return Outcome::Refuted;
        }
    }

    /// First unfired (clause, substitution) pair: clauses in input order,
    /// substitutions in candidate-atom insertion order.
    fn first_unfired(&self, branch: &Branch) -> Option<(usize, Vec<Term>)> {
        for (idx, clause) in self.clauses.iter().enumerate() {
            if clause.is_fact() {
                continue; // facts are seeded into the root
            }
            let variables = clause.body_variables();
            let fired = branch.fired.get(&idx);
            let mut found = None;
            enumerate_matches(clause, branch, &mut |bindings: &HashMap<&str, Term>| {
                let key: Vec<Term> = variables.iter().map(|v| bindings[*v].clone()).collect();
                if fired.is_some_and(|set| set.contains(&key)) {
                    true // keep searching
                } else {
                    found = Some(key);
                    false // stop
                }
            });
            if let Some(key) = found {
                return Some((idx, key));
            }
        }
        None
    }
}

/// Enumerate substitutions matching the whole clause body against the
/// branch, in deterministic order. The visitor returns `false` to stop.
fn enumerate_matches(
    clause: &Clause,
    branch: &Branch,
    visit: &mut impl FnMut(&HashMap<&str, Term>) -> bool,
) {
    fn rec<'c>(
        body: &'c [Atom],
        branch: &Branch,
        bindings: &mut HashMap<&'c str, Term>,
        visit: &mut impl FnMut(&HashMap<&str, Term>) -> bool,
    ) -> bool {
        let Some(pattern) = body.first() else {
            return visit(bindings);
        };
        let Some(candidates) = branch.by_predicate.get(&pattern.predicate) else {
            return true;
        };
        for &pos in candidates {
            let ground = &branch.atoms[pos];
            if ground.args.len() != pattern.args.len() {
                continue;
            }
            let mut trail: Vec<&'c str> = Vec::new();
            let matched = match_args(&pattern.args, &ground.args, bindings, &mut trail);
            let stop = matched && !rec(&body[1..], branch, bindings, visit);
            for v in trail {
                bindings.remove(v);
            }
            if stop {
                return false;
            }
        }
        true
    }
    let mut bindings = HashMap::new();
    rec(&clause.body, branch, &mut bindings, visit);
}

fn match_args<'c>(
    patterns: &'c [Term],
    grounds: &[Term],
    bindings: &mut HashMap<&'c str, Term>,
    trail: &mut Vec<&'c str>,
) -> bool {
    for (p, g) in patterns.iter().zip(grounds) {
        if !match_term(p, g, bindings, trail) {
            return false;
        }
    }
    true
}

fn match_term<'c>(
    pattern: &'c Term,
    ground: &Term,
    bindings: &mut HashMap<&'c str, Term>,
    trail: &mut Vec<&'c str>,
) -> bool {
    match pattern {
        Term::Variable(v) => match bindings.get(v.as_str()) {
            Some(bound) => bound == ground,
            None => {
                bindings.insert(v.as_str(), ground.clone());
                trail.push(v.as_str());
                true
            }
        },
        Term::Constant(c) => matches!(ground, Term::Constant(g) if g == c),
        Term::Function(f, args) => match ground {
            Term::Function(g, gargs) if g == f && gargs.len() == args.len() => {
                match_args(args, gargs, bindings, trail)
            }
            _ => false,
        },
    }
}

fn instantiate(atom: &Atom, substitution: &[(String, Term)]) -> Atom {
    fn inst_term(term: &Term, substitution: &[(String, Term)]) -> Term {
        match term {
            Term::Variable(v) => substitution
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| term.clone()),
            Term::Constant(_) => term.clone(),
            Term::Function(f, args) => Term::Function(
                f.clone(),
                args.iter().map(|a| inst_term(a, substitution)).collect(),
            ),
        }
    }
    Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|a| inst_term(a, substitution))
            .collect(),
    }
}

/// Naive bottom-up fixpoint over the Horn fragment (at most one head
/// alternative; constraints are skipped). This is the reference oracle for
/// the tableau engine and deliberately shares none of its machinery: plain
/// nested scans over a sorted atom set, no indexes, no firing memo.
pub fn horn_fixpoint(clauses: &[Clause]) -> Result<BTreeSet<Atom>, ReasonerError> {
    for clause in clauses {
        if clause.heads.len() > 1 {
            return Err(ReasonerError::DisjunctiveClause {
                clause: clause.to_string(),
            });
        }
    }
    const ATOM_CAP: usize = 1_000_000;
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    loop {
        let mut added = false;
        for clause in clauses {
            let Some(head) = clause.heads.first() else {
                continue;
            };
            let universe: Vec<Atom> = atoms.iter().cloned().collect();
            for subst in naive_matches(&clause.body, &universe) {
                for atom in head {
                    let ground = instantiate(atom, &subst);
                    if atoms.insert(ground) {
                        added = true;
                    }
                }
            }
            assert!(
                atoms.len() <= ATOM_CAP,
                "fixpoint oracle exceeded {ATOM_CAP} atoms"
            );
        }
        if !added {
            return Ok(atoms);
        }
    }
}

/// All substitutions grounding `body` within `universe`, by exhaustive
/// cartesian search.
fn naive_matches(body: &[Atom], universe: &[Atom]) -> Vec<Vec<(String, Term)>> {
    fn rec(
        body: &[Atom],
        universe: &[Atom],
        current: Vec<(String, Term)>,
        out: &mut Vec<Vec<(String, Term)>>,
    ) {
        let Some(pattern) = body.first() else {
            out.push(current);
            return;
        };
        for ground in universe {
            if ground.predicate != pattern.predicate || ground.args.len() != pattern.args.len() {
                continue;
            }
            let mut bindings: HashMap<&str, Term> = current
                .iter()
                .map(|(v, t)| (v.as_str(), t.clone()))
                .collect();
            let mut trail = Vec::new();
            if match_args(&pattern.args, &ground.args, &mut bindings, &mut trail) {
                let mut next = current.clone();
                for v in trail {
                    next.push((v.to_string(), bindings[v].clone()));
                }
                rec(&body[1..], universe, next, out);
            }
        }
    }
    let mut out = Vec::new();
    rec(body, universe, Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_clause_file;

    fn run(text: &str) -> ReasonerResult {
        reason(&parse_clause_file(text).unwrap(), &Limits::default()).unwrap()
    }

    fn atom_strings(model: &BTreeSet<Atom>) -> Vec<String> {
        model.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn bone_and_plant_are_contradictory() {
        let result = run("-> bone(b).\n-> plant(b).\nbone(X), plant(X) -> .\n");
        assert_eq!(result.status, ReasonerStatus::Refutation);
        assert!(result.model.is_empty());
    }

    #[test]
    fn single_horn_step_saturates() {
        let result = run("-> p(a).\np(X) -> q(X).\n");
        assert_eq!(result.status, ReasonerStatus::Open);
        assert_eq!(atom_strings(&result.model), vec!["p(a)", "q(a)"]);
    }

    #[test]
    fn dog_bone_desk_problem_has_open_branch_with_bone_and_dog_food() {
        let text = "\
-> dog(a).
-> bone(b).
-> chew(c).
-> on(c,b).
-> agent(c,a).
chew(C) -> manducate(C).
manducate(C) -> eat(C).
dog(A) -> animal(A).
eat(C), agent(C,A), animal(A) -> carnivore(A).
bone(B) -> plant(B) | dog_treat(B).
bone(X), plant(X) -> .
plant(P) -> organism(P).
dog_treat(B) -> dog_food(B).
";
        let result = run(text);
        assert_eq!(result.status, ReasonerStatus::Open);
        let atoms = atom_strings(&result.model);
        let expected = vec![
            "agent(c,a)",
            "animal(a)",
            "bone(b)",
            "carnivore(a)",
            "chew(c)",
            "dog(a)",
            "dog_food(b)",
            "dog_treat(b)",
            "eat(c)",
            "manducate(c)",
            "on(c,b)",
        ];
        assert_eq!(atoms, expected);
        // The sibling branch took plant(b) and was closed by the constraint.
        assert!(result.stats.branches > 1);
        assert_eq!(result.stats.closed_branches, 1);
        let symbols = model_symbols(&result).unwrap();
        for expected in [
            "dog",
            "bone",
            "chew",
            "eat",
            "animal",
            "carnivore",
            "dog_food",
        ] {
            assert!(
                symbols.iter().any(|s| s == expected),
                "missing symbol {expected}"
            );
        }
    }

    #[test]
    fn disjunction_with_constraint_picks_surviving_alternative() {
        let result = run("-> p(a).\np(X) -> q(X) | r(X).\nq(X) -> .\n");
        assert_eq!(result.status, ReasonerStatus::Open);
        // Enumerated by hand: the q(a) child closes, the r(a) child saturates.
        assert_eq!(atom_strings(&result.model), vec!["p(a)", "r(a)"]);
    }

    #[test]
    fn model_symbols_are_sorted_and_distinct() {
        let result = run("-> p(a).\np(X) -> q(X).\n");
        assert_eq!(model_symbols(&result).unwrap(), vec!["p", "q"]);
        let refuted = run("-> p(a).\np(X) -> .\n");
        assert!(matches!(
            model_symbols(&refuted),
            Err(ReasonerError::RefutationHasNoModel)
        ));
    }

    #[test]
    fn model_symbols_of_empty_model_is_empty() {
        let result = ReasonerResult {
            status: ReasonerStatus::Open,
            model: BTreeSet::new(),
            stats: ReasonerStats {
                inferences: 0,
                branches: 1,
                closed_branches: 0,
                elapsed: Duration::ZERO,
            },
            derivation_log: Vec::new(),
        };
        assert!(model_symbols(&result).unwrap().is_empty());
    }

    #[test]
    fn non_range_restricted_clause_is_rejected() {
        use crate::kb::{Clause, Provenance};
        let clause = Clause::new(
            vec![Atom::new("p", vec![Term::Variable("X".into())])],
            vec![vec![Atom::new("q", vec![Term::Variable("Z".into())])]],
            Provenance::Generated,
        );
        let err = reason(&[clause], &Limits::default()).unwrap_err();
        assert!(matches!(err, ReasonerError::NotRangeRestricted { .. }));
    }

    #[test]
    fn non_ground_fact_is_rejected() {
        use crate::kb::{Clause, Provenance};
        let clause = Clause::new(
            vec![],
            vec![vec![Atom::new("p", vec![Term::Variable("X".into())])]],
            Provenance::Generated,
        );
        let err = reason(&[clause], &Limits::default()).unwrap_err();
        assert!(matches!(err, ReasonerError::NonGroundFact { .. }));
    }

    #[test]
    fn horn_fixpoint_examples() {
        let clauses = parse_clause_file("-> p(a).\np(X) -> q(X).\n").unwrap();
        let atoms = horn_fixpoint(&clauses).unwrap();
        assert_eq!(atoms.len(), 2);
        assert!(horn_fixpoint(&[]).unwrap().is_empty());
        let disjunctive = parse_clause_file("p(X) -> q(X) | r(X).").unwrap();
        assert!(matches!(
            horn_fixpoint(&disjunctive),
            Err(ReasonerError::DisjunctiveClause { .. })
        ));
    }

    #[test]
    fn horn_models_agree_with_fixpoint_oracle() {
        let text = "\
-> p(a).
-> p(b).
-> r(a,b).
p(X) -> q(X).
q(X), r(X,Y) -> s(Y).
s(X) -> t(X).
";
        let clauses = parse_clause_file(text).unwrap();
        let result = reason(&clauses, &Limits::default()).unwrap();
        assert_eq!(result.status, ReasonerStatus::Open);
        assert_eq!(result.model, horn_fixpoint(&clauses).unwrap());
    }

    #[test]
    fn derivation_log_replays_to_final_model() {
        let result =
            run("-> p(a).\n-> r(a,b).\np(X) -> q(X).\nq(X), r(X,Y) -> s(Y) | t(Y).\nt(X) -> .\n");
        assert_eq!(result.status, ReasonerStatus::Open);
        let mut replayed: BTreeSet<Atom> = BTreeSet::new();
        for entry in &result.derivation_log {
            replayed.extend(entry.produced.iter().cloned());
        }
        assert_eq!(replayed, result.model);
    }

    #[test]
    fn no_pair_refires_on_a_branch() {
        let result = run("-> p(a).\n-> p(b).\np(X) -> q(X).\nq(X) -> q(X).\n");
        assert_eq!(result.status, ReasonerStatus::Open);
        let mut keys: Vec<(ClauseId, Vec<(String, Term)>)> = result
            .derivation_log
            .iter()
            .map(|e| (e.clause, e.substitution.clone()))
            .collect();
        let before = keys.len();
        keys.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        keys.dedup();
        assert_eq!(before, keys.len());
    }

    #[test]
    fn max_atoms_limit_returns_partial_interpretation() {
        // f grows a skolem chain forever without the cap.
        let text = "-> p(a).\np(X) -> q(X, Y).\nq(X, Y) -> p(Y).\n";
        let clauses = parse_clause_file(text).unwrap();
        let limits = Limits {
            max_atoms: 20,
            ..Default::default()
        };
        let result = reason(&clauses, &limits).unwrap();
        assert_eq!(result.status, ReasonerStatus::ResourceLimit);
        assert!(result.model.len() <= 20);
        assert!(!result.model.is_empty());
    }

    #[test]
    fn timeout_returns_resource_limit() {
        let text = "-> p(a).\np(X) -> q(X, Y).\nq(X, Y) -> p(Y).\n";
        let clauses = parse_clause_file(text).unwrap();
        let limits = Limits {
            timeout: Duration::from_millis(20),
            ..Default::default()
        };
        let start = Instant::now();
        let result = reason(&clauses, &limits).unwrap();
        assert_eq!(result.status, ReasonerStatus::ResourceLimit);
        // Within the timeout plus one inference step's slack.
        assert!(start.elapsed() < Duration::from_secs(5));
    }

    #[test]
    fn branch_depth_limit_caps_splitting() {
        // two nested splits; depth 1 allows the first, blocks the second
        let text = "-> p(a).\np(X) -> q(X) | r(X).\nq(X) -> s(X) | t(X).\nr(X) -> s(X) | t(X).\n";
        let clauses = parse_clause_file(text).unwrap();
        let limits = Limits {
            max_branch_depth: 1,
            ..Default::default()
        };
        let result = reason(&clauses, &limits).unwrap();
        assert_eq!(result.status, ReasonerStatus::ResourceLimit);
        let unlimited = reason(&clauses, &Limits::default()).unwrap();
        assert_eq!(unlimited.status, ReasonerStatus::Open);
    }

    #[test]
    fn zero_limits_are_rejected() {
        let clauses = parse_clause_file("-> p(a).").unwrap();
        let limits = Limits {
            max_atoms: 0,
            ..Default::default()
        };
        assert!(matches!(
            reason(&clauses, &limits),
            Err(ReasonerError::InvalidLimits(_))
        ));
    }

    #[test]
    fn refutation_implies_fixpoint_satisfies_a_constraint() {
        // Soundness of closure, checked with the independent oracle: when
        // the tableau refutes a Horn-plus-constraints set, the fixpoint of
        // the Horn part must satisfy some constraint body. Probe clauses
        // `body -> hit_i(vars)` make that check a derivability question.
        let fixtures = [
            "-> bone(b).\n-> plant(b).\nbone(X), plant(X) -> .\n",
            "-> p(a).\np(X) -> q(X).\nq(X) -> r(X).\nr(X), p(X) -> .\n",
            "-> e(a,b).\n-> e(b,c).\ne(X,Y), e(Y,Z) -> path(X,Z).\npath(a,c) -> .\n",
        ];
        for text in fixtures {
            let clauses = parse_clause_file(text).unwrap();
            let result = reason(&clauses, &Limits::default()).unwrap();
            assert_eq!(result.status, ReasonerStatus::Refutation, "fixture: {text}");

            let mut probed: Vec<Clause> = clauses
                .iter()
                .filter(|c| !c.is_constraint())
                .cloned()
                .collect();
            let mut hits = Vec::new();
            for (i, constraint) in clauses.iter().filter(|c| c.is_constraint()).enumerate() {
                let vars: Vec<Term> = constraint
                    .body_variables()
                    .iter()
                    .map(|v| Term::Variable(v.to_string()))
                    .collect();
                let marker = format!("constraint_hit_{i}");
                hits.push(marker.clone());
                let args = if vars.is_empty() {
                    vec![Term::Constant("w".into())]
                } else {
                    vars
                };
                probed.push(Clause::new(
                    constraint.body.clone(),
                    vec![vec![Atom::new(marker, args)]],
                    crate::kb::Provenance::Generated,
                ));
            }
            let fixpoint = horn_fixpoint(&probed).unwrap();
            assert!(
                fixpoint.iter().any(|a| hits.contains(&a.predicate)),
                "no constraint body satisfied in the fixpoint for: {text}"
            );
        }
    }
}
