//! Knowledge-base ingestion: triple and clause parsing, normal-form
//! translation, and the indexed clause store.
//!
//! Clauses are range-restricted implications in the shape
//! `body conjunction -> disjunction of head conjunctions`. An empty body
//! makes a fact, an empty head list makes an integrity constraint.
//! Existential quantification only ever appears in heads and is eliminated
//! by Skolemization at parse/translation time, so the reasoner never sees a
//! quantifier.

mod parser;
mod triples;

pub use parser::{parse_clause_file, SkolemGen};
pub use triples::{
    normalize_concept, parse_triples, triple_to_clause, SkippedLine, Triple, TripleFormat,
    TripleLoad,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while loading triples or clauses.
#[derive(Debug, Error)]
pub enum KbError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(
        "clause {clause} is not range-restricted: head variable {var} does not occur in the body"
    )]
    RangeRestriction { var: String, clause: String },
    #[error("arity clash for predicate '{predicate}': clause {first} uses arity {first_arity}, clause {second} uses arity {second_arity}")]
    ArityClash {
        predicate: String,
        first: ClauseId,
        first_arity: usize,
        second: ClauseId,
        second_arity: usize,
    },
    #[error("unreadable input: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed triple input: {malformed} of {total} data lines unparsable")]
    TripleFormat { malformed: usize, total: usize },
}

/// First-order term. Function applications only arise from Skolemization,
/// either ours or one spelled out in a clause file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Variable(String),
    Constant(String),
    Function(String, Vec<Term>),
}

impl Term {
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Constant(_) => true,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
        }
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Variable(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::Constant(_) => {}
            Term::Function(_, args) => {
                for a in args {
                    a.collect_variables(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "{v}"),
            Term::Constant(c) => write!(f, "{c}"),
            Term::Function(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for t in &self.args {
            t.collect_variables(&mut out);
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Position of a clause inside one knowledge base. Assigned by
/// [`build_kb`] (and provisionally by the parsers) in list order, so the
/// same input always yields the same ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Triple,
    File,
    Generated,
}

/// Range-restricted implication: `body -> heads[0] | heads[1] | ...` where
/// each head alternative is a conjunction of atoms. No heads means an
/// integrity constraint, an empty body a fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub id: ClauseId,
    pub body: Vec<Atom>,
    pub heads: Vec<Vec<Atom>>,
    pub provenance: Provenance,
}

impl Clause {
    pub fn new(body: Vec<Atom>, heads: Vec<Vec<Atom>>, provenance: Provenance) -> Self {
        Clause {
            id: ClauseId(0),
            body,
            heads,
            provenance,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.heads.len() == 1
    }

    pub fn is_constraint(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn is_horn(&self) -> bool {
        self.heads.len() <= 1
    }

    /// Distinct predicate symbols of body and all head alternatives.
    pub fn predicate_symbols(&self) -> BTreeSet<&str> {
        self.body
            .iter()
            .chain(self.heads.iter().flatten())
            .map(|a| a.predicate.as_str())
            .collect()
    }

    /// Body variables in order of first occurrence. These are the clause's
    /// universal variables and the arguments of any Skolem function
    /// introduced for its head existentials.
    pub fn body_variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for atom in &self.body {
            for t in &atom.args {
                t.collect_variables(&mut out);
            }
        }
        out
    }

    /// A head variable that does not occur in the body, if any.
    pub fn range_restriction_violation(&self) -> Option<&str> {
        let body_vars = self.body_variables();
        for alt in &self.heads {
            for atom in alt {
                for v in atom.variables() {
                    if !body_vars.contains(&v) {
                        return Some(v);
                    }
                }
            }
        }
        None
    }

    /// Structural equality ignoring id and provenance.
    pub fn same_shape(&self, other: &Clause) -> bool {
        self.body == other.body && self.heads == other.heads
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.body.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "->")?;
        if self.heads.is_empty() {
            write!(f, " .")
        } else {
            for (i, alt) in self.heads.iter().enumerate() {
                if i > 0 {
                    write!(f, " |")?;
                }
                for (j, a) in alt.iter().enumerate() {
                    if j > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, " {a}")?;
                }
            }
            write!(f, ".")
        }
    }
}

/// Serialize clauses back into the textual clause format, one per line.
pub fn serialize_clauses(clauses: &[Clause]) -> String {
    let mut out = String::new();
    for c in clauses {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Immutable indexed clause store. Built once, then shared read-only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnowledgeBase {
    clauses: Vec<Clause>,
    symbol_index: BTreeMap<String, BTreeSet<ClauseId>>,
    occurrence_count: BTreeMap<String, usize>,
}

impl KnowledgeBase {
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get(id.0 as usize)
    }

    /// Ids of clauses mentioning the predicate symbol.
    pub fn clauses_with_symbol(&self, symbol: &str) -> Option<&BTreeSet<ClauseId>> {
        self.symbol_index.get(symbol)
    }

    /// Number of clauses in which the predicate symbol occurs.
    pub fn occurrence_count(&self, symbol: &str) -> usize {
        self.occurrence_count.get(symbol).copied().unwrap_or(0)
    }

    pub fn symbol_index(&self) -> &BTreeMap<String, BTreeSet<ClauseId>> {
        &self.symbol_index
    }

    pub fn occurrence_counts(&self) -> &BTreeMap<String, usize> {
        &self.occurrence_count
    }
}

/// Index a clause list into a [`KnowledgeBase`]. Clause ids are reassigned
/// to list positions. Fails on a predicate used with two different arities.
pub fn build_kb(mut clauses: Vec<Clause>) -> Result<KnowledgeBase, KbError> {
    let mut arity: BTreeMap<String, (usize, ClauseId)> = BTreeMap::new();
    let mut symbol_index: BTreeMap<String, BTreeSet<ClauseId>> = BTreeMap::new();

    for (pos, clause) in clauses.iter_mut().enumerate() {
        clause.id = ClauseId(pos as u32);
        for atom in clause.body.iter().chain(clause.heads.iter().flatten()) {
            match arity.get(&atom.predicate) {
                None => {
                    arity.insert(atom.predicate.clone(), (atom.args.len(), clause.id));
                }
                Some(&(n, first)) if n != atom.args.len() => {
                    return Err(KbError::ArityClash {
                        predicate: atom.predicate.clone(),
                        first,
                        first_arity: n,
                        second: clause.id,
                        second_arity: atom.args.len(),
                    });
                }
                Some(_) => {}
            }
        }
        for sym in clause.predicate_symbols() {
            symbol_index
                .entry(sym.to_string())
                .or_default()
                .insert(clause.id);
        }
    }

    let occurrence_count = symbol_index
        .iter()
        .map(|(s, ids)| (s.clone(), ids.len()))
        .collect();

    Ok(KnowledgeBase {
        clauses,
        symbol_index,
        occurrence_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(v: &str) -> Term {
        Term::Variable(v.into())
    }
    fn cst(c: &str) -> Term {
        Term::Constant(c.into())
    }

    fn horn(body: Vec<Atom>, head: Vec<Atom>) -> Clause {
        Clause::new(body, vec![head], Provenance::Generated)
    }

    #[test]
    fn empty_kb_has_empty_indexes() {
        let kb = build_kb(vec![]).unwrap();
        assert!(kb.is_empty());
        assert!(kb.symbol_index().is_empty());
        assert!(kb.occurrence_counts().is_empty());
    }

    #[test]
    fn symbol_index_collects_all_clauses_sharing_a_symbol() {
        let c1 = horn(
            vec![Atom::new("p", vec![var("X")])],
            vec![Atom::new("q", vec![var("X")])],
        );
        let c2 = horn(
            vec![Atom::new("p", vec![var("X")])],
            vec![Atom::new("r", vec![var("X")])],
        );
        let kb = build_kb(vec![c1, c2]).unwrap();
        let ids: Vec<_> = kb
            .clauses_with_symbol("p")
            .unwrap()
            .iter()
            .copied()
            .collect();
        assert_eq!(ids, vec![ClauseId(0), ClauseId(1)]);
        assert_eq!(kb.occurrence_count("p"), 2);
        assert_eq!(kb.occurrence_count("q"), 1);
        assert_eq!(kb.occurrence_count("missing"), 0);
    }

    #[test]
    fn occurrence_count_matches_linear_rescan() {
        // Desk reconstruction of the dog/bone formula set; the expected
        // counts come from an independent scan over the clause list.
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
        let clauses = parse_clause_file(text).unwrap();
        let kb = build_kb(clauses.clone()).unwrap();
        for (sym, count) in kb.occurrence_counts() {
            let rescan = clauses
                .iter()
                .filter(|c| c.predicate_symbols().contains(sym.as_str()))
                .count();
            assert_eq!(*count, rescan, "count mismatch for {sym}");
        }
        assert_eq!(kb.occurrence_count("bone"), 3);
    }

    #[test]
    fn occurrence_count_equals_index_size() {
        let text = "dog(X) -> animal(X).\nanimal(X) -> animals(X).\n-> dog(a).\n";
        let kb = build_kb(parse_clause_file(text).unwrap()).unwrap();
        for (sym, n) in kb.occurrence_counts() {
            assert_eq!(*n, kb.clauses_with_symbol(sym).unwrap().len());
        }
    }

    #[test]
    fn build_kb_is_deterministic() {
        let text = "p(X) -> q(X).\nq(X) -> r(X).\n-> p(a).\n";
        let kb1 = build_kb(parse_clause_file(text).unwrap()).unwrap();
        let kb2 = build_kb(parse_clause_file(text).unwrap()).unwrap();
        assert_eq!(kb1.symbol_index(), kb2.symbol_index());
        assert_eq!(kb1.occurrence_counts(), kb2.occurrence_counts());
    }

    #[test]
    fn arity_clash_names_both_clauses() {
        let c1 = horn(
            vec![Atom::new("p", vec![var("X")])],
            vec![Atom::new("q", vec![var("X")])],
        );
        let c2 = horn(
            vec![
                Atom::new("p", vec![var("X"), var("Y")]),
                Atom::new("r", vec![var("Y")]),
            ],
            vec![Atom::new("q", vec![var("X")])],
        );
        let err = build_kb(vec![c1, c2]).unwrap_err();
        match err {
            KbError::ArityClash {
                predicate,
                first,
                second,
                ..
            } => {
                assert_eq!(predicate, "p");
                assert_eq!(first, ClauseId(0));
                assert_eq!(second, ClauseId(1));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn range_restriction_violation_reports_offending_variable() {
        let c = horn(
            vec![Atom::new("p", vec![var("X")])],
            vec![Atom::new("q", vec![var("X"), var("Z")])],
        );
        assert_eq!(c.range_restriction_violation(), Some("Z"));
        let ok = horn(
            vec![Atom::new("p", vec![var("X")])],
            vec![Atom::new("q", vec![var("X")])],
        );
        assert_eq!(ok.range_restriction_violation(), None);
    }

    #[test]
    fn display_round_trips_forms() {
        let fact = Clause::new(
            vec![],
            vec![vec![Atom::new("dog", vec![cst("a")])]],
            Provenance::File,
        );
        assert_eq!(fact.to_string(), "-> dog(a).");
        let constraint = Clause::new(
            vec![
                Atom::new("bone", vec![var("X")]),
                Atom::new("plant", vec![var("X")]),
            ],
            vec![],
            Provenance::File,
        );
        assert_eq!(constraint.to_string(), "bone(X), plant(X) -> .");
    }
}
