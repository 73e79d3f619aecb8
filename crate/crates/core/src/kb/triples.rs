//! Triple ingestion: ConceptNet-style `(subject, relation, object)` rows
//! and their translation into range-restricted clauses.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::parser::SkolemGen;
use super::{Atom, Clause, KbError, Provenance, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleFormat {
    Csv,
    Tsv,
}

impl TripleFormat {
    fn separator(self) -> char {
        match self {
            TripleFormat::Csv => ',',
            TripleFormat::Tsv => '\t',
        }
    }
}

/// Normalized knowledge triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    /// Normalize and validate the three concept fields. Returns `None` if
    /// any field is empty after normalization.
    pub fn new(subject: &str, relation: &str, object: &str) -> Option<Triple> {
        let subject = normalize_concept(subject);
        let relation = normalize_concept(relation);
        let object = normalize_concept(object);
        if subject.is_empty() || relation.is_empty() || object.is_empty() {
            return None;
        }
        Some(Triple {
            subject,
            relation,
            object,
        })
    }
}

/// Lowercase, trim, and replace internal whitespace runs by underscores,
/// matching the tokens of the word embeddings the pipeline is used with.
pub fn normalize_concept(raw: &str) -> String {
    raw.trim()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

/// Result of a triple load: the good rows plus a report of skipped lines.
#[derive(Debug, Clone, Serialize)]
pub struct TripleLoad {
    pub triples: Vec<Triple>,
    pub skipped: Vec<SkippedLine>,
}

/// Parse a line-oriented triple stream. Lines starting with `#` and blank
/// lines are ignored; malformed lines are reported and skipped. More than
/// half the data lines malformed is a fatal format error.
pub fn parse_triples<R: BufRead>(input: R, format: TripleFormat) -> Result<TripleLoad, KbError> {
    let sep = format.separator();
    let mut triples = Vec::new();
    let mut skipped = Vec::new();
    let mut data_lines = 0usize;

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        data_lines += 1;
        let fields: Vec<&str> = trimmed.split(sep).collect();
        if fields.len() < 3 {
            skipped.push(SkippedLine {
                line: line_no,
                reason: format!("expected at least 3 fields, found {}", fields.len()),
            });
            continue;
        }
        match Triple::new(fields[0], fields[1], fields[2]) {
            Some(t) => triples.push(t),
            None => skipped.push(SkippedLine {
                line: line_no,
                reason: "empty field after normalization".to_string(),
            }),
        }
    }

    if data_lines > 0 && skipped.len() * 2 > data_lines {
        return Err(KbError::TripleFormat {
            malformed: skipped.len(),
            total: data_lines,
        });
    }
    Ok(TripleLoad { triples, skipped })
}

/// Encode a triple as `∀X (subject(X) -> relation(X, sk(X)) ∧ object(sk(X)))`
/// with a Skolem function fresh per triple.
pub fn triple_to_clause(t: &Triple, gen: &mut SkolemGen) -> Clause {
    let sk = gen.fresh();
    let x = Term::Variable("X".to_string());
    let sk_x = Term::Function(sk, vec![x.clone()]);
    Clause::new(
        vec![Atom::new(t.subject.clone(), vec![x.clone()])],
        vec![vec![
            Atom::new(t.relation.clone(), vec![x, sk_x.clone()]),
            Atom::new(t.object.clone(), vec![sk_x]),
        ]],
        Provenance::Triple,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes_conceptnet_row() {
        let load = parse_triples("dog,HasA,fur".as_bytes(), TripleFormat::Csv).unwrap();
        assert_eq!(
            load.triples,
            vec![Triple::new("dog", "hasa", "fur").unwrap()]
        );
        assert!(load.skipped.is_empty());
    }

    #[test]
    fn empty_input_is_empty_load() {
        let load = parse_triples("".as_bytes(), TripleFormat::Csv).unwrap();
        assert!(load.triples.is_empty());
        assert!(load.skipped.is_empty());
    }

    #[test]
    fn short_line_is_skipped_with_line_number() {
        let load = parse_triples(
            "dog,HasA,fur\na,IsA\ncat,IsA,animal\nx,IsA,y\n".as_bytes(),
            TripleFormat::Csv,
        )
        .unwrap();
        assert_eq!(load.triples.len(), 3);
        assert_eq!(load.skipped.len(), 1);
        assert_eq!(load.skipped[0].line, 2);
    }

    #[test]
    fn mostly_malformed_input_is_fatal() {
        let err = parse_triples(
            "a,IsA\nb,IsA\ncat,IsA,animal\n".as_bytes(),
            TripleFormat::Csv,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            KbError::TripleFormat {
                malformed: 2,
                total: 3
            }
        ));
    }

    #[test]
    fn tsv_rows_with_extra_fields_parse() {
        let load =
            parse_triples("dog\tDesires\tbone\t0.98\n".as_bytes(), TripleFormat::Tsv).unwrap();
        assert_eq!(
            load.triples[0],
            Triple::new("dog", "desires", "bone").unwrap()
        );
    }

    #[test]
    fn concept_normalization_joins_spaces() {
        assert_eq!(normalize_concept("  Hot  Summer Day "), "hot_summer_day");
    }

    #[test]
    fn hasa_triple_translates_to_skolemized_clause() {
        let mut gen = SkolemGen::new();
        let t = Triple::new("dog", "hasa", "fur").unwrap();
        let c = triple_to_clause(&t, &mut gen);
        assert_eq!(c.to_string(), "dog(X) -> hasa(X,sk1(X)), fur(sk1(X)).");
        assert_eq!(c.range_restriction_violation(), None);
        assert_eq!(c.provenance, Provenance::Triple);
    }

    #[test]
    fn relatedto_triple_translates_like_the_poodle_formula() {
        let mut gen = SkolemGen::new();
        gen.fresh(); // sk1 burned by an earlier triple
        let t = Triple::new("poodle", "relatedto", "dog").unwrap();
        let c = triple_to_clause(&t, &mut gen);
        assert_eq!(
            c.to_string(),
            "poodle(X) -> relatedto(X,sk2(X)), dog(sk2(X))."
        );
    }

    #[test]
    fn distinct_triples_get_distinct_skolem_functions() {
        let mut gen = SkolemGen::new();
        let c1 = triple_to_clause(&Triple::new("dog", "hasa", "fur").unwrap(), &mut gen);
        let c2 = triple_to_clause(&Triple::new("cat", "hasa", "fur").unwrap(), &mut gen);
        let name = |c: &Clause| match &c.heads[0][0].args[1] {
            Term::Function(f, _) => f.clone(),
            _ => unreachable!(),
        };
        assert_ne!(name(&c1), name(&c2));
    }
}
