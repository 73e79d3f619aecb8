//! Line-based clause parser.
//!
//! One clause per line, terminated by `.`, with `#` starting a comment:
//!
//! ```text
//! clause  := [bodyAtoms] "->" [headAlt ("|" headAlt)*] "."
//! bodyAtoms := atom ("," atom)*
//! headAlt := atom ("," atom)*
//! atom    := ident "(" term ("," term)* ")"
//! term    := Variable | constant | ident "(" term ("," term)* ")"
//! ```
//!
//! Identifiers are lowercase-initial, variables uppercase-initial. A head
//! variable that does not occur in the body is read as existentially
//! quantified within its alternative and replaced by a fresh Skolem
//! application over the body variables, so parsed clauses are always
//! range-restricted.

use std::collections::BTreeSet;

use super::{Atom, Clause, ClauseId, KbError, Provenance, Term};

/// Generator for Skolem function/constant names (`sk1`, `sk2`, ...),
/// skipping any name reserved via [`SkolemGen::reserve`].
#[derive(Debug, Default)]
pub struct SkolemGen {
    next: u32,
    used: BTreeSet<String>,
}

impl SkolemGen {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mark names as taken so `fresh` never returns them.
    pub fn reserve<I: IntoIterator<Item = String>>(&mut self, names: I) {
        self.used.extend(names);
    }

    pub fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("sk{}", self.next);
            if !self.used.contains(&name) {
                self.used.insert(name.clone());
                return name;
            }
        }
    }
}

/// Parse a whole clause file. Ids are assigned in line order.
pub fn parse_clause_file(input: &str) -> Result<Vec<Clause>, KbError> {
    let mut raw = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let code = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        if code.trim().is_empty() {
            continue;
        }
        let mut scanner = Scanner::new(code, line_no);
        let clause = scanner.clause()?;
        scanner.expect_end()?;
        raw.push(clause);
    }

    // Skolem names must not collide with function or constant symbols
    // already spelled out in the file.
    let mut gen = SkolemGen::new();
    let mut reserved = BTreeSet::new();
    for clause in &raw {
        for atom in clause.body.iter().chain(clause.heads.iter().flatten()) {
            for term in &atom.args {
                collect_symbol_names(term, &mut reserved);
            }
        }
    }
    gen.reserve(reserved);

    let mut clauses = Vec::with_capacity(raw.len());
    for (pos, clause) in raw.into_iter().enumerate() {
        let mut clause = skolemize(clause, &mut gen);
        if let Some(var) = clause.range_restriction_violation() {
            return Err(KbError::RangeRestriction {
                var: var.to_string(),
                clause: clause.to_string(),
            });
        }
        clause.id = ClauseId(pos as u32);
        clauses.push(clause);
    }
    Ok(clauses)
}

fn collect_symbol_names(term: &Term, out: &mut BTreeSet<String>) {
    match term {
        Term::Variable(_) => {}
        Term::Constant(c) => {
            out.insert(c.clone());
        }
        Term::Function(f, args) => {
            out.insert(f.clone());
            for a in args {
                collect_symbol_names(a, out);
            }
        }
    }
}

/// Replace head-only variables by Skolem applications over the body
/// variables. Each head alternative is its own existential scope.
fn skolemize(mut clause: Clause, gen: &mut SkolemGen) -> Clause {
    let universal: Vec<String> = clause
        .body_variables()
        .into_iter()
        .map(str::to_string)
        .collect();
    for alt in clause.heads.iter_mut() {
        let mut mapping: Vec<(String, Term)> = Vec::new();
        for atom in alt.iter() {
            for v in atom.variables() {
                if !universal.iter().any(|u| u == v) && !mapping.iter().any(|(name, _)| name == v) {
                    let name = gen.fresh();
                    let replacement = if universal.is_empty() {
                        Term::Constant(name)
                    } else {
                        Term::Function(
                            name,
                            universal
                                .iter()
                                .map(|u| Term::Variable(u.clone()))
                                .collect(),
                        )
                    };
                    mapping.push((v.to_string(), replacement));
                }
            }
        }
        if mapping.is_empty() {
            continue;
        }
        for atom in alt.iter_mut() {
            for arg in atom.args.iter_mut() {
                substitute(arg, &mapping);
            }
        }
    }
    clause
}

fn substitute(term: &mut Term, mapping: &[(String, Term)]) {
    match term {
        Term::Variable(v) => {
            if let Some((_, rep)) = mapping.iter().find(|(name, _)| name == v) {
                *term = rep.clone();
            }
        }
        Term::Constant(_) => {}
        Term::Function(_, args) => {
            for a in args {
                substitute(a, mapping);
            }
        }
    }
}

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    src: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Scanner {
            chars: src.chars().collect(),
            pos: 0,
            line,
            src,
        }
    }

    fn err(&self, msg: impl Into<String>) -> KbError {
        KbError::Syntax {
            line: self.line,
            col: self.pos + 1,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn clause(&mut self) -> Result<Clause, KbError> {
        self.skip_ws();
        let mut body = Vec::new();
        if !self.at_arrow() {
            body.push(self.atom()?);
            loop {
                self.skip_ws();
                if self.eat(',') {
                    self.skip_ws();
                    body.push(self.atom()?);
                } else {
                    break;
                }
            }
        }
        self.skip_ws();
        if !(self.eat('-') && self.eat('>')) {
            return Err(self.err("expected '->'"));
        }
        self.skip_ws();
        let mut heads = Vec::new();
        if !self.eat('.') {
            loop {
                let mut alt = vec![self.atom()?];
                loop {
                    self.skip_ws();
                    if self.eat(',') {
                        self.skip_ws();
                        alt.push(self.atom()?);
                    } else {
                        break;
                    }
                }
                heads.push(alt);
                self.skip_ws();
                if self.eat('|') {
                    self.skip_ws();
                    continue;
                }
                if self.eat('.') {
                    break;
                }
                return Err(self.err("expected ',', '|' or '.'"));
            }
        }
        Ok(Clause::new(body, heads, Provenance::File))
    }

    fn at_arrow(&self) -> bool {
        self.peek() == Some('-') && self.chars.get(self.pos + 1) == Some(&'>')
    }

    fn atom(&mut self) -> Result<Atom, KbError> {
        self.skip_ws();
        let name = self.ident()?;
        self.skip_ws();
        if !self.eat('(') {
            return Err(self.err(format!("expected '(' after predicate '{name}'")));
        }
        let mut args = vec![self.term()?];
        loop {
            self.skip_ws();
            if self.eat(',') {
                args.push(self.term()?);
            } else if self.eat(')') {
                break;
            } else {
                return Err(self.err("expected ',' or ')' in argument list"));
            }
        }
        Ok(Atom::new(name, args))
    }

    fn term(&mut self) -> Result<Term, KbError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_uppercase() => {
                let name = self.name()?;
                Ok(Term::Variable(name))
            }
            Some(c) if c.is_lowercase() || c == '_' => {
                let name = self.name()?;
                self.skip_ws();
                if self.eat('(') {
                    let mut args = vec![self.term()?];
                    loop {
                        self.skip_ws();
                        if self.eat(',') {
                            args.push(self.term()?);
                        } else if self.eat(')') {
                            break;
                        } else {
                            return Err(self.err("expected ',' or ')' in argument list"));
                        }
                    }
                    Ok(Term::Function(name, args))
                } else {
                    Ok(Term::Constant(name))
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn ident(&mut self) -> Result<String, KbError> {
        match self.peek() {
            Some(c) if c.is_lowercase() => self.name(),
            Some(c) => Err(self.err(format!(
                "expected a lowercase-initial identifier, found '{c}'"
            ))),
            None => Err(self.err("expected an identifier, found end of line")),
        }
    }

    fn name(&mut self) -> Result<String, KbError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn expect_end(&mut self) -> Result<(), KbError> {
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.err(format!(
                "unexpected trailing input after clause: '{}'",
                self.src[self.src.len().min(self.byte_pos())..].trim_end()
            )));
        }
        Ok(())
    }

    fn byte_pos(&self) -> usize {
        self.chars[..self.pos].iter().map(|c| c.len_utf8()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::serialize_clauses;

    #[test]
    fn parses_single_implication() {
        let clauses = parse_clause_file("dog(X) -> animal(X).").unwrap();
        assert_eq!(clauses.len(), 1);
        let c = &clauses[0];
        assert_eq!(c.body.len(), 1);
        assert_eq!(c.heads.len(), 1);
        assert_eq!(c.to_string(), "dog(X) -> animal(X).");
    }

    #[test]
    fn parses_constraint_with_empty_heads() {
        let clauses = parse_clause_file("bone(X), plant(X) -> .").unwrap();
        assert!(clauses[0].is_constraint());
        assert_eq!(clauses[0].to_string(), "bone(X), plant(X) -> .");
    }

    #[test]
    fn parses_ground_fact() {
        let clauses = parse_clause_file("-> dog(a).").unwrap();
        assert!(clauses[0].is_fact());
        assert_eq!(
            clauses[0].heads[0][0],
            Atom::new("dog", vec![Term::Constant("a".into())])
        );
    }

    #[test]
    fn parses_disjunctive_heads_and_conjunctions() {
        let clauses =
            parse_clause_file("bone(B) -> plant(B) | dog_treat(B), chewable(B).").unwrap();
        let c = &clauses[0];
        assert_eq!(c.heads.len(), 2);
        assert_eq!(c.heads[1].len(), 2);
    }

    #[test]
    fn head_only_variable_becomes_skolem_application() {
        let clauses = parse_clause_file("dog(X) -> hasa(X, Y), fur(Y).").unwrap();
        let c = &clauses[0];
        let sk = Term::Function("sk1".into(), vec![Term::Variable("X".into())]);
        assert_eq!(
            c.heads[0][0],
            Atom::new("hasa", vec![Term::Variable("X".into()), sk.clone()])
        );
        assert_eq!(c.heads[0][1], Atom::new("fur", vec![sk]));
        assert_eq!(c.range_restriction_violation(), None);
    }

    #[test]
    fn head_only_variable_in_fact_becomes_skolem_constant() {
        let clauses = parse_clause_file("-> thing(Y).").unwrap();
        assert_eq!(
            clauses[0].heads[0][0],
            Atom::new("thing", vec![Term::Constant("sk1".into())])
        );
        assert!(clauses[0].heads[0][0].is_ground());
    }

    #[test]
    fn skolem_names_avoid_existing_function_symbols() {
        let clauses =
            parse_clause_file("dog(X) -> hasa(X, sk1(X)).\ncat(X) -> near(X, Y).").unwrap();
        match &clauses[1].heads[0][0].args[1] {
            Term::Function(name, _) => assert_eq!(name, "sk2"),
            other => panic!("expected skolem application, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_line_and_column() {
        let err = parse_clause_file("dog(X) -> animal(X).\nbroken(").unwrap_err();
        match err {
            KbError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert!(col >= 8, "col = {col}");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn rejects_trailing_garbage_after_terminator() {
        let err = parse_clause_file("dog(X) -> animal(X). p(X) -> q(X).").unwrap_err();
        assert!(matches!(err, KbError::Syntax { line: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n\ndog(X) -> animal(X). # trailing\n   \n";
        let clauses = parse_clause_file(text).unwrap();
        assert_eq!(clauses.len(), 1);
    }

    #[test]
    fn serialization_reparses_to_equal_clauses() {
        let text = "\
-> dog(a).
dog(X) -> hasa(X, Y), fur(Y).
bone(B) -> plant(B) | dog_treat(B).
bone(X), plant(X) -> .
eat(C), agent(C,A), animal(A) -> carnivore(A).
";
        let first = parse_clause_file(text).unwrap();
        let second = parse_clause_file(&serialize_clauses(&first)).unwrap();
        assert_eq!(first.len(), second.len());
        for (a, b) in first.iter().zip(&second) {
            assert!(a.same_shape(b), "{a} != {b}");
        }
    }
}
