//! Independent satisfaction check for saturated tableau models: on random
//! disjunctive clause sets, every open model must satisfy every clause (for
//! each substitution grounding a body within the model, some head
//! alternative is fully contained; constraint bodies must never ground).
//!
//! The checker enumerates substitutions through its own plain recursion and
//! shares no code with the engine's matcher.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use assoc_core::kb::{Atom, Clause, Provenance, Term};
use assoc_core::reasoner::{reason, Limits, ReasonerStatus};
use std::time::Duration;

fn ground_bindings(
    body: &[Atom],
    model: &BTreeSet<Atom>,
    current: Vec<(String, Term)>,
) -> Vec<Vec<(String, Term)>> {
    let Some(pattern) = body.first() else {
        return vec![current];
    };
    let mut out = Vec::new();
    'candidates: for atom in model {
        if atom.predicate != pattern.predicate || atom.args.len() != pattern.args.len() {
            continue;
        }
        let mut next = current.clone();
        for (p, g) in pattern.args.iter().zip(&atom.args) {
            match p {
                Term::Variable(v) => match next.iter().find(|(name, _)| name == v) {
                    Some((_, bound)) if bound == g => {}
                    Some(_) => continue 'candidates,
                    None => next.push((v.clone(), g.clone())),
                },
                other if other == g => {}
                _ => continue 'candidates,
            }
        }
        out.extend(ground_bindings(&body[1..], model, next));
    }
    out
}

fn apply(atom: &Atom, bindings: &[(String, Term)]) -> Atom {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => bindings
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, g)| g.clone())
                .unwrap_or_else(|| t.clone()),
            other => other.clone(),
        })
        .collect();
    Atom {
        predicate: atom.predicate.clone(),
        args,
    }
}

fn model_satisfies(clauses: &[Clause], model: &BTreeSet<Atom>) -> Result<(), String> {
    for clause in clauses {
        for bindings in ground_bindings(&clause.body, model, Vec::new()) {
            if clause.heads.is_empty() {
                return Err(format!("constraint body grounded in model: {clause}"));
            }
            let satisfied = clause.heads.iter().any(|alt| {
                alt.iter()
                    .all(|atom| model.contains(&apply(atom, &bindings)))
            });
            if !satisfied {
                return Err(format!(
                    "no head alternative of {clause} holds under {bindings:?}"
                ));
            }
        }
    }
    Ok(())
}

/// Random range-restricted clause set with disjunctive heads and optional
/// constraints. No function symbols, so every instance saturates.
fn random_disjunctive_instance(rng: &mut ChaCha8Rng) -> Vec<Clause> {
    let n_preds = rng.gen_range(2..=4);
    let arities: Vec<usize> = (0..n_preds).map(|_| rng.gen_range(1..=2)).collect();
    let consts = ["a", "b", "c"];
    let n_consts = rng.gen_range(1..=3);
    let vars = ["X", "Y"];

    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(2..=8) {
        let roll: f64 = rng.gen();
        if roll < 0.35 {
            // ground fact
            let p = rng.gen_range(0..n_preds);
            let args = (0..arities[p])
                .map(|_| Term::Constant(consts[rng.gen_range(0..n_consts)].into()))
                .collect();
            clauses.push(Clause::new(
                vec![],
                vec![vec![Atom::new(format!("p{p}"), args)]],
                Provenance::Generated,
            ));
            continue;
        }
        let n_body = rng.gen_range(1..=2);
        let body: Vec<Atom> = (0..n_body)
            .map(|_| {
                let p = rng.gen_range(0..n_preds);
                let args = (0..arities[p])
                    .map(|_| {
                        if rng.gen_bool(0.6) {
                            Term::Variable(vars[rng.gen_range(0..2)].into())
                        } else {
                            Term::Constant(consts[rng.gen_range(0..n_consts)].into())
                        }
                    })
                    .collect();
                Atom::new(format!("p{p}"), args)
            })
            .collect();
        if roll < 0.45 {
            clauses.push(Clause::new(body, vec![], Provenance::Generated)); // constraint
            continue;
        }
        let body_vars: Vec<String> = body
            .iter()
            .flat_map(|a| a.variables())
            .map(str::to_string)
            .collect();
        let n_alts = rng.gen_range(1..=3);
        let heads: Vec<Vec<Atom>> = (0..n_alts)
            .map(|_| {
                let n_conj = rng.gen_range(1..=2);
                (0..n_conj)
                    .map(|_| {
                        let p = rng.gen_range(0..n_preds);
                        let args = (0..arities[p])
                            .map(|_| {
                                if !body_vars.is_empty() && rng.gen_bool(0.7) {
                                    Term::Variable(
                                        body_vars[rng.gen_range(0..body_vars.len())].clone(),
                                    )
                                } else {
                                    Term::Constant(consts[rng.gen_range(0..n_consts)].into())
                                }
                            })
                            .collect();
                        Atom::new(format!("p{p}"), args)
                    })
                    .collect()
            })
            .collect();
        clauses.push(Clause::new(body, heads, Provenance::Generated));
    }
    clauses
}

#[test]
fn saturated_models_satisfy_their_clause_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x50DA);
    let mut open = 0usize;
    let mut refuted = 0usize;
    // substitution-heavy outliers stop at the timeout; the satisfaction
    // property is about saturated models, so they fall outside it
    let limits = Limits {
        timeout: Duration::from_millis(250),
        ..Default::default()
    };
    for case in 0..300 {
        let clauses = random_disjunctive_instance(&mut rng);
        let result = reason(&clauses, &limits).unwrap();
        match result.status {
            ReasonerStatus::Open => {
                open += 1;
                if let Err(why) = model_satisfies(&clauses, &result.model) {
                    panic!("case {case}: open model is not a model: {why}");
                }
            }
            ReasonerStatus::Refutation => refuted += 1,
            ReasonerStatus::ResourceLimit => {}
        }
    }
    // the generator must exercise both outcomes for the check to mean much
    assert!(open >= 100, "only {open} open cases");
    assert!(refuted >= 20, "only {refuted} refuted cases");
}

#[test]
fn desk_fixture_model_passes_the_satisfaction_check() {
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../testdata/dogbone.clauses"),
    )
    .unwrap();
    let clauses = assoc_core::kb::parse_clause_file(&text).unwrap();
    let result = reason(&clauses, &Limits::default()).unwrap();
    assert_eq!(result.status, ReasonerStatus::Open);
    model_satisfies(&clauses, &result.model).unwrap();
}
