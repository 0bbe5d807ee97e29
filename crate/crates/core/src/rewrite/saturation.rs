use std::collections::{BTreeMap, BTreeSet};

use super::pe::PeFormula;
use crate::chase::Closure;
use crate::logic::{Atom, Ontology, Signature};

/// Data-level entailment of single atoms: for a query atom, every data atom over
/// the same arguments that entails it under the ontology.
#[derive(Clone, Debug, Default)]
pub struct Saturation {
    unary: BTreeMap<String, BTreeSet<String>>,
    binary: BTreeMap<String, BTreeSet<(String, bool)>>,
}

impl Saturation {
    /// `extra` adds predicates that only occur in the query.
    pub fn new(ontology: &Ontology, extra: &Signature) -> Self {
        let closure = Closure::of(ontology);
        let mut unary_preds: BTreeSet<&String> = ontology.signature().unary_predicates().iter().collect();
        unary_preds.extend(extra.unary_predicates());
        let mut binary_preds: BTreeSet<&String> = ontology.signature().binary_predicates().iter().collect();
        binary_preds.extend(extra.binary_predicates());

        let mut sat = Saturation::default();
        for b in unary_preds {
            for a in closure.unary_closure(b) {
                sat.unary.entry(a).or_default().insert(b.clone());
            }
        }
        for s in binary_preds {
            for (r, inverted) in closure.role_closure(s) {
                sat.binary.entry(r).or_default().insert((s.clone(), inverted));
            }
        }
        sat
    }

    /// Unary predicates `B` with `B(x)` entailing `A(x)`, always including `A`.
    pub fn unary(&self, pred: &str) -> BTreeSet<String> {
        let mut out = self.unary.get(pred).cloned().unwrap_or_default();
        out.insert(pred.to_string());
        out
    }

    /// `(S, inverted)` with `S(x,y)` (or `S(y,x)` when inverted) entailing `R(x,y)`.
    pub fn binary(&self, pred: &str) -> BTreeSet<(String, bool)> {
        let mut out = self.binary.get(pred).cloned().unwrap_or_default();
        out.insert((pred.to_string(), false));
        out
    }

    /// Disjunction of the data atoms entailing `atom`.
    pub fn atom(&self, atom: &Atom) -> PeFormula {
        let mut alternatives: BTreeSet<Atom> = BTreeSet::new();
        match atom {
            Atom::Unary(p, t) => {
                for b in self.unary(p) {
                    alternatives.insert(Atom::Unary(b, t.clone()));
                }
            }
            Atom::Binary(p, s, t) => {
                for (r, inverted) in self.binary(p) {
                    alternatives.insert(if inverted {
                        Atom::Binary(r, t.clone(), s.clone())
                    } else {
                        Atom::Binary(r, s.clone(), t.clone())
                    });
                }
            }
        }
        PeFormula::or(alternatives.into_iter().map(PeFormula::Atom).collect())
    }

    /// Disjunction of data atoms at `var` entailing any of `generators`.
    pub fn root_condition<'a>(&self, generators: impl IntoIterator<Item = &'a String>, var: &str) -> PeFormula {
        let mut alternatives: BTreeSet<Atom> = BTreeSet::new();
        for g in generators {
            for b in self.unary(g) {
                alternatives.insert(Atom::Unary(b, var.to_string()));
            }
        }
        PeFormula::or(alternatives.into_iter().map(PeFormula::Atom).collect())
    }
}
