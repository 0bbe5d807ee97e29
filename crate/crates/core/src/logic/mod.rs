//! Signatures, data instances, ontologies and conjunctive queries.
//!
//! Everything here is an immutable value once constructed. The textual
//! formats are handled in [`parse`]; [`graph`] classifies queries by the
//! shape of their variable co-occurrence graph.

pub mod graph;
pub mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use graph::{QueryGraph, QueryShape};
pub use parse::{parse_data, parse_ontology, parse_query};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: non-unary premise: existential rules must have a single unary premise")]
    NonUnaryPremise { line: usize },
    #[error("predicate `{name}` used with arity {found}, previously arity {expected}")]
    ArityConflict {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("constant `{0}` in query body; queries may only mention variables")]
    ConstantInQuery(String),
    #[error("head variable `{0}` does not occur in the query body")]
    HeadVariableNotInBody(String),
    #[error("variable `{0}` listed twice in the query head")]
    DuplicateHeadVariable(String),
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },
}

/// Predicate arity. Only unary and binary predicates exist in this fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arity {
    Unary,
    Binary,
}

impl Arity {
    pub fn as_usize(self) -> usize {
        match self {
            Arity::Unary => 1,
            Arity::Binary => 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    unary: BTreeSet<String>,
    binary: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `name` with the given arity, rejecting a clash with an earlier use.
    pub fn declare(&mut self, name: &str, arity: Arity) -> Result<(), LogicError> {
        if name.is_empty() {
            return Err(LogicError::Invalid {
                what: "signature",
                msg: "empty predicate name".into(),
            });
        }
        match self.arity(name) {
            Some(existing) if existing != arity => Err(LogicError::ArityConflict {
                name: name.to_string(),
                expected: existing.as_usize(),
                found: arity.as_usize(),
            }),
            Some(_) => Ok(()),
            None => {
                match arity {
                    Arity::Unary => self.unary.insert(name.to_string()),
                    Arity::Binary => self.binary.insert(name.to_string()),
                };
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<Arity> {
        if self.unary.contains(name) {
            Some(Arity::Unary)
        } else if self.binary.contains(name) {
            Some(Arity::Binary)
        } else {
            None
        }
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), LogicError> {
        for p in &other.unary {
            self.declare(p, Arity::Unary)?;
        }
        for p in &other.binary {
            self.declare(p, Arity::Binary)?;
        }
        Ok(())
    }

    pub fn unary_predicates(&self) -> &BTreeSet<String> {
        &self.unary
    }

    pub fn binary_predicates(&self) -> &BTreeSet<String> {
        &self.binary
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }
}

/// An atom over some kind of term: query variables, data constants or model elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom<T = String> {
    Unary(String, T),
    Binary(String, T, T),
}

impl<T> Atom<T> {
    pub fn predicate(&self) -> &str {
        match self {
            Atom::Unary(p, _) | Atom::Binary(p, _, _) => p,
        }
    }

    pub fn arity(&self) -> Arity {
        match self {
            Atom::Unary(..) => Arity::Unary,
            Atom::Binary(..) => Arity::Binary,
        }
    }

    pub fn terms(&self) -> Vec<&T> {
        match self {
            Atom::Unary(_, t) => vec![t],
            Atom::Binary(_, s, t) => vec![s, t],
        }
    }

    pub fn map_terms<U>(&self, mut f: impl FnMut(&T) -> U) -> Atom<U> {
        match self {
            Atom::Unary(p, t) => Atom::Unary(p.clone(), f(t)),
            Atom::Binary(p, s, t) => Atom::Binary(p.clone(), f(s), f(t)),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Atom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Unary(p, t) => write!(f, "{p}({t})"),
            Atom::Binary(p, s, t) => write!(f, "{p}({s},{t})"),
        }
    }
}

/// The set of ground facts `D` together with its constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DataInstance {
    constants: BTreeSet<String>,
    unary: BTreeSet<(String, String)>,
    binary: BTreeSet<(String, String, String)>,
}

impl DataInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, c: &str) {
        self.constants.insert(c.to_string());
    }

    pub fn add_unary(&mut self, pred: &str, c: &str) {
        self.constants.insert(c.to_string());
        self.unary.insert((pred.to_string(), c.to_string()));
    }

    pub fn add_binary(&mut self, pred: &str, a: &str, b: &str) {
        self.constants.insert(a.to_string());
        self.constants.insert(b.to_string());
        self.binary
            .insert((pred.to_string(), a.to_string(), b.to_string()));
    }

    pub fn add_fact(&mut self, fact: &Atom) {
        match fact {
            Atom::Unary(p, c) => self.add_unary(p, c),
            Atom::Binary(p, a, b) => self.add_binary(p, a, b),
        }
    }

    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    pub fn unary_facts(&self) -> &BTreeSet<(String, String)> {
        &self.unary
    }

    pub fn binary_facts(&self) -> &BTreeSet<(String, String, String)> {
        &self.binary
    }

    pub fn has_unary(&self, pred: &str, c: &str) -> bool {
        self.unary.contains(&(pred.to_string(), c.to_string()))
    }

    pub fn has_binary(&self, pred: &str, a: &str, b: &str) -> bool {
        self.binary
            .contains(&(pred.to_string(), a.to_string(), b.to_string()))
    }

    pub fn facts(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .unary
            .iter()
            .map(|(p, c)| Atom::Unary(p.clone(), c.clone()))
            .collect();
        out.extend(
            self.binary
                .iter()
                .map(|(p, a, b)| Atom::Binary(p.clone(), a.clone(), b.clone())),
        );
        out
    }

    pub fn len(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty() && self.binary.is_empty()
    }

    pub fn signature(&self) -> Result<Signature, LogicError> {
        let mut sig = Signature::new();
        for (p, _) in &self.unary {
            sig.declare(p, Arity::Unary)?;
        }
        for (p, _, _) in &self.binary {
            sig.declare(p, Arity::Binary)?;
        }
        Ok(sig)
    }
}

impl fmt::Display for DataInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in self.facts() {
            writeln!(f, "{fact}")?;
        }
        Ok(())
    }
}

/// The two variables an existential rule may speak about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleVar {
    X,
    Y,
}

impl fmt::Display for RuleVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleVar::X => "x",
            RuleVar::Y => "y",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `A(x) -> B(x)`
    ConceptInclusion { sub: String, sup: String },
    /// `R(x,y) -> S(x,y)`, or `R(x,y) -> S(y,x)` when `inverted`.
    RoleInclusion {
        sub: String,
        sup: String,
        inverted: bool,
    },
    /// `A(x) -> exists y: atoms`, every binary atom being `R(x,y)` or `R(y,x)`.
    ExistentialRule {
        premise: String,
        conclusion: Vec<Atom<RuleVar>>,
    },
}

impl Axiom {
    pub fn existential(premise: &str, conclusion: Vec<Atom<RuleVar>>) -> Result<Self, LogicError> {
        if conclusion.is_empty() {
            return Err(LogicError::Invalid {
                what: "axiom",
                msg: "existential rule without conclusion atoms".into(),
            });
        }
        for atom in &conclusion {
            if let Atom::Binary(p, s, t) = atom {
                if s == t {
                    return Err(LogicError::Invalid {
                        what: "axiom",
                        msg: format!("binary conclusion atom {p}({s},{t}) must link x and y"),
                    });
                }
            }
        }
        Ok(Axiom::ExistentialRule {
            premise: premise.to_string(),
            conclusion,
        })
    }

    pub fn predicates(&self) -> Vec<(&str, Arity)> {
        match self {
            Axiom::ConceptInclusion { sub, sup } => {
                vec![(sub.as_str(), Arity::Unary), (sup.as_str(), Arity::Unary)]
            }
            Axiom::RoleInclusion { sub, sup, .. } => {
                vec![(sub.as_str(), Arity::Binary), (sup.as_str(), Arity::Binary)]
            }
            Axiom::ExistentialRule {
                premise,
                conclusion,
            } => {
                let mut out = vec![(premise.as_str(), Arity::Unary)];
                out.extend(conclusion.iter().map(|a| (a.predicate(), a.arity())));
                out
            }
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::ConceptInclusion { sub, sup } => write!(f, "{sub}(x) -> {sup}(x)"),
            Axiom::RoleInclusion {
                sub,
                sup,
                inverted: false,
            } => write!(f, "{sub}(x,y) -> {sup}(x,y)"),
            Axiom::RoleInclusion {
                sub,
                sup,
                inverted: true,
            } => write!(f, "{sub}(x,y) -> {sup}(y,x)"),
            Axiom::ExistentialRule {
                premise,
                conclusion,
            } => {
                write!(f, "{premise}(x) -> exists y: ")?;
                for (i, a) in conclusion.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ontology {
    signature: Signature,
    axioms: Vec<Axiom>,
}

impl Ontology {
    /// Builds an ontology whose signature is extended by every predicate the axioms mention.
    pub fn new(mut signature: Signature, axioms: Vec<Axiom>) -> Result<Self, LogicError> {
        for ax in &axioms {
            for (p, arity) in ax.predicates() {
                signature.declare(p, arity)?;
            }
        }
        Ok(Self { signature, axioms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    /// Existential rules in axiom order, as `(axiom index, premise, conclusion)`.
    pub fn existential_rules(&self) -> impl Iterator<Item = (usize, &str, &[Atom<RuleVar>])> {
        self.axioms.iter().enumerate().filter_map(|(i, ax)| match ax {
            Axiom::ExistentialRule {
                premise,
                conclusion,
            } => Some((i, premise.as_str(), conclusion.as_slice())),
            _ => None,
        })
    }

    pub fn without_axiom(&self, index: usize) -> Ontology {
        let mut axioms = self.axioms.clone();
        if index < axioms.len() {
            axioms.remove(index);
        }
        Ontology {
            signature: self.signature.clone(),
            axioms,
        }
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}

/// `q(x⃗) = ∃y⃗ φ(x⃗, y⃗)` with `φ` a conjunction of atoms over variables only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjunctiveQuery {
    answer_vars: Vec<String>,
    existential_vars: BTreeSet<String>,
    atoms: Vec<Atom>,
}

impl ConjunctiveQuery {
    /// Every body variable not in `answer_vars` becomes existential. Duplicate atoms are dropped.
    pub fn new(answer_vars: Vec<String>, atoms: Vec<Atom>) -> Result<Self, LogicError> {
        let mut seen = BTreeSet::new();
        for v in &answer_vars {
            if !seen.insert(v.clone()) {
                return Err(LogicError::DuplicateHeadVariable(v.clone()));
            }
        }
        let mut dedup = Vec::with_capacity(atoms.len());
        let mut atom_set = BTreeSet::new();
        for a in atoms {
            if atom_set.insert(a.clone()) {
                dedup.push(a);
            }
        }
        let mut body_vars = BTreeSet::new();
        let mut sig = Signature::new();
        for a in &dedup {
            sig.declare(a.predicate(), a.arity())?;
            for t in a.terms() {
                body_vars.insert(t.clone());
            }
        }
        for v in &answer_vars {
            if !body_vars.contains(v) {
                return Err(LogicError::HeadVariableNotInBody(v.clone()));
            }
        }
        let existential_vars = body_vars
            .into_iter()
            .filter(|v| !seen.contains(v))
            .collect();
        Ok(Self {
            answer_vars,
            existential_vars,
            atoms: dedup,
        })
    }

    pub fn answer_vars(&self) -> &[String] {
        &self.answer_vars
    }

    pub fn existential_vars(&self) -> &BTreeSet<String> {
        &self.existential_vars
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }

    pub fn is_answer_var(&self, v: &str) -> bool {
        self.answer_vars.iter().any(|a| a == v)
    }

    /// All variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars: BTreeSet<String> = self.existential_vars.clone();
        vars.extend(self.answer_vars.iter().cloned());
        vars
    }

    pub fn num_vars(&self) -> usize {
        self.answer_vars.len() + self.existential_vars.len()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for a in &self.atoms {
            // arity consistency was checked at construction
            let _ = sig.declare(a.predicate(), a.arity());
        }
        sig
    }

    pub fn graph(&self) -> QueryGraph {
        QueryGraph::of(self)
    }

    /// Splits the query into the subqueries induced by connected components of its graph,
    /// each keeping the answer variables it mentions in their original order.
    pub fn components(&self) -> Vec<ConjunctiveQuery> {
        let graph = self.graph();
        let comps = graph.components();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, comp) in comps.iter().enumerate() {
            for v in comp {
                index.insert(v.as_str(), i);
            }
        }
        let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); comps.len()];
        for a in &self.atoms {
            let first = a.terms()[0];
            atoms[index[first.as_str()]].push(a.clone());
        }
        comps
            .iter()
            .zip(atoms)
            .map(|(comp, atoms)| {
                let answers = self
                    .answer_vars
                    .iter()
                    .filter(|v| comp.contains(*v))
                    .cloned()
                    .collect();
                ConjunctiveQuery::new(answers, atoms).expect("component of a valid query")
            })
            .collect()
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({}) :- ", self.answer_vars.join(","))?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
