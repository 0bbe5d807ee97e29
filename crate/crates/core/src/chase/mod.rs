//! Bounded universal models.
//!
//! The chase starts from the data, closes labels and edges under the
//! inclusion axioms, and gives every element one fresh child per existential
//! rule whose premise it satisfies. A child's labels and its edges to the
//! parent are fixed by the generating rule alone, so the subtree below an
//! anonymous element depends only on that rule. Children are not created
//! past `depth_limit`; the model then records that it was truncated.

mod hom;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::logic::{Atom, Axiom, DataInstance, Ontology, RuleVar};

pub use hom::{
    answers_in_model, certain_answers, certain_answers_at_depth, find_homomorphism,
    homomorphism_exists, oracle_depth, Answers,
};

pub type ElemId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Constant,
    Anonymous {
        /// Premise predicate of the generating rule.
        generator: String,
        /// Axiom index of the generating rule.
        rule: usize,
        parent: ElemId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub depth: usize,
    pub kind: ElementKind,
}

impl Element {
    pub fn is_constant(&self) -> bool {
        self.kind == ElementKind::Constant
    }
}

/// Closure tables derived from an ontology.
#[derive(Clone, Debug, Default)]
pub(crate) struct Closure {
    /// `A -> B` for concept inclusions and x-side unary atoms of existential rules.
    pub concept: BTreeMap<String, Vec<String>>,
    /// `R -> (S, inverted)`.
    pub role: BTreeMap<String, Vec<(String, bool)>>,
}

impl Closure {
    pub fn of(ontology: &Ontology) -> Self {
        let mut c = Closure::default();
        for ax in ontology.axioms() {
            match ax {
                Axiom::ConceptInclusion { sub, sup } => {
                    c.concept.entry(sub.clone()).or_default().push(sup.clone())
                }
                Axiom::RoleInclusion { sub, sup, inverted } => c
                    .role
                    .entry(sub.clone())
                    .or_default()
                    .push((sup.clone(), *inverted)),
                Axiom::ExistentialRule {
                    premise,
                    conclusion,
                } => {
                    for atom in conclusion {
                        if let Atom::Unary(p, RuleVar::X) = atom {
                            c.concept.entry(premise.clone()).or_default().push(p.clone());
                        }
                    }
                }
            }
        }
        c
    }

    /// Every unary predicate entailed at an element carrying `pred` (including `pred`).
    pub fn unary_closure(&self, pred: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![pred.to_string()];
        while let Some(p) = stack.pop() {
            if out.insert(p.clone()) {
                if let Some(sups) = self.concept.get(&p) {
                    stack.extend(sups.iter().cloned());
                }
            }
        }
        out
    }

    /// Every `(S, inverted)` such that `R(a,b)` entails `S(a,b)` (or `S(b,a)` when inverted).
    pub fn role_closure(&self, pred: &str) -> BTreeSet<(String, bool)> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(pred.to_string(), false)];
        while let Some((p, inv)) = stack.pop() {
            if out.insert((p.clone(), inv)) {
                if let Some(sups) = self.role.get(&p) {
                    for (s, i) in sups {
                        stack.push((s.clone(), inv ^ i));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct UniversalModel {
    elements: Vec<Element>,
    by_name: HashMap<String, ElemId>,
    labels: Vec<BTreeSet<String>>,
    edges: BTreeSet<(String, ElemId, ElemId)>,
    succ: HashMap<(String, ElemId), Vec<ElemId>>,
    pred: HashMap<(String, ElemId), Vec<ElemId>>,
    by_label: HashMap<String, Vec<ElemId>>,
    depth_limit: usize,
    truncated: bool,
}

impl UniversalModel {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: ElemId) -> &Element {
        &self.elements[id]
    }

    pub fn id_of(&self, name: &str) -> Option<ElemId> {
        self.by_name.get(name).copied()
    }

    pub fn labels(&self, id: ElemId) -> &BTreeSet<String> {
        &self.labels[id]
    }

    pub fn has_label(&self, id: ElemId, pred: &str) -> bool {
        self.labels[id].contains(pred)
    }

    pub fn has_edge(&self, pred: &str, s: ElemId, t: ElemId) -> bool {
        self.succ
            .get(&(pred.to_string(), s))
            .is_some_and(|v| v.contains(&t))
    }

    pub fn successors(&self, pred: &str, s: ElemId) -> &[ElemId] {
        self.succ
            .get(&(pred.to_string(), s))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn predecessors(&self, pred: &str, t: ElemId) -> &[ElemId] {
        self.pred
            .get(&(pred.to_string(), t))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn with_label(&self, pred: &str) -> &[ElemId] {
        self.by_label.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edges(&self) -> &BTreeSet<(String, ElemId, ElemId)> {
        &self.edges
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn constants(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_constant())
            .map(|(i, _)| i)
    }

    /// Greatest depth of any anonymous element (0 if there are none).
    pub fn max_depth(&self) -> usize {
        self.elements.iter().map(|e| e.depth).max().unwrap_or(0)
    }

    /// Sorted `elem`/`edge` lines, used for golden comparisons.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let labels: Vec<&str> = self.labels[i].iter().map(String::as_str).collect();
                format!("elem {} depth={} labels={}", e.name, e.depth, labels.join(","))
            })
            .collect();
        lines.extend(self.edges.iter().map(|(p, s, t)| {
            format!("edge {p} {} {}", self.elements[*s].name, self.elements[*t].name)
        }));
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

struct Builder<'a> {
    closure: &'a Closure,
    elements: Vec<Element>,
    by_name: HashMap<String, ElemId>,
    labels: Vec<BTreeSet<String>>,
    edges: BTreeSet<(String, ElemId, ElemId)>,
}

impl Builder<'_> {
    fn add_element(&mut self, name: String, depth: usize, kind: ElementKind) -> ElemId {
        let id = self.elements.len();
        self.by_name.insert(name.clone(), id);
        self.elements.push(Element { name, depth, kind });
        self.labels.push(BTreeSet::new());
        id
    }

    fn add_label(&mut self, e: ElemId, pred: &str) {
        if self.labels[e].contains(pred) {
            return;
        }
        let closed = self.closure.unary_closure(pred);
        self.labels[e].extend(closed);
    }

    fn add_edge(&mut self, pred: &str, s: ElemId, t: ElemId) {
        for (p, inv) in self.closure.role_closure(pred) {
            let edge = if inv { (p, t, s) } else { (p, s, t) };
            self.edges.insert(edge);
        }
    }
}

/// Rule data pre-split by the position of each conclusion atom.
struct Rule<'a> {
    index: usize,
    premise: &'a str,
    conclusion: &'a [Atom<RuleVar>],
}

pub fn chase(data: &DataInstance, ontology: &Ontology, depth_limit: usize) -> UniversalModel {
    let closure = Closure::of(ontology);
    let rules: Vec<Rule> = ontology
        .existential_rules()
        .map(|(index, premise, conclusion)| Rule {
            index,
            premise,
            conclusion,
        })
        .collect();
    let mut b = Builder {
        closure: &closure,
        elements: Vec::new(),
        by_name: HashMap::new(),
        labels: Vec::new(),
        edges: BTreeSet::new(),
    };
    for c in data.constants() {
        b.add_element(c.clone(), 0, ElementKind::Constant);
    }
    for (p, c) in data.unary_facts() {
        let id = b.by_name[c];
        b.add_label(id, p);
    }
    for (p, s, t) in data.binary_facts() {
        let (s, t) = (b.by_name[s], b.by_name[t]);
        b.add_edge(p, s, t);
    }

    // Labels of an element are final once it exists, so one pass in creation order suffices.
    let mut truncated = false;
    let mut next = 0;
    while next < b.elements.len() {
        let e = next;
        next += 1;
        for rule in &rules {
            if !b.labels[e].contains(rule.premise) {
                continue;
            }
            let depth = b.elements[e].depth;
            if depth >= depth_limit {
                truncated = true;
                continue;
            }
            let name = format!("{}/{}#{}", b.elements[e].name, rule.premise, rule.index);
            let child = b.add_element(
                name,
                depth + 1,
                ElementKind::Anonymous {
                    generator: rule.premise.to_string(),
                    rule: rule.index,
                    parent: e,
                },
            );
            for atom in rule.conclusion {
                let pick = |v: &RuleVar| match v {
                    RuleVar::X => e,
                    RuleVar::Y => child,
                };
                match atom {
                    Atom::Unary(p, RuleVar::Y) => b.add_label(child, p),
                    // x-side labels are already part of the concept closure
                    Atom::Unary(_, RuleVar::X) => {}
                    Atom::Binary(p, s, t) => b.add_edge(p, pick(s), pick(t)),
                }
            }
        }
    }

    let mut succ: HashMap<(String, ElemId), Vec<ElemId>> = HashMap::new();
    let mut pred: HashMap<(String, ElemId), Vec<ElemId>> = HashMap::new();
    for (p, s, t) in &b.edges {
        succ.entry((p.clone(), *s)).or_default().push(*t);
        pred.entry((p.clone(), *t)).or_default().push(*s);
    }
    let mut by_label: HashMap<String, Vec<ElemId>> = HashMap::new();
    for (i, ls) in b.labels.iter().enumerate() {
        for l in ls {
            by_label.entry(l.clone()).or_default().push(i);
        }
    }
    UniversalModel {
        elements: b.elements,
        by_name: b.by_name,
        labels: b.labels,
        edges: b.edges,
        succ,
        pred,
        by_label,
        depth_limit,
        truncated,
    }
}

/// `M_A`: the chase of the single fact `A(a)`.
#[derive(Clone, Debug)]
pub struct UniversalTree {
    generator: String,
    model: UniversalModel,
}

/// Name of the root constant of every universal tree.
pub const TREE_ROOT: &str = "a";

impl UniversalTree {
    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn root(&self) -> ElemId {
        0
    }

    pub fn model(&self) -> &UniversalModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.model.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn universal_tree(generator: &str, ontology: &Ontology, depth_limit: usize) -> UniversalTree {
    let mut data = DataInstance::new();
    data.add_unary(generator, TREE_ROOT);
    UniversalTree {
        generator: generator.to_string(),
        model: chase(&data, ontology, depth_limit),
    }
}

/// Number of existential steps the ontology can take from any data, or `None`
/// when some chain of existential rules can repeat forever.
pub fn theory_depth(ontology: &Ontology) -> Option<usize> {
    let closure = Closure::of(ontology);
    let rules: Vec<(&str, BTreeSet<String>)> = ontology
        .existential_rules()
        .map(|(_, premise, conclusion)| {
            let mut child_labels = BTreeSet::new();
            for atom in conclusion {
                if let Atom::Unary(p, RuleVar::Y) = atom {
                    child_labels.extend(closure.unary_closure(p));
                }
            }
            (premise, child_labels)
        })
        .collect();
    // rule i enables rule j when j's premise labels i's fresh child
    let enables = |i: usize, j: usize| rules[i].1.contains(rules[j].0);
    let n = rules.len();
    let mut memo: Vec<Option<usize>> = vec![None; n];
    let mut on_stack = vec![false; n];
    fn longest(
        i: usize,
        n: usize,
        enables: &dyn Fn(usize, usize) -> bool,
        memo: &mut [Option<usize>],
        on_stack: &mut [bool],
    ) -> Option<usize> {
        if let Some(d) = memo[i] {
            return Some(d);
        }
        if on_stack[i] {
            return None;
        }
        on_stack[i] = true;
        let mut best = 1;
        for j in 0..n {
            if enables(i, j) {
                best = best.max(1 + longest(j, n, enables, memo, on_stack)?);
            }
        }
        on_stack[i] = false;
        memo[i] = Some(best);
        Some(best)
    }
    let mut depth = 0;
    for i in 0..n {
        depth = depth.max(longest(i, n, &enables, &mut memo, &mut on_stack)?);
    }
    Some(depth)
}
