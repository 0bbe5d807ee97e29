use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::chase::{find_homomorphism, universal_tree, UniversalTree};
use crate::logic::{Atom, ConjunctiveQuery, Ontology};

/// A connected set of existential variables that can be sent into the
/// anonymous part of a universal tree, with its neighbours at the root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeWitness {
    pub inner: BTreeSet<String>,
    pub boundary: BTreeSet<String>,
    /// Indices into `q.atoms()` of the atoms with an inner variable.
    pub covered: BTreeSet<usize>,
    pub generators: BTreeSet<String>,
}

impl TreeWitness {
    pub fn covered_atoms<'a>(&self, q: &'a ConjunctiveQuery) -> Vec<&'a Atom> {
        self.covered.iter().map(|&i| &q.atoms()[i]).collect()
    }

    /// Two witnesses can be used together iff they share no atom.
    pub fn conflicts_with(&self, other: &TreeWitness) -> bool {
        self.covered.intersection(&other.covered).next().is_some()
    }
}

/// Universal trees of every unary predicate whose tree has an anonymous element.
pub(crate) fn generating_trees(ontology: &Ontology, depth: usize) -> BTreeMap<String, UniversalTree> {
    ontology
        .signature()
        .unary_predicates()
        .iter()
        .map(|a| (a.clone(), universal_tree(a, ontology, depth)))
        .filter(|(_, t)| t.len() > 1)
        .collect()
}

/// Default depth of the trees witnesses are searched in: enough for any
/// connected image, anchored at the root or not.
pub fn default_tree_depth(q: &ConjunctiveQuery, ontology: &Ontology) -> usize {
    q.num_vars() + ontology.existential_rules().count()
}

/// Every tree witness of `q`, sorted by inner set.
///
/// Inner sets are connected sets of existential variables of size at most
/// `max_inner`; a witness is kept when some universal tree (truncated at
/// `tree_depth`) admits a homomorphism of its covered atoms sending the
/// boundary to the root and the inner variables elsewhere.
pub fn tree_witnesses_bounded(
    q: &ConjunctiveQuery,
    ontology: &Ontology,
    tree_depth: usize,
    max_inner: usize,
) -> Vec<TreeWitness> {
    let trees = generating_trees(ontology, tree_depth);
    if trees.is_empty() {
        return Vec::new();
    }
    let graph = q.graph();
    let adj = graph.neighbours();
    let candidates: BTreeSet<&str> = q.existential_vars().iter().map(String::as_str).collect();

    let mut seen: BTreeSet<BTreeSet<&str>> = BTreeSet::new();
    let mut stack: Vec<BTreeSet<&str>> = candidates.iter().map(|v| BTreeSet::from([*v])).collect();
    while let Some(set) = stack.pop() {
        if set.len() > max_inner || seen.contains(&set) {
            continue;
        }
        for v in &set {
            for w in &adj[v] {
                if candidates.contains(w) && !set.contains(w) {
                    let mut bigger = set.clone();
                    bigger.insert(w);
                    stack.push(bigger);
                }
            }
        }
        seen.insert(set);
    }

    let mut out = Vec::new();
    for inner in seen {
        let boundary: BTreeSet<&str> = inner
            .iter()
            .flat_map(|v| adj[v].iter().copied())
            .filter(|w| !inner.contains(w))
            .collect();
        let covered: BTreeSet<usize> = q
            .atoms()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.terms().iter().any(|t| inner.contains(t.as_str())))
            .map(|(i, _)| i)
            .collect();
        let atoms: Vec<Atom> = covered.iter().map(|&i| q.atoms()[i].clone()).collect();
        let generators: BTreeSet<String> = trees
            .iter()
            .filter(|(_, tree)| {
                let fixed: HashMap<String, usize> = boundary.iter().map(|v| (v.to_string(), tree.root())).collect();
                let root = tree.root();
                find_homomorphism(&atoms, tree.model(), &fixed, &|_, e| e != root).is_some()
            })
            .map(|(a, _)| a.clone())
            .collect();
        if !generators.is_empty() {
            out.push(TreeWitness {
                inner: inner.iter().map(|v| v.to_string()).collect(),
                boundary: boundary.iter().map(|v| v.to_string()).collect(),
                covered,
                generators,
            });
        }
    }
    out.sort();
    out
}

/// [`tree_witnesses_bounded`] with inner sets up to the number of query variables.
pub fn tree_witnesses(q: &ConjunctiveQuery, ontology: &Ontology, tree_depth: usize) -> Vec<TreeWitness> {
    tree_witnesses_bounded(q, ontology, tree_depth, q.num_vars())
}

/// Subsets of pairwise non-conflicting witnesses as sorted index lists, in
/// lexicographic order (the empty set first).
pub fn independent_sets(witnesses: &[TreeWitness]) -> Vec<Vec<usize>> {
    let conflict = conflict_matrix(witnesses);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn grow(start: usize, conflict: &[Vec<bool>], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(current.clone());
        for i in start..conflict.len() {
            if current.iter().all(|&j| !conflict[i][j]) {
                current.push(i);
                grow(i + 1, conflict, current, out);
                current.pop();
            }
        }
    }
    grow(0, &conflict, &mut current, &mut out);
    out
}

/// Number of independent subsets, without listing them: the product over
/// connected components of the conflict graph.
pub fn count_independent_sets(witnesses: &[TreeWitness]) -> u128 {
    let conflict = conflict_matrix(witnesses);
    let n = witnesses.len();
    let mut comp = vec![usize::MAX; n];
    let mut total: u128 = 1;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut members = vec![s];
        comp[s] = s;
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            k += 1;
            for v in 0..n {
                if conflict[u][v] && comp[v] == usize::MAX {
                    comp[v] = s;
                    members.push(v);
                }
            }
        }
        total *= count_in(&members, &conflict, 0, &mut Vec::new());
    }
    total
}

fn count_in(members: &[usize], conflict: &[Vec<bool>], start: usize, chosen: &mut Vec<usize>) -> u128 {
    let mut total = 1;
    for k in start..members.len() {
        let i = members[k];
        if chosen.iter().all(|&j| !conflict[i][j]) {
            chosen.push(i);
            total += count_in(members, conflict, k + 1, chosen);
            chosen.pop();
        }
    }
    total
}

fn conflict_matrix(witnesses: &[TreeWitness]) -> Vec<Vec<bool>> {
    witnesses
        .iter()
        .map(|a| witnesses.iter().map(|b| a.conflicts_with(b)).collect())
        .collect()
}
