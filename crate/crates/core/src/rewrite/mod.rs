//! Tree-witness rewritings of conjunctive queries into positive existential
//! formulas and nonrecursive datalog.

mod ndl;
mod pe;
mod saturation;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use ndl::{eval_ndl, parse_ndl, pe_to_ndl, NdlAtom, NdlProgram, NdlRule};
pub use pe::{eval_pe, parse_pe, PeFormula, PeQuery};
pub use saturation::Saturation;
pub use witness::{
    count_independent_sets, default_tree_depth, independent_sets, tree_witnesses, tree_witnesses_bounded,
    TreeWitness,
};

use crate::logic::{ConjunctiveQuery, Ontology};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsafe formula: {0}")]
    Unsafe(String),
    #[error("predicate `{predicate}` used with arity {found}, expected {expected}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("program is recursive through `{0}`")]
    Cyclic(String),
}

#[derive(Clone, Debug, Default)]
pub struct RewriteOptions {
    /// Depth of the universal trees searched for witnesses; defaults to
    /// [`default_tree_depth`].
    pub tree_depth: Option<usize>,
    /// Largest inner set considered; defaults to the number of query variables.
    pub max_inner: Option<usize>,
    /// Saturate atoms as if this axiom were absent. Only for fault injection.
    pub saturation_without: Option<usize>,
}

/// A PE-rewriting with the witnesses it was built from.
#[derive(Clone, Debug)]
pub struct PeRewriting {
    pub query: PeQuery,
    pub witnesses: Vec<TreeWitness>,
    pub disjuncts: usize,
}

pub fn pe_rewriting(q: &ConjunctiveQuery, ontology: &Ontology) -> PeRewriting {
    pe_rewriting_with(q, ontology, &RewriteOptions::default())
}

fn saturation_for(q: &ConjunctiveQuery, ontology: &Ontology, opts: &RewriteOptions) -> Saturation {
    match opts.saturation_without {
        Some(i) => Saturation::new(&ontology.without_axiom(i), &q.signature()),
        None => Saturation::new(ontology, &q.signature()),
    }
}

fn witnesses_for(q: &ConjunctiveQuery, ontology: &Ontology, opts: &RewriteOptions) -> Vec<TreeWitness> {
    let depth = opts.tree_depth.unwrap_or_else(|| default_tree_depth(q, ontology));
    tree_witnesses_bounded(q, ontology, depth, opts.max_inner.unwrap_or(q.num_vars()))
}

/// One disjunct per independent set of tree witnesses, in lexicographic order
/// of the sets.
pub fn pe_rewriting_with(q: &ConjunctiveQuery, ontology: &Ontology, opts: &RewriteOptions) -> PeRewriting {
    let sat = saturation_for(q, ontology, opts);
    let witnesses = witnesses_for(q, ontology, opts);
    let disjuncts: Vec<PeFormula> = independent_sets(&witnesses)
        .iter()
        .map(|set| {
            let chosen: Vec<&TreeWitness> = set.iter().map(|&i| &witnesses[i]).collect();
            disjunct(q, &chosen, &sat)
        })
        .collect();
    let n = disjuncts.len();
    let query = PeQuery::new(q.answer_vars().to_vec(), PeFormula::or(disjuncts))
        .expect("rewriting disjuncts mention exactly the answer variables");
    PeRewriting {
        query,
        witnesses,
        disjuncts: n,
    }
}

/// The disjunct for an independent set: uncovered atoms saturated, each
/// witness replaced by its root condition at the point its boundary collapses to.
fn disjunct(q: &ConjunctiveQuery, chosen: &[&TreeWitness], sat: &Saturation) -> PeFormula {
    // union-find over variables, answer variables preferred as representatives
    let mut rep: BTreeMap<String, String> = q.variables().into_iter().map(|v| (v.clone(), v)).collect();
    let rank = |v: &str| -> (usize, String) {
        match q.answer_vars().iter().position(|a| a == v) {
            Some(i) => (i, String::new()),
            None => (usize::MAX, v.to_string()),
        }
    };
    fn find(rep: &BTreeMap<String, String>, v: &str) -> String {
        let mut v = v.to_string();
        while rep[&v] != v {
            v = rep[&v].clone();
        }
        v
    }
    for t in chosen {
        let mut it = t.boundary.iter();
        if let Some(first) = it.next() {
            for other in it {
                let (a, b) = (find(&rep, first), find(&rep, other));
                if a != b {
                    let (keep, drop) = if rank(&a) <= rank(&b) { (a, b) } else { (b, a) };
                    rep.insert(drop, keep);
                }
            }
        }
    }

    let mut conjuncts: Vec<PeFormula> = Vec::new();
    let push = |f: PeFormula, conjuncts: &mut Vec<PeFormula>| {
        if !conjuncts.contains(&f) {
            conjuncts.push(f);
        }
    };
    for a in q.answer_vars() {
        let r = find(&rep, a);
        if &r != a {
            push(PeFormula::Eq(r, a.clone()), &mut conjuncts);
        }
    }
    let covered: BTreeSet<usize> = chosen.iter().flat_map(|t| t.covered.iter().copied()).collect();
    for (i, atom) in q.atoms().iter().enumerate() {
        if !covered.contains(&i) {
            push(sat.atom(&atom.map_terms(|v| find(&rep, v))), &mut conjuncts);
        }
    }
    let vars = q.variables();
    let mut fresh = 0;
    for t in chosen {
        let anchor = match t.boundary.iter().next() {
            Some(b) => find(&rep, b),
            None => loop {
                fresh += 1;
                let w = format!("w{fresh}");
                if !vars.contains(&w) {
                    break w;
                }
            },
        };
        push(sat.root_condition(&t.generators, &anchor), &mut conjuncts);
    }

    let body = PeFormula::and(conjuncts);
    let bound: Vec<String> = body
        .free_vars()
        .into_iter()
        .filter(|v| !q.is_answer_var(v))
        .collect();
    PeFormula::exists(bound, body)
}

/// An NDL-rewriting built per connected component of the query and joined by
/// the goal rule, so independent components do not multiply out.
pub fn ndl_rewriting(q: &ConjunctiveQuery, ontology: &Ontology) -> NdlProgram {
    ndl_rewriting_with(q, ontology, &RewriteOptions::default())
}

pub fn ndl_rewriting_with(q: &ConjunctiveQuery, ontology: &Ontology, opts: &RewriteOptions) -> NdlProgram {
    let parts: Vec<PeQuery> = q
        .components()
        .iter()
        .map(|c| pe_rewriting_with(c, ontology, opts).query)
        .collect();
    let mut used = BTreeSet::new();
    for p in &parts {
        used.extend(ndl::names_in(&p.formula));
    }
    let mut names = ndl::FreshNames::new(used);
    let goal = names.named("G");
    let tops: Vec<String> = parts.iter().map(|_| names.named("F")).collect();
    let mut tr = ndl::Translator {
        names: &mut names,
        rules: Vec::new(),
    };
    let mut body = Vec::new();
    for (p, top) in parts.iter().zip(tops) {
        body.push(tr.atom_for(&p.formula, Some(top)).expect("rewritings are safe"));
    }
    let mut rules = tr.rules;
    rules.push(NdlRule {
        head: NdlAtom::new(&goal, q.answer_vars().to_vec()),
        body,
    });
    NdlProgram::new(rules, goal, q.answer_vars().len()).expect("translation yields a valid program")
}
