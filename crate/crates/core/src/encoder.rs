//! Hypergraph programs as ontology-mediated queries over one constant.
//!
//! For a program with vertices `V` and hyperedges `E` the query is
//! `A_v(z_v)` for every vertex and `R_e(z_e, z_v)` for every incidence. Each
//! `A_e` generates a two-step tree in which the whole edge `e` maps below the
//! root, so a query match picks a disjoint set of hyperedges and every
//! vertex outside it must hold `A_v` at the constant.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::chase::{certain_answers, theory_depth};
use crate::hgp::{all_inputs, eval_hgp, normalize_edge_variables, HgpError, HypergraphProgram, Label};
use crate::lex::is_ident_char;
use crate::logic::{Atom, Axiom, ConjunctiveQuery, DataInstance, LogicError, Ontology, RuleVar, Signature};

/// The only constant of encoded data.
pub const CONSTANT: &str = "a";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("program has {value} variables, verification is limited to {bound}")]
    BoundExceeded { value: usize, bound: usize },
    #[error(transparent)]
    Hgp(#[from] HgpError),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// How an input selects the `A_v(a)` facts: one entry per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputMap {
    pub num_vars: usize,
    /// `(predicate A_v, label of v)`
    pub entries: Vec<(String, Label)>,
}

impl InputMap {
    pub fn facts_for(&self, x: &[bool]) -> impl Iterator<Item = &str> + '_ {
        let x = x.to_vec();
        self.entries
            .iter()
            .filter(move |(_, l)| l.eval(&x))
            .map(|(p, _)| p.as_str())
    }
}

impl fmt::Display for InputMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        for (p, l) in &self.entries {
            writeln!(f, "inputmap: {p} <- {l}")?;
        }
        Ok(())
    }
}

pub fn parse_input_map(text: &str) -> Result<InputMap, EncodeError> {
    let mut num_vars = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let err = |msg: String| EncodeError::Syntax { line: i + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(n) = line.strip_prefix("vars ") {
            num_vars = Some(n.trim().parse().map_err(|_| err(format!("bad variable count `{n}`")))?);
            continue;
        }
        let rest = line
            .strip_prefix("inputmap:")
            .ok_or_else(|| err(format!("expected `vars` or `inputmap:`, found `{line}`")))?;
        let (p, l) = rest
            .split_once("<-")
            .ok_or_else(|| err("expected `<predicate> <- <label>`".into()))?;
        let n = num_vars.ok_or_else(|| err("`vars` must come first".into()))?;
        let label = crate::hgp::parse_label_token(l.trim()).ok_or_else(|| err(format!("bad label `{}`", l.trim())))?;
        if label.variable().is_some_and(|k| k >= n) {
            return Err(err(format!("label `{label}` out of range for {n} variables")));
        }
        entries.push((p.trim().to_string(), label));
    }
    Ok(InputMap {
        num_vars: num_vars.unwrap_or(0),
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub ontology: Ontology,
    pub query: ConjunctiveQuery,
    /// `A_e(a)` and `R_e(a,a)` for every hyperedge.
    pub base_data: DataInstance,
    pub input_map: InputMap,
}

/// Identifier-safe, pairwise distinct names for a list of source ids.
fn safe_names(ids: &[&str]) -> Vec<String> {
    let cleaned: Vec<String> = ids
        .iter()
        .map(|id| id.chars().map(|c| if is_ident_char(c) { c } else { '_' }).collect())
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, c) in cleaned.iter().enumerate() {
        let clash = cleaned.iter().filter(|d| *d == c).count() > 1;
        let mut name = if clash { format!("{c}_{i}") } else { c.clone() };
        while !seen.insert(name.clone()) {
            name.push('_');
        }
        out.push(name);
    }
    out
}

/// Edge guards are first replaced by ordinary vertices and edges.
pub fn encode_hgp(h: &HypergraphProgram) -> Encoding {
    let h = normalize_edge_variables(h);
    let vids: Vec<&str> = (0..h.num_vertices()).map(|v| h.vertex_id(v)).collect();
    let eids: Vec<&str> = h.edges().iter().map(|e| e.id.as_str()).collect();
    let vn = safe_names(&vids);
    let en = safe_names(&eids);
    let a_v = |v: usize| format!("Av_{}", vn[v]);
    let a_e = |e: usize| format!("Ae_{}", en[e]);
    let b_e = |e: usize| format!("Be_{}", en[e]);
    let r_e = |e: usize| format!("Re_{}", en[e]);

    let mut axioms = Vec::new();
    let mut sig = Signature::new();
    let mut base = DataInstance::new();
    base.add_constant(CONSTANT);
    for v in 0..h.num_vertices() {
        sig.declare(&a_v(v), crate::logic::Arity::Unary).expect("fresh name");
    }
    for (e, edge) in h.edges().iter().enumerate() {
        let mut conclusion: Vec<Atom<RuleVar>> = (0..h.edges().len())
            .filter(|&f| f != e && h.edges_intersect(e, f))
            .map(|f| Atom::Binary(r_e(f), RuleVar::X, RuleVar::Y))
            .collect();
        conclusion.push(Atom::Unary(b_e(e), RuleVar::Y));
        axioms.push(Axiom::existential(&a_e(e), conclusion).expect("well-formed rule"));
        for &v in &edge.vertices {
            axioms.push(Axiom::ConceptInclusion {
                sub: b_e(e),
                sup: a_v(v),
            });
        }
        axioms.push(
            Axiom::existential(&b_e(e), vec![Atom::Binary(r_e(e), RuleVar::Y, RuleVar::X)]).expect("well-formed rule"),
        );
        base.add_unary(&a_e(e), CONSTANT);
        base.add_binary(&r_e(e), CONSTANT, CONSTANT);
    }
    let ontology = Ontology::new(sig, axioms).expect("names are distinct by construction");

    let mut atoms: Vec<Atom> = (0..h.num_vertices())
        .map(|v| Atom::Unary(a_v(v), format!("zv_{}", vn[v])))
        .collect();
    for (e, edge) in h.edges().iter().enumerate() {
        for &v in &edge.vertices {
            atoms.push(Atom::Binary(r_e(e), format!("ze_{}", en[e]), format!("zv_{}", vn[v])));
        }
    }
    let query = ConjunctiveQuery::new(Vec::new(), atoms).expect("variables only");
    let input_map = InputMap {
        num_vars: h.num_vars(),
        entries: (0..h.num_vertices()).map(|v| (a_v(v), h.label(v))).collect(),
    };
    Encoding {
        ontology,
        query,
        base_data: base,
        input_map,
    }
}

/// `D₀` plus `A_v(a)` for every vertex whose label holds under `x`.
pub fn data_for_input(enc: &Encoding, x: &[bool]) -> Result<DataInstance, EncodeError> {
    if x.len() != enc.input_map.num_vars {
        return Err(HgpError::InputLength {
            expected: enc.input_map.num_vars,
            found: x.len(),
        }
        .into());
    }
    let mut d = enc.base_data.clone();
    for p in enc.input_map.facts_for(x) {
        d.add_unary(p, CONSTANT);
    }
    Ok(d)
}

/// Whether the encoded Boolean query holds over the data for `x`.
pub fn encoded_answer(enc: &Encoding, x: &[bool]) -> Result<bool, EncodeError> {
    let d = data_for_input(enc, x)?;
    Ok(!certain_answers(&d, &enc.ontology, &enc.query).is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingReport {
    pub inputs_checked: usize,
    /// Inputs where the program and the certain answer disagree.
    pub counterexamples: Vec<Vec<bool>>,
    /// `None` for an ontology without existential rules.
    pub ontology_depth: Option<usize>,
}

impl EncodingReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub const DEFAULT_VERIFY_BOUND: usize = 8;

/// Compares the program with the certain answers of its encoding on every input.
pub fn verify_encoding(h: &HypergraphProgram, max_vars: usize) -> Result<EncodingReport, EncodeError> {
    if h.num_vars() > max_vars {
        return Err(EncodeError::BoundExceeded {
            value: h.num_vars(),
            bound: max_vars,
        });
    }
    let enc = encode_hgp(h);
    let mut report = EncodingReport {
        inputs_checked: 0,
        counterexamples: Vec::new(),
        ontology_depth: if enc.ontology.existential_rules().next().is_some() {
            theory_depth(&enc.ontology)
        } else {
            Some(0)
        },
    };
    for x in all_inputs(h.num_vars()) {
        report.inputs_checked += 1;
        if eval_hgp(h, &x)? != encoded_answer(&enc, &x)? {
            report.counterexamples.push(x);
        }
    }
    Ok(report)
}

impl From<LogicError> for EncodeError {
    fn from(e: LogicError) -> Self {
        EncodeError::Syntax {
            line: 0,
            msg: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::universal_tree;
    use crate::hgp::parse_hgp;
    use crate::logic::{parse_ontology, parse_query};

    const WORKED: &str = "vars 3\nvertex u x1\nvertex v x2\nvertex w x3\nedge e1 u v\nedge e2 v w\n";

    #[test]
    fn small_program_shape() {
        let h = parse_hgp("vars 2\nvertex u x1\nvertex v x2\nedge e u v\n").unwrap();
        let enc = encode_hgp(&h);
        let sig = enc.ontology.signature();
        assert_eq!(sig.unary_predicates().len(), 4);
        assert_eq!(sig.binary_predicates().len(), 1);
        assert_eq!(enc.query.num_vars(), 3);
        // two vertex atoms and one edge atom per incidence
        assert_eq!(enc.query.atoms().len(), 4);
        assert!(enc.query.is_boolean());
        assert_eq!(enc.query.to_string(), "q() :- Av_u(zv_u), Av_v(zv_v), Re_e(ze_e,zv_u), Re_e(ze_e,zv_v)");
    }

    #[test]
    fn text_round_trip() {
        let enc = encode_hgp(&parse_hgp(WORKED).unwrap());
        assert_eq!(parse_ontology(&enc.ontology.to_string()).unwrap(), enc.ontology);
        assert_eq!(parse_query(&enc.query.to_string()).unwrap(), enc.query);
        assert_eq!(parse_input_map(&enc.input_map.to_string()).unwrap(), enc.input_map);
    }

    #[test]
    fn empty_program_is_trivially_true() {
        let h = HypergraphProgram::new(0);
        let enc = encode_hgp(&h);
        assert!(enc.query.atoms().is_empty());
        assert!(encoded_answer(&enc, &[]).unwrap());
        assert!(verify_encoding(&h, DEFAULT_VERIFY_BOUND).unwrap().passed());
    }

    #[test]
    fn edge_trees_have_three_elements() {
        let enc = encode_hgp(&parse_hgp(WORKED).unwrap());
        for e in ["e1", "e2"] {
            let t = universal_tree(&format!("Ae_{e}"), &enc.ontology, 2);
            assert_eq!(t.len(), 3, "{}", t.model().dump());
        }
        assert_eq!(theory_depth(&enc.ontology), Some(2));
        let t = universal_tree("Ae_e1", &enc.ontology, 2).model().dump();
        for needle in ["Re_e2", "Be_e1", "Av_u", "Av_v", "Re_e1"] {
            assert!(t.contains(needle), "{needle} missing from\n{t}");
        }
    }

    #[test]
    fn worked_example_agrees_everywhere() {
        let h = parse_hgp(WORKED).unwrap();
        let r = verify_encoding(&h, DEFAULT_VERIFY_BOUND).unwrap();
        assert_eq!(r.inputs_checked, 8);
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert_eq!(r.ontology_depth, Some(2));
        let enc = encode_hgp(&h);
        assert!(!encoded_answer(&enc, &[false, true, false]).unwrap());
        assert!(encoded_answer(&enc, &[true, true, true]).unwrap());
    }

    #[test]
    fn uncoverable_zero() {
        let h = parse_hgp("vars 1\nvertex u x1\nvertex lone 0\nedge e u\n").unwrap();
        let enc = encode_hgp(&h);
        assert!(!encoded_answer(&enc, &[false]).unwrap());
        assert!(!encoded_answer(&enc, &[true]).unwrap());
        assert!(verify_encoding(&h, 8).unwrap().passed());
    }

    #[test]
    fn b_facts_never_appear() {
        let enc = encode_hgp(&parse_hgp(WORKED).unwrap());
        for x in all_inputs(3) {
            let d = data_for_input(&enc, &x).unwrap();
            assert!(d.unary_facts().iter().all(|(p, _)| !p.starts_with("Be_")));
            assert_eq!(d.constants().len(), 1);
        }
    }

    #[test]
    fn guarded_edges_and_odd_ids() {
        let h = parse_hgp("vars 2\nvertex u 0\nvertex v x1\nedge e u v\nedgevar e x2\n").unwrap();
        assert!(verify_encoding(&h, 8).unwrap().passed());
        assert_eq!(safe_names(&["e'", "e_", "f"]), vec!["e__0", "e__1", "f"]);
    }

    #[test]
    fn bound_is_enforced() {
        let h = HypergraphProgram::new(9);
        assert!(matches!(verify_encoding(&h, 8), Err(EncodeError::BoundExceeded { value: 9, bound: 8 })));
        assert!(data_for_input(&encode_hgp(&h), &[true]).is_err());
    }
}
