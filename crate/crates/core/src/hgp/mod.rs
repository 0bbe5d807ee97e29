//! Hypergraph programs: a labelled hypergraph computes 1 on an input when
//! some set of pairwise disjoint hyperedges covers every vertex whose label
//! evaluates to 0.

mod format;
mod structure;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use format::parse_hgp;
pub(crate) use format::{parse_label as parse_label_token};
pub use structure::{check_path_program, check_tree_program, StructureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HgpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate {kind} `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },
    #[error("variable x{} out of range for {n} variables", .index + 1)]
    VariableOutOfRange { index: usize, n: usize },
    #[error("hyperedge `{0}` is empty")]
    EmptyEdge(String),
    #[error("input has {found} bits, program expects {expected}")]
    InputLength { expected: usize, found: usize },
}

/// Vertex label; variable indices are 0-based (`x1` in files is index 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Var(usize),
    NegVar(usize),
    Const0,
    Const1,
}

impl Label {
    pub fn eval(self, x: &[bool]) -> bool {
        match self {
            Label::Var(i) => x[i],
            Label::NegVar(i) => !x[i],
            Label::Const0 => false,
            Label::Const1 => true,
        }
    }

    pub fn variable(self) -> Option<usize> {
        match self {
            Label::Var(i) | Label::NegVar(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Var(i) => write!(f, "x{}", i + 1),
            Label::NegVar(i) => write!(f, "!x{}", i + 1),
            Label::Const0 => f.write_str("0"),
            Label::Const1 => f.write_str("1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub id: String,
    /// Vertex indices, sorted and distinct.
    pub vertices: Vec<usize>,
    /// Optional variable that must be 1 for the edge to be usable.
    pub guard: Option<usize>,
}

/// Declared shape for the path/tree validators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Order(Vec<usize>),
    Tree(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergraphProgram {
    num_vars: usize,
    vertex_ids: Vec<String>,
    labels: Vec<Label>,
    index: BTreeMap<String, usize>,
    edges: Vec<Hyperedge>,
    edge_index: BTreeMap<String, usize>,
    structure: Option<Structure>,
}

impl HypergraphProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            vertex_ids: Vec::new(),
            labels: Vec::new(),
            index: BTreeMap::new(),
            edges: Vec::new(),
            edge_index: BTreeMap::new(),
            structure: None,
        }
    }

    fn check_var(&self, i: usize) -> Result<(), HgpError> {
        if i < self.num_vars {
            Ok(())
        } else {
            Err(HgpError::VariableOutOfRange { index: i, n: self.num_vars })
        }
    }

    pub fn add_vertex(&mut self, id: &str, label: Label) -> Result<usize, HgpError> {
        if let Some(i) = label.variable() {
            self.check_var(i)?;
        }
        if self.index.contains_key(id) {
            return Err(HgpError::Duplicate {
                kind: "vertex",
                id: id.to_string(),
            });
        }
        let v = self.labels.len();
        self.vertex_ids.push(id.to_string());
        self.labels.push(label);
        self.index.insert(id.to_string(), v);
        Ok(v)
    }

    pub fn add_edge<S: AsRef<str>>(&mut self, id: &str, vertex_ids: &[S]) -> Result<usize, HgpError> {
        let mut vs = Vec::with_capacity(vertex_ids.len());
        for v in vertex_ids {
            vs.push(self.vertex(v.as_ref())?);
        }
        self.add_edge_by_index(id, vs)
    }

    pub fn add_edge_by_index(&mut self, id: &str, mut vertices: Vec<usize>) -> Result<usize, HgpError> {
        if self.edge_index.contains_key(id) {
            return Err(HgpError::Duplicate {
                kind: "hyperedge",
                id: id.to_string(),
            });
        }
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(HgpError::EmptyEdge(id.to_string()));
        }
        assert!(vertices.iter().all(|&v| v < self.labels.len()), "vertex index out of range");
        let e = self.edges.len();
        self.edges.push(Hyperedge {
            id: id.to_string(),
            vertices,
            guard: None,
        });
        self.edge_index.insert(id.to_string(), e);
        Ok(e)
    }

    /// Makes edge `e` usable only when variable `var` is 1.
    pub fn set_edge_var(&mut self, e: usize, var: usize) -> Result<(), HgpError> {
        self.check_var(var)?;
        self.edges[e].guard = Some(var);
        Ok(())
    }

    pub fn declare(&mut self, structure: Structure) {
        self.structure = Some(structure);
    }

    pub fn vertex(&self, id: &str) -> Result<usize, HgpError> {
        self.index.get(id).copied().ok_or_else(|| HgpError::Unknown {
            kind: "vertex",
            id: id.to_string(),
        })
    }

    pub fn edge(&self, id: &str) -> Result<usize, HgpError> {
        self.edge_index.get(id).copied().ok_or_else(|| HgpError::Unknown {
            kind: "hyperedge",
            id: id.to_string(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn structure(&self) -> Option<&Structure> {
        self.structure.as_ref()
    }

    pub fn has_edge_vars(&self) -> bool {
        self.edges.iter().any(|e| e.guard.is_some())
    }

    /// `|V| + |E|`.
    pub fn size(&self) -> usize {
        self.labels.len() + self.edges.len()
    }

    /// Edges containing each vertex, in edge order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.labels.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in &edge.vertices {
                inc[v].push(e);
            }
        }
        inc
    }

    /// Largest number of hyperedges sharing a vertex.
    pub fn degree(&self) -> usize {
        self.incidence().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_monotone(&self) -> bool {
        !self.labels.iter().any(|l| matches!(l, Label::NegVar(_)))
    }

    pub fn edges_intersect(&self, a: usize, b: usize) -> bool {
        let (ea, eb) = (&self.edges[a].vertices, &self.edges[b].vertices);
        ea.iter().any(|v| eb.binary_search(v).is_ok())
    }

    fn check_input(&self, x: &[bool]) -> Result<(), HgpError> {
        if x.len() == self.num_vars {
            Ok(())
        } else {
            Err(HgpError::InputLength {
                expected: self.num_vars,
                found: x.len(),
            })
        }
    }
}

/// Backtracking cover search: repeatedly take the lowest uncovered zero
/// vertex and try each usable incident edge that avoids the current cover.
pub fn eval_hgp(h: &HypergraphProgram, x: &[bool]) -> Result<bool, HgpError> {
    h.check_input(x)?;
    let inc = h.incidence();
    let usable: Vec<bool> = h.edges.iter().map(|e| e.guard.is_none_or(|g| x[g])).collect();
    let zeros: Vec<usize> = (0..h.num_vertices()).filter(|&v| !h.labels[v].eval(x)).collect();
    let mut covered = vec![false; h.num_vertices()];
    fn search(h: &HypergraphProgram, inc: &[Vec<usize>], usable: &[bool], zeros: &[usize], covered: &mut [bool]) -> bool {
        let Some(&v) = zeros.iter().find(|&&v| !covered[v]) else {
            return true;
        };
        for &e in &inc[v] {
            let vs = &h.edges[e].vertices;
            if !usable[e] || vs.iter().any(|&u| covered[u]) {
                continue;
            }
            vs.iter().for_each(|&u| covered[u] = true);
            if search(h, inc, usable, zeros, covered) {
                return true;
            }
            vs.iter().for_each(|&u| covered[u] = false);
        }
        false
    }
    Ok(search(h, &inc, &usable, &zeros, &mut covered))
}

/// Reference semantics: tries all `2^|E|` edge subsets.
pub fn eval_hgp_exhaustive(h: &HypergraphProgram, x: &[bool]) -> Result<bool, HgpError> {
    h.check_input(x)?;
    let m = h.edges.len();
    assert!(m < 32, "exhaustive evaluation is limited to 31 hyperedges");
    let zeros: Vec<usize> = (0..h.num_vertices()).filter(|&v| !h.labels[v].eval(x)).collect();
    'subsets: for mask in 0u32..(1 << m) {
        let mut hits = vec![0u32; h.num_vertices()];
        for (e, edge) in h.edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                if edge.guard.is_some_and(|g| !x[g]) {
                    continue 'subsets;
                }
                for &v in &edge.vertices {
                    hits[v] += 1;
                }
            }
        }
        if hits.iter().all(|&k| k <= 1) && zeros.iter().all(|&v| hits[v] == 1) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All inputs in counting order; bit `i` of the counter is variable `i`.
pub fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).map(move |k| (0..n).map(|i| k >> i & 1 == 1).collect())
}

/// Replaces each edge guard `x_e` by fresh vertices: `v_e` labelled 1 joins
/// the edge, `u_e` labelled `x_e` is only coverable by the new edge `{v_e, u_e}`.
pub fn normalize_edge_variables(h: &HypergraphProgram) -> HypergraphProgram {
    if !h.has_edge_vars() {
        return h.clone();
    }
    let mut out = HypergraphProgram::new(h.num_vars);
    for v in 0..h.num_vertices() {
        out.add_vertex(&h.vertex_ids[v], h.labels[v]).expect("copied vertex");
    }
    let mut extra = Vec::new();
    for e in &h.edges {
        let mut vs = e.vertices.clone();
        if let Some(g) = e.guard {
            let ve = out.add_vertex(&fresh(&out, &format!("v_{}", e.id)), Label::Const1).expect("fresh");
            let ue = out.add_vertex(&fresh(&out, &format!("u_{}", e.id)), Label::Var(g)).expect("fresh");
            vs.push(ve);
            extra.push((format!("{}'", e.id), vec![ve, ue]));
        }
        out.add_edge_by_index(&e.id, vs).expect("copied edge");
    }
    for (id, vs) in extra {
        let id = fresh_edge(&out, &id);
        out.add_edge_by_index(&id, vs).expect("fresh");
    }
    if let Some(s) = &h.structure {
        out.structure = Some(s.clone());
    }
    out
}

fn fresh(h: &HypergraphProgram, base: &str) -> String {
    let mut id = base.to_string();
    while h.index.contains_key(&id) {
        id.push('\'');
    }
    id
}

fn fresh_edge(h: &HypergraphProgram, base: &str) -> String {
    let mut id = base.to_string();
    while h.edge_index.contains_key(&id) {
        id.push('\'');
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    /// u, v, w labelled x1, x2, x3; e1 = {u,v}, e2 = {v,w}.
    fn worked_example() -> HypergraphProgram {
        let mut h = HypergraphProgram::new(3);
        h.add_vertex("u", Label::Var(0)).unwrap();
        h.add_vertex("v", Label::Var(1)).unwrap();
        h.add_vertex("w", Label::Var(2)).unwrap();
        h.add_edge("e1", &["u", "v"]).unwrap();
        h.add_edge("e2", &["v", "w"]).unwrap();
        h
    }

    #[test]
    fn worked_example_table() {
        let h = worked_example();
        assert!(!eval_hgp(&h, &[false, true, false]).unwrap());
        // zeros {u,v} fit e1; zeros {v} fit either edge; no zeros is free
        assert!(eval_hgp(&h, &[false, false, true]).unwrap());
        assert!(eval_hgp(&h, &[true, false, true]).unwrap());
        assert!(eval_hgp(&h, &[true, true, true]).unwrap());
        assert!(!eval_hgp(&h, &[false, false, false]).unwrap());
        for x in all_inputs(3) {
            assert_eq!(eval_hgp(&h, &x).unwrap(), eval_hgp_exhaustive(&h, &x).unwrap(), "{x:?}");
        }
    }

    #[test]
    fn all_ones_labels_always_true() {
        let mut h = HypergraphProgram::new(2);
        h.add_vertex("a", Label::Const1).unwrap();
        h.add_vertex("b", Label::Const1).unwrap();
        h.add_edge("e", &["a", "b"]).unwrap();
        assert!(all_inputs(2).all(|x| eval_hgp(&h, &x).unwrap()));
    }

    #[test]
    fn uncoverable_zero() {
        let mut h = HypergraphProgram::new(1);
        h.add_vertex("a", Label::Const0).unwrap();
        assert!(all_inputs(1).all(|x| !eval_hgp(&h, &x).unwrap()));
    }

    #[test]
    fn degree_counts_incidences() {
        let mut h = HypergraphProgram::new(0);
        for v in ["u", "v", "w", "z"] {
            h.add_vertex(v, Label::Const1).unwrap();
        }
        h.add_edge("e1", &["u", "v"]).unwrap();
        h.add_edge("e2", &["v", "w"]).unwrap();
        h.add_edge("e3", &["v", "z"]).unwrap();
        assert_eq!(h.degree(), 3);
        assert_eq!(h.size(), 7);
    }

    #[test]
    fn construction_errors() {
        let mut h = HypergraphProgram::new(1);
        assert!(matches!(h.add_vertex("a", Label::Var(1)), Err(HgpError::VariableOutOfRange { .. })));
        h.add_vertex("a", Label::Var(0)).unwrap();
        assert!(matches!(h.add_vertex("a", Label::Const0), Err(HgpError::Duplicate { .. })));
        assert!(matches!(h.add_edge("e", &["b"]), Err(HgpError::Unknown { .. })));
        assert!(matches!(h.add_edge::<&str>("e", &[]), Err(HgpError::EmptyEdge(_))));
        assert!(matches!(eval_hgp(&h, &[]), Err(HgpError::InputLength { .. })));
    }

    #[test]
    fn guarded_edge_normalization_table() {
        // e = {u}, guarded by x2, u labelled x1: true iff x1 or x2
        let mut h = HypergraphProgram::new(2);
        h.add_vertex("u", Label::Var(0)).unwrap();
        let e = h.add_edge("e", &["u"]).unwrap();
        h.set_edge_var(e, 1).unwrap();
        let n = normalize_edge_variables(&h);
        assert!(!n.has_edge_vars());
        assert_eq!(n.num_vertices(), 3);
        assert_eq!(n.edges().len(), 2);
        for x in all_inputs(2) {
            let expected = x[0] || x[1];
            assert_eq!(eval_hgp(&h, &x).unwrap(), expected, "{x:?}");
            assert_eq!(eval_hgp_exhaustive(&h, &x).unwrap(), expected);
            assert_eq!(eval_hgp(&n, &x).unwrap(), expected);
        }
    }

    #[test]
    fn normalization_without_guards_is_identity() {
        let h = worked_example();
        assert_eq!(normalize_edge_variables(&h), h);
    }

    #[test]
    fn zero_guard_acts_like_deleting_the_edge() {
        let mut h = worked_example();
        let mut g = HypergraphProgram::new(4);
        for v in 0..3 {
            g.add_vertex(h.vertex_id(v), h.label(v)).unwrap();
        }
        g.add_edge("e2", &["v", "w"]).unwrap();
        h = {
            let mut wide = HypergraphProgram::new(4);
            for v in 0..3 {
                wide.add_vertex(h.vertex_id(v), h.label(v)).unwrap();
            }
            let e1 = wide.add_edge("e1", &["u", "v"]).unwrap();
            wide.add_edge("e2", &["v", "w"]).unwrap();
            wide.set_edge_var(e1, 3).unwrap();
            wide
        };
        let n = normalize_edge_variables(&h);
        for mut x in all_inputs(3) {
            x.push(false);
            assert_eq!(eval_hgp(&n, &x).unwrap(), eval_hgp(&g, &x).unwrap());
        }
    }
}
