//! Validators for declared path and tree shapes.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{HypergraphProgram, Structure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("no {0} declared")]
    Undeclared(&'static str),
    #[error("declared {kind} is malformed: {msg}")]
    Malformed { kind: &'static str, msg: String },
    #[error("hyperedge `{edge}` is not {what}")]
    Edge { edge: String, what: &'static str },
}

/// Every hyperedge must be an interval of the declared vertex order.
pub fn check_path_program(h: &HypergraphProgram) -> Result<(), StructureError> {
    let Some(Structure::Order(order)) = h.structure() else {
        return Err(StructureError::Undeclared("vertex order"));
    };
    let pos = positions(h, order)?;
    for e in h.edges() {
        let ps: Vec<usize> = e.vertices.iter().map(|&v| pos[v]).collect();
        let (lo, hi) = (ps.iter().min().unwrap(), ps.iter().max().unwrap());
        if hi - lo + 1 != ps.len() {
            return Err(StructureError::Edge {
                edge: e.id.clone(),
                what: "an interval of the declared order",
            });
        }
    }
    Ok(())
}

fn positions(h: &HypergraphProgram, order: &[usize]) -> Result<Vec<usize>, StructureError> {
    let mut pos = vec![usize::MAX; h.num_vertices()];
    for (i, &v) in order.iter().enumerate() {
        if pos[v] != usize::MAX {
            return Err(StructureError::Malformed {
                kind: "order",
                msg: format!("vertex `{}` listed twice", h.vertex_id(v)),
            });
        }
        pos[v] = i;
    }
    if let Some(v) = pos.iter().position(|&p| p == usize::MAX) {
        return Err(StructureError::Malformed {
            kind: "order",
            msg: format!("vertex `{}` missing", h.vertex_id(v)),
        });
    }
    Ok(pos)
}

/// Every hyperedge must induce a connected subtree of the declared tree.
/// A declared order counts as a path-shaped tree.
pub fn check_tree_program(h: &HypergraphProgram) -> Result<(), StructureError> {
    let n = h.num_vertices();
    let pairs: Vec<(usize, usize)> = match h.structure() {
        Some(Structure::Tree(pairs)) => pairs.clone(),
        Some(Structure::Order(order)) => {
            positions(h, order)?;
            order.windows(2).map(|w| (w[0], w[1])).collect()
        }
        None => return Err(StructureError::Undeclared("tree")),
    };
    let malformed = |msg: String| StructureError::Malformed { kind: "tree", msg };
    if n > 0 && pairs.len() != n - 1 {
        return Err(malformed(format!("{} tree edges for {n} vertices", pairs.len())));
    }
    let mut adj = vec![Vec::new(); n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in &pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(malformed(format!(
                "edge {} {} closes a cycle",
                h.vertex_id(a),
                h.vertex_id(b)
            )));
        }
        parent[ra] = rb;
        adj[a].push(b);
        adj[b].push(a);
    }
    for e in h.edges() {
        let members: BTreeSet<usize> = e.vertices.iter().copied().collect();
        let start = e.vertices[0];
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if members.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != members.len() {
            return Err(StructureError::Edge {
                edge: e.id.clone(),
                what: "a subtree of the declared tree",
            });
        }
    }
    Ok(())
}
