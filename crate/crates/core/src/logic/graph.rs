use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ConjunctiveQuery;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryShape {
    /// The graph is a simple path.
    Linear,
    /// Connected and acyclic, but not a path.
    TreeLike,
    General,
}

impl fmt::Display for QueryShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryShape::Linear => "linear",
            QueryShape::TreeLike => "tree-like",
            QueryShape::General => "general",
        })
    }
}

/// Undirected co-occurrence graph of a query's variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryGraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    shape: QueryShape,
}

impl QueryGraph {
    pub fn of(q: &ConjunctiveQuery) -> Self {
        let vertices = q.variables();
        let mut edges = BTreeSet::new();
        for atom in q.atoms() {
            if let [s, t] = atom.terms()[..] {
                // a binary atom over one variable is a loop, not a co-occurrence pair
                if s != t {
                    let (a, b) = if s < t { (s, t) } else { (t, s) };
                    edges.insert((a.clone(), b.clone()));
                }
            }
        }
        let shape = classify(&vertices, &edges);
        Self {
            vertices,
            edges,
            shape,
        }
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn shape(&self) -> QueryShape {
        self.shape
    }

    pub fn is_tree_like(&self) -> bool {
        matches!(self.shape, QueryShape::Linear | QueryShape::TreeLike)
    }

    pub fn is_linear(&self) -> bool {
        self.shape == QueryShape::Linear
    }

    pub fn neighbours(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.vertices.iter().map(|v| (v.as_str(), BTreeSet::new())).collect();
        for (a, b) in &self.edges {
            adj.get_mut(a.as_str()).unwrap().insert(b);
            adj.get_mut(b.as_str()).unwrap().insert(a);
        }
        adj
    }

    /// Connected components, each sorted, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<String>> {
        let adj = self.neighbours();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        for v in &self.vertices {
            if seen.contains(v.as_str()) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![v.as_str()];
            seen.insert(v);
            while let Some(u) = stack.pop() {
                comp.insert(u.to_string());
                for &w in &adj[u] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

fn classify(vertices: &BTreeSet<String>, edges: &BTreeSet<(String, String)>) -> QueryShape {
    // the empty graph is treated as the trivial path
    if vertices.is_empty() {
        return QueryShape::Linear;
    }
    let index: BTreeMap<&str, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut degree = vec![0usize; vertices.len()];
    let mut acyclic = true;
    for (a, b) in edges {
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        degree[i] += 1;
        degree[j] += 1;
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri == rj {
            acyclic = false;
        } else {
            parent[ri] = rj;
        }
    }
    let root = find(&mut parent, 0);
    let connected = (0..vertices.len()).all(|i| find(&mut parent, i) == root);
    if !(connected && acyclic) {
        QueryShape::General
    } else if degree.iter().all(|&d| d <= 2) {
        QueryShape::Linear
    } else {
        QueryShape::TreeLike
    }
}
