//! Nondeterministic branching programs.
//!
//! ```text
//! vars 2
//! source s
//! sink t
//! edge s v x1
//! edge v t !x2
//! ```
//!
//! Vertices are created on first mention; `vertex <id>` adds an isolated one.

use std::collections::BTreeMap;
use std::fmt;

use super::CircuitError;
use crate::hgp::Label;
use crate::lex::content_lines;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingProgram {
    num_vars: usize,
    vertex_ids: Vec<String>,
    index: BTreeMap<String, usize>,
    source: usize,
    sink: usize,
    edges: Vec<(usize, usize, Label)>,
}

impl BranchingProgram {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn edges(&self) -> &[(usize, usize, Label)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// `|V| + |E|`.
    pub fn size(&self) -> usize {
        self.vertex_ids.len() + self.edges.len()
    }

    pub fn is_monotone(&self) -> bool {
        !self.edges.iter().any(|(_, _, l)| matches!(l, Label::NegVar(_)))
    }
}

/// Is the sink reachable from the source through edges whose labels hold?
pub fn eval_nbp(p: &BranchingProgram, x: &[bool]) -> Result<bool, CircuitError> {
    if x.len() != p.num_vars {
        return Err(CircuitError::InputLength {
            class: super::InputClass::X,
            expected: p.num_vars,
            found: x.len(),
        });
    }
    let mut seen = vec![false; p.vertex_ids.len()];
    seen[p.source] = true;
    let mut stack = vec![p.source];
    while let Some(u) = stack.pop() {
        for &(a, b, l) in &p.edges {
            if a == u && !seen[b] && l.eval(x) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    Ok(seen[p.sink])
}

pub fn parse_nbp(text: &str) -> Result<BranchingProgram, CircuitError> {
    let mut num_vars = None;
    let mut source = None;
    let mut sink = None;
    let mut vertex_ids: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut last_line = 1;
    let mut intern = |id: &str, vertex_ids: &mut Vec<String>| -> usize {
        *index.entry(id.to_string()).or_insert_with(|| {
            vertex_ids.push(id.to_string());
            vertex_ids.len() - 1
        })
    };
    for (line_no, line) in content_lines(text) {
        last_line = line_no;
        let syntax = |msg: String| CircuitError::Syntax { line: line_no, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[..] {
            ["vars", n] => num_vars = Some(n.parse::<usize>().map_err(|_| syntax(format!("bad count `{n}`")))?),
            ["source", s] => source = Some(intern(s, &mut vertex_ids)),
            ["sink", t] => sink = Some(intern(t, &mut vertex_ids)),
            ["vertex", v] => {
                intern(v, &mut vertex_ids);
            }
            ["edge", u, v, label] => {
                let n = num_vars.ok_or_else(|| syntax("`vars` must come before edges".into()))?;
                let l = crate::hgp::parse_label_token(label).ok_or_else(|| syntax(format!("bad label `{label}`")))?;
                if l.variable().is_some_and(|i| i >= n) {
                    return Err(syntax(format!("label `{label}` exceeds {n} variables")));
                }
                let (a, b) = (intern(u, &mut vertex_ids), intern(v, &mut vertex_ids));
                edges.push((a, b, l));
            }
            _ => return Err(syntax(format!("cannot parse `{line}`"))),
        }
    }
    let missing = |what: &str| CircuitError::Syntax {
        line: last_line,
        msg: format!("missing `{what}` line"),
    };
    let num_vars = num_vars.ok_or_else(|| missing("vars"))?;
    let source = source.ok_or_else(|| missing("source"))?;
    let sink = sink.ok_or_else(|| missing("sink"))?;
    if source == sink {
        return Err(CircuitError::Syntax {
            line: last_line,
            msg: "source and sink must differ".into(),
        });
    }
    Ok(BranchingProgram {
        num_vars,
        vertex_ids,
        index,
        source,
        sink,
        edges,
    })
}

impl fmt::Display for BranchingProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        writeln!(f, "source {}", self.vertex_ids[self.source])?;
        writeln!(f, "sink {}", self.vertex_ids[self.sink])?;
        let mut touched = vec![false; self.vertex_ids.len()];
        touched[self.source] = true;
        touched[self.sink] = true;
        for &(a, b, _) in &self.edges {
            touched[a] = true;
            touched[b] = true;
        }
        for (v, id) in self.vertex_ids.iter().enumerate() {
            if !touched[v] {
                writeln!(f, "vertex {id}")?;
            }
        }
        for &(a, b, l) in &self.edges {
            writeln!(f, "edge {} {} {l}", self.vertex_ids[a], self.vertex_ids[b])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgp::all_inputs;

    fn table(text: &str) -> Vec<bool> {
        let p = parse_nbp(text).unwrap();
        all_inputs(p.num_vars()).map(|x| eval_nbp(&p, &x).unwrap()).collect()
    }

    #[test]
    fn single_edge_is_the_variable() {
        assert_eq!(table("vars 1\nsource s\nsink t\nedge s t x1"), vec![false, true]);
    }

    #[test]
    fn series_is_and() {
        // inputs in counting order: 00, 10, 01, 11 (x1 is the low bit)
        assert_eq!(
            table("vars 2\nsource s\nsink t\nedge s v x1\nedge v t x2"),
            vec![false, false, false, true]
        );
    }

    #[test]
    fn parallel_is_or() {
        assert_eq!(
            table("vars 2\nsource s\nsink t\nedge s t x1\nedge s t x2"),
            vec![false, true, true, true]
        );
    }

    #[test]
    fn direction_matters_and_round_trip() {
        let text = "vars 1\nsource s\nsink t\nvertex z\nedge t s 1\nedge s m !x1\n";
        let p = parse_nbp(text).unwrap();
        assert!(!eval_nbp(&p, &[false]).unwrap());
        assert!(!p.is_monotone());
        assert_eq!(p.size(), 4 + 2);
        assert_eq!(p.to_string(), text);
    }

    #[test]
    fn rejects_bad_programs() {
        assert!(parse_nbp("vars 1\nsource s\nsink s").is_err());
        assert!(parse_nbp("vars 1\nsource s\nsink t\nedge s t x2").is_err());
        assert!(parse_nbp("source s\nsink t").is_err());
    }
}
