//! Text format:
//!
//! ```text
//! vars 3
//! vertex u x1
//! vertex v !x2
//! vertex w 0
//! edge e1 u v
//! edgevar e1 x3
//! order u v w
//! tree u v u w
//! ```

use std::fmt;

use super::{HgpError, HypergraphProgram, Label, Structure};
use crate::lex::content_lines;

pub(crate) fn parse_var(tok: &str) -> Option<usize> {
    let k: usize = tok.strip_prefix('x')?.parse().ok()?;
    k.checked_sub(1)
}

pub(crate) fn parse_label(tok: &str) -> Option<Label> {
    match tok {
        "0" => Some(Label::Const0),
        "1" => Some(Label::Const1),
        _ => match tok.strip_prefix('!') {
            Some(rest) => parse_var(rest).map(Label::NegVar),
            None => parse_var(tok).map(Label::Var),
        },
    }
}

pub fn parse_hgp(text: &str) -> Result<HypergraphProgram, HgpError> {
    let mut h: Option<HypergraphProgram> = None;
    let mut order: Option<Vec<String>> = None;
    let mut tree: Vec<(String, String)> = Vec::new();
    let mut last_line = 1;
    for (line_no, line) in content_lines(text) {
        last_line = line_no;
        let syntax = |msg: String| HgpError::Syntax { line: line_no, msg };
        let at_line = |e: HgpError| match e {
            HgpError::Syntax { .. } => e,
            other => HgpError::Syntax {
                line: line_no,
                msg: other.to_string(),
            },
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        if words[0] == "vars" {
            if h.is_some() {
                return Err(syntax("duplicate `vars` line".into()));
            }
            let [_, n] = words[..] else {
                return Err(syntax("expected `vars <n>`".into()));
            };
            let n = n.parse().map_err(|_| syntax(format!("bad variable count `{n}`")))?;
            h = Some(HypergraphProgram::new(n));
            continue;
        }
        let Some(h) = h.as_mut() else {
            return Err(syntax("the first line must be `vars <n>`".into()));
        };
        match words[0] {
            "vertex" => {
                let [_, id, label] = words[..] else {
                    return Err(syntax("expected `vertex <id> <label>`".into()));
                };
                let label = parse_label(label).ok_or_else(|| syntax(format!("bad label `{label}`")))?;
                h.add_vertex(id, label).map_err(at_line)?;
            }
            "edge" => {
                if words.len() < 3 {
                    return Err(syntax("expected `edge <id> <vertex>...`".into()));
                }
                h.add_edge(words[1], &words[2..]).map_err(at_line)?;
            }
            "edgevar" => {
                let [_, id, var] = words[..] else {
                    return Err(syntax("expected `edgevar <edge> x<i>`".into()));
                };
                let var = parse_var(var).ok_or_else(|| syntax(format!("bad variable `{var}`")))?;
                let e = h.edge(id).map_err(at_line)?;
                h.set_edge_var(e, var).map_err(at_line)?;
            }
            "order" => {
                if order.is_some() || !tree.is_empty() {
                    return Err(syntax("only one `order` or `tree` declaration is allowed".into()));
                }
                order = Some(words[1..].iter().map(|s| s.to_string()).collect());
            }
            "tree" => {
                if order.is_some() {
                    return Err(syntax("only one `order` or `tree` declaration is allowed".into()));
                }
                if words.len() % 2 != 1 {
                    return Err(syntax("`tree` expects parent/child pairs".into()));
                }
                for pair in words[1..].chunks(2) {
                    tree.push((pair[0].to_string(), pair[1].to_string()));
                }
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    let mut h = h.ok_or(HgpError::Syntax {
        line: last_line,
        msg: "missing `vars <n>` line".into(),
    })?;
    if let Some(order) = order {
        let vs = order.iter().map(|v| h.vertex(v)).collect::<Result<_, _>>()?;
        h.declare(Structure::Order(vs));
    } else if !tree.is_empty() {
        let pairs = tree
            .iter()
            .map(|(p, c)| Ok((h.vertex(p)?, h.vertex(c)?)))
            .collect::<Result<_, HgpError>>()?;
        h.declare(Structure::Tree(pairs));
    }
    Ok(h)
}

impl fmt::Display for HypergraphProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        for v in 0..self.num_vertices() {
            writeln!(f, "vertex {} {}", self.vertex_ids[v], self.labels[v])?;
        }
        for e in &self.edges {
            write!(f, "edge {}", e.id)?;
            for &v in &e.vertices {
                write!(f, " {}", self.vertex_ids[v])?;
            }
            writeln!(f)?;
        }
        for e in &self.edges {
            if let Some(g) = e.guard {
                writeln!(f, "edgevar {} x{}", e.id, g + 1)?;
            }
        }
        match &self.structure {
            Some(Structure::Order(vs)) => {
                f.write_str("order")?;
                for &v in vs {
                    write!(f, " {}", self.vertex_ids[v])?;
                }
                writeln!(f)?;
            }
            Some(Structure::Tree(pairs)) => {
                f.write_str("tree")?;
                for &(p, c) in pairs {
                    write!(f, " {} {}", self.vertex_ids[p], self.vertex_ids[c])?;
                }
                writeln!(f)?;
            }
            None => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgp::eval_hgp;

    const WORKED: &str = "vars 3\nvertex u x1\nvertex v x2\nvertex w x3\nedge e1 u v\nedge e2 v w\n";

    #[test]
    fn parses_and_prints() {
        let h = parse_hgp(WORKED).unwrap();
        assert_eq!(h.to_string(), WORKED);
        assert!(!eval_hgp(&h, &[false, true, false]).unwrap());
    }

    #[test]
    fn full_format_round_trips() {
        let text = "vars 2\nvertex a !x1\nvertex b 0\nvertex c 1\nedge e a b\nedge f c\nedgevar f x2\ntree a b a c\n";
        let h = parse_hgp(text).unwrap();
        assert_eq!(h.to_string(), text);
        assert_eq!(parse_hgp(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn label_syntax() {
        assert_eq!(parse_label("x1"), Some(Label::Var(0)));
        assert_eq!(parse_label("!x12"), Some(Label::NegVar(11)));
        assert_eq!(parse_label("x0"), None);
        assert_eq!(parse_label("y1"), None);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_hgp("vars 1\nvertex a x2\n").unwrap_err();
        assert!(matches!(err, HgpError::Syntax { line: 2, .. }), "{err}");
        assert!(parse_hgp("vertex a x1").is_err());
        assert!(parse_hgp("vars 1\nedge e a").is_err());
        assert!(parse_hgp("vars 1\nvertex a 1\nfrob a").is_err());
        assert!(parse_hgp("").is_err());
    }
}
