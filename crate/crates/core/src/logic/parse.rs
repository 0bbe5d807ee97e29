//! Text formats for ontologies, data and queries.
//!
//! Ontology, one axiom per line:
//!
//! ```text
//! A(x) -> B(x)
//! R(x,y) -> S(x,y)
//! R(x,y) -> S(y,x)
//! A(x) -> exists y: B(y), R(x,y), S(y,x)
//! ```
//!
//! Data is one fact per line (`A(a)`, `R(a,b)`); a query is a single line
//! `q(x1,...,xk) :- atom, atom, ...`. `#` starts a comment everywhere.

use super::{Arity, Atom, Axiom, ConjunctiveQuery, DataInstance, LogicError, Ontology, RuleVar, Signature};
use crate::lex::{content_lines, Cursor, Token};

#[derive(Debug, Clone)]
enum RawTerm {
    Name(String),
    Quoted(String),
}

#[derive(Debug, Clone)]
struct RawAtom {
    pred: String,
    args: Vec<RawTerm>,
}

fn syntax(line: usize, msg: impl Into<String>) -> LogicError {
    LogicError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn raw_atom(c: &mut Cursor) -> Result<RawAtom, String> {
    let pred = c.ident()?;
    c.expect(&Token::LParen)?;
    let mut args = Vec::new();
    if !c.eat(&Token::RParen) {
        loop {
            match c.next() {
                Some(Token::Ident(s)) => args.push(RawTerm::Name(s)),
                Some(Token::Quoted(s)) => args.push(RawTerm::Quoted(s)),
                Some(t) => return Err(format!("expected term, found {t}")),
                None => return Err("unexpected end of line inside atom".into()),
            }
            if c.eat(&Token::RParen) {
                break;
            }
            c.expect(&Token::Comma)?;
        }
    }
    if args.is_empty() || args.len() > 2 {
        return Err(format!(
            "predicate `{pred}` has {} arguments; only unary and binary predicates are supported",
            args.len()
        ));
    }
    Ok(RawAtom { pred, args })
}

fn raw_atom_list(c: &mut Cursor) -> Result<Vec<RawAtom>, String> {
    let mut atoms = vec![raw_atom(c)?];
    while c.eat(&Token::Comma) {
        atoms.push(raw_atom(c)?);
    }
    Ok(atoms)
}

fn plain_names(atom: &RawAtom) -> Result<Vec<&str>, String> {
    atom.args
        .iter()
        .map(|t| match t {
            RawTerm::Name(n) => Ok(n.as_str()),
            RawTerm::Quoted(q) => Err(format!("constant \"{q}\" not allowed in an axiom")),
        })
        .collect()
}

fn is_exists_keyword(c: &Cursor) -> bool {
    matches!(c.peek(), Some(Token::Ident(k)) if k == "exists")
        && c.peek_at(1) != Some(&Token::LParen)
}

fn parse_axiom(line_no: usize, line: &str) -> Result<Axiom, LogicError> {
    let mut c = Cursor::new(line).map_err(|m| syntax(line_no, m))?;
    let lhs = raw_atom(&mut c).map_err(|m| syntax(line_no, m))?;
    c.expect(&Token::Arrow).map_err(|m| syntax(line_no, m))?;
    let lhs_vars = plain_names(&lhs).map_err(|m| syntax(line_no, m))?;

    if is_exists_keyword(&c) {
        c.next();
        if lhs_vars.len() != 1 {
            return Err(LogicError::NonUnaryPremise { line: line_no });
        }
        let yvar = c.ident().map_err(|m| syntax(line_no, m))?;
        c.expect(&Token::Colon).map_err(|m| syntax(line_no, m))?;
        let atoms = raw_atom_list(&mut c).map_err(|m| syntax(line_no, m))?;
        c.eat(&Token::Dot);
        c.finish().map_err(|m| syntax(line_no, m))?;
        let xvar = lhs_vars[0];
        if xvar == yvar {
            return Err(syntax(line_no, "existential variable must differ from the premise variable"));
        }
        let to_rule_var = |name: &str| -> Result<RuleVar, LogicError> {
            if name == xvar {
                Ok(RuleVar::X)
            } else if name == yvar {
                Ok(RuleVar::Y)
            } else {
                Err(syntax(
                    line_no,
                    format!("variable `{name}` is neither `{xvar}` nor `{yvar}`"),
                ))
            }
        };
        let mut conclusion = Vec::with_capacity(atoms.len());
        for a in &atoms {
            let names = plain_names(a).map_err(|m| syntax(line_no, m))?;
            let atom = match names.as_slice() {
                [t] => Atom::Unary(a.pred.clone(), to_rule_var(t)?),
                [s, t] => {
                    let (s, t) = (to_rule_var(s)?, to_rule_var(t)?);
                    if s == t {
                        return Err(syntax(
                            line_no,
                            format!("binary atom `{}` must connect `{xvar}` and `{yvar}`", a.pred),
                        ));
                    }
                    Atom::Binary(a.pred.clone(), s, t)
                }
                _ => unreachable!("raw_atom enforces arity"),
            };
            conclusion.push(atom);
        }
        return Axiom::existential(&lhs.pred, conclusion).map_err(|e| syntax(line_no, e.to_string()));
    }

    let rhs = raw_atom(&mut c).map_err(|m| syntax(line_no, m))?;
    c.eat(&Token::Dot);
    c.finish().map_err(|m| syntax(line_no, m))?;
    let rhs_vars = plain_names(&rhs).map_err(|m| syntax(line_no, m))?;
    match (lhs_vars.as_slice(), rhs_vars.as_slice()) {
        ([x], [x2]) if x == x2 => Ok(Axiom::ConceptInclusion {
            sub: lhs.pred,
            sup: rhs.pred,
        }),
        ([_], [_]) => Err(syntax(line_no, "concept inclusion must use the same variable on both sides")),
        ([x, y], [a, b]) if x != y => {
            if x == a && y == b {
                Ok(Axiom::RoleInclusion {
                    sub: lhs.pred,
                    sup: rhs.pred,
                    inverted: false,
                })
            } else if x == b && y == a {
                Ok(Axiom::RoleInclusion {
                    sub: lhs.pred,
                    sup: rhs.pred,
                    inverted: true,
                })
            } else {
                Err(syntax(line_no, "role inclusion must reuse the premise variables"))
            }
        }
        ([_, _], [_, _]) => Err(syntax(line_no, "role inclusion premise needs two distinct variables")),
        ([_], [_, _]) => Err(syntax(
            line_no,
            "binary conclusion needs an existential variable: use `A(x) -> exists y: ...`",
        )),
        _ => Err(syntax(line_no, "axiom shape outside the supported fragment")),
    }
}

pub fn parse_ontology(text: &str) -> Result<Ontology, LogicError> {
    let mut sig = Signature::new();
    let mut axioms = Vec::new();
    for (line_no, line) in content_lines(text) {
        let ax = parse_axiom(line_no, line)?;
        for (p, arity) in ax.predicates() {
            sig.declare(p, arity)?;
        }
        axioms.push(ax);
    }
    Ontology::new(sig, axioms)
}

pub fn parse_data(text: &str) -> Result<DataInstance, LogicError> {
    let mut sig = Signature::new();
    let mut data = DataInstance::new();
    for (line_no, line) in content_lines(text) {
        let mut c = Cursor::new(line).map_err(|m| syntax(line_no, m))?;
        let atom = raw_atom(&mut c).map_err(|m| syntax(line_no, m))?;
        c.eat(&Token::Dot);
        c.finish().map_err(|m| syntax(line_no, m))?;
        let consts: Vec<String> = atom
            .args
            .iter()
            .map(|t| match t {
                RawTerm::Name(n) | RawTerm::Quoted(n) => n.clone(),
            })
            .collect();
        match consts.as_slice() {
            [a] => {
                sig.declare(&atom.pred, Arity::Unary)?;
                data.add_unary(&atom.pred, a);
            }
            [a, b] => {
                sig.declare(&atom.pred, Arity::Binary)?;
                data.add_binary(&atom.pred, a, b);
            }
            _ => unreachable!(),
        }
    }
    Ok(data)
}

fn query_var(t: &RawTerm) -> Result<String, LogicError> {
    match t {
        RawTerm::Quoted(q) => Err(LogicError::ConstantInQuery(q.clone())),
        RawTerm::Name(n) if n.starts_with(|c: char| c.is_ascii_digit()) => {
            Err(LogicError::ConstantInQuery(n.clone()))
        }
        RawTerm::Name(n) => Ok(n.clone()),
    }
}

pub fn parse_query(text: &str) -> Result<ConjunctiveQuery, LogicError> {
    let lines: Vec<_> = content_lines(text).collect();
    let (line_no, line) = match lines.as_slice() {
        [one] => *one,
        [] => return Err(syntax(1, "empty query file")),
        [_, (n, _), ..] => return Err(syntax(*n, "a query must fit on a single line")),
    };
    let mut c = Cursor::new(line).map_err(|m| syntax(line_no, m))?;
    c.ident().map_err(|m| syntax(line_no, m))?;
    c.expect(&Token::LParen).map_err(|m| syntax(line_no, m))?;
    let mut head = Vec::new();
    if !c.eat(&Token::RParen) {
        loop {
            match c.next() {
                Some(Token::Ident(v)) => head.push(query_var(&RawTerm::Name(v))?),
                Some(Token::Quoted(q)) => return Err(LogicError::ConstantInQuery(q)),
                Some(t) => return Err(syntax(line_no, format!("expected head variable, found {t}"))),
                None => return Err(syntax(line_no, "unterminated query head")),
            }
            if c.eat(&Token::RParen) {
                break;
            }
            c.expect(&Token::Comma).map_err(|m| syntax(line_no, m))?;
        }
    }
    c.expect(&Token::ColonDash).map_err(|m| syntax(line_no, m))?;
    let mut atoms = Vec::new();
    if !(c.at_end() || c.peek() == Some(&Token::Dot)) {
        for a in raw_atom_list(&mut c).map_err(|m| syntax(line_no, m))? {
            let vars = a.args.iter().map(query_var).collect::<Result<Vec<_>, _>>()?;
            atoms.push(match vars.as_slice() {
                [v] => Atom::Unary(a.pred.clone(), v.clone()),
                [u, v] => Atom::Binary(a.pred.clone(), u.clone(), v.clone()),
                _ => unreachable!(),
            });
        }
    }
    c.eat(&Token::Dot);
    c.finish().map_err(|m| syntax(line_no, m))?;
    ConjunctiveQuery::new(head, atoms)
}
