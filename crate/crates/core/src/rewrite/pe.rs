//! Positive existential formulas: printing, parsing, size and evaluation over plain data.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::RewriteError;
use crate::chase::Answers;
use crate::lex::{content_lines, Cursor, Token};
use crate::logic::{Atom, DataInstance};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PeFormula {
    Atom(Atom),
    /// Equality of two variables; only produced when two answer variables are identified.
    Eq(String, String),
    And(Vec<PeFormula>),
    Or(Vec<PeFormula>),
    Exists(Vec<String>, Box<PeFormula>),
}

impl PeFormula {
    /// Conjunction, collapsing a single child to itself.
    pub fn and(mut children: Vec<PeFormula>) -> Self {
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            PeFormula::And(children)
        }
    }

    /// Disjunction, collapsing a single child to itself.
    pub fn or(mut children: Vec<PeFormula>) -> Self {
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            PeFormula::Or(children)
        }
    }

    /// Existential closure over `vars`; no quantifier when `vars` is empty.
    pub fn exists(vars: Vec<String>, body: PeFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PeFormula::Exists(vars, Box::new(body))
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            PeFormula::Atom(a) => out.extend(a.terms().into_iter().cloned()),
            PeFormula::Eq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            PeFormula::And(cs) | PeFormula::Or(cs) => cs.iter().for_each(|c| c.collect_free(out)),
            PeFormula::Exists(vars, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                for v in vars {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    /// Every predicate occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.predicate().to_string());
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            PeFormula::Atom(a) => f(a),
            PeFormula::Eq(..) => {}
            PeFormula::And(cs) | PeFormula::Or(cs) => cs.iter().for_each(|c| c.visit_atoms(f)),
            PeFormula::Exists(_, body) => body.visit_atoms(f),
        }
    }

    /// Symbol count: an atom is its predicate plus its arguments, an equality is
    /// three symbols, a k-ary connective adds k-1 operator symbols (1 for the
    /// constants `true`/`false`), and a quantifier adds one per bound variable.
    pub fn size(&self) -> usize {
        match self {
            PeFormula::Atom(a) => 1 + a.terms().len(),
            PeFormula::Eq(..) => 3,
            PeFormula::And(cs) | PeFormula::Or(cs) => {
                if cs.is_empty() {
                    1
                } else {
                    cs.len() - 1 + cs.iter().map(PeFormula::size).sum::<usize>()
                }
            }
            PeFormula::Exists(vars, body) => vars.len() + body.size(),
        }
    }

    /// Every Or branch must have the same free variables, so that each branch
    /// binds all variables the enclosing context relies on.
    pub fn check_safe(&self) -> Result<(), RewriteError> {
        match self {
            PeFormula::Atom(_) | PeFormula::Eq(..) => Ok(()),
            PeFormula::And(cs) => cs.iter().try_for_each(PeFormula::check_safe),
            PeFormula::Or(cs) => {
                let fv = self.free_vars();
                for c in cs {
                    if c.free_vars() != fv {
                        return Err(RewriteError::Unsafe(format!(
                            "disjunct {c} does not mention every free variable of {self}"
                        )));
                    }
                    c.check_safe()?;
                }
                Ok(())
            }
            PeFormula::Exists(_, body) => body.check_safe(),
        }
    }
}

impl fmt::Display for PeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeFormula::Atom(a) => write!(f, "{a}"),
            PeFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            PeFormula::And(cs) if cs.is_empty() => f.write_str("true"),
            PeFormula::Or(cs) if cs.is_empty() => f.write_str("false"),
            PeFormula::And(cs) | PeFormula::Or(cs) => {
                let op = if matches!(self, PeFormula::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            PeFormula::Exists(vars, body) => write!(f, "(exists {}: {body})", vars.join(",")),
        }
    }
}

/// A formula together with the order of its answer variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeQuery {
    pub answer_vars: Vec<String>,
    pub formula: PeFormula,
}

impl PeQuery {
    pub fn new(answer_vars: Vec<String>, formula: PeFormula) -> Result<Self, RewriteError> {
        let q = PeQuery { answer_vars, formula };
        q.validate()?;
        Ok(q)
    }

    /// Free variables are exactly the answer variables, which are distinct,
    /// and the formula is safe.
    pub fn validate(&self) -> Result<(), RewriteError> {
        let head: BTreeSet<String> = self.answer_vars.iter().cloned().collect();
        if head.len() != self.answer_vars.len() {
            return Err(RewriteError::Unsafe("repeated answer variable".into()));
        }
        let fv = self.formula.free_vars();
        if fv != head {
            return Err(RewriteError::Unsafe(format!(
                "free variables {{{}}} differ from answer variables {{{}}}",
                fv.into_iter().collect::<Vec<_>>().join(","),
                self.answer_vars.join(",")
            )));
        }
        self.formula.check_safe()
    }

    pub fn size(&self) -> usize {
        self.formula.size()
    }
}

impl fmt::Display for PeQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({}) :- {}", self.answer_vars.join(","), self.formula)
    }
}

/// Parses `q(x,...) :- formula` where formulas are atoms, `x = y`, `true`,
/// `false`, or parenthesized `&`/`|` chains and `(exists v,...: formula)`.
pub fn parse_pe(text: &str) -> Result<PeQuery, RewriteError> {
    let mut lines = content_lines(text);
    let (line_no, line) = lines.next().ok_or_else(|| RewriteError::Syntax {
        line: 1,
        msg: "empty formula file".into(),
    })?;
    if let Some((extra, _)) = lines.next() {
        return Err(RewriteError::Syntax {
            line: extra,
            msg: "a formula must be on a single line".into(),
        });
    }
    let err = |msg: String| RewriteError::Syntax { line: line_no, msg };
    let mut c = Cursor::new(line).map_err(err)?;
    let head = c.ident().map_err(err)?;
    if head != "q" {
        return Err(err(format!("expected head `q`, found `{head}`")));
    }
    let answer_vars = name_list_in_parens(&mut c).map_err(err)?;
    c.expect(&Token::ColonDash).map_err(err)?;
    let formula = formula(&mut c).map_err(err)?;
    c.eat(&Token::Dot);
    c.finish().map_err(err)?;
    PeQuery::new(answer_vars, formula)
}

fn name_list_in_parens(c: &mut Cursor) -> Result<Vec<String>, String> {
    c.expect(&Token::LParen)?;
    let mut out = Vec::new();
    if c.eat(&Token::RParen) {
        return Ok(out);
    }
    loop {
        out.push(c.ident()?);
        if c.eat(&Token::RParen) {
            return Ok(out);
        }
        c.expect(&Token::Comma)?;
    }
}

fn formula(c: &mut Cursor) -> Result<PeFormula, String> {
    match c.peek() {
        Some(Token::LParen) => {
            c.next();
            if matches!(c.peek(), Some(Token::Ident(k)) if k == "exists")
                && matches!(c.peek_at(1), Some(Token::Ident(_)))
            {
                c.next();
                let mut vars = vec![c.ident()?];
                while c.eat(&Token::Comma) {
                    vars.push(c.ident()?);
                }
                c.expect(&Token::Colon)?;
                let body = formula(c)?;
                c.expect(&Token::RParen)?;
                return Ok(PeFormula::Exists(vars, Box::new(body)));
            }
            let first = formula(c)?;
            let op = match c.peek() {
                Some(Token::Amp) => Token::Amp,
                Some(Token::Pipe) => Token::Pipe,
                _ => {
                    c.expect(&Token::RParen)?;
                    return Ok(first);
                }
            };
            let mut children = vec![first];
            while c.eat(&op) {
                children.push(formula(c)?);
            }
            c.expect(&Token::RParen)?;
            Ok(if op == Token::Amp {
                PeFormula::And(children)
            } else {
                PeFormula::Or(children)
            })
        }
        Some(Token::Ident(_)) => {
            let name = c.ident()?;
            match c.peek() {
                Some(Token::LParen) => {
                    let args = name_list_in_parens(c)?;
                    match args.len() {
                        1 => Ok(PeFormula::Atom(Atom::Unary(name, args[0].clone()))),
                        2 => Ok(PeFormula::Atom(Atom::Binary(name, args[0].clone(), args[1].clone()))),
                        k => Err(format!("predicate `{name}` has {k} arguments")),
                    }
                }
                Some(Token::Eq) => {
                    c.next();
                    Ok(PeFormula::Eq(name, c.ident()?))
                }
                _ if name == "true" => Ok(PeFormula::And(vec![])),
                _ if name == "false" => Ok(PeFormula::Or(vec![])),
                _ => Err(format!("expected atom or equality after `{name}`")),
            }
        }
        Some(t) => Err(format!("expected formula, found {t}")),
        None => Err("expected formula, found end of line".into()),
    }
}

/// Answers of `q` over the finite structure given by `data`.
///
/// Straightforward backtracking over the active domain; conjuncts are checked
/// as soon as all their free variables are bound.
pub fn eval_pe(q: &PeQuery, data: &DataInstance) -> Answers {
    let ev = Evaluator {
        data,
        domain: data.constants().iter().cloned().collect(),
    };
    let mut out = Answers::new();
    let mut env = HashMap::new();
    let conjuncts = conjuncts_of(&q.formula);
    ev.search(&q.answer_vars, 0, &conjuncts, &mut env, &mut |env| {
        out.insert(q.answer_vars.iter().map(|v| env[v].clone()).collect());
        false
    });
    out
}

fn conjuncts_of(f: &PeFormula) -> Vec<&PeFormula> {
    match f {
        PeFormula::And(cs) => cs.iter().collect(),
        other => vec![other],
    }
}

struct Evaluator<'a> {
    data: &'a DataInstance,
    domain: Vec<String>,
}

type Env = HashMap<String, String>;

impl Evaluator<'_> {
    fn holds(&self, f: &PeFormula, env: &mut Env) -> bool {
        match f {
            PeFormula::Atom(Atom::Unary(p, t)) => self.data.has_unary(p, &env[t]),
            PeFormula::Atom(Atom::Binary(p, s, t)) => self.data.has_binary(p, &env[s], &env[t]),
            PeFormula::Eq(a, b) => env[a] == env[b],
            PeFormula::And(cs) => cs.iter().all(|c| self.holds(c, env)),
            PeFormula::Or(cs) => cs.iter().any(|c| self.holds(c, env)),
            PeFormula::Exists(vars, body) => {
                // shadowed outer bindings are restored afterwards
                let saved: Vec<(String, Option<String>)> =
                    vars.iter().map(|v| (v.clone(), env.remove(v))).collect();
                let conjuncts = conjuncts_of(body);
                let found = self.search(vars, 0, &conjuncts, env, &mut |_| true);
                for (v, old) in saved {
                    env.remove(&v);
                    if let Some(old) = old {
                        env.insert(v, old);
                    }
                }
                found
            }
        }
    }

    /// Binds `vars[i..]` in turn; `done` is called on complete satisfying
    /// assignments and returns true to stop the search.
    fn search(
        &self,
        vars: &[String],
        i: usize,
        conjuncts: &[&PeFormula],
        env: &mut Env,
        done: &mut dyn FnMut(&Env) -> bool,
    ) -> bool {
        if i == 0 && !self.ready_conjuncts_hold(conjuncts, env, None) {
            return false;
        }
        let Some(v) = vars.get(i) else {
            return done(env);
        };
        for c in &self.domain {
            env.insert(v.clone(), c.clone());
            if self.ready_conjuncts_hold(conjuncts, env, Some(v)) && self.search(vars, i + 1, conjuncts, env, done) {
                env.remove(v);
                return true;
            }
        }
        env.remove(v);
        false
    }

    /// Checks conjuncts whose free variables are all bound; with `just_bound`,
    /// only those mentioning it.
    fn ready_conjuncts_hold(&self, conjuncts: &[&PeFormula], env: &mut Env, just_bound: Option<&String>) -> bool {
        for c in conjuncts {
            let fv = c.free_vars();
            if just_bound.is_some_and(|v| !fv.contains(v)) {
                continue;
            }
            if fv.iter().all(|v| env.contains_key(v)) && !self.holds(c, env) {
                return false;
            }
        }
        true
    }
}
