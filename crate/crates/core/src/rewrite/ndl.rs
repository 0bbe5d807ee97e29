//! Nonrecursive datalog: programs, the translation from PE formulas, and
//! bottom-up evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use super::pe::{PeFormula, PeQuery};
use super::RewriteError;
use crate::chase::Answers;
use crate::lex::{content_lines, Cursor, Token};
use crate::logic::{Atom, DataInstance};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NdlAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl NdlAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    fn size(&self) -> usize {
        1 + self.args.len()
    }
}

impl From<&Atom> for NdlAtom {
    fn from(a: &Atom) -> Self {
        NdlAtom::new(a.predicate(), a.terms().into_iter().cloned().collect())
    }
}

impl fmt::Display for NdlAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdlRule {
    pub head: NdlAtom,
    pub body: Vec<NdlAtom>,
}

impl fmt::Display for NdlRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return write!(f, "{}.", self.head);
        }
        write!(f, "{} :- ", self.head)?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// A program with a designated goal predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdlProgram {
    rules: Vec<NdlRule>,
    goal: String,
    goal_arity: usize,
}

impl NdlProgram {
    /// Checks safety, consistent arities, goal arity and acyclicity.
    pub fn new(rules: Vec<NdlRule>, goal: impl Into<String>, goal_arity: usize) -> Result<Self, RewriteError> {
        let p = NdlProgram {
            rules,
            goal: goal.into(),
            goal_arity,
        };
        p.validate()?;
        p.topological_order()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), RewriteError> {
        let mut arity: BTreeMap<&str, usize> = BTreeMap::new();
        arity.insert(&self.goal, self.goal_arity);
        for r in &self.rules {
            for a in std::iter::once(&r.head).chain(&r.body) {
                let k = *arity.entry(&a.predicate).or_insert(a.args.len());
                if k != a.args.len() {
                    return Err(RewriteError::Arity {
                        predicate: a.predicate.clone(),
                        expected: k,
                        found: a.args.len(),
                    });
                }
            }
            let body_vars: BTreeSet<&String> = r.body.iter().flat_map(|a| &a.args).collect();
            if let Some(v) = r.head.args.iter().find(|v| !body_vars.contains(v)) {
                return Err(RewriteError::Unsafe(format!("head variable {v} missing from the body of `{r}`")));
            }
        }
        Ok(())
    }

    pub fn rules(&self) -> &[NdlRule] {
        &self.rules
    }

    pub fn goal(&self) -> &str {
        &self.goal
    }

    pub fn goal_arity(&self) -> usize {
        self.goal_arity
    }

    /// Predicates defined by some rule.
    pub fn idb_predicates(&self) -> BTreeSet<&str> {
        self.rules.iter().map(|r| r.head.predicate.as_str()).collect()
    }

    /// Sum over rules of head and body symbols, plus one for the goal declaration.
    pub fn size(&self) -> usize {
        1 + self
            .rules
            .iter()
            .map(|r| r.head.size() + r.body.iter().map(NdlAtom::size).sum::<usize>())
            .sum::<usize>()
    }

    /// Defined predicates ordered so that every rule only uses earlier ones.
    pub fn topological_order(&self) -> Result<Vec<String>, RewriteError> {
        let idb = self.idb_predicates();
        let mut deps: BTreeMap<&str, BTreeSet<&str>> = idb.iter().map(|p| (*p, BTreeSet::new())).collect();
        for r in &self.rules {
            for a in &r.body {
                if idb.contains(a.predicate.as_str()) {
                    deps.get_mut(r.head.predicate.as_str()).unwrap().insert(&a.predicate);
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: HashMap<&str, u8> = HashMap::new();
        let mut order = Vec::new();
        fn visit<'a>(
            p: &'a str,
            deps: &BTreeMap<&'a str, BTreeSet<&'a str>>,
            state: &mut HashMap<&'a str, u8>,
            order: &mut Vec<String>,
        ) -> Result<(), RewriteError> {
            match state.get(p) {
                Some(2) => return Ok(()),
                Some(1) => return Err(RewriteError::Cyclic(p.to_string())),
                _ => {}
            }
            state.insert(p, 1);
            for q in &deps[p] {
                visit(q, deps, state, order)?;
            }
            state.insert(p, 2);
            order.push(p.to_string());
            Ok(())
        }
        for p in &idb {
            visit(p, &deps, &mut state, &mut order)?;
        }
        Ok(order)
    }
}

impl fmt::Display for NdlProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        writeln!(f, "goal {}/{}", self.goal, self.goal_arity)
    }
}

fn ndl_atom(c: &mut Cursor) -> Result<NdlAtom, String> {
    let pred = c.ident()?;
    c.expect(&Token::LParen)?;
    let mut args = Vec::new();
    if !c.eat(&Token::RParen) {
        loop {
            args.push(c.ident()?);
            if c.eat(&Token::RParen) {
                break;
            }
            c.expect(&Token::Comma)?;
        }
    }
    Ok(NdlAtom::new(pred, args))
}

/// Parses the text form written by `Display`.
pub fn parse_ndl(text: &str) -> Result<NdlProgram, RewriteError> {
    let mut rules = Vec::new();
    let mut goal = None;
    for (line_no, line) in content_lines(text) {
        let err = |msg: String| RewriteError::Syntax { line: line_no, msg };
        if goal.is_some() {
            return Err(err("nothing may follow the goal line".into()));
        }
        if let Some(rest) = line.strip_prefix("goal ") {
            let (name, k) = rest
                .trim()
                .split_once('/')
                .ok_or_else(|| err("expected `goal G/k`".into()))?;
            let k: usize = k.trim().parse().map_err(|_| err(format!("bad goal arity `{k}`")))?;
            goal = Some((name.trim().to_string(), k));
            continue;
        }
        let mut c = Cursor::new(line).map_err(err)?;
        let head = ndl_atom(&mut c).map_err(err)?;
        let mut body = Vec::new();
        if c.eat(&Token::ColonDash) {
            body.push(ndl_atom(&mut c).map_err(err)?);
            while c.eat(&Token::Comma) {
                body.push(ndl_atom(&mut c).map_err(err)?);
            }
        }
        c.expect(&Token::Dot).map_err(err)?;
        c.finish().map_err(err)?;
        rules.push(NdlRule { head, body });
    }
    let (goal, k) = goal.ok_or_else(|| RewriteError::Syntax {
        line: text.lines().count().max(1),
        msg: "missing `goal G/k` line".into(),
    })?;
    NdlProgram::new(rules, goal, k)
}

/// All goal tuples derivable from `data`, computed predicate by predicate in
/// dependency order.
pub fn eval_ndl(p: &NdlProgram, data: &DataInstance) -> Result<Answers, RewriteError> {
    let order = p.topological_order()?;
    let mut rel: HashMap<String, HashSet<Vec<String>>> = HashMap::new();
    for (pred, c) in data.unary_facts() {
        rel.entry(pred.clone()).or_default().insert(vec![c.clone()]);
    }
    for (pred, a, b) in data.binary_facts() {
        rel.entry(pred.clone()).or_default().insert(vec![a.clone(), b.clone()]);
    }
    for pred in &order {
        let mut derived = HashSet::new();
        for r in p.rules.iter().filter(|r| &r.head.predicate == pred) {
            join(&r.body, &rel, &mut HashMap::new(), &mut |env| {
                derived.insert(r.head.args.iter().map(|v| env[v.as_str()].to_string()).collect());
            });
        }
        rel.entry(pred.clone()).or_default().extend(derived);
    }
    Ok(rel.remove(&p.goal).unwrap_or_default().into_iter().collect())
}

/// Enumerates satisfying assignments of `body`, most-bound atom first.
fn join<'a>(
    body: &[NdlAtom],
    rel: &'a HashMap<String, HashSet<Vec<String>>>,
    env: &mut HashMap<String, &'a str>,
    emit: &mut dyn FnMut(&HashMap<String, &'a str>),
) {
    if body.is_empty() {
        emit(env);
        return;
    }
    let (i, _) = body
        .iter()
        .enumerate()
        .max_by_key(|(i, a)| (a.args.iter().filter(|v| env.contains_key(v.as_str())).count(), usize::MAX - i))
        .unwrap();
    let atom = &body[i];
    let rest: Vec<NdlAtom> = body.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a.clone()).collect();
    let Some(tuples) = rel.get(&atom.predicate) else {
        return;
    };
    for t in tuples {
        let mut bound = Vec::new();
        let mut ok = true;
        for (v, c) in atom.args.iter().zip(t) {
            match env.get(v.as_str()) {
                Some(&b) if b != c => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    env.insert(v.clone(), c);
                    bound.push(v.clone());
                }
            }
        }
        if ok {
            join(&rest, rel, env, emit);
        }
        for v in bound {
            env.remove(&v);
        }
    }
}

/// Generates predicate names that clash with nothing already in use.
pub(crate) struct FreshNames {
    used: BTreeSet<String>,
    counter: usize,
}

impl FreshNames {
    pub(crate) fn new(used: impl IntoIterator<Item = String>) -> Self {
        Self {
            used: used.into_iter().collect(),
            counter: 0,
        }
    }

    /// `base` itself if free, otherwise `base_1`, `base_2`, ...
    pub(crate) fn named(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 0;
        while self.used.contains(&name) {
            k += 1;
            name = format!("{base}_{k}");
        }
        self.used.insert(name.clone());
        name
    }

    /// `N1`, `N2`, ... skipping names in use.
    pub(crate) fn next(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("N{}", self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Translates a formula into rules: one fresh predicate per connective over
/// the connective's free variables (sorted), atoms used in place.
/// A rule body with the variable substitution its equalities induce.
type Body = (HashMap<String, String>, Vec<NdlAtom>);

pub(crate) struct Translator<'a> {
    pub(crate) names: &'a mut FreshNames,
    pub(crate) rules: Vec<NdlRule>,
}

impl Translator<'_> {
    /// Returns an atom equivalent to `f` over its free variables.
    pub(crate) fn atom_for(&mut self, f: &PeFormula, name: Option<String>) -> Result<NdlAtom, RewriteError> {
        match f {
            PeFormula::Atom(a) if name.is_none() => Ok(NdlAtom::from(a)),
            PeFormula::Eq(..) => Err(RewriteError::Unsafe(format!(
                "equality {f} must occur inside a conjunction that binds both sides"
            ))),
            _ => {
                let fv: Vec<String> = f.free_vars().into_iter().collect();
                let bodies = self.bodies(f)?;
                let pred = name.unwrap_or_else(|| self.names.next());
                for (subst, body) in bodies {
                    let head = NdlAtom::new(&pred, fv.iter().map(|v| apply(&subst, v)).collect());
                    self.rules.push(NdlRule { head, body });
                }
                Ok(NdlAtom::new(pred, fv))
            }
        }
    }

    /// Rule bodies whose union defines `f`, each with the variable
    /// substitution its equalities induce.
    fn bodies(&mut self, f: &PeFormula) -> Result<Vec<Body>, RewriteError> {
        match f {
            PeFormula::Atom(a) => Ok(vec![(HashMap::new(), vec![NdlAtom::from(a)])]),
            PeFormula::Or(cs) => cs
                .iter()
                .map(|c| Ok((HashMap::new(), vec![self.atom_for(c, None)?])))
                .collect(),
            PeFormula::And(cs) => {
                let mut subst = HashMap::new();
                let mut body = Vec::new();
                for c in cs {
                    if let PeFormula::Eq(a, b) = c {
                        let (ra, rb) = (apply(&subst, a), apply(&subst, b));
                        if ra != rb {
                            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
                            for v in subst.values_mut() {
                                if *v == drop {
                                    *v = keep.clone();
                                }
                            }
                            subst.insert(drop, keep);
                        }
                    } else {
                        body.push(self.atom_for(c, None)?);
                    }
                }
                for a in &mut body {
                    for v in &mut a.args {
                        *v = apply(&subst, v);
                    }
                }
                Ok(vec![(subst, body)])
            }
            PeFormula::Exists(_, child) => match child.as_ref() {
                PeFormula::And(_) | PeFormula::Atom(_) => self.bodies(child),
                other => Ok(vec![(HashMap::new(), vec![self.atom_for(other, None)?])]),
            },
            PeFormula::Eq(..) => unreachable!("handled by atom_for"),
        }
    }
}

fn apply(subst: &HashMap<String, String>, v: &str) -> String {
    subst.get(v).cloned().unwrap_or_else(|| v.to_string())
}

/// Names used by a formula, so fresh predicates avoid them.
pub(crate) fn names_in(f: &PeFormula) -> BTreeSet<String> {
    f.predicates()
}

/// One predicate per connective, then `G(x) :- F(x)` for the top formula `F`.
pub fn pe_to_ndl(q: &PeQuery) -> Result<NdlProgram, RewriteError> {
    q.validate()?;
    let mut names = FreshNames::new(names_in(&q.formula));
    let goal = names.named("G");
    let top = names.named("F");
    let mut tr = Translator {
        names: &mut names,
        rules: Vec::new(),
    };
    let f_atom = tr.atom_for(&q.formula, Some(top))?;
    let mut rules = tr.rules;
    rules.push(NdlRule {
        head: NdlAtom::new(&goal, q.answer_vars.clone()),
        body: vec![f_atom],
    });
    NdlProgram::new(rules, goal, q.answer_vars.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_data;
    use crate::rewrite::pe::{eval_pe, parse_pe};

    const SIX_RULES: &str = "\
N1(y,z) :- worksOn(z,y).
N1(y,z) :- isManagedBy(y,z).
N1(y,z) :- involves(y,z).
G(x) :- worksOn(x,y), N1(y,z), Professor(z).
G(x) :- worksOn(x,y), Project(y).
G(x) :- Student(x).
goal G/1
";
    const DATA: &str = "Student(c)\nworksOn(c,b)\nProject(b)\nisManagedBy(b,a)";

    fn answers(cs: &[&str]) -> Answers {
        cs.iter().map(|c| vec![c.to_string()]).collect()
    }

    #[test]
    fn six_rule_program_answers_c() {
        let p = parse_ndl(SIX_RULES).unwrap();
        assert_eq!(p.rules().len(), 6);
        assert_eq!(eval_ndl(&p, &parse_data(DATA).unwrap()).unwrap(), answers(&["c"]));
    }

    #[test]
    fn six_rule_program_without_student_fact() {
        // the worksOn/Project disjunct still fires
        let p = parse_ndl(SIX_RULES).unwrap();
        let d = parse_data("worksOn(c,b)\nProject(b)").unwrap();
        assert_eq!(eval_ndl(&p, &d).unwrap(), answers(&["c"]));
    }

    #[test]
    fn zero_rules_give_nothing() {
        let p = NdlProgram::new(vec![], "G", 1).unwrap();
        assert!(eval_ndl(&p, &parse_data(DATA).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn single_atom_gives_two_rules() {
        let p = pe_to_ndl(&parse_pe("q(x) :- A(x)").unwrap()).unwrap();
        assert_eq!(p.to_string(), "F(x) :- A(x).\nG(x) :- F(x).\ngoal G/1\n");
    }

    #[test]
    fn or_of_two_atoms_gives_three_rules() {
        let f = parse_pe("q(x) :- (A(x) | B(x))").unwrap();
        let p = pe_to_ndl(&f).unwrap();
        assert_eq!(p.rules().len(), 3);
        // F(x) :- A(x). F(x) :- B(x). G(x) :- F(x).
        assert_eq!(p.size(), 4 + 4 + 4 + 1);
        assert!(p.size() <= 4 * f.size() + 1);
    }

    #[test]
    fn q_prime_translates_equivalently() {
        let q = parse_pe("q(x) :- ((exists y,z: (worksOn(x,y) & (worksOn(z,y) | isManagedBy(y,z) | involves(y,z)) & Professor(z))) | (exists y: (worksOn(x,y) & Project(y))) | Student(x))").unwrap();
        let p = pe_to_ndl(&q).unwrap();
        let d = parse_data(DATA).unwrap();
        assert_eq!(eval_ndl(&p, &d).unwrap(), eval_pe(&q, &d));
        assert_eq!(parse_ndl(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn fresh_names_avoid_signature() {
        let q = parse_pe("q(x) :- (G(x) | F(x) | (N1(x) & N2(x)))").unwrap();
        let p = pe_to_ndl(&q).unwrap();
        assert_eq!(p.goal(), "G_1");
        let d = parse_data("N1(a)\nN2(a)\nN1(b)\nF(c)").unwrap();
        assert_eq!(eval_ndl(&p, &d).unwrap(), answers(&["a", "c"]));
    }

    #[test]
    fn equalities_become_substitutions() {
        let q = parse_pe("q(x,y) :- (R(x,x) & x = y)").unwrap();
        let p = pe_to_ndl(&q).unwrap();
        let d = parse_data("R(a,a)\nR(a,b)").unwrap();
        assert_eq!(eval_ndl(&p, &d).unwrap(), Answers::from([vec!["a".to_string(), "a".to_string()]]));
    }

    #[test]
    fn empty_conjunction_becomes_a_fact() {
        let q = parse_pe("q() :- true").unwrap();
        let p = pe_to_ndl(&q).unwrap();
        assert_eq!(p.to_string(), "F().\nG() :- F().\ngoal G/0\n");
        assert_eq!(eval_ndl(&p, &DataInstance::new()).unwrap(), Answers::from([vec![]]));
        assert!(eval_ndl(&pe_to_ndl(&parse_pe("q() :- false").unwrap()).unwrap(), &DataInstance::new())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cycles_and_unsafe_rules_are_rejected() {
        assert!(matches!(
            parse_ndl("A(x) :- B(x).\nB(x) :- A(x).\ngoal A/1"),
            Err(RewriteError::Cyclic(_))
        ));
        assert!(matches!(parse_ndl("G(x) :- B(y).\ngoal G/1"), Err(RewriteError::Unsafe(_))));
        assert!(matches!(parse_ndl("G(x) :- B(x).\ngoal G/2"), Err(RewriteError::Arity { .. })));
        assert!(parse_ndl("G(x) :- B(x).").is_err());
    }
}
