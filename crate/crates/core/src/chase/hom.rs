//! Homomorphism search from query atoms into a universal model, and certain answers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{chase, ElemId, UniversalModel};
use crate::logic::{Atom, ConjunctiveQuery, DataInstance, Ontology};

/// Answer tuples over data constants; a Boolean query yields `{()}` or `{}`.
pub type Answers = BTreeSet<Vec<String>>;

/// Backtracking search for an atom-preserving map `vars -> elements`.
///
/// `fixed` pins some variables; `allowed` filters candidate elements for the rest.
pub fn find_homomorphism(
    atoms: &[Atom],
    model: &UniversalModel,
    fixed: &HashMap<String, ElemId>,
    allowed: &dyn Fn(&str, ElemId) -> bool,
) -> Option<HashMap<String, ElemId>> {
    let mut vars: Vec<&str> = Vec::new();
    for a in atoms {
        for t in a.terms() {
            if !vars.contains(&t.as_str()) {
                vars.push(t);
            }
        }
    }
    let mut assignment: HashMap<String, ElemId> = HashMap::new();
    for (v, e) in fixed {
        if vars.contains(&v.as_str()) {
            assignment.insert(v.clone(), *e);
        }
    }
    // atoms whose variables are all fixed must already hold
    for a in atoms {
        if a.terms().iter().all(|t| assignment.contains_key(t.as_str()))
            && !atom_holds(a, model, &assignment)
        {
            return None;
        }
    }
    let order = variable_order(atoms, &vars, &assignment);
    let mut search = Search {
        atoms,
        model,
        allowed,
        order: &order,
        assignment,
    };
    if search.extend(0) {
        Some(search.assignment)
    } else {
        None
    }
}

/// Fixed variables first, then greedily the variable most connected to those already placed.
fn variable_order<'a>(
    atoms: &[Atom],
    vars: &[&'a str],
    fixed: &HashMap<String, ElemId>,
) -> Vec<&'a str> {
    let mut placed: BTreeSet<&str> = fixed.keys().map(String::as_str).collect();
    let mut order = Vec::new();
    let mut remaining: Vec<&str> = vars.iter().copied().filter(|v| !placed.contains(v)).collect();
    while !remaining.is_empty() {
        let score = |v: &str| -> (usize, usize) {
            let mut links = 0;
            let mut unary = 0;
            for a in atoms {
                match a {
                    Atom::Binary(_, s, t) => {
                        if (s == v && placed.contains(t.as_str())) || (t == v && placed.contains(s.as_str())) {
                            links += 1;
                        }
                    }
                    Atom::Unary(_, t) if t == v => unary += 1,
                    _ => {}
                }
            }
            (links, unary)
        };
        let (best, _) = remaining
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| score(a).cmp(&score(b)).then(j.cmp(i)))
            .unwrap();
        let v = remaining.remove(best);
        placed.insert(v);
        order.push(v);
    }
    order
}

fn atom_holds(atom: &Atom, model: &UniversalModel, asg: &HashMap<String, ElemId>) -> bool {
    match atom {
        Atom::Unary(p, t) => model.has_label(asg[t.as_str()], p),
        Atom::Binary(p, s, t) => model.has_edge(p, asg[s.as_str()], asg[t.as_str()]),
    }
}

struct Search<'a> {
    atoms: &'a [Atom],
    model: &'a UniversalModel,
    allowed: &'a dyn Fn(&str, ElemId) -> bool,
    order: &'a [&'a str],
    assignment: HashMap<String, ElemId>,
}

impl Search<'_> {
    fn candidates(&self, v: &str) -> Vec<ElemId> {
        for a in self.atoms {
            if let Atom::Binary(p, s, t) = a {
                if s == v {
                    if let Some(&e) = self.assignment.get(t.as_str()) {
                        return self.model.predecessors(p, e).to_vec();
                    }
                }
                if t == v {
                    if let Some(&e) = self.assignment.get(s.as_str()) {
                        return self.model.successors(p, e).to_vec();
                    }
                }
            }
        }
        for a in self.atoms {
            if let Atom::Unary(p, t) = a {
                if t == v {
                    return self.model.with_label(p).to_vec();
                }
            }
        }
        (0..self.model.len()).collect()
    }

    fn consistent(&self, v: &str) -> bool {
        self.atoms.iter().all(|a| {
            let terms = a.terms();
            if !terms.iter().any(|t| t.as_str() == v) {
                return true;
            }
            if !terms.iter().all(|t| self.assignment.contains_key(t.as_str())) {
                return true;
            }
            atom_holds(a, self.model, &self.assignment)
        })
    }

    fn extend(&mut self, i: usize) -> bool {
        let Some(&v) = self.order.get(i) else {
            return true;
        };
        for e in self.candidates(v) {
            if !(self.allowed)(v, e) {
                continue;
            }
            self.assignment.insert(v.to_string(), e);
            if self.consistent(v) && self.extend(i + 1) {
                return true;
            }
            self.assignment.remove(v);
        }
        false
    }
}

/// True iff `q` maps into `model` extending `fixed` (answer variable -> constant name),
/// with answer variables sent to constants only.
pub fn homomorphism_exists(
    q: &ConjunctiveQuery,
    model: &UniversalModel,
    fixed: &BTreeMap<String, String>,
) -> bool {
    let mut pinned = HashMap::new();
    for (v, c) in fixed {
        match model.id_of(c) {
            Some(id) if model.element(id).is_constant() => {
                pinned.insert(v.clone(), id);
            }
            _ => return false,
        }
    }
    let allowed = |v: &str, e: ElemId| !q.is_answer_var(v) || model.element(e).is_constant();
    find_homomorphism(q.atoms(), model, &pinned, &allowed).is_some()
}

/// Every tuple of constants the answer variables can take under some homomorphism.
pub fn answers_in_model(q: &ConjunctiveQuery, model: &UniversalModel) -> Answers {
    let constants: Vec<ElemId> = model.constants().collect();
    let k = q.answer_vars().len();
    let mut out = Answers::new();
    if k == 0 {
        if homomorphism_exists(q, model, &BTreeMap::new()) {
            out.insert(Vec::new());
        }
        return out;
    }
    if constants.is_empty() {
        return out;
    }
    let mut idx = vec![0usize; k];
    loop {
        let fixed: BTreeMap<String, String> = q
            .answer_vars()
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.clone(), model.element(constants[i]).name.clone()))
            .collect();
        if homomorphism_exists(q, model, &fixed) {
            out.insert(
                idx.iter()
                    .map(|&i| model.element(constants[i]).name.clone())
                    .collect(),
            );
        }
        // odometer over constant tuples
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < constants.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Chase depth used by the certain-answer oracle.
///
/// At least `max(2, |vars(q)|) + 1`, and at least `|vars(q)| + #existential rules`:
/// an anonymous element's subtree depends only on its generating rule, so every
/// rule that can fire at all fires first within `#rules` steps of the data, and a
/// connected image of the query then lies within `|vars(q)| - 1` further steps.
pub fn oracle_depth(q: &ConjunctiveQuery, ontology: &Ontology) -> usize {
    let n = q.num_vars();
    let rules = ontology.existential_rules().count();
    (n.max(2) + 1).max(n + rules)
}

pub fn certain_answers(data: &DataInstance, ontology: &Ontology, q: &ConjunctiveQuery) -> Answers {
    certain_answers_at_depth(data, ontology, q, oracle_depth(q, ontology))
}

pub fn certain_answers_at_depth(
    data: &DataInstance,
    ontology: &Ontology,
    q: &ConjunctiveQuery,
    depth_limit: usize,
) -> Answers {
    let model = chase(data, ontology, depth_limit);
    answers_in_model(q, &model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_data, parse_ontology, parse_query};

    const EXAMPLE: &str = "\
Student(x) -> exists y: worksOn(x,y), Project(y)
Project(x) -> exists y: isManagedBy(x,y), Professor(y)
worksOn(x,y) -> involves(y,x)
isManagedBy(x,y) -> involves(x,y)
";
    const DATA: &str = "Student(c)\nworksOn(c,b)\nProject(b)\nisManagedBy(b,a)";
    const QUERY: &str = "q(x) :- worksOn(x,y), involves(y,z), Professor(z)";

    fn tuple(c: &str) -> Vec<String> {
        vec![c.to_string()]
    }

    #[test]
    fn example_certain_answers() {
        let t = parse_ontology(EXAMPLE).unwrap();
        let d = parse_data(DATA).unwrap();
        let q = parse_query(QUERY).unwrap();
        let ans = certain_answers(&d, &t, &q);
        assert_eq!(ans, Answers::from([tuple("c")]));
    }

    #[test]
    fn incomplete_data_without_ontology() {
        let d = parse_data(DATA).unwrap();
        let q = parse_query(QUERY).unwrap();
        assert!(certain_answers(&d, &Ontology::empty(), &q).is_empty());
    }

    #[test]
    fn boolean_direct_match() {
        let d = parse_data("A(a)").unwrap();
        let q = parse_query("q() :- A(x)").unwrap();
        assert_eq!(certain_answers(&d, &Ontology::empty(), &q), Answers::from([vec![]]));
        let q = parse_query("q() :- B(x)").unwrap();
        assert!(certain_answers(&d, &Ontology::empty(), &q).is_empty());
    }

    #[test]
    fn fixed_answer_variables() {
        let t = parse_ontology(EXAMPLE).unwrap();
        let d = parse_data(DATA).unwrap();
        let q = parse_query(QUERY).unwrap();
        let m = chase(&d, &t, 3);
        let fix = |c: &str| BTreeMap::from([("x".to_string(), c.to_string())]);
        assert!(homomorphism_exists(&q, &m, &fix("c")));
        assert!(!homomorphism_exists(&q, &m, &fix("a")));
        assert!(!homomorphism_exists(&q, &m, &fix("b")));
        // anonymous elements can never be pinned
        assert!(!homomorphism_exists(&q, &m, &fix("c/Student#0")));
    }

    #[test]
    fn empty_query_always_maps() {
        let q = ConjunctiveQuery::new(vec![], vec![]).unwrap();
        let m = chase(&DataInstance::new(), &Ontology::empty(), 1);
        assert!(homomorphism_exists(&q, &m, &BTreeMap::new()));
    }

    #[test]
    fn deep_image_needs_rule_count_depth() {
        // the S-edge only appears four existential steps below the data
        let t = parse_ontology(
            "A(x) -> exists y: R(x,y), B(y)\n\
             B(x) -> exists y: R(x,y), C(y)\n\
             C(x) -> exists y: R(x,y), D(y)\n\
             D(x) -> exists y: S(x,y), E(y)",
        )
        .unwrap();
        let d = parse_data("A(a)").unwrap();
        let q = parse_query("q() :- S(u,v), E(v)").unwrap();
        assert_eq!(certain_answers(&d, &t, &q), Answers::from([vec![]]));
        assert!(certain_answers_at_depth(&d, &t, &q, q.num_vars() + 1).is_empty());
    }
}
