//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, Gate, InputClass};
use crate::hgp::{HypergraphProgram, Label};
use crate::logic::{Atom, Axiom, ConjunctiveQuery, DataInstance, Ontology, RuleVar, Signature};

const UNARY: [&str; 3] = ["A", "B", "C"];
const BINARY: [&str; 2] = ["R", "S"];
const VARS: [&str; 4] = ["x", "y", "z", "w"];
const CONSTANTS: [&str; 3] = ["a", "b", "c"];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("nonempty")
}

pub fn ontology<R: Rng>(rng: &mut R, max_axioms: usize) -> Ontology {
    let n = rng.gen_range(0..=max_axioms);
    let mut axioms = Vec::new();
    for _ in 0..n {
        let ax = match rng.gen_range(0..3) {
            0 => Axiom::ConceptInclusion {
                sub: pick(rng, &UNARY).into(),
                sup: pick(rng, &UNARY).into(),
            },
            1 => Axiom::RoleInclusion {
                sub: pick(rng, &BINARY).into(),
                sup: pick(rng, &BINARY).into(),
                inverted: rng.gen_bool(0.5),
            },
            _ => {
                let r = pick(rng, &BINARY).to_string();
                let mut conclusion = vec![if rng.gen_bool(0.5) {
                    Atom::Binary(r, RuleVar::X, RuleVar::Y)
                } else {
                    Atom::Binary(r, RuleVar::Y, RuleVar::X)
                }];
                if rng.gen_bool(0.5) {
                    conclusion.push(Atom::Unary(pick(rng, &UNARY).into(), RuleVar::Y));
                }
                Axiom::existential(pick(rng, &UNARY), conclusion).expect("binary atoms link x and y")
            }
        };
        axioms.push(ax);
    }
    Ontology::new(Signature::new(), axioms).expect("fixed arities")
}

fn atom<R: Rng>(rng: &mut R, terms: &[&str]) -> Atom {
    if rng.gen_bool(0.4) {
        Atom::Unary(pick(rng, &UNARY).into(), pick(rng, terms).into())
    } else {
        Atom::Binary(pick(rng, &BINARY).into(), pick(rng, terms).into(), pick(rng, terms).into())
    }
}

pub fn query<R: Rng>(rng: &mut R, max_atoms: usize) -> ConjunctiveQuery {
    let k = rng.gen_range(1..=max_atoms.max(1));
    let nvars = rng.gen_range(1..=VARS.len());
    let atoms: Vec<Atom> = (0..k).map(|_| atom(rng, &VARS[..nvars])).collect();
    let mut used: Vec<String> = atoms.iter().flat_map(|a| a.terms().into_iter().cloned()).collect();
    used.sort();
    used.dedup();
    used.shuffle(rng);
    let answers = rng.gen_range(0..=used.len().min(2));
    used.truncate(answers);
    used.sort();
    ConjunctiveQuery::new(used, atoms).expect("answer variables occur in atoms")
}

pub fn data<R: Rng>(rng: &mut R, max_constants: usize, max_facts: usize) -> DataInstance {
    let consts = &CONSTANTS[..max_constants.clamp(1, CONSTANTS.len())];
    let mut d = DataInstance::new();
    for _ in 0..rng.gen_range(0..=max_facts) {
        d.add_fact(&atom(rng, consts));
    }
    d
}

fn label<R: Rng>(rng: &mut R, num_vars: usize) -> Label {
    match rng.gen_range(0..10) {
        0 => Label::Const0,
        1 => Label::Const1,
        _ if num_vars == 0 => Label::Const0,
        2..=3 => Label::NegVar(rng.gen_range(0..num_vars)),
        _ => Label::Var(rng.gen_range(0..num_vars)),
    }
}

/// Vertices `v1..`, edges `e1..` as random nonempty vertex sets; labels mix
/// literals and constants.
pub fn hgp<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, max_vars: usize) -> HypergraphProgram {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let ne = rng.gen_range(1..=max_edges.max(1));
    let n = rng.gen_range(1..=max_vars.max(1));
    let mut h = HypergraphProgram::new(n);
    for v in 0..nv {
        h.add_vertex(&format!("v{}", v + 1), label(rng, n)).expect("fresh");
    }
    for e in 0..ne {
        let size = rng.gen_range(1..=nv.min(3));
        let mut vs: Vec<usize> = (0..nv).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        h.add_edge_by_index(&format!("e{}", e + 1), vs).expect("nonempty");
    }
    h
}

/// Like [`hgp`], sometimes guarding an edge with a variable.
pub fn guarded_hgp<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, max_vars: usize) -> HypergraphProgram {
    let mut h = hgp(rng, max_vertices, max_edges, max_vars);
    for e in 0..h.edges().len() {
        if rng.gen_bool(0.2) {
            let g = rng.gen_range(0..h.num_vars());
            h.set_edge_var(e, g).expect("in range");
        }
    }
    h
}

fn random_gate<R: Rng>(rng: &mut R, i: usize, n: usize, m: usize) -> Gate {
    let kinds = if i == 0 { 3 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 if n > 0 => Gate::Input(InputClass::X, rng.gen_range(0..n)),
        1 if m > 0 => Gate::Input(InputClass::Y, rng.gen_range(0..m)),
        0..=2 => Gate::Const(rng.gen_bool(0.5)),
        3 => Gate::Not(rng.gen_range(0..i)),
        4 => Gate::And(rng.gen_range(0..i), rng.gen_range(0..i)),
        _ => Gate::Or(rng.gen_range(0..i), rng.gen_range(0..i)),
    }
}

/// A circuit with `1..=max_gates` gates whose last gate is the output.
pub fn circuit<R: Rng>(rng: &mut R, max_gates: usize, n: usize, m: usize) -> Circuit {
    let k = rng.gen_range(1..=max_gates.max(1));
    let gates: Vec<Gate> = (0..k).map(|i| random_gate(rng, i, n, m)).collect();
    Circuit::new(gates, k - 1)
        .and_then(|c| c.with_inputs(n, m))
        .expect("operands refer to earlier gates")
}

/// Every circuit with at most `max_gates` gates over `n` x- and `m` y-inputs,
/// output at the last gate, passed to `f` one at a time.
pub fn each_circuit(max_gates: usize, n: usize, m: usize, f: &mut dyn FnMut(&Circuit)) {
    fn go(gates: &mut Vec<Gate>, max: usize, n: usize, m: usize, f: &mut dyn FnMut(&Circuit)) {
        if !gates.is_empty() {
            let c = Circuit::new(gates.clone(), gates.len() - 1)
                .and_then(|c| c.with_inputs(n, m))
                .expect("well-formed");
            f(&c);
        }
        if gates.len() == max {
            return;
        }
        let i = gates.len();
        let mut options: Vec<Gate> = (0..n).map(|k| Gate::Input(InputClass::X, k)).collect();
        options.extend((0..m).map(|k| Gate::Input(InputClass::Y, k)));
        options.extend([Gate::Const(false), Gate::Const(true)]);
        for a in 0..i {
            options.push(Gate::Not(a));
            for b in a..i {
                options.push(Gate::And(a, b));
                options.push(Gate::Or(a, b));
            }
        }
        for g in options {
            gates.push(g);
            go(gates, max, n, m, f);
            gates.pop();
        }
    }
    go(&mut Vec::new(), max_gates, n, m, f);
}

/// `n` pairwise disjoint two-vertex hyperedges `e_i = {u_i, v_i}` labelled `x_i`, `¬x_i`.
pub fn disjoint_edges(n: usize) -> HypergraphProgram {
    let mut h = HypergraphProgram::new(n);
    for i in 0..n {
        let u = h.add_vertex(&format!("u{}", i + 1), Label::Var(i)).expect("fresh");
        let v = h.add_vertex(&format!("v{}", i + 1), Label::NegVar(i)).expect("fresh");
        h.add_edge_by_index(&format!("e{}", i + 1), vec![u, v]).expect("nonempty");
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_reproducible() {
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            format!(
                "{}|{}|{}|{}|{}",
                ontology(&mut rng, 4),
                query(&mut rng, 4),
                data(&mut rng, 3, 6),
                hgp(&mut rng, 6, 4, 6),
                circuit(&mut rng, 8, 4, 2)
            )
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn bounds_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(ontology(&mut rng, 4).axioms().len() <= 4);
            assert!(query(&mut rng, 4).atoms().len() <= 4);
            assert!(data(&mut rng, 3, 6).constants().len() <= 3);
            let h = hgp(&mut rng, 6, 4, 6);
            assert!(h.num_vertices() <= 6 && h.edges().len() <= 4 && h.num_vars() <= 6);
            let c = circuit(&mut rng, 8, 4, 2);
            assert!(c.gates().len() <= 8 && c.num_x() == 4 && c.num_y() == 2);
        }
    }

    #[test]
    fn circuit_enumeration_counts() {
        // one gate: 2 x-inputs, 1 y-input, 2 constants
        let mut k = 0;
        each_circuit(1, 2, 1, &mut |_| k += 1);
        assert_eq!(k, 5);
        // second gate: the same 5 plus not/and/or of gate 0
        k = 0;
        each_circuit(2, 2, 1, &mut |_| k += 1);
        assert_eq!(k, 5 + 5 * 8);
    }

    #[test]
    fn disjoint_family() {
        let h = disjoint_edges(3);
        assert_eq!((h.num_vertices(), h.edges().len(), h.degree()), (6, 3, 1));
    }
}
