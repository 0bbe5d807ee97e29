//! Hypergraph programs to circuits with certificates and back.

use thiserror::Error;

use super::{Circuit, CircuitBuilder, CircuitError, Gate, InputClass};
use crate::hgp::{all_inputs, eval_hgp, HgpError, HypergraphProgram, Label};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("gate {0} has unbounded fan-in; expand it into binary or-gates first")]
    OrMulti(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Hgp(#[from] HgpError),
}

/// A circuit `C(x, y)` with one certificate bit per hyperedge such that
/// `∃y C(x, y)` iff the program accepts `x`: chosen edges are pairwise
/// disjoint and every vertex is chosen or labelled true. Guarded edges
/// additionally require their variable.
pub fn hgp_to_np_circuit(h: &HypergraphProgram) -> Circuit {
    let mut b = CircuitBuilder::new();
    let xs: Vec<usize> = (0..h.num_vars()).map(|k| b.x(k)).collect();
    let ys: Vec<usize> = (0..h.edges().len()).map(|k| b.y(k)).collect();
    let mut neg_x: Vec<Option<usize>> = vec![None; xs.len()];
    let mut neg_y: Vec<Option<usize>> = vec![None; ys.len()];
    let mut clauses = Vec::new();

    for e in 0..ys.len() {
        for f in e + 1..ys.len() {
            if h.edges_intersect(e, f) {
                let ne = *neg_y[e].get_or_insert_with(|| b.not(ys[e]));
                let nf = *neg_y[f].get_or_insert_with(|| b.not(ys[f]));
                clauses.push(b.or(ne, nf));
            }
        }
        if let Some(g) = h.edges()[e].guard {
            let ne = *neg_y[e].get_or_insert_with(|| b.not(ys[e]));
            clauses.push(b.or(ne, xs[g]));
        }
    }
    for (v, edges) in h.incidence().iter().enumerate() {
        let mut literals = Vec::new();
        match h.label(v) {
            Label::Const1 => continue,
            Label::Const0 => {}
            Label::Var(i) => literals.push(xs[i]),
            Label::NegVar(i) => literals.push(*neg_x[i].get_or_insert_with(|| b.not(xs[i]))),
        }
        literals.extend(edges.iter().map(|&e| ys[e]));
        clauses.push(b.balanced(&literals, false, false));
    }
    let out = b.balanced(&clauses, true, true);
    b.finish(out)
        .and_then(|c| c.with_inputs(h.num_vars(), h.edges().len()))
        .expect("well-formed by construction")
}

/// Degree-3 program for `∃y C(x, y)`.
///
/// Gate `i` gets a 0-vertex in exactly two edges `e_i` ("true") and
/// `ē_i` ("false"), so every cover picks one of them. Shared 1-vertices make
/// two edges exclusive; gadgets force the choice to follow the gate's
/// function. With `monotone`, the `¬x` forcing vertices are dropped and the
/// program computes `∃y ∃x' ≤ x C(x', y)`.
pub fn circuit_to_hgp3(c: &Circuit, monotone: bool) -> Result<HypergraphProgram, TranslateError> {
    let mut h = HypergraphProgram::new(c.num_x());
    let k = c.gates().len();
    // vertex lists of e_i (index 2i) and ē_i (index 2i+1)
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); 2 * k];
    let mut extra_edges: Vec<(String, Vec<usize>)> = Vec::new();
    let t = |i: usize| 2 * i;
    let f = |i: usize| 2 * i + 1;
    // repeated input gates share one gadget; separate gadgets could choose
    // different values for the same input
    let mut first_input = std::collections::HashMap::new();
    let rep: Vec<usize> = c
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| match g {
            Gate::Input(class, k) => *first_input.entry((*class, *k)).or_insert(i),
            _ => i,
        })
        .collect();

    for (i, g) in c.gates().iter().enumerate() {
        if rep[i] != i {
            continue;
        }
        let n = i + 1;
        let gv = h.add_vertex(&format!("g{n}"), Label::Const0)?;
        members[t(i)].push(gv);
        members[f(i)].push(gv);
        // a 1-labelled vertex shared by two edges: at most one of them is chosen
        let mut exclusive = |h: &mut HypergraphProgram, name: String, a: usize, b: usize| -> Result<(), HgpError> {
            let v = h.add_vertex(&name, Label::Const1)?;
            members[a].push(v);
            members[b].push(v);
            Ok(())
        };
        match g {
            Gate::Input(InputClass::X, var) => {
                if !monotone {
                    let v = h.add_vertex(&format!("nx{n}"), Label::NegVar(*var))?;
                    members[t(i)].push(v);
                }
                let u = h.add_vertex(&format!("px{n}"), Label::Var(*var))?;
                members[f(i)].push(u);
            }
            Gate::Input(InputClass::Y, _) => {}
            Gate::Const(b) => {
                let v = h.add_vertex(&format!("c{n}"), Label::Const0)?;
                members[if *b { t(i) } else { f(i) }].push(v);
            }
            Gate::Not(j) => {
                exclusive(&mut h, format!("a{n}"), t(i), t(rep[*j]))?;
                exclusive(&mut h, format!("b{n}"), f(i), f(rep[*j]))?;
            }
            Gate::Or(j, jj) | Gate::And(j, jj) => {
                let (j, jj) = (&rep[*j], &rep[*jj]);
                // or: a true operand excludes ē_i; if ē_i is not chosen, w_i
                // needs some k-edge, which needs an operand whose ē is free,
                // i.e. a true operand. and is the same with e and ē swapped.
                let is_or = matches!(g, Gate::Or(..));
                let own_in = if is_or { f(i) } else { t(i) };
                let side = |j: usize| if is_or { t(j) } else { f(j) };
                let other = |j: usize| if is_or { f(j) } else { t(j) };
                exclusive(&mut h, format!("a{n}"), side(*j), own_in)?;
                exclusive(&mut h, format!("b{n}"), side(*jj), own_in)?;
                let h1 = h.add_vertex(&format!("h{n}_1"), Label::Const1)?;
                let h2 = h.add_vertex(&format!("h{n}_2"), Label::Const1)?;
                members[other(*j)].push(h1);
                members[other(*jj)].push(h2);
                let w = h.add_vertex(&format!("w{n}"), Label::Const0)?;
                members[own_in].push(w);
                extra_edges.push((format!("k{n}_1"), vec![h1, w]));
                extra_edges.push((format!("k{n}_2"), vec![h2, w]));
            }
            Gate::OrMulti(_) => return Err(TranslateError::OrMulti(i)),
        }
    }
    let out = h.add_vertex("out", Label::Const0)?;
    members[t(rep[c.output()])].push(out);

    for i in (0..k).filter(|&i| rep[i] == i) {
        h.add_edge_by_index(&format!("e{}", i + 1), std::mem::take(&mut members[t(i)]))?;
        h.add_edge_by_index(&format!("ne{}", i + 1), std::mem::take(&mut members[f(i)]))?;
    }
    for (id, vs) in extra_edges {
        h.add_edge_by_index(&id, vs)?;
    }
    Ok(h)
}

/// Limits for exhaustive equivalence checks.
#[derive(Clone, Copy, Debug)]
pub struct EquivBounds {
    pub max_x: usize,
    pub max_y: usize,
}

impl Default for EquivBounds {
    fn default() -> Self {
        Self { max_x: 10, max_y: 6 }
    }
}

fn check_bounds(c: &Circuit, h: &HypergraphProgram, bounds: EquivBounds) -> Result<(), TranslateError> {
    for (what, value, bound) in [("x-inputs", c.num_x(), bounds.max_x), ("y-inputs", c.num_y(), bounds.max_y)] {
        if value > bound {
            return Err(CircuitError::BoundExceeded { what, value, bound }.into());
        }
    }
    if h.num_vars() != c.num_x() {
        return Err(HgpError::InputLength {
            expected: h.num_vars(),
            found: c.num_x(),
        }
        .into());
    }
    Ok(())
}

/// `∀x: (∃y C(x,y)) = h(x)`.
pub fn equiv_exists(c: &Circuit, h: &HypergraphProgram, bounds: EquivBounds) -> Result<bool, TranslateError> {
    check_bounds(c, h, bounds)?;
    for x in all_inputs(c.num_x()) {
        if c.exists_y(&x)? != eval_hgp(h, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∀x: (∃y ∃x' ≤ x C(x',y)) = h(x)`.
pub fn equiv_exists_monotone(
    c: &Circuit,
    h: &HypergraphProgram,
    bounds: EquivBounds,
) -> Result<bool, TranslateError> {
    check_bounds(c, h, bounds)?;
    let n = c.num_x();
    let feasible: Vec<bool> = all_inputs(n).map(|x| c.exists_y(&x)).collect::<Result<_, _>>()?;
    for (xi, x) in all_inputs(n).enumerate() {
        // x' ≤ x iff the bits of x' are a subset of those of x
        let mut sub = xi;
        let mut any = false;
        loop {
            if feasible[sub] {
                any = true;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & xi;
        }
        if any != eval_hgp(h, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::hgp::{eval_hgp_exhaustive, parse_hgp};

    fn check(text: &str) -> HypergraphProgram {
        let c = parse_circuit(text).unwrap();
        let h = circuit_to_hgp3(&c, false).unwrap();
        assert!(h.degree() <= 3, "degree {}", h.degree());
        assert!(equiv_exists(&c, &h, EquivBounds::default()).unwrap(), "{text}");
        h
    }

    #[test]
    fn single_input() {
        let h = check("g1 = input x1; output g1");
        assert!(!eval_hgp(&h, &[false]).unwrap());
        assert!(eval_hgp(&h, &[true]).unwrap());
    }

    #[test]
    fn and_with_negation() {
        check("g1 = input x1; g2 = input x2; g3 = not g2; g4 = and g1 g3; output g4");
    }

    #[test]
    fn certificate_is_projected() {
        let h = check("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3");
        assert_eq!(h.num_vars(), 1);
        assert!(eval_hgp(&h, &[true]).unwrap());
    }

    #[test]
    fn every_gate_kind() {
        check("g1 = const 1; output g1");
        check("g1 = const 0; output g1");
        check("g1 = input x1; g2 = not g1; g3 = not g2; output g3");
        check("g1 = input x1; g2 = input x2; g3 = or g1 g2; g4 = not g3; output g4");
        check("g1 = input x1; g2 = or g1 g1; g3 = and g2 g1; output g3");
        check("g1 = input y1; g2 = input y2; g3 = not g1; g4 = and g3 g2; g5 = input x1; g6 = or g4 g5; output g6");
    }

    #[test]
    fn literal_not_gadget_computes_identity() {
        // the shared 1-vertices placed in e_i/ē_j and ē_i/e_j tie g_i to g_j
        // instead of to its negation; our gadget pairs e_i/e_j and ē_i/ē_j
        let literal = parse_hgp(
            "vars 1\nvertex g1 0\nvertex nx1 !x1\nvertex px1 x1\nvertex g2 0\nvertex a2 1\nvertex b2 1\nvertex out 0\n\
             edge e1 g1 nx1 b2\nedge ne1 g1 px1 a2\nedge e2 g2 a2 out\nedge ne2 g2 b2\n",
        )
        .unwrap();
        assert!(!eval_hgp(&literal, &[false]).unwrap());
        assert!(eval_hgp(&literal, &[true]).unwrap());
        let h = check("g1 = input x1; g2 = not g1; output g2");
        assert!(eval_hgp(&h, &[false]).unwrap());
    }

    #[test]
    fn monotone_mode_semantics() {
        let c = parse_circuit("g1 = input x1; g2 = input x2; g3 = not g1; g4 = and g3 g2; output g4").unwrap();
        let h = circuit_to_hgp3(&c, true).unwrap();
        assert!(h.is_monotone());
        assert!(equiv_exists_monotone(&c, &h, EquivBounds::default()).unwrap());
        // not the plain projection: x = 11 is accepted through x' = 01
        assert!(eval_hgp(&h, &[true, true]).unwrap());
        assert!(!c.exists_y(&[true, true]).unwrap());
    }

    #[test]
    fn repeated_inputs_share_a_gadget() {
        let h = check("g1 = input y1; g2 = input y1; g3 = not g2; g4 = and g1 g3; output g4");
        assert!(h.edge("e2").is_err());
        let c = parse_circuit("g1 = input x1; g2 = input x1; g3 = not g1; g4 = and g2 g3; output g4").unwrap();
        let m = circuit_to_hgp3(&c, true).unwrap();
        assert!(equiv_exists_monotone(&c, &m, EquivBounds::default()).unwrap());
    }

    #[test]
    fn or_multi_is_rejected() {
        let c = parse_circuit("unbounded-or\ng1 = input x1; g2 = input x2; g3 = input x3; g4 = or g1 g2 g3; output g4")
            .unwrap();
        assert!(matches!(circuit_to_hgp3(&c, false), Err(TranslateError::OrMulti(3))));
    }

    #[test]
    fn worked_example_to_circuit() {
        let h = parse_hgp("vars 3\nvertex u x1\nvertex v x2\nvertex w x3\nedge e1 u v\nedge e2 v w\n").unwrap();
        let c = hgp_to_np_circuit(&h);
        assert_eq!((c.num_x(), c.num_y()), (3, 2));
        for x in all_inputs(3) {
            assert_eq!(c.exists_y(&x).unwrap(), eval_hgp_exhaustive(&h, &x).unwrap());
        }
        assert!(equiv_exists(&c, &h, EquivBounds::default()).unwrap());
    }

    #[test]
    fn trivially_true_program() {
        let h = parse_hgp("vars 0\nvertex a 1\n").unwrap();
        let c = hgp_to_np_circuit(&h);
        assert_eq!(c.gates(), &[Gate::Const(true)]);
        assert!(c.eval(&[], &[]).unwrap());
    }

    #[test]
    fn monotone_program_negates_only_certificates() {
        let h = parse_hgp("vars 2\nvertex a x1\nvertex b x2\nvertex c 0\nedge e a c\nedge f b c\n").unwrap();
        let c = hgp_to_np_circuit(&h);
        assert!(!c.is_monotone());
        assert!(c.is_monotone_np());
    }

    #[test]
    fn guarded_edges_need_their_variable() {
        let h = parse_hgp("vars 2\nvertex u x1\nedge e u\nedgevar e x2\n").unwrap();
        let c = hgp_to_np_circuit(&h);
        assert!(equiv_exists(&c, &h, EquivBounds::default()).unwrap());
    }

    #[test]
    fn mismatches_and_bounds() {
        let c = parse_circuit("g1 = input x1; output g1").unwrap();
        let wrong = parse_hgp("vars 1\nvertex a x1\nvertex b 0\n").unwrap();
        assert!(!equiv_exists(&c, &wrong, EquivBounds::default()).unwrap());
        let zero = parse_circuit("g1 = const 0; output g1").unwrap();
        let uncoverable = parse_hgp("vars 0\nvertex a 0\n").unwrap();
        assert!(equiv_exists(&zero, &uncoverable, EquivBounds::default()).unwrap());
        let tight = EquivBounds { max_x: 0, max_y: 0 };
        assert!(matches!(
            equiv_exists(&c, &wrong, tight),
            Err(TranslateError::Circuit(CircuitError::BoundExceeded { .. }))
        ));
    }
}
