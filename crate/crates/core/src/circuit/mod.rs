//! Boolean circuits with certificate inputs, nondeterministic branching
//! programs, and the translations between circuits and hypergraph programs.

mod nbp;
mod translate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::hgp::all_inputs;
use crate::lex::content_lines;

pub use nbp::{eval_nbp, parse_nbp, BranchingProgram};
pub use translate::{
    circuit_to_hgp3, equiv_exists, equiv_exists_monotone, hgp_to_np_circuit, EquivBounds, TranslateError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("gate {gate} refers to gate {reference}, which is not an earlier gate")]
    DanglingReference { gate: usize, reference: usize },
    #[error("gate {0} is an unbounded-fan-in or, which this circuit does not allow")]
    OrMultiNotAllowed(usize),
    #[error("output gate {0} does not exist")]
    BadOutput(usize),
    #[error("circuit has {declared} {class}-inputs but uses index {used}")]
    InputOutOfRange { class: InputClass, declared: usize, used: usize },
    #[error("expected {expected} {class}-bits, got {found}")]
    InputLength { class: InputClass, expected: usize, found: usize },
    #[error("{what} = {value} exceeds the bound {bound}")]
    BoundExceeded { what: &'static str, value: usize, bound: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputClass {
    X,
    Y,
}

impl fmt::Display for InputClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputClass::X => "x",
            InputClass::Y => "y",
        })
    }
}

/// A gate; operands are indices of earlier gates, input indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(InputClass, usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    OrMulti(Vec<usize>),
}

impl Gate {
    pub fn operands(&self) -> Vec<usize> {
        match self {
            Gate::Input(..) | Gate::Const(_) => vec![],
            Gate::Not(a) => vec![*a],
            Gate::And(a, b) | Gate::Or(a, b) => vec![*a, *b],
            Gate::OrMulti(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
    n: usize,
    m: usize,
    unbounded_or: bool,
}

impl Circuit {
    /// Fan-in-2 circuit; `n` and `m` are one more than the largest input indices.
    pub fn new(gates: Vec<Gate>, output: usize) -> Result<Self, CircuitError> {
        Self::build(gates, output, false)
    }

    /// Like [`Circuit::new`], optionally allowing [`Gate::OrMulti`].
    pub fn build(gates: Vec<Gate>, output: usize, unbounded_or: bool) -> Result<Self, CircuitError> {
        let (mut n, mut m) = (0, 0);
        for (i, g) in gates.iter().enumerate() {
            for r in g.operands() {
                if r >= i {
                    return Err(CircuitError::DanglingReference { gate: i, reference: r });
                }
            }
            match g {
                Gate::Input(InputClass::X, k) => n = n.max(k + 1),
                Gate::Input(InputClass::Y, k) => m = m.max(k + 1),
                Gate::OrMulti(_) if !unbounded_or => return Err(CircuitError::OrMultiNotAllowed(i)),
                _ => {}
            }
        }
        if output >= gates.len() {
            return Err(CircuitError::BadOutput(output));
        }
        Ok(Self {
            gates,
            output,
            n,
            m,
            unbounded_or,
        })
    }

    /// Declares more inputs than the gates mention.
    pub fn with_inputs(mut self, n: usize, m: usize) -> Result<Self, CircuitError> {
        for (class, declared, used) in [(InputClass::X, n, self.n), (InputClass::Y, m, self.m)] {
            if declared < used {
                return Err(CircuitError::InputOutOfRange {
                    class,
                    declared,
                    used: used - 1,
                });
            }
        }
        self.n = n;
        self.m = m;
        Ok(self)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn num_x(&self) -> usize {
        self.n
    }

    pub fn num_y(&self) -> usize {
        self.m
    }

    pub fn allows_unbounded_or(&self) -> bool {
        self.unbounded_or
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Values of all gates, in order.
    pub fn eval_all(&self, x: &[bool], y: &[bool]) -> Result<Vec<bool>, CircuitError> {
        for (class, expected, found) in [(InputClass::X, self.n, x.len()), (InputClass::Y, self.m, y.len())] {
            if expected != found {
                return Err(CircuitError::InputLength { class, expected, found });
            }
        }
        let mut val: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(InputClass::X, k) => x[*k],
                Gate::Input(InputClass::Y, k) => y[*k],
                Gate::Const(b) => *b,
                Gate::Not(a) => !val[*a],
                Gate::And(a, b) => val[*a] && val[*b],
                Gate::Or(a, b) => val[*a] || val[*b],
                Gate::OrMulti(v) => v.iter().any(|&a| val[a]),
            };
            val.push(v);
        }
        Ok(val)
    }

    pub fn eval(&self, x: &[bool], y: &[bool]) -> Result<bool, CircuitError> {
        Ok(self.eval_all(x, y)?[self.output])
    }

    /// `∃y C(x, y)`, by trying all certificates.
    pub fn exists_y(&self, x: &[bool]) -> Result<bool, CircuitError> {
        for y in all_inputs(self.m) {
            if self.eval(x, &y)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Number of references to each gate.
    pub fn fanouts(&self) -> Vec<usize> {
        let mut out = vec![0; self.gates.len()];
        for g in &self.gates {
            for r in g.operands() {
                out[r] += 1;
            }
        }
        out
    }

    pub fn max_fanout(&self) -> usize {
        self.fanouts().into_iter().max().unwrap_or(0)
    }

    /// Every gate, input gates included, is used at most once.
    pub fn is_formula(&self) -> bool {
        self.max_fanout() <= 1
    }

    /// No negation gates at all.
    pub fn is_monotone(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g, Gate::Not(_)))
    }

    /// Negations only directly on certificate inputs.
    pub fn is_monotone_np(&self) -> bool {
        self.gates.iter().all(|g| match g {
            Gate::Not(a) => matches!(self.gates[*a], Gate::Input(InputClass::Y, _)),
            _ => true,
        })
    }

    /// Negations only directly on inputs; unbounded or-gates are fine.
    pub fn has_negations_on_inputs_only(&self) -> bool {
        self.gates.iter().all(|g| match g {
            Gate::Not(a) => matches!(self.gates[*a], Gate::Input(..)),
            _ => true,
        })
    }

    /// Longest path (in wires) from an input or constant to the output.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            d[i] = g.operands().iter().map(|&r| d[r] + 1).max().unwrap_or(0);
        }
        d[self.output]
    }
}

pub fn eval_circuit(c: &Circuit, x: &[bool], y: &[bool]) -> Result<bool, CircuitError> {
    c.eval(x, y)
}

/// Incremental construction of circuits.
#[derive(Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn x(&mut self, k: usize) -> usize {
        self.push(Gate::Input(InputClass::X, k))
    }

    pub fn y(&mut self, k: usize) -> usize {
        self.push(Gate::Input(InputClass::Y, k))
    }

    pub fn constant(&mut self, b: bool) -> usize {
        self.push(Gate::Const(b))
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Gate::Not(a))
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Or(a, b))
    }

    /// Balanced fan-in-2 tree; `empty` is the value of an empty list.
    pub fn balanced(&mut self, items: &[usize], and: bool, empty: bool) -> usize {
        match items {
            [] => self.constant(empty),
            [a] => *a,
            _ => {
                let (l, r) = items.split_at(items.len() / 2);
                let a = self.balanced(l, and, empty);
                let b = self.balanced(r, and, empty);
                if and {
                    self.and(a, b)
                } else {
                    self.or(a, b)
                }
            }
        }
    }

    pub fn finish(self, output: usize) -> Result<Circuit, CircuitError> {
        Circuit::new(self.gates, output)
    }
}

/// Parses the gate-per-line format; `;` also separates statements.
///
/// ```text
/// g1 = input x1
/// g2 = input y1
/// g3 = and g1 g2
/// output g3
/// ```
///
/// A line `unbounded-or` permits `or` with more than two operands.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut gates = Vec::new();
    let mut output = None;
    let mut unbounded_or = false;
    let mut last_line = 1;
    for (line_no, line) in content_lines(text) {
        last_line = line_no;
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let syntax = |msg: String| CircuitError::Syntax { line: line_no, msg };
            if output.is_some() {
                return Err(syntax("nothing may follow the output declaration".into()));
            }
            let words: Vec<&str> = stmt.split_whitespace().collect();
            let gate_ref = |w: &str| {
                names
                    .get(w)
                    .copied()
                    .ok_or_else(|| syntax(format!("undefined gate `{w}`")))
            };
            match words[..] {
                ["unbounded-or"] => {
                    if !gates.is_empty() {
                        return Err(syntax("`unbounded-or` must precede all gates".into()));
                    }
                    unbounded_or = true;
                }
                ["output", g] => output = Some(gate_ref(g)?),
                [name, "=", ref rest @ ..] => {
                    if names.contains_key(name) {
                        return Err(syntax(format!("gate `{name}` defined twice")));
                    }
                    let gate = match rest {
                        ["input", v] => {
                            let (class, k) = parse_input(v).ok_or_else(|| syntax(format!("bad input `{v}`")))?;
                            Gate::Input(class, k)
                        }
                        ["const", "0"] => Gate::Const(false),
                        ["const", "1"] => Gate::Const(true),
                        ["not", a] => Gate::Not(gate_ref(a)?),
                        ["and", a, b] => Gate::And(gate_ref(a)?, gate_ref(b)?),
                        ["or", a, b] => Gate::Or(gate_ref(a)?, gate_ref(b)?),
                        ["or", ref args @ ..] if args.len() > 2 => {
                            if !unbounded_or {
                                return Err(syntax("`or` with more than two operands needs `unbounded-or`".into()));
                            }
                            Gate::OrMulti(args.iter().map(|a| gate_ref(a)).collect::<Result<_, _>>()?)
                        }
                        _ => return Err(syntax(format!("cannot parse gate definition `{stmt}`"))),
                    };
                    names.insert(name.to_string(), gates.len());
                    gates.push(gate);
                }
                _ => return Err(syntax(format!("cannot parse `{stmt}`"))),
            }
        }
    }
    let output = output.ok_or(CircuitError::Syntax {
        line: last_line,
        msg: "missing `output` line".into(),
    })?;
    Circuit::build(gates, output, unbounded_or)
}

fn parse_input(v: &str) -> Option<(InputClass, usize)> {
    let (class, rest) = if let Some(r) = v.strip_prefix('x') {
        (InputClass::X, r)
    } else {
        (InputClass::Y, v.strip_prefix('y')?)
    };
    let k: usize = rest.parse().ok()?;
    Some((class, k.checked_sub(1)?))
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unbounded_or {
            writeln!(f, "unbounded-or")?;
        }
        for (i, g) in self.gates.iter().enumerate() {
            write!(f, "g{} = ", i + 1)?;
            match g {
                Gate::Input(class, k) => write!(f, "input {class}{}", k + 1)?,
                Gate::Const(b) => write!(f, "const {}", u8::from(*b))?,
                Gate::Not(a) => write!(f, "not g{}", a + 1)?,
                Gate::And(a, b) => write!(f, "and g{} g{}", a + 1, b + 1)?,
                Gate::Or(a, b) => write!(f, "or g{} g{}", a + 1, b + 1)?,
                Gate::OrMulti(v) => {
                    f.write_str("or")?;
                    for a in v {
                        write!(f, " g{}", a + 1)?;
                    }
                }
            }
            writeln!(f)?;
        }
        writeln!(f, "output g{}", self.output + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_of_two_inputs() {
        let c = parse_circuit("g1 = input x1\ng2 = input x2\ng3 = and g1 g2\noutput g3").unwrap();
        assert!(c.eval(&[true, true], &[]).unwrap());
        assert!(!c.eval(&[true, false], &[]).unwrap());
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn negation_breaks_monotonicity() {
        let c = parse_circuit("g1 = input x1; g2 = input x2; g3 = or g1 g2; g4 = not g3; output g4").unwrap();
        assert!(!c.is_monotone());
        assert!(!c.is_monotone_np());
        assert_eq!(c.depth(), 2);
        let d = parse_circuit("g1 = input y1; g2 = not g1; g3 = input x1; g4 = and g2 g3; output g4").unwrap();
        assert!(!d.is_monotone());
        assert!(d.is_monotone_np());
    }

    #[test]
    fn reuse_is_not_a_formula() {
        let c = parse_circuit("g1 = input x1; g2 = not g1; g3 = and g2 g2; output g3").unwrap();
        assert!(!c.is_formula());
        let f = parse_circuit("g1 = input x1; g2 = input x2; g3 = and g1 g2; output g3").unwrap();
        assert!(f.is_formula());
    }

    #[test]
    fn round_trip_and_names() {
        let text = "a = input x2\nb = input y1\nc = const 1\nd = or a b\ne = and d c\nf = not e\noutput f\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!((c.num_x(), c.num_y()), (2, 1));
        let printed = c.to_string();
        assert!(printed.starts_with("g1 = input x2\n"));
        assert_eq!(parse_circuit(&printed).unwrap(), c);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Circuit::new(vec![Gate::Not(0)], 0),
            Err(CircuitError::DanglingReference { .. })
        ));
        assert!(matches!(
            Circuit::new(vec![Gate::Const(true)], 1),
            Err(CircuitError::BadOutput(1))
        ));
        assert!(parse_circuit("g1 = not g2\noutput g1").is_err());
        assert!(parse_circuit("g1 = input x0\noutput g1").is_err());
        assert!(parse_circuit("g1 = input x1").is_err());
        assert!(parse_circuit("g1 = input x1; g2 = input x2; g3 = input x3; g4 = or g1 g2 g3; output g4").is_err());
    }

    #[test]
    fn unbounded_or_when_declared() {
        let c = parse_circuit("unbounded-or\ng1 = input x1; g2 = input x2; g3 = input x3; g4 = or g1 g2 g3; output g4")
            .unwrap();
        assert!(c.eval(&[false, false, true], &[]).unwrap());
        assert!(!c.eval(&[false, false, false], &[]).unwrap());
        assert_eq!(parse_circuit(&c.to_string()).unwrap(), c);
        assert!(c.has_negations_on_inputs_only());
    }

    #[test]
    fn projection_over_certificates() {
        let c = parse_circuit("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3").unwrap();
        assert!(c.exists_y(&[true]).unwrap());
        assert!(!c.exists_y(&[false]).unwrap());
        assert!(matches!(c.eval(&[true], &[]), Err(CircuitError::InputLength { .. })));
    }

    #[test]
    fn balanced_trees() {
        let mut b = CircuitBuilder::new();
        let xs: Vec<usize> = (0..5).map(|k| b.x(k)).collect();
        let out = b.balanced(&xs, true, true);
        let c = b.finish(out).unwrap();
        assert_eq!(c.depth(), 3);
        for x in all_inputs(5) {
            assert_eq!(c.eval(&x, &[]).unwrap(), x.iter().all(|&b| b));
        }
    }
}
