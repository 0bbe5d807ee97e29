//! Seeded differential test suites and size measurements.
//!
//! Every suite compares a system under test with an independent oracle:
//! rewritings against the chase, encodings against the hypergraph
//! evaluator, translations against brute-force circuit evaluation.

pub mod gen;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chase::{certain_answers_at_depth, oracle_depth};
use crate::circuit::{circuit_to_hgp3, equiv_exists, equiv_exists_monotone, hgp_to_np_circuit, Circuit, EquivBounds};
use crate::encoder::{encode_hgp, verify_encoding};
use crate::hgp::{all_inputs, eval_hgp, eval_hgp_exhaustive, HypergraphProgram};
use crate::logic::{Axiom, ConjunctiveQuery, DataInstance, Ontology};
use crate::rewrite::{
    count_independent_sets, eval_ndl, eval_pe, ndl_rewriting_with, pe_rewriting_with, pe_to_ndl, tree_witnesses,
    default_tree_depth, RewriteOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteKind {
    Rewriter,
    Encoder,
    Translators,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 3] = [SuiteKind::Rewriter, SuiteKind::Encoder, SuiteKind::Translators];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Rewriter => "rewriter",
            SuiteKind::Encoder => "encoder",
            SuiteKind::Translators => "translators",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

/// A deliberate bug, to check that the suites notice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Saturate query atoms without the first concept or role inclusion.
    DropInclusion,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances per check.
    pub count: usize,
    /// Chase depth for the oracle; by default enough for every query.
    pub depth_limit: Option<usize>,
    pub max_axioms: usize,
    pub max_atoms: usize,
    pub max_constants: usize,
    pub max_facts: usize,
    pub hgp_vertices: usize,
    pub hgp_edges: usize,
    pub hgp_vars: usize,
    /// Circuits up to this many gates are enumerated completely.
    pub exhaustive_gates: usize,
    pub random_gates: usize,
    pub circuit_x: usize,
    pub circuit_y: usize,
    pub translator_vertices: usize,
    pub translator_edges: usize,
    pub evaluator_edges: usize,
    pub evaluator_vars: usize,
    /// Largest `n` of the disjoint-hyperedge family measured by the encoder suite.
    pub blowup_max: usize,
    /// PE-rewritings are built (not only counted) up to this `n`.
    pub blowup_build_max: usize,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 100,
            depth_limit: None,
            max_axioms: 4,
            max_atoms: 4,
            max_constants: 3,
            max_facts: 6,
            hgp_vertices: 6,
            hgp_edges: 4,
            hgp_vars: 6,
            exhaustive_gates: 4,
            random_gates: 8,
            circuit_x: 4,
            circuit_y: 2,
            translator_vertices: 8,
            translator_edges: 5,
            evaluator_edges: 12,
            evaluator_vars: 8,
            blowup_max: 12,
            blowup_build_max: 7,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub instance: String,
    pub check: &'static str,
    pub detail: String,
    /// `(file name, contents)` reproducing the instance.
    pub files: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SizeRow {
    pub instance: String,
    /// `None` when only the disjunct count was computed.
    pub pe_size: Option<usize>,
    pub ndl_size: usize,
    pub disjuncts: u128,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: &'static str,
    /// `(check, instances)`, in the order the checks ran.
    pub checks: Vec<(&'static str, usize)>,
    pub failures: Vec<Failure>,
    pub sizes: Vec<SizeRow>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn count(&mut self, check: &'static str) {
        match self.checks.iter_mut().find(|(c, _)| *c == check) {
            Some((_, k)) => *k += 1,
            None => self.checks.push((check, 1)),
        }
    }

    fn fail(&mut self, instance: String, check: &'static str, detail: String, files: Vec<(String, String)>) {
        self.failures.push(Failure {
            instance,
            check,
            detail,
            files,
        });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {}: {w}", self.name)?;
        }
        for (check, n) in &self.checks {
            let failed = self.failures.iter().filter(|x| x.check == *check).count();
            let verdict = if failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {}/{check}: {n} instances, {failed} failures", self.name)?;
        }
        for x in &self.failures {
            writeln!(f, "  {} [{}]: {}", x.instance, x.check, x.detail)?;
        }
        Ok(())
    }
}

/// `instance,pe_size,ndl_size,disjuncts`, rows sorted by instance name.
pub fn sizes_csv(rows: &[SizeRow]) -> String {
    let mut rows = rows.to_vec();
    rows.sort();
    let mut out = String::from("instance,pe_size,ndl_size,disjuncts\n");
    for r in rows {
        let pe = r.pe_size.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{pe},{},{}\n", r.instance, r.ndl_size, r.disjuncts));
    }
    out
}

pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ kind.stream());
    let mut report = match kind {
        SuiteKind::Rewriter => rewriter_suite(&mut rng, cfg),
        SuiteKind::Encoder => encoder_suite(&mut rng, cfg),
        SuiteKind::Translators => translators_suite(&mut rng, cfg),
    };
    if cfg.count == 0 {
        report
            .warnings
            .push("count is 0, random checks were skipped".into());
    }
    report
}

fn first_inclusion(t: &Ontology) -> Option<usize> {
    t.axioms()
        .iter()
        .position(|a| matches!(a, Axiom::ConceptInclusion { .. } | Axiom::RoleInclusion { .. }))
}

fn kb_files(t: &Ontology, q: &ConjunctiveQuery, d: &DataInstance) -> Vec<(String, String)> {
    vec![
        ("ontology.txt".into(), t.to_string()),
        ("query.txt".into(), format!("{q}\n")),
        ("data.txt".into(), d.to_string()),
    ]
}

/// One random knowledge base and query, checked against the chase.
pub struct RewriterInstance {
    pub ontology: Ontology,
    pub query: ConjunctiveQuery,
    pub data: DataInstance,
}

pub fn rewriter_instance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> RewriterInstance {
    RewriterInstance {
        ontology: gen::ontology(rng, cfg.max_axioms),
        query: gen::query(rng, cfg.max_atoms),
        data: gen::data(rng, cfg.max_constants, cfg.max_facts),
    }
}

/// Bound on the datalog translation of a PE formula of size `s`: `4s + 8`.
pub const NDL_SIZE_FACTOR: usize = 4;
pub const NDL_SIZE_SLACK: usize = 8;

fn rewriter_suite(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("rewriter");
    for i in 0..cfg.count {
        let RewriterInstance { ontology: t, query: q, data: d } = rewriter_instance(rng, cfg);
        let id = format!("rewriter-{i:03}");
        let depth = cfg.depth_limit.unwrap_or_else(|| oracle_depth(&q, &t));
        let expected = certain_answers_at_depth(&d, &t, &q, depth);
        let opts = RewriteOptions {
            saturation_without: match cfg.fault {
                Some(Fault::DropInclusion) => first_inclusion(&t),
                None => None,
            },
            ..Default::default()
        };
        let pe = pe_rewriting_with(&q, &t, &opts);
        let ndl = ndl_rewriting_with(&q, &t, &opts);
        let translated = pe_to_ndl(&pe.query).expect("rewritings are safe");
        let files = || {
            let mut f = kb_files(&t, &q, &d);
            f.push(("rewriting.pe".into(), format!("{}\n", pe.query)));
            f.push(("rewriting.ndl".into(), ndl.to_string()));
            f
        };
        let compare = |report: &mut SuiteReport, check: &'static str, got: crate::chase::Answers| {
            report.count(check);
            if got != expected {
                report.fail(id.clone(), check, format!("expected {expected:?}, got {got:?}"), files());
            }
        };
        compare(&mut report, "pe", eval_pe(&pe.query, &d));
        compare(&mut report, "pe-to-ndl", eval_ndl(&translated, &d).expect("acyclic"));
        compare(&mut report, "ndl", eval_ndl(&ndl, &d).expect("acyclic"));

        report.count("pe-to-ndl-size");
        if translated.size() > NDL_SIZE_FACTOR * pe.query.size() + NDL_SIZE_SLACK {
            report.fail(
                id.clone(),
                "pe-to-ndl-size",
                format!("pe size {}, translated size {}", pe.query.size(), translated.size()),
                files(),
            );
        }

        report.count("monotonicity");
        let mut axioms = t.axioms().to_vec();
        axioms.extend(gen::ontology(rng, 1).axioms().iter().cloned());
        let bigger = Ontology::new(t.signature().clone(), axioms).expect("fixed arities");
        let before = eval_pe(&pe.query, &d);
        let after = eval_pe(&pe_rewriting_with(&q, &bigger, &opts).query, &d);
        if !before.is_subset(&after) {
            let mut f = files();
            f.push(("bigger-ontology.txt".into(), bigger.to_string()));
            report.fail(
                id.clone(),
                "monotonicity",
                format!("{before:?} not contained in {after:?}"),
                f,
            );
        }

        report.count("depth-stability");
        let n = q.num_vars();
        let (low, high) = (
            certain_answers_at_depth(&d, &t, &q, n + 1),
            certain_answers_at_depth(&d, &t, &q, n + 3),
        );
        if low != high {
            report.fail(
                id.clone(),
                "depth-stability",
                format!("depth {}: {low:?}, depth {}: {high:?}", n + 1, n + 3),
                kb_files(&t, &q, &d),
            );
        }
        report.sizes.push(SizeRow {
            instance: id,
            pe_size: Some(pe.query.size()),
            ndl_size: ndl.size(),
            disjuncts: pe.disjuncts as u128,
        });
    }
    report
}

/// Size of the rewritings of the encoding of `h`; the PE-rewriting is only
/// built when `build_pe`, otherwise its disjuncts are just counted.
pub fn encoding_sizes(instance: String, h: &HypergraphProgram, build_pe: bool) -> SizeRow {
    let enc = encode_hgp(h);
    let opts = RewriteOptions::default();
    let ndl = ndl_rewriting_with(&enc.query, &enc.ontology, &opts);
    let (pe_size, disjuncts) = if build_pe {
        let pe = pe_rewriting_with(&enc.query, &enc.ontology, &opts);
        (Some(pe.query.size()), pe.disjuncts as u128)
    } else {
        let ws = tree_witnesses(&enc.query, &enc.ontology, default_tree_depth(&enc.query, &enc.ontology));
        (None, count_independent_sets(&ws))
    };
    SizeRow {
        instance,
        pe_size,
        ndl_size: ndl.size(),
        disjuncts,
    }
}

fn encoder_suite(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("encoder");
    for i in 0..cfg.count {
        let h = gen::hgp(rng, cfg.hgp_vertices, cfg.hgp_edges, cfg.hgp_vars);
        let id = format!("encoder-{i:03}");
        let files = || {
            let enc = encode_hgp(&h);
            vec![
                ("program.hgp".into(), h.to_string()),
                ("ontology.txt".into(), enc.ontology.to_string()),
                ("query.txt".into(), format!("{}\n", enc.query)),
                ("inputmap.txt".into(), enc.input_map.to_string()),
            ]
        };
        report.count("claim");
        report.count("depth");
        match verify_encoding(&h, cfg.hgp_vars.max(h.num_vars())) {
            Ok(r) => {
                if !r.passed() {
                    let bits: Vec<String> = r.counterexamples.iter().map(|x| bits(x)).collect();
                    report.fail(id.clone(), "claim", format!("disagrees on {}", bits.join(" ")), files());
                }
                if r.ontology_depth != Some(2) {
                    report.fail(id.clone(), "depth", format!("ontology depth {:?}", r.ontology_depth), files());
                }
            }
            Err(e) => report.fail(id.clone(), "claim", e.to_string(), files()),
        }
        report.sizes.push(encoding_sizes(id, &h, true));
    }
    for n in 1..=cfg.blowup_max {
        report.count("disjoint-family");
        report
            .sizes
            .push(encoding_sizes(format!("disjoint-{n:02}"), &gen::disjoint_edges(n), n <= cfg.blowup_build_max));
    }
    report
}

pub fn bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Checks one circuit in both translation modes; returns the failed checks.
pub fn check_circuit(c: &Circuit) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let bounds = EquivBounds::default();
    match circuit_to_hgp3(c, false) {
        Ok(h) => {
            if h.degree() > 3 {
                out.push(("degree", format!("degree {}", h.degree())));
            }
            if !equiv_exists(c, &h, bounds).unwrap_or(false) {
                out.push(("circuit-to-hgp", "not equivalent".into()));
            }
        }
        Err(e) => out.push(("circuit-to-hgp", e.to_string())),
    }
    match circuit_to_hgp3(c, true) {
        Ok(h) => {
            if !h.is_monotone() || !equiv_exists_monotone(c, &h, bounds).unwrap_or(false) {
                out.push(("monotone", "not equivalent under x' <= x".into()));
            }
        }
        Err(e) => out.push(("monotone", e.to_string())),
    }
    out
}

fn translators_suite(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("translators");
    let (n, m) = (cfg.circuit_x, cfg.circuit_y);
    let mut k = 0;
    let record = |report: &mut SuiteReport, id: String, c: &Circuit| {
        for check in ["degree", "circuit-to-hgp", "monotone"] {
            report.count(check);
        }
        for (check, detail) in check_circuit(c) {
            report.fail(id.clone(), check, detail, vec![("circuit.txt".into(), c.to_string())]);
        }
    };
    gen::each_circuit(cfg.exhaustive_gates, n, m, &mut |c| {
        record(&mut report, format!("enumerated-{k:06}"), c);
        k += 1;
    });
    for i in 0..cfg.count {
        let c = gen::circuit(rng, cfg.random_gates, n, m);
        record(&mut report, format!("circuit-{i:03}"), &c);
    }
    for i in 0..cfg.count {
        let h = gen::guarded_hgp(rng, cfg.translator_vertices, cfg.translator_edges, cfg.hgp_vars);
        let id = format!("program-{i:03}");
        report.count("hgp-to-circuit");
        let c = hgp_to_np_circuit(&h);
        let ok = all_inputs(h.num_vars())
            .all(|x| c.exists_y(&x).ok() == eval_hgp_exhaustive(&h, &x).ok());
        if !ok {
            report.fail(id, "hgp-to-circuit", "projection differs from the program".into(), vec![
                ("program.hgp".into(), h.to_string()),
                ("circuit.txt".into(), c.to_string()),
            ]);
        }
    }
    for i in 0..cfg.count {
        let h = gen::guarded_hgp(rng, cfg.evaluator_edges, cfg.evaluator_edges, cfg.evaluator_vars);
        let id = format!("evaluator-{i:03}");
        report.count("evaluator");
        if let Some(x) = evaluator_mismatch(&h) {
            report.fail(id, "evaluator", format!("differs on {}", bits(&x)), vec![(
                "program.hgp".into(),
                h.to_string(),
            )]);
        }
    }
    report
}

/// First input where the backtracking evaluator and the subset enumeration disagree.
pub fn evaluator_mismatch(h: &HypergraphProgram) -> Option<Vec<bool>> {
    all_inputs(h.num_vars()).find(|x| eval_hgp(h, x).ok() != eval_hgp_exhaustive(h, x).ok())
}
