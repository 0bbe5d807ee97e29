//! Fixed inputs for the benchmarks.

use obdalab_core::circuit::Circuit;
use obdalab_core::hgp::HypergraphProgram;
use obdalab_core::logic::{parse_data, parse_ontology, parse_query, ConjunctiveQuery, DataInstance, Ontology};
use obdalab_core::suite::gen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 42;

pub fn example() -> (Ontology, DataInstance, ConjunctiveQuery) {
    let t = parse_ontology(
        "Student(x) -> exists y: worksOn(x,y), Project(y)\n\
         Project(x) -> exists y: isManagedBy(x,y), Professor(y)\n\
         worksOn(x,y) -> involves(y,x)\n\
         isManagedBy(x,y) -> involves(x,y)\n",
    )
    .expect("valid ontology");
    let d = parse_data("Student(c)\nworksOn(c,b)\nProject(b)\nisManagedBy(b,a)").expect("valid data");
    let q = parse_query("q(x) :- worksOn(x,y), involves(y,z), Professor(z)").expect("valid query");
    (t, d, q)
}

/// A chain `A0 -> exists R.A1 -> ... -> exists R.Ak` with `k` constants carrying `A0`.
pub fn chain(k: usize) -> (Ontology, DataInstance) {
    let text: String = (0..k)
        .map(|i| format!("A{i}(x) -> exists y: R(x,y), A{}(y)\n", i + 1))
        .collect();
    let data: String = (0..k).map(|i| format!("A0(c{i})\nR(c{i},c{})\n", (i + 1) % k)).collect();
    (parse_ontology(&text).expect("valid"), parse_data(&data).expect("valid"))
}

pub fn random_programs(count: usize, vertices: usize, edges: usize, vars: usize) -> Vec<HypergraphProgram> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| gen::hgp(&mut rng, vertices, edges, vars)).collect()
}

pub fn random_circuits(count: usize, gates: usize) -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| gen::circuit(&mut rng, gates, 4, 2)).collect()
}
