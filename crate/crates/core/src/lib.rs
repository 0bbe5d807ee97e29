pub mod chase;
pub mod circuit;
pub mod encoder;
mod lex;
pub mod logic;
pub mod hgp;
pub mod rewrite;
pub mod suite;

pub use chase::{certain_answers, chase, universal_tree, Answers, UniversalModel, UniversalTree};
pub use logic::{Atom, Axiom, ConjunctiveQuery, DataInstance, LogicError, Ontology, Signature};
pub use rewrite::{ndl_rewriting, pe_rewriting, NdlProgram, PeFormula, PeQuery, TreeWitness};
