//! Karp reduction from the protocol statements to directed Hamiltonicity.

pub mod circuit;
pub mod cnf;
pub mod compile;
pub mod graph;
pub mod reduce;
pub mod statement;

pub use circuit::{BooleanCircuit, CircuitBuilder, Gate, GateOp};
pub use compile::{
    assemble_witness, compile_conjuncts, compile_statement, relation_to_circuit, split_conjuncts,
    CompiledStatement, Conjunct,
};
pub use graph::{index_width, CycleWitness, HamiltonicityInstance};
pub use reduce::{circuit_to_hc, ReduceError, WitnessMap, DEFAULT_GATE_BOUND};
pub use statement::{check_relation, RelationId, RelationStatement};
