//! Two-party protocols with simulation-based testing.
//!
//! The crate is layered bottom-up: [`primitives`] (PRG, commitment, dense
//! encryption), [`npreduce`] (statement compilation to Hamiltonicity),
//! [`zk`] (Blum proofs), [`machine`] (execution engine and composition),
//! [`functionalities`] (trusted parties), [`protocols`] and [`simcheck`]
//! (simulators and distinguishing statistics).

pub mod bits;
pub mod functionalities;
pub mod machine;
pub mod npreduce;
pub mod primitives;
pub mod protocols;
pub mod simcheck;
pub mod tape;
pub mod zk;

pub use bits::Bits;
