//! Simulators as ideal-world adversaries, and the statistics that compare
//! real, hybrid and ideal executions.

pub mod chains;
pub mod simulators;
pub mod stats;
pub mod suites;

pub use chains::{cf_corrupt_a_pair, zkaok_prover_chain, zkcf_verifier_chain, Sample};
pub use simulators::{
    sim_cf_corrupt_a, sim_cf_corrupt_b, sim_zkaok_prover, sim_zkaok_verifier, sim_zkcf_prover, sim_zkcf_verifier,
    AdversaryTape, SimulatorSpec, ZkaokProverHybrid, ZkcfVerifierHybrid, SIMULATOR_NOTE,
};
pub use stats::{estimate_tv, hybrid_chain_check, tv_from_samples, ChainReport, LinkReport, MachineEnsemble, TvEstimate};
pub use suites::{run_suite, SuiteReport, SUITES};
