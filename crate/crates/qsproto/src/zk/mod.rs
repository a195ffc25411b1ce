//! Blum's Hamiltonicity proof: single rounds, sequential repetition (zero
//! knowledge) and parallel repetition (witness indistinguishable).

pub mod blum;
pub mod proof;

pub use blum::{
    blum_extract, blum_fabricate_round, blum_prove_round, blum_verify, committed_bits, sample_coins,
    BlumFirstMessage, BlumProver, BlumResponse, Extraction, OpenAll, OpenCycle, RoundCoins, ZkError,
};
pub use proof::{
    cheat_prove, prove_to_file, verify_file, wi_prove_parallel, wi_verify_parallel, zk_prove_sequential,
    zk_verify_sequential, ProofFile, ProofInstance, ProofRound, RepetitionMode, RoundRecord,
};
