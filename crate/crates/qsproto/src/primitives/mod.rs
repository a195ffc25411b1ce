//! Length-tripling PRGs, the Naor bit commitment built on them, and a dense
//! Regev-style public-key encryption scheme.

pub mod commit;
pub mod lwe;
pub mod prg;

pub use commit::{
    binding_census, commit, commit_bit, commit_string, open_commitment, open_string,
    BindingCensus, CommitmentTriple, Opening,
};
pub use lwe::{
    pke_decrypt, pke_encrypt, pke_keygen, pke_sample_fake_pk, Ciphertext, DenseKeyPair,
    LweParams, PublicKey, SecretKey,
};
pub use prg::{prg_expand, prg_expand_bits, PrgSeed, MICRO_MAX_N, MIN_N};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("{what}: expected length {expected}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), ParamError> {
    if expected == got {
        Ok(())
    } else {
        Err(ParamError::Length {
            what,
            expected,
            got,
        })
    }
}
