//! The composed protocols: Blum proofs as executable sessions, the ZKAoK
//! protocol, coin flipping from zero knowledge, zero knowledge from coin
//! flipping, and semi-honest OT from dense encryption.
//!
//! Protocols realizing zero knowledge share one interface: the prover (`A`)
//! takes a [`ZkProverInput`](crate::functionalities::ZkProverInput), the
//! verifier (`B`) a [`ZkVerifierInput`](crate::functionalities::ZkVerifierInput)
//! and outputs the accepted statement.

pub mod blum;
pub mod coinflip;
pub mod ot;
pub mod zkaok;
pub mod zkcf;

pub use blum::blum_protocol;
pub use coinflip::{coinflip_protocol, coinflip_outcome_from_transcript, CoinflipParams};
pub use ot::{ot_semi_honest_protocol, OtParams};
pub use zkaok::{zkaok_protocol, ZkaokParams};
pub use zkcf::{zk_from_cf_protocol, ZkcfParams};

use crate::machine::{program, Output, Protocol};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::sync::Arc;

/// How zero-knowledge subproofs run: through the ideal functionality, or as
/// real Blum proofs over compiled statements (small parameters only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubproofMode {
    #[default]
    Hybrid,
    Micro,
}

impl FromStr for SubproofMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hybrid" => Ok(SubproofMode::Hybrid),
            "micro" => Ok(SubproofMode::Micro),
            _ => Err(format!("unknown mode {s:?} (expected hybrid or micro)")),
        }
    }
}

/// `A` sends its input; `B` outputs it.
pub fn echo_protocol() -> Arc<Protocol> {
    let a = program(|ctx, input| async move {
        ctx.send_raw(input.0);
        Output::unit()
    });
    let b = program(|ctx, _| async move { Output::Value(crate::machine::Payload(ctx.recv_raw().await)) });
    Arc::new(Protocol::new("echo", a, b))
}

/// A Hamiltonicity statement on `v` vertices (a cycle plus every chord from
/// vertex 0) with a cycle witness. `v = 3` fits inside compiled statements.
pub fn demo_statement(v: usize) -> (crate::npreduce::RelationStatement, crate::bits::Bits) {
    use crate::npreduce::{CycleWitness, HamiltonicityInstance};
    let edges = (0..v).map(|i| (i, (i + 1) % v)).chain((2..v.saturating_sub(1)).map(|j| (0, j)));
    let graph = HamiltonicityInstance::new(v, edges).expect("valid graph");
    let w = CycleWitness((0..v).collect()).to_bits(v);
    (crate::npreduce::RelationStatement::Hc { graph }, w)
}
