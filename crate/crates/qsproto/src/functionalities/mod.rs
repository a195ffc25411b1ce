//! Trusted-party machines for commitment, oblivious transfer, zero knowledge
//! and coin flipping, plus the dummy-party programs that turn each into an
//! ideal protocol.
//!
//! Functionality role `A` is the committer, OT sender, prover, or the coin
//! flipper who sees the coins first; `B` is the other party. Repeated or
//! out-of-script inputs are ignored and logged.

mod cf;
mod com;
mod ot;
mod zk;

pub use cf::{cf_dummy, CfIn, CfInput, CfOut, FCf};
pub use com::{com_dummy, ComIn, ComInput, ComOut, ComResult, FCom};
pub use ot::{ot_dummy, FOt, OtIn, OtInput, OtOut};
pub use zk::{zk_dummy, FZk, ZkIn, ZkOut, ZkProverInput, ZkVerifierInput};

use crate::machine::{Protocol, Role};
use crate::tape::Tape;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalityKind {
    Com,
    Ot,
    Zk,
    Cf,
}

impl fmt::Display for FunctionalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionalityKind::Com => "F_COM",
            FunctionalityKind::Ot => "F_OT",
            FunctionalityKind::Zk => "F_ZK",
            FunctionalityKind::Cf => "F_CF",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctionalityError {
    #[error("malformed input from {0}")]
    Malformed(Role),
    #[error("unknown relation id {0:?}")]
    UnknownRelation(String),
    #[error("coin lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Effect of one input: deliveries by functionality role, and log lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Step {
    pub outputs: Vec<(Role, Vec<u8>)>,
    pub notes: Vec<String>,
}

impl Step {
    fn to<T: Serialize>(role: Role, msg: &T) -> Step {
        Step { outputs: vec![(role, bincode::serialize(msg).expect("serializable"))], notes: Vec::new() }
    }

    fn ignored(why: impl Into<String>) -> Step {
        Step { outputs: Vec::new(), notes: vec![format!("ignored: {}", why.into())] }
    }

    fn nothing() -> Step {
        Step::default()
    }
}

pub trait Functionality {
    fn kind(&self) -> FunctionalityKind;
    fn phase(&self) -> &'static str;
    fn input(&mut self, from: Role, payload: &[u8]) -> Result<Step, FunctionalityError>;
}

/// A fresh session; `tape` is the functionality's own randomness.
pub fn new_session(kind: FunctionalityKind, tape: Tape) -> Box<dyn Functionality> {
    match kind {
        FunctionalityKind::Com => Box::new(FCom::default()),
        FunctionalityKind::Ot => Box::new(FOt::default()),
        FunctionalityKind::Zk => Box::<FZk>::default(),
        FunctionalityKind::Cf => Box::new(FCf::new(tape)),
    }
}

/// Dummy parties forwarding their inputs to the functionality and its
/// answers to their outputs.
pub fn ideal_protocol(kind: FunctionalityKind) -> Arc<Protocol> {
    let [a, b] = match kind {
        FunctionalityKind::Com => com_dummy(),
        FunctionalityKind::Ot => ot_dummy(),
        FunctionalityKind::Zk => zk_dummy(),
        FunctionalityKind::Cf => cf_dummy(),
    };
    let mut p = Protocol::new(format!("ideal-{}", kind_slug(kind)), a, b).realizing(kind);
    p.functionality = Some(kind);
    Arc::new(p)
}

fn kind_slug(kind: FunctionalityKind) -> &'static str {
    match kind {
        FunctionalityKind::Com => "com",
        FunctionalityKind::Ot => "ot",
        FunctionalityKind::Zk => "zk",
        FunctionalityKind::Cf => "cf",
    }
}

fn decode<T: serde::de::DeserializeOwned>(from: Role, payload: &[u8]) -> Result<T, FunctionalityError> {
    crate::machine::Payload(payload.to_vec()).decode().ok_or(FunctionalityError::Malformed(from))
}
