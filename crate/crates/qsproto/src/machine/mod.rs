//! Two-party execution model: party programs, an adversary that corrupts
//! statically and schedules delivery, hybrid calls to ideal functionalities,
//! transcripts, and sequential composition.
//!
//! A party program is an `async` block over a [`PartyCtx`]. Every `recv`
//! suspends until the scheduler delivers a message, so one execution is a
//! deterministic interleaving of two futures polled by hand.

mod blackbox;
mod ctx;
mod engine;
mod observe;
mod protocol;
mod transcript;

pub use blackbox::{BlackBox, BoxOut, Checkpoint};
pub use ctx::{PartyCtx, PartyIo};
pub use engine::{
    corrupt_view, run_execution, Corruption, CorruptionStyle, ExecutionConfig, ExecutionResult, PartyView,
    SchedulerSpec,
};
pub use observe::{view_dumping, DumpedView, ViewItem};
pub use protocol::{compose, program, PartyFuture, Program, Protocol, Slot};
pub use transcript::{Direction, Event, Transcript};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub const ROOT_SESSION: &str = "main";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
}

impl Role {
    pub const BOTH: [Role; 2] = [Role::A, Role::B];

    pub fn other(self) -> Role {
        match self {
            Role::A => Role::B,
            Role::B => Role::A,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::A => "A",
            Role::B => "B",
        })
    }
}

/// Opaque bytes; hex in human-readable formats.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Payload(pub Vec<u8>);

impl Payload {
    pub fn encode<T: Serialize>(value: &T) -> Payload {
        Payload(bincode::serialize(value).expect("in-memory serialization"))
    }

    /// `None` on malformed or trailing bytes.
    pub fn decode<T: DeserializeOwned>(&self) -> Option<T> {
        use bincode::Options;
        bincode::DefaultOptions::new()
            .with_fixint_encoding()
            .reject_trailing_bytes()
            .deserialize(&self.0)
            .ok()
    }
}

impl fmt::Debug for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 32 {
            write!(f, "Payload({})", hex::encode(&self.0))
        } else {
            write!(f, "Payload[{}]({}..)", self.0.len(), hex::encode(&self.0[..32]))
        }
    }
}

impl Serialize for Payload {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if s.is_human_readable() {
            s.serialize_str(&hex::encode(&self.0))
        } else {
            s.serialize_bytes(&self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Payload {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        if d.is_human_readable() {
            let s = String::deserialize(d)?;
            hex::decode(s).map(Payload).map_err(serde::de::Error::custom)
        } else {
            Vec::<u8>::deserialize(d).map(Payload)
        }
    }
}

/// A party's final output; `Bot` is the abort symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Bot,
    Value(Payload),
}

impl Output {
    pub fn value<T: Serialize>(v: &T) -> Output {
        Output::Value(Payload::encode(v))
    }

    pub fn unit() -> Output {
        Output::value(&())
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Output::Bot)
    }

    pub fn decode<T: DeserializeOwned>(&self) -> Option<T> {
        match self {
            Output::Bot => None,
            Output::Value(p) => p.decode(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("slot {0:?} is not declared by the outer protocol")]
    UndeclaredSlot(String),
    #[error("slot {slot:?} expects a {expected} protocol, got {got}")]
    SlotKind { slot: String, expected: String, got: String },
    #[error("party {0} is not corrupted")]
    NotCorrupted(Role),
    #[error("configuration error: {0}")]
    Config(String),
}
