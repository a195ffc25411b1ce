//! NP statements and their verification predicates.
//!
//! Witness layouts (concatenated, in order):
//! - `Hc`: the cycle as `v` indices of [`index_width`] bits.
//! - `L1`: one `n`-bit seed per message bit.
//! - `Opening`: the message (`l` bits), then `l` seeds.
//! - `L2`: the plaintext `w` (one bit per ciphertext block), then the
//!   encryption randomness (`samples` bits per plaintext bit).
//! - `R`: a branch tag, then `w` and its randomness as in `L2`, then an
//!   `n`-bit seed. Tag 0 checks the encryption branch, tag 1 the generator
//!   branch; the other branch's bits are ignored.

use super::graph::{index_width, CycleWitness, HamiltonicityInstance};
use crate::bits::Bits;
use crate::primitives::commit::open_string;
use crate::primitives::lwe::{pke_encrypt, PublicKey};
use crate::primitives::prg::prg_expand_bits;
use crate::primitives::MIN_N;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationStatement {
    /// The graph has a Hamiltonian cycle.
    Hc { graph: HamiltonicityInstance },
    /// `commitment` commits to `message` under `coins`.
    L1 { n: usize, coins: Bits, commitment: Bits, message: Bits },
    /// `commitment` commits to some message under `coins`.
    Opening { n: usize, coins: Bits, commitment: Bits },
    /// `ciphertext` encrypts a witness for `inner` under `pk`.
    L2 { pk: PublicKey, inner: Box<RelationStatement>, ciphertext: Bits },
    /// Either `ciphertext` encrypts a witness for `inner`, or `x2` is a generator output.
    R { n: usize, inner: Box<RelationStatement>, x2: Bits, pk: PublicKey, ciphertext: Bits },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationId {
    Hc,
    L1,
    Opening,
    L2,
    R,
}

impl FromStr for RelationId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "hc" => RelationId::Hc,
            "l1" => RelationId::L1,
            "opening" => RelationId::Opening,
            "l2" => RelationId::L2,
            "r" => RelationId::R,
            _ => return Err(format!("unknown relation id {s:?}")),
        })
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationId::Hc => "hc",
            RelationId::L1 => "l1",
            RelationId::Opening => "opening",
            RelationId::L2 => "l2",
            RelationId::R => "r",
        })
    }
}

/// Field widths of an `L2`/`R` encryption witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncLayout {
    pub w: usize,
    pub r: usize,
}

impl RelationStatement {
    pub fn relation_id(&self) -> RelationId {
        match self {
            RelationStatement::Hc { .. } => RelationId::Hc,
            RelationStatement::L1 { .. } => RelationId::L1,
            RelationStatement::Opening { .. } => RelationId::Opening,
            RelationStatement::L2 { .. } => RelationId::L2,
            RelationStatement::R { .. } => RelationId::R,
        }
    }

    /// Message length of a well-formed commitment statement.
    fn committed_len(n: usize, coins: &Bits, commitment: &Bits) -> Option<usize> {
        (n >= MIN_N && coins.len() == commitment.len() && commitment.len() % (3 * n) == 0)
            .then(|| commitment.len() / (3 * n))
    }

    pub(crate) fn enc_layout(pk: &PublicKey, inner: &RelationStatement, ciphertext: &Bits) -> Option<EncLayout> {
        let p = pk.params;
        p.validate().ok()?;
        if pk.raw.len() != p.pk_bits() || ciphertext.is_empty() || ciphertext.len() % p.block_bits() != 0 {
            return None;
        }
        let w = ciphertext.len() / p.block_bits();
        (inner.witness_len()? == w).then(|| EncLayout { w, r: p.randomness_bits(w) })
    }

    /// Witness length, or `None` when the statement's fields are inconsistent.
    pub fn witness_len(&self) -> Option<usize> {
        match self {
            RelationStatement::Hc { graph } => Some(graph.vertices() * index_width(graph.vertices())),
            RelationStatement::L1 { n, coins, commitment, message } => {
                let l = Self::committed_len(*n, coins, commitment)?;
                (l == message.len()).then_some(l * n)
            }
            RelationStatement::Opening { n, coins, commitment } => {
                Self::committed_len(*n, coins, commitment).map(|l| l + l * n)
            }
            RelationStatement::L2 { pk, inner, ciphertext } => {
                Self::enc_layout(pk, inner, ciphertext).map(|e| e.w + e.r)
            }
            RelationStatement::R { n, inner, x2, pk, ciphertext } => {
                let e = Self::enc_layout(pk, inner, ciphertext)?;
                (*n >= MIN_N && x2.len() == 3 * n).then_some(1 + e.w + e.r + n)
            }
        }
    }
}

fn check_encryption(pk: &PublicKey, ciphertext: &Bits, w: &Bits, r: &Bits) -> bool {
    matches!(pke_encrypt(pk, w, r), Ok(ct) if &ct.to_bits() == ciphertext)
}

/// The NP verification predicate; malformed inputs are simply rejected.
pub fn check_relation(stmt: &RelationStatement, witness: &Bits) -> bool {
    if stmt.witness_len() != Some(witness.len()) {
        return false;
    }
    match stmt {
        RelationStatement::Hc { graph } => {
            CycleWitness::from_bits(witness, graph.vertices()).is_some_and(|c| graph.is_cycle(&c))
        }
        RelationStatement::L1 { n, coins, commitment, message } => open_string(coins, commitment, message, witness, *n),
        RelationStatement::Opening { n, coins, commitment } => {
            let l = commitment.len() / (3 * n);
            open_string(coins, commitment, &witness.slice(0, l), &witness.slice(l, l * n), *n)
        }
        RelationStatement::L2 { pk, inner, ciphertext } => {
            let e = RelationStatement::enc_layout(pk, inner, ciphertext).expect("checked by witness_len");
            let (w, r) = (witness.slice(0, e.w), witness.slice(e.w, e.r));
            check_encryption(pk, ciphertext, &w, &r) && check_relation(inner, &w)
        }
        RelationStatement::R { n, inner, x2, pk, ciphertext } => {
            let e = RelationStatement::enc_layout(pk, inner, ciphertext).expect("checked by witness_len");
            if witness.get(0) {
                prg_expand_bits(&witness.slice(1 + e.w + e.r, *n), *n).is_ok_and(|g| &g == x2)
            } else {
                let (w, r) = (witness.slice(1, e.w), witness.slice(1 + e.w, e.r));
                check_encryption(pk, ciphertext, &w, &r) && check_relation(inner, &w)
            }
        }
    }
}

/// Witness layout helpers shared by provers and simulators.
pub mod layout {
    use super::*;

    pub fn l2(w: &Bits, r: &Bits) -> Bits {
        Bits::concat(&[w, r])
    }

    pub fn r_encryption_branch(w: &Bits, r: &Bits, n: usize) -> Bits {
        Bits::concat(&[&Bits::zeros(1), w, r, &Bits::zeros(n)])
    }

    pub fn r_generator_branch(seed: &Bits, e: EncLayout) -> Bits {
        Bits::concat(&[&Bits::from_u64(1, 1), &Bits::zeros(e.w + e.r), seed])
    }

    pub fn opening(message: &Bits, seeds: &Bits) -> Bits {
        Bits::concat(&[message, seeds])
    }
}
