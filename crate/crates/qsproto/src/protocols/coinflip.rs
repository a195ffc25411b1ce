//! Coin flipping in the zero-knowledge hybrid model. `B` sends Naor receiver
//! coins, `A` commits to `a` and proves knowledge of an opening (slot `zk`,
//! first call), `B` sends `b`, `A` reveals `a` and proves it is the committed
//! value (slot `zk`, second call). Both output `s = a ^ b`.
//!
//! Messages on the root session, in order: coins, `c`, `b`, `a`.

use super::zkaok::bind_subproofs;
use super::SubproofMode;
use crate::bits::Bits;
use crate::functionalities::{FunctionalityKind, ZkProverInput, ZkVerifierInput};
use crate::machine::{program, Output, Payload, Program, Protocol, Role, Transcript, ROOT_SESSION};
use crate::npreduce::statement::layout;
use crate::npreduce::{RelationId, RelationStatement};
use crate::primitives::commit_string;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinflipParams {
    /// Outcome length, also the commitment seed length.
    pub n: usize,
    pub mode: SubproofMode,
    /// Blum rounds per subproof in micro mode.
    pub rounds: usize,
}

impl CoinflipParams {
    pub fn hybrid(n: usize) -> Self {
        CoinflipParams { n, mode: SubproofMode::Hybrid, rounds: n }
    }

    pub fn micro(n: usize) -> Self {
        CoinflipParams { n, mode: SubproofMode::Micro, rounds: n }
    }
}

pub fn opening_statement(n: usize, coins: &Bits, c: &Bits) -> RelationStatement {
    RelationStatement::Opening { n, coins: coins.clone(), commitment: c.clone() }
}

pub fn l1_statement(n: usize, coins: &Bits, c: &Bits, a: &Bits) -> RelationStatement {
    RelationStatement::L1 { n, coins: coins.clone(), commitment: c.clone(), message: a.clone() }
}

/// Both parties ignore their inputs.
pub fn coinflip_protocol(p: CoinflipParams) -> Arc<Protocol> {
    let name = format!("coinflip(n={},mode={:?})", p.n, p.mode).to_lowercase();
    let outer = Protocol::new(name, party_a(p), party_b(p))
        .realizing(FunctionalityKind::Cf)
        .with_slot("zk", FunctionalityKind::Zk);
    Arc::new(bind_subproofs(outer, p.mode, p.n, p.rounds, &["zk"]))
}

pub fn party_a(p: CoinflipParams) -> Program {
    let n = p.n;
    program(move |ctx, _| async move {
        let Some(coins) = ctx.recv::<Bits>().await else { return ctx.abort("malformed coins") };
        if coins.len() != 3 * n * n {
            return ctx.abort("coins of wrong length");
        }
        let a = ctx.bits(n);
        let seeds = ctx.bits(n * n);
        let c = commit_string(&coins, &a, &seeds, n).expect("lengths fixed above");
        ctx.send(&c);
        let knows = ZkProverInput::new(opening_statement(n, &coins, &c), layout::opening(&a, &seeds));
        ctx.call("zk", Role::A, Payload::encode(&knows)).await;
        let Some(b) = ctx.recv::<Bits>().await else { return ctx.abort("malformed b") };
        if b.len() != n {
            return ctx.abort("b of wrong length");
        }
        ctx.send(&a);
        ctx.call("zk", Role::A, Payload::encode(&ZkProverInput::new(l1_statement(n, &coins, &c, &a), seeds))).await;
        Output::value(&a.xor(&b))
    })
}

pub fn party_b(p: CoinflipParams) -> Program {
    let n = p.n;
    program(move |ctx, _| async move {
        let coins = ctx.bits(3 * n * n);
        ctx.send(&coins);
        let Some(c) = ctx.recv::<Bits>().await else { return ctx.abort("malformed commitment") };
        let out = ctx.call("zk", Role::B, Payload::encode(&ZkVerifierInput::new(RelationId::Opening))).await;
        if out.decode::<RelationStatement>() != Some(opening_statement(n, &coins, &c)) {
            return ctx.abort("proof of knowledge rejected");
        }
        let b = ctx.bits(n);
        ctx.send(&b);
        let Some(a) = ctx.recv::<Bits>().await else { return ctx.abort("malformed a") };
        if a.len() != n {
            return ctx.abort("a of wrong length");
        }
        let out = ctx.call("zk", Role::B, Payload::encode(&ZkVerifierInput::new(RelationId::L1))).await;
        if out.decode::<RelationStatement>() != Some(l1_statement(n, &coins, &c, &a)) {
            return ctx.abort("opening proof rejected");
        }
        Output::value(&a.xor(&b))
    })
}

/// Transcript fields of one run as the outcome algebra sees them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinflipOutcome {
    pub a: Bits,
    pub b: Bits,
    /// `B`'s output, `None` for the abort symbol.
    pub s: Option<Bits>,
}

/// Reads `a`, `b` from the root-session messages and `s` from `B`'s output.
pub fn coinflip_outcome_from_transcript(t: &Transcript) -> Option<CoinflipOutcome> {
    let msgs: Vec<_> = t.messages_in(ROOT_SESSION).collect();
    let b: Bits = msgs.get(2)?.1.decode()?;
    let a: Bits = msgs.get(3)?.1.decode()?;
    let s = t.output(Role::B)?.decode::<Bits>();
    Some(CoinflipOutcome { a, b, s })
}
