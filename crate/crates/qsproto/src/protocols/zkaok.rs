//! The ZKAoK protocol. Phase 1 is a semi-simulatable coin flip fixing a
//! public key `pk = a ^ b`: `P` sends Naor receiver coins, `V` commits to
//! `a`, `P` answers with `b`, `V` reveals `a` and proves it is the committed
//! value (slot `zk1`, `V` as prover). Phase 2: `P` sends `x` and
//! `e = Enc_pk(w)` and proves that `e` encrypts a witness for `x` (slot
//! `zk2`). `V` outputs `x` on acceptance.
//!
//! Messages on the root session, in order: coins, `c`, `b`, `a`, `(x, e)`.

use super::{blum_protocol, SubproofMode};
use crate::bits::Bits;
use crate::functionalities::{FunctionalityKind, ZkProverInput, ZkVerifierInput};
use crate::machine::{compose, program, Output, PartyCtx, Payload, Program, Protocol, Role, Transcript};
use crate::npreduce::statement::layout;
use crate::npreduce::{check_relation, RelationId, RelationStatement};
use crate::primitives::{commit_string, pke_encrypt, LweParams, PublicKey};
use crate::zk::RepetitionMode;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkaokParams {
    /// Commitment seed length.
    pub n: usize,
    pub lwe: LweParams,
    pub mode: SubproofMode,
    /// Blum rounds per subproof in micro mode.
    pub rounds: usize,
}

impl ZkaokParams {
    pub fn hybrid(n: usize) -> Self {
        ZkaokParams { n, lwe: LweParams::toy(), mode: SubproofMode::Hybrid, rounds: n }
    }

    pub fn micro(n: usize) -> Self {
        ZkaokParams { n, lwe: LweParams::micro(), mode: SubproofMode::Micro, rounds: n }
    }

    pub fn commit_len(&self) -> usize {
        self.lwe.pk_bits()
    }
}

/// `P`'s Phase 2 message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementAndCiphertext {
    pub statement: RelationStatement,
    pub ciphertext: Bits,
}

pub fn l1_statement(p: &ZkaokParams, coins: &Bits, c: &Bits, a: &Bits) -> RelationStatement {
    RelationStatement::L1 { n: p.n, coins: coins.clone(), commitment: c.clone(), message: a.clone() }
}

pub fn l2_statement(pk: &PublicKey, x: &RelationStatement, e: &Bits) -> RelationStatement {
    RelationStatement::L2 { pk: pk.clone(), inner: Box::new(x.clone()), ciphertext: e.clone() }
}

pub fn zkaok_protocol(p: ZkaokParams) -> Arc<Protocol> {
    let name = format!("zkaok(n={},mode={:?})", p.n, p.mode).to_lowercase();
    let outer = Protocol::new(name, prover_program(p), verifier_program(p))
        .realizing(FunctionalityKind::Zk)
        .with_slot("zk1", FunctionalityKind::Zk)
        .with_slot("zk2", FunctionalityKind::Zk);
    Arc::new(bind_subproofs(outer, p.mode, p.n, p.rounds, &["zk1", "zk2"]))
}

/// In micro mode, binds each named zero-knowledge slot to sequential Blum.
pub(crate) fn bind_subproofs(mut outer: Protocol, mode: SubproofMode, n: usize, rounds: usize, slots: &[&str]) -> Protocol {
    if mode == SubproofMode::Micro {
        for slot in slots {
            outer = compose(&outer, slot, blum_protocol(n, rounds, RepetitionMode::Sequential)).expect("declared slot");
        }
    }
    outer
}

pub fn prover_program(p: ZkaokParams) -> Program {
    program(move |ctx, input| async move {
        let Some(inp) = input.decode::<ZkProverInput>() else { return ctx.abort("malformed input") };
        if inp.statement.relation_id().to_string() != inp.relation || !check_relation(&inp.statement, &inp.witness) {
            return ctx.abort("no valid witness");
        }
        prover_body(ctx, p, inp.statement, inp.witness).await
    })
}

/// Runs the prover with `witness` whether or not it is valid.
pub fn cheating_prover_program(p: ZkaokParams) -> Program {
    program(move |ctx, input| async move {
        let Some(inp) = input.decode::<ZkProverInput>() else { return ctx.abort("malformed input") };
        prover_body(ctx, p, inp.statement, inp.witness).await
    })
}

async fn prover_body(ctx: PartyCtx, p: ZkaokParams, x: RelationStatement, w: Bits) -> Output {
    let len = p.commit_len();
    let coins = ctx.bits(3 * p.n * len);
    ctx.send(&coins);
    let Some(c) = ctx.recv::<Bits>().await else { return ctx.abort("malformed commitment") };
    let b = ctx.bits(len);
    ctx.send(&b);
    let Some(a) = ctx.recv::<Bits>().await else { return ctx.abort("malformed opening") };
    if a.len() != len {
        return ctx.abort("opening of wrong length");
    }
    let out = ctx.call("zk1", Role::B, Payload::encode(&ZkVerifierInput::new(RelationId::L1))).await;
    if out.decode::<RelationStatement>() != Some(l1_statement(&p, &coins, &c, &a)) {
        return ctx.abort("phase 1 proof rejected");
    }
    let Ok(pk) = PublicKey::from_bits(p.lwe, a.xor(&b)) else { return ctx.abort("bad key parameters") };
    let r = ctx.bits(p.lwe.randomness_bits(w.len()));
    let Ok(e) = pke_encrypt(&pk, &w, &r) else { return ctx.abort("encryption failed") };
    let e = e.to_bits();
    ctx.send(&StatementAndCiphertext { statement: x.clone(), ciphertext: e.clone() });
    let stmt = l2_statement(&pk, &x, &e);
    let zk = ZkProverInput::new(stmt, layout::l2(&w, &r));
    ctx.call("zk2", Role::A, Payload::encode(&zk)).await;
    Output::unit()
}

pub fn verifier_program(p: ZkaokParams) -> Program {
    program(move |ctx, input| async move {
        let Some(ZkVerifierInput { relation }) = input.decode() else { return ctx.abort("malformed input") };
        let len = p.commit_len();
        let Some(coins) = ctx.recv::<Bits>().await else { return ctx.abort("malformed coins") };
        if coins.len() != 3 * p.n * len {
            return ctx.abort("coins of wrong length");
        }
        let a = ctx.bits(len);
        let seeds = ctx.bits(p.n * len);
        let c = commit_string(&coins, &a, &seeds, p.n).expect("lengths fixed above");
        ctx.send(&c);
        let Some(b) = ctx.recv::<Bits>().await else { return ctx.abort("malformed b") };
        if b.len() != len {
            return ctx.abort("b of wrong length");
        }
        ctx.send(&a);
        let zk1 = ZkProverInput::new(l1_statement(&p, &coins, &c, &a), seeds);
        ctx.call("zk1", Role::A, Payload::encode(&zk1)).await;
        let pk = PublicKey::from_bits(p.lwe, a.xor(&b)).expect("length fixed above");
        let Some(StatementAndCiphertext { statement: x, ciphertext: e }) = ctx.recv().await else {
            return ctx.abort("malformed phase 2 message");
        };
        if x.relation_id().to_string() != relation {
            return ctx.abort("statement of another relation");
        }
        let out = ctx.call("zk2", Role::B, Payload::encode(&ZkVerifierInput::new(RelationId::L2))).await;
        if out.decode::<RelationStatement>() != Some(l2_statement(&pk, &x, &e)) {
            return ctx.abort("phase 2 proof rejected");
        }
        Output::value(&x)
    })
}

/// `a ^ b` as read from the root-session messages of a run.
pub fn pk_from_transcript(t: &Transcript, p: &ZkaokParams) -> Option<PublicKey> {
    let msgs: Vec<_> = t.messages_in(crate::machine::ROOT_SESSION).collect();
    let b: Bits = msgs.get(2)?.1.decode()?;
    let a: Bits = msgs.get(3)?.1.decode()?;
    (a.len() == b.len()).then(|| PublicKey::from_bits(p.lwe, a.xor(&b)).ok()).flatten()
}
