//! Zero knowledge in the coin-flipping hybrid model. The parties flip
//! `s = (s1, s2)` (slot `cf`, `P` as `A`), read `s1` as a public key, and `P`
//! sends `x` with `e = Enc_s1(w)`. `P` then proves with a witness
//! indistinguishable proof (slot `wi`) that either `e` encrypts a witness
//! for `x` or `s2` is a generator output.
//!
//! `s1` has the key's full length rather than `n` bits; dense keys of
//! desk-scale parameters are longer than the seed.

use super::blum_protocol;
use super::zkaok::StatementAndCiphertext;
use super::SubproofMode;
use crate::bits::Bits;
use crate::functionalities::{CfInput, FunctionalityKind, ZkProverInput, ZkVerifierInput};
use crate::machine::{compose, program, Output, Payload, Program, Protocol, Role};
use crate::npreduce::statement::layout;
use crate::npreduce::{check_relation, RelationId, RelationStatement};
use crate::primitives::{pke_encrypt, pke_sample_fake_pk, LweParams, PublicKey};
use crate::zk::RepetitionMode;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkcfParams {
    /// Generator seed length; `s2` has `3n` bits.
    pub n: usize,
    pub lwe: LweParams,
    pub mode: SubproofMode,
    /// Parallel Blum rounds in micro mode.
    pub q: usize,
}

impl ZkcfParams {
    pub fn hybrid(n: usize) -> Self {
        ZkcfParams { n, lwe: LweParams::toy(), mode: SubproofMode::Hybrid, q: n }
    }

    pub fn micro(n: usize) -> Self {
        ZkcfParams { n, lwe: LweParams::micro(), mode: SubproofMode::Micro, q: n }
    }

    pub fn coin_len(&self) -> usize {
        self.lwe.pk_bits() + 3 * self.n
    }

    /// `(s1 as a key, s2)`; `None` if `s` has the wrong length.
    pub fn split(&self, s: &Bits) -> Option<(PublicKey, Bits)> {
        if s.len() != self.coin_len() {
            return None;
        }
        let k = self.lwe.pk_bits();
        let pk = pke_sample_fake_pk(self.lwe, &s.slice(0, k)).ok()?;
        Some((pk, s.slice(k, 3 * self.n)))
    }
}

pub fn r_statement(p: &ZkcfParams, x: &RelationStatement, s2: &Bits, pk: &PublicKey, e: &Bits) -> RelationStatement {
    RelationStatement::R { n: p.n, inner: Box::new(x.clone()), x2: s2.clone(), pk: pk.clone(), ciphertext: e.clone() }
}

pub fn zk_from_cf_protocol(p: ZkcfParams) -> Arc<Protocol> {
    let name = format!("zkcf(n={},mode={:?})", p.n, p.mode).to_lowercase();
    let mut outer = Protocol::new(name, prover_program(p), verifier_program(p))
        .realizing(FunctionalityKind::Zk)
        .with_slot("cf", FunctionalityKind::Cf)
        .with_slot("wi", FunctionalityKind::Zk);
    if p.mode == SubproofMode::Micro {
        outer = compose(&outer, "wi", blum_protocol(p.n, p.q, RepetitionMode::Parallel)).expect("declared slot");
    }
    Arc::new(outer)
}

pub fn prover_program(p: ZkcfParams) -> Program {
    program(move |ctx, input| async move {
        let Some(inp) = input.decode::<ZkProverInput>() else { return ctx.abort("malformed input") };
        if inp.statement.relation_id().to_string() != inp.relation || !check_relation(&inp.statement, &inp.witness) {
            return ctx.abort("no valid witness");
        }
        let (x, w) = (inp.statement, inp.witness);
        let s = ctx.call("cf", Role::A, Payload::encode(&CfInput { n: p.coin_len() })).await;
        let Some((pk, s2)) = s.decode::<Bits>().and_then(|s| p.split(&s)) else { return ctx.abort("coin flip failed") };
        let r = ctx.bits(p.lwe.randomness_bits(w.len()));
        let Ok(e) = pke_encrypt(&pk, &w, &r) else { return ctx.abort("encryption failed") };
        let e = e.to_bits();
        ctx.send(&StatementAndCiphertext { statement: x.clone(), ciphertext: e.clone() });
        let zk = ZkProverInput::new(r_statement(&p, &x, &s2, &pk, &e), layout::r_encryption_branch(&w, &r, p.n));
        ctx.call("wi", Role::A, Payload::encode(&zk)).await;
        Output::unit()
    })
}

pub fn verifier_program(p: ZkcfParams) -> Program {
    program(move |ctx, input| async move {
        let Some(ZkVerifierInput { relation }) = input.decode() else { return ctx.abort("malformed input") };
        let s = ctx.call("cf", Role::B, Payload::encode(&CfInput { n: p.coin_len() })).await;
        let Some((pk, s2)) = s.decode::<Bits>().and_then(|s| p.split(&s)) else { return ctx.abort("coin flip failed") };
        let Some(StatementAndCiphertext { statement: x, ciphertext: e }) = ctx.recv().await else {
            return ctx.abort("malformed statement message");
        };
        if x.relation_id().to_string() != relation {
            return ctx.abort("statement of another relation");
        }
        let out = ctx.call("wi", Role::B, Payload::encode(&ZkVerifierInput::new(RelationId::R))).await;
        if out.decode::<RelationStatement>() != Some(r_statement(&p, &x, &s2, &pk, &e)) {
            return ctx.abort("proof rejected");
        }
        Output::value(&x)
    })
}
