//! Semi-honest 1-out-of-2 OT from dense encryption. The receiver publishes a
//! real key at position `c` and a uniform string at position `1 - c`; the
//! sender encrypts `s_i` under key `i`. Both keys are plain bit strings of
//! the same length, so the receiver's message hides `c`.

use crate::bits::Bits;
use crate::functionalities::{FunctionalityKind, OtInput};
use crate::machine::{program, Output, Protocol};
use crate::primitives::{pke_decrypt, pke_encrypt, pke_keygen, Ciphertext, LweParams, PublicKey};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtParams {
    pub lwe: LweParams,
}

impl Default for OtParams {
    fn default() -> Self {
        OtParams { lwe: LweParams::toy() }
    }
}

/// `A` is the sender with an [`OtInput`]; `B` the receiver with its choice
/// bit, and outputs `s_c`.
pub fn ot_semi_honest_protocol(p: OtParams) -> Arc<Protocol> {
    let lwe = p.lwe;
    let sender = program(move |ctx, input| async move {
        let Some(OtInput { s0, s1 }) = input.decode() else { return ctx.abort("malformed input") };
        let Some((k0, k1)) = ctx.recv::<(Bits, Bits)>().await else { return ctx.abort("malformed keys") };
        let mut cts = Vec::with_capacity(2);
        for (k, s) in [(k0, s0), (k1, s1)] {
            let Ok(pk) = PublicKey::from_bits(lwe, k) else { return ctx.abort("key of wrong length") };
            let r = ctx.bits(lwe.randomness_bits(s.len()));
            let Ok(ct) = pke_encrypt(&pk, &s, &r) else { return ctx.abort("encryption failed") };
            cts.push(ct.to_bits());
        }
        ctx.send(&(cts[0].clone(), cts[1].clone()));
        Output::unit()
    });
    let receiver = program(move |ctx, input| async move {
        let Some(c) = input.decode::<bool>() else { return ctx.abort("malformed input") };
        let kp = ctx.with_tape(|t| pke_keygen(lwe, t)).expect("validated parameters");
        let fake = ctx.bits(lwe.pk_bits());
        let real = kp.public_key.raw.clone();
        ctx.send(&if c { (fake, real) } else { (real, fake) });
        let Some((e0, e1)) = ctx.recv::<(Bits, Bits)>().await else { return ctx.abort("malformed ciphertexts") };
        let Ok(ct) = Ciphertext::from_bits(lwe, if c { &e1 } else { &e0 }) else {
            return ctx.abort("malformed ciphertext");
        };
        Output::value(&pke_decrypt(&kp.secret_key, &ct))
    });
    Arc::new(Protocol::new("ot-semi-honest", sender, receiver).realizing(FunctionalityKind::Ot).semi_honest_only())
}
