//! Two length-tripling generators `{0,1}^n -> {0,1}^{3n}`.
//!
//! For `n <= 8` the micro generator is a local XOR-AND predicate whose wiring
//! is shared with the circuit compiler. Above that a ChaCha20 stream keyed by
//! a SHA-256 digest of the seed is used.

use super::{check_len, ParamError};
use crate::bits::Bits;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::OnceLock;

pub const MIN_N: usize = 4;
pub const MICRO_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrgSeed(Bits);

impl PrgSeed {
    pub fn new(bits: Bits, n: usize) -> Result<Self, ParamError> {
        if n < MIN_N {
            return Err(ParamError::Invalid(format!("security parameter {n} < {MIN_N}")));
        }
        check_len("prg seed", n, bits.len())?;
        Ok(PrgSeed(bits))
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// One output bit of the micro generator: `x[lin] ^ (x[a] ^ neg_a) & x[b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MicroTap {
    pub lin: usize,
    pub a: usize,
    pub neg_a: bool,
    pub b: usize,
}

/// Output wiring of the micro generator at seed length `n`, in output order.
pub fn micro_taps(n: usize) -> Vec<MicroTap> {
    assert!((MIN_N..=MICRO_MAX_N).contains(&n));
    let m = |k: usize| k % n;
    let mut taps = Vec::with_capacity(3 * n);
    for i in 0..n {
        taps.push(MicroTap { lin: i, a: m(i + 1), neg_a: false, b: m(i + 2) });
    }
    for i in 0..n {
        taps.push(MicroTap { lin: m(i + 1), a: m(i + 2), neg_a: false, b: m(i + 3) });
    }
    for i in 0..n {
        taps.push(MicroTap { lin: m(i + 3), a: m(i + 1), neg_a: true, b: m(i + 2) });
    }
    taps
}

fn micro_eval(n: usize, seed: u64) -> u64 {
    let x = |k: usize| (seed >> k) & 1;
    micro_taps(n).iter().enumerate().fold(0, |acc, (j, t)| {
        let a = x(t.a) ^ t.neg_a as u64;
        acc | ((x(t.lin) ^ (a & x(t.b))) << j)
    })
}

/// Full output table of the micro generator, indexed by the seed value.
pub fn micro_table(n: usize) -> &'static [u64] {
    static TABLES: [OnceLock<Vec<u64>>; MICRO_MAX_N + 1] = [const { OnceLock::new() }; MICRO_MAX_N + 1];
    TABLES[n].get_or_init(|| (0..1u64 << n).map(|s| micro_eval(n, s)).collect())
}

fn keyed_expand(seed: &Bits) -> Bits {
    let mut h = Sha256::new();
    h.update(b"qsproto/prg");
    h.update((seed.len() as u64).to_le_bytes());
    h.update(seed.to_packed());
    let mut rng = ChaCha20Rng::from_seed(h.finalize().into());
    let out_len = 3 * seed.len();
    let mut bytes = vec![0u8; out_len.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    if out_len % 8 != 0 {
        let last = bytes.len() - 1;
        bytes[last] &= (1u8 << (out_len % 8)) - 1;
    }
    Bits::from_packed(&bytes, out_len).expect("masked")
}

pub fn prg_expand(seed: &PrgSeed) -> Bits {
    let n = seed.n();
    if n <= MICRO_MAX_N {
        Bits::from_u64(micro_table(n)[seed.0.to_u64() as usize], 3 * n)
    } else {
        keyed_expand(&seed.0)
    }
}

/// Expansion of a raw bit string, checking it has length `n`.
pub fn prg_expand_bits(seed: &Bits, n: usize) -> Result<Bits, ParamError> {
    Ok(prg_expand(&PrgSeed::new(seed.clone(), n)?))
}

/// Packed-word expansion for `3n <= 64`, used by the hot Blum loops.
pub fn prg_expand_word(n: usize, seed: u64) -> u64 {
    debug_assert!(3 * n <= 64);
    if n <= MICRO_MAX_N {
        micro_table(n)[seed as usize]
    } else {
        keyed_expand(&Bits::from_u64(seed, n)).to_u64()
    }
}
