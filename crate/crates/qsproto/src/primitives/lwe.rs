//! Regev-style encryption with dense public keys.
//!
//! A public key is a fixed-length bit string of `samples * (dim + 1)` words:
//! the `A` matrix row by row, then `b`. Words are `log2 q` bits for a power of
//! two modulus and 16 bits otherwise, read modulo `q`. Every bit string of the
//! right length is a valid key, so a uniform string is a "fake" key.

use super::{check_len, ParamError};
use crate::bits::Bits;
use crate::tape::Tape;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LweParams {
    pub dim: usize,
    pub samples: usize,
    pub modulus: u32,
}

impl LweParams {
    /// Desk-speed parameters; not secure.
    pub const fn toy() -> Self {
        LweParams { dim: 16, samples: 32, modulus: 3329 }
    }

    /// Smallest set the circuit compiler accepts: a 6-bit key, 6-bit blocks.
    pub const fn micro() -> Self {
        LweParams { dim: 1, samples: 1, modulus: 8 }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.dim == 0 || self.samples == 0 {
            return Err(ParamError::Invalid("dimension and sample count must be positive".into()));
        }
        if self.modulus < 8 || self.modulus > 1 << 16 {
            return Err(ParamError::Invalid(format!("modulus {} outside [8, 65536]", self.modulus)));
        }
        // Error is at most `samples` in absolute value; keep it under q/4.
        if 4 * self.samples as u64 >= self.modulus as u64 {
            return Err(ParamError::Invalid("modulus too small for the sample count".into()));
        }
        Ok(())
    }

    pub fn word_bits(&self) -> usize {
        if self.modulus.is_power_of_two() {
            self.modulus.trailing_zeros() as usize
        } else {
            16
        }
    }

    /// Bits per ciphertext element (canonical residues).
    pub fn elem_bits(&self) -> usize {
        (32 - (self.modulus - 1).leading_zeros()) as usize
    }

    pub fn pk_bits(&self) -> usize {
        self.samples * (self.dim + 1) * self.word_bits()
    }

    pub fn randomness_bits(&self, msg_len: usize) -> usize {
        self.samples * msg_len
    }

    pub fn block_bits(&self) -> usize {
        (self.dim + 1) * self.elem_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicKey {
    pub params: LweParams,
    pub raw: Bits,
}

impl PublicKey {
    pub fn from_bits(params: LweParams, raw: Bits) -> Result<Self, ParamError> {
        params.validate()?;
        check_len("public key", params.pk_bits(), raw.len())?;
        Ok(PublicKey { params, raw })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.raw.to_packed()
    }

    pub fn from_bytes(params: LweParams, bytes: &[u8]) -> Result<Self, ParamError> {
        let raw = Bits::from_packed(bytes, params.pk_bits()).ok_or(ParamError::Length {
            what: "public key bytes",
            expected: params.pk_bits().div_ceil(8),
            got: bytes.len(),
        })?;
        Self::from_bits(params, raw)
    }

    fn word(&self, idx: usize) -> u32 {
        let w = self.params.word_bits();
        self.raw.slice(idx * w, w).to_u64() as u32 % self.params.modulus
    }

    /// `A[i][j]` reduced mod q.
    pub fn a(&self, i: usize, j: usize) -> u32 {
        self.word(i * self.params.dim + j)
    }

    pub fn b(&self, i: usize) -> u32 {
        self.word(self.params.samples * self.params.dim + i)
    }

    /// Decoded `(A, b)` for repeated use.
    pub fn matrix(&self) -> (Vec<Vec<u32>>, Vec<u32>) {
        let p = &self.params;
        let a = (0..p.samples).map(|i| (0..p.dim).map(|j| self.a(i, j)).collect()).collect();
        let b = (0..p.samples).map(|i| self.b(i)).collect();
        (a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey {
    pub params: LweParams,
    pub s: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseKeyPair {
    pub public_key: PublicKey,
    pub secret_key: SecretKey,
}

/// One encrypted bit: `(u, v)` with `u = A^T r`, `v = b.r + bit * floor(q/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherBlock {
    pub u: Vec<u32>,
    pub v: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub params: LweParams,
    pub body: Vec<CipherBlock>,
    /// Encryptor-side copy of `r`; never part of the wire form.
    #[serde(skip)]
    pub randomness: Option<Bits>,
}

impl Ciphertext {
    pub fn bit_count(&self) -> usize {
        self.body.len()
    }

    /// Wire form: per block, `u` then `v`, each element in `elem_bits`.
    pub fn to_bits(&self) -> Bits {
        let eb = self.params.elem_bits();
        let mut out = Bits::new();
        for blk in &self.body {
            for &x in blk.u.iter().chain(std::iter::once(&blk.v)) {
                out.extend(&Bits::from_u64(x as u64, eb));
            }
        }
        out
    }

    /// Parses the wire form; elements need not be reduced.
    pub fn from_bits(params: LweParams, bits: &Bits) -> Result<Self, ParamError> {
        params.validate()?;
        let bb = params.block_bits();
        if bits.is_empty() || bits.len() % bb != 0 {
            return Err(ParamError::Invalid(format!("ciphertext length {} not a positive multiple of {bb}", bits.len())));
        }
        let eb = params.elem_bits();
        let body = bits
            .chunks(bb)
            .into_iter()
            .map(|blk| {
                let mut els: Vec<u32> = blk.chunks(eb).iter().map(|e| e.to_u64() as u32).collect();
                let v = els.pop().expect("dim + 1 elements");
                CipherBlock { u: els, v }
            })
            .collect();
        Ok(Ciphertext { params, body, randomness: None })
    }
}

pub fn pke_keygen(params: LweParams, tape: &mut Tape) -> Result<DenseKeyPair, ParamError> {
    params.validate()?;
    let q = params.modulus as u64;
    let wb = params.word_bits();
    let s: Vec<u32> = (0..params.dim).map(|_| tape.below(q) as u32).collect();
    let mut raw = Bits::new();
    let mut rows = Vec::with_capacity(params.samples);
    for _ in 0..params.samples {
        let words: Vec<u64> = (0..params.dim).map(|_| tape.bits(wb).to_u64()).collect();
        for &w in &words {
            raw.extend(&Bits::from_u64(w, wb));
        }
        rows.push(words);
    }
    for row in &rows {
        let dot: u64 = row.iter().zip(&s).map(|(&a, &si)| (a % q) * si as u64).sum();
        let e = tape.below(3) as i64 - 1;
        let b = (dot as i64 + e).rem_euclid(q as i64) as u64;
        // Lift to a uniformly chosen word with residue b.
        let lifts = ((1u64 << wb) - 1 - b) / q + 1;
        raw.extend(&Bits::from_u64(b + q * tape.below(lifts), wb));
    }
    Ok(DenseKeyPair {
        public_key: PublicKey { params, raw },
        secret_key: SecretKey { params, s },
    })
}

/// Reinterprets `coins` as a public key; no secret key exists for it.
pub fn pke_sample_fake_pk(params: LweParams, coins: &Bits) -> Result<PublicKey, ParamError> {
    PublicKey::from_bits(params, coins.clone())
}

pub fn pke_encrypt(pk: &PublicKey, message: &Bits, r: &Bits) -> Result<Ciphertext, ParamError> {
    let p = pk.params;
    if message.is_empty() {
        return Err(ParamError::Invalid("empty plaintext".into()));
    }
    check_len("encryption randomness", p.randomness_bits(message.len()), r.len())?;
    let q = p.modulus as u64;
    let (a, b) = pk.matrix();
    let half = q / 2;
    let body = (0..message.len())
        .map(|k| {
            let rk = |i: usize| r.get(k * p.samples + i);
            let u = (0..p.dim)
                .map(|j| ((0..p.samples).filter(|&i| rk(i)).map(|i| a[i][j] as u64).sum::<u64>() % q) as u32)
                .collect();
            let v = (0..p.samples).filter(|&i| rk(i)).map(|i| b[i] as u64).sum::<u64>()
                + if message.get(k) { half } else { 0 };
            CipherBlock { u, v: (v % q) as u32 }
        })
        .collect();
    Ok(Ciphertext { params: p, body, randomness: Some(r.clone()) })
}

/// Never fails: a mismatched key just yields some bit string.
pub fn pke_decrypt(sk: &SecretKey, ct: &Ciphertext) -> Bits {
    let q = sk.params.modulus as u64;
    ct.body
        .iter()
        .map(|blk| {
            let dot: u64 = blk.u.iter().zip(&sk.s).map(|(&u, &s)| (u as u64 % q) * s as u64).sum();
            let x = (blk.v as u64 % q + q - dot % q) % q;
            // round(2x/q) mod 2
            ((4 * x + q) / (2 * q)) % 2 == 1
        })
        .collect()
}
