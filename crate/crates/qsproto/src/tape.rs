//! Seed derivation and party randomness tapes.

use crate::bits::Bits;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Domain-separated 32-byte seed from a master seed and a label.
pub fn derive_seed(master: &[u8], label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((master.len() as u64).to_le_bytes());
    h.update(master);
    h.update(label.as_bytes());
    h.finalize().into()
}

pub fn derive_rng(master: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(derive_seed(&master.to_le_bytes(), label))
}

/// Where a tape's bits come from.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TapeSource {
    Seed([u8; 32]),
    /// Consumed bit by bit; running out is a fault.
    Explicit(Bits),
}

impl TapeSource {
    pub fn digest(&self) -> [u8; 32] {
        match self {
            TapeSource::Seed(s) => *s,
            TapeSource::Explicit(b) => derive_seed(&b.to_packed(), &format!("explicit/{}", b.len())),
        }
    }
}

/// A randomness tape. Explicit tapes hand out exactly the bits requested so
/// that enumeration over all tapes is possible.
pub struct Tape {
    inner: TapeInner,
}

enum TapeInner {
    Seeded(ChaCha20Rng),
    Explicit { bits: Bits, pos: usize },
}

impl Tape {
    pub fn new(src: &TapeSource) -> Self {
        let inner = match src {
            TapeSource::Seed(s) => TapeInner::Seeded(ChaCha20Rng::from_seed(*s)),
            TapeSource::Explicit(b) => TapeInner::Explicit {
                bits: b.clone(),
                pos: 0,
            },
        };
        Tape { inner }
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self::new(&TapeSource::Seed(seed))
    }

    pub fn bits(&mut self, len: usize) -> Bits {
        match &mut self.inner {
            TapeInner::Seeded(r) => Bits::random(r, len),
            TapeInner::Explicit { bits, pos } => {
                assert!(*pos + len <= bits.len(), "explicit tape exhausted");
                let out = bits.slice(*pos, len);
                *pos += len;
                out
            }
        }
    }

    pub fn bit(&mut self) -> bool {
        self.bits(1).get(0)
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        match &mut self.inner {
            TapeInner::Seeded(r) => r.gen_range(0..bound),
            TapeInner::Explicit { .. } => {
                let width = (64 - (bound - 1).leading_zeros()) as usize;
                loop {
                    let v = self.bits(width).to_u64();
                    if v < bound {
                        return v;
                    }
                }
            }
        }
    }

    /// Uniform permutation of `0..v` (Fisher-Yates).
    pub fn permutation(&mut self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..v).collect();
        for i in (1..v).rev() {
            let j = self.below(i as u64 + 1) as usize;
            p.swap(i, j);
        }
        p
    }

    pub fn seed32(&mut self) -> [u8; 32] {
        let b = self.bits(256).to_packed();
        b.try_into().expect("32 bytes")
    }
}

impl RngCore for Tape {
    fn next_u32(&mut self) -> u32 {
        self.bits(32).to_u64() as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.bits(64).to_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        match &mut self.inner {
            TapeInner::Seeded(r) => r.fill_bytes(dest),
            TapeInner::Explicit { .. } => {
                let b = self.bits(dest.len() * 8).to_packed();
                dest.copy_from_slice(&b);
            }
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_tape_hands_out_exact_bits() {
        let src = TapeSource::Explicit(Bits::from_u64(0b1011_0110, 8));
        let mut t = Tape::new(&src);
        assert_eq!(t.bits(3).to_u64(), 0b110);
        assert_eq!(t.bits(5).to_u64(), 0b10110);
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut t = Tape::from_seed([3; 32]);
        let mut p = t.permutation(50);
        p.sort();
        assert_eq!(p, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn derived_seeds_separate_labels() {
        assert_ne!(derive_seed(b"m", "a"), derive_seed(b"m", "b"));
        assert_eq!(derive_seed(b"m", "a"), derive_seed(b"m", "a"));
    }
}
