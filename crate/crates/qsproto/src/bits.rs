//! Fixed-length bit strings.
//!
//! Bit `i` of the packed byte form lives in byte `i / 8` at position `i % 8`
//! (least significant first). Unused high bits of the last byte are zero.

use bitvec::prelude::*;
use rand::RngCore;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Bits(BitVec<u8, Lsb0>);

impl Bits {
    pub fn new() -> Self {
        Bits(BitVec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(bitvec![u8, Lsb0; 0; len])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        bits.iter().copied().collect()
    }

    /// Low `width` bits of `value`, least significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64);
        (0..width).map(|i| (value >> i) & 1 == 1).collect()
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        if len % 8 != 0 {
            let last = bytes.len() - 1;
            bytes[last] &= (1u8 << (len % 8)) - 1;
        }
        Self::from_packed(&bytes, len).expect("length matches")
    }

    /// Inverse of [`Bits::to_packed`]; rejects non-zero padding.
    pub fn from_packed(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        if len % 8 != 0 && bytes[len / 8] >> (len % 8) != 0 {
            return None;
        }
        let mut v = BitVec::<u8, Lsb0>::from_vec(bytes.to_vec());
        v.truncate(len);
        Some(Bits(v))
    }

    pub fn to_packed(&self) -> Vec<u8> {
        // Slices may start mid-byte; copy into fresh, byte-aligned storage.
        let mut v = BitVec::<u8, Lsb0>::with_capacity(self.len());
        v.extend_from_bitslice(&self.0);
        v.set_uninitialized(false);
        v.into_vec()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.0.set(i, b);
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    /// Little-endian value of `len <= 64` bits starting at `start`.
    pub fn word(&self, start: usize, len: usize) -> u64 {
        assert!(len <= 64 && start + len <= self.len(), "word out of range");
        if len == 0 {
            return 0;
        }
        let raw = self.0.as_raw_slice();
        let byte = start / 8;
        let end = raw.len().min(byte + 9);
        let mut buf = [0u8; 16];
        buf[..end - byte].copy_from_slice(&raw[byte..end]);
        let v = (u128::from_le_bytes(buf) >> (start % 8)) as u64;
        v & (u64::MAX >> (64 - len))
    }

    /// Consecutive `width`-bit words from the start; a trailing partial word is dropped.
    pub fn words(&self, width: usize) -> Words<'_> {
        assert!((1..=64).contains(&width));
        Words { raw: self.0.as_raw_slice(), width, remaining: self.len() / width, acc: 0, filled: 0, next_byte: 0 }
    }

    /// Concatenation of the low `width` bits of each value.
    pub fn from_words(values: impl IntoIterator<Item = u64>, width: usize) -> Bits {
        assert!(width <= 64);
        let mut bytes: Vec<u8> = Vec::new();
        let mut acc: u128 = 0;
        let mut filled = 0usize;
        let mut len = 0usize;
        let mask = if width == 0 { 0 } else { u64::MAX >> (64 - width) };
        for v in values {
            acc |= ((v & mask) as u128) << filled;
            filled += width;
            len += width;
            while filled >= 8 {
                bytes.push(acc as u8);
                acc >>= 8;
                filled -= 8;
            }
        }
        if filled > 0 {
            bytes.push(acc as u8);
        }
        Bits::from_packed(&bytes, len).expect("masked words")
    }

    /// Appends the low `len <= 64` bits of `value`, least significant first.
    pub fn push_word(&mut self, value: u64, len: usize) {
        if len == 0 {
            return;
        }
        let old = self.len();
        self.0.resize(old + len, false);
        self.0[old..].store_le(value & (u64::MAX >> (64 - len)));
    }

    pub fn extend(&mut self, other: &Bits) {
        self.0.extend_from_bitslice(&other.0);
    }

    pub fn concat(parts: &[&Bits]) -> Bits {
        let mut out = Bits::new();
        for p in parts {
            out.extend(p);
        }
        out
    }

    pub fn slice(&self, start: usize, len: usize) -> Bits {
        Bits(self.0[start..start + len].to_bitvec())
    }

    /// Splits into consecutive chunks of `width` bits; `len` must divide evenly.
    pub fn chunks(&self, width: usize) -> Vec<Bits> {
        assert!(width > 0 && self.len() % width == 0);
        self.0.chunks(width).map(|c| Bits(c.to_bitvec())).collect()
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len(), other.len(), "xor of unequal lengths");
        let mut v = self.0.clone();
        v ^= &other.0;
        Bits(v)
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.0.not_any()
    }

    /// Little-endian integer value; at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64);
        self.iter()
            .enumerate()
            .fold(0, |acc, (i, b)| acc | ((b as u64) << i))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().by_vals()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_packed())
    }

    pub fn from_hex(s: &str, len: usize) -> Option<Self> {
        Self::from_packed(&hex::decode(s).ok()?, len)
    }
}

/// Streaming reader returned by [`Bits::words`].
pub struct Words<'a> {
    raw: &'a [u8],
    width: usize,
    remaining: usize,
    acc: u128,
    filled: usize,
    next_byte: usize,
}

impl Iterator for Words<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        if self.filled < self.width {
            if self.next_byte + 8 <= self.raw.len() {
                let chunk: [u8; 8] = self.raw[self.next_byte..self.next_byte + 8].try_into().expect("8 bytes");
                self.acc |= (u64::from_le_bytes(chunk) as u128) << self.filled;
                self.next_byte += 8;
                self.filled += 64;
            } else {
                while self.filled < self.width {
                    self.acc |= (self.raw[self.next_byte] as u128) << self.filled;
                    self.next_byte += 1;
                    self.filled += 8;
                }
            }
        }
        let v = (self.acc as u64) & (u64::MAX >> (64 - self.width));
        self.acc >>= self.width;
        self.filled -= self.width;
        self.remaining -= 1;
        Some(v)
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
            write!(f, "Bits({s})")
        } else {
            write!(f, "Bits[{}]({})", self.len(), self.to_hex())
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct HexForm {
    bits: usize,
    hex: String,
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if s.is_human_readable() {
            HexForm {
                bits: self.len(),
                hex: self.to_hex(),
            }
            .serialize(s)
        } else {
            (self.len() as u64, self.to_packed()).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        if d.is_human_readable() {
            let h = HexForm::deserialize(d)?;
            Bits::from_hex(&h.hex, h.bits).ok_or_else(|| D::Error::custom("malformed bit string"))
        } else {
            let (len, bytes): (u64, Vec<u8>) = Deserialize::deserialize(d)?;
            let len = usize::try_from(len).map_err(D::Error::custom)?;
            Bits::from_packed(&bytes, len).ok_or_else(|| D::Error::custom("malformed bit string"))
        }
    }
}
