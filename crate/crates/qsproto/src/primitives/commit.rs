//! Naor's bit commitment: bit 0 commits as `G(s)`, bit 1 as `G(s) ^ R`, where
//! `R` is the receiver's `3n` coin block for that bit.

use super::prg::{micro_table, prg_expand, PrgSeed, MICRO_MAX_N};
use super::{check_len, ParamError};
use crate::bits::Bits;
use serde::{Deserialize, Serialize};

pub fn commit_bit(receiver_coins: &Bits, bit: bool, seed: &PrgSeed) -> Result<Bits, ParamError> {
    check_len("receiver coins", 3 * seed.n(), receiver_coins.len())?;
    let g = prg_expand(seed);
    Ok(if bit { g.xor(receiver_coins) } else { g })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub message: Bits,
    pub seeds: Vec<PrgSeed>,
}

/// Invariant: one coin block, one commitment block and one seed per message bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentTriple {
    pub receiver_coins: Vec<Bits>,
    pub commitment: Vec<Bits>,
    pub opening: Opening,
}

pub fn commit(
    receiver_coins: &[Bits],
    message: &Bits,
    seeds: &[PrgSeed],
) -> Result<CommitmentTriple, ParamError> {
    check_len("coin blocks", message.len(), receiver_coins.len())?;
    check_len("seeds", message.len(), seeds.len())?;
    let commitment = (0..message.len())
        .map(|i| commit_bit(&receiver_coins[i], message.get(i), &seeds[i]))
        .collect::<Result<_, _>>()?;
    Ok(CommitmentTriple {
        receiver_coins: receiver_coins.to_vec(),
        commitment,
        opening: Opening {
            message: message.clone(),
            seeds: seeds.to_vec(),
        },
    })
}

/// Accepts with the message iff every block recomputes from its bit, seed and coins.
pub fn open_commitment(t: &CommitmentTriple) -> Option<Bits> {
    let m = &t.opening.message;
    if t.receiver_coins.len() != m.len()
        || t.commitment.len() != m.len()
        || t.opening.seeds.len() != m.len()
    {
        return None;
    }
    for i in 0..m.len() {
        match commit_bit(&t.receiver_coins[i], m.get(i), &t.opening.seeds[i]) {
            Ok(c) if c == t.commitment[i] => {}
            _ => return None,
        }
    }
    Some(m.clone())
}

/// Flat form: `coins` and the result are `l` blocks of `3n` bits, `seeds` is
/// `l` blocks of `n` bits.
pub fn commit_string(coins: &Bits, message: &Bits, seeds: &Bits, n: usize) -> Result<Bits, ParamError> {
    let l = message.len();
    check_len("receiver coins", 3 * n * l, coins.len())?;
    check_len("seeds", n * l, seeds.len())?;
    let mut out = Bits::new();
    for i in 0..l {
        let seed = PrgSeed::new(seeds.slice(i * n, n), n)?;
        out.extend(&commit_bit(&coins.slice(3 * n * i, 3 * n), message.get(i), &seed)?);
    }
    Ok(out)
}

/// Flat-form verification of an opening.
pub fn open_string(coins: &Bits, commitment: &Bits, message: &Bits, seeds: &Bits, n: usize) -> bool {
    matches!(commit_string(coins, message, seeds, n), Ok(c) if &c == commitment)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BindingCensus {
    pub n: usize,
    /// Coin blocks `R` with `G(s) ^ G(s') = R` for some seed pair.
    pub equivocable: u64,
    pub total: u64,
}

impl BindingCensus {
    pub fn fraction(&self) -> f64 {
        self.equivocable as f64 / self.total as f64
    }
}

/// Exact count of equivocable coin blocks for the micro generator.
pub fn binding_census(n: usize) -> Result<BindingCensus, ParamError> {
    if !(super::MIN_N..=MICRO_MAX_N).contains(&n) {
        return Err(ParamError::Invalid(format!("census needs micro n, got {n}")));
    }
    let table = micro_table(n);
    let mut hit = vec![false; 1 << (3 * n)];
    for &g in table {
        for &h in table {
            hit[(g ^ h) as usize] = true;
        }
    }
    Ok(BindingCensus {
        n,
        equivocable: hit.iter().filter(|&&b| b).count() as u64,
        total: 1 << (3 * n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::Tape;

    fn seeds(t: &mut Tape, l: usize, n: usize) -> Vec<PrgSeed> {
        (0..l).map(|_| PrgSeed::new(t.bits(n), n).unwrap()).collect()
    }

    #[test]
    fn bit_zero_ignores_coins() {
        let s = PrgSeed::new(Bits::from_u64(9, 4), 4).unwrap();
        let c = commit_bit(&Bits::from_u64(0xabc, 12), false, &s).unwrap();
        assert_eq!(c, prg_expand(&s));
        assert_eq!(commit_bit(&Bits::zeros(12), true, &s).unwrap(), prg_expand(&s));
    }

    #[test]
    fn completeness_exhaustive_at_small_n() {
        let mut t = Tape::from_seed([1; 32]);
        for n in [4, 6, 8] {
            for m in 0..16u64 {
                let msg = Bits::from_u64(m, 4);
                let coins: Vec<Bits> = (0..4).map(|_| t.bits(3 * n)).collect();
                let tr = commit(&coins, &msg, &seeds(&mut t, 4, n)).unwrap();
                assert_eq!(open_commitment(&tr), Some(msg));
            }
        }
    }

    #[test]
    fn mutations_reject() {
        let mut t = Tape::from_seed([2; 32]);
        for _ in 0..100 {
            let n = 4 + t.below(5) as usize;
            let msg = t.bits(6);
            let coins: Vec<Bits> = (0..6).map(|_| t.bits(3 * n)).collect();
            let mut tr = commit(&coins, &msg, &seeds(&mut t, 6, n)).unwrap();
            let blk = t.below(6) as usize;
            let pos = t.below(3 * n as u64) as usize;
            let mut b = tr.commitment[blk].clone();
            b.set(pos, !b.get(pos));
            tr.commitment[blk] = b;
            assert_eq!(open_commitment(&tr), None);
        }
    }

    #[test]
    fn claimed_bit_flip_rejects() {
        let mut t = Tape::from_seed([3; 32]);
        let coins: Vec<Bits> = (0..3).map(|_| t.bits(24)).collect();
        let mut tr = commit(&coins, &Bits::from_u64(0b101, 3), &seeds(&mut t, 3, 8)).unwrap();
        tr.opening.message.set(1, true);
        assert_eq!(open_commitment(&tr), None);
    }

    #[test]
    fn flat_and_structured_forms_agree() {
        let mut t = Tape::from_seed([4; 32]);
        let n = 5;
        let msg = t.bits(7);
        let coins = t.bits(7 * 3 * n);
        let sd = t.bits(7 * n);
        let flat = commit_string(&coins, &msg, &sd, n).unwrap();
        let tr = commit(
            &coins.chunks(3 * n),
            &msg,
            &sd.chunks(n).into_iter().map(|s| PrgSeed::new(s, n).unwrap()).collect::<Vec<_>>(),
        )
        .unwrap();
        let joined: Vec<&Bits> = tr.commitment.iter().collect();
        assert_eq!(flat, Bits::concat(&joined));
        assert!(open_string(&coins, &flat, &msg, &sd, n));
    }

    #[test]
    fn census_matches_pairwise_oracle() {
        // Independent oracle: test every R directly against all seed pairs.
        let n = 4;
        let g: Vec<u64> = (0..16)
            .map(|s| prg_expand(&PrgSeed::new(Bits::from_u64(s, n), n).unwrap()).to_u64())
            .collect();
        let count = (0..1u64 << 12)
            .filter(|r| g.iter().any(|a| g.iter().any(|b| a ^ b == *r)))
            .count() as u64;
        let census = binding_census(n).unwrap();
        assert_eq!(census.equivocable, count);
        assert_eq!(count, 97);
        assert!(census.fraction() <= 1.0 / 16.0);
    }
}
