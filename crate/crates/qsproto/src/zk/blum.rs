//! One round of Blum's Hamiltonicity protocol over Naor commitments, run on a
//! bundle of graphs under a single challenge bit.
//!
//! Per graph with `v` vertices and index width `w`, the prover commits to
//! `m = v*v + v*w` bits: the permuted adjacency matrix (row-major, permuted
//! labels) followed by the permutation, as `v` indices of `w` bits. Every
//! committed bit uses its own `3n`-bit coin block and `n`-bit seed.

use crate::bits::Bits;
use crate::npreduce::graph::{index_width, CycleWitness, HamiltonicityInstance};
use crate::primitives::commit::commit_bit;
use crate::primitives::prg::{prg_expand_word, PrgSeed};
use crate::tape::Tape;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZkError {
    #[error("witness is not a Hamiltonian cycle of the statement graph")]
    InvalidWitness,
    #[error("round count must be at least 1")]
    ZeroRounds,
    #[error("parameter error: {0}")]
    Params(String),
    #[error(transparent)]
    Reduce(#[from] crate::npreduce::ReduceError),
}

/// Committed bit count for a `v`-vertex graph.
pub fn committed_bits(v: usize) -> usize {
    v * v + v * index_width(v)
}

/// Verifier's move 0: coin blocks for every committed bit of every graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundCoins(pub Vec<Bits>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlumFirstMessage {
    /// Per graph, `m` commitment blocks of `3n` bits.
    pub parts: Vec<Bits>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpenAll {
    /// All `m` committed bits.
    pub bits: Bits,
    pub seeds: Bits,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpenCycle {
    /// Cycle in permuted labels; entry `(cycle[t], cycle[t+1])` is opened.
    pub cycle: Vec<u32>,
    /// Seeds of the opened entries, in cycle order.
    pub seeds: Bits,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlumResponse {
    OpenAll(Vec<OpenAll>),
    OpenCycle(Vec<OpenCycle>),
}

pub fn sample_coins(graphs: &[HamiltonicityInstance], n: usize, tape: &mut Tape) -> RoundCoins {
    RoundCoins(graphs.iter().map(|g| tape.bits(committed_bits(g.vertices()) * 3 * n)).collect())
}

/// Naor commitment to one bit, appended to `out`.
fn push_commitment(out: &mut Bits, n: usize, coins: &Bits, block: usize, bit: bool, seeds: &Bits, seed_at: usize) {
    let b = 3 * n;
    if b <= 64 {
        let g = prg_expand_word(n, seeds.word(seed_at, n));
        out.push_word(if bit { g ^ coins.word(block * b, b) } else { g }, b);
    } else {
        let seed = PrgSeed::new(seeds.slice(seed_at, n), n).expect("length n");
        out.extend(&commit_bit(&coins.slice(block * b, b), bit, &seed).expect("length 3n"));
    }
}

fn commitment_matches(first: &Bits, n: usize, coins: &Bits, block: usize, bit: bool, seeds: &Bits, seed_at: usize) -> bool {
    let b = 3 * n;
    let mut c = Bits::new();
    push_commitment(&mut c, n, coins, block, bit, seeds, seed_at);
    if b <= 64 {
        first.word(block * b, b) == c.word(0, b)
    } else {
        first.slice(block * b, b) == c
    }
}

fn commit_all(n: usize, coins: &Bits, bits: &Bits, seeds: &Bits) -> Bits {
    let b = 3 * n;
    if b <= 64 {
        return Bits::from_words(
            bits.words(1).zip(seeds.words(n)).zip(coins.words(b)).map(|((bit, seed), coin)| {
                let g = prg_expand_word(n, seed);
                g ^ (coin & bit.wrapping_neg())
            }),
            b,
        );
    }
    let mut out = Bits::new();
    for e in 0..bits.len() {
        push_commitment(&mut out, n, coins, e, bits.get(e), seeds, e * n);
    }
    out
}

fn encode_perm(sigma: &[usize], w: usize) -> Bits {
    let mut out = Bits::new();
    for &s in sigma {
        out.push_word(s as u64, w);
    }
    out
}

fn decode_perm(bits: &Bits, at: usize, v: usize) -> Option<Vec<usize>> {
    let w = index_width(v);
    let mut seen = vec![false; v];
    let mut sigma = Vec::with_capacity(v);
    for i in 0..v {
        let s = bits.word(at + i * w, w) as usize;
        if s >= v || seen[s] {
            return None;
        }
        seen[s] = true;
        sigma.push(s);
    }
    Some(sigma)
}

fn check_coins(graphs: &[HamiltonicityInstance], n: usize, coins: &RoundCoins) -> bool {
    coins.0.len() == graphs.len()
        && graphs.iter().zip(&coins.0).all(|(g, c)| c.len() == committed_bits(g.vertices()) * 3 * n)
}

/// Committed state for one graph.
#[derive(Clone, Debug)]
struct PartState {
    bits: Bits,
    seeds: Bits,
    /// The cycle to reveal on challenge 1, in permuted labels.
    cycle: Vec<usize>,
}

impl PartState {
    fn open_all(&self) -> OpenAll {
        OpenAll { bits: self.bits.clone(), seeds: self.seeds.clone() }
    }

    fn open_cycle(&self, n: usize) -> OpenCycle {
        let v = self.cycle.len();
        let mut seeds = Bits::new();
        for t in 0..v {
            let e = self.cycle[t] * v + self.cycle[(t + 1) % v];
            seeds.push_word(self.seeds.word(e * n, n), n);
        }
        OpenCycle { cycle: self.cycle.iter().map(|&c| c as u32).collect(), seeds }
    }
}

/// Prover side of one round after the first message; answers either challenge.
#[derive(Clone, Debug)]
pub struct BlumProver {
    n: usize,
    parts: Vec<PartState>,
}

impl BlumProver {
    pub fn respond(&self, ch: bool) -> BlumResponse {
        if ch {
            BlumResponse::OpenCycle(self.parts.iter().map(|p| p.open_cycle(self.n)).collect())
        } else {
            BlumResponse::OpenAll(self.parts.iter().map(PartState::open_all).collect())
        }
    }
}

fn commit_parts(n: usize, coins: &RoundCoins, parts: Vec<PartState>) -> (BlumFirstMessage, BlumProver) {
    let first = BlumFirstMessage {
        parts: parts.iter().zip(&coins.0).map(|(p, c)| commit_all(n, c, &p.bits, &p.seeds)).collect(),
    };
    (first, BlumProver { n, parts })
}

fn honest_part(g: &HamiltonicityInstance, sigma: Vec<usize>, cycle: &CycleWitness, n: usize, tape: &mut Tape) -> PartState {
    let v = g.vertices();
    let mut bits = Bits::zeros(v * v);
    for (a, b) in g.edges() {
        bits.set(sigma[a] * v + sigma[b], true);
    }
    bits.extend(&encode_perm(&sigma, index_width(v)));
    let seeds = tape.bits(bits.len() * n);
    PartState { cycle: cycle.0.iter().map(|&c| sigma[c]).collect(), bits, seeds }
}

/// First message of an honest round; the first message depends only on the
/// graphs, the witnesses, the coins and the prover tape.
pub fn blum_prove_round(
    graphs: &[HamiltonicityInstance],
    cycles: &[CycleWitness],
    n: usize,
    coins: &RoundCoins,
    tape: &mut Tape,
) -> Result<(BlumFirstMessage, BlumProver), ZkError> {
    if graphs.len() != cycles.len() || graphs.iter().zip(cycles).any(|(g, c)| !g.is_cycle(c)) {
        return Err(ZkError::InvalidWitness);
    }
    if !check_coins(graphs, n, coins) {
        return Err(ZkError::Params("receiver coins do not match the graphs".into()));
    }
    let parts = graphs
        .iter()
        .zip(cycles)
        .map(|(g, c)| {
            let sigma = tape.permutation(g.vertices());
            honest_part(g, sigma, c, n, tape)
        })
        .collect();
    Ok(commit_parts(n, coins, parts))
}

/// Witness-free round prepared to answer challenge `guess`: for 0 it commits to
/// a permuted copy of each graph, for 1 to a random Hamiltonian cycle on the
/// vertex set. The answer to the other challenge fails verification unless the
/// graph happens to allow it. This is both the honest-verifier simulator and
/// the challenge-guessing cheater.
pub fn blum_fabricate_round(
    graphs: &[HamiltonicityInstance],
    guess: bool,
    n: usize,
    coins: &RoundCoins,
    tape: &mut Tape,
) -> Result<(BlumFirstMessage, BlumProver), ZkError> {
    if !check_coins(graphs, n, coins) {
        return Err(ZkError::Params("receiver coins do not match the graphs".into()));
    }
    let parts = graphs
        .iter()
        .map(|g| {
            let v = g.vertices();
            let sigma = tape.permutation(v);
            if !guess {
                // The cycle order is only revealed under challenge 1, which this round does not expect.
                return honest_part(g, sigma, &CycleWitness((0..v).collect()), n, tape);
            }
            let order = tape.permutation(v);
            let mut bits = Bits::zeros(v * v);
            for t in 0..v {
                bits.set(order[t] * v + order[(t + 1) % v], true);
            }
            bits.extend(&encode_perm(&sigma, index_width(v)));
            let seeds = tape.bits(bits.len() * n);
            PartState { bits, seeds, cycle: order }
        })
        .collect();
    Ok(commit_parts(n, coins, parts))
}

fn verify_open_all(g: &HamiltonicityInstance, n: usize, coins: &Bits, first: &Bits, o: &OpenAll) -> bool {
    let v = g.vertices();
    let m = committed_bits(v);
    if o.bits.len() != m || o.seeds.len() != m * n {
        return false;
    }
    if commit_all(n, coins, &o.bits, &o.seeds) != *first {
        return false;
    }
    let Some(sigma) = decode_perm(&o.bits, v * v, v) else {
        return false;
    };
    let adj = g.adjacency();
    (0..v).all(|a| (0..v).all(|b| o.bits.get(sigma[a] * v + sigma[b]) == adj[a * v + b]))
}

fn verify_open_cycle(g: &HamiltonicityInstance, n: usize, coins: &Bits, first: &Bits, o: &OpenCycle) -> bool {
    let v = g.vertices();
    if o.cycle.len() != v || o.seeds.len() != v * n {
        return false;
    }
    let mut seen = vec![false; v];
    for &c in &o.cycle {
        let c = c as usize;
        if c >= v || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    (0..v).all(|t| {
        let e = o.cycle[t] as usize * v + o.cycle[(t + 1) % v] as usize;
        commitment_matches(first, n, coins, e, true, &o.seeds, t * n)
    })
}

/// Pure verification of one round.
pub fn blum_verify(
    graphs: &[HamiltonicityInstance],
    n: usize,
    coins: &RoundCoins,
    first: &BlumFirstMessage,
    ch: bool,
    response: &BlumResponse,
) -> bool {
    if !check_coins(graphs, n, coins) || first.parts.len() != graphs.len() {
        return false;
    }
    let sizes_ok = graphs.iter().zip(&first.parts).all(|(g, f)| f.len() == committed_bits(g.vertices()) * 3 * n);
    if !sizes_ok {
        return false;
    }
    match (ch, response) {
        (false, BlumResponse::OpenAll(os)) => {
            os.len() == graphs.len()
                && (0..graphs.len()).all(|i| verify_open_all(&graphs[i], n, &coins.0[i], &first.parts[i], &os[i]))
        }
        (true, BlumResponse::OpenCycle(os)) => {
            os.len() == graphs.len()
                && (0..graphs.len()).all(|i| verify_open_cycle(&graphs[i], n, &coins.0[i], &first.parts[i], &os[i]))
        }
        _ => false,
    }
}

/// What two accepting answers to one first message yield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Cycles(Vec<CycleWitness>),
    /// Some entry was opened to both 0 and 1: graph index and entry index.
    Equivocation { graph: usize, entry: usize },
}

/// Special-soundness extractor; `None` unless both answers verify.
pub fn blum_extract(
    graphs: &[HamiltonicityInstance],
    n: usize,
    coins: &RoundCoins,
    first: &BlumFirstMessage,
    open_all: &BlumResponse,
    open_cycle: &BlumResponse,
) -> Option<Extraction> {
    if !blum_verify(graphs, n, coins, first, false, open_all) || !blum_verify(graphs, n, coins, first, true, open_cycle) {
        return None;
    }
    let (BlumResponse::OpenAll(alls), BlumResponse::OpenCycle(cycles)) = (open_all, open_cycle) else {
        return None;
    };
    let mut out = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let v = g.vertices();
        let sigma = decode_perm(&alls[i].bits, v * v, v).expect("verified");
        let mut inv = vec![0; v];
        for (a, &s) in sigma.iter().enumerate() {
            inv[s] = a;
        }
        let c = &cycles[i].cycle;
        for t in 0..v {
            let e = c[t] as usize * v + c[(t + 1) % v] as usize;
            if !alls[i].bits.get(e) {
                return Some(Extraction::Equivocation { graph: i, entry: e });
            }
        }
        out.push(CycleWitness(c.iter().map(|&x| inv[x as usize]).collect()));
    }
    Some(Extraction::Cycles(out))
}
