//! Statement-level proofs: sequential and parallel repetition of Blum rounds
//! over the compiled conjuncts of a statement, and the standalone proof file.

use super::blum::*;
use crate::bits::Bits;
use crate::npreduce::compile::{assemble_witness, compile_conjuncts, Conjunct};
use crate::npreduce::graph::{CycleWitness, HamiltonicityInstance};
use crate::npreduce::statement::RelationStatement;
use crate::primitives::MIN_N;
use crate::tape::{derive_seed, Tape};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepetitionMode {
    Sequential,
    Parallel,
}

/// A statement ready for Blum rounds, with commitment seed length `n`.
#[derive(Clone, Debug)]
pub struct ProofInstance {
    pub statement: RelationStatement,
    pub n: usize,
    pub conjuncts: Vec<Conjunct>,
    pub graphs: Vec<HamiltonicityInstance>,
}

impl ProofInstance {
    pub fn new(statement: RelationStatement, n: usize) -> Result<Self, ZkError> {
        if n < MIN_N {
            return Err(ZkError::Params(format!("commitment seed length {n} below {MIN_N}")));
        }
        let conjuncts = compile_conjuncts(&statement)?;
        let graphs = conjuncts.iter().map(|c| c.compiled.graph.clone()).collect();
        Ok(ProofInstance { statement, n, conjuncts, graphs })
    }

    pub fn cycles(&self, witness: &Bits) -> Result<Vec<CycleWitness>, ZkError> {
        if self.statement.witness_len() != Some(witness.len()) {
            return Err(ZkError::InvalidWitness);
        }
        self.conjuncts
            .iter()
            .map(|c| c.compiled.witness_to_cycle(&c.project(witness)).ok_or(ZkError::InvalidWitness))
            .collect()
    }

    /// Statement witness encoded by per-graph cycles.
    pub fn witness_from_cycles(&self, cycles: &[CycleWitness]) -> Option<Bits> {
        if cycles.len() != self.conjuncts.len() {
            return None;
        }
        let parts = self
            .conjuncts
            .iter()
            .zip(cycles)
            .map(|(c, cyc)| Some((c, c.compiled.cycle_to_witness(cyc)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(assemble_witness(self.statement.witness_len()?, &parts))
    }

    pub fn total_vertices(&self) -> usize {
        self.graphs.iter().map(|g| g.vertices()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundRecord {
    pub coins: RoundCoins,
    pub first: BlumFirstMessage,
    pub challenge: bool,
    pub response: BlumResponse,
}

impl RoundRecord {
    pub fn verify(&self, inst: &ProofInstance) -> bool {
        blum_verify(&inst.graphs, inst.n, &self.coins, &self.first, self.challenge, &self.response)
    }
}

/// `k` rounds one after another; the verifier tape yields each round's coins
/// and then its challenge.
pub fn zk_prove_sequential(
    inst: &ProofInstance,
    witness: &Bits,
    k: usize,
    prover: &mut Tape,
    verifier: &mut Tape,
) -> Result<Vec<RoundRecord>, ZkError> {
    if k == 0 {
        return Err(ZkError::ZeroRounds);
    }
    let cycles = inst.cycles(witness)?;
    (0..k)
        .map(|_| {
            let coins = sample_coins(&inst.graphs, inst.n, verifier);
            let (first, p) = blum_prove_round(&inst.graphs, &cycles, inst.n, &coins, prover)?;
            let challenge = verifier.bit();
            Ok(RoundRecord { response: p.respond(challenge), coins, first, challenge })
        })
        .collect()
}

pub fn zk_verify_sequential(inst: &ProofInstance, rounds: &[RoundRecord]) -> bool {
    !rounds.is_empty() && rounds.iter().all(|r| r.verify(inst))
}

/// `q` rounds in lockstep: all coins, all first messages, all challenges,
/// all responses.
pub fn wi_prove_parallel(
    inst: &ProofInstance,
    witness: &Bits,
    q: usize,
    prover: &mut Tape,
    verifier: &mut Tape,
) -> Result<Vec<RoundRecord>, ZkError> {
    if q == 0 {
        return Err(ZkError::ZeroRounds);
    }
    let cycles = inst.cycles(witness)?;
    let coins: Vec<RoundCoins> = (0..q).map(|_| sample_coins(&inst.graphs, inst.n, verifier)).collect();
    let provers = coins
        .iter()
        .map(|c| blum_prove_round(&inst.graphs, &cycles, inst.n, c, prover))
        .collect::<Result<Vec<_>, _>>()?;
    let challenges: Vec<bool> = (0..q).map(|_| verifier.bit()).collect();
    Ok(coins
        .into_iter()
        .zip(provers)
        .zip(challenges)
        .map(|((coins, (first, p)), challenge)| RoundRecord { response: p.respond(challenge), coins, first, challenge })
        .collect())
}

pub fn wi_verify_parallel(inst: &ProofInstance, rounds: &[RoundRecord]) -> bool {
    zk_verify_sequential(inst, rounds)
}

/// The challenge-guessing cheater: each round is fabricated for a guessed
/// challenge, so without a witness it survives a round with probability 1/2.
/// Verifier draws follow `mode` as in an honest proof.
pub fn cheat_prove(
    inst: &ProofInstance,
    rounds: usize,
    mode: RepetitionMode,
    prover: &mut Tape,
    verifier: &mut Tape,
) -> Result<Vec<RoundRecord>, ZkError> {
    if rounds == 0 {
        return Err(ZkError::ZeroRounds);
    }
    let (coins, challenges) = verifier_draws(inst, mode, rounds, verifier);
    coins
        .into_iter()
        .zip(challenges)
        .map(|(coins, challenge)| {
            let guess = prover.bit();
            let (first, p) = blum_fabricate_round(&inst.graphs, guess, inst.n, &coins, prover)?;
            Ok(RoundRecord { response: p.respond(challenge), coins, first, challenge })
        })
        .collect()
}

/// Verifier randomness for a whole proof, in the order the chosen mode draws it.
fn verifier_draws(inst: &ProofInstance, mode: RepetitionMode, rounds: usize, tape: &mut Tape) -> (Vec<RoundCoins>, Vec<bool>) {
    match mode {
        RepetitionMode::Sequential => (0..rounds)
            .map(|_| (sample_coins(&inst.graphs, inst.n, tape), tape.bit()))
            .unzip(),
        RepetitionMode::Parallel => {
            let coins = (0..rounds).map(|_| sample_coins(&inst.graphs, inst.n, tape)).collect();
            (coins, (0..rounds).map(|_| tape.bit()).collect())
        }
    }
}

fn coins_digest(coins: &[RoundCoins]) -> String {
    let mut h = Sha256::new();
    for c in coins {
        h.update(bincode::serialize(c).expect("serializable"));
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofRound {
    pub first: BlumFirstMessage,
    pub challenge: bool,
    pub response: BlumResponse,
}

/// Self-contained proof transcript. Verifier coins and challenges are
/// re-derived from `verifier_seed`; the coins themselves are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofFile {
    pub statement: RelationStatement,
    pub n: usize,
    pub mode: RepetitionMode,
    pub rounds: usize,
    pub seed: u64,
    pub verifier_seed: String,
    pub coins_digest: String,
    pub transcript: Vec<ProofRound>,
}

pub fn prove_to_file(
    statement: RelationStatement,
    witness: &Bits,
    n: usize,
    rounds: usize,
    mode: RepetitionMode,
    seed: u64,
) -> Result<ProofFile, ZkError> {
    let inst = ProofInstance::new(statement, n)?;
    let vseed = derive_seed(&seed.to_le_bytes(), "proof/verifier");
    let mut prover = Tape::from_seed(derive_seed(&seed.to_le_bytes(), "proof/prover"));
    let mut verifier = Tape::from_seed(vseed);
    let records = match mode {
        RepetitionMode::Sequential => zk_prove_sequential(&inst, witness, rounds, &mut prover, &mut verifier)?,
        RepetitionMode::Parallel => wi_prove_parallel(&inst, witness, rounds, &mut prover, &mut verifier)?,
    };
    let coins: Vec<RoundCoins> = records.iter().map(|r| r.coins.clone()).collect();
    Ok(ProofFile {
        n,
        mode,
        rounds,
        seed,
        verifier_seed: hex::encode(vseed),
        coins_digest: coins_digest(&coins),
        transcript: records
            .into_iter()
            .map(|r| ProofRound { first: r.first, challenge: r.challenge, response: r.response })
            .collect(),
        statement: inst.statement,
    })
}

/// Accepts iff the recorded challenges and coins match the verifier seed and
/// every round verifies.
pub fn verify_file(pf: &ProofFile) -> Result<bool, ZkError> {
    let inst = ProofInstance::new(pf.statement.clone(), pf.n)?;
    if pf.rounds == 0 || pf.transcript.len() != pf.rounds {
        return Ok(false);
    }
    let Some(vseed) = hex::decode(&pf.verifier_seed).ok().and_then(|v| <[u8; 32]>::try_from(v).ok()) else {
        return Ok(false);
    };
    let (coins, challenges) = verifier_draws(&inst, pf.mode, pf.rounds, &mut Tape::from_seed(vseed));
    if coins_digest(&coins) != pf.coins_digest {
        return Ok(false);
    }
    Ok(pf.transcript.iter().zip(coins).zip(challenges).all(|((r, c), ch)| {
        r.challenge == ch && blum_verify(&inst.graphs, inst.n, &c, &r.first, ch, &r.response)
    }))
}
