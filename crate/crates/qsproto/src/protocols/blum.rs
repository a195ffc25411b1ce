//! Blum proofs as a two-party session realizing zero knowledge.
//!
//! Wire format: the prover sends the statement, then per round the verifier
//! sends coins, the prover its first message, the verifier the challenge and
//! the prover the response. Parallel mode sends each move for all rounds as
//! one vector, so the proof is four messages after the statement.

use crate::functionalities::{ZkProverInput, ZkVerifierInput};
use crate::machine::{program, Output, PartyCtx, Payload, Program, Protocol};
use crate::npreduce::{check_relation, RelationStatement};
use crate::zk::{
    blum_fabricate_round, blum_prove_round, blum_verify, sample_coins, BlumFirstMessage, BlumProver,
    BlumResponse, ProofInstance, RepetitionMode, RoundCoins, ZkError,
};
use crate::functionalities::FunctionalityKind;
use crate::npreduce::CycleWitness;
use std::sync::Arc;

pub fn blum_protocol(n: usize, rounds: usize, mode: RepetitionMode) -> Arc<Protocol> {
    let name = match mode {
        RepetitionMode::Sequential => format!("blum-seq(n={n},k={rounds})"),
        RepetitionMode::Parallel => format!("blum-par(n={n},q={rounds})"),
    };
    let a = program(move |ctx, input| honest_prover(ctx, input, n, rounds, mode));
    let b = program(move |ctx, input| verifier(ctx, input, n, rounds, mode));
    Arc::new(Protocol::new(name, a, b).realizing(FunctionalityKind::Zk))
}

/// Round strategy of a prover program.
enum Strategy {
    Witness(Vec<CycleWitness>),
    /// Guesses each challenge in advance; succeeds on a correct guess.
    Guess,
}

impl Strategy {
    fn round(
        &self,
        inst: &ProofInstance,
        coins: &RoundCoins,
        ctx: &PartyCtx,
    ) -> Result<(BlumFirstMessage, BlumProver), ZkError> {
        ctx.with_tape(|t| match self {
            Strategy::Witness(cycles) => blum_prove_round(&inst.graphs, cycles, inst.n, coins, t),
            Strategy::Guess => {
                let guess = t.bit();
                blum_fabricate_round(&inst.graphs, guess, inst.n, coins, t)
            }
        })
    }
}

async fn honest_prover(ctx: PartyCtx, input: Payload, n: usize, rounds: usize, mode: RepetitionMode) -> Output {
    let Some(inp) = input.decode::<ZkProverInput>() else { return ctx.abort("malformed input") };
    if inp.statement.relation_id().to_string() != inp.relation || !check_relation(&inp.statement, &inp.witness) {
        return ctx.abort("no valid witness");
    }
    let inst = match ProofInstance::new(inp.statement.clone(), n) {
        Ok(i) => i,
        Err(e) => return ctx.abort(e.to_string()),
    };
    let cycles = match inst.cycles(&inp.witness) {
        Ok(c) => c,
        Err(e) => return ctx.abort(e.to_string()),
    };
    prove_with(ctx, inst, Strategy::Witness(cycles), rounds, mode).await
}

/// Prover for `statement` without a witness, guessing every challenge.
pub fn guessing_prover(n: usize, rounds: usize, mode: RepetitionMode) -> Program {
    program(move |ctx, input| async move {
        let Some(inp) = input.decode::<ZkProverInput>() else { return ctx.abort("malformed input") };
        let inst = match ProofInstance::new(inp.statement, n) {
            Ok(i) => i,
            Err(e) => return ctx.abort(e.to_string()),
        };
        prove_with(ctx, inst, Strategy::Guess, rounds, mode).await
    })
}

async fn prove_with(ctx: PartyCtx, inst: ProofInstance, s: Strategy, rounds: usize, mode: RepetitionMode) -> Output {
    ctx.send(&inst.statement);
    match mode {
        RepetitionMode::Sequential => {
            for _ in 0..rounds {
                let Some(coins) = ctx.recv::<RoundCoins>().await else { return ctx.abort("malformed coins") };
                let Ok((first, p)) = s.round(&inst, &coins, &ctx) else { return ctx.abort("coins do not fit") };
                ctx.send(&first);
                let Some(ch) = ctx.recv::<bool>().await else { return ctx.abort("malformed challenge") };
                ctx.send(&p.respond(ch));
            }
        }
        RepetitionMode::Parallel => {
            let Some(coins) = ctx.recv::<Vec<RoundCoins>>().await else { return ctx.abort("malformed coins") };
            if coins.len() != rounds {
                return ctx.abort("wrong number of coin vectors");
            }
            let Ok(rs) = coins.iter().map(|c| s.round(&inst, c, &ctx)).collect::<Result<Vec<_>, _>>() else {
                return ctx.abort("coins do not fit");
            };
            let (firsts, provers): (Vec<_>, Vec<_>) = rs.into_iter().unzip();
            ctx.send(&firsts);
            let Some(chs) = ctx.recv::<Vec<bool>>().await else { return ctx.abort("malformed challenges") };
            if chs.len() != rounds {
                return ctx.abort("wrong number of challenges");
            }
            let responses: Vec<BlumResponse> = provers.iter().zip(&chs).map(|(p, &ch)| p.respond(ch)).collect();
            ctx.send(&responses);
        }
    }
    Output::unit()
}

async fn verifier(ctx: PartyCtx, input: Payload, n: usize, rounds: usize, mode: RepetitionMode) -> Output {
    let Some(ZkVerifierInput { relation }) = input.decode() else { return ctx.abort("malformed input") };
    let Some(statement) = ctx.recv::<RelationStatement>().await else { return ctx.abort("malformed statement") };
    if statement.relation_id().to_string() != relation {
        return ctx.abort("statement of another relation");
    }
    let inst = match ProofInstance::new(statement, n) {
        Ok(i) => i,
        Err(e) => return ctx.abort(e.to_string()),
    };
    let fresh_coins = || ctx.with_tape(|t| sample_coins(&inst.graphs, n, t));
    match mode {
        RepetitionMode::Sequential => {
            for _ in 0..rounds {
                let coins = fresh_coins();
                ctx.send(&coins);
                let Some(first) = ctx.recv::<BlumFirstMessage>().await else { return ctx.abort("malformed commitment") };
                let ch = ctx.with_tape(|t| t.bit());
                ctx.send(&ch);
                let Some(resp) = ctx.recv::<BlumResponse>().await else { return ctx.abort("malformed response") };
                if !blum_verify(&inst.graphs, n, &coins, &first, ch, &resp) {
                    return ctx.abort("proof rejected");
                }
            }
        }
        RepetitionMode::Parallel => {
            let coins: Vec<RoundCoins> = (0..rounds).map(|_| fresh_coins()).collect();
            ctx.send(&coins);
            let Some(firsts) = ctx.recv::<Vec<BlumFirstMessage>>().await else {
                return ctx.abort("malformed commitments");
            };
            let chs: Vec<bool> = ctx.with_tape(|t| (0..rounds).map(|_| t.bit()).collect());
            ctx.send(&chs);
            let Some(resps) = ctx.recv::<Vec<BlumResponse>>().await else { return ctx.abort("malformed responses") };
            let ok = firsts.len() == rounds
                && resps.len() == rounds
                && (0..rounds).all(|i| blum_verify(&inst.graphs, n, &coins[i], &firsts[i], chs[i], &resps[i]));
            if !ok {
                return ctx.abort("proof rejected");
            }
        }
    }
    Output::value(&inst.statement)
}
