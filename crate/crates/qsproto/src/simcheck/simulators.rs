//! Ideal-world adversaries. Each simulator is the corrupted party's program
//! in the ideal protocol: it talks to the trusted party through its own
//! context and to the real adversary only through a [`BlackBox`].
//!
//! Zero-knowledge subproofs the simulator must give without a witness are
//! produced classically: fabricate a Blum round for a guessed challenge,
//! rewind the adversary until the guess is right.

use crate::bits::Bits;
use crate::functionalities::{ideal_protocol, CfIn, CfInput, CfOut, ZkIn, ZkOut, ZkProverInput};
use crate::machine::{program, BlackBox, Corruption, ExecutionConfig, Output, PartyCtx, Payload, Program, Protocol, Role, ROOT_SESSION};
use crate::npreduce::statement::{layout, EncLayout};
use crate::npreduce::{check_relation, RelationId, RelationStatement};
use crate::primitives::{commit_string, pke_decrypt, pke_encrypt, pke_keygen, prg_expand_bits, Ciphertext, PublicKey};
use crate::protocols::coinflip::{l1_statement as cf_l1, opening_statement, CoinflipParams};
use crate::protocols::zkaok::{l1_statement, l2_statement, StatementAndCiphertext, ZkaokParams};
use crate::protocols::zkcf::{r_statement, ZkcfParams};
use crate::protocols::SubproofMode;
use crate::tape::{Tape, TapeSource};
use crate::zk::{
    blum_fabricate_round, blum_prove_round, blum_verify, sample_coins, BlumFirstMessage, BlumResponse, ProofInstance,
    RepetitionMode, RoundCoins,
};
use std::sync::Arc;

/// Recorded in every report built on these simulators.
pub const SIMULATOR_NOTE: &str = "zero-knowledge subproof simulators are classical stand-ins: honest-verifier Blum \
fabrication with rewinding of the black-box adversary, in place of quantum rewinding";

/// Fabrication attempts per round before a simulator gives up. An honest
/// verifier's challenge is matched with probability 1/2 per attempt.
pub const MAX_REWINDS: usize = 64;

/// Where the boxed adversary's randomness comes from.
#[derive(Clone, Debug)]
pub enum AdversaryTape {
    /// 256 bits drawn from the simulator's tape when the box starts.
    Drawn,
    Fixed(TapeSource),
}

/// A real adversary and what it expects to run against.
#[derive(Clone)]
pub struct SimulatorSpec {
    /// The real protocol; its slot bindings serve the adversary's calls.
    pub target: Arc<Protocol>,
    pub corrupted: Role,
    pub adversary: Program,
    pub adversary_tape: AdversaryTape,
}

impl SimulatorSpec {
    pub fn new(target: Arc<Protocol>, corrupted: Role, adversary: Program) -> Self {
        SimulatorSpec { target, corrupted, adversary, adversary_tape: AdversaryTape::Drawn }
    }

    pub fn with_tape(mut self, tape: TapeSource) -> Self {
        self.adversary_tape = AdversaryTape::Fixed(tape);
        self
    }

    /// The ideal protocol the simulator runs in.
    pub fn ideal(&self) -> Arc<Protocol> {
        ideal_protocol(self.target.realizes.expect("target realizes a functionality"))
    }

    /// Ideal-world execution with `simulator` as the corrupted party.
    pub fn ideal_config(&self, simulator: Program, input_a: Payload, input_b: Payload, seed: u64) -> ExecutionConfig {
        ExecutionConfig::new(self.ideal(), input_a, input_b, seed).corrupt(Corruption::malicious(self.corrupted, simulator))
    }

    /// Real-world execution with the adversary as the corrupted party.
    pub fn real_config(&self, input_a: Payload, input_b: Payload, seed: u64) -> ExecutionConfig {
        ExecutionConfig::new(self.target.clone(), input_a, input_b, seed)
            .corrupt(Corruption::malicious(self.corrupted, self.adversary.clone()))
    }
}

fn open_box(ctx: &PartyCtx, spec: &SimulatorSpec, input: Payload) -> BlackBox {
    let tape = match &spec.adversary_tape {
        AdversaryTape::Drawn => TapeSource::Seed(ctx.with_tape(|t| t.seed32())),
        AdversaryTape::Fixed(src) => src.clone(),
    };
    BlackBox::new(spec.adversary.clone(), spec.corrupted, spec.target.clone(), input, tape)
}

/// The simulator's output is the adversary's; a stuck adversary yields the
/// abort symbol, as a stalled party does in the real world.
fn finish(ctx: &PartyCtx, bb: &BlackBox, why: &str) -> Output {
    match bb.output() {
        Some(o) => o.clone(),
        None => ctx.abort(why),
    }
}

fn sub(slot: &str) -> String {
    format!("{ROOT_SESSION}/{slot}#0")
}

/// How subproofs inside the target protocol are realized.
#[derive(Clone, Copy, Debug)]
struct Subproof {
    mode: SubproofMode,
    n: usize,
    rounds: usize,
    repetition: RepetitionMode,
}

/// Whether the functionality and the honest party's statement check would
/// both accept this input.
fn zk_input_accepted(zk: &ZkIn, expected: &RelationStatement) -> bool {
    let ZkIn::Prove { relation, statement, witness } = zk;
    relation.parse::<RelationId>().ok() == Some(expected.relation_id())
        && statement == expected
        && check_relation(statement, witness)
}

/// The adversary proves `expected` at `session`; the simulator verifies as
/// the honest verifier would.
fn adversary_proves(bb: &mut BlackBox, session: &str, expected: &RelationStatement, sp: Subproof, t: &mut Tape) -> bool {
    match sp.mode {
        SubproofMode::Hybrid => bb.expect_f::<ZkIn>(session).is_some_and(|z| zk_input_accepted(&z, expected)),
        SubproofMode::Micro => verify_in_box(bb, session, expected, sp, t),
    }
}

fn verify_in_box(bb: &mut BlackBox, session: &str, expected: &RelationStatement, sp: Subproof, t: &mut Tape) -> bool {
    let Some(st) = bb.expect_msg::<RelationStatement>(session) else { return false };
    if st.relation_id() != expected.relation_id() {
        return false;
    }
    let Ok(inst) = ProofInstance::new(st, sp.n) else { return false };
    let n = sp.n;
    match sp.repetition {
        RepetitionMode::Sequential => {
            for _ in 0..sp.rounds {
                let coins = sample_coins(&inst.graphs, n, t);
                bb.send(session, &coins);
                let Some(first) = bb.expect_msg::<BlumFirstMessage>(session) else { return false };
                let ch = t.bit();
                bb.send(session, &ch);
                let Some(resp) = bb.expect_msg::<BlumResponse>(session) else { return false };
                if !blum_verify(&inst.graphs, n, &coins, &first, ch, &resp) {
                    return false;
                }
            }
        }
        RepetitionMode::Parallel => {
            let coins: Vec<RoundCoins> = (0..sp.rounds).map(|_| sample_coins(&inst.graphs, n, t)).collect();
            bb.send(session, &coins);
            let Some(firsts) = bb.expect_msg::<Vec<BlumFirstMessage>>(session) else { return false };
            let chs: Vec<bool> = (0..sp.rounds).map(|_| t.bit()).collect();
            bb.send(session, &chs);
            let Some(resps) = bb.expect_msg::<Vec<BlumResponse>>(session) else { return false };
            if firsts.len() != sp.rounds
                || resps.len() != sp.rounds
                || !(0..sp.rounds).all(|i| blum_verify(&inst.graphs, n, &coins[i], &firsts[i], chs[i], &resps[i]))
            {
                return false;
            }
        }
    }
    &inst.statement == expected
}

/// Proves `stmt` to the adversary with a real witness.
fn prove_to_adversary(
    bb: &mut BlackBox,
    session: &str,
    stmt: &RelationStatement,
    witness: &Bits,
    sp: Subproof,
    t: &mut Tape,
) -> bool {
    if sp.mode == SubproofMode::Hybrid {
        let ok = check_relation(stmt, witness);
        bb.deliver_f(session, &if ok { ZkOut::Accept(stmt.clone()) } else { ZkOut::Reject });
        return ok;
    }
    let Ok(inst) = ProofInstance::new(stmt.clone(), sp.n) else { return false };
    let Ok(cycles) = inst.cycles(witness) else { return false };
    bb.send(session, stmt);
    match sp.repetition {
        RepetitionMode::Sequential => {
            for _ in 0..sp.rounds {
                let Some(coins) = bb.expect_msg::<RoundCoins>(session) else { return false };
                let Ok((first, p)) = blum_prove_round(&inst.graphs, &cycles, sp.n, &coins, t) else { return false };
                bb.send(session, &first);
                let Some(ch) = bb.expect_msg::<bool>(session) else { return false };
                bb.send(session, &p.respond(ch));
            }
        }
        RepetitionMode::Parallel => {
            let Some(coins) = bb.expect_msg::<Vec<RoundCoins>>(session) else { return false };
            if coins.len() != sp.rounds {
                return false;
            }
            let Ok(rs) = coins
                .iter()
                .map(|c| blum_prove_round(&inst.graphs, &cycles, sp.n, c, t))
                .collect::<Result<Vec<_>, _>>()
            else {
                return false;
            };
            let (firsts, provers): (Vec<_>, Vec<_>) = rs.into_iter().unzip();
            bb.send(session, &firsts);
            let Some(chs) = bb.expect_msg::<Vec<bool>>(session) else { return false };
            if chs.len() != sp.rounds {
                return false;
            }
            let resps: Vec<BlumResponse> = provers.iter().zip(&chs).map(|(p, &c)| p.respond(c)).collect();
            bb.send(session, &resps);
        }
    }
    true
}

/// Convinces the adversary of `stmt`, true or not, without a witness.
/// Sequential repetition only: each round is fabricated for a guessed
/// challenge and the adversary is rewound to the round start on a miss.
fn simulate_to_adversary(bb: &mut BlackBox, session: &str, stmt: &RelationStatement, sp: Subproof, t: &mut Tape) -> bool {
    if sp.mode == SubproofMode::Hybrid {
        bb.deliver_f(session, &ZkOut::Accept(stmt.clone()));
        return true;
    }
    if sp.repetition != RepetitionMode::Sequential {
        return false;
    }
    let Ok(inst) = ProofInstance::new(stmt.clone(), sp.n) else { return false };
    bb.send(session, stmt);
    for _ in 0..sp.rounds {
        let cp = bb.checkpoint();
        let mut matched = false;
        for _ in 0..MAX_REWINDS {
            let Some(coins) = bb.expect_msg::<RoundCoins>(session) else { return false };
            let guess = t.bit();
            let Ok((first, p)) = blum_fabricate_round(&inst.graphs, guess, sp.n, &coins, t) else { return false };
            bb.send(session, &first);
            let Some(ch) = bb.expect_msg::<bool>(session) else { return false };
            if ch == guess {
                bb.send(session, &p.respond(ch));
                matched = true;
                break;
            }
            bb.rewind(cp);
        }
        if !matched {
            return false;
        }
    }
    true
}

fn sequential(mode: SubproofMode, n: usize, rounds: usize) -> Subproof {
    Subproof { mode, n, rounds, repetition: RepetitionMode::Sequential }
}

/// Corrupted `A` in coin flipping. Learns `a` from the adversary's first
/// proof input, answers `b = a ^ s`, and lets the trusted party release `s`
/// once the second proof checks. Needs hybrid subproofs: with real ones the
/// opening would have to be extracted.
pub fn sim_cf_corrupt_a(spec: SimulatorSpec, p: CoinflipParams) -> Program {
    let spec = Arc::new(spec);
    program(move |ctx, input| {
        let spec = spec.clone();
        async move {
            let n = p.n;
            if p.mode != SubproofMode::Hybrid {
                return ctx.abort("opening extraction needs hybrid subproofs");
            }
            let Some(CfInput { n: len }) = input.decode() else { return ctx.abort("malformed input") };
            if len != n {
                return ctx.abort("coin length differs from the protocol's");
            }
            ctx.f_send(&CfIn::Request { n });
            let Some(CfOut::Coins(s)) = ctx.f_recv().await else { return ctx.abort("no coins") };
            let mut bb = open_box(&ctx, &spec, input);
            let refuse = |ctx: &PartyCtx, bb: &BlackBox| {
                ctx.f_send(&CfIn::Decide { accept: false });
                finish(ctx, bb, "adversary stalled after a failed check")
            };
            let coins = ctx.bits(3 * n * n);
            bb.send(ROOT_SESSION, &coins);
            let Some(c) = bb.expect_msg::<Bits>(ROOT_SESSION) else { return refuse(&ctx, &bb) };
            let opening = opening_statement(n, &coins, &c);
            let a = match bb.expect_f::<ZkIn>(&sub("zk")) {
                Some(z) if zk_input_accepted(&z, &opening) => {
                    let ZkIn::Prove { witness, .. } = z;
                    witness.slice(0, n)
                }
                _ => return refuse(&ctx, &bb),
            };
            bb.send(ROOT_SESSION, &a.xor(&s));
            let Some(revealed) = bb.expect_msg::<Bits>(ROOT_SESSION) else { return refuse(&ctx, &bb) };
            if revealed.len() != n {
                return refuse(&ctx, &bb);
            }
            let accepted = bb
                .expect_f::<ZkIn>(&format!("{ROOT_SESSION}/zk#1"))
                .is_some_and(|z| zk_input_accepted(&z, &cf_l1(n, &coins, &c, &revealed)));
            // An opening to another value would need an equivocable commitment.
            if !accepted || revealed != a {
                return refuse(&ctx, &bb);
            }
            ctx.f_send(&CfIn::Decide { accept: true });
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}

/// Corrupted `B` in coin flipping. Commits to zeros, proves knowledge of
/// that opening, answers with `a = s ^ b` and simulates the proof that `a`
/// was committed.
pub fn sim_cf_corrupt_b(spec: SimulatorSpec, p: CoinflipParams) -> Program {
    let spec = Arc::new(spec);
    program(move |ctx, input| {
        let spec = spec.clone();
        async move {
            let n = p.n;
            let sp = sequential(p.mode, n, p.rounds);
            let Some(CfInput { n: len }) = input.decode() else { return ctx.abort("malformed input") };
            if len != n {
                return ctx.abort("coin length differs from the protocol's");
            }
            ctx.f_send(&CfIn::Request { n });
            let Some(CfOut::Coins(s)) = ctx.f_recv().await else { return ctx.abort("no coins") };
            let mut bb = open_box(&ctx, &spec, input);
            let Some(coins) = bb.expect_msg::<Bits>(ROOT_SESSION).filter(|c| c.len() == 3 * n * n) else {
                return finish(&ctx, &bb, "malformed coins");
            };
            let zero = Bits::zeros(n);
            let seeds = ctx.bits(n * n);
            let c = commit_string(&coins, &zero, &seeds, n).expect("lengths fixed above");
            bb.send(ROOT_SESSION, &c);
            let opening = opening_statement(n, &coins, &c);
            if !ctx.with_tape(|t| prove_to_adversary(&mut bb, &sub("zk"), &opening, &layout::opening(&zero, &seeds), sp, t)) {
                return finish(&ctx, &bb, "opening proof failed");
            }
            let Some(b) = bb.expect_msg::<Bits>(ROOT_SESSION).filter(|b| b.len() == n) else {
                return finish(&ctx, &bb, "malformed b");
            };
            let a = s.xor(&b);
            bb.send(ROOT_SESSION, &a);
            let l1 = cf_l1(n, &coins, &c, &a);
            if !ctx.with_tape(|t| simulate_to_adversary(&mut bb, &format!("{ROOT_SESSION}/zk#1"), &l1, sp, t)) {
                return finish(&ctx, &bb, "simulation failed");
            }
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}

/// Switches between the prover-case simulator and the intermediate machines
/// of its hybrid argument. The default is the simulator itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZkaokProverHybrid {
    /// Once the second proof passes, hand the trusted party the adversary's
    /// own input witness instead of decrypting.
    pub accept_on_zk2: bool,
    /// Send a uniform `a` instead of `pk ^ b`. Implies `accept_on_zk2`.
    pub uniform_a: bool,
    /// Commit to `a` instead of zeros. Implies `uniform_a`.
    pub commit_to_a: bool,
}

/// Corrupted prover in the ZKAoK protocol: generates a key pair, commits to
/// zeros, steers the coin flip to `pk` with `a = pk ^ b`, simulates the
/// phase 1 proof, verifies phase 2, decrypts `e` and forwards `(x, w)`.
pub fn sim_zkaok_prover(spec: SimulatorSpec, p: ZkaokParams) -> Program {
    zkaok_prover_machine(spec, p, ZkaokProverHybrid::default())
}

pub fn zkaok_prover_machine(spec: SimulatorSpec, p: ZkaokParams, h: ZkaokProverHybrid) -> Program {
    let spec = Arc::new(spec);
    let uniform_a = h.uniform_a || h.commit_to_a;
    let accept_on_zk2 = h.accept_on_zk2 || uniform_a;
    program(move |ctx, input| {
        let spec = spec.clone();
        async move {
            let sp = sequential(p.mode, p.n, p.rounds);
            let len = p.commit_len();
            let mut bb = open_box(&ctx, &spec, input.clone());
            let Some(coins) = bb.expect_msg::<Bits>(ROOT_SESSION).filter(|c| c.len() == 3 * p.n * len) else {
                return finish(&ctx, &bb, "malformed coins");
            };
            let keys = if uniform_a {
                None
            } else {
                Some(ctx.with_tape(|t| pke_keygen(p.lwe, t)).expect("validated parameters"))
            };
            let a_fixed = uniform_a.then(|| ctx.bits(len));
            let committed = match (&a_fixed, h.commit_to_a) {
                (Some(a), true) => a.clone(),
                _ => Bits::zeros(len),
            };
            let seeds = ctx.bits(p.n * len);
            let c = commit_string(&coins, &committed, &seeds, p.n).expect("lengths fixed above");
            bb.send(ROOT_SESSION, &c);
            let Some(b) = bb.expect_msg::<Bits>(ROOT_SESSION).filter(|b| b.len() == len) else {
                return finish(&ctx, &bb, "malformed b");
            };
            let a = match (&a_fixed, &keys) {
                (Some(a), _) => a.clone(),
                (None, Some(k)) => k.public_key.raw.xor(&b),
                (None, None) => unreachable!("keys exist unless a is fixed"),
            };
            bb.send(ROOT_SESSION, &a);
            let l1 = l1_statement(&p, &coins, &c, &a);
            if !ctx.with_tape(|t| simulate_to_adversary(&mut bb, &sub("zk1"), &l1, sp, t)) {
                return finish(&ctx, &bb, "phase 1 simulation failed");
            }
            let pk = PublicKey::from_bits(p.lwe, a.xor(&b)).expect("length fixed above");
            let Some(StatementAndCiphertext { statement: x, ciphertext: e }) = bb.expect_msg(ROOT_SESSION) else {
                return finish(&ctx, &bb, "malformed phase 2 message");
            };
            let l2 = l2_statement(&pk, &x, &e);
            if !ctx.with_tape(|t| adversary_proves(&mut bb, &sub("zk2"), &l2, sp, t)) {
                // No input reaches the trusted party; the dummy verifier never accepts.
                return finish(&ctx, &bb, "phase 2 proof rejected");
            }
            let w = match &keys {
                Some(k) if !accept_on_zk2 => match Ciphertext::from_bits(p.lwe, &e) {
                    Ok(ct) => pke_decrypt(&k.secret_key, &ct),
                    Err(_) => return finish(&ctx, &bb, "undecryptable ciphertext"),
                },
                _ => match input.decode::<ZkProverInput>() {
                    Some(i) => i.witness,
                    None => return finish(&ctx, &bb, "no input witness"),
                },
            };
            ctx.note(format!("extracted witness of {} bits", w.len()));
            ctx.f_send(&ZkIn::Prove { relation: x.relation_id().to_string(), statement: x, witness: w });
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}

/// Corrupted verifier in the ZKAoK protocol: runs phase 1 honestly, sends an
/// encryption of zeros of the witness length and simulates phase 2.
pub fn sim_zkaok_verifier(spec: SimulatorSpec, p: ZkaokParams) -> Program {
    let spec = Arc::new(spec);
    program(move |ctx, input| {
        let spec = spec.clone();
        async move {
            let sp = sequential(p.mode, p.n, p.rounds);
            let len = p.commit_len();
            let Some(ZkOut::Accept(x)) = ctx.f_recv().await else { return ctx.abort("no statement") };
            let mut bb = open_box(&ctx, &spec, input);
            let coins = ctx.bits(3 * p.n * len);
            bb.send(ROOT_SESSION, &coins);
            let Some(c) = bb.expect_msg::<Bits>(ROOT_SESSION) else { return finish(&ctx, &bb, "malformed commitment") };
            let b = ctx.bits(len);
            bb.send(ROOT_SESSION, &b);
            let Some(a) = bb.expect_msg::<Bits>(ROOT_SESSION).filter(|a| a.len() == len) else {
                return finish(&ctx, &bb, "malformed opening");
            };
            if !ctx.with_tape(|t| adversary_proves(&mut bb, &sub("zk1"), &l1_statement(&p, &coins, &c, &a), sp, t)) {
                return finish(&ctx, &bb, "phase 1 proof rejected");
            }
            let pk = PublicKey::from_bits(p.lwe, a.xor(&b)).expect("length fixed above");
            let Some(wlen) = x.witness_len() else { return ctx.abort("statement without a witness length") };
            let r = ctx.bits(p.lwe.randomness_bits(wlen));
            let e = pke_encrypt(&pk, &Bits::zeros(wlen), &r).expect("lengths fixed above").to_bits();
            bb.send(ROOT_SESSION, &StatementAndCiphertext { statement: x.clone(), ciphertext: e.clone() });
            if !ctx.with_tape(|t| simulate_to_adversary(&mut bb, &sub("zk2"), &l2_statement(&pk, &x, &e), sp, t)) {
                return finish(&ctx, &bb, "phase 2 simulation failed");
            }
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}

fn parallel(p: &ZkcfParams) -> Subproof {
    Subproof { mode: p.mode, n: p.n, rounds: p.q, repetition: RepetitionMode::Parallel }
}

/// Reads the adversary's coin request and its acceptance of `s`.
fn serve_coins(bb: &mut BlackBox, p: &ZkcfParams, s: &Bits, decides: bool) -> bool {
    let session = sub("cf");
    if !matches!(bb.expect_f::<CfIn>(&session), Some(CfIn::Request { n }) if n == p.coin_len()) {
        return false;
    }
    bb.deliver_f(&session, &CfOut::Coins(s.clone()));
    !decides || matches!(bb.expect_f::<CfIn>(&session), Some(CfIn::Decide { accept: true }))
}

/// Corrupted prover in the coin-flipping-hybrid protocol: hands out coins
/// whose first part is a real key, verifies the proof and decrypts.
pub fn sim_zkcf_prover(spec: SimulatorSpec, p: ZkcfParams) -> Program {
    let spec = Arc::new(spec);
    program(move |ctx, input| {
        let spec = spec.clone();
        async move {
            let mut bb = open_box(&ctx, &spec, input);
            let keys = ctx.with_tape(|t| pke_keygen(p.lwe, t)).expect("validated parameters");
            let s2 = ctx.bits(3 * p.n);
            let s = Bits::concat(&[&keys.public_key.raw, &s2]);
            if !serve_coins(&mut bb, &p, &s, true) {
                return finish(&ctx, &bb, "coin flip refused");
            }
            let Some(StatementAndCiphertext { statement: x, ciphertext: e }) = bb.expect_msg(ROOT_SESSION) else {
                return finish(&ctx, &bb, "malformed statement message");
            };
            let stmt = r_statement(&p, &x, &s2, &keys.public_key, &e);
            if !ctx.with_tape(|t| adversary_proves(&mut bb, &sub("wi"), &stmt, parallel(&p), t)) {
                return finish(&ctx, &bb, "proof rejected");
            }
            let Ok(ct) = Ciphertext::from_bits(p.lwe, &e) else { return finish(&ctx, &bb, "undecryptable ciphertext") };
            let w = pke_decrypt(&keys.secret_key, &ct);
            ctx.note(format!("extracted witness of {} bits", w.len()));
            ctx.f_send(&ZkIn::Prove { relation: x.relation_id().to_string(), statement: x, witness: w });
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}

/// Switches between the verifier-case simulator and its hybrids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZkcfVerifierHybrid {
    /// Encrypt this witness instead of zeros.
    pub witness: Option<Bits>,
    /// Prove with the encryption branch (needs `witness`).
    pub prove_with_witness: bool,
    /// Uniform `s2` instead of a generator output.
    pub uniform_s2: bool,
}

/// Corrupted verifier in the coin-flipping-hybrid protocol: hands out coins
/// with `s2 = PG(r)`, encrypts zeros and proves with the generator branch.
pub fn sim_zkcf_verifier(spec: SimulatorSpec, p: ZkcfParams) -> Program {
    zkcf_verifier_machine(spec, p, ZkcfVerifierHybrid::default())
}

pub fn zkcf_verifier_machine(spec: SimulatorSpec, p: ZkcfParams, h: ZkcfVerifierHybrid) -> Program {
    let spec = Arc::new(spec);
    let h = Arc::new(h);
    program(move |ctx, input| {
        let (spec, h) = (spec.clone(), h.clone());
        async move {
            let Some(ZkOut::Accept(x)) = ctx.f_recv().await else { return ctx.abort("no statement") };
            let mut bb = open_box(&ctx, &spec, input);
            let seed = ctx.bits(p.n);
            let s2 = if h.uniform_s2 {
                ctx.bits(3 * p.n)
            } else {
                prg_expand_bits(&seed, p.n).expect("validated parameters")
            };
            let s1 = ctx.bits(p.lwe.pk_bits());
            let s = Bits::concat(&[&s1, &s2]);
            if !serve_coins(&mut bb, &p, &s, false) {
                return finish(&ctx, &bb, "malformed coin request");
            }
            let (pk, _) = p.split(&s).expect("length fixed above");
            let Some(wlen) = x.witness_len() else { return ctx.abort("statement without a witness length") };
            let plain = h.witness.clone().unwrap_or_else(|| Bits::zeros(wlen));
            let r = ctx.bits(p.lwe.randomness_bits(wlen));
            let Ok(e) = pke_encrypt(&pk, &plain, &r) else { return ctx.abort("witness of wrong length") };
            let e = e.to_bits();
            bb.send(ROOT_SESSION, &StatementAndCiphertext { statement: x.clone(), ciphertext: e.clone() });
            let stmt = r_statement(&p, &x, &s2, &pk, &e);
            let witness = match (&h.witness, h.prove_with_witness) {
                (Some(w), true) => layout::r_encryption_branch(w, &r, p.n),
                _ => layout::r_generator_branch(&seed, EncLayout { w: wlen, r: r.len() }),
            };
            if !ctx.with_tape(|t| prove_to_adversary(&mut bb, &sub("wi"), &stmt, &witness, parallel(&p), t)) {
                return finish(&ctx, &bb, "proof failed");
            }
            finish(&ctx, &bb, "adversary did not finish")
        }
    })
}
