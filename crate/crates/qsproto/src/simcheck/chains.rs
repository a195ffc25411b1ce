//! Ensembles for the real world, the ideal world and the hybrid machines in
//! between, plus the projections the reports use.

use super::simulators::*;
use super::stats::MachineEnsemble;
use crate::bits::Bits;
use crate::functionalities::{CfInput, CfOut, ZkProverInput, ZkVerifierInput};
use crate::machine::{run_execution, view_dumping, DumpedView, ExecutionConfig, Output, Payload, Program, Role, ROOT_SESSION};
use crate::npreduce::RelationStatement;
use crate::protocols::{coinflip_protocol, zk_from_cf_protocol, zkaok, zkaok_protocol, zkcf, CoinflipParams, ZkaokParams, ZkcfParams};

/// Outputs of `A` and `B`.
pub type Sample = [Output; 2];

pub fn sample_of(cfg: &ExecutionConfig) -> Sample {
    let r = run_execution(cfg).expect("ensemble configurations are valid");
    [r.output(Role::A).clone(), r.output(Role::B).clone()]
}

pub fn real_ensemble(name: &str, spec: SimulatorSpec, input_a: Payload, input_b: Payload) -> MachineEnsemble<Sample> {
    MachineEnsemble::new(name, move |seed| sample_of(&spec.real_config(input_a.clone(), input_b.clone(), seed)))
}

pub fn ideal_ensemble(
    name: &str,
    spec: SimulatorSpec,
    simulator: Program,
    input_a: Payload,
    input_b: Payload,
) -> MachineEnsemble<Sample> {
    MachineEnsemble::new(name, move |seed| {
        sample_of(&spec.ideal_config(simulator.clone(), input_a.clone(), input_b.clone(), seed))
    })
}

fn zk_inputs(x: &RelationStatement, w: &Bits) -> (Payload, Payload) {
    (Payload::encode(&ZkProverInput::new(x.clone(), w.clone())), Payload::encode(&ZkVerifierInput::new(x.relation_id())))
}

/// The view the corrupted party reported, if it reported one.
pub fn dumped_view(o: &Output) -> Option<DumpedView> {
    o.decode()
}

/// Corrupted `A` in coin flipping: real execution and simulator, with the
/// adversary reporting its view.
pub fn cf_corrupt_a_pair(p: CoinflipParams, adversary: Program) -> [MachineEnsemble<Sample>; 2] {
    let spec = SimulatorSpec::new(coinflip_protocol(p), Role::A, view_dumping(adversary));
    let (real_in, ideal_in) = (Payload::encode(&()), Payload::encode(&CfInput { n: p.n }));
    [
        real_ensemble("real", spec.clone(), real_in.clone(), real_in),
        ideal_ensemble("ideal", spec.clone(), sim_cf_corrupt_a(spec, p), ideal_in.clone(), ideal_in),
    ]
}

/// Low 4 bits of the `b` the adversary received and of `B`'s output.
pub fn cf_corrupt_a_projection(s: &Sample) -> u16 {
    let b = dumped_view(&s[0]).and_then(|v| v.messages_in(ROOT_SESSION).nth(1).and_then(|p| p.decode::<Bits>()));
    let out = s[1].decode::<Bits>();
    match (b, out) {
        (Some(b), Some(o)) => (b.slice(0, 4.min(b.len())).to_u64() as u16) << 4 | o.slice(0, 4.min(o.len())).to_u64() as u16,
        _ => 1 << 15,
    }
}

/// `M0` (simulator) to `M4` (real execution) for a corrupted prover running
/// the honest prover program on `(x, w)`.
pub fn zkaok_prover_chain(p: ZkaokParams, x: &RelationStatement, w: &Bits) -> Vec<MachineEnsemble<Sample>> {
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::A, view_dumping(zkaok::prover_program(p)));
    let (ia, ib) = zk_inputs(x, w);
    let hybrid = |name: &str, h: ZkaokProverHybrid| {
        ideal_ensemble(name, spec.clone(), zkaok_prover_machine(spec.clone(), p, h), ia.clone(), ib.clone())
    };
    vec![
        hybrid("M0 simulator", ZkaokProverHybrid::default()),
        hybrid("M1 accept when ZK2 passes", ZkaokProverHybrid { accept_on_zk2: true, ..Default::default() }),
        hybrid("M2 uniform a", ZkaokProverHybrid { accept_on_zk2: true, uniform_a: true, commit_to_a: false }),
        hybrid("M3 commit to a", ZkaokProverHybrid { accept_on_zk2: true, uniform_a: true, commit_to_a: true }),
        real_ensemble("M4 real", spec.clone(), ia.clone(), ib.clone()),
    ]
}

/// First 4 bits of the commitment and of `a` as the adversary saw them, and
/// whether the verifier accepted.
pub fn zkaok_prover_projection(s: &Sample) -> u16 {
    let Some(v) = dumped_view(&s[0]) else { return 1 << 15 };
    let mut msgs = v.messages_in(ROOT_SESSION).filter_map(|p| p.decode::<Bits>());
    let (Some(c), Some(a)) = (msgs.next(), msgs.next()) else { return 1 << 14 };
    let low = |b: &Bits| b.slice(0, 4.min(b.len())).to_u64() as u16;
    low(&c) << 5 | low(&a) << 1 | (!s[1].is_bot()) as u16
}

/// `M0` (simulator) to `M3` (real execution) for a corrupted verifier
/// running the honest verifier program.
pub fn zkcf_verifier_chain(p: ZkcfParams, x: &RelationStatement, w: &Bits) -> Vec<MachineEnsemble<Sample>> {
    let spec = SimulatorSpec::new(zk_from_cf_protocol(p), Role::B, view_dumping(zkcf::verifier_program(p)));
    let (ia, ib) = zk_inputs(x, w);
    let hybrid = |name: &str, h: ZkcfVerifierHybrid| {
        ideal_ensemble(name, spec.clone(), zkcf_verifier_machine(spec.clone(), p, h), ia.clone(), ib.clone())
    };
    vec![
        hybrid("M0 simulator", ZkcfVerifierHybrid::default()),
        hybrid("M1 encrypt the witness", ZkcfVerifierHybrid { witness: Some(w.clone()), ..Default::default() }),
        hybrid(
            "M2 prove with the witness",
            ZkcfVerifierHybrid { witness: Some(w.clone()), prove_with_witness: true, uniform_s2: false },
        ),
        real_ensemble("M3 real", spec.clone(), ia, ib),
    ]
}

/// The first `bits` bits of `s2` in the coins the adversary received.
pub fn zkcf_s2_projection(p: ZkcfParams, bits: usize) -> impl Fn(&Sample) -> u16 + Sync {
    move |s: &Sample| {
        let Some(v) = dumped_view(&s[1]) else { return 1 << 15 };
        let coins = v.received.iter().find(|i| i.from_functionality).and_then(|i| i.payload.decode::<CfOut>());
        match coins.and_then(|c| match c {
            CfOut::Coins(s) => p.split(&s),
            CfOut::Bot => None,
        }) {
            Some((_, s2)) => s2.slice(0, bits).to_u64() as u16,
            None => 1 << 14,
        }
    }
}
