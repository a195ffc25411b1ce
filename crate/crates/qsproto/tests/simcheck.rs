use qsproto::bits::Bits;
use qsproto::functionalities::{CfInput, CfOut, ZkIn, ZkProverInput, ZkVerifierInput};
use qsproto::machine::*;
use qsproto::npreduce::{check_relation, RelationStatement};
use qsproto::primitives::prg_expand_bits;
use qsproto::protocols::coinflip::{party_a, party_b};
use qsproto::protocols::zkaok::StatementAndCiphertext;
use qsproto::protocols::*;
use qsproto::simcheck::chains::*;
use qsproto::simcheck::*;
use qsproto::tape::{Tape, TapeSource};
use std::collections::BTreeMap;

fn zk_inputs(x: &RelationStatement, w: &Bits) -> (Payload, Payload) {
    (Payload::encode(&ZkProverInput::new(x.clone(), w.clone())), Payload::encode(&ZkVerifierInput::new(x.relation_id())))
}

fn view(o: &Output) -> DumpedView {
    o.decode().expect("adversary reports its view")
}

/// The functionality input the simulator gave as `A`, if any.
fn forwarded(t: &Transcript) -> Option<ZkIn> {
    t.events.iter().find_map(|e| match e {
        Event::Functionality { session, party: Role::A, direction: Direction::ToFunctionality, payload, .. }
            if session == ROOT_SESSION =>
        {
            payload.decode()
        }
        _ => None,
    })
}

#[test]
fn cf_corrupt_a_is_exact_over_all_adversary_coins() {
    let n = 4;
    let p = CoinflipParams::hybrid(n);
    let spec_base = SimulatorSpec::new(coinflip_protocol(p), Role::A, view_dumping(party_a(p)));
    let coins = Tape::from_seed([3; 32]).bits(3 * n * n);
    let seeds = Tape::from_seed([4; 32]).bits(n * n);
    let unit = Payload::encode(&());
    let cf_in = Payload::encode(&CfInput { n });
    let (mut real, mut ideal) = (BTreeMap::new(), BTreeMap::new());
    for a in 0..16u64 {
        let script = TapeSource::Explicit(Bits::concat(&[&Bits::from_u64(a, n), &seeds]));
        let spec = spec_base.clone().with_tape(script.clone());
        for v in 0..16u64 {
            let r = run_execution(
                &spec
                    .real_config(unit.clone(), unit.clone(), 0)
                    .with_tape("A", script.clone())
                    .with_tape("B", TapeSource::Explicit(Bits::concat(&[&coins, &Bits::from_u64(v, n)]))),
            )
            .unwrap();
            *real.entry([r.output(Role::A).clone(), r.output(Role::B).clone()]).or_insert(0) += 1;
            let cfg = spec
                .ideal_config(sim_cf_corrupt_a(spec.clone(), p), cf_in.clone(), cf_in.clone(), 0)
                .with_tape("A", TapeSource::Explicit(coins.clone()))
                .with_tape("F:main", TapeSource::Explicit(Bits::from_u64(v, n)));
            let r = run_execution(&cfg).unwrap();
            assert!(!r.output(Role::B).is_bot());
            *ideal.entry([r.output(Role::A).clone(), r.output(Role::B).clone()]).or_insert(0) += 1;
        }
    }
    assert_eq!(real.len(), 256);
    assert_eq!(real, ideal);
}

#[test]
fn cf_corrupt_a_sampled_at_n8_is_within_radius() {
    let [real, ideal] = cf_corrupt_a_pair(CoinflipParams::hybrid(8), party_a(CoinflipParams::hybrid(8)));
    let est = estimate_tv(&real, &ideal, 1000, &cf_corrupt_a_projection, 5);
    assert!(est.estimate <= est.radius, "{est:?}");
}

#[test]
fn cf_corrupt_a_refuses_a_bad_opening_proof() {
    let p = CoinflipParams::hybrid(4);
    // Commits honestly but proves the opening with garbage.
    let liar = program(move |ctx, _| async move {
        let coins: Bits = ctx.recv().await.unwrap();
        let c = qsproto::primitives::commit_string(&coins, &Bits::zeros(4), &Bits::zeros(16), 4).unwrap();
        ctx.send(&c);
        let x = qsproto::protocols::coinflip::opening_statement(4, &coins, &c);
        ctx.call("zk", Role::A, Payload::encode(&ZkProverInput::new(x, Bits::concat(&[&Bits::from_u64(15, 4), &Bits::zeros(16)])))).await;
        ctx.recv_raw().await;
        Output::unit()
    });
    let spec = SimulatorSpec::new(coinflip_protocol(p), Role::A, liar);
    let cf_in = Payload::encode(&CfInput { n: 4 });
    let r = run_execution(&spec.ideal_config(sim_cf_corrupt_a(spec.clone(), p), cf_in.clone(), cf_in, 1)).unwrap();
    assert!(r.output(Role::B).is_bot());
    assert!(r.output(Role::A).is_bot());
}

#[test]
fn cf_corrupt_b_differs_only_in_the_commitment() {
    for mode in [SubproofMode::Hybrid, SubproofMode::Micro] {
        let p = CoinflipParams { n: 4, mode, rounds: 4 };
        let adv_tape = TapeSource::Seed([8; 32]);
        let spec = SimulatorSpec::new(coinflip_protocol(p), Role::B, view_dumping(party_b(p))).with_tape(adv_tape.clone());
        let unit = Payload::encode(&());
        let real = run_execution(&spec.real_config(unit.clone(), unit, 2).with_tape("B", adv_tape.clone())).unwrap();
        let s: Bits = real.output(Role::A).decode().unwrap();
        let cf_in = Payload::encode(&CfInput { n: 4 });
        let ideal = run_execution(
            &spec
                .ideal_config(sim_cf_corrupt_b(spec.clone(), p), cf_in.clone(), cf_in, 2)
                .with_tape("F:main", TapeSource::Explicit(s.clone())),
        )
        .unwrap();
        assert_eq!(ideal.output(Role::A).decode::<Bits>(), Some(s.clone()), "{mode:?}");
        let (rv, iv) = (view(real.output(Role::B)), view(ideal.output(Role::B)));
        assert_eq!(rv.output, iv.output);
        let msgs = |v: &DumpedView| v.messages_in(ROOT_SESSION).cloned().collect::<Vec<_>>();
        let (rm, im) = (msgs(&rv), msgs(&iv));
        // Root messages to B: c, then a.
        assert_eq!(rm.len(), 2);
        assert_ne!(rm[0], im[0], "{mode:?}");
        assert_eq!(rm[1], im[1], "{mode:?}");
    }
}

#[test]
fn cf_corrupt_b_answer_is_uniform_for_uniform_b() {
    let s = Bits::from_u64(0b1011, 4);
    let answers: std::collections::BTreeSet<Bits> = (0..16).map(|b| s.xor(&Bits::from_u64(b, 4))).collect();
    assert_eq!(answers.len(), 16);
}

#[test]
fn zkaok_prover_simulator_extracts_in_both_modes() {
    for (p, v) in [(ZkaokParams::hybrid(8), 5), (ZkaokParams::micro(4), 3)] {
        let (x, w) = demo_statement(v);
        let (ia, ib) = zk_inputs(&x, &w);
        let spec = SimulatorSpec::new(zkaok_protocol(p), Role::A, view_dumping(zkaok::prover_program(p)));
        let r = run_execution(&spec.ideal_config(sim_zkaok_prover(spec.clone(), p), ia, ib, 3)).unwrap();
        let Some(ZkIn::Prove { statement, witness, .. }) = forwarded(&r.transcript) else { panic!("nothing forwarded") };
        assert_eq!(statement, x);
        assert!(check_relation(&x, &witness), "{:?}", p.mode);
        assert_eq!(r.output(Role::B).decode::<RelationStatement>(), Some(x));
        assert_eq!(view(r.output(Role::A)).output, Output::unit());
        // The adversary's key is a ^ b; the simulator chose a after seeing b.
        let v = view(r.output(Role::A));
        let got: Vec<Bits> = v.messages_in(ROOT_SESSION).filter_map(|m| m.decode()).collect();
        assert_eq!(got.len(), 2);
    }
}

#[test]
fn zkaok_prover_simulator_forwards_a_bad_decryption() {
    let p = ZkaokParams::hybrid(8);
    let (x, w) = demo_statement(5);
    let mut bad = w.clone();
    bad.set(0, !bad.get(0));
    // A cheating prover passes only if the subproof checks; F_ZK in its slot
    // rejects, so nothing reaches the trusted party.
    let (ia, ib) = zk_inputs(&x, &bad);
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::A, zkaok::cheating_prover_program(p));
    let r = run_execution(&spec.ideal_config(sim_zkaok_prover(spec.clone(), p), ia, ib, 4)).unwrap();
    assert!(forwarded(&r.transcript).is_none());
    assert!(r.output(Role::B).is_bot());
}

#[test]
fn zkaok_prover_abort_in_phase_two_leaves_verifier_with_bot() {
    let p = ZkaokParams::hybrid(8);
    let (x, w) = demo_statement(5);
    let (ia, ib) = zk_inputs(&x, &w);
    let quitter = program(move |ctx, _| async move {
        ctx.send(&ctx.bits(3 * 8 * p.commit_len()));
        let _c: Bits = ctx.recv().await.unwrap();
        ctx.send(&ctx.bits(p.commit_len()));
        let _a: Bits = ctx.recv().await.unwrap();
        ctx.abort("quitting before phase 2")
    });
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::A, quitter);
    let r = run_execution(&spec.ideal_config(sim_zkaok_prover(spec.clone(), p), ia, ib, 5)).unwrap();
    assert!(forwarded(&r.transcript).is_none());
    assert!(r.output(Role::B).is_bot());
    assert!(r.output(Role::A).is_bot());
}

#[test]
fn zkaok_verifier_simulator_convinces_an_honest_verifier() {
    for (p, v) in [(ZkaokParams::hybrid(8), 5), (ZkaokParams::micro(4), 3)] {
        let (x, w) = demo_statement(v);
        let (ia, ib) = zk_inputs(&x, &w);
        let spec = SimulatorSpec::new(zkaok_protocol(p), Role::B, view_dumping(zkaok::verifier_program(p)));
        let r = run_execution(&spec.ideal_config(sim_zkaok_verifier(spec.clone(), p), ia, ib, 6)).unwrap();
        let dv = view(r.output(Role::B));
        assert_eq!(dv.output.decode::<RelationStatement>(), Some(x.clone()), "{:?}", p.mode);
        let sc: StatementAndCiphertext = dv.messages_in(ROOT_SESSION).nth(2).unwrap().decode().unwrap();
        assert_eq!(sc.ciphertext.len(), w.len() * p.lwe.block_bits());
    }
}

#[test]
fn zkaok_verifier_phase_one_messages_match_real_distribution() {
    let p = ZkaokParams::hybrid(8);
    let (x, w) = demo_statement(5);
    let (ia, ib) = zk_inputs(&x, &w);
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::B, view_dumping(zkaok::verifier_program(p)));
    let real = real_ensemble("real", spec.clone(), ia.clone(), ib.clone());
    let ideal = ideal_ensemble("ideal", spec.clone(), sim_zkaok_verifier(spec.clone(), p), ia, ib);
    // Low bits of the coins and of b.
    let proj = |s: &Sample| {
        let v = view(&s[1]);
        let m: Vec<Bits> = v.messages_in(ROOT_SESSION).take(2).filter_map(|m| m.decode()).collect();
        (m[0].slice(0, 4).to_u64() << 4 | m[1].slice(0, 4).to_u64()) as u16
    };
    let est = estimate_tv(&real, &ideal, 1500, &proj, 7);
    assert!(est.estimate <= est.radius, "{est:?}");
}

#[test]
fn zkaok_verifier_abort_is_clean() {
    let p = ZkaokParams::hybrid(8);
    let (x, w) = demo_statement(5);
    let (ia, ib) = zk_inputs(&x, &w);
    let quitter = program(|ctx, _| async move { ctx.abort("no") });
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::B, quitter);
    let r = run_execution(&spec.ideal_config(sim_zkaok_verifier(spec.clone(), p), ia, ib, 8)).unwrap();
    assert!(r.output(Role::B).is_bot());
    assert!(!r.transcript.events.iter().any(|e| matches!(e, Event::Fault { .. })));
}

#[test]
fn zkcf_prover_simulator_extracts_the_adversary_witness() {
    for (p, v) in [(ZkcfParams::hybrid(64), 5), (ZkcfParams::micro(4), 3)] {
        let (x, w) = demo_statement(v);
        let (ia, ib) = zk_inputs(&x, &w);
        let spec = SimulatorSpec::new(zk_from_cf_protocol(p), Role::A, view_dumping(zkcf::prover_program(p)));
        let r = run_execution(&spec.ideal_config(sim_zkcf_prover(spec.clone(), p), ia, ib, 9)).unwrap();
        let Some(ZkIn::Prove { witness, .. }) = forwarded(&r.transcript) else { panic!("nothing forwarded") };
        assert_eq!(witness, w, "{:?}", p.mode);
        assert_eq!(r.output(Role::B).decode::<RelationStatement>(), Some(x));
    }
}

#[test]
fn zkcf_verifier_simulator_proves_with_the_generator_branch() {
    for (p, v) in [(ZkcfParams::hybrid(64), 5), (ZkcfParams::micro(4), 3)] {
        let (x, w) = demo_statement(v);
        let (ia, ib) = zk_inputs(&x, &w);
        let spec = SimulatorSpec::new(zk_from_cf_protocol(p), Role::B, view_dumping(zkcf::verifier_program(p)));
        let r = run_execution(&spec.ideal_config(sim_zkcf_verifier(spec.clone(), p), ia, ib, 10)).unwrap();
        let dv = view(r.output(Role::B));
        assert_eq!(dv.output.decode::<RelationStatement>(), Some(x), "{:?}", p.mode);
        let coins = dv.received.iter().find(|i| i.from_functionality).unwrap().payload.decode::<CfOut>().unwrap();
        let CfOut::Coins(s) = coins else { panic!("no coins") };
        let (pk, s2) = p.split(&s).unwrap();
        assert_eq!(pk.raw.len(), p.lwe.pk_bits());
        if p.n == 4 {
            assert!((0..16).any(|seed| prg_expand_bits(&Bits::from_u64(seed, 4), 4).unwrap() == s2));
        }
    }
}

#[test]
fn simulators_touch_only_the_functionality() {
    let p = ZkaokParams::hybrid(8);
    let (x, w) = demo_statement(5);
    let (ia, ib) = zk_inputs(&x, &w);
    let spec = SimulatorSpec::new(zkaok_protocol(p), Role::A, zkaok::prover_program(p));
    let r = run_execution(&spec.ideal_config(sim_zkaok_prover(spec.clone(), p), ia, ib, 11)).unwrap();
    for e in &r.transcript.events {
        assert!(!matches!(e, Event::Message { .. }), "ideal world carries no messages: {e:?}");
        if let Event::Functionality { session, .. } = e {
            assert_eq!(session, ROOT_SESSION);
        }
    }
}

#[test]
fn zkaok_chain_reports_every_link() {
    let report = run_suite("zkaok-prover-chain", Some(4), Some(SubproofMode::Hybrid), 60, 1).unwrap();
    assert_eq!(report.chain.links.len(), 4);
    assert!(report.pass);
    assert!(report.note.contains("rewinding"));
    let json = serde_json::to_value(&report).unwrap();
    assert!(json["chain"]["links"][0]["radius"].is_number());
}

#[test]
fn zkcf_chain_s2_link_is_small() {
    let report = run_suite("zkcf-verifier-chain", None, None, 1000, 2).unwrap();
    assert_eq!(report.chain.machines.len(), 4);
    assert!(report.pass, "{:?}", report.chain.links[2]);
    assert!(run_suite("nope", None, None, 1, 0).is_err());
}
