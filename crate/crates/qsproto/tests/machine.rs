use qsproto::bits::Bits;
use qsproto::functionalities::{ideal_protocol, FunctionalityKind, ZkProverInput, ZkVerifierInput};
use qsproto::npreduce::RelationId;
use qsproto::machine::*;
use qsproto::protocols::{coinflip_protocol, echo_protocol, zkaok_protocol, CoinflipParams, ZkaokParams};
use qsproto::tape::TapeSource;
use std::future::Future;
use std::sync::Arc;
use std::task::Poll;

fn unit() -> Payload {
    Payload::encode(&())
}

fn coinflip_config(seed: u64) -> ExecutionConfig {
    ExecutionConfig::new(coinflip_protocol(CoinflipParams::hybrid(8)), unit(), unit(), seed)
}

#[test]
fn echo_delivers_a_input_to_b() {
    let cfg = ExecutionConfig::new(echo_protocol(), Payload(b"hello".to_vec()), Payload::default(), 0);
    let r = run_execution(&cfg).unwrap();
    assert_eq!(r.output(Role::B), &Output::Value(Payload(b"hello".to_vec())));
    assert_eq!(r.output(Role::A), &Output::unit());
    assert_eq!(r.transcript.message_count(), 1);
}

#[test]
fn same_config_gives_identical_transcripts() {
    let a = run_execution(&coinflip_config(3)).unwrap();
    let b = run_execution(&coinflip_config(3)).unwrap();
    assert_eq!(a.transcript.to_json(), b.transcript.to_json());
    assert_eq!(a.transcript.digest(), b.transcript.digest());
    let c = run_execution(&coinflip_config(4)).unwrap();
    assert_ne!(a.transcript.digest(), c.transcript.digest());
}

#[test]
fn b_aborting_at_round_one_leaves_a_with_bot() {
    let quitter = program(|ctx, _| async move { ctx.abort("quit") });
    let cfg = coinflip_config(1).corrupt(Corruption::malicious(Role::B, quitter));
    let r = run_execution(&cfg).unwrap();
    assert!(r.output(Role::A).is_bot());
    assert!(r.transcript.events.iter().any(|e| matches!(e, Event::Abort { party: Role::B, reason, .. } if reason == "quit")));
    assert!(r.transcript.events.iter().any(|e| matches!(e, Event::Abort { party: Role::A, reason, .. } if reason == "stalled")));
}

#[test]
fn panicking_program_aborts() {
    let bad = program(|_, _| async move { panic!("boom") });
    let r = run_execution(&coinflip_config(1).corrupt(Corruption::malicious(Role::A, bad))).unwrap();
    assert!(r.output(Role::A).is_bot());
    assert!(r.output(Role::B).is_bot());
}

#[test]
fn compose_checks_slot_and_kind() {
    let cf = coinflip_protocol(CoinflipParams::hybrid(4));
    let zk = ideal_protocol(FunctionalityKind::Zk);
    assert!(matches!(compose(&cf, "nope", zk), Err(MachineError::UndeclaredSlot(_))));
    let wrong = ideal_protocol(FunctionalityKind::Com);
    assert!(matches!(compose(&cf, "zk", wrong), Err(MachineError::SlotKind { .. })));
    assert!(matches!(compose(&cf, "zk", echo_protocol()), Err(MachineError::SlotKind { .. })));
}

#[test]
fn composing_the_ideal_protocol_is_the_identity() {
    let cf = coinflip_protocol(CoinflipParams::hybrid(8));
    let composed = Arc::new(compose(&cf, "zk", ideal_protocol(FunctionalityKind::Zk)).unwrap());
    for seed in 0..5 {
        let h = run_execution(&ExecutionConfig::new(cf.clone(), unit(), unit(), seed)).unwrap();
        let c = run_execution(&ExecutionConfig::new(composed.clone(), unit(), unit(), seed)).unwrap();
        assert_eq!(h.transcript.digest(), c.transcript.digest());
    }
}

#[test]
fn corrupt_view_requires_a_corrupted_party() {
    let cfg = coinflip_config(2).corrupt(Corruption::semi_honest(Role::B));
    let r = run_execution(&cfg).unwrap();
    assert!(matches!(corrupt_view(&cfg, &r, Role::A), Err(MachineError::NotCorrupted(Role::A))));
    let v = corrupt_view(&cfg, &r, Role::B).unwrap();
    assert!(!v.controlled);
    let to_b = r.transcript.events.iter().filter(|e| matches!(e, Event::Message { to: Role::B, .. })).count();
    let msgs_in_view = v.received.iter().filter(|e| matches!(e, Event::Message { .. })).count();
    assert_eq!(to_b, msgs_in_view);
}

fn sent_messages(view: &PartyView) -> Vec<Payload> {
    view.sent
        .iter()
        .filter_map(|e| match e {
            Event::Message { payload, .. } => Some(payload.clone()),
            _ => None,
        })
        .collect()
}

#[test]
fn semi_honest_party_sends_what_the_honest_party_sends() {
    let semi = coinflip_config(5).corrupt(Corruption::semi_honest(Role::B));
    let honest = run_execution(&coinflip_config(5)).unwrap();
    let r = run_execution(&semi).unwrap();
    let honest_b: Vec<Payload> = honest
        .transcript
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Message { from: Role::B, payload, .. } => Some(payload.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(sent_messages(&corrupt_view(&semi, &r, Role::B).unwrap()), honest_b);
}

#[test]
fn malicious_substitution_changes_outbound_messages() {
    let honest = coinflip_protocol(CoinflipParams::hybrid(8)).program(Role::B).clone();
    // Same program, different tape: the coins it sends change.
    let cfg = coinflip_config(5)
        .corrupt(Corruption::malicious(Role::B, honest))
        .with_tape("B", TapeSource::Seed([7; 32]));
    let r = run_execution(&cfg).unwrap();
    let base = run_execution(&coinflip_config(5)).unwrap();
    assert_ne!(r.transcript.digest(), base.transcript.digest());
    let v = corrupt_view(&cfg, &r, Role::B).unwrap();
    assert!(v.controlled);
}

#[test]
fn corruption_notices_come_first() {
    let r = run_execution(&coinflip_config(6).corrupt(Corruption::semi_honest(Role::A))).unwrap();
    assert!(matches!(r.transcript.events[0], Event::Corrupt { party: Role::A, .. }));
    assert!(r.transcript.events[1..].iter().all(|e| !matches!(e, Event::Corrupt { .. })));
}

#[test]
fn scheduler_index_out_of_range_is_a_fault() {
    let r = run_execution(&coinflip_config(1).schedule(SchedulerSpec::Script(vec![3]))).unwrap();
    assert!(r.transcript.events.iter().any(|e| matches!(e, Event::Fault { .. })));
    assert!(r.output(Role::B).is_bot());
}

#[test]
fn reordering_schedulers_preserve_honest_outcomes() {
    for spec in [SchedulerSpec::Lifo, SchedulerSpec::Random(9)] {
        let r = run_execution(&coinflip_config(8).schedule(spec)).unwrap();
        assert!(!r.output(Role::B).is_bot());
        assert_eq!(r.output(Role::A), r.output(Role::B));
    }
}

#[test]
fn composed_subprotocol_events_are_contiguous() {
    let outer = coinflip_protocol(CoinflipParams::hybrid(4));
    let composed = Arc::new(compose(&outer, "zk", zkaok_protocol(ZkaokParams::micro(4))).unwrap());
    let r = run_execution(&ExecutionConfig::new(composed, unit(), unit(), 11)).unwrap();
    assert!(!r.output(Role::B).is_bot());
    assert!(r.transcript.children_contiguous(ROOT_SESSION));
    assert!(r.transcript.children_contiguous("main/zk#0"));
    let sessions = r.transcript.sessions();
    assert!(sessions.iter().any(|s| s == "main/zk#1/zk2#0"));
}

#[test]
fn concurrent_slot_calls_are_a_composition_error() {
    let proto = coinflip_protocol(CoinflipParams::hybrid(4));
    let greedy = program(|ctx, _| async move {
        let (x, w) = qsproto::protocols::demo_statement(3);
        let input = Payload::encode(&ZkProverInput::new(x, w));
        let wait = Payload::encode(&ZkVerifierInput::new(RelationId::Hc));
        // The verifier side blocks on the functionality; start another call meanwhile.
        let mut first = Box::pin(ctx.call("zk", Role::B, wait));
        std::future::poll_fn(|cx| {
            let _ = first.as_mut().poll(cx);
            Poll::Ready(())
        })
        .await;
        drop(first);
        ctx.call("zk", Role::A, input).await
    });
    let r = run_execution(&ExecutionConfig::new(proto, unit(), unit(), 0).corrupt(Corruption::malicious(Role::A, greedy))).unwrap();
    assert!(r.transcript.events.iter().any(|e| matches!(e, Event::Fault { detail } if detail.contains("concurrent"))));
}

#[test]
fn transcript_json_has_type_tags_and_hex_payloads() {
    let cfg = ExecutionConfig::new(echo_protocol(), Payload(vec![0xab, 0x01]), Payload::default(), 0);
    let json = run_execution(&cfg).unwrap().transcript.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let events = v["events"].as_array().unwrap();
    let msg = events.iter().find(|e| e["type"] == "message").unwrap();
    assert_eq!(msg["payload"], "ab01");
    assert_eq!(msg["round"], 0);
}

#[test]
fn black_box_rewind_replays_to_the_same_state() {
    let proto = coinflip_protocol(CoinflipParams::hybrid(4));
    let mut bb = BlackBox::new(proto.program(Role::A).clone(), Role::A, proto.clone(), unit(), TapeSource::Seed([1; 32]));
    assert!(bb.next_out().is_none());
    let coins = Bits::zeros(48);
    bb.send(ROOT_SESSION, &coins);
    let cp = bb.checkpoint();
    let c1: Bits = bb.expect_msg(ROOT_SESSION).unwrap();
    assert!(bb.next_out().is_some());
    bb.rewind(cp);
    let c2: Bits = bb.expect_msg(ROOT_SESSION).unwrap();
    assert_eq!(c1, c2);
    assert!(bb.output().is_none());
}
