use qsproto::bits::Bits;
use qsproto::functionalities::{OtInput, ZkProverInput, ZkVerifierInput};
use qsproto::machine::{run_execution, Corruption, ExecutionConfig, Output, Payload, Role, ROOT_SESSION};
use qsproto::npreduce::{check_relation, RelationId, RelationStatement};
use qsproto::primitives::{prg_expand_bits, LweParams};
use qsproto::protocols::zkaok::{cheating_prover_program, pk_from_transcript};
use qsproto::protocols::*;
use qsproto::tape::Tape;

fn zk_inputs(x: &RelationStatement, w: &Bits) -> (Payload, Payload) {
    (
        Payload::encode(&ZkProverInput::new(x.clone(), w.clone())),
        Payload::encode(&ZkVerifierInput::new(x.relation_id())),
    )
}

fn run_zkaok(p: ZkaokParams, x: &RelationStatement, w: &Bits, seed: u64) -> qsproto::machine::ExecutionResult {
    let (a, b) = zk_inputs(x, w);
    run_execution(&ExecutionConfig::new(zkaok_protocol(p), a, b, seed)).unwrap()
}

#[test]
fn zkaok_hybrid_honest_run_outputs_x_and_pk_is_a_xor_b() {
    let (x, w) = demo_statement(5);
    let p = ZkaokParams::hybrid(16);
    let r = run_zkaok(p, &x, &w, 1);
    assert_eq!(r.output(Role::B).decode::<RelationStatement>(), Some(x.clone()));
    let pk = pk_from_transcript(&r.transcript, &p).unwrap();
    assert_eq!(pk.raw.len(), p.lwe.pk_bits());
    // The proved L2 statement carries the same key.
    let msgs: Vec<_> = r.transcript.messages_in(ROOT_SESSION).collect();
    assert_eq!(msgs.len(), 5);
}

#[test]
fn zkaok_micro_honest_run_accepts() {
    let (x, w) = demo_statement(3);
    let r = run_zkaok(ZkaokParams::micro(4), &x, &w, 2);
    assert_eq!(r.output(Role::B).decode::<RelationStatement>(), Some(x));
    assert!(!r.transcript.aborted());
}

#[test]
fn zkaok_prover_without_witness_refuses() {
    let (x, w) = demo_statement(5);
    let mut bad = w.clone();
    bad.set(0, !bad.get(0));
    assert!(!check_relation(&x, &bad));
    let r = run_zkaok(ZkaokParams::hybrid(8), &x, &bad, 3);
    assert!(r.output(Role::A).is_bot());
    assert!(r.output(Role::B).is_bot());
    assert_eq!(r.transcript.message_count(), 0);
}

#[test]
fn zkaok_non_witness_rejected_in_both_modes() {
    let (x, w) = demo_statement(3);
    let mut bad = w.clone();
    bad.set(1, !bad.get(1));
    for p in [ZkaokParams::hybrid(4), ZkaokParams::micro(4)] {
        let (a, b) = zk_inputs(&x, &bad);
        let cfg = ExecutionConfig::new(zkaok_protocol(p), a, b, 4)
            .corrupt(Corruption::malicious(Role::A, cheating_prover_program(p)));
        let r = run_execution(&cfg).unwrap();
        assert!(r.output(Role::B).is_bot(), "{:?}", p.mode);
    }
}

#[test]
fn zkaok_hybrid_and_micro_agree_on_decisions() {
    let (x, w) = demo_statement(3);
    let mut bad = w.clone();
    bad.set(2, !bad.get(2));
    for seed in 0..3 {
        for wit in [&w, &bad] {
            let decide = |p: ZkaokParams| {
                let (a, b) = zk_inputs(&x, wit);
                let cfg = ExecutionConfig::new(zkaok_protocol(p), a, b, seed)
                    .corrupt(Corruption::malicious(Role::A, cheating_prover_program(p)));
                !run_execution(&cfg).unwrap().output(Role::B).is_bot()
            };
            let mut hybrid = ZkaokParams::hybrid(4);
            hybrid.lwe = LweParams::micro();
            assert_eq!(decide(hybrid), decide(ZkaokParams::micro(4)));
        }
    }
}

fn run_cf(p: CoinflipParams, seed: u64) -> qsproto::machine::ExecutionResult {
    run_execution(&ExecutionConfig::new(coinflip_protocol(p), Payload::encode(&()), Payload::encode(&()), seed)).unwrap()
}

#[test]
fn coinflip_outcome_is_a_xor_b() {
    for (p, seed) in [(CoinflipParams::hybrid(16), 5), (CoinflipParams::micro(4), 6)] {
        let r = run_cf(p, seed);
        let o = coinflip_outcome_from_transcript(&r.transcript).unwrap();
        assert_eq!(o.s, Some(o.a.xor(&o.b)));
        assert_eq!(r.output(Role::A), r.output(Role::B));
    }
}

#[test]
fn coinflip_xor_examples() {
    let (a, b) = (Bits::from_bools(&[true, false, true, false]), Bits::from_bools(&[false, true, true, false]));
    assert_eq!(a.xor(&b), Bits::from_bools(&[true, true, false, false]));
    assert!(a.xor(&a).is_zero());
}

#[test]
fn zkcf_coin_split_lengths() {
    let p = ZkcfParams::micro(4);
    let s = Bits::zeros(p.coin_len());
    let (pk, s2) = p.split(&s).unwrap();
    assert_eq!(pk.raw.len(), p.lwe.pk_bits());
    assert_eq!(s2.len(), 12);
    assert!(p.split(&Bits::zeros(p.coin_len() - 1)).is_none());
}

#[test]
fn zkcf_honest_runs_accept() {
    for (p, v) in [(ZkcfParams::hybrid(64), 5), (ZkcfParams::micro(4), 3)] {
        let (x, w) = demo_statement(v);
        let (a, b) = zk_inputs(&x, &w);
        let r = run_execution(&ExecutionConfig::new(zk_from_cf_protocol(p), a, b, 7)).unwrap();
        assert_eq!(r.output(Role::B).decode::<RelationStatement>(), Some(x), "{:?}", p.mode);
    }
}

#[test]
fn zkcf_uniform_s2_has_no_generator_preimage() {
    let n = 4;
    let images: std::collections::BTreeSet<Bits> =
        (0..1u64 << n).map(|s| prg_expand_bits(&Bits::from_u64(s, n), n).unwrap()).collect();
    let mut t = Tape::from_seed([9; 32]);
    let hits = (0..100).filter(|_| images.contains(&t.bits(3 * n))).count();
    assert!(hits <= 2, "{hits}");
}

fn run_ot(lwe: LweParams, s0: &Bits, s1: &Bits, c: bool, seed: u64) -> Output {
    let p = OtParams { lwe };
    let a = Payload::encode(&OtInput { s0: s0.clone(), s1: s1.clone() });
    let r = run_execution(&ExecutionConfig::new(ot_semi_honest_protocol(p), a, Payload::encode(&c), seed)).unwrap();
    r.output(Role::B).clone()
}

#[test]
fn ot_bit_table_is_exact() {
    for bits in 0..8u64 {
        let (s0, s1, c) = (Bits::from_u64(bits & 1, 1), Bits::from_u64((bits >> 1) & 1, 1), bits & 4 != 0);
        let want = if c { &s1 } else { &s0 };
        assert_eq!(run_ot(LweParams::toy(), &s0, &s1, c, bits).decode::<Bits>().as_ref(), Some(want));
    }
}

#[test]
fn ot_receiver_messages_have_one_format() {
    let p = OtParams::default();
    let s = Bits::zeros(4);
    let lens: Vec<_> = [false, true]
        .iter()
        .map(|&c| {
            let a = Payload::encode(&OtInput { s0: s.clone(), s1: s.clone() });
            let r = run_execution(&ExecutionConfig::new(ot_semi_honest_protocol(p), a, Payload::encode(&c), 1)).unwrap();
            let (_, m) = r.transcript.messages_in(ROOT_SESSION).next().unwrap();
            let (k0, k1): (Bits, Bits) = m.decode().unwrap();
            (m.0.len(), k0.len(), k1.len())
        })
        .collect();
    assert_eq!(lens[0], lens[1]);
    assert_eq!(lens[0].1, lens[0].2);
}

#[test]
fn ot_rejects_malicious_style() {
    let p = OtParams::default();
    let a = Payload::encode(&OtInput { s0: Bits::zeros(1), s1: Bits::zeros(1) });
    let prog = ot_semi_honest_protocol(p).program(Role::A).clone();
    let cfg = ExecutionConfig::new(ot_semi_honest_protocol(p), a, Payload::encode(&false), 1)
        .corrupt(Corruption::malicious(Role::A, prog));
    assert!(run_execution(&cfg).is_err());
}

#[test]
fn echo_and_statement_helpers() {
    let r = run_execution(&ExecutionConfig::new(echo_protocol(), Payload(vec![1, 2]), Payload(vec![]), 0)).unwrap();
    assert_eq!(r.output(Role::B), &Output::Value(Payload(vec![1, 2])));
    for v in [3, 5, 8] {
        let (x, w) = demo_statement(v);
        assert!(check_relation(&x, &w));
        assert_eq!(x.relation_id(), RelationId::Hc);
    }
}
