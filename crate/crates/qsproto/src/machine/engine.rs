use super::{
    Direction, Event, MachineError, Output, PartyCtx, PartyFuture, PartyIo, Payload, Program, Protocol, Role,
    Transcript, ROOT_SESSION,
};
use crate::functionalities::{new_session, Functionality, FunctionalityKind};
use crate::tape::{derive_seed, Tape, TapeSource};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::rc::Rc;
use std::sync::Arc;
use std::task::{Context, Poll, Waker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionStyle {
    /// Runs the honest program; the adversary reads the view afterwards.
    #[default]
    SemiHonest,
    /// The adversary may substitute the program.
    Malicious,
}

/// Static corruption: fixed before the first activation.
#[derive(Clone, Default)]
pub struct Corruption {
    pub style: CorruptionStyle,
    /// Corrupted parties, with the substituted program if any.
    pub parties: BTreeMap<Role, Option<Program>>,
}

impl Corruption {
    pub fn none() -> Self {
        Corruption::default()
    }

    pub fn semi_honest(party: Role) -> Self {
        Corruption { style: CorruptionStyle::SemiHonest, parties: BTreeMap::from([(party, None)]) }
    }

    pub fn malicious(party: Role, program: Program) -> Self {
        Corruption { style: CorruptionStyle::Malicious, parties: BTreeMap::from([(party, Some(program))]) }
    }

    pub fn is_corrupted(&self, party: Role) -> bool {
        self.parties.contains_key(&party)
    }
}

/// How the adversary picks the next message among those in flight, listed
/// in send order.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerSpec {
    #[default]
    Fifo,
    Lifo,
    Random(u64),
    /// Explicit indices, then FIFO. An index past the end is a fault.
    Script(Vec<usize>),
}

#[derive(Clone)]
pub struct ExecutionConfig {
    pub protocol: Arc<Protocol>,
    pub inputs: [Payload; 2],
    pub seed: u64,
    /// Tape overrides: `"A"`/`"B"` replace a party's root-session tape,
    /// `"F:<session>"` a functionality's.
    pub tapes: BTreeMap<String, TapeSource>,
    pub corruption: Corruption,
    pub scheduler: SchedulerSpec,
}

impl ExecutionConfig {
    pub fn new(protocol: Arc<Protocol>, input_a: Payload, input_b: Payload, seed: u64) -> Self {
        ExecutionConfig {
            protocol,
            inputs: [input_a, input_b],
            seed,
            tapes: BTreeMap::new(),
            corruption: Corruption::none(),
            scheduler: SchedulerSpec::Fifo,
        }
    }

    pub fn corrupt(mut self, c: Corruption) -> Self {
        self.corruption = c;
        self
    }

    pub fn with_tape(mut self, key: impl Into<String>, src: TapeSource) -> Self {
        self.tapes.insert(key.into(), src);
        self
    }

    pub fn schedule(mut self, s: SchedulerSpec) -> Self {
        self.scheduler = s;
        self
    }

    fn party_tape_digest(&self, party: Role) -> [u8; 32] {
        match self.tapes.get(&party.to_string()) {
            Some(src) => src.digest(),
            None => derive_seed(&self.seed.to_le_bytes(), &format!("party/{party}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExecutionResult {
    pub outputs: [Output; 2],
    pub transcript: Transcript,
}

impl ExecutionResult {
    pub fn output(&self, party: Role) -> &Output {
        &self.outputs[party.index()]
    }
}

struct Envelope {
    session: String,
    from: Role,
    to: Role,
    round: u32,
    payload: Vec<u8>,
}

struct FuncState {
    machine: Box<dyn Functionality>,
    /// Physical party acting as each functionality role.
    parties: [Option<Role>; 2],
}

struct State {
    events: Vec<Event>,
    pending: VecDeque<Envelope>,
    inbox: HashMap<(String, Role), VecDeque<Vec<u8>>>,
    f_inbox: HashMap<(String, Role), VecDeque<Vec<u8>>>,
    funcs: HashMap<String, FuncState>,
    rounds: HashMap<(String, Role), u32>,
    version: u64,
    seed: u64,
    tapes: BTreeMap<String, TapeSource>,
    party_digest: [[u8; 32]; 2],
}

impl State {
    fn record(&mut self, e: Event) {
        self.events.push(e);
        self.version += 1;
    }

    fn f_input(&mut self, session: &str, kind: FunctionalityKind, party: Role, role: Role, payload: Vec<u8>) {
        self.record(Event::Functionality {
            session: session.to_string(),
            kind,
            party,
            direction: Direction::ToFunctionality,
            payload: Payload(payload.clone()),
        });
        if !self.funcs.contains_key(session) {
            let key = format!("F:{session}");
            let tape = match self.tapes.get(&key) {
                Some(src) => Tape::new(src),
                None => Tape::from_seed(derive_seed(&self.seed.to_le_bytes(), &format!("functionality/{session}"))),
            };
            self.funcs.insert(
                session.to_string(),
                FuncState { machine: new_session(kind, tape), parties: [None, None] },
            );
        }
        let f = self.funcs.get_mut(session).expect("inserted above");
        if f.machine.kind() != kind {
            let detail = format!("session {session} holds {} but was addressed as {kind}", f.machine.kind());
            self.record(Event::Fault { detail });
            return;
        }
        // The first caller's role fixes the mapping for both roles.
        if f.parties[role.index()].is_none() && f.parties[role.other().index()] != Some(party) {
            f.parties[role.index()] = Some(party);
            f.parties[role.other().index()].get_or_insert(party.other());
        }
        if f.parties[role.index()] != Some(party) {
            let detail = format!("party {party} claimed role {role} at {session}");
            self.record(Event::Fault { detail });
            return;
        }
        let step = f.machine.input(role, &payload);
        let parties = f.parties;
        match step {
            Ok(step) => {
                for text in step.notes {
                    self.record(Event::Note { session: session.to_string(), party: None, text });
                }
                for (to_role, out) in step.outputs {
                    let to = parties[to_role.index()].expect("both roles mapped");
                    self.record(Event::Functionality {
                        session: session.to_string(),
                        kind,
                        party: to,
                        direction: Direction::FromFunctionality,
                        payload: Payload(out.clone()),
                    });
                    self.f_inbox.entry((session.to_string(), to)).or_default().push_back(out);
                }
            }
            Err(e) => self.record(Event::Fault { detail: format!("{kind} session {session}: {e}") }),
        }
    }
}

struct EngineIo {
    state: Rc<RefCell<State>>,
    party: Role,
}

impl PartyIo for EngineIo {
    fn party(&self) -> Role {
        self.party
    }

    fn send(&self, session: &str, payload: Vec<u8>) {
        let mut s = self.state.borrow_mut();
        let r = s.rounds.entry((session.to_string(), self.party)).or_insert(0);
        let round = *r;
        *r += 1;
        s.pending.push_back(Envelope {
            session: session.to_string(),
            from: self.party,
            to: self.party.other(),
            round,
            payload,
        });
        s.version += 1;
    }

    fn try_recv(&self, session: &str) -> Option<Vec<u8>> {
        self.state.borrow_mut().inbox.get_mut(&(session.to_string(), self.party))?.pop_front()
    }

    fn f_send(&self, session: &str, kind: FunctionalityKind, role: Role, payload: Vec<u8>) {
        self.state.borrow_mut().f_input(session, kind, self.party, role, payload);
    }

    fn try_f_recv(&self, session: &str) -> Option<Vec<u8>> {
        self.state.borrow_mut().f_inbox.get_mut(&(session.to_string(), self.party))?.pop_front()
    }

    fn tape_for(&self, session: &str) -> Tape {
        let s = self.state.borrow();
        if session == ROOT_SESSION {
            if let Some(src) = s.tapes.get(&self.party.to_string()) {
                return Tape::new(src);
            }
        }
        Tape::from_seed(derive_seed(&s.party_digest[self.party.index()], session))
    }

    fn record(&self, event: Event) {
        self.state.borrow_mut().record(event);
    }
}

struct Scheduler {
    spec: SchedulerSpec,
    step: usize,
    rng: ChaCha20Rng,
}

impl Scheduler {
    fn choose(&mut self, pending: usize) -> usize {
        let i = match &self.spec {
            SchedulerSpec::Fifo => 0,
            SchedulerSpec::Lifo => pending - 1,
            SchedulerSpec::Random(_) => self.rng.gen_range(0..pending),
            SchedulerSpec::Script(s) => s.get(self.step).copied().unwrap_or(0),
        };
        self.step += 1;
        i
    }
}

/// Runs one execution to completion. Deterministic in the configuration.
pub fn run_execution(config: &ExecutionConfig) -> Result<ExecutionResult, MachineError> {
    let c = &config.corruption;
    if config.protocol.semi_honest_only && c.style == CorruptionStyle::Malicious && !c.parties.is_empty() {
        return Err(MachineError::Config(format!("{} supports semi-honest corruption only", config.protocol.name)));
    }
    if c.style == CorruptionStyle::SemiHonest && c.parties.values().any(Option::is_some) {
        return Err(MachineError::Config("semi-honest parties run the honest program".into()));
    }
    let state = Rc::new(RefCell::new(State {
        events: Vec::new(),
        pending: VecDeque::new(),
        inbox: HashMap::new(),
        f_inbox: HashMap::new(),
        funcs: HashMap::new(),
        rounds: HashMap::new(),
        version: 0,
        seed: config.seed,
        tapes: config.tapes.clone(),
        party_digest: Role::BOTH.map(|p| config.party_tape_digest(p)),
    }));
    for &party in c.parties.keys() {
        state.borrow_mut().record(Event::Corrupt { party, style: c.style });
    }
    let mut futures: [Option<PartyFuture>; 2] = Role::BOTH.map(|party| {
        let program = match c.parties.get(&party) {
            Some(Some(p)) => p.clone(),
            _ => config.protocol.program(party).clone(),
        };
        let io: Rc<dyn PartyIo> = Rc::new(EngineIo { state: state.clone(), party });
        state.borrow_mut().record(Event::Enter {
            session: ROOT_SESSION.to_string(),
            party,
            role: party,
            protocol: config.protocol.name.clone(),
        });
        let ctx = PartyCtx::new(io, ROOT_SESSION.to_string(), party, config.protocol.clone());
        Some(program(ctx, config.inputs[party.index()].clone()))
    });
    let mut outputs: [Option<Output>; 2] = [None, None];
    let mut scheduler = Scheduler {
        rng: ChaCha20Rng::seed_from_u64(match config.scheduler {
            SchedulerSpec::Random(s) => s,
            _ => 0,
        }),
        spec: config.scheduler.clone(),
        step: 0,
    };
    let mut cx = Context::from_waker(Waker::noop());
    loop {
        loop {
            let before = state.borrow().version;
            for party in Role::BOTH {
                let Some(fut) = futures[party.index()].as_mut() else { continue };
                let out = match catch_unwind(AssertUnwindSafe(|| fut.as_mut().poll(&mut cx))) {
                    Ok(Poll::Pending) => continue,
                    Ok(Poll::Ready(out)) => out,
                    Err(panic) => {
                        let reason = panic
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_else(|| "panic".into());
                        state.borrow_mut().record(Event::Abort {
                            session: ROOT_SESSION.to_string(),
                            party,
                            reason: format!("program fault: {reason}"),
                        });
                        Output::Bot
                    }
                };
                futures[party.index()] = None;
                state.borrow_mut().record(Event::Output { party, output: out.clone() });
                outputs[party.index()] = Some(out);
            }
            if state.borrow().version == before {
                break;
            }
        }
        if outputs.iter().all(Option::is_some) {
            break;
        }
        let mut s = state.borrow_mut();
        if s.pending.is_empty() {
            break;
        }
        let i = scheduler.choose(s.pending.len());
        let Some(env) = s.pending.remove(i) else {
            let detail = format!("scheduler chose message {i} of {}", s.pending.len());
            s.record(Event::Fault { detail });
            break;
        };
        s.record(Event::Message {
            session: env.session.clone(),
            from: env.from,
            to: env.to,
            round: env.round,
            payload: Payload(env.payload.clone()),
        });
        s.inbox.entry((env.session, env.to)).or_default().push_back(env.payload);
    }
    // Dropping suspended programs first releases their handles on the state.
    drop(futures);
    let mut s = state.borrow_mut();
    for party in Role::BOTH {
        if outputs[party.index()].is_none() {
            s.record(Event::Abort { session: ROOT_SESSION.to_string(), party, reason: "stalled".into() });
            s.record(Event::Output { party, output: Output::Bot });
            outputs[party.index()] = Some(Output::Bot);
        }
    }
    let events = std::mem::take(&mut s.events);
    Ok(ExecutionResult {
        outputs: outputs.map(|o| o.expect("filled above")),
        transcript: Transcript { protocol: config.protocol.name.clone(), seed: config.seed, events },
    })
}

/// What the adversary holds for a corrupted party once the execution ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyView {
    pub party: Role,
    pub style: CorruptionStyle,
    /// Malicious corruption hands over control, not just a copy.
    pub controlled: bool,
    pub input: Payload,
    pub tape_digest: String,
    /// Messages and functionality outputs delivered to the party.
    pub received: Vec<Event>,
    pub sent: Vec<Event>,
    pub output: Output,
}

pub fn corrupt_view(config: &ExecutionConfig, result: &ExecutionResult, party: Role) -> Result<PartyView, MachineError> {
    if !config.corruption.is_corrupted(party) {
        return Err(MachineError::NotCorrupted(party));
    }
    let events = &result.transcript.events;
    let received = events
        .iter()
        .filter(|e| match e {
            Event::Message { to, .. } => *to == party,
            Event::Functionality { party: p, direction, .. } => *p == party && *direction == Direction::FromFunctionality,
            _ => false,
        })
        .cloned()
        .collect();
    let sent = events
        .iter()
        .filter(|e| match e {
            Event::Message { from, .. } => *from == party,
            Event::Functionality { party: p, direction, .. } => *p == party && *direction == Direction::ToFunctionality,
            _ => false,
        })
        .cloned()
        .collect();
    Ok(PartyView {
        party,
        style: config.corruption.style,
        controlled: config.corruption.style == CorruptionStyle::Malicious,
        input: config.inputs[party.index()].clone(),
        tape_digest: hex::encode(config.party_tape_digest(party)),
        received,
        sent,
        output: result.output(party).clone(),
    })
}
