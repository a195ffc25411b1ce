use super::{Event, Output, PartyCtx, PartyFuture, PartyIo, Payload, Program, Protocol, Role, ROOT_SESSION};
use crate::functionalities::FunctionalityKind;
use crate::tape::{derive_seed, Tape, TapeSource};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::rc::Rc;
use std::sync::Arc;
use std::task::{Context, Poll, Waker};

/// Something the boxed adversary emitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxOut {
    Message { session: String, payload: Vec<u8> },
    Functionality { session: String, kind: FunctionalityKind, role: Role, payload: Vec<u8> },
}

#[derive(Clone, Debug)]
enum BoxIn {
    Message(String, Vec<u8>),
    Functionality(String, Vec<u8>),
}

/// Position to rewind to: inputs fed and outputs consumed so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    inputs: usize,
    taken: usize,
}

#[derive(Default)]
struct BoxState {
    inbox: HashMap<String, VecDeque<Vec<u8>>>,
    f_inbox: HashMap<String, VecDeque<Vec<u8>>>,
    outbox: VecDeque<BoxOut>,
    events: Vec<Event>,
}

struct BoxIo {
    state: Rc<RefCell<BoxState>>,
    party: Role,
    tape: TapeSource,
}

impl PartyIo for BoxIo {
    fn party(&self) -> Role {
        self.party
    }

    fn send(&self, session: &str, payload: Vec<u8>) {
        self.state.borrow_mut().outbox.push_back(BoxOut::Message { session: session.to_string(), payload });
    }

    fn try_recv(&self, session: &str) -> Option<Vec<u8>> {
        self.state.borrow_mut().inbox.get_mut(session)?.pop_front()
    }

    fn f_send(&self, session: &str, kind: FunctionalityKind, role: Role, payload: Vec<u8>) {
        self.state.borrow_mut().outbox.push_back(BoxOut::Functionality {
            session: session.to_string(),
            kind,
            role,
            payload,
        });
    }

    fn try_f_recv(&self, session: &str) -> Option<Vec<u8>> {
        self.state.borrow_mut().f_inbox.get_mut(session)?.pop_front()
    }

    fn tape_for(&self, session: &str) -> Tape {
        if session == ROOT_SESSION {
            Tape::new(&self.tape)
        } else {
            Tape::from_seed(derive_seed(&self.tape.digest(), session))
        }
    }

    fn record(&self, event: Event) {
        self.state.borrow_mut().events.push(event);
    }
}

struct Live {
    state: Rc<RefCell<BoxState>>,
    future: Option<PartyFuture>,
    output: Option<Output>,
}

/// An adversary program run under a simulator's control. The simulator sees
/// only what the program sends and decides what it receives; it may rewind
/// to a checkpoint, which replays the recorded inputs from scratch.
pub struct BlackBox {
    program: Program,
    party: Role,
    protocol: Arc<Protocol>,
    input: Payload,
    tape: TapeSource,
    log: Vec<BoxIn>,
    taken: usize,
    live: Live,
}

impl BlackBox {
    /// `protocol` supplies the slot bindings the program's calls resolve to.
    pub fn new(program: Program, party: Role, protocol: Arc<Protocol>, input: Payload, tape: TapeSource) -> Self {
        let live = Self::start(&program, party, &protocol, &input, &tape);
        let mut bb = BlackBox { program, party, protocol, input, tape, log: Vec::new(), taken: 0, live };
        bb.poll();
        bb
    }

    fn start(program: &Program, party: Role, protocol: &Arc<Protocol>, input: &Payload, tape: &TapeSource) -> Live {
        let state = Rc::new(RefCell::new(BoxState::default()));
        let io: Rc<dyn PartyIo> = Rc::new(BoxIo { state: state.clone(), party, tape: tape.clone() });
        let ctx = PartyCtx::new(io, ROOT_SESSION.to_string(), party, protocol.clone());
        Live { state, future: Some(program(ctx, input.clone())), output: None }
    }

    fn poll(&mut self) {
        let Some(fut) = self.live.future.as_mut() else { return };
        let mut cx = Context::from_waker(Waker::noop());
        match catch_unwind(AssertUnwindSafe(|| fut.as_mut().poll(&mut cx))) {
            Ok(Poll::Pending) => {}
            Ok(Poll::Ready(out)) => {
                self.live.future = None;
                self.live.output = Some(out);
            }
            Err(_) => {
                self.live.future = None;
                self.live.output = Some(Output::Bot);
            }
        }
    }

    fn feed(&mut self, input: &BoxIn) {
        {
            let mut s = self.live.state.borrow_mut();
            match input {
                BoxIn::Message(session, p) => s.inbox.entry(session.clone()).or_default().push_back(p.clone()),
                BoxIn::Functionality(session, p) => s.f_inbox.entry(session.clone()).or_default().push_back(p.clone()),
            }
        }
        self.poll();
    }

    pub fn party(&self) -> Role {
        self.party
    }

    /// Hands the program a message in `session` and runs it until it blocks.
    pub fn deliver(&mut self, session: &str, payload: Vec<u8>) {
        let input = BoxIn::Message(session.to_string(), payload);
        self.feed(&input);
        self.log.push(input);
    }

    pub fn send<T: Serialize>(&mut self, session: &str, msg: &T) {
        self.deliver(session, Payload::encode(msg).0);
    }

    /// Answers the program as the functionality at `session`.
    pub fn deliver_f<T: Serialize>(&mut self, session: &str, msg: &T) {
        let input = BoxIn::Functionality(session.to_string(), Payload::encode(msg).0);
        self.feed(&input);
        self.log.push(input);
    }

    pub fn next_out(&mut self) -> Option<BoxOut> {
        let out = self.live.state.borrow_mut().outbox.pop_front()?;
        self.taken += 1;
        Some(out)
    }

    /// The next output if it is a message in `session` decoding as `T`.
    pub fn expect_msg<T: DeserializeOwned>(&mut self, session: &str) -> Option<T> {
        match self.next_out()? {
            BoxOut::Message { session: s, payload } if s == session => Payload(payload).decode(),
            _ => None,
        }
    }

    /// The next output if it is a functionality input at `session`.
    pub fn expect_f<T: DeserializeOwned>(&mut self, session: &str) -> Option<T> {
        match self.next_out()? {
            BoxOut::Functionality { session: s, payload, .. } if s == session => Payload(payload).decode(),
            _ => None,
        }
    }

    pub fn output(&self) -> Option<&Output> {
        self.live.output.as_ref()
    }

    pub fn events(&self) -> Vec<Event> {
        self.live.state.borrow().events.clone()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { inputs: self.log.len(), taken: self.taken }
    }

    /// Restarts the program and replays inputs up to `cp`. The program is
    /// deterministic, so it lands in the same state with the same pending
    /// outputs.
    pub fn rewind(&mut self, cp: Checkpoint) {
        assert!(cp.inputs <= self.log.len(), "checkpoint from the future");
        self.live = Self::start(&self.program, self.party, &self.protocol, &self.input, &self.tape);
        self.poll();
        self.log.truncate(cp.inputs);
        for input in self.log.clone() {
            self.feed(&input);
        }
        self.taken = 0;
        for _ in 0..cp.taken {
            self.next_out();
        }
    }
}
