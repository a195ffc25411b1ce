use super::{Event, Output, Payload, Protocol, Role};
use crate::bits::Bits;
use crate::functionalities::FunctionalityKind;
use crate::tape::Tape;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::future::poll_fn;
use std::rc::Rc;
use std::sync::Arc;
use std::task::Poll;

/// Where a party's messages go. The engine implements it for honest and
/// corrupted parties; [`super::BlackBox`] implements it for an adversary
/// driven by a simulator.
pub trait PartyIo {
    /// The physical party served.
    fn party(&self) -> Role;
    /// To the other physical party, in `session`.
    fn send(&self, session: &str, payload: Vec<u8>);
    fn try_recv(&self, session: &str) -> Option<Vec<u8>>;
    /// To the functionality at `session`, acting as its `role` party.
    fn f_send(&self, session: &str, kind: FunctionalityKind, role: Role, payload: Vec<u8>);
    fn try_f_recv(&self, session: &str) -> Option<Vec<u8>>;
    /// Randomness for this party in `session`.
    fn tape_for(&self, session: &str) -> Tape;
    fn record(&self, event: Event);
}

/// A party's handle inside one session. Cloning shares state.
#[derive(Clone)]
pub struct PartyCtx {
    inner: Rc<CtxInner>,
}

struct CtxInner {
    io: Rc<dyn PartyIo>,
    session: String,
    role: Role,
    protocol: Arc<Protocol>,
    tape: RefCell<Tape>,
    calls: RefCell<BTreeMap<String, usize>>,
    busy: Cell<bool>,
}

impl PartyCtx {
    pub fn new(io: Rc<dyn PartyIo>, session: String, role: Role, protocol: Arc<Protocol>) -> Self {
        let tape = RefCell::new(io.tape_for(&session));
        PartyCtx {
            inner: Rc::new(CtxInner {
                io,
                session,
                role,
                protocol,
                tape,
                calls: RefCell::new(BTreeMap::new()),
                busy: Cell::new(false),
            }),
        }
    }

    /// Role inside the current session.
    pub fn role(&self) -> Role {
        self.inner.role
    }

    pub fn party(&self) -> Role {
        self.inner.io.party()
    }

    pub fn session(&self) -> &str {
        &self.inner.session
    }

    pub fn protocol(&self) -> &Arc<Protocol> {
        &self.inner.protocol
    }

    pub fn bits(&self, len: usize) -> Bits {
        self.inner.tape.borrow_mut().bits(len)
    }

    pub(crate) fn io(&self) -> Rc<dyn PartyIo> {
        self.inner.io.clone()
    }

    pub fn with_tape<R>(&self, f: impl FnOnce(&mut Tape) -> R) -> R {
        f(&mut self.inner.tape.borrow_mut())
    }

    pub fn send<T: Serialize>(&self, msg: &T) {
        self.send_raw(Payload::encode(msg).0);
    }

    pub fn send_raw(&self, payload: Vec<u8>) {
        self.inner.io.send(&self.inner.session, payload);
    }

    /// Suspends until a message arrives in this session.
    pub async fn recv_raw(&self) -> Vec<u8> {
        poll_fn(|_| match self.inner.io.try_recv(&self.inner.session) {
            Some(p) => Poll::Ready(p),
            None => Poll::Pending,
        })
        .await
    }

    /// `None` if the next message does not decode as `T`.
    pub async fn recv<T: DeserializeOwned>(&self) -> Option<T> {
        Payload(self.recv_raw().await).decode()
    }

    fn kind(&self) -> FunctionalityKind {
        self.inner
            .protocol
            .functionality
            .expect("functionality access from a protocol without one")
    }

    pub fn f_send<T: Serialize>(&self, msg: &T) {
        let kind = self.kind();
        self.inner.io.f_send(&self.inner.session, kind, self.inner.role, Payload::encode(msg).0);
    }

    pub async fn f_recv<T: DeserializeOwned>(&self) -> Option<T> {
        let p = poll_fn(|_| match self.inner.io.try_f_recv(&self.inner.session) {
            Some(p) => Poll::Ready(p),
            None => Poll::Pending,
        })
        .await;
        Payload(p).decode()
    }

    pub fn note(&self, text: impl Into<String>) {
        self.inner.io.record(Event::Note {
            session: self.inner.session.clone(),
            party: Some(self.party()),
            text: text.into(),
        });
    }

    /// Records an abort and yields the abort output.
    pub fn abort(&self, reason: impl Into<String>) -> Output {
        self.inner.io.record(Event::Abort {
            session: self.inner.session.clone(),
            party: self.party(),
            reason: reason.into(),
        });
        Output::Bot
    }

    /// Runs whatever is bound to `slot`, playing `as_role` in it, and resumes
    /// with its output. Only one call per party may be in progress.
    pub async fn call(&self, slot: &str, as_role: Role, input: Payload) -> Output {
        let Some(binding) = self.inner.protocol.slots.get(slot).map(|s| s.binding.clone()) else {
            self.inner.io.record(Event::Fault { detail: format!("call to undeclared slot {slot:?}") });
            return self.abort("composition error");
        };
        if self.inner.busy.replace(true) {
            self.inner.io.record(Event::Fault { detail: format!("concurrent call to slot {slot:?}") });
            return self.abort("composition error");
        }
        let idx = {
            let mut calls = self.inner.calls.borrow_mut();
            let c = calls.entry(slot.to_string()).or_insert(0);
            *c += 1;
            *c - 1
        };
        let session = format!("{}/{slot}#{idx}", self.inner.session);
        self.inner.io.record(Event::Enter {
            session: session.clone(),
            party: self.party(),
            role: as_role,
            protocol: binding.name.clone(),
        });
        let child = PartyCtx::new(self.inner.io.clone(), session.clone(), as_role, binding.clone());
        let out = (binding.program(as_role))(child, input).await;
        self.inner.io.record(Event::Exit { session, party: self.party(), output: out.clone() });
        self.inner.busy.set(false);
        out
    }
}
