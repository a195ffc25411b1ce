//! Adversaries that report their view. Wrapping a program makes its output
//! the pair (original output, everything it received), which is the usual
//! way to compare real and ideal executions through outputs alone.

use super::{Event, Output, PartyCtx, PartyIo, Payload, Program, Role};
use crate::functionalities::FunctionalityKind;
use crate::tape::Tape;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::rc::Rc;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ViewItem {
    pub session: String,
    /// From a functionality rather than the other party.
    pub from_functionality: bool,
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DumpedView {
    pub output: Output,
    pub received: Vec<ViewItem>,
}

impl DumpedView {
    /// Payloads received in `session` from the other party, in order.
    pub fn messages_in<'a>(&'a self, session: &'a str) -> impl Iterator<Item = &'a Payload> + 'a {
        self.received.iter().filter(move |i| !i.from_functionality && i.session == session).map(|i| &i.payload)
    }
}

struct LoggingIo {
    inner: Rc<dyn PartyIo>,
    log: RefCell<Vec<ViewItem>>,
}

impl LoggingIo {
    fn push(&self, session: &str, from_functionality: bool, p: &Option<Vec<u8>>) {
        if let Some(p) = p {
            self.log.borrow_mut().push(ViewItem {
                session: session.to_string(),
                from_functionality,
                payload: Payload(p.clone()),
            });
        }
    }
}

impl PartyIo for LoggingIo {
    fn party(&self) -> Role {
        self.inner.party()
    }

    fn send(&self, session: &str, payload: Vec<u8>) {
        self.inner.send(session, payload)
    }

    fn try_recv(&self, session: &str) -> Option<Vec<u8>> {
        let p = self.inner.try_recv(session);
        self.push(session, false, &p);
        p
    }

    fn f_send(&self, session: &str, kind: FunctionalityKind, role: Role, payload: Vec<u8>) {
        self.inner.f_send(session, kind, role, payload)
    }

    fn try_f_recv(&self, session: &str) -> Option<Vec<u8>> {
        let p = self.inner.try_f_recv(session);
        self.push(session, true, &p);
        p
    }

    fn tape_for(&self, session: &str) -> Tape {
        self.inner.tape_for(session)
    }

    fn record(&self, event: Event) {
        self.inner.record(event)
    }
}

/// Runs `program` unchanged and outputs a [`DumpedView`]. Randomness is the
/// same as the unwrapped program's. An abort inside still yields a view.
pub fn view_dumping(program: Program) -> Program {
    super::program(move |ctx: PartyCtx, input| {
        let program = program.clone();
        async move {
            let io = Rc::new(LoggingIo { inner: ctx.io(), log: RefCell::new(Vec::new()) });
            let inner = PartyCtx::new(io.clone(), ctx.session().to_string(), ctx.role(), ctx.protocol().clone());
            let output = program(inner, input).await;
            let received = io.log.borrow().clone();
            Output::value(&DumpedView { output, received })
        }
    })
}
