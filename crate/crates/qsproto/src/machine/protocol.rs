use super::{MachineError, Output, PartyCtx, Payload, Role};
use crate::functionalities::FunctionalityKind;
use std::collections::BTreeMap;
use std::fmt;
use std::future::Future;
use std::pin::Pin;
use std::sync::Arc;

pub type PartyFuture = Pin<Box<dyn Future<Output = Output>>>;

/// A round program: given its context and input, a future yielding the
/// party's output. Programs are shareable across threads; the futures they
/// build are confined to one execution.
pub type Program = Arc<dyn Fn(PartyCtx, Payload) -> PartyFuture + Send + Sync>;

pub fn program<F, Fut>(f: F) -> Program
where
    F: Fn(PartyCtx, Payload) -> Fut + Send + Sync + 'static,
    Fut: Future<Output = Output> + 'static,
{
    Arc::new(move |ctx, input| Box::pin(f(ctx, input)))
}

/// A subroutine slot: the functionality it stands for and what is bound to it.
#[derive(Clone)]
pub struct Slot {
    pub kind: FunctionalityKind,
    pub binding: Arc<Protocol>,
}

#[derive(Clone)]
pub struct Protocol {
    pub name: String,
    pub programs: [Program; 2],
    /// Set on protocols usable in a slot of this kind.
    pub realizes: Option<FunctionalityKind>,
    /// Set on ideal protocols: the functionality living at their session.
    pub functionality: Option<FunctionalityKind>,
    pub slots: BTreeMap<String, Slot>,
    /// Refuses malicious executions.
    pub semi_honest_only: bool,
}

impl Protocol {
    pub fn new(name: impl Into<String>, a: Program, b: Program) -> Self {
        Protocol {
            name: name.into(),
            programs: [a, b],
            realizes: None,
            functionality: None,
            slots: BTreeMap::new(),
            semi_honest_only: false,
        }
    }

    pub fn realizing(mut self, kind: FunctionalityKind) -> Self {
        self.realizes = Some(kind);
        self
    }

    /// Declares a slot, initially bound to the ideal protocol of `kind`.
    pub fn with_slot(mut self, name: &str, kind: FunctionalityKind) -> Self {
        self.slots.insert(name.to_string(), Slot { kind, binding: crate::functionalities::ideal_protocol(kind) });
        self
    }

    pub fn semi_honest_only(mut self) -> Self {
        self.semi_honest_only = true;
        self
    }

    pub fn program(&self, role: Role) -> &Program {
        &self.programs[role.index()]
    }

    /// Nested slot bindings, outermost first, as `slot=protocol` lines.
    pub fn structure(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk("", &mut out);
        out
    }

    fn walk(&self, prefix: &str, out: &mut Vec<String>) {
        for (name, slot) in &self.slots {
            let path = format!("{prefix}{name}");
            out.push(format!("{path}={}", slot.binding.name));
            slot.binding.walk(&format!("{path}/"), out);
        }
    }
}

impl fmt::Debug for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Protocol")
            .field("name", &self.name)
            .field("realizes", &self.realizes)
            .field("slots", &self.structure())
            .finish_non_exhaustive()
    }
}

/// Replaces every invocation of `slot` in `outer` by a run of `inner`. The
/// name is kept; bindings show in [`Protocol::structure`].
pub fn compose(outer: &Protocol, slot: &str, inner: Arc<Protocol>) -> Result<Protocol, MachineError> {
    let declared = outer.slots.get(slot).ok_or_else(|| MachineError::UndeclaredSlot(slot.to_string()))?;
    if inner.realizes != Some(declared.kind) {
        return Err(MachineError::SlotKind {
            slot: slot.to_string(),
            expected: declared.kind.to_string(),
            got: inner.realizes.map_or_else(|| "non-realizing".to_string(), |k| k.to_string()),
        });
    }
    let mut out = outer.clone();
    out.slots.insert(slot.to_string(), Slot { kind: declared.kind, binding: inner });
    Ok(out)
}
