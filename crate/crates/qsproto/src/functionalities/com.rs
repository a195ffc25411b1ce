//! Commitment to a bit string: `B` learns that something of a given length
//! was committed, and the value only on opening.

use super::{decode, Functionality, FunctionalityError, FunctionalityKind, Step};
use crate::bits::Bits;
use crate::machine::{program, Output, Program, Role};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComIn {
    Commit(Bits),
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComOut {
    Committed { len: usize },
    Opened(Bits),
}

#[derive(Default)]
pub struct FCom {
    value: Option<Bits>,
    opened: bool,
}

impl Functionality for FCom {
    fn kind(&self) -> FunctionalityKind {
        FunctionalityKind::Com
    }

    fn phase(&self) -> &'static str {
        match (&self.value, self.opened) {
            (None, _) => "idle",
            (Some(_), false) => "committed",
            (Some(_), true) => "opened",
        }
    }

    fn input(&mut self, from: Role, payload: &[u8]) -> Result<Step, FunctionalityError> {
        let msg: ComIn = decode(from, payload)?;
        if from != Role::A {
            return Ok(Step::ignored("input from the receiver"));
        }
        Ok(match msg {
            ComIn::Commit(_) if self.value.is_some() => Step::ignored("repeated commit"),
            ComIn::Commit(v) => {
                let step = Step::to(Role::B, &ComOut::Committed { len: v.len() });
                self.value = Some(v);
                step
            }
            ComIn::Open => match (&self.value, self.opened) {
                (None, _) => Step::ignored("open before commit"),
                (Some(_), true) => Step::ignored("repeated open"),
                (Some(v), false) => {
                    self.opened = true;
                    Step::to(Role::B, &ComOut::Opened(v.clone()))
                }
            },
        })
    }
}

/// Committer input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComInput {
    pub message: Bits,
    pub open: bool,
}

/// Receiver output; the receiver's input says whether to wait for an opening.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComResult {
    pub len: usize,
    pub opened: Option<Bits>,
}

pub fn com_dummy() -> [Program; 2] {
    let a = program(|ctx, input| async move {
        let Some(inp) = input.decode::<ComInput>() else { return ctx.abort("malformed input") };
        ctx.f_send(&ComIn::Commit(inp.message));
        if inp.open {
            ctx.f_send(&ComIn::Open);
        }
        Output::unit()
    });
    let b = program(|ctx, input| async move {
        let Some(wait_open) = input.decode::<bool>() else { return ctx.abort("malformed input") };
        let Some(ComOut::Committed { len }) = ctx.f_recv().await else { return ctx.abort("unexpected output") };
        if !wait_open {
            return Output::value(&ComResult { len, opened: None });
        }
        match ctx.f_recv().await {
            Some(ComOut::Opened(v)) => Output::value(&ComResult { len, opened: Some(v) }),
            _ => ctx.abort("unexpected output"),
        }
    });
    [a, b]
}
