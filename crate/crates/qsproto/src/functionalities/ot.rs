//! One-out-of-two transfer of bit strings: `B` receives `s_c`, `A` nothing.

use super::{decode, Functionality, FunctionalityError, FunctionalityKind, Step};
use crate::bits::Bits;
use crate::machine::{program, Output, Program, Role};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OtIn {
    Send { s0: Bits, s1: Bits },
    Choose(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OtOut {
    Received(Bits),
}

#[derive(Default)]
pub struct FOt {
    strings: Option<(Bits, Bits)>,
    choice: Option<bool>,
    done: bool,
}

impl FOt {
    fn try_finish(&mut self) -> Step {
        match (&self.strings, self.choice) {
            (Some((s0, s1)), Some(c)) if !self.done => {
                self.done = true;
                Step::to(Role::B, &OtOut::Received(if c { s1.clone() } else { s0.clone() }))
            }
            _ => Step::nothing(),
        }
    }
}

impl Functionality for FOt {
    fn kind(&self) -> FunctionalityKind {
        FunctionalityKind::Ot
    }

    fn phase(&self) -> &'static str {
        match (self.done, self.strings.is_some(), self.choice.is_some()) {
            (true, ..) => "delivered",
            (false, true, false) => "have-strings",
            (false, false, true) => "have-choice",
            _ => "idle",
        }
    }

    fn input(&mut self, from: Role, payload: &[u8]) -> Result<Step, FunctionalityError> {
        let msg: OtIn = decode(from, payload)?;
        Ok(match (from, msg) {
            (Role::A, OtIn::Send { .. }) if self.strings.is_some() => Step::ignored("repeated strings"),
            (Role::A, OtIn::Send { s0, s1 }) => {
                self.strings = Some((s0, s1));
                self.try_finish()
            }
            (Role::B, OtIn::Choose(_)) if self.choice.is_some() => Step::ignored("repeated choice"),
            (Role::B, OtIn::Choose(c)) => {
                self.choice = Some(c);
                self.try_finish()
            }
            (r, _) => Step::ignored(format!("out-of-role input from {r}")),
        })
    }
}

/// Sender input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtInput {
    pub s0: Bits,
    pub s1: Bits,
}

/// Sender input is [`OtInput`], receiver input the choice bit; the receiver
/// outputs `s_c`.
pub fn ot_dummy() -> [Program; 2] {
    let a = program(|ctx, input| async move {
        let Some(OtInput { s0, s1 }) = input.decode() else { return ctx.abort("malformed input") };
        ctx.f_send(&OtIn::Send { s0, s1 });
        Output::unit()
    });
    let b = program(|ctx, input| async move {
        let Some(c) = input.decode::<bool>() else { return ctx.abort("malformed input") };
        ctx.f_send(&OtIn::Choose(c));
        match ctx.f_recv().await {
            Some(OtOut::Received(s)) => Output::value(&s),
            None => ctx.abort("unexpected output"),
        }
    });
    [a, b]
}
