//! Coin flipping with abort: after both parties ask for `n` coins, `A` sees
//! the coins and decides whether `B` gets them or the abort symbol.

use super::{decode, Functionality, FunctionalityError, FunctionalityKind, Step};
use crate::bits::Bits;
use crate::machine::{program, Output, Program, Role};
use crate::tape::Tape;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CfIn {
    Request { n: usize },
    Decide { accept: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CfOut {
    Coins(Bits),
    Bot,
}

pub struct FCf {
    tape: Tape,
    requests: [Option<usize>; 2],
    coins: Option<Bits>,
    decided: bool,
}

impl FCf {
    pub fn new(tape: Tape) -> Self {
        FCf { tape, requests: [None, None], coins: None, decided: false }
    }
}

impl Functionality for FCf {
    fn kind(&self) -> FunctionalityKind {
        FunctionalityKind::Cf
    }

    fn phase(&self) -> &'static str {
        match (&self.coins, self.decided) {
            (None, _) => "collecting",
            (Some(_), false) => "awaiting-decision",
            (Some(_), true) => "decided",
        }
    }

    fn input(&mut self, from: Role, payload: &[u8]) -> Result<Step, FunctionalityError> {
        Ok(match decode::<CfIn>(from, payload)? {
            CfIn::Request { .. } if self.requests[from.index()].is_some() => Step::ignored("repeated request"),
            CfIn::Request { n } => {
                self.requests[from.index()] = Some(n);
                match self.requests {
                    [Some(a), Some(b)] if a != b => return Err(FunctionalityError::LengthMismatch(a, b)),
                    [Some(n), Some(_)] => {
                        let r = self.tape.bits(n);
                        self.coins = Some(r.clone());
                        Step::to(Role::A, &CfOut::Coins(r))
                    }
                    _ => Step::nothing(),
                }
            }
            CfIn::Decide { .. } if from != Role::A => Step::ignored("decision from B"),
            CfIn::Decide { .. } if self.coins.is_none() => Step::ignored("decision before coins"),
            CfIn::Decide { .. } if self.decided => Step::ignored("repeated decision"),
            CfIn::Decide { accept } => {
                self.decided = true;
                let r = self.coins.clone().expect("checked above");
                Step::to(Role::B, &if accept { CfOut::Coins(r) } else { CfOut::Bot })
            }
        })
    }
}

/// Both parties' input: the coin count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfInput {
    pub n: usize,
}

/// The dummy `A` always accepts. Both output the coins.
pub fn cf_dummy() -> [Program; 2] {
    let a = program(|ctx, input| async move {
        let Some(CfInput { n }) = input.decode() else { return ctx.abort("malformed input") };
        ctx.f_send(&CfIn::Request { n });
        match ctx.f_recv().await {
            Some(CfOut::Coins(r)) => {
                ctx.f_send(&CfIn::Decide { accept: true });
                Output::value(&r)
            }
            _ => ctx.abort("unexpected output"),
        }
    });
    let b = program(|ctx, input| async move {
        let Some(CfInput { n }) = input.decode() else { return ctx.abort("malformed input") };
        ctx.f_send(&CfIn::Request { n });
        match ctx.f_recv().await {
            Some(CfOut::Coins(r)) => Output::value(&r),
            _ => ctx.abort("coin flip aborted"),
        }
    });
    [a, b]
}
