//! Zero knowledge: `A` hands over `(x, w)`; `B` receives `x` iff the pair is
//! in the relation, a rejection otherwise. `A` gets no acknowledgment.

use super::{decode, Functionality, FunctionalityError, FunctionalityKind, Step};
use crate::bits::Bits;
use crate::machine::{program, Output, Program, Role};
use crate::npreduce::{check_relation, RelationId, RelationStatement};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZkIn {
    Prove { relation: String, statement: RelationStatement, witness: Bits },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZkOut {
    Accept(RelationStatement),
    Reject,
}

#[derive(Default)]
pub struct FZk {
    done: bool,
    /// Acceptances and the relation checks that justified them.
    pub accepted: usize,
    pub checks_passed: usize,
}

impl Functionality for FZk {
    fn kind(&self) -> FunctionalityKind {
        FunctionalityKind::Zk
    }

    fn phase(&self) -> &'static str {
        if self.done {
            "decided"
        } else {
            "idle"
        }
    }

    fn input(&mut self, from: Role, payload: &[u8]) -> Result<Step, FunctionalityError> {
        let ZkIn::Prove { relation, statement, witness } = decode(from, payload)?;
        if from != Role::A {
            return Ok(Step::ignored("input from the verifier"));
        }
        if self.done {
            return Ok(Step::ignored("repeated proof"));
        }
        let id: RelationId = relation.parse().map_err(|_| FunctionalityError::UnknownRelation(relation.clone()))?;
        self.done = true;
        let ok = statement.relation_id() == id && check_relation(&statement, &witness);
        let mut step = if ok {
            self.checks_passed += 1;
            self.accepted += 1;
            Step::to(Role::B, &ZkOut::Accept(statement))
        } else {
            Step::to(Role::B, &ZkOut::Reject)
        };
        step.notes.push(format!("relation check {}", if ok { "passed" } else { "failed" }));
        debug_assert_eq!(self.accepted, self.checks_passed);
        Ok(step)
    }
}

/// Prover input, shared by every protocol realizing zero knowledge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkProverInput {
    pub relation: String,
    pub statement: RelationStatement,
    pub witness: Bits,
}

impl ZkProverInput {
    pub fn new(statement: RelationStatement, witness: Bits) -> Self {
        ZkProverInput { relation: statement.relation_id().to_string(), statement, witness }
    }
}

/// Verifier input. The verifier outputs the statement it accepted, encoded
/// as a [`RelationStatement`], or aborts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkVerifierInput {
    pub relation: String,
}

impl ZkVerifierInput {
    pub fn new(id: RelationId) -> Self {
        ZkVerifierInput { relation: id.to_string() }
    }
}

pub fn zk_dummy() -> [Program; 2] {
    let a = program(|ctx, input| async move {
        let Some(ZkProverInput { relation, statement, witness }) = input.decode() else {
            return ctx.abort("malformed input");
        };
        ctx.f_send(&ZkIn::Prove { relation, statement, witness });
        Output::unit()
    });
    let b = program(|ctx, input| async move {
        let Some(ZkVerifierInput { relation }) = input.decode() else { return ctx.abort("malformed input") };
        match ctx.f_recv().await {
            Some(ZkOut::Accept(x)) if x.relation_id().to_string() == relation => Output::value(&x),
            Some(ZkOut::Accept(_)) => ctx.abort("statement of another relation"),
            _ => ctx.abort("proof rejected"),
        }
    });
    [a, b]
}
