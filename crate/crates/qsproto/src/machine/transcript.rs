use super::engine::CorruptionStyle;
use super::{Output, Payload, Role};
use crate::functionalities::FunctionalityKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToFunctionality,
    FromFunctionality,
}

/// One observable step. `party` and `from`/`to` are physical parties; `role`
/// is the role a party plays inside a session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Corrupt { party: Role, style: CorruptionStyle },
    Enter { session: String, party: Role, role: Role, protocol: String },
    Exit { session: String, party: Role, output: Output },
    Message { session: String, from: Role, to: Role, round: u32, payload: Payload },
    Functionality { session: String, kind: FunctionalityKind, party: Role, direction: Direction, payload: Payload },
    Note { session: String, party: Option<Role>, text: String },
    Abort { session: String, party: Role, reason: String },
    Fault { detail: String },
    Output { party: Role, output: Output },
}

impl Event {
    pub fn session(&self) -> Option<&str> {
        match self {
            Event::Enter { session, .. }
            | Event::Exit { session, .. }
            | Event::Message { session, .. }
            | Event::Functionality { session, .. }
            | Event::Note { session, .. }
            | Event::Abort { session, .. } => Some(session),
            _ => None,
        }
    }
}

/// Append-only record of one execution, in the order events occurred.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: String,
    pub seed: u64,
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(bincode::serialize(self).expect("transcript serializes")).into()
    }

    /// Delivered message payloads of one session, in delivery order.
    pub fn messages_in<'a>(&'a self, session: &'a str) -> impl Iterator<Item = (Role, &'a Payload)> + 'a {
        self.events.iter().filter_map(move |e| match e {
            Event::Message { session: s, from, payload, .. } if s == session => Some((*from, payload)),
            _ => None,
        })
    }

    /// Final output of `party` as recorded, if the run recorded one.
    pub fn output(&self, party: Role) -> Option<&Output> {
        self.events.iter().find_map(|e| match e {
            Event::Output { party: p, output } if *p == party => Some(output),
            _ => None,
        })
    }

    pub fn message_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Message { .. })).count()
    }

    pub fn aborted(&self) -> bool {
        self.events.iter().any(|e| matches!(e, Event::Abort { .. }))
    }

    /// Sessions in order of first appearance.
    pub fn sessions(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in self.events.iter().filter_map(|e| e.session()) {
            if !out.iter().any(|o| o == s) {
                out.push(s.to_string());
            }
        }
        out
    }

    /// True iff the message and functionality events of every session strictly
    /// below `parent` form one contiguous block per child (descendants included).
    pub fn children_contiguous(&self, parent: &str) -> bool {
        let prefix = format!("{parent}/");
        let child_of = |s: &str| -> Option<String> {
            let rest = s.strip_prefix(&prefix)?;
            Some(format!("{prefix}{}", rest.split('/').next().unwrap_or(rest)))
        };
        let tags = self
            .events
            .iter()
            .filter(|e| matches!(e, Event::Message { .. } | Event::Functionality { .. }))
            .map(|e| e.session().and_then(child_of));
        let mut closed: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        for t in tags {
            match (&current, t) {
                (Some(c), Some(t)) if *c == t => {}
                (_, Some(t)) => {
                    if closed.contains(&t) {
                        return false;
                    }
                    if let Some(c) = current.take() {
                        closed.push(c);
                    }
                    current = Some(t);
                }
                (_, None) => {
                    if let Some(c) = current.take() {
                        closed.push(c);
                    }
                }
            }
        }
        true
    }
}
