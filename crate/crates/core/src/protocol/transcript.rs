use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::index_set::IndexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Cathy,
}

impl Party {
    fn code(self) -> u8 {
        self as u8
    }
}

/// Where a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortStage {
    BobSizeCheck,
    CathySizeCheck,
    AliceIntersectionCheck,
    OtSizeCheck,
}

impl AbortStage {
    fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// A receiver's announced index sets.
    Announce,
    /// Alice's padded file prefixes.
    Ciphertexts,
    /// Receiver's index sets in an embedded two-party transfer.
    OtRequest,
    /// Alice's padded file suffixes in an embedded two-party transfer.
    OtResponse,
    Abort,
    /// Only emitted by the deliberately leaky audit variant.
    ExposedChoice,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Sets(Vec<IndexSet>),
    Bits(Vec<BitString>),
    Abort(AbortStage),
    Choice(usize),
}

impl Payload {
    /// Canonical byte encoding. Counts and lengths are little-endian `u32`;
    /// bit strings are MSB-first packed after their bit length.
    pub fn to_bytes(&self) -> Vec<u8> {
        fn put(out: &mut Vec<u8>, v: usize) {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        let mut out = Vec::new();
        match self {
            Payload::Sets(sets) => {
                put(&mut out, sets.len());
                for set in sets {
                    put(&mut out, set.len());
                    set.iter().for_each(|i| put(&mut out, i));
                }
            }
            Payload::Bits(strings) => {
                put(&mut out, strings.len());
                for s in strings {
                    put(&mut out, s.len());
                    out.extend(s.to_bytes());
                }
            }
            Payload::Abort(stage) => out.push(stage.code()),
            Payload::Choice(c) => put(&mut out, *c),
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub tag: Tag,
    pub payload: Payload,
}

/// Append-only public discussion log. Every party sees every message.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sender: Party, tag: Tag, payload: Payload) {
        self.messages.push(Message { sender, tag, payload });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// SHA-256 over the concatenated payload encodings, hex encoded.
    pub fn payload_digest(&self) -> String {
        let mut hasher = Sha256::new();
        for m in &self.messages {
            hasher.update(m.payload.to_bytes());
        }
        hex::encode(hasher.finalize())
    }

    /// Data-independent shape of the log: per message the sender, tag,
    /// encoded length, and sizes of any announced sets, plus the abort stage.
    pub fn structural_digest(&self) -> Vec<(u8, Tag, usize, Vec<usize>)> {
        self.messages
            .iter()
            .map(|m| {
                let sizes = match &m.payload {
                    Payload::Sets(sets) => sets.iter().map(IndexSet::len).collect(),
                    Payload::Abort(stage) => vec![stage.code() as usize],
                    _ => Vec::new(),
                };
                (m.sender.code(), m.tag, m.payload.to_bytes().len(), sizes)
            })
            .collect()
    }
}
