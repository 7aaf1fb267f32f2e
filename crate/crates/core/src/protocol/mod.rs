//! Three-party file transfer over a broadcast erasure channel plus a public
//! discussion channel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rates::RateError;

pub mod ot;
pub mod parties;
pub mod record;
pub mod run;
pub mod transcript;

pub use ot::{erasure_ot, OtLayout, OtOutcome};
pub use parties::{
    alice_encrypt, alice_form_keys, bob_select, cathy_select, receiver_decode, Announcement,
    CipherTexts, DataKeys, Database,
};
pub use record::RunRecord;
pub use run::{run_protocol, run_variant, run_with_sizes, RunOutcome, RunStatus, Views};
pub use transcript::{AbortStage, Message, Party, Payload, Tag, Transcript};

/// A size check that failed, and who declared it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Abort {
    pub stage: AbortStage,
    pub party: Party,
}

/// Misuse of the protocol API. Aborts are not errors; they are outcomes.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Plan(#[from] RateError),
    #[error("database files have different lengths")]
    RaggedDatabase,
    #[error("expected {expected} files, got {got}")]
    FileCount { expected: usize, got: usize },
    #[error("expected length {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("key index {0} is erased at the receiver")]
    ErasedKeyIndex(usize),
    #[error("choice {choice} outside 0..{files}")]
    Choice { choice: usize, files: usize },
}

/// Protocol behaviour. Anything but [`Variant::Faithful`] exists only to
/// check that the auditor catches leaks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Faithful,
    /// Bob publishes his choice right after his announcement.
    ExposeChoice,
}
