//! Broadcast channel made of two independent binary erasure channels.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::BitString;
use crate::index_set::IndexSet;
use crate::rng::keyed_stream;

/// Channel input `X^n`.
pub type BitSequence = BitString;

/// Stream ids of the two erasure processes under one channel seed.
pub const BOB_STREAM: u64 = 1;
pub const CATHY_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erased => 'e',
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("index {index} outside received sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid received symbol {0:?}")]
    InvalidSymbol(char),
}

/// What a receiver sees: `Y^n` at Bob, `Z^n` at Cathy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReceivedSequence(Vec<Symbol>);

impl ReceivedSequence {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    /// Builds the sequence `x` with positions in `erased_mask` erased.
    pub fn from_mask(x: &BitString, erased_mask: u64) -> Self {
        Self(
            x.bits()
                .iter()
                .enumerate()
                .map(|(i, &b)| if erased_mask >> i & 1 == 1 { Symbol::Erased } else { Symbol::from_bit(b) })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.0[i]
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.0[i] == Symbol::Erased
    }

    pub fn erased_count(&self) -> usize {
        self.0.iter().filter(|s| **s == Symbol::Erased).count()
    }

    pub fn erasure_mask(&self) -> u64 {
        assert!(self.len() <= 64, "sequence too long for a mask");
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, s)| acc | ((*s == Symbol::Erased) as u64) << i)
    }
}

impl fmt::Display for ReceivedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for ReceivedSequence {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                'e' | 'E' => Ok(Symbol::Erased),
                other => Err(ChannelError::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl Serialize for ReceivedSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReceivedSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Erasure probability towards Bob.
    pub eps1: f64,
    /// Erasure probability towards Cathy.
    pub eps2: f64,
    pub seed: u64,
}

/// Passes `x` through both erasure channels.
///
/// Index `i` towards Bob is erased iff the `i`-th uniform of stream
/// [`BOB_STREAM`] under `cfg.seed` is below `eps1`; likewise for Cathy on
/// [`CATHY_STREAM`]. The realization therefore depends only on
/// `(seed, receiver, index)`.
pub fn broadcast(x: &BitSequence, cfg: &ChannelConfig) -> (ReceivedSequence, ReceivedSequence) {
    (erase(x, cfg.eps1, cfg.seed, BOB_STREAM), erase(x, cfg.eps2, cfg.seed, CATHY_STREAM))
}

fn erase(x: &BitSequence, eps: f64, seed: u64, stream: u64) -> ReceivedSequence {
    let mut rng = keyed_stream(seed, stream);
    ReceivedSequence(
        x.bits()
            .iter()
            .map(|&b| if rng.random::<f64>() < eps { Symbol::Erased } else { Symbol::from_bit(b) })
            .collect(),
    )
}

/// Splits `domain` into the indices erased and unerased in `r`.
pub fn erasure_partition(
    r: &ReceivedSequence,
    domain: &IndexSet,
) -> Result<(IndexSet, IndexSet), ChannelError> {
    if let Some(max) = domain.max() {
        if max >= r.len() {
            return Err(ChannelError::IndexOutOfRange { index: max, len: r.len() });
        }
    }
    let (erased, unerased): (Vec<usize>, Vec<usize>) = domain.iter().partition(|&i| r.is_erased(i));
    Ok((
        IndexSet::from_sorted(erased).expect("subsequence of a sorted set"),
        IndexSet::from_sorted(unerased).expect("subsequence of a sorted set"),
    ))
}
