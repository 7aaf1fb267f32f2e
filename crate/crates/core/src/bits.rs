use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Plain bit string, one `bool` per bit. Serialized as a `'0'`/`'1'` string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BitError {
    #[error("bit strings differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random::<bool>()).collect())
    }

    /// Low `len` bits of `mask`, bit `i` of the mask at position `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self((0..len).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString, BitError> {
        if self.len() != other.len() {
            return Err(BitError::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    /// Splits into the first `at` bits and the rest.
    pub fn split_at(&self, at: usize) -> (BitString, BitString) {
        let (a, b) = self.0.split_at(at);
        (Self(a.to_vec()), Self(b.to_vec()))
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Self(bits)
    }

    /// Inverse of [`BitString::from_mask`]; panics past 64 bits.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too long for a mask");
        self.0.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    /// MSB-first packing, zero padded to a whole byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i)))
            .collect()
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(b("101").xor(&b("011")).unwrap(), b("110"));
        assert_eq!(b("000").xor(&b("011")).unwrap(), b("011"));
        assert_eq!(b("011").xor(&b("011")).unwrap(), b("000"));
        assert_eq!(
            b("01").xor(&b("011")),
            Err(BitError::LengthMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(b("10110").to_string(), "10110");
        assert_eq!("10e".parse::<BitString>(), Err(BitError::InvalidChar('e')));
        assert_eq!(b("101100001").to_bytes(), vec![0b1011_0000, 0b1000_0000]);
    }

    #[test]
    fn mask_roundtrip() {
        let s = b("1101");
        assert_eq!(s.to_mask(), 0b1011);
        assert_eq!(BitString::from_mask(0b1011, 4), s);
    }
}
