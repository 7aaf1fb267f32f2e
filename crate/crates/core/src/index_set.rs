use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize};

/// Sorted, duplicate-free set of channel indices.
///
/// The representation is canonical: equal sets have equal vectors, so they
/// serialize and hash identically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// All indices in `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Accepts a vector that is already strictly increasing.
    pub fn from_sorted(indices: Vec<usize>) -> Option<Self> {
        indices.windows(2).all(|w| w[0] < w[1]).then_some(Self(indices))
    }

    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0, |acc, &i| {
            assert!(i < 64, "index {i} does not fit a mask");
            acc | 1 << i
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// The `k` smallest indices.
    pub fn prefix(&self, k: usize) -> IndexSet {
        Self(self.0[..k.min(self.len())].to_vec())
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        let mut out = Vec::new();
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => {
                    out.push(x);
                    a.next();
                    b.next();
                }
            }
        }
        Self(out)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        Self(self.0.iter().copied().filter(|&i| !other.contains(i)).collect())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Self(out)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a IndexSet>) -> IndexSet {
        sets.into_iter().fold(IndexSet::empty(), |acc, s| acc.union(s))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.intersection(other).len() == self.len()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// True when no index appears in two of the given sets.
    pub fn pairwise_disjoint(sets: &[&IndexSet]) -> bool {
        let total: usize = sets.iter().map(|s| s.len()).sum();
        IndexSet::union_all(sets.iter().copied()).len() == total
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl<const K: usize> From<[usize; K]> for IndexSet {
    fn from(arr: [usize; K]) -> Self {
        arr.into_iter().collect()
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        IndexSet::from_sorted(v)
            .ok_or_else(|| serde::de::Error::custom("index set must be strictly increasing"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_algebra() {
        let a = IndexSet::from([5, 1, 3, 3]);
        let b = IndexSet::from([3, 4, 5]);
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        assert_eq!(a.intersection(&b), IndexSet::from([3, 5]));
        assert_eq!(a.union(&b), IndexSet::from([1, 3, 4, 5]));
        assert_eq!(a.difference(&b), IndexSet::from([1]));
        assert_eq!(a.prefix(2), IndexSet::from([1, 3]));
        assert!(IndexSet::from([3]).is_subset(&a));
        assert!(!IndexSet::pairwise_disjoint(&[&a, &b]));
        assert!(IndexSet::from_sorted(vec![2, 1]).is_none());
    }

    #[test]
    fn deserialize_rejects_noncanonical() {
        assert!(serde_json::from_str::<IndexSet>("[1,2,2]").is_err());
        assert_eq!(serde_json::from_str::<IndexSet>("[0,4]").unwrap(), IndexSet::from([0, 4]));
    }

    proptest! {
        #[test]
        fn mask_roundtrip(mask in any::<u64>()) {
            prop_assert_eq!(IndexSet::from_mask(mask).to_mask(), mask);
        }

        #[test]
        fn ops_match_bitmask_semantics(a in any::<u64>(), b in any::<u64>()) {
            let (sa, sb) = (IndexSet::from_mask(a), IndexSet::from_mask(b));
            prop_assert_eq!(sa.intersection(&sb).to_mask(), a & b);
            prop_assert_eq!(sa.union(&sb).to_mask(), a | b);
            prop_assert_eq!(sa.difference(&sb).to_mask(), a & !b);
        }
    }
}
