//! The individual protocol steps of Alice, Bob, and Cathy.
//!
//! Randomized steps are split into a deterministic part (pools, slot
//! assignment) and a draw, so the exact auditor can enumerate every draw
//! while the simulator samples one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Abort, AbortStage, Party, ProtocolError};
use crate::bits::BitString;
use crate::channel::{erasure_partition, BitSequence, ReceivedSequence};
use crate::index_set::IndexSet;
use crate::rates::SetSizes;
use crate::rng::sample_ordered;

/// Alice's files `K_0 .. K_{N-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Database {
    pub files: Vec<BitString>,
}

impl Database {
    pub fn new(files: Vec<BitString>) -> Result<Self, ProtocolError> {
        let len = files.first().map_or(0, BitString::len);
        if files.iter().any(|f| f.len() != len) {
            return Err(ProtocolError::RaggedDatabase);
        }
        Ok(Self { files })
    }

    pub fn random<R: Rng + ?Sized>(files: usize, len: usize, rng: &mut R) -> Self {
        Self { files: (0..files).map(|_| BitString::random(len, rng)).collect() }
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    pub fn file_len(&self) -> usize {
        self.files.first().map_or(0, BitString::len)
    }

    /// Prefixes of length `m_dot` (pad phase) and the remaining suffixes
    /// (embedded transfer phase).
    pub fn split(&self, m_dot: usize) -> (Vec<BitString>, Vec<BitString>) {
        self.files.iter().map(|f| f.split_at(m_dot)).unzip()
    }
}

/// Sizes a receiver must fill from its erased and unerased positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectionSizes {
    pub files: usize,
    pub set_size: usize,
    /// Leftover erased set (`C` or `C~`).
    pub extra_size: usize,
}

impl SelectionSizes {
    pub fn bob(sizes: &SetSizes) -> Self {
        Self { files: sizes.files, set_size: sizes.size_l, extra_size: sizes.size_c }
    }

    pub fn cathy(sizes: &SetSizes) -> Self {
        Self { files: sizes.files, set_size: sizes.size_lt, extra_size: sizes.size_ct }
    }

    pub fn erased_needed(&self) -> usize {
        (self.files - 1) * self.set_size + self.extra_size
    }
}

/// A receiver's erased and unerased positions within its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pools {
    pub erased: IndexSet,
    pub unerased: IndexSet,
}

/// One realization of a receiver's random choices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Draw {
    /// Unerased set, destined for the chosen slot.
    pub good: IndexSet,
    /// Erased sets in slot order, skipping the chosen slot.
    pub bad: Vec<IndexSet>,
    pub extra: IndexSet,
}

/// Sets a receiver publishes: `L_0 .. L_{N-1}` and the leftover set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Announcement {
    pub sets: Vec<IndexSet>,
    pub extra: IndexSet,
}

impl Announcement {
    pub fn union(&self) -> IndexSet {
        IndexSet::union_all(&self.sets)
    }

    /// Message payload: the slot sets followed by the leftover set.
    pub fn to_sets(&self) -> Vec<IndexSet> {
        let mut v = self.sets.clone();
        v.push(self.extra.clone());
        v
    }

    /// Recovers the draw that produced this announcement for `choice`.
    pub fn draw_for(&self, choice: usize) -> Draw {
        Draw {
            good: self.sets[choice].clone(),
            bad: self
                .sets
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != choice)
                .map(|(_, s)| s.clone())
                .collect(),
            extra: self.extra.clone(),
        }
    }
}

/// Partitions `domain` by erasure and checks it can supply the sets.
pub fn selection_pools(
    received: &ReceivedSequence,
    domain: &IndexSet,
    sizes: SelectionSizes,
    party: Party,
    stage: AbortStage,
) -> Result<Pools, Abort> {
    let (erased, unerased) =
        erasure_partition(received, domain).expect("domain drawn from the received sequence");
    if erased.len() < sizes.erased_needed() || unerased.len() < sizes.set_size {
        return Err(Abort { stage, party });
    }
    Ok(Pools { erased, unerased })
}

/// Uniform draw: a `set_size`-subset of unerased positions, `N - 1`
/// disjoint `set_size`-subsets of erased positions, then the leftover set
/// from the remaining erased positions.
pub fn draw_sets<R: Rng + ?Sized>(pools: &Pools, sizes: SelectionSizes, rng: &mut R) -> Draw {
    let good: IndexSet = sample_ordered(pools.unerased.as_slice(), sizes.set_size, rng)
        .into_iter()
        .collect();
    let picked = sample_ordered(pools.erased.as_slice(), sizes.erased_needed(), rng);
    let (bad_part, extra_part) = picked.split_at((sizes.files - 1) * sizes.set_size);
    let bad = if sizes.set_size == 0 {
        vec![IndexSet::empty(); sizes.files - 1]
    } else {
        bad_part.chunks(sizes.set_size).map(|c| c.iter().copied().collect()).collect()
    };
    Draw { good, bad, extra: extra_part.iter().copied().collect() }
}

/// Places the good set in slot `choice` and the bad sets, in order, in the
/// remaining slots.
pub fn assign_slots(draw: Draw, choice: usize) -> Announcement {
    let mut bad = draw.bad.into_iter();
    let files = bad.len() + 1;
    let sets = (0..files)
        .map(|j| if j == choice { draw.good.clone() } else { bad.next().expect("N - 1 bad sets") })
        .collect();
    Announcement { sets, extra: draw.extra }
}

/// Bob's step: announce `L_0 .. L_{N-1}` and `C` from his view of the
/// whole block.
pub fn bob_select<R: Rng + ?Sized>(
    y: &ReceivedSequence,
    u: usize,
    sizes: &SetSizes,
    rng: &mut R,
) -> Result<Announcement, Abort> {
    let sel = SelectionSizes::bob(sizes);
    let pools =
        selection_pools(y, &IndexSet::full(y.len()), sel, Party::Bob, AbortStage::BobSizeCheck)?;
    Ok(assign_slots(draw_sets(&pools, sel, rng), u))
}

/// Cathy's step: the same selection restricted to the union of Bob's sets.
pub fn cathy_select<R: Rng + ?Sized>(
    z: &ReceivedSequence,
    l_union: &IndexSet,
    w: usize,
    sizes: &SetSizes,
    rng: &mut R,
) -> Result<Announcement, Abort> {
    let sel = SelectionSizes::cathy(sizes);
    let pools = selection_pools(z, l_union, sel, Party::Cathy, AbortStage::CathySizeCheck)?;
    Ok(assign_slots(draw_sets(&pools, sel, rng), w))
}

/// Index lists of the data transfer keys: the `m_dot` smallest indices of
/// each `L_j ∩ L~_j`. Depends only on public sets.
pub fn key_positions(
    bob_sets: &[IndexSet],
    cathy_sets: &[IndexSet],
    m_dot: usize,
) -> Result<Vec<IndexSet>, Abort> {
    bob_sets
        .iter()
        .zip(cathy_sets)
        .map(|(l, lt)| {
            let common = l.intersection(lt);
            if common.len() < m_dot {
                Err(Abort { stage: AbortStage::AliceIntersectionCheck, party: Party::Alice })
            } else {
                Ok(common.prefix(m_dot))
            }
        })
        .collect()
}

/// Data transfer keys `T_jj`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataKeys {
    pub positions: Vec<IndexSet>,
    pub keys: Vec<BitString>,
}

pub fn restrict(x: &BitSequence, indices: &IndexSet) -> BitString {
    indices.iter().map(|i| x.get(i)).collect()
}

pub fn alice_form_keys(
    x: &BitSequence,
    bob_sets: &[IndexSet],
    cathy_sets: &[IndexSet],
    m_dot: usize,
) -> Result<DataKeys, Abort> {
    let positions = key_positions(bob_sets, cathy_sets, m_dot)?;
    let keys = positions.iter().map(|p| restrict(x, p)).collect();
    Ok(DataKeys { positions, keys })
}

/// Ciphertexts `M_j = K._j xor T_jj`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherTexts {
    pub m_list: Vec<BitString>,
}

/// Pads the first `|T_jj|` bits of every file with its key.
pub fn alice_encrypt(db: &Database, keys: &DataKeys) -> Result<CipherTexts, ProtocolError> {
    if db.file_count() != keys.keys.len() {
        return Err(ProtocolError::FileCount { expected: keys.keys.len(), got: db.file_count() });
    }
    let m_list = db
        .files
        .iter()
        .zip(&keys.keys)
        .map(|(file, key)| {
            if file.len() < key.len() {
                return Err(ProtocolError::Length { expected: key.len(), got: file.len() });
            }
            let (prefix, _) = file.split_at(key.len());
            Ok(prefix.xor(key).expect("equal lengths"))
        })
        .collect::<Result<_, _>>()?;
    Ok(CipherTexts { m_list })
}

/// Strips the pad from `m_j` using the receiver's copy of the key bits at
/// the first `|m_j|` indices of `key_indices`.
pub fn receiver_decode(
    m_j: &BitString,
    received: &ReceivedSequence,
    key_indices: &IndexSet,
) -> Result<BitString, ProtocolError> {
    if key_indices.len() < m_j.len() {
        return Err(ProtocolError::Length { expected: m_j.len(), got: key_indices.len() });
    }
    let pad = key_indices
        .iter()
        .take(m_j.len())
        .map(|i| received.get(i).bit().ok_or(ProtocolError::ErasedKeyIndex(i)))
        .collect::<Result<BitString, _>>()?;
    Ok(m_j.xor(&pad).expect("equal lengths"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn sizes(files: usize, size_l: usize, size_lt: usize, size_c: usize, size_ct: usize) -> SetSizes {
        SetSizes {
            n: 0,
            files,
            size_l,
            size_lt,
            size_c,
            size_ct,
            size_s: size_c,
            size_st: size_ct,
            m_dot: 1,
            m_ddot: 0,
            m_total: 1,
        }
    }

    fn erased_at(n: usize, erased: &[usize]) -> ReceivedSequence {
        let mask = erased.iter().fold(0u64, |m, &i| m | 1 << i);
        ReceivedSequence::from_mask(&BitString::zeros(n), mask)
    }

    #[test]
    fn bob_structure() {
        let y = erased_at(8, &[1, 3, 6]);
        let s = sizes(2, 2, 1, 0, 0);
        for seed in 0..50 {
            let a = bob_select(&y, 1, &s, &mut rng_from_seed(seed)).unwrap();
            let (l0, l1) = (&a.sets[0], &a.sets[1]);
            assert_eq!((l0.len(), l1.len()), (2, 2));
            assert!(l1.is_subset(&IndexSet::from([0, 2, 4, 5, 7])));
            assert!(l0.is_subset(&IndexSet::from([1, 3, 6])));
            assert!(l0.is_disjoint(l1));
            assert!(a.extra.is_empty());
        }
    }

    #[test]
    fn bob_aborts_without_enough_erasures() {
        let y = erased_at(8, &[1]);
        let err = bob_select(&y, 0, &sizes(2, 2, 1, 0, 0), &mut rng_from_seed(0)).unwrap_err();
        assert_eq!(err, Abort { stage: AbortStage::BobSizeCheck, party: Party::Bob });
    }

    #[test]
    fn bob_forced_bad_set() {
        let y = erased_at(4, &[0, 2]);
        for seed in 0..20 {
            let a = bob_select(&y, 0, &sizes(2, 2, 1, 0, 0), &mut rng_from_seed(seed)).unwrap();
            assert_eq!(a.sets[1], IndexSet::from([0, 2]));
            assert_eq!(a.sets[0], IndexSet::from([1, 3]));
        }
    }

    #[test]
    fn bob_leftover_set_comes_from_unused_erasures() {
        let y = erased_at(10, &[0, 1, 2, 3, 4, 5, 6]);
        let a = bob_select(&y, 0, &sizes(2, 3, 1, 4, 0), &mut rng_from_seed(9)).unwrap();
        assert_eq!(a.extra.len(), 4);
        let refs: Vec<&IndexSet> = a.sets.iter().chain([&a.extra]).collect();
        assert!(IndexSet::pairwise_disjoint(&refs));
        assert!(a.extra.is_subset(&IndexSet::from([0, 1, 2, 3, 4, 5, 6])));
    }

    #[test]
    fn cathy_structure_and_abort() {
        let union = IndexSet::from([0, 1, 2, 3]);
        let z = erased_at(6, &[1, 3, 5]);
        let s = sizes(2, 2, 1, 0, 0);
        for seed in 0..20 {
            let a = cathy_select(&z, &union, 0, &s, &mut rng_from_seed(seed)).unwrap();
            assert_eq!(a.sets[0].len(), 1);
            assert!(a.sets[0].is_subset(&IndexSet::from([0, 2])));
            assert!(a.sets[1].is_subset(&IndexSet::from([1, 3])));
            assert!(a.extra.is_empty());
        }
        let clean = erased_at(6, &[4, 5]);
        let err = cathy_select(&clean, &union, 0, &s, &mut rng_from_seed(0)).unwrap_err();
        assert_eq!(err.stage, AbortStage::CathySizeCheck);
    }

    #[test]
    fn key_examples() {
        let x: BitString = "10110100".parse().unwrap();
        let keys = alice_form_keys(
            &x,
            &[IndexSet::from([0, 2]), IndexSet::from([1, 3])],
            &[IndexSet::from([2]), IndexSet::from([3])],
            1,
        )
        .unwrap();
        assert_eq!(keys.keys[0].to_string(), "1");

        let err = alice_form_keys(&x, &[IndexSet::from([0]), IndexSet::from([1])], &[IndexSet::from([5]), IndexSet::from([1])], 1)
            .unwrap_err();
        assert_eq!(err.stage, AbortStage::AliceIntersectionCheck);

        let ones: BitString = "1111".parse().unwrap();
        let keys = alice_form_keys(
            &ones,
            &[IndexSet::from([0, 2]), IndexSet::from([1, 3])],
            &[IndexSet::from([0, 2]), IndexSet::from([1, 3])],
            2,
        )
        .unwrap();
        assert_eq!(keys.keys[1].to_string(), "11");
    }

    #[test]
    fn encrypt_and_decode() {
        let db = Database::new(vec!["101".parse().unwrap(), "000".parse().unwrap()]).unwrap();
        let keys = DataKeys {
            positions: vec![IndexSet::from([0, 1, 2]); 2],
            keys: vec!["011".parse().unwrap(), "011".parse().unwrap()],
        };
        let c = alice_encrypt(&db, &keys).unwrap();
        assert_eq!(c.m_list[0].to_string(), "110");
        assert_eq!(c.m_list[1], keys.keys[1]);

        let received: ReceivedSequence = "011e".parse().unwrap();
        let out = receiver_decode(&c.m_list[0], &received, &IndexSet::from([0, 1, 2])).unwrap();
        assert_eq!(out.to_string(), "101");
        assert_eq!(
            receiver_decode(&c.m_list[0], &received, &IndexSet::from([0, 1, 3])),
            Err(ProtocolError::ErasedKeyIndex(3))
        );
        assert!(Database::new(vec!["1".parse().unwrap(), "10".parse().unwrap()]).is_err());
    }

    #[test]
    fn noiseless_decode_identity() {
        // With nothing erased every index is a usable key position.
        let x: BitString = "1100101011".parse().unwrap();
        let received = ReceivedSequence::from_mask(&x, 0);
        let file: BitString = "10011".parse().unwrap();
        let positions = IndexSet::from([1, 4, 5, 8, 9]);
        let pad = restrict(&x, &positions);
        let m = file.xor(&pad).unwrap();
        assert_eq!(receiver_decode(&m, &received, &positions).unwrap(), file);
    }
}
