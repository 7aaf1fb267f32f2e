//! Two-party 1-of-N string transfer over erased channel positions
//! (honest-but-curious).
//!
//! The receiver announces `N` disjoint index sets inside a resource whose
//! bits the third party cannot see. The set in the chosen slot holds
//! positions the receiver got; the others hold positions it lost. The
//! sender pads string `j` with its own bits at set `j`. Erasures are exact,
//! so no privacy amplification is needed.

use rand::Rng;

use super::parties::{receiver_decode, restrict};
use super::{Abort, AbortStage, Party, Payload, ProtocolError, Tag, Transcript};
use crate::bits::BitString;
use crate::channel::{erasure_partition, BitSequence, ReceivedSequence};
use crate::index_set::IndexSet;
use crate::rng::sample_ordered;

/// How the receiver lays its sets over the resource.
#[derive(Clone, Copy, Debug)]
pub enum OtLayout<'a> {
    /// Chosen set from any received position, the rest from any lost ones.
    Unstructured,
    /// Set `j` confined to `strata[j]`. Used when the sender already knows
    /// how the resource splits into strata; drawing each slot inside its
    /// own stratum keeps the announcement independent of the choice.
    Stratified(&'a [IndexSet]),
}

/// Candidate positions for each slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OtPools {
    Split { good: IndexSet, bad: IndexSet },
    Stratified(Vec<IndexSet>),
}

pub fn ot_pools(
    resource: &IndexSet,
    receiver: &ReceivedSequence,
    choice: usize,
    files: usize,
    m_ddot: usize,
    layout: OtLayout<'_>,
    party: Party,
) -> Result<OtPools, Abort> {
    let abort = Abort { stage: AbortStage::OtSizeCheck, party };
    let (erased, unerased) =
        erasure_partition(receiver, resource).expect("resource inside the received block");
    match layout {
        OtLayout::Unstructured => {
            if unerased.len() < m_ddot || erased.len() < (files - 1) * m_ddot {
                return Err(abort);
            }
            Ok(OtPools::Split { good: unerased, bad: erased })
        }
        OtLayout::Stratified(strata) => {
            assert_eq!(strata.len(), files, "one stratum per slot");
            let pools: Vec<IndexSet> = strata
                .iter()
                .enumerate()
                .map(|(j, s)| if j == choice { unerased.intersection(s) } else { erased.intersection(s) })
                .collect();
            if pools.iter().any(|p| p.len() < m_ddot) {
                return Err(abort);
            }
            Ok(OtPools::Stratified(pools))
        }
    }
}

/// Draws the receiver's per-slot sets from `pools`.
pub fn ot_draw<R: Rng + ?Sized>(
    pools: &OtPools,
    choice: usize,
    files: usize,
    m_ddot: usize,
    rng: &mut R,
) -> Vec<IndexSet> {
    match pools {
        OtPools::Split { good, bad } => {
            let good_set: IndexSet = sample_ordered(good.as_slice(), m_ddot, rng).into_iter().collect();
            let picked = sample_ordered(bad.as_slice(), (files - 1) * m_ddot, rng);
            let mut bads = picked.chunks(m_ddot.max(1)).map(|c| c.iter().copied().collect::<IndexSet>());
            (0..files)
                .map(|j| {
                    if j == choice {
                        good_set.clone()
                    } else if m_ddot == 0 {
                        IndexSet::empty()
                    } else {
                        bads.next().expect("N - 1 erased sets")
                    }
                })
                .collect()
        }
        OtPools::Stratified(pools) => pools
            .iter()
            .map(|p| sample_ordered(p.as_slice(), m_ddot, rng).into_iter().collect())
            .collect(),
    }
}

/// Sender side: string `j` padded with the sender's bits at `sets[j]`.
pub fn ot_pads(
    x: &BitSequence,
    sets: &[IndexSet],
    strings: &[BitString],
) -> Result<Vec<BitString>, ProtocolError> {
    if sets.len() != strings.len() {
        return Err(ProtocolError::FileCount { expected: sets.len(), got: strings.len() });
    }
    sets.iter()
        .zip(strings)
        .map(|(set, s)| {
            restrict(x, set)
                .xor(s)
                .map_err(|_| ProtocolError::Length { expected: set.len(), got: s.len() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OtOutcome {
    Delivered { sets: Vec<IndexSet>, output: BitString },
    Aborted(Abort),
}

/// Runs one transfer end to end and logs both messages on `transcript`.
/// An abort is returned, not logged; the caller announces it.
#[allow(clippy::too_many_arguments)]
pub fn erasure_ot<R: Rng + ?Sized>(
    x: &BitSequence,
    resource: &IndexSet,
    receiver: &ReceivedSequence,
    strings: &[BitString],
    choice: usize,
    layout: OtLayout<'_>,
    party: Party,
    rng: &mut R,
    transcript: &mut Transcript,
) -> Result<OtOutcome, ProtocolError> {
    let files = strings.len();
    let m_ddot = strings.first().map_or(0, BitString::len);
    if strings.iter().any(|s| s.len() != m_ddot) {
        return Err(ProtocolError::RaggedDatabase);
    }
    let pools = match ot_pools(resource, receiver, choice, files, m_ddot, layout, party) {
        Ok(p) => p,
        Err(abort) => return Ok(OtOutcome::Aborted(abort)),
    };
    let sets = ot_draw(&pools, choice, files, m_ddot, rng);
    transcript.push(party, Tag::OtRequest, Payload::Sets(sets.clone()));
    let pads = ot_pads(x, &sets, strings)?;
    transcript.push(Party::Alice, Tag::OtResponse, Payload::Bits(pads.clone()));
    let output = receiver_decode(&pads[choice], receiver, &sets[choice])?;
    Ok(OtOutcome::Delivered { sets, output })
}
