//! Full protocol executions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ot::{erasure_ot, OtLayout, OtOutcome};
use super::parties::{
    alice_encrypt, alice_form_keys, bob_select, cathy_select, receiver_decode, Announcement,
    Database,
};
use super::{Abort, Party, Payload, ProtocolError, Tag, Transcript, Variant};
use crate::bits::BitString;
use crate::channel::{broadcast, BitSequence, ChannelConfig, ReceivedSequence};
use crate::index_set::IndexSet;
use crate::rates::{size_plan, ProtocolParams, SetSizes};
use crate::rng::{rng_from_seed, RunSeeds};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Completed,
    Aborted(Abort),
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn abort(&self) -> Option<Abort> {
        match self {
            RunStatus::Completed => None,
            RunStatus::Aborted(a) => Some(*a),
        }
    }
}

/// Private parts of each party's view. The transcript is the shared part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Views {
    pub db: Database,
    pub x: BitSequence,
    pub u: usize,
    pub y: ReceivedSequence,
    pub w: usize,
    pub z: ReceivedSequence,
}

/// Sets produced along the way, kept for inspection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub bob: Option<Announcement>,
    pub cathy: Option<Announcement>,
    pub key_positions: Option<Vec<IndexSet>>,
    /// Resource of Cathy's transfer (prefix of Bob's leftover set).
    pub s: Option<IndexSet>,
    /// Resource of Bob's transfer (prefix of Cathy's leftover set).
    pub s_t: Option<IndexSet>,
    pub bob_ot: Option<Vec<IndexSet>>,
    pub cathy_ot: Option<Vec<IndexSet>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub k_hat_u: Option<BitString>,
    pub k_hat_w: Option<BitString>,
    pub transcript: Transcript,
    pub views: Views,
    pub trace: Trace,
    pub sizes: SetSizes,
    pub achieved_rate: f64,
}

impl RunOutcome {
    /// Whether a completed run delivered a wrong file to either receiver.
    pub fn decode_error(&self) -> bool {
        let v = &self.views;
        self.status.is_completed()
            && (self.k_hat_u.as_ref() != Some(&v.db.files[v.u])
                || self.k_hat_w.as_ref() != Some(&v.db.files[v.w]))
    }
}

/// Runs the faithful protocol under the plan derived from `params`.
pub fn run_protocol<T: Real>(
    params: &ProtocolParams<T>,
    db: &Database,
    u: usize,
    w: usize,
    seeds: &RunSeeds,
) -> Result<RunOutcome, ProtocolError> {
    run_variant(params, db, u, w, seeds, Variant::Faithful)
}

pub fn run_variant<T: Real>(
    params: &ProtocolParams<T>,
    db: &Database,
    u: usize,
    w: usize,
    seeds: &RunSeeds,
    variant: Variant,
) -> Result<RunOutcome, ProtocolError> {
    let plan = size_plan(params)?;
    let eps1 = params.eps1.to_f64().unwrap_or(f64::NAN);
    let eps2 = params.eps2.to_f64().unwrap_or(f64::NAN);
    run_with_sizes(&plan.sizes, eps1, eps2, db, u, w, seeds, variant)
}

/// Runs with explicit set sizes: draws `X^n` from the Alice seed, passes it
/// through the channel, and hands the Bob and Cathy seeds to their steps.
#[allow(clippy::too_many_arguments)]
pub fn run_with_sizes(
    sizes: &SetSizes,
    eps1: f64,
    eps2: f64,
    db: &Database,
    u: usize,
    w: usize,
    seeds: &RunSeeds,
    variant: Variant,
) -> Result<RunOutcome, ProtocolError> {
    let x = BitString::random(sizes.n, &mut rng_from_seed(seeds.alice));
    let (y, z) = broadcast(&x, &ChannelConfig { eps1, eps2, seed: seeds.channel });
    execute(
        sizes,
        Views { db: db.clone(), x, u, y, w, z },
        &mut rng_from_seed(seeds.bob),
        &mut rng_from_seed(seeds.cathy),
        variant,
    )
}

/// The protocol proper, given the channel realization and each receiver's
/// private randomness.
pub fn execute<RB: Rng + ?Sized, RC: Rng + ?Sized>(
    sizes: &SetSizes,
    views: Views,
    bob_rng: &mut RB,
    cathy_rng: &mut RC,
    variant: Variant,
) -> Result<RunOutcome, ProtocolError> {
    let files = sizes.files;
    if views.db.file_count() != files {
        return Err(ProtocolError::FileCount { expected: files, got: views.db.file_count() });
    }
    if views.db.file_len() != sizes.m_total {
        return Err(ProtocolError::Length { expected: sizes.m_total, got: views.db.file_len() });
    }
    for choice in [views.u, views.w] {
        if choice >= files {
            return Err(ProtocolError::Choice { choice, files });
        }
    }
    for len in [views.x.len(), views.y.len(), views.z.len()] {
        if len != sizes.n {
            return Err(ProtocolError::Length { expected: sizes.n, got: len });
        }
    }

    let mut run = Run { sizes: *sizes, views, transcript: Transcript::new(), trace: Trace::default() };
    match run.steps(bob_rng, cathy_rng, variant)? {
        Ok((k_hat_u, k_hat_w)) => Ok(run.finish(RunStatus::Completed, Some(k_hat_u), Some(k_hat_w))),
        Err(abort) => {
            run.transcript.push(abort.party, Tag::Abort, Payload::Abort(abort.stage));
            Ok(run.finish(RunStatus::Aborted(abort), None, None))
        }
    }
}

struct Run {
    sizes: SetSizes,
    views: Views,
    transcript: Transcript,
    trace: Trace,
}

type Decoded = (BitString, BitString);

impl Run {
    fn steps<RB: Rng + ?Sized, RC: Rng + ?Sized>(
        &mut self,
        bob_rng: &mut RB,
        cathy_rng: &mut RC,
        variant: Variant,
    ) -> Result<Result<Decoded, Abort>, ProtocolError> {
        let sizes = self.sizes;
        let Views { db, x, u, y, w, z } = &self.views;
        let (u, w) = (*u, *w);

        let bob = match bob_select(y, u, &sizes, bob_rng) {
            Ok(a) => a,
            Err(abort) => return Ok(Err(abort)),
        };
        self.transcript.push(Party::Bob, Tag::Announce, Payload::Sets(bob.to_sets()));
        self.trace.bob = Some(bob.clone());
        if variant == Variant::ExposeChoice {
            self.transcript.push(Party::Bob, Tag::ExposedChoice, Payload::Choice(u));
        }

        let cathy = match cathy_select(z, &bob.union(), w, &sizes, cathy_rng) {
            Ok(a) => a,
            Err(abort) => return Ok(Err(abort)),
        };
        self.transcript.push(Party::Cathy, Tag::Announce, Payload::Sets(cathy.to_sets()));
        self.trace.cathy = Some(cathy.clone());

        let keys = match alice_form_keys(x, &bob.sets, &cathy.sets, sizes.m_dot) {
            Ok(k) => k,
            Err(abort) => return Ok(Err(abort)),
        };
        self.trace.key_positions = Some(keys.positions.clone());
        let cipher = alice_encrypt(db, &keys)?;
        self.transcript.push(Party::Alice, Tag::Ciphertexts, Payload::Bits(cipher.m_list.clone()));

        let mut k_hat_u = receiver_decode(&cipher.m_list[u], y, &keys.positions[u])?;
        let mut k_hat_w = receiver_decode(&cipher.m_list[w], z, &keys.positions[w])?;

        if sizes.high_erasure() {
            let (_, suffixes) = db.split(sizes.m_dot);
            let s_t = cathy.extra.prefix(sizes.size_st);
            let s = bob.extra.prefix(sizes.size_s);
            self.trace.s_t = Some(s_t.clone());
            self.trace.s = Some(s.clone());

            let layout = OtLayout::Stratified(&bob.sets);
            match erasure_ot(x, &s_t, y, &suffixes, u, layout, Party::Bob, bob_rng, &mut self.transcript)? {
                OtOutcome::Delivered { sets, output } => {
                    self.trace.bob_ot = Some(sets);
                    k_hat_u = k_hat_u.concat(&output);
                }
                OtOutcome::Aborted(abort) => return Ok(Err(abort)),
            }
            match erasure_ot(x, &s, z, &suffixes, w, OtLayout::Unstructured, Party::Cathy, cathy_rng, &mut self.transcript)? {
                OtOutcome::Delivered { sets, output } => {
                    self.trace.cathy_ot = Some(sets);
                    k_hat_w = k_hat_w.concat(&output);
                }
                OtOutcome::Aborted(abort) => return Ok(Err(abort)),
            }
        }
        Ok(Ok((k_hat_u, k_hat_w)))
    }

    fn finish(self, status: RunStatus, k_hat_u: Option<BitString>, k_hat_w: Option<BitString>) -> RunOutcome {
        let achieved_rate = if status.is_completed() { self.sizes.rate() } else { 0.0 };
        RunOutcome {
            status,
            k_hat_u,
            k_hat_w,
            transcript: self.transcript,
            views: self.views,
            trace: self.trace,
            sizes: self.sizes,
            achieved_rate,
        }
    }
}
