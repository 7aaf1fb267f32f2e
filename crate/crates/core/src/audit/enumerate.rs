//! Exhaustive enumeration of a tiny protocol instance.
//!
//! The outer loop walks every branch of the protocol: choices `U, W`, both
//! erasure patterns, and every draw each receiver can make. Branches run
//! through the same step functions the simulator uses. Inside a completed
//! branch the inputs `K` and `X^n` are uniform and only enter through XOR
//! pads, so atoms are produced lazily per branch with bit operations.

use num_rational::Ratio;
use rustc_hash::FxHashMap;

use super::AuditError;
use crate::bits::BitString;
use crate::channel::ReceivedSequence;
use crate::index_set::IndexSet;
use crate::protocol::ot::{ot_pools, OtLayout, OtPools};
use crate::protocol::parties::{
    assign_slots, key_positions, selection_pools, Announcement, Draw, Pools, SelectionSizes,
};
use crate::protocol::{AbortStage, Party, Payload, Tag, Transcript, Variant};
use crate::rates::SetSizes;
use crate::scalar::Probability;

pub const DEFAULT_BUDGET: f64 = 1e9;

/// A protocol instance small enough to enumerate.
#[derive(Clone, Debug, PartialEq)]
pub struct TinyConfig {
    pub n: usize,
    pub files: usize,
    pub eps1: Ratio<u64>,
    pub eps2: Ratio<u64>,
    pub size_l: usize,
    pub size_lt: usize,
    /// Adds the embedded transfer phase (one extra bit per file).
    pub include_high_erasure: bool,
    pub size_c: usize,
    pub size_ct: usize,
    pub variant: Variant,
    /// Largest admissible atom count bound.
    pub budget: f64,
}

impl TinyConfig {
    /// Single-bit files, singleton sets, no embedded transfer.
    pub fn new(n: usize, files: usize, eps1: Ratio<u64>, eps2: Ratio<u64>) -> Self {
        Self {
            n,
            files,
            eps1,
            eps2,
            size_l: 1,
            size_lt: 1,
            include_high_erasure: false,
            size_c: 0,
            size_ct: 0,
            variant: Variant::Faithful,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_sizes(mut self, size_l: usize, size_lt: usize) -> Self {
        self.size_l = size_l;
        self.size_lt = size_lt;
        self
    }

    pub fn with_high_erasure(mut self, size_c: usize, size_ct: usize) -> Self {
        self.include_high_erasure = true;
        self.size_c = size_c;
        self.size_ct = size_ct;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    /// Set sizes handed to the protocol steps.
    pub fn sizes(&self) -> SetSizes {
        let high = self.include_high_erasure;
        let (size_c, size_ct) = if high { (self.size_c, self.size_ct) } else { (0, 0) };
        let m_ddot = high as usize;
        SetSizes {
            n: self.n,
            files: self.files,
            size_l: self.size_l,
            size_lt: self.size_lt,
            size_c,
            size_ct,
            size_s: size_c,
            size_st: size_ct,
            m_dot: 1,
            m_ddot,
            m_total: 1 + m_ddot,
        }
    }

    pub fn validate(&self) -> Result<(), AuditError> {
        let bad = |msg: String| Err(AuditError::Config(msg));
        if !(1..=8).contains(&self.n) {
            return bad(format!("n = {} must be in 1..=8", self.n));
        }
        if !(2..=3).contains(&self.files) {
            return bad(format!("N = {} must be 2 or 3", self.files));
        }
        for (name, eps) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if *eps.denom() == 0 || eps.numer() > eps.denom() {
                return bad(format!("{name} = {eps} is outside [0, 1]"));
            }
            if eps.denom().checked_pow(self.n as u32).is_none() {
                return bad(format!("{name} denominator too large for exact weights"));
            }
        }
        let s = self.sizes();
        if s.size_l == 0 || s.size_lt == 0 {
            return bad("set sizes must be positive".into());
        }
        if s.files * s.size_l + s.size_c > s.n {
            return bad("Bob's sets do not fit in n positions".into());
        }
        if s.files * s.size_lt + s.size_ct > s.files * s.size_l {
            return bad("Cathy's sets do not fit in the union of Bob's sets".into());
        }
        Ok(())
    }

    /// Upper bound on the number of weighted atoms.
    pub fn atom_bound(&self) -> f64 {
        let s = self.sizes();
        let files = s.files as f64;
        let bob = (0..=s.n)
            .map(|e| draw_count(s.n - e, e, SelectionSizes::bob(&s)))
            .fold(0.0, f64::max);
        let union = s.files * s.size_l;
        let cathy = (0..=union)
            .map(|e| draw_count(union - e, e, SelectionSizes::cathy(&s)))
            .fold(0.0, f64::max);
        let ot = if s.high_erasure() {
            // Strata sizes sum to size_st; the product of binomials is
            // largest when they are equal (AM-GM on a^m / m!).
            let share = s.size_st as f64 / files;
            let m_fact = (1..=s.m_ddot).map(|i| i as f64).product::<f64>();
            let bob_ot = (share.powi(s.m_ddot as i32) / m_fact).max(1.0).powi(s.files as i32);
            let sel = SelectionSizes { files: s.files, set_size: s.m_ddot, extra_size: 0 };
            let cathy_ot = (0..=s.size_s).map(|e| draw_count(s.size_s - e, e, sel)).fold(0.0, f64::max);
            bob_ot * cathy_ot
        } else {
            1.0
        };
        files * files
            * 2f64.powi(3 * s.n as i32)
            * 2f64.powi((s.files * s.m_total) as i32)
            * bob
            * cathy
            * ot
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn draw_count(unerased: usize, erased: usize, sel: SelectionSizes) -> f64 {
    if unerased < sel.set_size || erased < sel.erased_needed() {
        return 0.0;
    }
    let mut count = binomial(unerased, sel.set_size);
    let mut left = erased;
    for _ in 1..sel.files {
        count *= binomial(left, sel.set_size);
        left -= sel.set_size;
    }
    count * binomial(left, sel.extra_size)
}

/// All `k`-subsets of `pool`.
pub fn combinations(pool: &[usize], k: usize) -> Vec<IndexSet> {
    fn go(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSet>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            go(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every draw [`draw_sets`](crate::protocol::parties::draw_sets) can make
/// from `pools`. Each is equally likely.
pub fn all_draws(pools: &Pools, sel: SelectionSizes) -> Vec<Draw> {
    fn bads(left: &IndexSet, count: usize, size: usize, cur: &mut Vec<IndexSet>, out: &mut Vec<(Vec<IndexSet>, IndexSet)>) {
        if cur.len() == count {
            out.push((cur.clone(), left.clone()));
            return;
        }
        for set in combinations(left.as_slice(), size) {
            let rest = left.difference(&set);
            cur.push(set);
            bads(&rest, count, size, cur, out);
            cur.pop();
        }
    }
    let mut splits = Vec::new();
    bads(&pools.erased, sel.files - 1, sel.set_size, &mut Vec::new(), &mut splits);
    let goods = combinations(pools.unerased.as_slice(), sel.set_size);
    let mut out = Vec::new();
    for good in &goods {
        for (bad, rest) in &splits {
            for extra in combinations(rest.as_slice(), sel.extra_size) {
                out.push(Draw { good: good.clone(), bad: bad.clone(), extra });
            }
        }
    }
    out
}

/// Every set list [`ot_draw`](crate::protocol::ot::ot_draw) can return.
pub fn all_ot_draws(pools: &OtPools, choice: usize, files: usize, m_ddot: usize) -> Vec<Vec<IndexSet>> {
    match pools {
        OtPools::Split { good, bad } => {
            let sel = SelectionSizes { files, set_size: m_ddot, extra_size: 0 };
            let pools = Pools { erased: bad.clone(), unerased: good.clone() };
            all_draws(&pools, sel).into_iter().map(|d| assign_slots(d, choice).sets).collect()
        }
        OtPools::Stratified(strata) => strata.iter().fold(vec![Vec::new()], |acc, pool| {
            let options = combinations(pool.as_slice(), m_ddot);
            acc.iter()
                .flat_map(|prefix| {
                    options.iter().map(move |set| {
                        let mut v = prefix.clone();
                        v.push(set.clone());
                        v
                    })
                })
                .collect()
        }),
    }
}

/// A completed branch: everything but `K` and `X^n` fixed.
#[derive(Clone, Debug)]
pub struct Branch<P> {
    pub u: usize,
    pub w: usize,
    pub y_erased: u64,
    pub z_erased: u64,
    /// Probability of the branch, summed over `K` and `X^n`.
    pub prob: P,
    pub bob: Announcement,
    pub cathy: Announcement,
    pub key_positions: Vec<IndexSet>,
    pub bob_ot: Vec<IndexSet>,
    pub cathy_ot: Vec<IndexSet>,
    /// Interned public part of the transcript (everything except pads).
    pub skeleton: u32,
    pub bob_public: u32,
    pub cathy_public: u32,
    /// Pad bits of the transcript in emission order: (bit of K, position of X).
    pub(crate) pads: Vec<(u32, u32)>,
    /// Per receiver: (pad index, bit of K it should decode to, position).
    pub(crate) bob_decode: Vec<(u32, u32, u32)>,
    pub(crate) cathy_decode: Vec<(u32, u32, u32)>,
}

/// Aggregated mass of aborted runs.
#[derive(Clone, Debug, PartialEq)]
pub struct AbortMass<P> {
    pub u: usize,
    pub w: usize,
    pub stage: AbortStage,
    pub prob: P,
}

#[derive(Clone, Debug)]
pub struct JointDistribution<P> {
    pub cfg: TinyConfig,
    pub sizes: SetSizes,
    pub branches: Vec<Branch<P>>,
    pub aborts: Vec<AbortMass<P>>,
}

/// One fully specified outcome with `J = 1`.
#[derive(Clone, Copy, Debug)]
pub struct Atom<'a, P> {
    pub branch: &'a Branch<P>,
    pub x: u64,
    pub k: u64,
    /// Pad bits of the transcript, bit `i` for `pads[i]`.
    pub pad_bits: u64,
    pub prob: f64,
}

impl<P> Atom<'_, P> {
    pub fn decode_ok(&self) -> bool {
        let check = |list: &[(u32, u32, u32)], erased: u64| {
            list.iter().all(|&(pad, kbit, pos)| {
                erased >> pos & 1 == 0 && (self.pad_bits >> pad ^ self.x >> pos ^ self.k >> kbit) & 1 == 0
            })
        };
        check(&self.branch.bob_decode, self.branch.y_erased)
            && check(&self.branch.cathy_decode, self.branch.z_erased)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Skeleton {
    bob: Vec<IndexSet>,
    exposed: Option<usize>,
    cathy: Vec<IndexSet>,
    bob_ot: Vec<IndexSet>,
    cathy_ot: Vec<IndexSet>,
}

struct Interner<K> {
    ids: FxHashMap<K, u32>,
}

impl<K> Default for Interner<K> {
    fn default() -> Self {
        Self { ids: FxHashMap::default() }
    }
}

impl<K: std::hash::Hash + Eq> Interner<K> {
    fn id(&mut self, key: K) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }
}

fn pattern_prob<P: Probability>(eps: Ratio<u64>, n: usize, mask: u64) -> P {
    let k = mask.count_ones();
    let (num, den) = (*eps.numer(), *eps.denom());
    let weight = num.pow(k) * (den - num).pow(n as u32 - k);
    P::ratio(weight, den.pow(n as u32))
}

/// Received sequence with the given erasures. Bit values are irrelevant to
/// every step the enumerator calls.
fn pattern(n: usize, erased: u64) -> ReceivedSequence {
    ReceivedSequence::from_mask(&BitString::zeros(n), erased)
}

struct Builder<P> {
    cfg: TinyConfig,
    sizes: SetSizes,
    branches: Vec<Branch<P>>,
    aborts: FxHashMap<(usize, usize, AbortStage), P>,
    skeletons: Interner<Skeleton>,
    bob_public: Interner<(Vec<IndexSet>, Option<usize>)>,
    cathy_public: Interner<Vec<IndexSet>>,
}

impl<P: Probability> Builder<P> {
    fn abort(&mut self, u: usize, w: usize, stage: AbortStage, p: P) {
        let slot = self.aborts.entry((u, w, stage)).or_insert_with(P::zero);
        *slot = slot.clone() + p;
    }

    fn run(&mut self) {
        let s = self.sizes;
        let n = s.n;
        let files = s.files;
        let choice_p = P::ratio(1, (files * files) as u64);
        for u in 0..files {
            for w in 0..files {
                for y_erased in 0..1u64 << n {
                    let p_y = choice_p.clone() * pattern_prob::<P>(self.cfg.eps1, n, y_erased);
                    self.bob_branch(u, w, y_erased, p_y);
                }
            }
        }
    }

    fn bob_branch(&mut self, u: usize, w: usize, y_erased: u64, p: P) {
        let s = self.sizes;
        let y = pattern(s.n, y_erased);
        let sel = SelectionSizes::bob(&s);
        let pools = match selection_pools(&y, &IndexSet::full(s.n), sel, Party::Bob, AbortStage::BobSizeCheck) {
            Ok(pools) => pools,
            Err(a) => return self.abort(u, w, a.stage, p),
        };
        let draws = all_draws(&pools, sel);
        let p_draw = p * P::ratio(1, draws.len() as u64);
        for draw in draws {
            let bob = assign_slots(draw, u);
            let union = bob.union();
            for z_erased in 0..1u64 << s.n {
                let p_z = p_draw.clone() * pattern_prob::<P>(self.cfg.eps2, s.n, z_erased);
                self.cathy_branch(u, w, y_erased, z_erased, &bob, &union, p_z);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn cathy_branch(&mut self, u: usize, w: usize, y_erased: u64, z_erased: u64, bob: &Announcement, union: &IndexSet, p: P) {
        let s = self.sizes;
        let z = pattern(s.n, z_erased);
        let sel = SelectionSizes::cathy(&s);
        let pools = match selection_pools(&z, union, sel, Party::Cathy, AbortStage::CathySizeCheck) {
            Ok(pools) => pools,
            Err(a) => return self.abort(u, w, a.stage, p),
        };
        let draws = all_draws(&pools, sel);
        let p_draw = p * P::ratio(1, draws.len() as u64);
        let y = pattern(s.n, y_erased);
        for draw in draws {
            let cathy = assign_slots(draw, w);
            let keys = match key_positions(&bob.sets, &cathy.sets, s.m_dot) {
                Ok(k) => k,
                Err(a) => {
                    self.abort(u, w, a.stage, p_draw.clone());
                    continue;
                }
            };
            if !s.high_erasure() {
                self.push(u, w, y_erased, z_erased, bob, &cathy, keys, Vec::new(), Vec::new(), p_draw.clone());
                continue;
            }
            let s_t = cathy.extra.prefix(s.size_st);
            let s_c = bob.extra.prefix(s.size_s);
            let layout = OtLayout::Stratified(&bob.sets);
            let bob_pools = match ot_pools(&s_t, &y, u, s.files, s.m_ddot, layout, Party::Bob) {
                Ok(p) => p,
                Err(a) => {
                    self.abort(u, w, a.stage, p_draw.clone());
                    continue;
                }
            };
            let cathy_pools = ot_pools(&s_c, &z, w, s.files, s.m_ddot, OtLayout::Unstructured, Party::Cathy);
            let bob_ots = all_ot_draws(&bob_pools, u, s.files, s.m_ddot);
            let p_bob = p_draw.clone() * P::ratio(1, bob_ots.len() as u64);
            let cathy_pools = match cathy_pools {
                Ok(p) => p,
                Err(a) => {
                    self.abort(u, w, a.stage, p_draw.clone());
                    continue;
                }
            };
            let cathy_ots = all_ot_draws(&cathy_pools, w, s.files, s.m_ddot);
            let p_both = p_bob * P::ratio(1, cathy_ots.len() as u64);
            for bob_ot in &bob_ots {
                for cathy_ot in &cathy_ots {
                    self.push(u, w, y_erased, z_erased, bob, &cathy, keys.clone(), bob_ot.clone(), cathy_ot.clone(), p_both.clone());
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        u: usize,
        w: usize,
        y_erased: u64,
        z_erased: u64,
        bob: &Announcement,
        cathy: &Announcement,
        key_positions: Vec<IndexSet>,
        bob_ot: Vec<IndexSet>,
        cathy_ot: Vec<IndexSet>,
        prob: P,
    ) {
        let s = self.sizes;
        let exposed = (self.cfg.variant == Variant::ExposeChoice).then_some(u);
        let skeleton = self.skeletons.id(Skeleton {
            bob: bob.to_sets(),
            exposed,
            cathy: cathy.to_sets(),
            bob_ot: bob_ot.clone(),
            cathy_ot: cathy_ot.clone(),
        });
        let bob_public = self.bob_public.id((bob.to_sets(), exposed));
        let cathy_public = self.cathy_public.id(cathy.to_sets());

        let m = s.m_total as u32;
        let mut pads = Vec::new();
        let mut bob_decode = Vec::new();
        let mut cathy_decode = Vec::new();
        let mut emit = |sets: &[IndexSet], offset: u32, receivers: &[(usize, bool)]| {
            for (j, set) in sets.iter().enumerate() {
                for (b, pos) in set.iter().enumerate() {
                    let kbit = j as u32 * m + offset + b as u32;
                    let idx = pads.len() as u32;
                    pads.push((kbit, pos as u32));
                    for &(choice, is_bob) in receivers {
                        if choice == j {
                            let list = if is_bob { &mut bob_decode } else { &mut cathy_decode };
                            list.push((idx, kbit, pos as u32));
                        }
                    }
                }
            }
        };
        emit(&key_positions, 0, &[(u, true), (w, false)]);
        emit(&bob_ot, s.m_dot as u32, &[(u, true)]);
        emit(&cathy_ot, s.m_dot as u32, &[(w, false)]);

        self.branches.push(Branch {
            u,
            w,
            y_erased,
            z_erased,
            prob,
            bob: bob.clone(),
            cathy: cathy.clone(),
            key_positions,
            bob_ot,
            cathy_ot,
            skeleton,
            bob_public,
            cathy_public,
            pads,
            bob_decode,
            cathy_decode,
        });
    }
}

/// Enumerates every outcome of `cfg` with exact weights.
pub fn enumerate_joint<P: Probability>(cfg: &TinyConfig) -> Result<JointDistribution<P>, AuditError> {
    if !(2..=3).contains(&cfg.files) {
        return Err(AuditError::Config(format!("N = {} must be 2 or 3", cfg.files)));
    }
    let bound = cfg.atom_bound();
    if bound > cfg.budget {
        return Err(AuditError::Budget { bound, budget: cfg.budget });
    }
    cfg.validate()?;
    let mut b = Builder {
        cfg: cfg.clone(),
        sizes: cfg.sizes(),
        branches: Vec::new(),
        aborts: FxHashMap::default(),
        skeletons: Interner::default(),
        bob_public: Interner::default(),
        cathy_public: Interner::default(),
    };
    b.run();
    let mut aborts: Vec<AbortMass<P>> = b
        .aborts
        .into_iter()
        .map(|((u, w, stage), prob)| AbortMass { u, w, stage, prob })
        .collect();
    aborts.sort_by_key(|a| (a.u, a.w, a.stage));
    Ok(JointDistribution { cfg: cfg.clone(), sizes: b.sizes, branches: b.branches, aborts })
}

impl<P: Probability> JointDistribution<P> {
    /// Total probability of all branches and aborts.
    pub fn mass(&self) -> P {
        self.branches
            .iter()
            .map(|b| b.prob.clone())
            .chain(self.aborts.iter().map(|a| a.prob.clone()))
            .fold(P::zero(), |acc, p| acc + p)
    }

    /// Probability that no party aborts (`J = 1`).
    pub fn p_complete(&self) -> f64 {
        let mut sum = crate::scalar::KahanSum::new();
        sum.extend(self.branches.iter().map(|b| b.prob.to_f64()));
        sum.value()
    }

    pub fn abort_prob(&self, stage: AbortStage) -> f64 {
        let mut sum = crate::scalar::KahanSum::new();
        sum.extend(self.aborts.iter().filter(|a| a.stage == stage).map(|a| a.prob.to_f64()));
        sum.value()
    }

    /// Number of `J = 1` atoms.
    pub fn atom_count(&self) -> u64 {
        (self.branches.len() as u64) << (self.sizes.n + self.sizes.files * self.sizes.m_total)
    }

    /// Calls `f` on every `J = 1` atom.
    pub fn for_each_atom(&self, mut f: impl FnMut(&Atom<'_, P>)) {
        let s = self.sizes;
        let x_count = 1u64 << s.n;
        let k_count = 1u64 << (s.files * s.m_total);
        let scale = 1.0 / (x_count * k_count) as f64;
        for branch in &self.branches {
            let prob = branch.prob.to_f64() * scale;
            for x in 0..x_count {
                for k in 0..k_count {
                    let pad_bits = branch
                        .pads
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (i, &(kbit, pos))| acc | ((k >> kbit ^ x >> pos) & 1) << i);
                    f(&Atom { branch, x, k, pad_bits, prob });
                }
            }
        }
    }

    /// Rebuilds the full transcript of one atom.
    pub fn transcript(&self, branch: &Branch<P>, x: u64, k: u64) -> Transcript {
        let s = self.sizes;
        let m = s.m_total;
        let pad = |sets: &[IndexSet], offset: usize| -> Vec<BitString> {
            sets.iter()
                .enumerate()
                .map(|(j, set)| {
                    set.iter()
                        .enumerate()
                        .map(|(b, pos)| (k >> (j * m + offset + b) ^ x >> pos) & 1 == 1)
                        .collect()
                })
                .collect()
        };
        let mut t = Transcript::new();
        t.push(Party::Bob, Tag::Announce, Payload::Sets(branch.bob.to_sets()));
        if self.cfg.variant == Variant::ExposeChoice {
            t.push(Party::Bob, Tag::ExposedChoice, Payload::Choice(branch.u));
        }
        t.push(Party::Cathy, Tag::Announce, Payload::Sets(branch.cathy.to_sets()));
        t.push(Party::Alice, Tag::Ciphertexts, Payload::Bits(pad(&branch.key_positions, 0)));
        if s.high_erasure() {
            t.push(Party::Bob, Tag::OtRequest, Payload::Sets(branch.bob_ot.clone()));
            t.push(Party::Alice, Tag::OtResponse, Payload::Bits(pad(&branch.bob_ot, s.m_dot)));
            t.push(Party::Cathy, Tag::OtRequest, Payload::Sets(branch.cathy_ot.clone()));
            t.push(Party::Alice, Tag::OtResponse, Payload::Bits(pad(&branch.cathy_ot, s.m_dot)));
        }
        t
    }
}
