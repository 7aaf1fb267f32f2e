//! Plug-in information measures over exact distributions.

use rustc_hash::FxHashMap;

use super::enumerate::{Atom, JointDistribution};
use super::AuditError;
use crate::scalar::{KahanSum, Probability};

/// Mutual information in bits of a distribution given as `(a, b, p)`
/// triples. Weights need not be normalized; repeated pairs are merged.
pub fn mutual_information<I>(triples: I) -> Result<f64, AuditError>
where
    I: IntoIterator<Item = (u128, u128, f64)>,
{
    let mut rows: Vec<(u128, u128, f64)> = triples.into_iter().filter(|t| t.2 > 0.0).collect();
    let mut total = KahanSum::new();
    total.extend(rows.iter().map(|t| t.2));
    let total = total.value();
    if total <= 0.0 {
        return Err(AuditError::ZeroProbability);
    }
    let mut p_a: FxHashMap<u128, KahanSum> = FxHashMap::default();
    for &(a, _, p) in &rows {
        p_a.entry(a).or_default().add(p);
    }
    rows.sort_unstable_by_key(|t| (t.1, t.0));

    let mut info = KahanSum::new();
    let mut start = 0;
    while start < rows.len() {
        let b = rows[start].1;
        let end = start + rows[start..].iter().take_while(|t| t.1 == b).count();
        let group = &rows[start..end];
        let mut p_b = KahanSum::new();
        p_b.extend(group.iter().map(|t| t.2));
        let p_b = p_b.value();
        let mut i = 0;
        while i < group.len() {
            let a = group[i].0;
            let mut p_ab = KahanSum::new();
            while i < group.len() && group[i].0 == a {
                p_ab.add(group[i].2);
                i += 1;
            }
            let p_ab = p_ab.value();
            let p_a = p_a[&a].value();
            info.add(p_ab / total * (p_ab * total / (p_a * p_b)).log2());
        }
        start = end;
    }
    Ok(info.value().max(0.0))
}

/// Shannon entropy in bits of an unnormalized weight list.
pub fn entropy<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    let weights: Vec<f64> = weights.into_iter().filter(|&p| p > 0.0).collect();
    let mut total = KahanSum::new();
    total.extend(weights.iter().copied());
    let total = total.value();
    let mut h = KahanSum::new();
    h.extend(weights.iter().map(|&p| -(p / total) * (p / total).log2()));
    h.value()
}

/// Random variables of an enumerated run. All are observed on `J = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// All files.
    K,
    /// Files other than `K_U`.
    KNotU,
    /// Files other than `K_W`.
    KNotW,
    /// Files other than `K_U` and `K_W`.
    KNotUW,
    U,
    W,
    X,
    /// Bob's channel output.
    Y,
    /// Cathy's channel output.
    Z,
    /// The full public transcript.
    F,
    /// Bob's first public messages: his sets and anything sent with them.
    BobSets,
    CathySets,
}

/// Views of the three parties.
pub const VIEW_A: &[Var] = &[Var::K, Var::X, Var::F];
pub const VIEW_B: &[Var] = &[Var::U, Var::Y, Var::F];
pub const VIEW_C: &[Var] = &[Var::W, Var::Z, Var::F];

/// Restriction applied on top of `J = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Given {
    #[default]
    Completed,
    SameChoice,
    DifferentChoice,
}

impl Given {
    fn holds<P>(self, atom: &Atom<'_, P>) -> bool {
        match self {
            Given::Completed => true,
            Given::SameChoice => atom.branch.u == atom.branch.w,
            Given::DifferentChoice => atom.branch.u != atom.branch.w,
        }
    }
}

struct Layout {
    n: u32,
    files: u32,
    m: u32,
}

impl Layout {
    /// Files not in `skip`, packed in index order.
    fn other_files(&self, k: u64, skip: &[usize]) -> u128 {
        let file = (1u64 << self.m) - 1;
        (0..self.files as usize)
            .filter(|j| !skip.contains(j))
            .fold(0u128, |acc, j| acc << self.m | (k >> (j as u32 * self.m) & file) as u128)
    }

    fn value<P>(&self, var: Var, a: &Atom<'_, P>) -> (u128, u32) {
        let b = a.branch;
        let kbits = self.files * self.m;
        let xmask = (1u64 << self.n) - 1;
        let received = |erased: u64| ((erased as u128) << self.n | (a.x & !erased & xmask) as u128, 2 * self.n);
        match var {
            Var::K => (a.k as u128, kbits),
            Var::KNotU => (self.other_files(a.k, &[b.u]), kbits),
            Var::KNotW => (self.other_files(a.k, &[b.w]), kbits),
            Var::KNotUW => (self.other_files(a.k, &[b.u, b.w]), kbits),
            Var::U => (b.u as u128, 2),
            Var::W => (b.w as u128, 2),
            Var::X => (a.x as u128, self.n),
            Var::Y => received(b.y_erased),
            Var::Z => received(b.z_erased),
            Var::F => ((b.skeleton as u128) << 32 | a.pad_bits as u128, 64),
            Var::BobSets => (b.bob_public as u128, 32),
            Var::CathySets => (b.cathy_public as u128, 32),
        }
    }

    fn pack<P>(&self, vars: &[Var], a: &Atom<'_, P>) -> u128 {
        let mut key = 0u128;
        let mut used = 0;
        for &v in vars {
            let (value, bits) = self.value(v, a);
            used += bits;
            assert!(used <= 128, "variable list too wide to pack");
            key = key << bits | value;
        }
        key
    }
}

/// `I(left; right | J = 1, given)` in bits.
pub fn conditional_mi<P: Probability>(
    joint: &JointDistribution<P>,
    left: &[Var],
    right: &[Var],
    given: Given,
) -> Result<f64, AuditError> {
    let s = joint.sizes;
    let layout = Layout { n: s.n as u32, files: s.files as u32, m: s.m_total as u32 };
    let mut rows = Vec::new();
    joint.for_each_atom(|atom| {
        if given.holds(atom) {
            rows.push((layout.pack(left, atom), layout.pack(right, atom), atom.prob));
        }
    });
    mutual_information(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_bits_share_nothing() {
        let rows = (0..4).map(|i| ((i & 1) as u128, (i >> 1) as u128, 0.25));
        assert!(mutual_information(rows).unwrap().abs() < 1e-15);
    }

    #[test]
    fn copied_bit_shares_one_bit() {
        let rows = [(0, 0, 0.5), (1, 1, 0.5)];
        assert!((mutual_information(rows).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_and_split_weights() {
        let rows = [(0, 0, 1.0), (0, 0, 1.0), (1, 1, 2.0), (1, 0, 0.0)];
        assert!((mutual_information(rows).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(mutual_information(Vec::new()), Err(AuditError::ZeroProbability));
    }

    #[test]
    fn noisy_copy_matches_closed_form() {
        // Binary symmetric channel with crossover 0.1 on a uniform bit.
        let q = 0.1_f64;
        let rows = [(0, 0, 0.5 * (1.0 - q)), (0, 1, 0.5 * q), (1, 0, 0.5 * q), (1, 1, 0.5 * (1.0 - q))];
        let h = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
        assert!((mutual_information(rows).unwrap() - (1.0 - h)).abs() < 1e-12);
        assert!((entropy([1.0, 1.0, 2.0]) - 1.5).abs() < 1e-15);
    }
}
