//! Capacity, bound, and set-size formulas for two receivers behind
//! independent erasure channels.
//!
//! Everything here is a pure function of its arguments. The formulas are
//! generic over [`Real`] so they can be evaluated in `f32` or `f64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RateError {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("file count N = {0} must be at least 2")]
    FileCount(usize),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn check_unit<T: Real>(name: &'static str, value: T) -> Result<(), RateError> {
    if value >= T::zero() && value <= T::one() {
        Ok(())
    } else {
        Err(RateError::Domain { name, value: value.to_f64().unwrap_or(f64::NAN) })
    }
}

/// Two-file capacity: `min(eps2 (1 - eps1), eps1 (1 - eps2), eps1 eps2)`.
pub fn capacity_2p<T: Real>(eps1: T, eps2: T) -> Result<T, RateError> {
    check_unit("eps1", eps1)?;
    check_unit("eps2", eps2)?;
    let one = T::one();
    Ok((eps2 * (one - eps1)).min(eps1 * (one - eps2)).min(eps1 * eps2))
}

/// Upper and lower bounds on the N-file capacity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBounds<T> {
    /// Exact two-file capacity; present only when `N = 2`.
    pub c2p: Option<T>,
    pub r_ub: T,
    pub r_lb: T,
    /// Extra rate from the embedded two-party transfers; zero unless both
    /// erasure probabilities exceed `(N-1)/N`.
    pub r_ex: T,
}

/// True when both channels are erasure-heavy enough that Bob and Cathy keep
/// leftover erased positions (`eps > (N-1)/N`, strict).
pub fn high_erasure_regime<T: Real>(eps1: T, eps2: T, files: usize) -> bool {
    let n = T::of(files);
    let threshold = (n - T::one()) / n;
    eps1 > threshold && eps2 > threshold
}

pub fn rate_bounds<T: Real>(eps1: T, eps2: T, files: usize) -> Result<RateBounds<T>, RateError> {
    check_unit("eps1", eps1)?;
    check_unit("eps2", eps2)?;
    if files < 2 {
        return Err(RateError::FileCount(files));
    }
    let one = T::one();
    let n = T::of(files);
    let nm1 = n - one;
    let threshold = nm1 / n;

    let r_ub = (eps2 * (one - eps1)).min(eps1 * (one - eps2)).min(eps1 * eps2 / nm1);

    let high1 = eps1 > threshold;
    let high2 = eps2 > threshold;
    let (r_lb, r_ex) = match (high1, high2) {
        (false, false) => ((eps1 / nm1) * (eps2 / nm1), T::zero()),
        (false, true) => ((eps1 / nm1) * (one - eps2), T::zero()),
        (true, false) => ((eps2 / nm1) * (one - eps1), T::zero()),
        (true, true) => {
            let ex = ((one - eps2) * (one - n * (one - eps1)))
                .min((one - eps1) * (one - n * (one - eps2)));
            ((one - eps1) * (one - eps2) + ex, ex)
        }
    };

    // The two sides coincide at N = 2 and may differ by one rounding step.
    let r_lb = r_lb.min(r_ub);
    let c2p = if files == 2 { Some(capacity_2p(eps1, eps2)?) } else { None };
    Ok(RateBounds { c2p, r_ub, r_lb, r_ex })
}

/// Simulation configuration: block length, file count, erasure
/// probabilities, and the slack `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams<T> {
    /// Broadcast channel uses.
    pub n: usize,
    /// Number of files in the database.
    #[serde(rename = "N")]
    pub files: usize,
    pub eps1: T,
    pub eps2: T,
    pub delta: T,
}

/// Default slack when none is given.
pub const DEFAULT_DELTA: f64 = 0.01;

impl<T: Real> ProtocolParams<T> {
    /// Builds parameters and checks that a size plan exists for them.
    pub fn new(n: usize, files: usize, eps1: T, eps2: T, delta: T) -> Result<Self, RateError> {
        let params = Self { n, files, eps1, eps2, delta };
        size_plan(&params)?;
        Ok(params)
    }

    pub fn bounds(&self) -> Result<RateBounds<T>, RateError> {
        rate_bounds(self.eps1, self.eps2, self.files)
    }
}

/// Integer set sizes that drive one protocol execution.
///
/// Built either by [`size_plan`] from real parameters or directly (tiny
/// enumerable configurations in the auditor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetSizes {
    pub n: usize,
    #[serde(rename = "N")]
    pub files: usize,
    /// Size of each of Bob's announced sets.
    pub size_l: usize,
    /// Size of each of Cathy's announced sets.
    pub size_lt: usize,
    /// Bob's leftover erased set (Cathy's two-party resource).
    pub size_c: usize,
    /// Cathy's leftover erased set (Bob's two-party resource).
    pub size_ct: usize,
    /// Truncated prefix of Bob's leftover set used by Cathy's transfer.
    pub size_s: usize,
    /// Truncated prefix of Cathy's leftover set used by Bob's transfer.
    pub size_st: usize,
    /// Bits of each file carried by the XOR-pad phase.
    pub m_dot: usize,
    /// Bits of each file carried by the embedded two-party transfers.
    pub m_ddot: usize,
    pub m_total: usize,
}

impl SetSizes {
    /// Whether the embedded two-party transfer phase runs.
    pub fn high_erasure(&self) -> bool {
        self.m_ddot > 0
    }

    /// Erased positions Bob needs: `N - 1` bad sets plus the leftover set.
    pub fn bob_erased_budget(&self) -> usize {
        (self.files - 1) * self.size_l + self.size_c
    }

    /// Erased positions Cathy needs inside the union of Bob's sets.
    pub fn cathy_erased_budget(&self) -> usize {
        (self.files - 1) * self.size_lt + self.size_ct
    }

    pub fn rate(&self) -> f64 {
        self.m_total as f64 / self.n as f64
    }
}

/// Deterministic sizes derived from [`ProtocolParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizePlan<T> {
    pub r1: T,
    pub r2: T,
    #[serde(flatten)]
    pub sizes: SetSizes,
}

fn to_count<T: Real>(x: T) -> usize {
    x.max(T::zero()).to_usize().unwrap_or(0)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn size_plan<T: Real>(params: &ProtocolParams<T>) -> Result<SizePlan<T>, RateError> {
    let ProtocolParams { n, files, eps1, eps2, delta } = *params;
    check_unit("eps1", eps1)?;
    check_unit("eps2", eps2)?;
    if files < 2 {
        return Err(RateError::FileCount(files));
    }
    if n == 0 {
        return Err(RateError::Infeasible("n must be positive".into()));
    }
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(RateError::Infeasible(format!("delta = {delta} must be positive")));
    }

    let one = T::one();
    let nf = T::of(n);
    let big_n = T::of(files);
    let nm1 = big_n - one;

    let cap1 = (eps1 / nm1).min(one - eps1);
    let cap2 = (eps2 / nm1).min(one - eps2);
    let r1 = cap1 - delta;
    let r2 = cap2 - delta;
    if !(r1 > T::zero()) {
        return Err(RateError::Infeasible(format!(
            "delta = {delta} must be below min(eps1/(N-1), 1-eps1) = {cap1}"
        )));
    }
    if !(r2 > T::zero()) {
        return Err(RateError::Infeasible(format!(
            "delta = {delta} must be below min(eps2/(N-1), 1-eps2) = {cap2}"
        )));
    }

    let size_l = to_count((nf * r1).floor_tol());
    if size_l < 1 {
        return Err(RateError::Infeasible(format!("floor(n*r1) = 0 for n = {n}, r1 = {r1}")));
    }
    let union = T::of(files * size_l);
    let size_lt = to_count((union * r2).floor_tol());
    if size_lt < files {
        return Err(RateError::Infeasible(format!(
            "floor(N*|L|*r2) = {size_lt} must be at least N = {files}"
        )));
    }

    let high = high_erasure_regime(eps1, eps2, files);
    let (size_c, size_ct, size_s, size_st, m_ddot) = if high {
        let c_real = nf * (eps1 - nm1 * (one - eps1));
        let ct_real = union * (eps2 - nm1 * (one - eps2));
        let size_c = to_count(c_real.floor_tol());
        let size_ct = to_count(ct_real.floor_tol());
        // Bob's transfer over the Cathy-erased prefix yields 1/N - delta per
        // position; Cathy's over the Bob-erased prefix yields r2.
        let bob_yield = one / big_n - delta;
        let cathy_yield = r2;
        let size_st = if eps1 < eps2 {
            size_ct.min(to_count((c_real * cathy_yield / bob_yield).ceil_tol()))
        } else {
            size_ct
        };
        let size_s = if eps2 < eps1 {
            size_c.min(to_count((ct_real * bob_yield / cathy_yield).ceil_tol()))
        } else {
            size_c
        };
        let budget = (T::of(size_st) * bob_yield).min(T::of(size_s) * cathy_yield);
        (size_c, size_ct, size_s, size_st, to_count(budget.floor_tol()))
    } else {
        (0, 0, 0, 0, 0)
    };

    let m_dot = to_count(((one - delta) * T::of(size_lt) / big_n).floor_tol());
    let m_total = m_dot + m_ddot;
    if m_total == 0 {
        return Err(RateError::Infeasible("plan carries zero file bits".into()));
    }

    Ok(SizePlan {
        r1,
        r2,
        sizes: SetSizes {
            n,
            files,
            size_l,
            size_lt,
            size_c,
            size_ct,
            size_s,
            size_st,
            m_dot,
            m_ddot,
            m_total,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_2p(0.0, 0.9).unwrap(), 0.0);
        assert!(close(capacity_2p(0.5, 0.5).unwrap(), 0.25));
        assert!(close(capacity_2p(0.4, 0.6).unwrap(), 0.16));
        assert!(matches!(capacity_2p(1.5, 0.5), Err(RateError::Domain { name: "eps1", .. })));
        assert!(matches!(capacity_2p(0.5, -0.1), Err(RateError::Domain { name: "eps2", .. })));
    }

    #[test]
    fn bound_examples() {
        let b = rate_bounds(0.6, 0.6, 3).unwrap();
        assert!(close(b.r_ub, 0.18));
        assert!(close(b.r_lb, 0.09));
        assert_eq!(b.c2p, None);
        assert_eq!(b.r_ex, 0.0);

        let b = rate_bounds(0.7, 0.7, 2).unwrap();
        assert!(close(b.r_lb, 0.21));
        assert!(close(b.r_ub, 0.21));
        assert!(close(b.r_ex, 0.12));
        assert!(close(b.c2p.unwrap(), 0.21));

        assert_eq!(rate_bounds(0.5, 0.5, 1), Err(RateError::FileCount(1)));
    }

    #[test]
    fn regime_boundary_is_strict() {
        assert!(!high_erasure_regime(0.5, 0.9, 2));
        assert!(high_erasure_regime(0.51, 0.9, 2));
        let b = rate_bounds(0.5, 0.5, 2).unwrap();
        assert_eq!(b.r_ex, 0.0);
    }

    #[test]
    fn f32_evaluation_agrees() {
        let b = rate_bounds(0.7_f32, 0.7_f32, 2).unwrap();
        assert!((b.r_lb - 0.21).abs() < 1e-6);
    }

    #[test]
    fn plan_low_erasure() {
        let p = ProtocolParams { n: 1000, files: 2, eps1: 0.3, eps2: 0.3, delta: 0.05 };
        let plan = size_plan(&p).unwrap();
        assert!(close(plan.r1, 0.25) && close(plan.r2, 0.25));
        let s = plan.sizes;
        assert_eq!((s.size_l, s.size_lt, s.size_c, s.size_ct), (250, 125, 0, 0));
        assert_eq!((s.m_dot, s.m_ddot, s.m_total), (59, 0, 59));
    }

    #[test]
    fn plan_high_erasure() {
        let p = ProtocolParams { n: 1000, files: 2, eps1: 0.7, eps2: 0.7, delta: 0.05 };
        let s = size_plan(&p).unwrap().sizes;
        assert_eq!((s.size_l, s.size_c, s.size_lt, s.size_ct), (250, 400, 125, 200));
        assert_eq!((s.size_s, s.size_st), (400, 200));
        assert_eq!(s.m_ddot, 90);
        assert_eq!(s.m_dot, 59);
        assert_eq!(s.m_total, 149);
    }

    #[test]
    fn plan_truncates_prefix_of_less_erased_side() {
        // eps1 < eps2: Bob's resource is cut down to what Cathy's side can match.
        let p = ProtocolParams { n: 10_000, files: 2, eps1: 0.6, eps2: 0.8, delta: 0.01 };
        let s = size_plan(&p).unwrap().sizes;
        assert_eq!(s.size_s, s.size_c);
        let expected = (10_000.0 * 0.2 * 0.19 / 0.49_f64).ceil() as usize;
        assert_eq!(s.size_st, s.size_ct.min(expected));
        assert!(s.size_st < s.size_ct);

        let p = ProtocolParams { n: 10_000, files: 2, eps1: 0.8, eps2: 0.6, delta: 0.01 };
        let s = size_plan(&p).unwrap().sizes;
        assert_eq!(s.size_st, s.size_ct);
        assert!(s.size_s < s.size_c);
    }

    #[test]
    fn infeasible_plans_name_the_invariant() {
        let p = ProtocolParams { n: 10, files: 2, eps1: 0.5, eps2: 0.5, delta: 0.5 };
        match size_plan(&p) {
            Err(RateError::Infeasible(msg)) => assert!(msg.contains("eps1"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let p = ProtocolParams { n: 10, files: 2, eps1: 0.0, eps2: 0.5, delta: 0.01 };
        assert!(matches!(size_plan(&p), Err(RateError::Infeasible(_))));
        let p = ProtocolParams { n: 3, files: 2, eps1: 0.5, eps2: 0.5, delta: 0.01 };
        assert!(matches!(size_plan(&p), Err(RateError::Infeasible(_))));
        assert!(ProtocolParams::new(100, 2, 0.5, 0.5, 0.6).is_err());
    }
}
