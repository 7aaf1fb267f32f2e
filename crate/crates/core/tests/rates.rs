use pdt_core::{capacity_2p, rate_bounds, size_plan, Params, ProtocolParams, RateError, SetSizes};
use proptest::prelude::*;

type Point = (usize, usize, f64, f64, f64);

/// (n, N, eps1, eps2, delta) -> (L, Lt, C, Ct, S, St, m_dot, m_ddot, m_total),
/// computed independently in exact rationals.
const FROZEN: &[(Point, [usize; 9])] = &[
    ((1000, 2, 0.3, 0.3, 0.05), [250, 125, 0, 0, 0, 0, 59, 0, 59]),
    ((1000, 2, 0.7, 0.7, 0.05), [250, 125, 400, 200, 400, 200, 59, 90, 149]),
    ((100_000, 2, 0.5, 0.5, 0.01), [49000, 48020, 0, 0, 0, 0, 23769, 0, 23769]),
    ((100_000, 2, 0.7, 0.7, 0.01), [29000, 16820, 40000, 23200, 40000, 23200, 8325, 11368, 19693]),
    ((100_000, 2, 0.6, 0.8, 0.01), [39000, 14820, 20000, 46800, 20000, 7756, 7335, 3800, 11135]),
    ((100_000, 2, 0.8, 0.6, 0.01), [19000, 14820, 60000, 7600, 9549, 7600, 7335, 3724, 11059]),
    ((50_000, 3, 0.8, 0.9, 0.02), [9000, 2160, 20000, 18900, 20000, 5107, 705, 1600, 2305]),
    ((20_000, 4, 0.4, 0.7, 0.02), [2266, 1933, 0, 0, 0, 0, 473, 0, 473]),
];

fn as_array(s: &SetSizes) -> [usize; 9] {
    [s.size_l, s.size_lt, s.size_c, s.size_ct, s.size_s, s.size_st, s.m_dot, s.m_ddot, s.m_total]
}

#[test]
fn plans_match_rational_oracle() {
    for &((n, files, e1, e2, d), want) in FROZEN {
        let plan = size_plan(&ProtocolParams { n, files, eps1: e1, eps2: e2, delta: d }).unwrap();
        assert_eq!(as_array(&plan.sizes), want, "n={n} N={files} eps=({e1},{e2}) delta={d}");
    }
}

#[test]
fn high_erasure_plan_rate() {
    let p = Params::new(100_000, 2, 0.7, 0.7, 0.01).unwrap();
    let rate = size_plan(&p).unwrap().sizes.rate();
    assert!((rate - 0.19693).abs() < 1e-12);
    assert!(rate >= 0.9 * capacity_2p(0.7, 0.7).unwrap());
}

#[test]
fn single_precision_agrees() {
    let b32 = rate_bounds(0.7f32, 0.7f32, 2).unwrap();
    let b64 = rate_bounds(0.7f64, 0.7f64, 2).unwrap();
    assert!((b32.r_lb as f64 - b64.r_lb).abs() < 1e-6);
    let p = ProtocolParams { n: 1000, files: 2, eps1: 0.3f32, eps2: 0.3f32, delta: 0.05f32 };
    assert_eq!(size_plan(&p).unwrap().sizes.m_dot, 59);
}

#[test]
fn infeasible_plans_are_named() {
    let err = size_plan(&ProtocolParams { n: 10, files: 2, eps1: 0.5, eps2: 0.5, delta: 0.5 }).unwrap_err();
    assert!(matches!(err, RateError::Infeasible(ref m) if m.contains("delta")));
    let err = size_plan(&ProtocolParams { n: 10, files: 1, eps1: 0.5, eps2: 0.5, delta: 0.1 }).unwrap_err();
    assert_eq!(err, RateError::FileCount(1));
    let err = size_plan(&ProtocolParams { n: 2, files: 2, eps1: 0.5, eps2: 0.5, delta: 0.1 }).unwrap_err();
    assert!(matches!(err, RateError::Infeasible(_)));
}

#[test]
fn capacity_on_percent_grid() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut best = (0.0, 0.0, 0.0);
    for &a in &grid {
        for &b in &grid {
            let c = capacity_2p(a, b).unwrap();
            assert_eq!(c, capacity_2p(b, a).unwrap());
            if a == 0.0 || a == 1.0 || b == 0.0 || b == 1.0 {
                assert_eq!(c, 0.0);
            }
            if c > best.0 {
                best = (c, a, b);
            }
        }
    }
    assert_eq!(best, (0.25, 0.5, 0.5));
}

fn eps() -> impl Strategy<Value = f64> {
    (1u32..100).prop_map(|i| i as f64 / 100.0)
}

proptest! {
    #[test]
    fn bounds_are_ordered(e1 in eps(), e2 in eps(), files in 2usize..=6) {
        let b = rate_bounds(e1, e2, files).unwrap();
        prop_assert!(b.r_lb >= 0.0);
        prop_assert!(b.r_lb <= b.r_ub);
        if files == 2 {
            let c = b.c2p.unwrap();
            prop_assert!((b.r_lb - c).abs() <= 1e-12);
            prop_assert!((b.r_ub - c).abs() <= 1e-12);
        } else {
            prop_assert!(b.c2p.is_none());
        }
    }

    #[test]
    fn plan_geometry(
        n in 200usize..200_000,
        files in 2usize..=5,
        e1 in eps(),
        e2 in eps(),
        d in (1u32..5).prop_map(|i| i as f64 / 100.0),
    ) {
        let p = ProtocolParams { n, files, eps1: e1, eps2: e2, delta: d };
        let Ok(plan) = size_plan(&p) else { return Ok(()) };
        let s = plan.sizes;
        prop_assert!(s.size_l * files <= n);
        prop_assert!(s.size_c <= n - files * s.size_l);
        prop_assert!(s.size_lt * files + s.size_ct <= files * s.size_l);
        prop_assert!(s.size_s <= s.size_c && s.size_st <= s.size_ct);
        prop_assert!(s.m_ddot as f64 <= (s.size_st as f64 * (1.0 / files as f64 - d) * (1.0 + 1e-9)).floor());
        prop_assert!(s.m_ddot as f64 <= (s.size_s as f64 * plan.r2 * (1.0 + 1e-9)).floor());
        prop_assert_eq!(s.m_total, s.m_dot + s.m_ddot);
        let r_lb = rate_bounds(e1, e2, files).unwrap().r_lb;
        prop_assert!(s.rate() <= r_lb + 2.0 * d + 1e-12);
        prop_assert_eq!(size_plan(&p).unwrap(), plan);
    }
}
