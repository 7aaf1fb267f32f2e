//! Acceptance criteria. Prints one line per criterion and exits nonzero if
//! any fails.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use pdt_core::audit::{announcement_tv, monte_carlo_stats, privacy_report, TinyConfig, PRIVACY_THRESHOLD};
use pdt_core::protocol::Variant;
use pdt_core::{capacity_2p, rate_bounds, Params};
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn capacity_consistency() -> Outcome {
    let grid: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let mut worst: f64 = 0.0;
    let mut ordered = true;
    for &a in &grid {
        for &b in &grid {
            let c = capacity_2p(a, b).unwrap();
            let two = rate_bounds(a, b, 2).unwrap();
            worst = worst.max((two.r_lb - c).abs()).max((two.r_ub - c).abs());
            for files in 2..=6 {
                let r = rate_bounds(a, b, files).unwrap();
                ordered &= r.r_lb <= r.r_ub;
            }
        }
    }
    outcome(worst <= 1e-12 && ordered, format!("max |bound - c2p| = {worst:.1e}, r_lb <= r_ub for N in 2..6: {ordered}"))
}

fn rate_point(eps: f64, floor: f64, seed: u64) -> Outcome {
    let p = Params::new(100_000, 2, eps, eps, 0.01).unwrap();
    let stats = monte_carlo_stats(&p, 100, seed).unwrap();
    let min_rate = stats.min_achieved_rate.unwrap_or(0.0);
    let abort_ok = eps != 0.5 || stats.abort_rate <= 0.01;
    outcome(
        abort_ok && stats.decode_errors == 0 && stats.completed > 0 && min_rate >= floor,
        format!(
            "abort_rate {}, decode errors {}/{}, min rate {min_rate:.5} (floor {floor})",
            stats.abort_rate, stats.decode_errors, stats.completed
        ),
    )
}

fn exact_privacy() -> Outcome {
    let half = Ratio::new(1, 2);
    let configs = [
        TinyConfig::new(4, 2, half, half),
        TinyConfig::new(6, 3, half, half),
        TinyConfig::new(6, 2, Ratio::new(2, 3), Ratio::new(3, 4)).with_sizes(2, 1).with_high_erasure(2, 2),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for cfg in &configs {
        match privacy_report(cfg) {
            Ok(r) => {
                let worst = r.conditions.iter().map(|c| c.value).fold(0.0, f64::max);
                let mass_ok = (r.mass - 1.0).abs() <= 1e-12;
                pass &= r.pass() && mass_ok && r.conditions.len() == 8;
                parts.push(format!("n={} N={} high={}: max {worst:.1e}, mass-1 {:.1e}", r.n, r.files, r.high_erasure, r.mass - 1.0));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("n={} N={}: {e}", cfg.n, cfg.files));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn correctness_at_scale() -> Outcome {
    let grid = [0.3, 0.5, 0.7];
    let points: Vec<(f64, f64)> = grid.iter().flat_map(|&a| grid.iter().map(move |&b| (a, b))).collect();
    let per_point = 10_000usize.div_ceil(points.len());
    let results: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let p = Params::new(10_000, 2, a, b, 0.02).unwrap();
            monte_carlo_stats(&p, per_point, 500 + i as u64).unwrap()
        })
        .collect();
    let runs: usize = results.iter().map(|s| s.trials).sum();
    let completed: usize = results.iter().map(|s| s.completed).sum();
    let errors: usize = results.iter().map(|s| s.decode_errors).sum();
    outcome(errors == 0 && completed > 0, format!("{runs} runs, {completed} completed, {errors} decode failures"))
}

fn abort_decay() -> Outcome {
    let lengths = [1_000usize, 10_000, 100_000];
    let trials = 1_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for schedule in 0..5u64 {
        let rates: Vec<f64> = lengths
            .iter()
            .map(|&n| {
                let p = Params::new(n, 2, 0.5, 0.5, 0.02).unwrap();
                monte_carlo_stats(&p, trials, 9_000 + schedule).unwrap().abort_rate
            })
            .collect();
        pass &= rates.windows(2).all(|w| w[1] <= w[0]) && rates[2] < 1e-3;
        parts.push(format!("{rates:?}"));
    }
    outcome(pass, format!("abort rates at n = 1e3, 1e4, 1e5 ({trials} trials): {}", parts.join(" ")))
}

fn announcement_privacy() -> Outcome {
    let half = Ratio::new(1, 2);
    let configs = [
        TinyConfig::new(4, 2, half, half),
        TinyConfig::new(4, 2, Ratio::new(1, 3), Ratio::new(3, 4)),
        TinyConfig::new(5, 2, Ratio::new(2, 5), Ratio::new(3, 5)),
        TinyConfig::new(5, 3, half, Ratio::new(2, 3)),
        TinyConfig::new(6, 3, half, half),
        TinyConfig::new(6, 2, Ratio::new(2, 3), Ratio::new(3, 4)).with_sizes(2, 1).with_high_erasure(2, 2),
    ];
    let mut worst: f64 = 0.0;
    for cfg in &configs {
        let tv = announcement_tv(cfg).unwrap();
        worst = worst.max(tv.bob_across_u).max(tv.cathy_across_w);
    }
    let exposed = announcement_tv(&configs[0].clone().with_variant(Variant::ExposeChoice)).unwrap();
    outcome(
        worst <= 1e-12 && exposed.bob_across_u >= 0.5,
        format!("faithful max TV {worst:.1e} over {} configs, expose-choice TV {}", configs.len(), exposed.bob_across_u),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("capacity consistency", capacity_consistency, Duration::from_secs(1)),
        ("rate at eps=0.5", || rate_point(0.5, 0.235, 21), Duration::from_secs(30)),
        ("rate at eps=0.7", || rate_point(0.7, 0.189, 22), Duration::from_secs(60)),
        ("exact privacy", exact_privacy, Duration::from_secs(300)),
        ("correctness at scale", correctness_at_scale, Duration::from_secs(600)),
        ("abort decay", abort_decay, Duration::from_secs(600)),
        ("announcement privacy", announcement_privacy, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if elapsed > *limit {
            result.pass = false;
            result.detail.push_str(&format!(", over time limit {limit:?}"));
        }
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name} ({:.2}s): {}", i + 1, elapsed.as_secs_f64(), result.detail);
        failed += usize::from(!result.pass);
    }
    println!("privacy threshold {PRIVACY_THRESHOLD:e}; {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
