use std::io::Write;

use num_rational::Ratio;
use pdt_core::audit::{privacy_report, AuditError, TinyConfig};
use pdt_core::protocol::{run_variant, Variant};
use pdt_core::rng::{derive_seed, rng_from_seed};
use pdt_core::{rate_bounds, size_plan, Bounds, Database, Params, RunRecord, RunSeeds};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{AuditArgs, Mutation, ParamArgs, SeedArg, SweepArgs, EXIT_ABORT, EXIT_AUDIT, EXIT_CONFIG, EXIT_OK};

type CmdResult = Result<u8, String>;

fn print_json<T: Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct CapacityOut {
    eps1: f64,
    eps2: f64,
    #[serde(rename = "N")]
    files: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    c2p: Option<f64>,
    r_lb: f64,
    r_ub: f64,
    r_ex: f64,
}

pub fn capacity(eps1: f64, eps2: f64, files: usize) -> CmdResult {
    let b = rate_bounds(eps1, eps2, files).map_err(|e| e.to_string())?;
    print_json(&CapacityOut { eps1, eps2, files, c2p: b.c2p, r_lb: b.r_lb, r_ub: b.r_ub, r_ex: b.r_ex })?;
    Ok(EXIT_OK)
}

fn params(p: &ParamArgs) -> Result<Params, String> {
    Params::new(p.n, p.files, p.eps1, p.eps2, p.delta).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PlanOut {
    params: Params,
    #[serde(flatten)]
    plan: pdt_core::Plan,
    rate: f64,
    bounds: Bounds,
}

pub fn plan(p: &ParamArgs) -> CmdResult {
    let params = params(p)?;
    let plan = size_plan(&params).map_err(|e| e.to_string())?;
    let bounds = params.bounds().map_err(|e| e.to_string())?;
    print_json(&PlanOut { params, plan, rate: plan.sizes.rate(), bounds })?;
    Ok(EXIT_OK)
}

pub fn run(p: &ParamArgs, seed: &SeedArg, u: Option<usize>, w: Option<usize>, dump: bool) -> CmdResult {
    let params = params(p)?;
    let seed = seed.resolve()?;
    let m = size_plan(&params).map_err(|e| e.to_string())?.sizes.m_total;
    let mut rng = rng_from_seed(derive_seed(seed, "inputs", 0));
    let drawn_u = rng.random_range(0..params.files);
    let drawn_w = rng.random_range(0..params.files);
    let db = Database::random(params.files, m, &mut rng);
    let u = u.unwrap_or(drawn_u);
    let w = w.unwrap_or(drawn_w);
    let seeds = RunSeeds::derive(seed);
    let out = run_variant(&params, &db, u, w, &seeds, Variant::Faithful).map_err(|e| e.to_string())?;
    print_json(&RunRecord::new(params, seed, seeds, &out, dump))?;
    Ok(if out.status.is_completed() { EXIT_OK } else { EXIT_ABORT })
}

#[derive(Serialize)]
struct SweepRow {
    eps1: f64,
    eps2: f64,
    #[serde(rename = "N")]
    files: usize,
    n: usize,
    delta: f64,
    trials: usize,
    abort_rate: f64,
    decode_error_rate: f64,
    mean_rate: f64,
    r_lb: f64,
    r_ub: f64,
    c2p: Option<f64>,
}

pub fn sweep(s: &SweepArgs) -> CmdResult {
    let seed = s.seed.resolve()?;
    let points: Vec<(f64, f64)> =
        s.eps1_grid.iter().flat_map(|&a| s.eps2_grid.iter().map(move |&b| (a, b))).collect();
    if points.is_empty() {
        return Err("empty grid".into());
    }
    if let Some(bad) = points.iter().flat_map(|&(a, b)| [a, b]).find(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(format!("grid value {bad} is outside (0, 1)"));
    }
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, &(eps1, eps2))| {
            let params = Params::new(s.n, s.files, eps1, eps2, s.delta)
                .map_err(|e| format!("eps1 = {eps1}, eps2 = {eps2}: {e}"))?;
            let stats = pdt_core::audit::monte_carlo_stats(&params, s.trials, derive_seed(seed, "sweep", i as u64))
                .map_err(|e| e.to_string())?;
            let b = params.bounds().map_err(|e| e.to_string())?;
            Ok(SweepRow {
                eps1,
                eps2,
                files: s.files,
                n: s.n,
                delta: s.delta,
                trials: s.trials,
                abort_rate: stats.abort_rate,
                decode_error_rate: stats.decode_error_rate,
                mean_rate: stats.mean_achieved_rate,
                r_lb: b.r_lb,
                r_ub: b.r_ub,
                c2p: b.c2p,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;

    let sink: Box<dyn Write> = match &s.out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    for row in &rows {
        writer.serialize(row).map_err(|e| e.to_string())?;
    }
    writer.flush().map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

/// Parses `0.25`, `1`, or `2/3` into an exact ratio.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    let bad = || format!("{text:?} is not a decimal or fraction");
    if text.contains('/') {
        let (a, b) = text.split_once('/').ok_or_else(bad)?;
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    let num: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let total = whole.checked_mul(den).and_then(|w| w.checked_add(num)).ok_or_else(bad)?;
    Ok(Ratio::new(total, den))
}

#[derive(Serialize)]
struct BudgetOut {
    error: &'static str,
    bound: f64,
    budget: f64,
}

pub fn audit(a: &AuditArgs) -> CmdResult {
    let mut cfg = TinyConfig::new(a.n, a.files, parse_ratio(&a.eps1)?, parse_ratio(&a.eps2)?)
        .with_sizes(a.size_l, a.size_lt)
        .with_budget(a.budget);
    if a.high_erasure {
        cfg = cfg.with_high_erasure(a.size_c, a.size_ct);
    }
    if let Some(Mutation::ExposeChoice) = a.mutate {
        cfg = cfg.with_variant(Variant::ExposeChoice);
    }
    match privacy_report(&cfg) {
        Ok(report) => {
            print_json(&report)?;
            Ok(if report.pass() { EXIT_OK } else { EXIT_AUDIT })
        }
        Err(AuditError::Budget { bound, budget }) => {
            print_json(&BudgetOut { error: "budget_exceeded", bound, budget })?;
            eprintln!("error: enumeration needs up to {bound:.3e} atoms, budget is {budget:.3e}");
            Ok(EXIT_CONFIG)
        }
        Err(e) => Err(e.to_string()),
    }
}
