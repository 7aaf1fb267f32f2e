//! Seeded Monte Carlo statistics at realistic block lengths.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::protocol::{run_protocol, AbortStage, Database, ProtocolError, RunStatus, Tag};
use crate::rates::{size_plan, ProtocolParams};
use crate::rng::{derive_seed, rng_from_seed, RunSeeds};
use crate::scalar::Real;

/// Total variation between structural transcript digests of two choice
/// values, estimated from the trials with those values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiceTv {
    /// `"U"` or `"W"`.
    pub variable: String,
    pub a: usize,
    pub b: usize,
    pub tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub trials: usize,
    pub completed: usize,
    pub abort_rate: f64,
    pub aborts_by_stage: BTreeMap<AbortStage, usize>,
    pub decode_errors: usize,
    pub decode_error_rate: f64,
    /// Mean over completed runs; 0 when none completed.
    pub mean_achieved_rate: f64,
    pub min_achieved_rate: Option<f64>,
    pub transcript_tv: Vec<ChoiceTv>,
}

type Digest = Vec<(u8, Tag, usize, Vec<usize>)>;

struct Trial {
    u: usize,
    w: usize,
    status: RunStatus,
    decode_error: bool,
    rate: f64,
    m_total: usize,
    n: usize,
    digest: Digest,
}

/// Seed of trial `index` in the schedule rooted at `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    derive_seed(seed, "trial", index)
}

/// Runs `trials` independent executions with uniform `U`, `W`, and files.
pub fn monte_carlo_stats<T: Real>(
    params: &ProtocolParams<T>,
    trials: usize,
    seed: u64,
) -> Result<McStats, ProtocolError> {
    let plan = size_plan(params)?;
    let files = params.files;
    let m = plan.sizes.m_total;
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let ts = trial_seed(seed, i);
            let mut rng = rng_from_seed(derive_seed(ts, "inputs", 0));
            let u = rng.random_range(0..files);
            let w = rng.random_range(0..files);
            let db = Database::random(files, m, &mut rng);
            let out = run_protocol(params, &db, u, w, &RunSeeds::derive(ts))?;
            Ok(Trial {
                u,
                w,
                status: out.status,
                decode_error: out.decode_error(),
                rate: out.achieved_rate,
                m_total: out.sizes.m_total,
                n: out.sizes.n,
                digest: out.transcript.structural_digest(),
            })
        })
        .collect::<Result<_, ProtocolError>>()?;
    Ok(summarize(&results, files))
}

fn summarize(results: &[Trial], files: usize) -> McStats {
    let trials = results.len();
    let completed: Vec<&Trial> = results.iter().filter(|t| t.status.is_completed()).collect();
    let mut aborts_by_stage = BTreeMap::new();
    for t in results {
        if let Some(a) = t.status.abort() {
            *aborts_by_stage.entry(a.stage).or_insert(0) += 1;
        }
    }
    let decode_errors = completed.iter().filter(|t| t.decode_error).count();
    // Integer totals keep the mean exact when every run has the same rate.
    let bits: usize = completed.iter().map(|t| t.m_total).sum();
    let uses: usize = completed.iter().map(|t| t.n).sum();
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };

    let mut transcript_tv = Vec::new();
    for (name, pick) in [("U", (|t: &Trial| t.u) as fn(&Trial) -> usize), ("W", |t: &Trial| t.w)] {
        let mut by_choice: Vec<HashMap<&Digest, usize>> = vec![HashMap::new(); files];
        for t in results {
            *by_choice[pick(t)].entry(&t.digest).or_insert(0) += 1;
        }
        for a in 0..files {
            for b in a + 1..files {
                transcript_tv.push(ChoiceTv { variable: name.into(), a, b, tv: empirical_tv(&by_choice[a], &by_choice[b]) });
            }
        }
    }

    McStats {
        trials,
        completed: completed.len(),
        abort_rate: ratio(trials - completed.len(), trials),
        aborts_by_stage,
        decode_errors,
        decode_error_rate: ratio(decode_errors, completed.len()),
        mean_achieved_rate: ratio(bits, uses),
        min_achieved_rate: completed.iter().map(|t| t.rate).reduce(f64::min),
        transcript_tv,
    }
}

fn empirical_tv(a: &HashMap<&Digest, usize>, b: &HashMap<&Digest, usize>) -> f64 {
    let na: usize = a.values().sum();
    let nb: usize = b.values().sum();
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let freq = |m: &HashMap<&Digest, usize>, k: &Digest, total: usize| {
        m.get(k).copied().unwrap_or(0) as f64 / total as f64
    };
    let keys: std::collections::HashSet<&&Digest> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (freq(a, k, na) - freq(b, k, nb)).abs()).sum::<f64>() / 2.0
}
