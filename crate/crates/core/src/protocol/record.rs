//! Machine-readable summary of one run.

use serde::{Deserialize, Serialize};

use super::run::{RunOutcome, RunStatus};
use super::{AbortStage, Party, Payload, Tag};
use crate::rates::ProtocolParams;
use crate::rng::RunSeeds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageSummary {
    pub sender: Party,
    pub tag: Tag,
    /// Encoded payload length in bytes.
    pub length: usize,
}

/// Full payloads and channel outputs, rendered with `0`/`1`/`e` symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDump {
    pub x: String,
    pub y: String,
    pub z: String,
    pub payloads: Vec<Payload>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: ProtocolParams<f64>,
    pub seed: u64,
    pub seeds: RunSeeds,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abort_stage: Option<AbortStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abort_party: Option<Party>,
    pub u: usize,
    pub w: usize,
    pub achieved_rate: f64,
    pub m_total: usize,
    pub decode_ok: bool,
    pub transcript: Vec<MessageSummary>,
    /// SHA-256 of the concatenated payload encodings.
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<RunDump>,
}

impl RunRecord {
    pub fn new(params: ProtocolParams<f64>, seed: u64, seeds: RunSeeds, out: &RunOutcome, dump: bool) -> Self {
        let abort = out.status.abort();
        Self {
            params,
            seed,
            seeds,
            status: match out.status {
                RunStatus::Completed => "completed".to_string(),
                RunStatus::Aborted(_) => "aborted".to_string(),
            },
            abort_stage: abort.map(|a| a.stage),
            abort_party: abort.map(|a| a.party),
            u: out.views.u,
            w: out.views.w,
            achieved_rate: out.achieved_rate,
            m_total: out.sizes.m_total,
            decode_ok: !out.decode_error(),
            transcript: out
                .transcript
                .messages()
                .iter()
                .map(|m| MessageSummary { sender: m.sender, tag: m.tag, length: m.payload.to_bytes().len() })
                .collect(),
            digest: out.transcript.payload_digest(),
            dump: dump.then(|| RunDump {
                x: out.views.x.to_string(),
                y: out.views.y.to_string(),
                z: out.views.z.to_string(),
                payloads: out.transcript.messages().iter().map(|m| m.payload.clone()).collect(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_protocol, Database};
    use crate::rates::size_plan;
    use crate::rng::rng_from_seed;

    #[test]
    fn record_round_trips_through_json() {
        let p = ProtocolParams::new(400, 2, 0.5, 0.5, 0.05).unwrap();
        let m = size_plan(&p).unwrap().sizes.m_total;
        let db = Database::random(2, m, &mut rng_from_seed(1));
        let seeds = RunSeeds::derive(1);
        let out = run_protocol(&p, &db, 0, 1, &seeds).unwrap();
        let rec = RunRecord::new(p, 1, seeds, &out, true);
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["params"]["N"], 2);
        assert_eq!(json["digest"].as_str().unwrap().len(), 64);
        assert!(json["dump"]["y"].as_str().unwrap().chars().all(|c| "01e".contains(c)));
        assert_eq!(json["transcript"].as_array().unwrap().len(), out.transcript.len());
    }
}
