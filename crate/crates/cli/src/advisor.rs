//! Methodology recommendation from evaluated bounds: pick the smallest
//! valid bound among the sequence-to-sequence, local, and hybrid
//! guarantees, with a documented tie order.

use seqbound_core::bounds::BoundReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Methodology {
    Seq2seq,
    Local,
    Hybrid,
}

impl Methodology {
    /// Tie order: hybrid first (two-sided guarantee), then seq2seq, then
    /// local.
    fn tie_priority(self) -> u8 {
        match self {
            Methodology::Hybrid => 0,
            Methodology::Seq2seq => 1,
            Methodology::Local => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdvisorVerdict {
    pub recommendation: Methodology,
    pub evidence: BTreeMap<String, serde_json::Value>,
    pub tie_break: String,
    pub all_bounds_invalid: bool,
}

/// Choose the methodology with the minimal valid bound.
pub fn recommend(candidates: &[(Methodology, &BoundReport)]) -> (Methodology, String, bool) {
    let mut best: Option<(f64, Methodology)> = None;
    for (method, report) in candidates {
        let Some(value) = report.value else { continue };
        if !report.valid {
            continue;
        }
        best = match best {
            None => Some((value, *method)),
            Some((bv, bm)) => {
                if value < bv
                    || (value == bv && method.tie_priority() < bm.tie_priority())
                {
                    Some((value, *method))
                } else {
                    Some((bv, bm))
                }
            }
        };
    }
    match best {
        Some((_, m)) => (
            m,
            "minimal valid bound; exact ties resolve hybrid > seq2seq > local".to_string(),
            false,
        ),
        None => (
            Methodology::Hybrid,
            "all bounds invalid; default per the hybrid two-sided guarantee".to_string(),
            true,
        ),
    }
}
