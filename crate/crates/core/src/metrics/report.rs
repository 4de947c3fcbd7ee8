//! Per-dimension evaluation table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::error::MetricError;
use super::passk::{avg_at_k, mean_pass_at_k, TrialRecord};
use crate::curate::{Dimension, Schema};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub dimension: Dimension,
    pub items: usize,
    pub avg_at_k: f64,
    pub pass_at_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k: usize,
    pub rows: Vec<DimensionRow>,
    /// All items pooled.
    pub overall: Totals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub items: usize,
    pub avg_at_k: f64,
    pub pass_at_k: f64,
}

/// Groups `(attribute_id, trials)` pairs by schema dimension. Dimensions
/// without items are left out.
pub fn dimension_report(
    schema: &Schema,
    trials: &[(String, TrialRecord)],
    k: usize,
) -> Result<EvalReport, MetricError> {
    let mut by_dim: BTreeMap<Dimension, Vec<TrialRecord>> = BTreeMap::new();
    for (attr, t) in trials {
        let spec = schema
            .get(attr)
            .ok_or_else(|| MetricError::Argument(alloc::format!("unknown attribute {attr:?}")))?;
        by_dim.entry(spec.dimension).or_default().push(t.clone());
    }
    let mut rows = Vec::new();
    for d in Dimension::ALL {
        if let Some(recs) = by_dim.get(&d) {
            rows.push(DimensionRow {
                dimension: d,
                items: recs.len(),
                avg_at_k: avg_at_k(recs, k)?,
                pass_at_k: mean_pass_at_k(recs, k)?,
            });
        }
    }
    let all: Vec<TrialRecord> = trials.iter().map(|(_, t)| t.clone()).collect();
    Ok(EvalReport {
        k,
        rows,
        overall: Totals {
            items: all.len(),
            avg_at_k: avg_at_k(&all, k)?,
            pass_at_k: mean_pass_at_k(&all, k)?,
        },
    })
}

impl EvalReport {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let k = self.k;
        let mut s = String::new();
        let _ = writeln!(s, "{:<5} {:>6} {:>8} {:>8}", "dim", "items", alloc::format!("avg@{k}"), alloc::format!("pass@{k}"));
        for r in &self.rows {
            let _ = writeln!(s, "{:<5} {:>6} {:>8.4} {:>8.4}", r.dimension.code(), r.items, r.avg_at_k, r.pass_at_k);
        }
        let o = &self.overall;
        let _ = writeln!(s, "{:<5} {:>6} {:>8.4} {:>8.4}", "all", o.items, o.avg_at_k, o.pass_at_k);
        s
    }
}
