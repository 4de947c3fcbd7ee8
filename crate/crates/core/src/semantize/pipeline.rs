use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, AggregationPolicy, Cell, RefinedEvent};
use super::compress::compress_salience;
use super::entity::{EntityStore, RefinedEntity};
use super::error::SemantizeError;
use super::filter::FilterConfig;
use super::mub::{serialize_mub, MubRecord};
use super::refine::{Refiner, RuleRefiner};
use super::report::{raw_log_line, report_from_counts, CompressionReport};
use crate::date::Date;
use crate::sim::types::BehaviorTrace;
use crate::text::count_tokens;

/// Token counts after each stage, under the shared tokenizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTokens {
    /// Raw event log.
    pub raw: usize,
    /// The same log with refined entities.
    pub refined: usize,
    /// Refined log minus filtered entities.
    pub filtered: usize,
    /// Every cell as a MUB line, before salience compression.
    pub aggregated: usize,
    pub compressed: usize,
}

impl core::ops::AddAssign for StageTokens {
    fn add_assign(&mut self, o: Self) {
        self.raw += o.raw;
        self.refined += o.refined;
        self.filtered += o.filtered;
        self.aggregated += o.aggregated;
        self.compressed += o.compressed;
    }
}

impl StageTokens {
    pub fn report(&self) -> Result<CompressionReport, SemantizeError> {
        report_from_counts(self.raw, self.compressed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semantized {
    pub records: Vec<MubRecord>,
    pub text: String,
    pub tokens: StageTokens,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semantizer<R: Refiner = RuleRefiner> {
    pub refiner: R,
    pub filter: FilterConfig,
    pub policy: AggregationPolicy,
}

impl Default for Semantizer {
    fn default() -> Self {
        Self {
            refiner: RuleRefiner::default(),
            filter: FilterConfig::default(),
            policy: AggregationPolicy::default(),
        }
    }
}

fn uncompressed(cell: &Cell) -> MubRecord {
    let mut items: Vec<String> = Vec::new();
    for e in &cell.events {
        if !items.contains(&e.item) {
            items.push(e.item.clone());
        }
    }
    MubRecord {
        platform: cell.platform,
        time_bucket: cell.bucket,
        behavior_type: cell.action,
        frequency: MubRecord::frequency_field(cell.events.len()),
        items,
    }
}

impl<R: Refiner> Semantizer<R> {
    pub fn run(&self, trace: &BehaviorTrace, store: &EntityStore, now: Date) -> Result<Semantized, SemantizeError> {
        self.policy.validate()?;
        let mut tokens = StageTokens::default();
        let mut cache: BTreeMap<&str, (RefinedEntity, bool)> = BTreeMap::new();
        let mut kept: Vec<RefinedEvent> = Vec::new();
        for e in &trace.events {
            tokens.raw += count_tokens(&raw_log_line(e));
            let (refined, keep) = cache.entry(e.entity.entity_id.as_str()).or_insert_with(|| {
                let r = self.refiner.refine(&store.entity_for(e), &store.kb);
                let keep = self.filter.keep(&r);
                (r, keep)
            });
            let item = refined.render();
            let line = alloc::format!("{} {} {} {}", e.timestamp, e.platform, e.action_type, item);
            let n = count_tokens(&line);
            tokens.refined += n;
            if !*keep {
                continue;
            }
            tokens.filtered += n;
            kept.push(RefinedEvent {
                timestamp: e.timestamp,
                platform: e.platform,
                action: e.action_type,
                noisy: !e.noise_flag.is_clean(),
                item,
                category: refined.category.clone(),
            });
        }
        let cells = aggregate(&kept, &self.policy, now);
        let mut records = Vec::new();
        for c in &cells {
            tokens.aggregated += count_tokens(&uncompressed(c).line());
            if let Some(r) = compress_salience(c, &self.policy.taxonomy, self.policy.top_k) {
                records.push(r);
            }
        }
        let text = serialize_mub(&records);
        tokens.compressed = count_tokens(&text);
        Ok(Semantized { records, text, tokens })
    }
}

/// Runs the default pipeline.
pub fn semantize_trace(trace: &BehaviorTrace, store: &EntityStore, now: Date) -> Result<Semantized, SemantizeError> {
    Semantizer::default().run(trace, store, now)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::add_days;
    use crate::rng::{seeded, user_rng};
    use crate::semantize::mub::parse_mub;
    use crate::sim::{sample_persona, simulate_user, SimConfig};

    #[test]
    fn stages_shrink_and_output_parses() {
        let cfg = SimConfig::shipped();
        let catalog = cfg.catalog();
        let store = EntityStore::from_catalog(&catalog);
        let mut total = StageTokens::default();
        for u in 0..12u64 {
            let uid = alloc::format!("u{u}");
            let p = sample_persona(&uid, &cfg.population, &mut seeded(u)).unwrap();
            let sim = simulate_user(&p, 730, &cfg, &catalog, &mut user_rng(5, &uid)).unwrap();
            let now = add_days(cfg.engine.start, 730);
            let out = semantize_trace(&sim.trace, &store, now).unwrap();
            let t = out.tokens;
            assert!(t.filtered <= t.refined);
            assert!(t.compressed <= t.aggregated);
            assert_eq!(parse_mub(&out.text).unwrap(), out.records);
            assert_eq!(semantize_trace(&sim.trace, &store, now).unwrap(), out);
            total += t;
        }
        assert!(total.refined <= total.raw);
        assert!(total.report().unwrap().reduction_ratio >= 0.75, "{total:?}");
    }
}
