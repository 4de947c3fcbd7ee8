//! Salience compression: keep the top-k categories of a cell by count.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::aggregate::{Cell, Taxonomy};
use super::mub::MubRecord;

/// `None` when nothing clean is left in the cell.
pub fn compress_salience(cell: &Cell, taxonomy: &Taxonomy, top_k: usize) -> Option<MubRecord> {
    let clean: Vec<_> = cell.events.iter().filter(|e| !e.noisy).collect();
    if clean.is_empty() {
        return None;
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &clean {
        *counts.entry(taxonomy.group_of(e.category.as_deref())).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    // BTreeMap order is lexicographic, so a stable sort by count keeps it as the tie-break.
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked.truncate(top_k.max(1));

    let mut items: Vec<String> = Vec::new();
    let mut frequency = 0;
    for (group, n) in &ranked {
        frequency += n;
        for e in &clean {
            if taxonomy.group_of(e.category.as_deref()) == *group && !items.contains(&e.item) {
                items.push(e.item.clone());
            }
        }
    }
    Some(MubRecord {
        platform: cell.platform,
        time_bucket: cell.bucket,
        behavior_type: cell.action,
        frequency: MubRecord::frequency_field(frequency),
        items,
    })
}
