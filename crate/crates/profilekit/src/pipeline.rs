//! End-to-end runs: every requested stage in order, each artifact hashed
//! into the manifest. A failed stage is recorded and every stage that
//! depends on it is skipped.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use profilekit_core::date::add_days;
use profilekit_core::semantize::{EntityStore, Semantizer};

use crate::config::{PipelineConfig, Resolved, StageName};
use crate::error::{stage_err, Result};
use crate::io::{sha256_hex, write_file};
use crate::manifest::{Manifest, ManifestEntry, Status};
use crate::stages::{
    curate_corpus, curate_output, eval_output, evaluate, mock_predictions, semantize_corpus, semantize_output,
    simulate_corpus, simulate_output, train_output, train_toy, update_output, update_user, MubText, SimulatedUser,
    StageOutput, UserMub,
};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// Loads `config_path` and runs it. `out` overrides the configured output
/// directory.
pub fn run_pipeline(config_path: &Path, out: Option<&Path>) -> Result<Manifest> {
    let r = PipelineConfig::load(config_path)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| r.config.out_dir.clone());
    run_resolved(&r, &out)
}

#[derive(Default)]
struct State {
    users: Option<Vec<SimulatedUser>>,
    mubs: Option<Vec<UserMub>>,
}

fn semantizer(r: &Resolved) -> Semantizer {
    Semantizer {
        policy: r.policy.clone(),
        ..Semantizer::default()
    }
}

fn run_stage(stage: StageName, r: &Resolved, st: &mut State) -> std::result::Result<StageOutput, String> {
    let c = &r.config;
    let need_users = |st: &State| st.users.as_ref().ok_or("no simulated corpus").cloned();
    match stage {
        StageName::Simulate => {
            let users =
                simulate_corpus(&r.sim, c.simulate.users, c.simulate.horizon_days, c.seed).map_err(|e| e.to_string())?;
            let out = simulate_output(&users);
            st.users = Some(users);
            Ok(out)
        }
        StageName::Semantize => {
            let users = need_users(st)?;
            let traces: Vec<_> = users.iter().map(|u| &u.sim.trace).collect();
            let store = EntityStore::from_catalog(&r.sim.catalog());
            let now = add_days(r.sim.engine.start, i64::from(c.simulate.horizon_days));
            let mubs = semantize_corpus(&traces, &semantizer(r), &store, now).map_err(|e| e.to_string())?;
            let out = semantize_output(&mubs).map_err(|e| e.to_string())?;
            st.mubs = Some(mubs);
            Ok(out)
        }
        StageName::Curate => {
            let mubs: Vec<MubText> = st.mubs.as_ref().ok_or("no MUB corpus")?.iter().map(MubText::from).collect();
            let cur = curate_corpus(&mubs, &r.schema, &r.mock, c.curate.stage, c.curate.replay, c.seed)
                .map_err(|e| e.to_string())?;
            Ok(curate_output(&cur, &r.schema))
        }
        StageName::TrainToy => {
            let log = train_toy(&r.bandit, c.train.steps).map_err(|e| e.to_string())?;
            Ok(train_output(&log))
        }
        StageName::Eval => {
            let mubs: Vec<MubText> = st.mubs.as_ref().ok_or("no MUB corpus")?.iter().map(MubText::from).collect();
            let truth: Vec<_> = need_users(st)?.into_iter().map(|u| u.truth).collect();
            let preds = mock_predictions(&mubs, &r.schema, &r.mock).map_err(|e| e.to_string())?;
            let e = evaluate(&preds, &truth, &r.schema, c.eval.k).map_err(|e| e.to_string())?;
            Ok(eval_output(&preds, &e))
        }
        StageName::Update => {
            use rayon::prelude::*;
            let users = st.users.as_ref().ok_or("no simulated corpus")?;
            let store = EntityStore::from_catalog(&r.sim.catalog());
            let sem = semantizer(r);
            let runs = users
                .par_iter()
                .map(|u| {
                    update_user(
                        &u.sim.trace,
                        r.sim.engine.start,
                        c.simulate.horizon_days,
                        c.update.window_days,
                        &sem,
                        &store,
                        &r.trigger,
                        &r.schema,
                    )
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            update_output(&runs).map_err(|e| e.to_string())
        }
    }
}

/// Runs an already-loaded config into `out`, writing the manifest last.
pub fn run_resolved(r: &Resolved, out: &Path) -> Result<Manifest> {
    let mut manifest = Manifest::default();
    let mut status: BTreeMap<StageName, Status> = BTreeMap::new();
    let mut st = State::default();
    for stage in StageName::ALL.into_iter().filter(|s| r.config.stages.contains(s)) {
        let name = stage.name();
        if stage.depends_on().iter().any(|d| status.get(d) != Some(&Status::Ok)) {
            log::warn!("{name}: skipped, an upstream stage did not complete");
            manifest.entries.push(ManifestEntry::stage(name, Status::Skipped, 0));
            status.insert(stage, Status::Skipped);
            continue;
        }
        log::info!("{name}: running");
        let t0 = Instant::now();
        let result = run_stage(stage, r, &mut st).and_then(|o| {
            for a in &o.artifacts {
                write_file(&out.join(&a.path), &a.bytes).map_err(|e| e.to_string())?;
            }
            Ok(o)
        });
        let ms = t0.elapsed().as_millis() as u64;
        match result {
            Ok(o) => {
                for a in &o.artifacts {
                    manifest
                        .entries
                        .push(ManifestEntry::artifact(name, a.path.clone(), sha256_hex(&a.bytes), ms));
                }
                let mut line = ManifestEntry::stage(name, Status::Ok, ms);
                line.metrics = o.metrics;
                manifest.entries.push(line);
                status.insert(stage, Status::Ok);
            }
            Err(e) => {
                log::error!("{name}: {e}");
                let mut line = ManifestEntry::stage(name, Status::Failed, ms);
                line.error = Some(e);
                manifest.entries.push(line);
                status.insert(stage, Status::Failed);
            }
        }
    }
    write_file(&out.join(MANIFEST_FILE), manifest.to_text().as_bytes()).map_err(|e| stage_err("manifest", e))?;
    Ok(manifest)
}
