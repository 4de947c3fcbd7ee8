//! The pipeline stages as functions over in-memory corpora. Each returns
//! the files it would write as [`Artifact`]s plus audit metrics; the
//! pipeline runner and the CLI decide where the bytes go.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use profilekit_core::curate::{
    atomic_questions, build_stage1, build_stage2, build_stage3, composite_question, extract_atomic, filter_low_entropy,
    persona_profile, rule_label, stage2_subset, AtomicProfile, CompositeExtractor, CurateError, CurationConfig, Judge,
    Matcher, MockConfig, MockTeacher, Question, RuleSet, Schema, StageDataset, Synthesizer,
};
use profilekit_core::date::{add_days, Date};
use profilekit_core::dfgrpo::{Bandit, BanditConfig, GrpoError, TrainLogEntry};
use profilekit_core::metrics::{dimension_report, grounding_eval, EvalReport, MetricError, TrialRecord};
use profilekit_core::profile::{
    maybe_update, summary_compression, ProfileError, ProfileSnapshot, TemplateSummarizer, UpdateTrigger,
};
use profilekit_core::rng::{derive_seed, seeded, user_rng};
use profilekit_core::semantize::{
    parse_mub, EntityStore, SemantizeError, Semantized, Semantizer, StageTokens,
};
use profilekit_core::sim::{sample_persona, simulate_user, BehaviorTrace, SimConfig, SimError, Simulation};
use profilekit_core::text::count_tokens;

use crate::io::to_jsonl;
use crate::trace_file::{render_trace, TraceHeader};

/// A file to write, at a `/`-separated path relative to the output root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(path: impl Into<String>, text: String) -> Self {
        Self {
            path: path.into(),
            bytes: text.into_bytes(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageOutput {
    pub artifacts: Vec<Artifact>,
    pub metrics: BTreeMap<String, f64>,
}

impl StageOutput {
    fn metric(&mut self, name: &str, v: impl Into<f64>) {
        self.metrics.insert(name.to_string(), v.into());
    }
}

pub fn user_id(i: usize) -> String {
    format!("u{i:04}")
}

/// Ground truth for one user: the persona's profile on the last simulated
/// day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub user_id: String,
    pub as_of: Date,
    pub profile: AtomicProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedUser {
    pub header: TraceHeader,
    pub sim: Simulation,
    pub truth: GroundTruthRecord,
}

/// Simulates `users` users for `horizon` days. Each user draws from its own
/// streams keyed by seed and user id, so the corpus does not depend on
/// thread scheduling.
pub fn simulate_corpus(cfg: &SimConfig, users: usize, horizon: u32, seed: u64) -> Result<Vec<SimulatedUser>, SimError> {
    let catalog = cfg.catalog();
    let persona_seed = derive_seed(seed, "persona");
    let last_day = add_days(cfg.engine.start, i64::from(horizon) - 1);
    (0..users)
        .into_par_iter()
        .map(|i| {
            let uid = user_id(i);
            let persona = sample_persona(&uid, &cfg.population, &mut user_rng(persona_seed, &uid))?;
            let sim = simulate_user(&persona, horizon, cfg, &catalog, &mut user_rng(seed, &uid))?;
            let p = sim.trace.persona_at(last_day).unwrap_or(&persona);
            let truth = GroundTruthRecord {
                user_id: uid.clone(),
                as_of: last_day,
                profile: persona_profile(p, last_day),
            };
            Ok(SimulatedUser {
                header: TraceHeader {
                    user_id: uid,
                    seed,
                    horizon,
                },
                sim,
                truth,
            })
        })
        .collect()
}

pub fn simulate_output(users: &[SimulatedUser]) -> StageOutput {
    let mut out = StageOutput::default();
    let (mut events, mut injected, mut rectified) = (0usize, 0usize, 0usize);
    for u in users {
        out.artifacts.push(Artifact::text(
            format!("traces/{}.jsonl", u.header.user_id),
            render_trace(&u.header, &u.sim.trace),
        ));
        events += u.sim.trace.events.len();
        injected += u.sim.injected.len();
        rectified += u.sim.rectified.len();
    }
    let truth: Vec<&GroundTruthRecord> = users.iter().map(|u| &u.truth).collect();
    out.artifacts.push(Artifact::text("truth.jsonl", to_jsonl(&truth)));
    out.metric("users", users.len() as f64);
    out.metric("events", events as f64);
    out.metric("injected_noise", injected as f64);
    out.metric("rectified", rectified as f64);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserMub {
    pub user_id: String,
    pub out: Semantized,
}

pub fn semantize_corpus(
    traces: &[&BehaviorTrace],
    semantizer: &Semantizer,
    store: &EntityStore,
    now: Date,
) -> Result<Vec<UserMub>, SemantizeError> {
    traces
        .par_iter()
        .map(|t| {
            Ok(UserMub {
                user_id: t.user_id.clone(),
                out: semantizer.run(t, store, now)?,
            })
        })
        .collect()
}

fn tokens_kv(t: &StageTokens) -> String {
    format!(
        "raw_tokens={}\nrefined_tokens={}\nfiltered_tokens={}\naggregated_tokens={}\nmub_tokens={}\n",
        t.raw, t.refined, t.filtered, t.aggregated, t.compressed
    )
}

/// Corpus-level token counts, pooled over users.
pub fn total_tokens(mubs: &[UserMub]) -> StageTokens {
    let mut total = StageTokens::default();
    for m in mubs {
        total += m.out.tokens;
    }
    total
}

pub fn semantize_output(mubs: &[UserMub]) -> Result<StageOutput, SemantizeError> {
    let mut out = StageOutput::default();
    for m in mubs {
        out.artifacts.push(Artifact::text(format!("mub/{}.mub", m.user_id), m.out.text.clone()));
    }
    let total = total_tokens(mubs);
    let report = total.report()?;
    let mut kv = tokens_kv(&total);
    kv.push_str(&format!("reduction_ratio={:.6}\n", report.reduction_ratio));
    out.artifacts.push(Artifact::text("mub/report.txt", kv));
    out.metric("raw_tokens", total.raw as f64);
    out.metric("mub_tokens", total.compressed as f64);
    out.metric("reduction_ratio", report.reduction_ratio);
    Ok(out)
}

/// One user's MUB text, the input unit of curation and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MubText {
    pub user_id: String,
    pub text: String,
}

impl From<&UserMub> for MubText {
    fn from(m: &UserMub) -> Self {
        Self {
            user_id: m.user_id.clone(),
            text: m.out.text.clone(),
        }
    }
}

/// Rule pseudo-labels plus the atomic and composite questions for a user.
fn questions_for(m: &MubText, schema: &Schema, rules: &RuleSet) -> Result<(Vec<Question>, Question), CurateError> {
    let records = parse_mub(&m.text).map_err(|e| CurateError::Protocol(format!("{}: {e}", m.user_id)))?;
    let pseudo = rule_label(&records, rules, schema);
    Ok((
        atomic_questions(&m.user_id, &m.text, &pseudo, schema),
        composite_question(&m.user_id, &m.text, &pseudo),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curated {
    pub questions: usize,
    pub after_filter: usize,
    pub stages: Vec<StageDataset>,
}

/// Builds the stage datasets up to `max_stage`. Later stages rerun the
/// earlier ones; the mock teacher answers the same question the same way
/// on every call.
pub fn curate_corpus(
    mubs: &[MubText],
    schema: &Schema,
    mock: &MockConfig,
    max_stage: u8,
    replay: usize,
    seed: u64,
) -> Result<Curated, CurateError> {
    let rules = RuleSet::default();
    rules.validate(schema)?;
    let teacher = MockTeacher::new(mock.clone(), schema.clone())?;
    let judge = Judge::new(schema);
    let cfg = CurationConfig {
        outputs_per_question: mock.sources.iter().map(|s| s.outputs).sum(),
        ..CurationConfig::default()
    };
    let mut atomic = Vec::new();
    let mut seeds = Vec::new();
    for m in mubs {
        let (qs, c) = questions_for(m, schema, &rules)?;
        atomic.extend(qs);
        seeds.push(c);
    }
    let mut rng = seeded(derive_seed(seed, "curate"));
    let kept = filter_low_entropy(&atomic, &teacher, &judge);
    let s1 = build_stage1(&kept, &teacher, &judge, &cfg, &mut rng)?;
    let mut stages = vec![s1.dataset];
    if max_stage >= 2 {
        let s2 = build_stage2(&kept, &s1.votes, &teacher, &judge, &cfg)?;
        if max_stage >= 3 {
            let d_prime = stage2_subset(&s2, replay, &mut rng);
            let s3 = build_stage3(&seeds, &teacher, &judge, d_prime)?;
            stages.push(s2);
            stages.push(s3);
        } else {
            stages.push(s2);
        }
    }
    Ok(Curated {
        questions: atomic.len(),
        after_filter: kept.len(),
        stages,
    })
}

pub fn curate_output(c: &Curated, schema: &Schema) -> StageOutput {
    let mut out = StageOutput::default();
    out.metric("questions", c.questions as f64);
    out.metric("after_entropy_filter", c.after_filter as f64);
    for ds in &c.stages {
        let n = u8::from(ds.stage);
        out.artifacts.push(Artifact::text(format!("curate/stage{n}.jsonl"), to_jsonl(&ds.records(schema))));
        out.metric(&format!("stage{n}_samples"), ds.samples.len() as f64);
    }
    out
}

/// `k` sampled answers to one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub question_id: String,
    pub user_id: String,
    /// `None` for composite answers, scored on every attribute.
    #[serde(default)]
    pub attribute_id: Option<String>,
    pub outputs: Vec<String>,
}

/// The mock teacher's answers to every atomic question, as predictions.
pub fn mock_predictions(mubs: &[MubText], schema: &Schema, mock: &MockConfig) -> Result<Vec<PredictionRecord>, CurateError> {
    let rules = RuleSet::default();
    let teacher = MockTeacher::new(mock.clone(), schema.clone())?;
    let mut out = Vec::new();
    for m in mubs {
        let (qs, _) = questions_for(m, schema, &rules)?;
        for q in qs {
            out.push(PredictionRecord {
                outputs: teacher.synthesize(&q)?.into_iter().map(|o| o.text).collect(),
                question_id: q.question_id,
                user_id: q.user_id,
                attribute_id: q.attribute_id,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    /// Mean grounding over composite predictions, when there are any.
    pub acc_ex: Option<f64>,
    pub cov_ex: Option<f64>,
}

/// Scores predictions against ground truth: an output counts as correct
/// when its extracted value matches the truth; unparseable outputs are
/// wrong.
pub fn evaluate(
    preds: &[PredictionRecord],
    truth: &[GroundTruthRecord],
    schema: &Schema,
    k: usize,
) -> Result<Evaluation, MetricError> {
    let gt: BTreeMap<&str, &AtomicProfile> = truth.iter().map(|t| (t.user_id.as_str(), &t.profile)).collect();
    let m = Matcher::default();
    let mut trials: Vec<(String, TrialRecord)> = Vec::new();
    let (mut acc, mut cov, mut composites) = (0.0, 0.0, 0usize);
    for p in preds {
        let g = gt
            .get(p.user_id.as_str())
            .ok_or_else(|| MetricError::Argument(format!("{}: no ground truth for {}", p.question_id, p.user_id)))?;
        match &p.attribute_id {
            Some(a) => {
                let spec = schema
                    .get(a)
                    .ok_or_else(|| MetricError::Argument(format!("{}: unknown attribute {a:?}", p.question_id)))?;
                let outcomes = p
                    .outputs
                    .iter()
                    .map(|o| extract_atomic(o, schema).is_ok_and(|x| m.matches(&spec.space, x.get(a), g.get(a))))
                    .collect();
                trials.push((a.clone(), TrialRecord::new(p.question_id.clone(), outcomes)));
            }
            None => {
                let extracted: Vec<Option<AtomicProfile>> =
                    p.outputs.iter().map(|o| profilekit_core::curate::extract_composite(o, schema).ok()).collect();
                for spec in &schema.attributes {
                    let outcomes = extracted
                        .iter()
                        .map(|x| x.as_ref().is_some_and(|x| m.matches(&spec.space, x.get(&spec.id), g.get(&spec.id))))
                        .collect();
                    trials.push((
                        spec.id.clone(),
                        TrialRecord::new(format!("{}:{}", p.question_id, spec.id), outcomes),
                    ));
                }
                if let Some(first) = p.outputs.first() {
                    let gr = grounding_eval(first, g, schema, &CompositeExtractor, &m);
                    acc += gr.acc_ex;
                    cov += gr.cov_ex;
                    composites += 1;
                }
            }
        }
    }
    let report = dimension_report(schema, &trials, k)?;
    let mean = |s: f64| (composites > 0).then(|| s / composites as f64);
    Ok(Evaluation {
        report,
        acc_ex: mean(acc),
        cov_ex: mean(cov),
    })
}

/// The aligned table, then grounding lines when present.
pub fn eval_text(e: &Evaluation) -> String {
    let mut s = e.report.to_text();
    if let (Some(a), Some(c)) = (e.acc_ex, e.cov_ex) {
        s.push_str(&format!("acc_ex={a:.4}\ncov_ex={c:.4}\n"));
    }
    s
}

/// Machine-readable rows: one per dimension, then the pooled totals.
pub fn eval_records(e: &Evaluation) -> String {
    let mut s = to_jsonl(&e.report.rows);
    s.push_str(&to_jsonl(&[serde_json::json!({
        "dimension": "ALL",
        "items": e.report.overall.items,
        "avg_at_k": e.report.overall.avg_at_k,
        "pass_at_k": e.report.overall.pass_at_k,
        "k": e.report.k,
    })]));
    s
}

pub fn eval_output(preds: &[PredictionRecord], e: &Evaluation) -> StageOutput {
    let mut out = StageOutput::default();
    out.artifacts.push(Artifact::text("eval/predictions.jsonl", to_jsonl(preds)));
    out.artifacts.push(Artifact::text("eval/report.txt", eval_text(e)));
    out.artifacts.push(Artifact::text("eval/report.jsonl", eval_records(e)));
    out.metric("items", e.report.overall.items as f64);
    out.metric("avg_at_k", e.report.overall.avg_at_k);
    out.metric("pass_at_k", e.report.overall.pass_at_k);
    out
}

/// Mean reward over the first and last `window` log entries.
pub fn reward_ends(log: &[TrainLogEntry], window: usize) -> (f64, f64) {
    let w = window.clamp(1, log.len().max(1));
    let mean = |xs: &[TrainLogEntry]| xs.iter().map(|e| e.mean_reward).sum::<f64>() / xs.len().max(1) as f64;
    (mean(&log[..w.min(log.len())]), mean(&log[log.len().saturating_sub(w)..]))
}

pub fn train_toy(cfg: &BanditConfig, steps: usize) -> Result<Vec<TrainLogEntry>, GrpoError> {
    let (_, log) = Bandit::new(cfg.clone())?.train(steps)?;
    Ok(log)
}

pub fn train_log_text(log: &[TrainLogEntry]) -> String {
    log.iter().map(|e| e.line() + "\n").collect()
}

pub fn train_output(log: &[TrainLogEntry]) -> StageOutput {
    let mut out = StageOutput::default();
    out.artifacts.push(Artifact::text("train/log.txt", train_log_text(log)));
    let (first, last) = reward_ends(log, 20);
    out.metric("steps", log.len() as f64);
    out.metric("initial_mean_reward", first);
    out.metric("final_mean_reward", last);
    out
}

/// One user's pass through the update loop.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRun {
    pub user_id: String,
    /// Version 0 first, then one snapshot per applied update.
    pub history: Vec<ProfileSnapshot>,
    pub rejected: usize,
    /// Raw log tokens of every event seen.
    pub raw_tokens: usize,
    /// MUB tokens of every delta handed to the summarizer.
    pub delta_tokens: usize,
}

impl UpdateRun {
    pub fn latest(&self) -> &ProfileSnapshot {
        self.history.last().expect("history starts at version 0")
    }
}

/// Replays a trace as consecutive `window_days` deltas from `start`,
/// updating the profile whenever the trigger fires at a window's end.
pub fn update_user(
    trace: &BehaviorTrace,
    start: Date,
    horizon: u32,
    window_days: i64,
    semantizer: &Semantizer,
    store: &EntityStore,
    trigger: &UpdateTrigger,
    schema: &Schema,
) -> Result<UpdateRun, ProfileError> {
    let summarizer = TemplateSummarizer::new(schema.clone());
    let end = add_days(start, i64::from(horizon));
    let mut run = UpdateRun {
        user_id: trace.user_id.clone(),
        history: vec![ProfileSnapshot::empty(&trace.user_id, start, schema)],
        rejected: 0,
        raw_tokens: 0,
        delta_tokens: 0,
    };
    let mut from = start;
    // events arrive in time order; pending collects everything since the
    // last applied update
    let mut pending: Vec<_> = Vec::new();
    let mut next = 0;
    while from < end {
        let to = add_days(from, window_days).min(end);
        while next < trace.events.len() && trace.events[next].timestamp < to {
            pending.push(trace.events[next].clone());
            next += 1;
        }
        let delta = BehaviorTrace {
            user_id: trace.user_id.clone(),
            events: pending.clone(),
            persona_history: Vec::new(),
        };
        let sem = semantizer.run(&delta, store, to)?;
        let prev = run.latest().clone();
        match maybe_update(&prev, &sem.text, &[], trigger, to, &summarizer, schema) {
            Ok(s) if s.version != prev.version => {
                run.raw_tokens += sem.tokens.raw;
                run.delta_tokens += count_tokens(&sem.text);
                run.history.push(s);
                pending.clear();
            }
            Ok(_) => {}
            Err(ProfileError::Rejected(why)) => {
                log::warn!("{}: update at {to} rejected: {why}", trace.user_id);
                run.rejected += 1;
            }
            Err(e) => return Err(e),
        }
        from = to;
    }
    // anything never folded in still counts as context
    if !pending.is_empty() {
        let delta = BehaviorTrace {
            user_id: trace.user_id.clone(),
            events: pending,
            persona_history: Vec::new(),
        };
        run.raw_tokens += semantizer.run(&delta, store, end)?.tokens.raw;
    }
    Ok(run)
}

pub fn update_output(runs: &[UpdateRun]) -> Result<StageOutput, SemantizeError> {
    let mut out = StageOutput::default();
    let (mut raw, mut delta, mut summary, mut rejected, mut updates) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for r in runs {
        out.artifacts.push(Artifact::text(format!("snapshots/{}.jsonl", r.user_id), to_jsonl(&r.history)));
        raw += r.raw_tokens;
        delta += r.delta_tokens;
        summary += count_tokens(&r.latest().summary);
        rejected += r.rejected;
        updates += r.history.len() - 1;
    }
    let vs_raw = profilekit_core::semantize::report::report_from_counts(raw, summary)?;
    let vs_mub = profilekit_core::semantize::report::report_from_counts(delta, summary)?;
    out.artifacts.push(Artifact::text(
        "update/report.txt",
        format!(
            "users={}\nupdates={updates}\nrejected={rejected}\ncontext_raw_tokens={raw}\ncontext_mub_tokens={delta}\nsummary_tokens={summary}\nsummary_vs_raw_reduction={:.6}\nsummary_vs_mub_reduction={:.6}\n",
            runs.len(),
            vs_raw.reduction_ratio,
            vs_mub.reduction_ratio
        ),
    ));
    out.metric("updates", updates as f64);
    out.metric("rejected", rejected as f64);
    out.metric("summary_vs_raw_reduction", vs_raw.reduction_ratio);
    out.metric("summary_vs_mub_reduction", vs_mub.reduction_ratio);
    Ok(out)
}

/// Context-to-snapshot reduction for one user, against the raw log.
pub fn user_summary_reduction(run: &UpdateRun) -> Result<f64, SemantizeError> {
    Ok(summary_compression(run.raw_tokens, run.latest())?.reduction_ratio)
}
