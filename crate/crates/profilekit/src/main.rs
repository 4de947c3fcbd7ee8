use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use profilekit::config::{
    load_annotator, load_bandit, load_policy, load_schema, load_sim, load_trigger, resolve_config_path,
    write_default_configs,
};
use profilekit::error::{config_err, stage_err, Result};
use profilekit::io::{list_files, read_jsonl, read_text, to_jsonl, write_file};
use profilekit::profile_cmd;
use profilekit::stages::{
    curate_corpus, eval_records, eval_text, evaluate, semantize_corpus, semantize_output, simulate_corpus,
    simulate_output, train_log_text, train_toy, Artifact, MubText, PredictionRecord,
};
use profilekit::trace_file::parse_trace;
use profilekit::{run_pipeline, MANIFEST_FILE};
use profilekit_core::date::{add_days, parse_day, Date};
use profilekit_core::semantize::{EntityStore, Semantizer, Taxonomy};

#[derive(Parser)]
#[command(name = "profilekit", version, about = "Synthetic user profiling toolkit")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the stages listed in a pipeline file and write a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a pipeline file and every shipped table to a directory.
    InitConfig {
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a user corpus into trace files.
    Simulate {
        /// Directory of simulator tables; shipped tables when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        users: usize,
        /// Days to simulate.
        #[arg(long, default_value_t = 1095)]
        horizon: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn trace files into MUB files plus a compression report.
    Semantize {
        /// A trace file, or a directory of them.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        policy: Option<PathBuf>,
        /// JSONL of `{leaf, group}` lines replacing the policy's taxonomy.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        cutoff_days: Option<i64>,
        /// Reference day for the long-term cutoff; defaults to the day after
        /// the last event.
        #[arg(long)]
        now: Option<String>,
        /// Simulator tables, for the catalog behind entity metadata.
        #[arg(long)]
        sim_config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the stage datasets from a directory of MUB files.
    Curate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        stage: u8,
        /// Schema JSON, or `builtin`.
        #[arg(long, default_value = "builtin")]
        schema: PathBuf,
        /// `mock:default` or `mock:<table.toml>`.
        #[arg(long, default_value = "mock:default")]
        annotator: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Stage-2 samples replayed into stage 3.
        #[arg(long, default_value_t = 200)]
        replay: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the toy policy and write the per-step log.
    TrainToy {
        #[arg(long)]
        grpo_config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        log: PathBuf,
    },
    /// Score predictions against ground truth per dimension.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Aligned text table; records go next to it with a `.jsonl` extension.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "builtin")]
        schema: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Apply one behavior delta to a user's snapshot file.
    Update {
        /// The user's append-only snapshot file.
        #[arg(long)]
        snapshot: PathBuf,
        /// MUB text of the new behavior.
        #[arg(long)]
        delta: PathBuf,
        #[arg(long)]
        trigger: Option<PathBuf>,
        /// JSONL of `{timestamp, tag}` account events.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        now: String,
        /// Needed only when the snapshot file does not exist yet; defaults to
        /// the file stem.
        #[arg(long)]
        user: Option<String>,
        #[arg(long, default_value = "builtin")]
        schema: PathBuf,
    },
}

fn cfg_path(p: &Option<PathBuf>) -> Option<PathBuf> {
    p.as_deref().map(resolve_config_path)
}

fn day(s: &str) -> Result<Date> {
    parse_day(s).ok_or_else(|| config_err(format!("{s:?} is not a YYYY-MM-DD date")))
}

fn write_artifacts(stage: &str, out: &Path, artifacts: &[Artifact]) -> Result<()> {
    for a in artifacts {
        write_file(&out.join(&a.path), &a.bytes).map_err(|e| stage_err(stage, e))?;
    }
    Ok(())
}

fn schema_arg(p: &Path) -> Result<profilekit_core::curate::Schema> {
    if p.as_os_str() == "builtin" {
        load_schema(None)
    } else {
        load_schema(Some(&resolve_config_path(p)))
    }
}

#[derive(serde::Deserialize)]
struct TaxonomyRow {
    leaf: String,
    group: String,
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Run { config, out } => {
            let m = run_pipeline(&resolve_config_path(&config), out.as_deref())?;
            if let Some(e) = m.entries.iter().find(|e| e.error.is_some()) {
                return Err(stage_err(&e.stage, e.error.as_deref().unwrap_or_default()));
            }
            println!("{} entries in {MANIFEST_FILE}", m.entries.len());
        }
        Cmd::InitConfig { out } => {
            let files = write_default_configs(&out).map_err(|e| stage_err("init-config", e))?;
            println!("wrote {} config files under {}", files.len(), out.display());
        }
        Cmd::Simulate {
            config,
            seed,
            users,
            horizon,
            out,
        } => {
            if users == 0 || horizon == 0 {
                return Err(config_err("users and horizon must be positive"));
            }
            let sim = load_sim(cfg_path(&config).as_deref())?;
            let corpus = simulate_corpus(&sim, users, horizon, seed).map_err(|e| stage_err("simulate", e))?;
            write_artifacts("simulate", &out, &simulate_output(&corpus).artifacts)?;
        }
        Cmd::Semantize {
            input,
            policy,
            taxonomy,
            top_k,
            cutoff_days,
            now,
            sim_config,
            out,
        } => {
            let mut policy = load_policy(cfg_path(&policy).as_deref())?;
            if let Some(t) = cfg_path(&taxonomy) {
                let rows: Vec<TaxonomyRow> = read_jsonl(&t).map_err(config_err)?;
                policy.taxonomy = Taxonomy {
                    groups: rows.into_iter().map(|r| (r.leaf, r.group)).collect(),
                };
            }
            if let Some(k) = top_k {
                policy.top_k = k;
            }
            if let Some(d) = cutoff_days {
                policy.long_term_cutoff_days = d;
            }
            policy.validate().map_err(config_err)?;
            let sim = load_sim(cfg_path(&sim_config).as_deref())?;
            let files = if input.is_dir() {
                list_files(&input, "jsonl").map_err(|e| stage_err("semantize", e))?
            } else {
                vec![input]
            };
            let mut traces = Vec::new();
            for f in &files {
                let text = read_text(f).map_err(|e| stage_err("semantize", e))?;
                traces.push(parse_trace(&text, &f.display().to_string()).map_err(|e| stage_err("semantize", e))?.1);
            }
            let now = match now {
                Some(s) => day(&s)?,
                None => traces
                    .iter()
                    .filter_map(|t| t.events.last().map(|e| e.timestamp))
                    .max()
                    .map(|d| add_days(d, 1))
                    .ok_or_else(|| stage_err("semantize", "no events in the input"))?,
            };
            let refs: Vec<_> = traces.iter().collect();
            let sem = Semantizer {
                policy,
                ..Semantizer::default()
            };
            let store = EntityStore::from_catalog(&sim.catalog());
            let mubs = semantize_corpus(&refs, &sem, &store, now).map_err(|e| stage_err("semantize", e))?;
            let o = semantize_output(&mubs).map_err(|e| stage_err("semantize", e))?;
            // the CLI writes straight into --out rather than a mub/ subdirectory
            let flat: Vec<Artifact> = o
                .artifacts
                .into_iter()
                .map(|a| Artifact {
                    path: a.path.trim_start_matches("mub/").to_string(),
                    bytes: a.bytes,
                })
                .collect();
            write_artifacts("semantize", &out, &flat)?;
        }
        Cmd::Curate {
            stage,
            schema,
            annotator,
            input,
            seed,
            replay,
            out,
        } => {
            let schema = schema_arg(&schema)?;
            let base = std::env::var_os(profilekit::CONFIG_ROOT_ENV).map(PathBuf::from).unwrap_or_default();
            let mock = load_annotator(&annotator, &base)?;
            let mut mubs = Vec::new();
            for f in list_files(&input, "mub").map_err(|e| stage_err("curate", e))? {
                let user_id = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                let text = read_text(&f).map_err(|e| stage_err("curate", e))?;
                mubs.push(MubText { user_id, text });
            }
            let cur = curate_corpus(&mubs, &schema, &mock, stage, replay, seed).map_err(|e| stage_err("curate", e))?;
            let ds = cur.stages.last().expect("stage 1 always runs");
            let text = to_jsonl(&ds.records(&schema));
            write_file(&out.join(format!("stage{stage}.jsonl")), text.as_bytes()).map_err(|e| stage_err("curate", e))?;
            println!(
                "questions={} after_entropy_filter={} stage{stage}_samples={}",
                cur.questions,
                cur.after_filter,
                ds.samples.len()
            );
        }
        Cmd::TrainToy { grpo_config, steps, log } => {
            let cfg = load_bandit(cfg_path(&grpo_config).as_deref())?;
            let entries = train_toy(&cfg, steps).map_err(|e| stage_err("train-toy", e))?;
            write_file(&log, train_log_text(&entries).as_bytes()).map_err(|e| stage_err("train-toy", e))?;
        }
        Cmd::Eval {
            pred,
            gt,
            report,
            schema,
            k,
        } => {
            let schema = schema_arg(&schema)?;
            let preds: Vec<PredictionRecord> = read_jsonl(&pred).map_err(|e| stage_err("eval", e))?;
            let truth = read_jsonl(&gt).map_err(|e| stage_err("eval", e))?;
            let e = evaluate(&preds, &truth, &schema, k).map_err(|e| stage_err("eval", e))?;
            let text = eval_text(&e);
            write_file(&report, text.as_bytes()).map_err(|e| stage_err("eval", e))?;
            write_file(&report.with_extension("jsonl"), eval_records(&e).as_bytes())
                .map_err(|e| stage_err("eval", e))?;
            print!("{text}");
        }
        Cmd::Update {
            snapshot,
            delta,
            trigger,
            events,
            now,
            user,
            schema,
        } => {
            let schema = schema_arg(&schema)?;
            let trigger = load_trigger(cfg_path(&trigger).as_deref())?;
            let user = user.unwrap_or_else(|| snapshot.file_stem().unwrap_or_default().to_string_lossy().into_owned());
            let outcome = profile_cmd::update_file(&profile_cmd::UpdateRequest {
                snapshot: &snapshot,
                delta: &delta,
                events: events.as_deref(),
                now: day(&now)?,
                user: &user,
                trigger: &trigger,
                schema: &schema,
            })?;
            println!("{outcome}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
