//! The pipeline config file and the smaller per-stage configs it points at.
//!
//! Relative paths inside a pipeline file resolve against the file's own
//! directory. Relative config paths given on the command line resolve
//! against `$PROFILEKIT_CONFIG_ROOT` when it is set, else the working
//! directory. Output directories always resolve against the working
//! directory.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use profilekit_core::curate::{MockConfig, Schema};
use profilekit_core::dfgrpo::BanditConfig;
use profilekit_core::profile::UpdateTrigger;
use profilekit_core::semantize::AggregationPolicy;
use profilekit_core::sim::SimConfig;

use crate::error::{config_err, Result};
use crate::io::{read_text, write_file, IoError};
use crate::tables::{load_sim_config, write_shipped_tables};

pub const CONFIG_ROOT_ENV: &str = "PROFILEKIT_CONFIG_ROOT";

/// Resolves a command-line config path.
pub fn resolve_config_path(p: &Path) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    match std::env::var_os(CONFIG_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(p),
        _ => p.to_path_buf(),
    }
}

pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path).map_err(config_err)?;
    toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

pub fn load_policy(path: Option<&Path>) -> Result<AggregationPolicy> {
    let p: AggregationPolicy = match path {
        Some(p) => load_toml(p)?,
        None => AggregationPolicy::default(),
    };
    p.validate().map_err(config_err)?;
    Ok(p)
}

/// A schema file is the JSON form of [`Schema`]; `None` or `builtin` picks
/// the 18 built-in attributes.
pub fn load_schema(path: Option<&Path>) -> Result<Schema> {
    let s = match path {
        None => Schema::builtin(),
        Some(p) if p.as_os_str() == "builtin" => Schema::builtin(),
        Some(p) => {
            let text = read_text(p).map_err(config_err)?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?
        }
    };
    s.validate().map_err(config_err)?;
    Ok(s)
}

/// `mock:default` or `mock:<path to a TOML mock table>`.
pub fn load_annotator(spec: &str, base: &Path) -> Result<MockConfig> {
    let table = spec
        .strip_prefix("mock:")
        .ok_or_else(|| config_err(format!("annotator {spec:?}: only mock:<table> annotators exist")))?;
    let cfg: MockConfig = if table == "default" {
        MockConfig::default()
    } else {
        load_toml(&join(base, Path::new(table)))?
    };
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

pub fn load_bandit(path: Option<&Path>) -> Result<BanditConfig> {
    let c: BanditConfig = match path {
        Some(p) => load_toml(p)?,
        None => BanditConfig::default(),
    };
    c.grpo.validate().map_err(config_err)?;
    Ok(c)
}

pub fn load_trigger(path: Option<&Path>) -> Result<UpdateTrigger> {
    let t: UpdateTrigger = match path {
        Some(p) => load_toml(p)?,
        None => UpdateTrigger::default(),
    };
    t.validate().map_err(config_err)?;
    Ok(t)
}

pub fn load_sim(dir: Option<&Path>) -> Result<SimConfig> {
    match dir {
        Some(d) => load_sim_config(d),
        None => Ok(SimConfig::shipped()),
    }
}

fn join(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageName {
    Simulate,
    Semantize,
    Curate,
    TrainToy,
    Eval,
    Update,
}

impl StageName {
    pub const ALL: [StageName; 6] = [
        Self::Simulate,
        Self::Semantize,
        Self::Curate,
        Self::TrainToy,
        Self::Eval,
        Self::Update,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Semantize => "semantize",
            Self::Curate => "curate",
            Self::TrainToy => "train-toy",
            Self::Eval => "eval",
            Self::Update => "update",
        }
    }

    /// Stages whose artifacts this one reads.
    pub fn depends_on(self) -> &'static [StageName] {
        match self {
            Self::Simulate | Self::TrainToy => &[],
            Self::Semantize | Self::Update => &[Self::Simulate],
            Self::Curate => &[Self::Semantize],
            Self::Eval => &[Self::Simulate, Self::Semantize],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// Directory of JSONL simulator tables; shipped tables when absent.
    pub tables: Option<PathBuf>,
    pub users: usize,
    pub horizon_days: u32,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            tables: None,
            users: 200,
            horizon_days: 1095,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemantizeSection {
    pub policy: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurateSection {
    pub schema: Option<PathBuf>,
    pub annotator: String,
    /// Highest stage to build.
    pub stage: u8,
    /// Size of the stage-2 replay subset carried into stage 3.
    pub replay: usize,
}

impl Default for CurateSection {
    fn default() -> Self {
        Self {
            schema: None,
            annotator: "mock:default".into(),
            stage: 3,
            replay: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub grpo_config: Option<PathBuf>,
    pub steps: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            grpo_config: None,
            steps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub k: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { k: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpdateSection {
    pub trigger: Option<PathBuf>,
    /// Length of each behavior delta.
    pub window_days: i64,
}

impl Default for UpdateSection {
    fn default() -> Self {
        Self {
            trigger: None,
            window_days: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub stages: Vec<StageName>,
    pub simulate: SimulateSection,
    pub semantize: SemantizeSection,
    pub curate: CurateSection,
    pub train: TrainSection,
    pub eval: EvalSection,
    pub update: UpdateSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            out_dir: "runs/default".into(),
            stages: StageName::ALL.to_vec(),
            simulate: SimulateSection::default(),
            semantize: SemantizeSection::default(),
            curate: CurateSection::default(),
            train: TrainSection::default(),
            eval: EvalSection::default(),
            update: UpdateSection::default(),
        }
    }
}

/// Everything a run needs, loaded and validated up front.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: PipelineConfig,
    pub sim: SimConfig,
    pub policy: AggregationPolicy,
    pub schema: Schema,
    pub mock: MockConfig,
    pub bandit: BanditConfig,
    pub trigger: UpdateTrigger,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Resolved> {
        let config: PipelineConfig = load_toml(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(config_err("no stages requested"));
        }
        for s in &self.stages {
            for d in s.depends_on() {
                if !self.stages.contains(d) {
                    return Err(config_err(format!("stage {} needs stage {}", s.name(), d.name())));
                }
            }
        }
        if self.simulate.users == 0 || self.simulate.horizon_days == 0 {
            return Err(config_err("simulate: users and horizon_days must be positive"));
        }
        if !(1..=3).contains(&self.curate.stage) {
            return Err(config_err("curate: stage must be 1, 2 or 3"));
        }
        if self.eval.k == 0 || self.update.window_days < 1 {
            return Err(config_err("eval.k and update.window_days must be positive"));
        }
        Ok(())
    }

    /// Loads every referenced config, with relative paths taken from `base`.
    pub fn resolve(self, base: &Path) -> Result<Resolved> {
        self.validate()?;
        let at = |p: &Option<PathBuf>| p.as_deref().map(|p| join(base, p));
        let mut bandit = load_bandit(at(&self.train.grpo_config).as_deref())?;
        bandit.seed = self.seed;
        Ok(Resolved {
            sim: load_sim(at(&self.simulate.tables).as_deref())?,
            policy: load_policy(at(&self.semantize.policy).as_deref())?,
            schema: load_schema(at(&self.curate.schema).as_deref())?,
            mock: load_annotator(&self.curate.annotator, base)?,
            bandit,
            trigger: load_trigger(at(&self.update.trigger).as_deref())?,
            config: self,
        })
    }
}

/// Writes a pipeline file and every config it references, all at their
/// defaults, into `dir`.
pub fn write_default_configs(dir: &Path) -> std::result::Result<Vec<PathBuf>, IoError> {
    let mut out = write_shipped_tables(&dir.join("sim"))?;
    let files: Vec<(&str, String)> = vec![
        ("policy.toml", toml_of(&AggregationPolicy::default())),
        ("mock.toml", toml_of(&MockConfig::default())),
        ("grpo.toml", toml_of(&BanditConfig::default())),
        ("trigger.toml", toml_of(&UpdateTrigger::default())),
        (
            "schema.json",
            serde_json::to_string_pretty(&Schema::builtin()).expect("schema serializes") + "\n",
        ),
        (
            "pipeline.toml",
            toml_of(&PipelineConfig {
                simulate: SimulateSection {
                    tables: Some("sim".into()),
                    ..Default::default()
                },
                semantize: SemantizeSection {
                    policy: Some("policy.toml".into()),
                },
                curate: CurateSection {
                    schema: Some("schema.json".into()),
                    annotator: "mock:mock.toml".into(),
                    ..Default::default()
                },
                train: TrainSection {
                    grpo_config: Some("grpo.toml".into()),
                    ..Default::default()
                },
                update: UpdateSection {
                    trigger: Some("trigger.toml".into()),
                    ..Default::default()
                },
                ..PipelineConfig::default()
            }),
        ),
    ];
    for (name, text) in files {
        let p = dir.join(name);
        write_file(&p, text.as_bytes())?;
        out.push(p);
    }
    Ok(out)
}

fn toml_of<T: Serialize>(v: &T) -> String {
    toml::to_string(v).expect("config types serialize to TOML")
}
