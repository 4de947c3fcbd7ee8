//! Files, configuration, pipeline orchestration and the `profilekit` CLI
//! over [`profilekit_core`].

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod profile_cmd;
pub mod snapshots;
pub mod stages;
pub mod tables;
pub mod trace_file;

pub use config::{PipelineConfig, StageName, CONFIG_ROOT_ENV};
pub use error::{Error, Result};
pub use manifest::{Manifest, ManifestEntry, Status};
pub use pipeline::{run_pipeline, run_resolved, MANIFEST_FILE};
