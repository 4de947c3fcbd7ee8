//! Persona-Need-Intent behavior simulation.
//!
//! A user is a [`PersonaState`] that evolves over a daily calendar. Each day
//! latent needs activate from the desire library, may crystallize into a
//! [`SpecificIntent`], and a four-phase MDP turns the day's cognitive state
//! into platform events. Clean events that break a consistency rule are
//! dropped before emission; noise is injected afterwards with its ground
//! truth retained.

pub mod catalog;
pub mod config;
pub mod engine;
pub mod env;
pub mod error;
pub mod evolve;
pub mod mdp;
pub mod needs;
pub mod noise;
pub mod persona;
pub mod population;
pub mod qa;
pub mod types;

pub use catalog::{Catalog, CatalogItem};
pub use config::{EngineParams, SimConfig};
pub use engine::{simulate_user, Simulation};
pub use env::{Calendar, EnvironmentState};
pub use error::SimError;
pub use evolve::{evolve_persona, LifeEffect, LifeEventRule, LifeEventTable, Trigger};
pub use mdp::{mdp_step, MdpCondition, MdpState, Phase, TransitionTable};
pub use needs::{activate_needs, crystallize_intent, LatentNeed, SpecificIntent};
pub use noise::{inject_noise, NoiseConfig};
pub use persona::PersonaState;
pub use population::{align_population, sample_persona, PopulationConfig};
pub use qa::{validate_trace, RuleId, Validator, Violation};
pub use types::{ActionType, BehaviorEvent, BehaviorTrace, NoiseFlag, Platform};
