//! Allocation-only core of the profilekit toolkit.
//!
//! The crate covers the whole synthetic-user lifecycle without touching the
//! filesystem:
//!
//! - [`sim`]: persona-driven behavior simulation over a daily MDP, with
//!   persona evolution, noise injection and trace validation.
//! - [`semantize`]: entity refinement, filtering, hierarchical aggregation,
//!   salience compression and the MUB line format.
//! - [`curate`]: rule labeling, low-entropy filtering and the consensus
//!   stage-dataset constructions.
//! - [`dfgrpo`]: rewards, group-relative advantages, the clipped objective
//!   with a KL anchor, dual filtering and a toy policy to train.
//! - [`metrics`]: Avg@k, Pass@k, BLEU, similarity and grounding metrics.
//! - [`profile`]: incremental profile snapshots and update triggers.
//!
//! IO, file formats and the CLI live in the `profilekit` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod curate;
pub mod date;
pub mod dfgrpo;
pub mod metrics;
pub mod profile;
pub mod rng;
pub mod semantize;
pub mod sim;
pub mod text;
pub mod vocab;
