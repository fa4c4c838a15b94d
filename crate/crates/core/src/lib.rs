//! Simulation and analysis of distributed proposal review.
//!
//! Every PI of a group submits one proposal and ranks `m` proposals of other
//! PIs. Rankings are turned into Borda scores and aggregated into a Modified
//! Borda Count (MBC); PIs whose rankings agree with the aggregate earn a
//! quality bonus on their own proposal, and the top proposals by
//! `MBC + bonus` are funded.
//!
//! - [`assignment`] deals random m-regular review assignments.
//! - [`behavior`] models honest, noisy, reverse-ranking and colluding reviewers
//!   and controversial proposals.
//! - [`mechanism`] computes MBC, review quality, bonuses and the funded set.
//! - [`oracle`] holds the closed-form expectations and utilities.
//! - [`engine`] runs seeded, schedule-independent Monte Carlo experiments.
//! - [`cli`] loads scenario files and the built-in presets and writes results.

pub mod assignment;
pub mod behavior;
pub mod cli;
pub mod engine;
pub mod error;
pub mod mechanism;
pub mod model;
pub mod oracle;

pub use engine::{Arm, Condition, DeltaStats, Engine};
pub use error::{ConfigError, SimError};
pub use model::{
    validate_config, Assignment, BehaviorProfile, Controversy, FundingStats, GroupConfig, Merit,
    ReviewRound, ScoreTable, Strategy,
};
