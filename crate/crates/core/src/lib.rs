//! Repeated 2x2 games between reinforcement learners and prospect-theoretic
//! agents.
//!
//! Three agent kinds share the engine: expected-value Q-learners (`AI`),
//! analytic prospect-theoretic players that know the payoff matrix (`AH`), and
//! learning players that value beliefs over opponent actions through
//! cumulative prospect theory (`LH`).

pub mod agents;
pub mod cpt;
pub mod engine;
pub mod equilibria;
pub mod error;
pub mod games;
pub mod grid;
pub mod metrics;
pub mod output;
pub mod reference;

pub use agents::{AgentKind, LearningConfig, ProspectOutcomes};
pub use cpt::{CptParams, Prospect};
pub use engine::{ExperimentConfig, Matchup};
pub use error::{Error, Result};
pub use games::{Game, GameId, Side};
pub use reference::{ReferenceKind, ReferenceModel};
