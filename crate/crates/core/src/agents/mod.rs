//! Expected-utility learners, aware best-reply humans and learning humans.

mod ai;
mod aware;
mod learning;
pub mod policy;
mod tables;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cpt::CptParams;
use crate::error::{Error, Result};
use crate::games::{Game, Side};
use crate::reference::ReferenceModel;

pub use ai::{ai_select_action, ai_update, AiAgent};
pub use aware::{aware_human_action, AwareChoice, AwareHuman};
pub use learning::{
    lh_action_values, lh_select_action, lh_update, update_beliefs, LearningHuman, LhDiagnostics,
    ProspectOutcomes,
};
pub use tables::{AverageRewardEstimate, BeliefTable, QTableAi, QTableLh};

/// Learning and exploration hyperparameters shared by every learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub alpha_q: f64,
    pub epsilon_init: f64,
    pub epsilon_min: f64,
    /// Multiplier applied to epsilon at each episode boundary.
    pub epsilon_decay: f64,
    /// Near-tie threshold on the top-two action values.
    pub tau: f64,
    pub temperature: f64,
    /// Belief retention rate.
    pub eta_b: f64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            alpha_q: 0.01,
            epsilon_init: 0.3,
            epsilon_min: 0.01,
            epsilon_decay: 0.995,
            tau: 0.1,
            temperature: 1.3,
            eta_b: 0.95,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("alpha_q", self.alpha_q),
            ("epsilon_init", self.epsilon_init),
            ("epsilon_min", self.epsilon_min),
            ("epsilon_decay", self.epsilon_decay),
            ("eta_b", self.eta_b),
        ];
        for (name, x) in rates {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::Config(format!("{name} = {x} must lie in (0, 1]")));
            }
        }
        if !(self.tau >= 0.0) {
            return Err(Error::Config(format!("tau = {} must be >= 0", self.tau)));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Config(format!(
                "temperature = {} must be > 0",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Exploration rate after one more episode.
    pub fn decay(&self, epsilon: f64) -> f64 {
        (epsilon * self.epsilon_decay).max(self.epsilon_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    /// Expected-utility Q-learner.
    #[serde(rename = "AI")]
    Ai,
    /// Stateless prospect-theoretic best replier with full payoff knowledge.
    #[serde(rename = "AH")]
    AwareHuman,
    /// Prospect-theoretic joint-action Q-learner with beliefs.
    #[serde(rename = "LH")]
    LearningHuman,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Ai, AgentKind::AwareHuman, AgentKind::LearningHuman];

    pub fn code(self) -> &'static str {
        match self {
            AgentKind::Ai => "AI",
            AgentKind::AwareHuman => "AH",
            AgentKind::LearningHuman => "LH",
        }
    }

    /// Whether the agent values outcomes with prospect theory.
    pub fn is_human(self) -> bool {
        !matches!(self, AgentKind::Ai)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AI" => Ok(AgentKind::Ai),
            "AH" => Ok(AgentKind::AwareHuman),
            "LH" => Ok(AgentKind::LearningHuman),
            _ => Err(Error::UnknownName {
                kind: "agent kind",
                name: s.to_string(),
            }),
        }
    }
}

/// Result of an epsilon-greedy draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub action: usize,
    pub explored: bool,
}

/// Everything one agent needs to be built for a run.
#[derive(Debug, Clone, Copy)]
pub struct AgentSetup {
    pub kind: AgentKind,
    pub side: Side,
    pub opponent: AgentKind,
    pub history_len: usize,
    pub reference_bins: usize,
    pub learning: LearningConfig,
    pub cpt: CptParams,
    pub reference: ReferenceModel,
    pub lh_outcomes: ProspectOutcomes,
}

/// One agent's choice for a step together with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub state_id: usize,
    pub action: usize,
    pub explored: bool,
    pub epsilon: f64,
    /// Reference point in force when the action was chosen.
    pub reference: Option<f64>,
    pub eu_values: Option<Vec<f64>>,
    pub cpt_values: Option<Vec<f64>>,
}

/// What an agent observes after the joint action is played.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback {
    pub own_action: usize,
    pub opponent_action: usize,
    pub own_reward: f64,
    pub opponent_reward: f64,
    pub next_history: usize,
}

#[derive(Debug, Clone)]
pub enum Agent {
    Ai(AiAgent),
    Aware(AwareHuman),
    Learning(LearningHuman),
}

impl Agent {
    pub fn new(setup: &AgentSetup, game: &Game) -> Self {
        match setup.kind {
            AgentKind::Ai => Agent::Ai(AiAgent::new(setup, game)),
            AgentKind::AwareHuman => Agent::Aware(AwareHuman::new(setup, game)),
            AgentKind::LearningHuman => Agent::Learning(LearningHuman::new(setup, game)),
        }
    }

    pub fn kind(&self) -> AgentKind {
        match self {
            Agent::Ai(_) => AgentKind::Ai,
            Agent::Aware(_) => AgentKind::AwareHuman,
            Agent::Learning(_) => AgentKind::LearningHuman,
        }
    }

    pub fn decide<R: Rng + ?Sized>(&mut self, game: &Game, history: usize, rng: &mut R) -> Decision {
        match self {
            Agent::Ai(a) => a.decide(history, rng),
            Agent::Aware(a) => a.decide(game, rng),
            Agent::Learning(a) => a.decide(game, history, rng),
        }
    }

    pub fn learn(&mut self, game: &Game, feedback: &Feedback) {
        match self {
            Agent::Ai(a) => a.learn(feedback),
            Agent::Aware(a) => a.learn(game, feedback),
            Agent::Learning(a) => a.learn(feedback),
        }
    }

    /// Episode boundary: only the exploration rate changes.
    pub fn end_episode(&mut self) {
        match self {
            Agent::Ai(a) => a.epsilon = a.config.decay(a.epsilon),
            Agent::Aware(_) => {}
            Agent::Learning(a) => a.epsilon = a.config.decay(a.epsilon),
        }
    }

    pub fn reference(&self) -> Option<f64> {
        match self {
            Agent::Ai(_) => None,
            Agent::Aware(a) => Some(a.reference),
            Agent::Learning(a) => Some(a.reference),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_schedule() {
        let c = LearningConfig::default();
        assert!((c.decay(0.3) - 0.2985).abs() < 1e-15);
        assert_eq!(c.decay(0.01), 0.01);
        let mut eps = c.epsilon_init;
        for _ in 0..2000 {
            eps = c.decay(eps);
        }
        assert_eq!(eps, c.epsilon_min);
    }

    #[test]
    fn config_validation() {
        assert!(LearningConfig::default().validate().is_ok());
        let bad = LearningConfig {
            temperature: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = LearningConfig {
            alpha_q: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn kind_codes() {
        for k in AgentKind::ALL {
            assert_eq!(k.code().parse::<AgentKind>().unwrap(), k);
        }
        assert!("bot".parse::<AgentKind>().is_err());
    }
}
