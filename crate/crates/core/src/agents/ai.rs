use rand::Rng;

use super::policy::tie_break;
use super::{AgentSetup, AverageRewardEstimate, Decision, Feedback, LearningConfig, QTableAi, Selection};
use crate::games::{Game, StateEncoder};

/// Epsilon-greedy over `Q(state, .)` with the near-tie softmax.
pub fn ai_select_action<R: Rng + ?Sized>(
    q: &QTableAi,
    state: usize,
    epsilon: f64,
    config: &LearningConfig,
    rng: &mut R,
) -> Selection {
    if rng.gen::<f64>() < epsilon {
        return Selection {
            action: rng.gen_range(0..q.actions()),
            explored: true,
        };
    }
    Selection {
        action: tie_break(q.row(state), config.tau, config.temperature, rng),
        explored: false,
    }
}

/// Average-reward Q update; the running mean absorbs `reward` afterwards.
pub fn ai_update(
    q: &mut QTableAi,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    avg_reward: &mut AverageRewardEstimate,
    alpha_q: f64,
) {
    let target = reward - avg_reward.value + q.max(next_state);
    let old = q.get(state, action);
    q.set(state, action, (1.0 - alpha_q) * old + alpha_q * target);
    avg_reward.record(reward);
}

#[derive(Debug, Clone)]
pub struct AiAgent {
    pub q: QTableAi,
    pub avg_reward: AverageRewardEstimate,
    pub epsilon: f64,
    pub config: LearningConfig,
    encoder: StateEncoder,
    last_state: usize,
}

impl AiAgent {
    pub fn new(setup: &AgentSetup, game: &Game) -> Self {
        let encoder = StateEncoder::history_only(game.actions(), setup.history_len);
        Self {
            q: QTableAi::new(encoder.state_count(), game.actions()),
            avg_reward: AverageRewardEstimate::default(),
            epsilon: setup.learning.epsilon_init,
            config: setup.learning,
            encoder,
            last_state: 0,
        }
    }

    pub(super) fn decide<R: Rng + ?Sized>(&mut self, history: usize, rng: &mut R) -> Decision {
        let state = self.encoder.encode(history, 0.0);
        self.last_state = state;
        let sel = ai_select_action(&self.q, state, self.epsilon, &self.config, rng);
        Decision {
            state_id: state,
            action: sel.action,
            explored: sel.explored,
            epsilon: self.epsilon,
            reference: None,
            eu_values: None,
            cpt_values: None,
        }
    }

    pub(super) fn learn(&mut self, fb: &Feedback) {
        let next = self.encoder.encode(fb.next_history, 0.0);
        ai_update(
            &mut self.q,
            self.last_state,
            fb.own_action,
            fb.own_reward,
            next,
            &mut self.avg_reward,
            self.config.alpha_q,
        );
    }
}
