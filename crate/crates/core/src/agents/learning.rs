use rand::Rng;
use serde::{Deserialize, Serialize};

use super::policy::tie_break;
use super::{
    AgentSetup, AverageRewardEstimate, BeliefTable, Decision, Feedback, LearningConfig, QTableLh,
    Selection,
};
use crate::cpt::{CptParams, Prospect};
use crate::games::{Game, StateEncoder};
use crate::reference::{compute_v_based, ReferenceModel};

/// Where the outcomes of a learning human's per-action prospect come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProspectOutcomes {
    /// `Q(s, a, o) - reference`, weighted by beliefs over `o`.
    #[default]
    QValues,
    /// Raw payoff `R(a, o)` minus the running average reward.
    RealizedRewards,
}

/// Expected and prospect value of each own action.
#[derive(Debug, Clone, PartialEq)]
pub struct LhDiagnostics {
    pub eu_values: Vec<f64>,
    pub cpt_values: Vec<f64>,
}

fn value_prospects(
    outcomes: impl Fn(usize, usize) -> f64,
    beliefs: &[f64],
    actions: usize,
    params: &CptParams,
) -> LhDiagnostics {
    let mut eu_values = Vec::with_capacity(actions);
    let mut cpt_values = Vec::with_capacity(actions);
    for own in 0..actions {
        let prospect = Prospect::new(beliefs.iter().enumerate().map(|(opp, &b)| (outcomes(own, opp), b)))
            .expect("beliefs form a probability vector");
        eu_values.push(prospect.eu_value());
        // outcomes are already centred on the reference
        cpt_values.push(params.cpt_value(&prospect, 0.0));
    }
    LhDiagnostics {
        eu_values,
        cpt_values,
    }
}

/// Per-action values from the joint-action Q table.
pub fn lh_action_values(
    q: &QTableLh,
    beliefs: &BeliefTable,
    state: usize,
    reference: f64,
    params: &CptParams,
) -> LhDiagnostics {
    value_prospects(
        |own, opp| q.get(state, own, opp) - reference,
        beliefs.get(state),
        q.actions(),
        params,
    )
}

fn explore_or_exploit<R: Rng + ?Sized>(
    values: &[f64],
    epsilon: f64,
    config: &LearningConfig,
    rng: &mut R,
) -> Selection {
    if rng.gen::<f64>() < epsilon {
        Selection {
            action: rng.gen_range(0..values.len()),
            explored: true,
        }
    } else {
        Selection {
            action: tie_break(values, config.tau, config.temperature, rng),
            explored: false,
        }
    }
}

/// Epsilon-greedy over prospect values built from `Q - reference` and
/// beliefs. Diagnostics are filled on exploratory steps as well.
#[allow(clippy::too_many_arguments)]
pub fn lh_select_action<R: Rng + ?Sized>(
    q: &QTableLh,
    beliefs: &BeliefTable,
    state: usize,
    reference: f64,
    params: &CptParams,
    config: &LearningConfig,
    epsilon: f64,
    rng: &mut R,
) -> (Selection, LhDiagnostics) {
    let diag = lh_action_values(q, beliefs, state, reference, params);
    let sel = explore_or_exploit(&diag.cpt_values, epsilon, config, rng);
    (sel, diag)
}

/// EMA step of the belief vector at `state` towards the observed action.
pub fn update_beliefs(beliefs: &mut BeliefTable, state: usize, observed: usize, eta_b: f64) {
    for (a, b) in beliefs.get_mut(state).iter_mut().enumerate() {
        let hit = if a == observed { 1.0 } else { 0.0 };
        *b = eta_b * *b + (1.0 - eta_b) * hit;
    }
}

/// Joint-action average-reward update, bootstrapping from the
/// belief-weighted best action at `next_state`. Beliefs at `next_state` are
/// expected to be updated already.
#[allow(clippy::too_many_arguments)]
pub fn lh_update(
    q: &mut QTableLh,
    beliefs: &BeliefTable,
    state: usize,
    joint: (usize, usize),
    reward: f64,
    next_state: usize,
    avg_reward: &mut AverageRewardEstimate,
    alpha_q: f64,
) {
    let next_best = q
        .expected(next_state, beliefs.get(next_state))
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let target = reward - avg_reward.value + next_best;
    let (own, opp) = joint;
    let old = q.get(state, own, opp);
    q.set(state, own, opp, (1.0 - alpha_q) * old + alpha_q * target);
    avg_reward.record(reward);
}

#[derive(Debug, Clone)]
pub struct LearningHuman {
    pub q: QTableLh,
    pub beliefs: BeliefTable,
    pub avg_reward: AverageRewardEstimate,
    pub reference: f64,
    pub epsilon: f64,
    pub config: LearningConfig,
    params: CptParams,
    model: ReferenceModel,
    encoder: StateEncoder,
    outcomes: ProspectOutcomes,
    own_table: Vec<Vec<f64>>,
    last_state: usize,
}

impl LearningHuman {
    pub fn new(setup: &AgentSetup, game: &Game) -> Self {
        let m = game.actions();
        let encoder = StateEncoder::with_reference_bins(
            m,
            setup.history_len,
            setup.reference_bins,
            game.payoff_bounds(setup.side),
        );
        let states = encoder.state_count();
        Self {
            q: QTableLh::new(states, m),
            beliefs: BeliefTable::new(states, m),
            avg_reward: AverageRewardEstimate::default(),
            reference: setup.reference.initial(),
            epsilon: setup.learning.epsilon_init,
            config: setup.learning,
            params: setup.cpt,
            model: setup.reference,
            encoder,
            outcomes: setup.lh_outcomes,
            own_table: game.own_table(setup.side),
            last_state: 0,
        }
    }

    pub fn encoder(&self) -> &StateEncoder {
        &self.encoder
    }

    pub(super) fn decide<R: Rng + ?Sized>(&mut self, game: &Game, history: usize, rng: &mut R) -> Decision {
        let state = self.encoder.encode(history, self.reference);
        self.last_state = state;
        let diag = match self.outcomes {
            ProspectOutcomes::QValues => {
                lh_action_values(&self.q, &self.beliefs, state, self.reference, &self.params)
            }
            ProspectOutcomes::RealizedRewards => {
                let baseline = self.avg_reward.value;
                let table = &self.own_table;
                value_prospects(
                    |own, opp| table[own][opp] - baseline,
                    self.beliefs.get(state),
                    game.actions(),
                    &self.params,
                )
            }
        };
        let sel = explore_or_exploit(&diag.cpt_values, self.epsilon, &self.config, rng);
        Decision {
            state_id: state,
            action: sel.action,
            explored: sel.explored,
            epsilon: self.epsilon,
            reference: Some(self.reference),
            eu_values: Some(diag.eu_values),
            cpt_values: Some(diag.cpt_values),
        }
    }

    /// Beliefs, then reference, then Q. The next state is keyed with the
    /// reference held before this step's update.
    pub(super) fn learn(&mut self, fb: &Feedback) {
        let next = self.encoder.encode(fb.next_history, self.reference);
        update_beliefs(&mut self.beliefs, next, fb.opponent_action, self.config.eta_b);

        let (q, beliefs, form) = (&self.q, &self.beliefs, self.model.v_form);
        self.reference = self.model.update(self.reference, fb.own_reward, fb.opponent_reward, || {
            compute_v_based(&q.slice(next), beliefs.get(next), form)
                .expect("belief vector stays normalized")
        });

        lh_update(
            &mut self.q,
            &self.beliefs,
            self.last_state,
            (fb.own_action, fb.opponent_action),
            fb.own_reward,
            next,
            &mut self.avg_reward,
            self.config.alpha_q,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_start_is_a_coin_flip() {
        let q = QTableLh::new(1, 2);
        let b = BeliefTable::new(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = LearningConfig::default();
        let p = CptParams::default();
        let n = 10_000;
        let zeros = (0..n)
            .filter(|_| lh_select_action(&q, &b, 0, 0.0, &p, &cfg, 0.0, &mut rng).0.action == 0)
            .count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn degenerate_beliefs_pick_clear_winner() {
        let mut q = QTableLh::new(1, 2);
        q.set(0, 0, 0, 1.0);
        let mut b = BeliefTable::new(1, 2);
        b.set(0, &[1.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (sel, _) = lh_select_action(
            &q,
            &b,
            0,
            0.0,
            &CptParams::default(),
            &LearningConfig::default(),
            0.0,
            &mut rng,
        );
        assert_eq!(sel, Selection { action: 0, explored: false });
    }

    #[test]
    fn loss_aversion_flips_an_expected_value_tie() {
        let mut q = QTableLh::new(1, 2);
        q.set(0, 0, 0, 2.0);
        q.set(0, 0, 1, -2.0);
        let b = BeliefTable::new(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (sel, diag) = lh_select_action(
            &q,
            &b,
            0,
            0.0,
            &CptParams::default(),
            &LearningConfig::default(),
            0.0,
            &mut rng,
        );
        assert_eq!(diag.eu_values, vec![0.0, 0.0]);
        // 2^0.88 * (w+(.5) - 2.25 w-(.5)), mpmath
        assert!((diag.cpt_values[0] + 1.105_757_536_289_406_6).abs() < 1e-12);
        assert_eq!(diag.cpt_values[1], 0.0);
        assert_eq!(sel.action, 1);
    }

    #[test]
    fn update_arithmetic() {
        let mut q = QTableLh::new(1, 2);
        let b = BeliefTable::new(1, 2);
        let mut avg = AverageRewardEstimate::default();
        lh_update(&mut q, &b, 0, (1, 0), 1.0, 0, &mut avg, 0.01);
        assert!((q.get(0, 1, 0) - 0.01).abs() < 1e-15);

        let mut q = QTableLh::new(1, 2);
        let mut avg = AverageRewardEstimate { value: 0.5, count: 4 };
        lh_update(&mut q, &b, 0, (0, 0), 0.5, 0, &mut avg, 0.01);
        assert_eq!(q.get(0, 0, 0), 0.0);
    }

    #[test]
    fn belief_updates() {
        let mut b = BeliefTable::new(1, 2);
        update_beliefs(&mut b, 0, 1, 0.95);
        assert!((b.get(0)[0] - 0.475).abs() < 1e-15);
        assert!((b.get(0)[1] - 0.525).abs() < 1e-15);

        let mut b = BeliefTable::new(1, 2);
        b.set(0, &[0.0, 1.0]);
        update_beliefs(&mut b, 0, 1, 0.95);
        assert_eq!(b.get(0), &[0.0, 1.0]);

        let mut b = BeliefTable::new(1, 2);
        for k in 1..=50 {
            update_beliefs(&mut b, 0, 0, 0.95);
            let expected = 0.5 * 0.95f64.powi(k);
            assert!((b.get(0)[1] - expected).abs() < 1e-12);
        }
    }
}
