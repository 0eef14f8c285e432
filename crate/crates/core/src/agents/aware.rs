use rand::Rng;

use super::policy::tie_break;
use super::{AgentKind, AgentSetup, Decision, Feedback, LearningConfig};
use crate::cpt::CptParams;
use crate::games::{Game, Side};
use crate::reference::{compute_v_based, ReferenceModel};

/// One-shot best reply of an aware human.
#[derive(Debug, Clone, PartialEq)]
pub struct AwareChoice {
    pub action: usize,
    /// Opponent's best reply to each own action.
    pub replies: Vec<usize>,
    /// Raw payoff of each own action against the opponent's reply.
    pub eu_values: Vec<f64>,
    /// Prospect value of the same payoffs at the agent's reference.
    pub cpt_values: Vec<f64>,
}

/// For every own action find the opponent's best reply, value the resulting
/// payoff, and pick the best action with the near-tie softmax.
///
/// The opponent's payoffs are taken at face value for an AI opponent and
/// through the value function at reference 0 for a human one; the aware
/// human has no view of the opponent's own reference.
pub fn aware_human_action<R: Rng + ?Sized>(
    game: &Game,
    side: Side,
    opponent: AgentKind,
    reference: f64,
    params: &CptParams,
    config: &LearningConfig,
    rng: &mut R,
) -> AwareChoice {
    let m = game.actions();
    let opp_value = |x: f64| {
        if opponent.is_human() {
            params.value(x, 0.0)
        } else {
            x
        }
    };

    let replies: Vec<usize> = (0..m)
        .map(|own| {
            let values: Vec<f64> = (0..m)
                .map(|opp| opp_value(game.opponent_payoff(side, own, opp)))
                .collect();
            super::policy::argmax(&values)
        })
        .collect();
    let eu_values: Vec<f64> = (0..m)
        .map(|own| game.own_payoff(side, own, replies[own]))
        .collect();
    let cpt_values: Vec<f64> = eu_values.iter().map(|&x| params.value(x, reference)).collect();
    let action = tie_break(&cpt_values, config.tau, config.temperature, rng);

    AwareChoice {
        action,
        replies,
        eu_values,
        cpt_values,
    }
}

/// Aware human: ignores history, keeps a reference point and a single
/// belief vector used by the value-based reference.
#[derive(Debug, Clone)]
pub struct AwareHuman {
    pub side: Side,
    pub opponent: AgentKind,
    pub reference: f64,
    pub beliefs: Vec<f64>,
    params: CptParams,
    config: LearningConfig,
    model: ReferenceModel,
    own_table: Vec<Vec<f64>>,
}

impl AwareHuman {
    pub fn new(setup: &AgentSetup, game: &Game) -> Self {
        let m = game.actions();
        Self {
            side: setup.side,
            opponent: setup.opponent,
            reference: setup.reference.initial(),
            beliefs: vec![1.0 / m as f64; m],
            params: setup.cpt,
            config: setup.learning,
            model: setup.reference,
            own_table: game.own_table(setup.side),
        }
    }

    pub(super) fn decide<R: Rng + ?Sized>(&mut self, game: &Game, rng: &mut R) -> Decision {
        let choice = aware_human_action(
            game,
            self.side,
            self.opponent,
            self.reference,
            &self.params,
            &self.config,
            rng,
        );
        Decision {
            state_id: 0,
            action: choice.action,
            explored: false,
            epsilon: 0.0,
            reference: Some(self.reference),
            eu_values: Some(choice.eu_values),
            cpt_values: Some(choice.cpt_values),
        }
    }

    pub(super) fn learn(&mut self, _game: &Game, fb: &Feedback) {
        let eta = self.config.eta_b;
        for (a, b) in self.beliefs.iter_mut().enumerate() {
            let hit = if a == fb.opponent_action { 1.0 } else { 0.0 };
            *b = eta * *b + (1.0 - eta) * hit;
        }
        let (table, beliefs, form) = (&self.own_table, &self.beliefs, self.model.v_form);
        self.reference = self.model.update(self.reference, fb.own_reward, fb.opponent_reward, || {
            compute_v_based(table, beliefs, form).expect("belief vector stays normalized")
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn choose(game: GameId, side: Side, opp: AgentKind, r: f64, seed: u64) -> AwareChoice {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        aware_human_action(
            &game.game(),
            side,
            opp,
            r,
            &CptParams::default(),
            &LearningConfig::default(),
            &mut rng,
        )
    }

    #[test]
    fn prisoners_dilemma_defects() {
        for opp in AgentKind::ALL {
            for side in Side::BOTH {
                let c = choose(GameId::PrisonersDilemma, side, opp, 0.0, 1);
                assert_eq!(c.replies, vec![1, 1]);
                assert_eq!(c.eu_values, vec![-3.0, -2.0]);
                assert_eq!(c.action, 1);
            }
        }
    }

    #[test]
    fn stag_hunt_picks_stag() {
        let c = choose(GameId::StagHunt, Side::Row, AgentKind::AwareHuman, 0.0, 1);
        assert_eq!(c.replies, vec![0, 1]);
        assert_eq!(c.eu_values, vec![3.0, 1.0]);
        assert_eq!(c.action, 0);
    }

    #[test]
    fn matching_pennies_is_a_coin_flip() {
        let game = GameId::MatchingPennies.game();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let zeros = (0..n)
            .filter(|_| {
                aware_human_action(
                    &game,
                    Side::Row,
                    AgentKind::AwareHuman,
                    0.0,
                    &CptParams::default(),
                    &LearningConfig::default(),
                    &mut rng,
                )
                .action
                    == 0
            })
            .count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() <= 0.02);
    }
}
