//! Tabular learning state. Every table is a flat vector indexed by state id.

use serde::{Deserialize, Serialize};

/// `Q(state, own action)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTableAi {
    actions: usize,
    values: Vec<f64>,
}

impl QTableAi {
    pub fn new(states: usize, actions: usize) -> Self {
        Self {
            actions,
            values: vec![0.0; states * actions],
        }
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> usize {
        self.values.len() / self.actions
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.actions + action] = value;
    }

    pub fn max(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `Q(state, own action, opponent action)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTableLh {
    actions: usize,
    values: Vec<f64>,
}

impl QTableLh {
    pub fn new(states: usize, actions: usize) -> Self {
        Self {
            actions,
            values: vec![0.0; states * actions * actions],
        }
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> usize {
        self.values.len() / (self.actions * self.actions)
    }

    fn offset(&self, state: usize, own: usize, opp: usize) -> usize {
        (state * self.actions + own) * self.actions + opp
    }

    pub fn get(&self, state: usize, own: usize, opp: usize) -> f64 {
        self.values[self.offset(state, own, opp)]
    }

    pub fn set(&mut self, state: usize, own: usize, opp: usize, value: f64) {
        let i = self.offset(state, own, opp);
        self.values[i] = value;
    }

    /// Values over opponent actions for a fixed own action.
    pub fn own_row(&self, state: usize, own: usize) -> &[f64] {
        let start = self.offset(state, own, 0);
        &self.values[start..start + self.actions]
    }

    /// The `[own][opp]` slice at `state`.
    pub fn slice(&self, state: usize) -> Vec<Vec<f64>> {
        (0..self.actions).map(|a| self.own_row(state, a).to_vec()).collect()
    }

    /// Belief-weighted value of each own action.
    pub fn expected(&self, state: usize, beliefs: &[f64]) -> Vec<f64> {
        (0..self.actions)
            .map(|a| {
                self.own_row(state, a)
                    .iter()
                    .zip(beliefs)
                    .map(|(q, b)| q * b)
                    .sum()
            })
            .collect()
    }
}

/// Per-state distribution over the opponent's next action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefTable {
    actions: usize,
    values: Vec<f64>,
}

impl BeliefTable {
    /// Uniform beliefs everywhere.
    pub fn new(states: usize, actions: usize) -> Self {
        Self {
            actions,
            values: vec![1.0 / actions as f64; states * actions],
        }
    }

    pub fn get(&self, state: usize) -> &[f64] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn set(&mut self, state: usize, beliefs: &[f64]) {
        assert_eq!(beliefs.len(), self.actions);
        self.values[state * self.actions..(state + 1) * self.actions].copy_from_slice(beliefs);
    }

    pub(crate) fn get_mut(&mut self, state: usize) -> &mut [f64] {
        &mut self.values[state * self.actions..(state + 1) * self.actions]
    }
}

/// Running mean of every reward an agent has received.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AverageRewardEstimate {
    pub value: f64,
    pub count: u64,
}

impl AverageRewardEstimate {
    pub fn record(&mut self, reward: f64) {
        self.count += 1;
        self.value += (reward - self.value) / self.count as f64;
    }
}
