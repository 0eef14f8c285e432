//! Reference-point models and their update rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Constant reference.
    Fixed,
    /// Moving average of the agent's own payoffs.
    Ema,
    /// Belief-weighted action values.
    VBased,
    /// Moving average of the opponent's payoffs.
    Emaor,
}

impl ReferenceKind {
    pub const ALL: [ReferenceKind; 4] = [
        ReferenceKind::Fixed,
        ReferenceKind::Ema,
        ReferenceKind::VBased,
        ReferenceKind::Emaor,
    ];

    /// The three models whose reference moves during play.
    pub const ADAPTIVE: [ReferenceKind; 3] =
        [ReferenceKind::Ema, ReferenceKind::VBased, ReferenceKind::Emaor];

    pub fn slug(self) -> &'static str {
        match self {
            ReferenceKind::Fixed => "fixed",
            ReferenceKind::Ema => "ema",
            ReferenceKind::VBased => "v-based",
            ReferenceKind::Emaor => "emaor",
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ReferenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "fixed" => Ok(ReferenceKind::Fixed),
            "ema" => Ok(ReferenceKind::Ema),
            "v-based" | "vbased" | "v" | "q-based" => Ok(ReferenceKind::VBased),
            "emaor" => Ok(ReferenceKind::Emaor),
            _ => Err(Error::UnknownName {
                kind: "reference model",
                name: s.to_string(),
            }),
        }
    }
}

/// How the value-based reference aggregates over the agent's own actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VBasedForm {
    /// Equal-weight mean over own actions of the belief-weighted value.
    #[default]
    Mean,
    /// Sum over own actions, each term multiplied by the action index.
    IndexWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub kind: ReferenceKind,
    pub eta_ref: f64,
    pub fixed_value: f64,
    #[serde(default)]
    pub v_form: VBasedForm,
}

impl Default for ReferenceModel {
    fn default() -> Self {
        Self::new(ReferenceKind::Ema)
    }
}

impl ReferenceModel {
    pub fn new(kind: ReferenceKind) -> Self {
        Self {
            kind,
            eta_ref: 0.95,
            fixed_value: 0.0,
            v_form: VBasedForm::Mean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta_ref) {
            return Err(Error::Config(format!(
                "eta_ref = {} must lie in [0, 1]",
                self.eta_ref
            )));
        }
        if !self.fixed_value.is_finite() {
            return Err(Error::Config("fixed reference must be finite".into()));
        }
        Ok(())
    }

    /// Reference value at the start of a run.
    pub fn initial(&self) -> f64 {
        match self.kind {
            ReferenceKind::Fixed => self.fixed_value,
            _ => 0.0,
        }
    }

    /// Next reference value. `v_based` is only evaluated for the
    /// value-based model.
    pub fn update(
        &self,
        current: f64,
        own_reward: f64,
        opponent_reward: f64,
        v_based: impl FnOnce() -> f64,
    ) -> f64 {
        match self.kind {
            ReferenceKind::Fixed => current,
            ReferenceKind::Ema => update_ema(current, own_reward, self.eta_ref),
            ReferenceKind::Emaor => update_emaor(current, opponent_reward, self.eta_ref),
            ReferenceKind::VBased => v_based(),
        }
    }
}

pub fn update_ema(current: f64, own_reward: f64, eta_ref: f64) -> f64 {
    eta_ref * current + (1.0 - eta_ref) * own_reward
}

pub fn update_emaor(current: f64, opponent_reward: f64, eta_ref: f64) -> f64 {
    eta_ref * current + (1.0 - eta_ref) * opponent_reward
}

/// Value-based reference from a `[own][opp]` table of action values and a
/// belief vector over opponent actions.
pub fn compute_v_based(values: &[Vec<f64>], beliefs: &[f64], form: VBasedForm) -> Result<f64> {
    check_beliefs(beliefs)?;
    if values.is_empty() || values.iter().any(|row| row.len() != beliefs.len()) {
        return Err(Error::Config(
            "value table does not match the belief vector".into(),
        ));
    }
    let expected = values
        .iter()
        .map(|row| row.iter().zip(beliefs).map(|(q, b)| q * b).sum::<f64>());
    Ok(match form {
        VBasedForm::Mean => expected.sum::<f64>() / values.len() as f64,
        VBasedForm::IndexWeighted => expected.enumerate().map(|(a, v)| a as f64 * v).sum(),
    })
}

pub(crate) fn check_beliefs(beliefs: &[f64]) -> Result<()> {
    let total: f64 = beliefs.iter().sum();
    if beliefs.iter().any(|b| !(*b >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidBeliefs(format!(
            "{beliefs:?} is not a probability vector"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ema_examples() {
        assert!((update_ema(0.0, -2.0, 0.95) + 0.1).abs() < 1e-15);
        assert_eq!(update_ema(1.7, 1.7, 0.3), 1.7);
        assert!((update_ema(1.0, 0.0, 0.95) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn emaor_examples() {
        assert!((update_emaor(0.0, 3.0, 0.95) - 0.15).abs() < 1e-15);
        assert_eq!(update_emaor(-4.0, -4.0, 0.8), -4.0);
        assert_eq!(update_emaor(-1.0, 0.0, 0.5), -0.5);
    }

    #[test]
    fn v_based_examples() {
        let zeros = vec![vec![0.0; 2]; 2];
        assert_eq!(compute_v_based(&zeros, &[0.3, 0.7], VBasedForm::Mean).unwrap(), 0.0);

        let constant = vec![vec![2.5; 2]; 2];
        let v = compute_v_based(&constant, &[0.9, 0.1], VBasedForm::Mean).unwrap();
        assert!((v - 2.5).abs() < 1e-12);

        let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(
            compute_v_based(&identity, &[0.5, 0.5], VBasedForm::Mean).unwrap(),
            0.5
        );
        // index weighting keeps only the second action's term
        let q = vec![vec![4.0, 0.0], vec![1.0, 3.0]];
        assert_eq!(
            compute_v_based(&q, &[0.5, 0.5], VBasedForm::IndexWeighted).unwrap(),
            2.0
        );
    }

    #[test]
    fn v_based_rejects_bad_beliefs() {
        let zeros = vec![vec![0.0; 2]; 2];
        assert!(matches!(
            compute_v_based(&zeros, &[0.6, 0.6], VBasedForm::Mean),
            Err(Error::InvalidBeliefs(_))
        ));
        assert!(compute_v_based(&zeros, &[1.5, -0.5], VBasedForm::Mean).is_err());
    }

    #[test]
    fn fixed_model_ignores_rewards() {
        let model = ReferenceModel::new(ReferenceKind::Fixed);
        let r = model.initial();
        assert_eq!(model.update(r, 10.0, -10.0, || unreachable!()), 0.0);
    }

    #[test]
    fn kinds_parse() {
        for k in ReferenceKind::ALL {
            assert_eq!(k.slug().parse::<ReferenceKind>().unwrap(), k);
        }
        assert!("mean".parse::<ReferenceKind>().is_err());
    }
}
