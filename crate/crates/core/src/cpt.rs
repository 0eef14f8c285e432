//! Cumulative prospect theory kernel.
//!
//! Outcomes are valued relative to a reference point with a power value
//! function that is steeper for losses, and probabilities are transformed
//! through rank-dependent inverse-S weighting functions. Everything here is a
//! pure function of its inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the probability mass of a prospect.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Value-function and weighting-function parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptParams {
    /// Curvature on gains.
    pub alpha: f64,
    /// Curvature on losses.
    pub beta: f64,
    /// Loss aversion multiplier.
    pub lambda: f64,
    /// Weighting exponent on gains.
    pub gamma: f64,
    /// Weighting exponent on losses.
    pub delta: f64,
}

impl Default for CptParams {
    fn default() -> Self {
        Self {
            alpha: 0.88,
            beta: 0.88,
            lambda: 2.25,
            gamma: 0.61,
            delta: 0.69,
        }
    }
}

impl CptParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64, gamma: f64, delta: f64) -> Result<Self> {
        let params = Self {
            alpha,
            beta,
            lambda,
            gamma,
            delta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters under which the prospect value collapses to expected value.
    pub fn expected_utility() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            lambda: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if x > 0.0 && x <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} = {x} must lie in (0, 1]")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("beta", self.beta)?;
        unit("gamma", self.gamma)?;
        unit("delta", self.delta)?;
        if !(self.lambda >= 1.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda = {} must be a finite value >= 1",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Reference-dependent value of a single outcome.
    #[inline]
    pub fn value(&self, outcome: f64, reference: f64) -> f64 {
        if outcome >= reference {
            (outcome - reference).powf(self.alpha)
        } else {
            -self.lambda * (reference - outcome).powf(self.beta)
        }
    }

    /// Probability weighting applied to decumulative gain probabilities.
    #[inline]
    pub fn weight_gain(&self, p: f64) -> f64 {
        inverse_s(p, self.gamma)
    }

    /// Probability weighting applied to cumulative loss probabilities.
    #[inline]
    pub fn weight_loss(&self, p: f64) -> f64 {
        inverse_s(p, self.delta)
    }

    /// Rank-dependent decision weights of each prospect entry.
    ///
    /// Losses take differences of the weighted cumulative distribution,
    /// gains differences of the weighted decumulative distribution. An
    /// outcome sitting exactly on the reference gets weight 0, but its mass
    /// still counts towards both distributions.
    pub fn decision_weights(&self, prospect: &Prospect, reference: f64) -> DecisionWeights {
        let entries = prospect.entries();
        let n = entries.len();
        let mut weights = vec![0.0; n];

        let loss_end = entries.partition_point(|&(o, _)| o < reference);
        let gain_start = entries.partition_point(|&(o, _)| o <= reference);

        let mut cumulative = 0.0;
        let mut prev = 0.0;
        for (k, &(_, p)) in entries[..loss_end].iter().enumerate() {
            cumulative += p;
            let w = self.weight_loss(cumulative.min(1.0));
            weights[k] = w - prev;
            prev = w;
        }

        let mut decumulative = 0.0;
        let mut prev = 0.0;
        for k in (gain_start..n).rev() {
            decumulative += entries[k].1;
            let w = self.weight_gain(decumulative.min(1.0));
            weights[k] = w - prev;
            prev = w;
        }

        DecisionWeights {
            weights,
            loss_end,
            gain_start,
        }
    }

    /// Prospect value relative to `reference`.
    pub fn cpt_value(&self, prospect: &Prospect, reference: f64) -> f64 {
        let weights = self.decision_weights(prospect, reference);
        prospect
            .entries()
            .iter()
            .zip(weights.all())
            .map(|(&(o, _), &w)| w * self.value(o, reference))
            .sum()
    }
}

fn inverse_s(p: f64, exponent: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&p),
        "probability {p} outside [0, 1]"
    );
    let a = p.powf(exponent);
    let b = (1.0 - p).powf(exponent);
    a / (a + b).powf(1.0 / exponent)
}

/// A finite lottery in canonical form: outcomes strictly ascending, equal
/// outcomes merged, probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prospect {
    entries: Vec<(f64, f64)>,
}

impl Prospect {
    /// Validates and canonicalizes `(outcome, probability)` pairs.
    pub fn new(entries: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut entries: Vec<(f64, f64)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::InvalidProspect("no outcomes".into()));
        }
        let mut total = 0.0;
        for &(o, p) in &entries {
            if !o.is_finite() {
                return Err(Error::InvalidProspect(format!("outcome {o} is not finite")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProspect(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidProspect(format!(
                "probabilities sum to {total}"
            )));
        }

        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(entries.len());
        for (o, p) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == o => last.1 += p,
                _ => merged.push((o, p)),
            }
        }
        Ok(Self { entries: merged })
    }

    /// A sure outcome.
    pub fn degenerate(outcome: f64) -> Self {
        Self {
            entries: vec![(outcome, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expected value of the lottery.
    pub fn eu_value(&self) -> f64 {
        self.entries.iter().map(|&(o, p)| o * p).sum()
    }
}

/// Decision weights aligned with the entries of a canonical prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionWeights {
    weights: Vec<f64>,
    loss_end: usize,
    gain_start: usize,
}

impl DecisionWeights {
    /// One weight per prospect entry, zero for outcomes at the reference.
    pub fn all(&self) -> &[f64] {
        &self.weights
    }

    /// Weights of outcomes strictly below the reference, ascending.
    pub fn losses(&self) -> &[f64] {
        &self.weights[..self.loss_end]
    }

    /// Weights of outcomes strictly above the reference, ascending.
    pub fn gains(&self) -> &[f64] {
        &self.weights[self.gain_start..]
    }
}
