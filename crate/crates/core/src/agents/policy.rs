//! Action selection shared by every agent kind: argmax with a near-tie
//! softmax, and uniform exploration.

use rand::Rng;

/// Index of the first maximal value.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Gap between the best and second-best value; infinite for one action.
pub fn top_two_gap(values: &[f64]) -> f64 {
    let mut first = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &v in values {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    first - second
}

pub fn softmax(values: &[f64], temperature: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values
        .iter()
        .map(|v| ((v - max) / temperature).exp())
        .collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

pub fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Greedy choice, except that a top-two gap below `tau` samples from the
/// softmax over all values.
pub fn tie_break<R: Rng + ?Sized>(values: &[f64], tau: f64, temperature: f64, rng: &mut R) -> usize {
    if top_two_gap(values) < tau {
        sample(&softmax(values, temperature), rng)
    } else {
        argmax(values)
    }
}
