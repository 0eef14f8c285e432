//! Diagnostics computed from step logs.

use serde::{Deserialize, Serialize};

use crate::agents::policy::{argmax, top_two_gap};
use crate::engine::StepRecord;
use crate::games::{Concept, Game, Side};

/// Expected-value gaps below this count as numerical ties.
pub const EU_TIE_EPSILON: f64 = 1e-8;

/// Whether the prospect-theoretic best action differs from the
/// expected-value one. `None` when the expected values are tied.
pub fn action_change(eu: &[f64], cpt: &[f64], tie_epsilon: f64) -> Option<bool> {
    if top_two_gap(eu) < tie_epsilon {
        return None;
    }
    Some(argmax(eu) != argmax(cpt))
}

/// Euclidean distance between the prospect and expected action values.
pub fn cpt_eu_l2(eu: &[f64], cpt: &[f64]) -> f64 {
    eu.iter()
        .zip(cpt)
        .map(|(e, c)| (c - e) * (c - e))
        .sum::<f64>()
        .sqrt()
}

/// Fraction of eligible exploit steps on which the prospect and expected
/// best actions disagree. `None` for agents without value diagnostics.
pub fn cpt_action_change_rate(records: &[StepRecord], side: Side) -> Option<f64> {
    cpt_action_change_rate_with(records, side, EU_TIE_EPSILON)
}

pub fn cpt_action_change_rate_with(records: &[StepRecord], side: Side, tie_epsilon: f64) -> Option<f64> {
    let mut has_values = false;
    let mut eligible = 0usize;
    let mut changed = 0usize;
    for rec in records {
        let agent = &rec.agents[side.index()];
        let (Some(eu), Some(cpt)) = (&agent.eu_values, &agent.cpt_values) else {
            continue;
        };
        has_values = true;
        if agent.explored {
            continue;
        }
        if let Some(flag) = action_change(eu, cpt, tie_epsilon) {
            eligible += 1;
            changed += usize::from(flag);
        }
    }
    if !has_values {
        return None;
    }
    Some(if eligible == 0 {
        0.0
    } else {
        changed as f64 / eligible as f64
    })
}

fn tail(records: &[StepRecord], window: usize) -> &[StepRecord] {
    &records[records.len().saturating_sub(window)..]
}

/// Empirical frequency of each player's first action over the last
/// `window` steps.
pub fn first_action_frequencies(records: &[StepRecord], window: usize) -> (f64, f64) {
    let w = tail(records, window);
    if w.is_empty() {
        return (0.0, 0.0);
    }
    let n = w.len() as f64;
    let row = w.iter().filter(|r| r.joint.0 == 0).count() as f64;
    let col = w.iter().filter(|r| r.joint.1 == 0).count() as f64;
    (row / n, col / n)
}

/// Distribution over joint actions in the last `window` steps, indexed
/// `[row action][col action]`.
pub fn joint_action_frequencies(records: &[StepRecord], window: usize, actions: usize) -> Vec<Vec<f64>> {
    let w = tail(records, window);
    let mut table = vec![vec![0.0; actions]; actions];
    if w.is_empty() {
        return table;
    }
    for r in w {
        table[r.joint.0][r.joint.1] += 1.0;
    }
    let n = w.len() as f64;
    for cell in table.iter_mut().flatten() {
        *cell /= n;
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    Documented { p: f64, q: f64, concept: Concept },
    Anomalous { p: f64, q: f64 },
}

impl Classification {
    pub fn is_documented(&self) -> bool {
        matches!(self, Classification::Documented { .. })
    }
}

/// Nearest documented equilibrium within Chebyshev distance `tol`.
pub fn classify_equilibrium(policy: (f64, f64), game: &Game, tol: f64) -> Classification {
    let nearest = game
        .equilibria
        .iter()
        .map(|e| (e.distance(policy), e))
        .filter(|(d, _)| *d <= tol)
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match nearest {
        Some((_, e)) => Classification::Documented {
            p: e.p,
            q: e.q,
            concept: e.concept,
        },
        None => Classification::Anomalous {
            p: policy.0,
            q: policy.1,
        },
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-episode means for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSeries {
    pub reward: [Vec<f64>; 2],
    pub first_action: [Vec<f64>; 2],
    pub reference: [Option<Vec<f64>>; 2],
    pub l2: [Option<Vec<f64>>; 2],
    pub change_rate: [Option<Vec<f64>>; 2],
}

impl EpisodeSeries {
    pub fn from_records(records: &[StepRecord], steps_per_episode: usize) -> Self {
        let episodes: Vec<&[StepRecord]> = records.chunks(steps_per_episode.max(1)).collect();
        let per_episode = |f: &dyn Fn(&[StepRecord]) -> Option<f64>| -> Option<Vec<f64>> {
            episodes.iter().map(|ep| f(ep)).collect()
        };
        let sides = Side::BOTH;
        let reward = sides.map(|s| {
            per_episode(&|ep| {
                mean(ep.iter().map(|r| if s == Side::Row { r.rewards.0 } else { r.rewards.1 }))
            })
            .unwrap_or_default()
        });
        let first_action = sides.map(|s| {
            per_episode(&|ep| {
                mean(ep.iter().map(|r| {
                    let a = if s == Side::Row { r.joint.0 } else { r.joint.1 };
                    if a == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }))
            })
            .unwrap_or_default()
        });
        let reference = sides.map(|s| {
            per_episode(&|ep| mean(ep.iter().filter_map(|r| r.agents[s.index()].reference)))
        });
        let l2 = sides.map(|s| per_episode(&|ep| mean(ep.iter().filter_map(|r| r.agents[s.index()].l2))));
        let change_rate = sides.map(|s| per_episode(&|ep| cpt_action_change_rate(ep, s)));
        Self {
            reward,
            first_action,
            reference,
            l2,
            change_rate,
        }
    }
}

/// One metric across runs: per-episode mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub name: String,
    pub mean: Vec<f64>,
    /// Sample standard deviation across runs; zero with a single run.
    pub std: Vec<f64>,
}

impl MetricSeries {
    /// `per_run[run][episode]`; every run must have the same length.
    pub fn from_runs(name: impl Into<String>, per_run: &[&[f64]]) -> Self {
        let len = per_run.first().map_or(0, |r| r.len());
        assert!(per_run.iter().all(|r| r.len() == len), "ragged metric series");
        let n = per_run.len() as f64;
        let mut mean = vec![0.0; len];
        let mut std = vec![0.0; len];
        for e in 0..len {
            let m = per_run.iter().map(|r| r[e]).sum::<f64>() / n;
            mean[e] = m;
            if per_run.len() > 1 {
                let var = per_run.iter().map(|r| (r[e] - m).powi(2)).sum::<f64>() / (n - 1.0);
                std[e] = var.sqrt();
            }
        }
        Self {
            name: name.into(),
            mean,
            std,
        }
    }
}

/// Cross-run series for every per-episode metric present in all runs.
pub fn aggregate_series(series: &[&EpisodeSeries]) -> Vec<MetricSeries> {
    let mut out = Vec::new();
    if series.is_empty() {
        return out;
    }
    for side in Side::BOTH {
        let i = side.index();
        let tag = match side {
            Side::Row => "row",
            Side::Col => "col",
        };
        let rows: Vec<&[f64]> = series.iter().map(|s| s.reward[i].as_slice()).collect();
        out.push(MetricSeries::from_runs(format!("{tag}.reward"), &rows));
        let rows: Vec<&[f64]> = series.iter().map(|s| s.first_action[i].as_slice()).collect();
        out.push(MetricSeries::from_runs(format!("{tag}.first_action"), &rows));
        let optional: [(&str, fn(&EpisodeSeries, usize) -> Option<&[f64]>); 3] = [
            ("reference", |s, i| s.reference[i].as_deref()),
            ("l2", |s, i| s.l2[i].as_deref()),
            ("change_rate", |s, i| s.change_rate[i].as_deref()),
        ];
        for (name, get) in optional {
            let rows: Option<Vec<&[f64]>> = series.iter().map(|s| get(s, i)).collect();
            if let Some(rows) = rows {
                out.push(MetricSeries::from_runs(format!("{tag}.{name}"), &rows));
            }
        }
    }
    out
}
