//! The heterogeneous learning loop: matchup construction, stepping, episode
//! bookkeeping, seeding and per-run summaries.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{Agent, AgentKind, AgentSetup, Decision, Feedback, LearningConfig, ProspectOutcomes};
use crate::cpt::CptParams;
use crate::error::{Error, Result};
use crate::games::{Game, GameId, History, Side};
use crate::metrics::{
    self, action_change, aggregate_series, classify_equilibrium, cpt_eu_l2, Classification,
    EpisodeSeries, MetricSeries, EU_TIE_EPSILON,
};
use crate::reference::{ReferenceKind, ReferenceModel};

/// Ordered pairing of agent kinds in the row and column seats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matchup {
    pub row: AgentKind,
    pub col: AgentKind,
}

impl Matchup {
    pub const fn new(row: AgentKind, col: AgentKind) -> Self {
        Self { row, col }
    }

    /// The six population configurations.
    pub const TABLE: [Matchup; 6] = {
        use AgentKind::*;
        [
            Matchup::new(Ai, Ai),
            Matchup::new(Ai, AwareHuman),
            Matchup::new(Ai, LearningHuman),
            Matchup::new(AwareHuman, AwareHuman),
            Matchup::new(AwareHuman, LearningHuman),
            Matchup::new(LearningHuman, LearningHuman),
        ]
    };

    pub fn mirrored(self) -> Self {
        Self::new(self.col, self.row)
    }

    pub fn is_heterogeneous(self) -> bool {
        self.row != self.col
    }

    pub fn kind(self, side: Side) -> AgentKind {
        match side {
            Side::Row => self.row,
            Side::Col => self.col,
        }
    }
}

impl fmt::Display for Matchup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.row, self.col)
    }
}

impl FromStr for Matchup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(['-', '_', '/']).ok_or_else(|| Error::UnknownName {
            kind: "matchup",
            name: s.to_string(),
        })?;
        Ok(Self::new(a.parse()?, b.parse()?))
    }
}

/// Everything that determines one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameId,
    pub matchup: Matchup,
    pub reference: ReferenceModel,
    pub history_len: usize,
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub cpt: CptParams,
    pub learning: LearningConfig,
    pub reference_bins: usize,
    /// Trailing steps used for converged-policy estimates.
    pub window: usize,
    pub classify_tol: f64,
    #[serde(default)]
    pub lh_outcomes: ProspectOutcomes,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            game: GameId::PrisonersDilemma,
            matchup: Matchup::new(AgentKind::Ai, AgentKind::Ai),
            reference: ReferenceModel::new(ReferenceKind::Ema),
            history_len: 0,
            episodes: 500,
            steps_per_episode: 100,
            runs: 30,
            base_seed: 0,
            cpt: CptParams::default(),
            learning: LearningConfig::default(),
            reference_bins: 5,
            window: 5_000,
            classify_tol: 0.05,
            lh_outcomes: ProspectOutcomes::QValues,
        }
    }
}

/// Longest supported history; the state space grows as `4^n`.
pub const MAX_HISTORY: usize = 4;

impl ExperimentConfig {
    pub fn total_steps(&self) -> usize {
        self.episodes * self.steps_per_episode
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.episodes == 0 || self.steps_per_episode == 0 {
            return Err(Error::Config(
                "runs, episodes and steps per episode must all be positive".into(),
            ));
        }
        if self.history_len > MAX_HISTORY {
            return Err(Error::Config(format!(
                "history length {} exceeds the supported maximum {MAX_HISTORY}",
                self.history_len
            )));
        }
        if self.reference_bins == 0 {
            return Err(Error::Config("need at least one reference bin".into()));
        }
        if self.window == 0 || self.window > self.total_steps() {
            return Err(Error::Config(format!(
                "window {} must lie in [1, {}]",
                self.window,
                self.total_steps()
            )));
        }
        if !(self.classify_tol > 0.0) {
            return Err(Error::Config("classification tolerance must be > 0".into()));
        }
        self.cpt.validate()?;
        self.learning.validate()?;
        self.reference.validate()?;
        let game = self.game.game();
        if game.actions() != 2 {
            return Err(Error::Config(format!(
                "{} has {} actions; agents support 2x2 games only",
                self.game,
                game.actions()
            )));
        }
        Ok(())
    }

    fn setup(&self, side: Side) -> AgentSetup {
        AgentSetup {
            kind: self.matchup.kind(side),
            side,
            opponent: self.matchup.kind(side.other()),
            history_len: self.history_len,
            reference_bins: self.reference_bins,
            learning: self.learning,
            cpt: self.cpt,
            reference: self.reference,
            lh_outcomes: self.lh_outcomes,
        }
    }
}

/// One agent's part of a step record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentStep {
    pub state_id: usize,
    pub action: usize,
    pub reference: Option<f64>,
    pub epsilon: f64,
    pub explored: bool,
    pub eu_values: Option<Vec<f64>>,
    pub cpt_values: Option<Vec<f64>>,
    /// Prospect and expected best actions differ; `None` on exploration,
    /// expected-value ties, or for agents without value diagnostics.
    pub changed: Option<bool>,
    pub l2: Option<f64>,
}

impl AgentStep {
    fn from_decision(d: Decision) -> Self {
        let (changed, l2) = match (&d.eu_values, &d.cpt_values) {
            (Some(eu), Some(cpt)) => {
                let changed = if d.explored {
                    None
                } else {
                    action_change(eu, cpt, EU_TIE_EPSILON)
                };
                (changed, Some(cpt_eu_l2(eu, cpt)))
            }
            _ => (None, None),
        };
        Self {
            state_id: d.state_id,
            action: d.action,
            reference: d.reference,
            epsilon: d.epsilon,
            explored: d.explored,
            eu_values: d.eu_values,
            cpt_values: d.cpt_values,
            changed,
            l2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub run: usize,
    /// Step index within the run.
    pub step: usize,
    pub episode: usize,
    /// `(row action, col action)`.
    pub joint: (usize, usize),
    pub rewards: (f64, f64),
    pub agents: [AgentStep; 2],
}

/// Summary statistics of one reference-point trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrace {
    pub final_value: f64,
    pub mean: f64,
    pub window_mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub steps: usize,
    pub window: usize,
    /// Frequency of each player's first action over the window.
    pub policy: (f64, f64),
    pub classification: Classification,
    pub joint_frequencies: Vec<Vec<f64>>,
    pub mean_reward: [f64; 2],
    pub window_mean_reward: [f64; 2],
    pub change_rate: [Option<f64>; 2],
    pub mean_l2: [Option<f64>; 2],
    pub max_l2: [Option<f64>; 2],
    pub reference: [Option<ReferenceTrace>; 2],
}

impl RunSummary {
    pub fn from_records(config: &ExperimentConfig, game: &Game, run: usize, records: &[StepRecord]) -> Self {
        let window = config.window.min(records.len());
        let tail = &records[records.len() - window..];
        let policy = converged_policy(records, window);
        let mean_of = |rs: &[StepRecord], side: Side| {
            let total: f64 = rs
                .iter()
                .map(|r| if side == Side::Row { r.rewards.0 } else { r.rewards.1 })
                .sum();
            if rs.is_empty() {
                0.0
            } else {
                total / rs.len() as f64
            }
        };
        let l2_values = |side: Side| -> Vec<f64> {
            records.iter().filter_map(|r| r.agents[side.index()].l2).collect()
        };
        let reference = Side::BOTH.map(|side| {
            let i = side.index();
            let all: Vec<f64> = records.iter().filter_map(|r| r.agents[i].reference).collect();
            if all.is_empty() {
                return None;
            }
            let win: Vec<f64> = tail.iter().filter_map(|r| r.agents[i].reference).collect();
            Some(ReferenceTrace {
                final_value: *all.last().unwrap(),
                mean: all.iter().sum::<f64>() / all.len() as f64,
                window_mean: win.iter().sum::<f64>() / win.len().max(1) as f64,
                min: all.iter().copied().fold(f64::INFINITY, f64::min),
                max: all.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        });
        Self {
            run,
            seed: config.run_seed(run),
            steps: records.len(),
            window,
            policy,
            classification: classify_equilibrium(policy, game, config.classify_tol),
            joint_frequencies: metrics::joint_action_frequencies(records, window, game.actions()),
            mean_reward: Side::BOTH.map(|s| mean_of(records, s)),
            window_mean_reward: Side::BOTH.map(|s| mean_of(tail, s)),
            change_rate: Side::BOTH.map(|s| metrics::cpt_action_change_rate(records, s)),
            mean_l2: Side::BOTH.map(|s| {
                let v = l2_values(s);
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            }),
            max_l2: Side::BOTH.map(|s| {
                let v = l2_values(s);
                (!v.is_empty()).then(|| v.iter().copied().fold(0.0, f64::max))
            }),
            reference,
        }
    }
}

/// Frequency of each player's first action over the last `window` steps.
pub fn converged_policy(records: &[StepRecord], window: usize) -> (f64, f64) {
    metrics::first_action_frequencies(records, window)
}

/// A finished run: full log plus its summaries.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub series: EpisodeSeries,
}

/// A finished run without its step log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDigest {
    pub summary: RunSummary,
    pub series: EpisodeSeries,
}

impl From<RunOutput> for RunDigest {
    fn from(out: RunOutput) -> Self {
        Self {
            summary: out.summary,
            series: out.series,
        }
    }
}

/// Per-agent random streams derived from the run seed.
fn agent_rngs(seed: u64) -> [ChaCha8Rng; 2] {
    Side::BOTH.map(|side| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1 + side.index() as u64);
        rng
    })
}

/// Plays one run to completion.
pub fn simulate_run(config: &ExperimentConfig, run: usize) -> Result<RunOutput> {
    config.validate()?;
    let game = config.game.game();
    Ok(simulate_validated(config, &game, run))
}

fn simulate_validated(config: &ExperimentConfig, game: &Game, run: usize) -> RunOutput {
    let mut agents = Side::BOTH.map(|s| Agent::new(&config.setup(s), game));
    let mut rngs = agent_rngs(config.run_seed(run));
    let mut history = History::new(game.actions(), config.history_len);
    let mut records = Vec::with_capacity(config.total_steps());

    let mut step = 0;
    for episode in 0..config.episodes {
        for _ in 0..config.steps_per_episode {
            let h = history.code();
            let [row_agent, col_agent] = &mut agents;
            let [row_rng, col_rng] = &mut rngs;
            let row = row_agent.decide(game, h, row_rng);
            let col = col_agent.decide(game, h, col_rng);
            let joint = (row.action, col.action);
            let rewards = game.payoff(joint.0, joint.1);

            history.push(joint);
            let next_history = history.code();
            row_agent.learn(
                game,
                &Feedback {
                    own_action: joint.0,
                    opponent_action: joint.1,
                    own_reward: rewards.0,
                    opponent_reward: rewards.1,
                    next_history,
                },
            );
            col_agent.learn(
                game,
                &Feedback {
                    own_action: joint.1,
                    opponent_action: joint.0,
                    own_reward: rewards.1,
                    opponent_reward: rewards.0,
                    next_history,
                },
            );

            records.push(StepRecord {
                run,
                step,
                episode,
                joint,
                rewards,
                agents: [AgentStep::from_decision(row), AgentStep::from_decision(col)],
            });
            step += 1;
        }
        for agent in agents.iter_mut() {
            agent.end_episode();
        }
    }

    let summary = RunSummary::from_records(config, game, run, &records);
    let series = EpisodeSeries::from_records(&records, config.steps_per_episode);
    RunOutput {
        records,
        summary,
        series,
    }
}

/// Cross-run aggregates of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_policy: (f64, f64),
    pub documented_runs: usize,
    pub series: Vec<MetricSeries>,
}

impl Aggregate {
    pub fn from_digests<'a>(digests: impl IntoIterator<Item = &'a RunDigest>) -> Self {
        let digests: Vec<&RunDigest> = digests.into_iter().collect();
        let n = digests.len().max(1) as f64;
        let (p, q) = digests
            .iter()
            .fold((0.0, 0.0), |(p, q), d| (p + d.summary.policy.0, q + d.summary.policy.1));
        let series: Vec<&EpisodeSeries> = digests.iter().map(|d| &d.series).collect();
        Self {
            mean_policy: (p / n, q / n),
            documented_runs: digests
                .iter()
                .filter(|d| d.summary.classification.is_documented())
                .count(),
            series: aggregate_series(&series),
        }
    }
}

/// All runs of a cell with their step logs.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub runs: Vec<RunOutput>,
}

impl ExperimentOutput {
    pub fn summaries(&self) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().map(|r| &r.summary)
    }
}

/// All runs of a cell, logs dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub runs: Vec<RunDigest>,
    pub aggregate: Aggregate,
}

/// Runs every seed of `config` in parallel, keeping the step logs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let game = config.game.game();
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|run| simulate_validated(config, &game, run))
        .collect();
    Ok(ExperimentOutput {
        config: config.clone(),
        runs,
    })
}

/// Same as [`run_experiment`] on the calling thread only.
pub fn run_experiment_sequential(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let game = config.game.game();
    let runs = (0..config.runs)
        .map(|run| simulate_validated(config, &game, run))
        .collect();
    Ok(ExperimentOutput {
        config: config.clone(),
        runs,
    })
}

/// Runs every seed in parallel, dropping each log as soon as it has been
/// summarized.
pub fn summarize_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let game = config.game.game();
    let runs: Vec<RunDigest> = (0..config.runs)
        .into_par_iter()
        .map(|run| simulate_validated(config, &game, run).into())
        .collect();
    let aggregate = Aggregate::from_digests(&runs);
    Ok(ExperimentSummary {
        config: config.clone(),
        runs,
        aggregate,
    })
}
