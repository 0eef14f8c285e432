//! One short experiment cell: a learning human against an expected-utility
//! learner in the stag hunt.

use prospect_arena::engine::summarize_experiment;
use prospect_arena::{ExperimentConfig, GameId, ReferenceKind, ReferenceModel};

fn main() -> prospect_arena::Result<()> {
    let config = ExperimentConfig {
        game: GameId::StagHunt,
        matchup: "LH-AI".parse()?,
        reference: ReferenceModel::new(ReferenceKind::Ema),
        history_len: 0,
        runs: 8,
        window: 5000,
        ..Default::default()
    };
    let out = summarize_experiment(&config)?;
    for d in &out.runs {
        let s = &d.summary;
        println!(
            "run {:>2} seed {:>2} policy ({:.3}, {:.3}) {:?} change rate {:?}",
            s.run, s.seed, s.policy.0, s.policy.1, s.classification, s.change_rate[0]
        );
    }
    let agg = &out.aggregate;
    println!(
        "mean policy ({:.3}, {:.3}), {} of {} runs at a documented point",
        agg.mean_policy.0,
        agg.mean_policy.1,
        agg.documented_runs,
        config.runs
    );
    Ok(())
}
