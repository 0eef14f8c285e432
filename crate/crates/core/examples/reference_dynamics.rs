//! Traces the four reference models of a row learning human in matching
//! pennies, printing the final window average of each.

use prospect_arena::engine::simulate_run;
use prospect_arena::{ExperimentConfig, GameId, ReferenceKind, ReferenceModel};

fn main() -> prospect_arena::Result<()> {
    for kind in ReferenceKind::ALL {
        let config = ExperimentConfig {
            game: GameId::MatchingPennies,
            matchup: "LH-AI".parse()?,
            reference: ReferenceModel::new(kind),
            episodes: 50,
            runs: 1,
            window: 1000,
            ..Default::default()
        };
        let out = simulate_run(&config, 0)?;
        let refs: Vec<f64> = out.records.iter().filter_map(|r| r.agents[0].reference).collect();
        let every = refs.len() / 10;
        let samples: Vec<String> = refs.iter().step_by(every).map(|r| format!("{r:+.3}")).collect();
        println!("{:<8} {}", kind.slug(), samples.join(" "));
        if let Some(trace) = &out.summary.reference[0] {
            println!("         window mean {:+.4} range [{:+.3}, {:+.3}]", trace.window_mean, trace.min, trace.max);
        }
    }
    Ok(())
}
