//! Writes a small grid to a temporary directory and checks every hash in
//! its manifest.

use prospect_arena::grid::{run_grid, verify_outputs, GridSpec};
use prospect_arena::{ExperimentConfig, GameId, ReferenceKind};

fn main() -> prospect_arena::Result<()> {
    let out_dir = std::env::temp_dir().join("prospect-arena-example-grid");
    let mut spec = GridSpec::standard(&out_dir);
    spec.games = vec![GameId::PrisonersDilemma, GameId::Ochs];
    spec.matchups = vec!["AI-AI".parse()?, "AH-LH".parse()?];
    spec.references = vec![ReferenceKind::Ema];
    spec.histories = vec![0];
    spec.base = ExperimentConfig {
        episodes: 20,
        runs: 3,
        window: 500,
        ..Default::default()
    };

    let manifest = run_grid(&spec)?;
    for cell in &manifest.cells {
        println!("{:<32} {:?} {} files", cell.id, cell.status, cell.files.len());
    }
    verify_outputs(&out_dir)?;
    println!("manifest verified under {}", out_dir.display());
    Ok(())
}
