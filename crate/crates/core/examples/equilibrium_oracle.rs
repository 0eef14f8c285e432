//! Best-response switch points and belief-equilibrium candidates for each
//! game, under expectation and under prospect theory.

use prospect_arena::equilibria::{cluster_candidates, pt_best_response_scan, pt_eb_candidates};
use prospect_arena::{games, CptParams, Side};

fn main() -> prospect_arena::Result<()> {
    let grid = 101;
    for (label, params) in [("eu", CptParams::expected_utility()), ("pt", CptParams::default())] {
        println!("== {label}");
        for game in games::suite() {
            let row = pt_best_response_scan(&game, Side::Row, 0.0, &params, grid)?;
            let col = pt_best_response_scan(&game, Side::Col, 0.0, &params, grid)?;
            let candidates = pt_eb_candidates(&game, (0.0, 0.0), &params, grid)?;
            println!(
                "{:<20} row switches {:?} col switches {:?} clusters {:?}",
                game.id.slug(),
                row.switch_points(),
                col.switch_points(),
                cluster_candidates(&candidates, grid)
            );
        }
    }
    Ok(())
}
