//! Prints each game's payoff matrix, its Nash set and the documented
//! equilibria.

use prospect_arena::equilibria::nash_2x2;
use prospect_arena::games;

fn main() -> prospect_arena::Result<()> {
    for game in games::suite() {
        println!("{} ({})", game.name, game.id.slug());
        for row in &game.payoffs {
            let cells: Vec<String> = row.iter().map(|(a, b)| format!("({a:>3},{b:>3})")).collect();
            println!("  {}", cells.join(" "));
        }
        let nash = nash_2x2(&game)?;
        let points: Vec<String> = nash.points.iter().map(|e| format!("({:.3}, {:.3})", e.p, e.q)).collect();
        println!("  nash: {}", points.join(" "));
        for e in &game.equilibria {
            println!("  documented {:?}: ({}, {})", e.concept, e.p, e.q);
        }
    }
    Ok(())
}
