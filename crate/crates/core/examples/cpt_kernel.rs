//! Values a few lotteries under prospect theory and under expectation.

use prospect_arena::{CptParams, Prospect};

fn main() -> prospect_arena::Result<()> {
    let tk = CptParams::default();
    let eu = CptParams::expected_utility();

    let lotteries = [
        ("coin flip on +-10", Prospect::new([(10.0, 0.5), (-10.0, 0.5)])?),
        ("1% shot at 100", Prospect::new([(100.0, 0.01), (0.0, 0.99)])?),
        ("sure 1", Prospect::degenerate(1.0)),
        ("99% of 10, else -100", Prospect::new([(10.0, 0.99), (-100.0, 0.01)])?),
    ];

    println!("{:<24} {:>10} {:>10}", "lottery", "cpt", "expected");
    for (name, l) in &lotteries {
        println!("{:<24} {:>10.4} {:>10.4}", name, tk.cpt_value(l, 0.0), eu.cpt_value(l, 0.0));
    }

    println!("\nweights of a 1%..99% ladder");
    for p in [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        println!("p={p:<5} w+={:.4} w-={:.4}", tk.weight_gain(p), tk.weight_loss(p));
    }

    let flip = &lotteries[0].1;
    println!("\ncoin flip against a moving reference");
    for r in [-10.0, -5.0, 0.0, 5.0, 10.0] {
        println!("r={r:>5} value={:.4}", tk.cpt_value(flip, r));
    }
    Ok(())
}
