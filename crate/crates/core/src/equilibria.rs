//! Brute-force equilibrium oracles for 2x2 games: exact Nash equilibria and
//! grid approximations of prospect-theoretic equilibria in beliefs.

use serde::{Deserialize, Serialize};

use crate::cpt::{CptParams, Prospect};
use crate::error::{Error, Result};
use crate::games::{Concept, EquilibriumPoint, Game, Side};

/// Values closer than this are treated as exact ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Grid resolution used when none is given.
pub const DEFAULT_GRID: usize = 201;

fn require_2x2(game: &Game) -> Result<()> {
    if game.actions() != 2 {
        return Err(Error::Config(format!(
            "{} is {}x{}; the oracles handle 2x2 games only",
            game.name,
            game.actions(),
            game.actions()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashSet {
    pub points: Vec<EquilibriumPoint>,
    /// Per side: indifferent between its actions against every opponent
    /// action. The point list is then not exhaustive.
    pub degenerate: [bool; 2],
}

impl NashSet {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

/// Pure equilibria by enumeration plus the interior mixed equilibrium.
pub fn nash_2x2(game: &Game) -> Result<NashSet> {
    require_2x2(game)?;
    let r = |i: usize, j: usize| game.payoff(i, j).0;
    let c = |i: usize, j: usize| game.payoff(i, j).1;
    let mut points = Vec::new();

    for i in 0..2 {
        for j in 0..2 {
            let row_best = r(i, j) >= r(1 - i, j);
            let col_best = c(i, j) >= c(i, 1 - j);
            if row_best && col_best {
                let to_prob = |a: usize| if a == 0 { 1.0 } else { 0.0 };
                points.push(EquilibriumPoint::new(to_prob(i), to_prob(j), Concept::Nash));
            }
        }
    }

    // q makes the row player indifferent, p the column player
    let row_den = r(0, 0) - r(0, 1) - r(1, 0) + r(1, 1);
    let col_den = c(0, 0) - c(1, 0) - c(0, 1) + c(1, 1);
    if row_den != 0.0 && col_den != 0.0 {
        let q = (r(1, 1) - r(0, 1)) / row_den;
        let p = (c(1, 1) - c(1, 0)) / col_den;
        if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
            points.push(EquilibriumPoint::new(p, q, Concept::Nash));
        }
    }

    let degenerate = [
        (0..2).all(|j| r(0, j) == r(1, j)),
        (0..2).all(|i| c(i, 0) == c(i, 1)),
    ];
    Ok(NashSet { points, degenerate })
}

/// Largest gain any player gets from a pure deviation at `(p, q)`.
pub fn max_deviation_gain(game: &Game, p: f64, q: f64) -> f64 {
    let row = [p, 1.0 - p];
    let col = [q, 1.0 - q];
    let expected = |side: Side, own: &[f64], opp: &[f64]| -> f64 {
        (0..2)
            .flat_map(|a| (0..2).map(move |o| (a, o)))
            .map(|(a, o)| own[a] * opp[o] * game.own_payoff(side, a, o))
            .sum()
    };
    let mut gain = f64::NEG_INFINITY;
    for (side, own, opp) in [(Side::Row, row, col), (Side::Col, col, row)] {
        let base = expected(side, &own, &opp);
        for a in 0..2 {
            let mut pure = [0.0; 2];
            pure[a] = 1.0;
            gain = gain.max(expected(side, &pure, &opp) - base);
        }
    }
    gain
}

/// Best responses of one side against a grid of opponent mixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseMap {
    pub side: Side,
    pub reference: f64,
    pub grid: usize,
    /// Opponent probability of its first action at each grid point.
    pub opponent_probs: Vec<f64>,
    /// `values[k][a]`: valuation of own action `a` at grid point `k`.
    pub values: Vec<Vec<f64>>,
    /// Maximizing own actions at each grid point, never empty.
    pub maximizers: Vec<Vec<usize>>,
}

impl BestResponseMap {
    /// Hull of maximizers as an interval of own first-action probability.
    pub fn response_interval(&self, k: usize) -> (f64, f64) {
        interval(&self.maximizers[k])
    }

    /// Whether the best response flips strictly between points `k` and
    /// `k + 1`.
    fn switches_after(&self, k: usize) -> bool {
        let (a, b) = (&self.maximizers[k], &self.maximizers[k + 1]);
        !a.iter().any(|x| b.contains(x))
    }

    /// Where the value difference of the two actions crosses zero inside
    /// the switching cell starting at `k`, as a fraction of the cell.
    fn crossing(&self, k: usize) -> f64 {
        let d0 = self.values[k][0] - self.values[k][1];
        let d1 = self.values[k + 1][0] - self.values[k + 1][1];
        (d0 / (d0 - d1)).clamp(0.0, 1.0)
    }

    /// Grid points nearest to an indifference point that falls between
    /// two grid points.
    fn widened(&self) -> Vec<bool> {
        let mut out = vec![false; self.grid];
        for k in 0..self.grid - 1 {
            if self.switches_after(k) {
                let nearest = if self.crossing(k) <= 0.5 { k } else { k + 1 };
                out[nearest] = true;
            }
        }
        out
    }

    /// Response intervals at every grid point, widened to the full simplex
    /// at the grid point nearest each indifference point.
    pub fn graph(&self) -> Vec<(f64, f64)> {
        self.widened()
            .into_iter()
            .enumerate()
            .map(|(k, w)| if w { (0.0, 1.0) } else { self.response_interval(k) })
            .collect()
    }

    /// Opponent probabilities at which this side is indifferent: exact ties
    /// on the grid, and linearly interpolated crossings between points.
    pub fn switch_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.grid {
            if self.maximizers[k].len() > 1 {
                out.push(self.opponent_probs[k]);
            }
            if k + 1 < self.grid && self.switches_after(k) {
                let (a, b) = (self.opponent_probs[k], self.opponent_probs[k + 1]);
                out.push(a + self.crossing(k) * (b - a));
            }
        }
        out
    }
}

fn interval(actions: &[usize]) -> (f64, f64) {
    let has0 = actions.contains(&0);
    let has1 = actions.contains(&1);
    match (has0, has1) {
        (true, true) => (0.0, 1.0),
        (true, false) => (1.0, 1.0),
        _ => (0.0, 0.0),
    }
}

fn grid_points(grid: usize) -> Vec<f64> {
    (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect()
}

fn maximizer_set(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOLERANCE * best.abs().max(1.0);
    (0..values.len()).filter(|&a| best - values[a] <= tol).collect()
}

/// Scans the prospect value of each own action, as the lottery over the
/// opponent's mixture, across `grid` evenly spaced opponent mixtures.
pub fn pt_best_response_scan(
    game: &Game,
    side: Side,
    reference: f64,
    params: &CptParams,
    grid: usize,
) -> Result<BestResponseMap> {
    require_2x2(game)?;
    if grid < 2 {
        return Err(Error::Config(format!("grid must have at least 2 points, got {grid}")));
    }
    params.validate()?;
    let opponent_probs = grid_points(grid);
    let mut values = Vec::with_capacity(grid);
    let mut maximizers = Vec::with_capacity(grid);
    for &x in &opponent_probs {
        let v: Vec<f64> = (0..2)
            .map(|a| {
                let lottery = Prospect::new([
                    (game.own_payoff(side, a, 0), x),
                    (game.own_payoff(side, a, 1), 1.0 - x),
                ])
                .expect("grid probabilities form a distribution");
                params.cpt_value(&lottery, reference)
            })
            .collect();
        maximizers.push(maximizer_set(&v));
        values.push(v);
    }
    Ok(BestResponseMap {
        side,
        reference,
        grid,
        opponent_probs,
        values,
        maximizers,
    })
}

/// Grid points `(p, q)` consistent with both players' best-response
/// correspondences up to one grid cell. `references` is `(row, col)`.
pub fn pt_eb_candidates(
    game: &Game,
    references: (f64, f64),
    params: &CptParams,
    grid: usize,
) -> Result<Vec<(f64, f64)>> {
    if grid < 10 {
        return Err(Error::Config(format!("grid must have at least 10 points, got {grid}")));
    }
    let row = pt_best_response_scan(game, Side::Row, references.0, params, grid)?;
    let col = pt_best_response_scan(game, Side::Col, references.1, params, grid)?;
    let axis = grid_points(grid);
    let tol = 1e-12;
    let contains = |(lo, hi): (f64, f64), x: f64| x >= lo - tol && x <= hi + tol;

    let (row_graph, col_graph) = (row.graph(), col.graph());
    let mut out = Vec::new();
    for (i, &p) in axis.iter().enumerate() {
        for (k, &q) in axis.iter().enumerate() {
            if contains(col_graph[i], q) && contains(row_graph[k], p) {
                out.push((p, q));
            }
        }
    }
    Ok(out)
}

/// Groups candidates whose grid cells touch and returns each group's
/// centroid, ordered by first appearance.
pub fn cluster_candidates(points: &[(f64, f64)], grid: usize) -> Vec<(f64, f64)> {
    let cell = 1.0 / (grid.max(2) - 1) as f64;
    let adjacent = |a: (f64, f64), b: (f64, f64)| {
        (a.0 - b.0).abs() <= cell * 1.5 && (a.1 - b.1).abs() <= cell * 1.5
    };
    let mut group = vec![usize::MAX; points.len()];
    let mut groups = 0;
    for start in 0..points.len() {
        if group[start] != usize::MAX {
            continue;
        }
        group[start] = groups;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..points.len() {
                if group[j] == usize::MAX && adjacent(points[i], points[j]) {
                    group[j] = groups;
                    stack.push(j);
                }
            }
        }
        groups += 1;
    }
    (0..groups)
        .map(|g| {
            let members: Vec<_> = points
                .iter()
                .zip(&group)
                .filter(|(_, &x)| x == g)
                .map(|(p, _)| *p)
                .collect();
            let n = members.len() as f64;
            let (sp, sq) = members.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
            (sp / n, sq / n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameId;

    fn pts(game: GameId) -> Vec<(f64, f64)> {
        nash_2x2(&game.game())
            .unwrap()
            .points
            .iter()
            .map(|e| (e.p, e.q))
            .collect()
    }

    fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
    }

    #[test]
    fn nash_examples() {
        assert_eq!(pts(GameId::PrisonersDilemma), vec![(0.0, 0.0)]);
        assert_eq!(pts(GameId::MatchingPennies), vec![(0.5, 0.5)]);
        let chicken = pts(GameId::Chicken);
        assert_eq!(chicken.len(), 3);
        assert!(chicken.contains(&(0.0, 1.0)));
        assert!(chicken.contains(&(1.0, 0.0)));
        assert!(chicken.iter().any(|&p| close(p, (0.9, 0.9), 1e-12)));
        let bos = pts(GameId::BattleOfTheSexes);
        assert!(bos.iter().any(|&p| close(p, (0.6, 0.4), 1e-12)));
        let stag = pts(GameId::StagHunt);
        assert!(stag.iter().any(|&p| close(p, (0.5, 0.5), 1e-12)));
    }

    #[test]
    fn nash_points_admit_no_profitable_deviation() {
        for id in GameId::ALL {
            let g = id.game();
            for e in nash_2x2(&g).unwrap().points {
                assert!(max_deviation_gain(&g, e.p, e.q) <= 1e-9, "{id} at ({}, {})", e.p, e.q);
            }
        }
    }

    #[test]
    fn degenerate_games_are_flagged() {
        let flat = Game::new(
            GameId::PrisonersDilemma,
            "flat",
            vec![vec![(1.0, 0.0), (1.0, 2.0)], vec![(1.0, 0.0), (1.0, 1.0)]],
            vec![],
            vec![],
        )
        .unwrap();
        let n = nash_2x2(&flat).unwrap();
        assert!(n.is_degenerate());
        assert_eq!(n.degenerate, [true, false]);
        assert!(!nash_2x2(&GameId::MatchingPennies.game()).unwrap().is_degenerate());
    }

    #[test]
    fn eu_scan_switches_at_one_half_in_matching_pennies() {
        let g = GameId::MatchingPennies.game();
        let eu = CptParams::expected_utility();
        let map = pt_best_response_scan(&g, Side::Row, 0.0, &eu, 201).unwrap();
        assert_eq!(map.switch_points(), vec![0.5]);
        assert_eq!(map.graph()[100], (0.0, 1.0));
        assert_eq!(map.maximizers[0], vec![1]);
        assert_eq!(map.maximizers[200], vec![0]);
    }

    #[test]
    fn prisoners_dilemma_defects_everywhere() {
        let g = GameId::PrisonersDilemma.game();
        for reference in [-3.0, -1.5, 0.0, 2.0] {
            for grid in [2, 11, 201] {
                for side in Side::BOTH {
                    let map =
                        pt_best_response_scan(&g, side, reference, &CptParams::default(), grid).unwrap();
                    assert!(map.maximizers.iter().all(|m| m == &vec![1]));
                }
            }
        }
    }

    #[test]
    fn eu_scan_recovers_mixed_nash_within_a_cell() {
        let eu = CptParams::expected_utility();
        let grid = 201;
        let cell = 1.0 / (grid - 1) as f64;
        for id in GameId::ALL {
            let g = id.game();
            let Some(mixed) = nash_2x2(&g)
                .unwrap()
                .points
                .into_iter()
                .find(|e| e.p > 0.0 && e.p < 1.0)
            else {
                continue;
            };
            let row = pt_best_response_scan(&g, Side::Row, 0.0, &eu, grid).unwrap();
            let col = pt_best_response_scan(&g, Side::Col, 0.0, &eu, grid).unwrap();
            assert!(row.switch_points().iter().any(|x| (x - mixed.q).abs() <= cell), "{id}");
            assert!(col.switch_points().iter().any(|x| (x - mixed.p).abs() <= cell), "{id}");
        }
    }

    #[test]
    fn pt_eb_examples() {
        let cpt = CptParams::default();
        let mp = pt_eb_candidates(&GameId::MatchingPennies.game(), (0.0, 0.0), &cpt, 201).unwrap();
        assert!(mp.iter().any(|&p| close(p, (0.5, 0.5), 1e-12)));
        let pd = pt_eb_candidates(&GameId::PrisonersDilemma.game(), (0.0, 0.0), &cpt, 201).unwrap();
        assert_eq!(pd, vec![(0.0, 0.0)]);
    }

    #[test]
    fn crawford_has_no_interior_candidate() {
        let g = GameId::Crawford.game();
        let c = pt_eb_candidates(&g, (0.0, 0.0), &CptParams::default(), 201).unwrap();
        assert_eq!(c, vec![(1.0, 0.0)]);
    }

    #[test]
    fn refinement_keeps_coarse_candidates() {
        let cpt = CptParams::default();
        for id in GameId::ALL {
            let g = id.game();
            for grid in [21, 51, 101] {
                let fine_grid = 2 * grid - 1;
                let cell = 1.0 / (grid - 1) as f64;
                let coarse = pt_eb_candidates(&g, (0.0, 0.0), &cpt, grid).unwrap();
                let fine = pt_eb_candidates(&g, (0.0, 0.0), &cpt, fine_grid).unwrap();
                for c in coarse {
                    assert!(fine.iter().any(|&f| close(c, f, cell + 1e-12)), "{id} grid {grid}: {c:?}");
                }
            }
        }
    }

    #[test]
    fn clustering_merges_adjacent_points() {
        let pts = vec![(0.5, 0.115), (0.5, 0.12), (0.505, 0.115), (1.0, 0.0)];
        let c = cluster_candidates(&pts, 201);
        assert_eq!(c.len(), 2);
        assert!(close(c[0], (0.501_666_666, 0.116_666_666), 1e-6));
        assert_eq!(c[1], (1.0, 0.0));
    }

    #[test]
    fn small_grids_are_rejected() {
        let g = GameId::MatchingPennies.game();
        assert!(pt_best_response_scan(&g, Side::Row, 0.0, &CptParams::default(), 1).is_err());
        assert!(pt_eb_candidates(&g, (0.0, 0.0), &CptParams::default(), 9).is_err());
    }
}
