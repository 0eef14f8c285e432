//! The 2x2 game suite, payoff lookup and state encoding.
//!
//! Action 0 is always the first row/column of the printed matrix, so a
//! policy `(p, q)` is the probability that the row and column player pick
//! their first action.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which seat of the bimatrix a player occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Row,
    Col,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Row => Side::Col,
            Side::Col => Side::Row,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Row => 0,
            Side::Col => 1,
        }
    }

    pub const BOTH: [Side; 2] = [Side::Row, Side::Col];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameId {
    PrisonersDilemma,
    MatchingPennies,
    BattleOfTheSexes,
    StagHunt,
    Chicken,
    Ochs,
    Crawford,
}

impl GameId {
    pub const ALL: [GameId; 7] = [
        GameId::PrisonersDilemma,
        GameId::MatchingPennies,
        GameId::BattleOfTheSexes,
        GameId::StagHunt,
        GameId::Chicken,
        GameId::Ochs,
        GameId::Crawford,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            GameId::PrisonersDilemma => "prisoners-dilemma",
            GameId::MatchingPennies => "matching-pennies",
            GameId::BattleOfTheSexes => "battle-of-the-sexes",
            GameId::StagHunt => "stag-hunt",
            GameId::Chicken => "chicken",
            GameId::Ochs => "ochs",
            GameId::Crawford => "crawford",
        }
    }

    pub fn game(self) -> Game {
        build(self)
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "prisoners-dilemma" | "pd" => GameId::PrisonersDilemma,
            "matching-pennies" | "mp" => GameId::MatchingPennies,
            "battle-of-the-sexes" | "bos" => GameId::BattleOfTheSexes,
            "stag-hunt" | "sh" => GameId::StagHunt,
            "chicken" | "hawk-dove" => GameId::Chicken,
            "ochs" => GameId::Ochs,
            "crawford" | "cc" => GameId::Crawford,
            _ => {
                return Err(Error::UnknownName {
                    kind: "game",
                    name: s.to_string(),
                })
            }
        };
        Ok(id)
    }
}

/// Equilibrium concepts the suite metadata refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Concept {
    #[serde(rename = "NE")]
    Nash,
    #[serde(rename = "PT-NE")]
    ProspectNash,
    #[serde(rename = "PT-EB")]
    ProspectBeliefs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub p: f64,
    pub q: f64,
    pub concept: Concept,
}

impl EquilibriumPoint {
    pub fn new(p: f64, q: f64, concept: Concept) -> Self {
        Self { p, q, concept }
    }

    /// Chebyshev distance to a policy.
    pub fn distance(&self, policy: (f64, f64)) -> f64 {
        (self.p - policy.0).abs().max((self.q - policy.1).abs())
    }
}

/// A square bimatrix game with its documented equilibria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game {
    pub id: GameId,
    pub name: String,
    /// `payoffs[row][col] = (row payoff, column payoff)`.
    pub payoffs: Vec<Vec<(f64, f64)>>,
    pub equilibria: Vec<EquilibriumPoint>,
    /// Concepts whose equilibria are open questions for this game, as
    /// opposed to known not to exist.
    pub unknown_concepts: Vec<Concept>,
}

impl Game {
    pub fn new(
        id: GameId,
        name: impl Into<String>,
        payoffs: Vec<Vec<(f64, f64)>>,
        equilibria: Vec<EquilibriumPoint>,
        unknown_concepts: Vec<Concept>,
    ) -> Result<Self> {
        let m = payoffs.len();
        if m < 2 || payoffs.iter().any(|row| row.len() != m) {
            return Err(Error::Config(format!(
                "payoff table must be square with at least 2 actions, got {m} rows"
            )));
        }
        if payoffs
            .iter()
            .flatten()
            .any(|&(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::Config("payoffs must be finite".into()));
        }
        Ok(Self {
            id,
            name: name.into(),
            payoffs,
            equilibria,
            unknown_concepts,
        })
    }

    /// Actions per player.
    pub fn actions(&self) -> usize {
        self.payoffs.len()
    }

    pub fn payoff(&self, row: usize, col: usize) -> (f64, f64) {
        self.payoffs[row][col]
    }

    /// Payoff to `side` when it plays `own` and its opponent plays `opp`.
    pub fn own_payoff(&self, side: Side, own: usize, opp: usize) -> f64 {
        match side {
            Side::Row => self.payoffs[own][opp].0,
            Side::Col => self.payoffs[opp][own].1,
        }
    }

    /// Payoff to the opponent of `side` for the same action pair.
    pub fn opponent_payoff(&self, side: Side, own: usize, opp: usize) -> f64 {
        match side {
            Side::Row => self.payoffs[own][opp].1,
            Side::Col => self.payoffs[opp][own].0,
        }
    }

    /// `m x m` payoff table of `side`, indexed `[own][opp]`.
    pub fn own_table(&self, side: Side) -> Vec<Vec<f64>> {
        let m = self.actions();
        (0..m)
            .map(|own| (0..m).map(|opp| self.own_payoff(side, own, opp)).collect())
            .collect()
    }

    /// Smallest and largest entry of `side`'s payoff table.
    pub fn payoff_bounds(&self, side: Side) -> (f64, f64) {
        let m = self.actions();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for own in 0..m {
            for opp in 0..m {
                let x = self.own_payoff(side, own, opp);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo, hi)
    }

    /// Whether swapping seats leaves the game unchanged.
    pub fn is_symmetric(&self) -> bool {
        let m = self.actions();
        (0..m).all(|i| (0..m).all(|j| self.payoffs[i][j].0 == self.payoffs[j][i].1))
    }

    pub fn equilibria_of(&self, concept: Concept) -> impl Iterator<Item = &EquilibriumPoint> {
        self.equilibria.iter().filter(move |e| e.concept == concept)
    }
}

fn table(cells: [[(f64, f64); 2]; 2]) -> Vec<Vec<(f64, f64)>> {
    cells.iter().map(|row| row.to_vec()).collect()
}

fn build(id: GameId) -> Game {
    use Concept::*;
    let eq = EquilibriumPoint::new;
    let all_three = |p, q| vec![eq(p, q, Nash), eq(p, q, ProspectNash), eq(p, q, ProspectBeliefs)];
    let open = vec![ProspectNash, ProspectBeliefs];

    let (name, payoffs, equilibria, unknown) = match id {
        GameId::PrisonersDilemma => (
            "Prisoner's Dilemma",
            table([[(-1.0, -1.0), (-3.0, 0.0)], [(0.0, -3.0), (-2.0, -2.0)]]),
            all_three(0.0, 0.0),
            vec![],
        ),
        GameId::MatchingPennies => (
            "Matching Pennies",
            table([[(1.0, 0.0), (0.0, 1.0)], [(0.0, 1.0), (1.0, 0.0)]]),
            all_three(0.5, 0.5),
            vec![],
        ),
        GameId::BattleOfTheSexes => (
            "Battle of the Sexes",
            table([[(3.0, 2.0), (0.0, 0.0)], [(0.0, 0.0), (2.0, 3.0)]]),
            vec![eq(0.0, 0.0, Nash), eq(1.0, 1.0, Nash), eq(0.6, 0.4, Nash)],
            open.clone(),
        ),
        GameId::StagHunt => (
            "Stag Hunt",
            table([[(3.0, 3.0), (0.0, 2.0)], [(2.0, 0.0), (1.0, 1.0)]]),
            vec![eq(0.0, 0.0, Nash), eq(1.0, 1.0, Nash), eq(0.5, 0.5, Nash)],
            open.clone(),
        ),
        GameId::Chicken => (
            "Chicken",
            table([[(0.0, 0.0), (-1.0, 1.0)], [(1.0, -1.0), (-10.0, -10.0)]]),
            vec![eq(0.0, 1.0, Nash), eq(1.0, 0.0, Nash), eq(0.9, 0.9, Nash)],
            open,
        ),
        // Documented values as published. Under the (p, q) convention the
        // mixed Nash point of this table computes to (0.5, 0.2); see
        // `equilibria::nash_2x2`.
        GameId::Ochs => (
            "Ochs (c = 4)",
            table([[(4.0, 0.0), (0.0, 1.0)], [(0.0, 1.0), (1.0, 0.0)]]),
            vec![eq(0.2, 0.5, Nash), eq(0.5, 0.05, ProspectBeliefs)],
            vec![],
        ),
        GameId::Crawford => (
            "Crawford's Counterexample",
            table([[(2.0, -2.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 1.0)]]),
            vec![eq(0.5, 0.5, Nash)],
            vec![ProspectBeliefs],
        ),
    };
    Game::new(id, name, payoffs, equilibria, unknown).expect("suite tables are well formed")
}

/// The seven-game suite in presentation order.
pub fn suite() -> Vec<Game> {
    GameId::ALL.iter().map(|id| id.game()).collect()
}

/// The suite as a pretty-printed JSON catalog.
pub fn catalog_json() -> Result<String> {
    Ok(serde_json::to_string_pretty(&suite())?)
}

/// Base-`m^2` code of a joint-action history; index 0 is the oldest round.
pub fn encode_history(history: &[(usize, usize)], m: usize) -> Result<usize> {
    let base = m * m;
    let mut code = 0usize;
    let mut scale = 1usize;
    for &(a, b) in history {
        if a >= m || b >= m {
            return Err(Error::Encoding(format!(
                "joint action ({a}, {b}) out of range for {m} actions"
            )));
        }
        code += (m * a + b) * scale;
        scale *= base;
    }
    Ok(code)
}

/// Inverse of [`encode_history`] for a history of length `n`.
pub fn decode_history(code: usize, m: usize, n: usize) -> Result<Vec<(usize, usize)>> {
    let base = m * m;
    let states = base.pow(n as u32);
    if code >= states {
        return Err(Error::Encoding(format!(
            "history code {code} outside [0, {states})"
        )));
    }
    let mut rest = code;
    Ok((0..n)
        .map(|_| {
            let digit = rest % base;
            rest /= base;
            (digit / m, digit % m)
        })
        .collect())
}

/// Bin of a reference point after normalizing it into `[0, 1]`.
pub fn bin_reference(r: f64, payoff_min: f64, payoff_max: f64, bins: usize) -> usize {
    debug_assert!(payoff_min < payoff_max && bins >= 1);
    let u = ((r - payoff_min) / (payoff_max - payoff_min)).clamp(0.0, 1.0);
    if u.is_nan() {
        return 0;
    }
    ((u * bins as f64).floor() as usize).min(bins - 1)
}

pub fn state_id(history_code: usize, ref_bin: usize, bins: usize) -> Result<usize> {
    if ref_bin >= bins {
        return Err(Error::Encoding(format!(
            "reference bin {ref_bin} outside [0, {bins})"
        )));
    }
    Ok(history_code * bins + ref_bin)
}

/// Splits a state id into `(history_code, ref_bin)`.
pub fn decode_state_id(id: usize, bins: usize) -> (usize, usize) {
    (id / bins, id % bins)
}

/// Encoder for one agent's state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateEncoder {
    pub actions: usize,
    pub history_len: usize,
    /// Reference bins; `None` for agents whose state ignores the reference.
    pub bins: Option<usize>,
    pub payoff_min: f64,
    pub payoff_max: f64,
}

impl StateEncoder {
    pub fn history_only(actions: usize, history_len: usize) -> Self {
        Self {
            actions,
            history_len,
            bins: None,
            payoff_min: 0.0,
            payoff_max: 1.0,
        }
    }

    pub fn with_reference_bins(
        actions: usize,
        history_len: usize,
        bins: usize,
        bounds: (f64, f64),
    ) -> Self {
        Self {
            actions,
            history_len,
            bins: Some(bins),
            payoff_min: bounds.0,
            payoff_max: bounds.1,
        }
    }

    pub fn history_states(&self) -> usize {
        (self.actions * self.actions).pow(self.history_len as u32)
    }

    pub fn state_count(&self) -> usize {
        self.history_states() * self.bins.unwrap_or(1)
    }

    pub fn encode(&self, history_code: usize, reference: f64) -> usize {
        match self.bins {
            None => history_code,
            Some(b) => {
                let bin = bin_reference(reference, self.payoff_min, self.payoff_max, b);
                history_code * b + bin
            }
        }
    }

    pub fn decode(&self, id: usize) -> Result<(Vec<(usize, usize)>, usize)> {
        let (code, bin) = match self.bins {
            None => (id, 0),
            Some(b) => decode_state_id(id, b),
        };
        Ok((decode_history(code, self.actions, self.history_len)?, bin))
    }
}

/// Sliding window over the last `n` joint actions, padded with `(0, 0)`
/// until enough rounds have been played.
#[derive(Debug, Clone)]
pub struct History {
    actions: usize,
    rounds: VecDeque<(usize, usize)>,
    len: usize,
}

impl History {
    pub fn new(actions: usize, len: usize) -> Self {
        Self {
            actions,
            rounds: std::iter::repeat_n((0, 0), len).collect(),
            len,
        }
    }

    pub fn push(&mut self, joint: (usize, usize)) {
        if self.len == 0 {
            return;
        }
        self.rounds.pop_front();
        self.rounds.push_back(joint);
    }

    pub fn code(&self) -> usize {
        let m = self.actions;
        let base = m * m;
        let mut code = 0;
        let mut scale = 1;
        for &(a, b) in &self.rounds {
            code += (m * a + b) * scale;
            scale *= base;
        }
        code
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_tables() {
        let pd = GameId::PrisonersDilemma.game();
        assert_eq!(pd.payoff(1, 1), (-2.0, -2.0));
        assert_eq!(GameId::Ochs.game().payoff(0, 0), (4.0, 0.0));
        assert_eq!(GameId::Chicken.game().payoff(1, 1), (-10.0, -10.0));
        assert_eq!(suite().len(), 7);
    }

    #[test]
    fn symmetry_flags() {
        let symmetric: Vec<_> = suite()
            .into_iter()
            .filter(Game::is_symmetric)
            .map(|g| g.id)
            .collect();
        assert_eq!(
            symmetric,
            vec![GameId::PrisonersDilemma, GameId::StagHunt, GameId::Chicken]
        );
    }

    #[test]
    fn own_payoff_orientation() {
        let g = GameId::BattleOfTheSexes.game();
        assert_eq!(g.own_payoff(Side::Row, 0, 0), 3.0);
        assert_eq!(g.own_payoff(Side::Col, 0, 0), 2.0);
        assert_eq!(g.own_payoff(Side::Col, 1, 1), 3.0);
        let ch = GameId::Chicken.game();
        // column swerves (0) while row goes straight (1)
        assert_eq!(ch.own_payoff(Side::Col, 0, 1), -1.0);
        assert_eq!(ch.opponent_payoff(Side::Col, 0, 1), 1.0);
        assert_eq!(ch.payoff_bounds(Side::Row), (-10.0, 1.0));
    }

    #[test]
    fn history_encoding_examples() {
        assert_eq!(encode_history(&[(0, 1), (1, 1)], 2).unwrap(), 13);
        assert_eq!(encode_history(&[], 2).unwrap(), 0);
        assert_eq!(encode_history(&[(0, 0), (0, 0)], 2).unwrap(), 0);
        assert!(matches!(
            encode_history(&[(2, 0)], 2),
            Err(Error::Encoding(_))
        ));
    }

    #[test]
    fn state_id_examples() {
        let ids: Vec<_> = (0..5).map(|b| state_id(13, b, 5).unwrap()).collect();
        assert_eq!(ids, vec![65, 66, 67, 68, 69]);
        assert_eq!(state_id(0, 0, 5).unwrap(), 0);
        assert!(state_id(0, 5, 5).is_err());
        assert_eq!(decode_state_id(67, 5), (13, 2));
    }

    #[test]
    fn reference_binning() {
        assert_eq!(bin_reference(-3.0, -3.0, 0.0, 5), 0);
        assert_eq!(bin_reference(0.0, -3.0, 0.0, 5), 4);
        assert_eq!(bin_reference(-7.0, -3.0, 0.0, 5), 0);
        assert_eq!(bin_reference(12.0, -3.0, 0.0, 5), 4);
        assert_eq!(bin_reference(-1.5, -3.0, 0.0, 5), 2);
    }

    #[test]
    fn history_window_slides() {
        let mut h = History::new(2, 2);
        assert_eq!(h.code(), 0);
        h.push((0, 1));
        h.push((1, 1));
        assert_eq!(h.code(), 13);
        h.push((0, 0));
        // oldest is now (1, 1)
        assert_eq!(h.code(), encode_history(&[(1, 1), (0, 0)], 2).unwrap());
        let mut empty = History::new(2, 0);
        empty.push((1, 1));
        assert_eq!(empty.code(), 0);
    }

    #[test]
    fn names_parse() {
        for id in GameId::ALL {
            assert_eq!(id.slug().parse::<GameId>().unwrap(), id);
        }
        assert_eq!("PD".parse::<GameId>().unwrap(), GameId::PrisonersDilemma);
        assert!("poker".parse::<GameId>().is_err());
    }
}
