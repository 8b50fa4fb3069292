//! Logistic Elo ratings (base 10, scale 400).

use serde::{Deserialize, Serialize};

use super::{EvalError, MatchResult};

pub const INITIAL_RATING: f64 = 1000.0;
pub const DEFAULT_K: f64 = 32.0;

/// Expected score of a player rated `r_a` against one rated `r_b`.
pub fn expected_score(r_a: f64, r_b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((r_b - r_a) / 400.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEntry {
    pub name: String,
    pub rating: f64,
    pub games: u32,
}

/// Ratings in registration order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatingTable {
    entries: Vec<RatingEntry>,
}

impl RatingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `name` at `rating`; re-registering keeps the old entry.
    pub fn register(&mut self, name: &str, rating: f64) {
        if self.position(name).is_none() {
            self.entries.push(RatingEntry { name: name.to_string(), rating, games: 0 });
        }
    }

    pub fn rating(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.entries[i].rating)
    }

    pub fn entries(&self) -> &[RatingEntry] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.rating).sum()
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    fn index(&self, name: &str) -> Result<usize, EvalError> {
        self.position(name).ok_or_else(|| EvalError::UnknownAgent(name.to_string()))
    }
}

/// Applies the match game by game: `R += K (S - E)` for both players.
pub fn elo_update(table: &mut RatingTable, result: &MatchResult, k: f64) -> Result<(), EvalError> {
    let ia = table.index(&result.a)?;
    let ib = table.index(&result.b)?;
    for g in &result.games {
        let (ra, rb) = (table.entries[ia].rating, table.entries[ib].rating);
        let delta = k * (g.score_a - expected_score(ra, rb));
        table.entries[ia].rating += delta;
        table.entries[ib].rating -= delta;
        table.entries[ia].games += 1;
        table.entries[ib].games += 1;
    }
    Ok(())
}
