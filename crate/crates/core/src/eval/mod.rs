//! Agent evaluation: matches, Elo, α-rank, convergence tracking and the
//! metrics and summary tables.

mod alpha_rank;
mod elo;
mod report;
mod tracker;

use std::sync::Mutex;

use rand::Rng as _;
use thiserror::Error;

use crate::game::oracle::{Oracle, OracleError};
use crate::game::{Action, GameId, GameState, Player};
use crate::mcts::{argmax, SearchError};
use crate::net::{PolicyValueNet, Tap};
use crate::rng::Rng;
use crate::training::{Budget, Model, SearchSettings};

pub use alpha_rank::{
    alpha_rank, alpha_rank_sweep, alpha_rank_two_population, fixation_probability, AlphaRankConfig, RankResult,
    DEFAULT_ALPHA_SWEEP, DEFAULT_POPULATION,
};
pub use elo::{elo_update, expected_score, RatingTable, DEFAULT_K, INITIAL_RATING};
pub use report::{
    millis, timing_report, write_metrics_csv, write_summary_csv, MetricsRow, MetricsWriter, SummaryRow, METRICS_HEADER,
    SUMMARY_HEADER,
};
pub use tracker::{AgentKind, ConvergenceTracker, EvalConfig, StepEvaluation, CONVERGENCE_THRESHOLD};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("a match needs an even number of games (at least 2), got {0}")]
    OddGames(usize),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("the comparison pool is empty")]
    EmptyPool,
    #[error("payoff matrix is not valid: {0}")]
    InvalidPayoffs(String),
    #[error("invalid α-rank configuration: {0}")]
    InvalidConfig(String),
    #[error("stationary distribution did not converge within {0} iterations")]
    NoConvergence(u64),
    #[error("no iterations to summarise")]
    NoIterations,
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Something that picks moves.
pub trait Agent: Send + Sync {
    fn select(&self, state: &GameState, rng: &mut Rng) -> Result<Action, EvalError>;
}

/// Uniformly random legal moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomAgent;

impl Agent for RandomAgent {
    fn select(&self, state: &GameState, rng: &mut Rng) -> Result<Action, EvalError> {
        let legal = state.legal_actions().expect("non-terminal state");
        Ok(legal[rng.random_range(0..legal.len())])
    }
}

/// Plays the lowest value-preserving move according to exact minimax.
#[derive(Debug, Default)]
pub struct OracleAgent {
    oracle: Mutex<Oracle>,
}

impl OracleAgent {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Agent for OracleAgent {
    fn select(&self, state: &GameState, _rng: &mut Rng) -> Result<Action, EvalError> {
        let best = self.oracle.lock().expect("oracle lock").optimal_actions(state)?;
        Ok(best[0])
    }
}

/// Argmax of a trained model's search policy.
#[derive(Debug, Clone)]
pub struct SearchAgent {
    pub model: Model,
    pub budget: Budget,
    pub settings: SearchSettings,
}

impl Agent for SearchAgent {
    fn select(&self, state: &GameState, rng: &mut Rng) -> Result<Action, EvalError> {
        let found = self.model.search(state, self.budget, &self.settings, rng)?;
        Ok(argmax_legal(state, &found.policy))
    }
}

/// Argmax of a network head's raw policy, without search.
#[derive(Debug, Clone)]
pub struct PolicyAgent {
    pub net: PolicyValueNet,
    pub tap: Tap,
}

impl Agent for PolicyAgent {
    fn select(&self, state: &GameState, _rng: &mut Rng) -> Result<Action, EvalError> {
        let out = self
            .net
            .forward_head(&state.encode(), &state.legal_mask(), self.tap)
            .expect("policy agent network matches the game");
        Ok(argmax_legal(state, &out.policy))
    }
}

/// Legal action with the highest policy mass; ties go to the lowest action.
pub fn argmax_legal(state: &GameState, policy: &[f64]) -> Action {
    let legal = state.legal_actions().expect("non-terminal state");
    let weights: Vec<f64> = legal.iter().map(|a| policy[a.index()]).collect();
    legal[argmax(&weights)]
}

/// One game of a match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameRecord {
    /// Whether agent `a` moved first.
    pub a_first: bool,
    /// Score of agent `a`: 1 win, 0.5 draw, 0 loss.
    pub score_a: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub a: String,
    pub b: String,
    pub wins_a: u32,
    pub wins_b: u32,
    pub draws: u32,
    pub games: Vec<GameRecord>,
}

impl MatchResult {
    pub fn played(&self) -> usize {
        self.games.len()
    }

    /// Mean score of `a`.
    pub fn score_a(&self) -> f64 {
        self.games.iter().map(|g| g.score_a).sum::<f64>() / self.games.len() as f64
    }

    /// Mean score of `a` over the games it played as `role`.
    pub fn score_a_as(&self, role: Player) -> Option<f64> {
        let first = role == Player::P0;
        let games: Vec<f64> = self.games.iter().filter(|g| g.a_first == first).map(|g| g.score_a).collect();
        (!games.is_empty()).then(|| games.iter().sum::<f64>() / games.len() as f64)
    }
}

/// Plays `games` games with the first-player role alternating, starting
/// with `a`. Equivalent to [`run_match_from_openings`] with no random
/// opening moves.
pub fn run_match(
    a: (&str, &dyn Agent),
    b: (&str, &dyn Agent),
    game: &GameId,
    games: usize,
    rng: &mut Rng,
) -> Result<MatchResult, EvalError> {
    run_match_from_openings(a, b, game, games, 0, rng)
}

/// Like [`run_match`], but each pair of games (one per role assignment)
/// starts from the same `opening_plies` uniformly random moves, so
/// deterministic agents meet a spread of positions.
pub fn run_match_from_openings(
    a: (&str, &dyn Agent),
    b: (&str, &dyn Agent),
    game: &GameId,
    games: usize,
    opening_plies: u32,
    rng: &mut Rng,
) -> Result<MatchResult, EvalError> {
    if games < 2 || !games.is_multiple_of(2) {
        return Err(EvalError::OddGames(games));
    }
    let mut result = MatchResult {
        a: a.0.to_string(),
        b: b.0.to_string(),
        wins_a: 0,
        wins_b: 0,
        draws: 0,
        games: Vec::with_capacity(games),
    };
    let mut opening = game.initial_state().expect("validated game");
    for g in 0..games {
        let a_first = g % 2 == 0;
        if a_first {
            opening = random_opening(game, opening_plies, rng);
        }
        let mut state = opening.clone();
        while !state.is_terminal() {
            let a_to_move = (state.player_to_move() == Player::P0) == a_first;
            let agent = if a_to_move { a.1 } else { b.1 };
            let action = agent.select(&state, rng)?;
            state = state.apply(action).expect("agents play legal moves");
        }
        let outcome = state.terminal_value().expect("terminal");
        let a_role = if a_first { Player::P0 } else { Player::P1 };
        let score_a = (outcome.value_for(a_role) + 1.0) / 2.0;
        match score_a {
            s if s > 0.5 => result.wins_a += 1,
            s if s < 0.5 => result.wins_b += 1,
            _ => result.draws += 1,
        }
        result.games.push(GameRecord { a_first, score_a });
    }
    Ok(result)
}

/// Initial position followed by up to `plies` random moves (stopping short of
/// a terminal position).
fn random_opening(game: &GameId, plies: u32, rng: &mut Rng) -> GameState {
    let mut state = game.initial_state().expect("validated game");
    for _ in 0..plies {
        let legal = state.legal_actions().expect("non-terminal state");
        let next = state.apply(legal[rng.random_range(0..legal.len())]).expect("legal move");
        if next.is_terminal() {
            break;
        }
        state = next;
    }
    state
}
