//! Exact game values by memoized minimax, used as ground truth for tests,
//! evaluation and the `oracle` command.

use std::collections::HashMap;

use thiserror::Error;

use super::{Action, GameState, Outcome, Player};

pub use super::hsr::hsr_recursion;
pub use super::nim::mover_wins as nim_mover_wins;

/// Distinct positions the solver may memoize before giving up.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle unavailable: more than {budget} positions needed")]
    BudgetExceeded { budget: usize },
}

/// Memoized minimax solver. Values are kept from P0's perspective.
#[derive(Debug)]
pub struct Oracle {
    budget: usize,
    memo: HashMap<GameState, i8>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new(DEFAULT_NODE_BUDGET)
    }
}

impl Oracle {
    pub fn new(budget: usize) -> Self {
        Self { budget, memo: HashMap::new() }
    }

    pub fn solved_positions(&self) -> usize {
        self.memo.len()
    }

    pub fn value(&mut self, state: &GameState) -> Result<Outcome, OracleError> {
        self.solve(state).map(Outcome::from_p0_value)
    }

    /// Actions that keep the exact game value for the side to move.
    pub fn optimal_actions(&mut self, state: &GameState) -> Result<Vec<Action>, OracleError> {
        let Ok(actions) = state.legal_actions() else {
            return Ok(Vec::new());
        };
        let sign = side_sign(state.player_to_move());
        let mut scored = Vec::with_capacity(actions.len());
        for a in actions {
            let child = state.apply(a).expect("legal action");
            scored.push((a, sign * self.solve(&child)?));
        }
        let best = scored.iter().map(|&(_, v)| v).max().unwrap_or(0);
        Ok(scored.into_iter().filter(|&(_, v)| v == best).map(|(a, _)| a).collect())
    }

    fn solve(&mut self, state: &GameState) -> Result<i8, OracleError> {
        if let Some(outcome) = state.terminal_value() {
            return Ok(outcome.p0_value());
        }
        if let Some(&v) = self.memo.get(state) {
            return Ok(v);
        }
        if self.memo.len() >= self.budget {
            return Err(OracleError::BudgetExceeded { budget: self.budget });
        }
        let sign = side_sign(state.player_to_move());
        let mut best = i8::MIN;
        for a in state.legal_actions().expect("non-terminal") {
            let v = sign * self.solve(&state.apply(a).expect("legal action"))?;
            best = best.max(v);
            if best == 1 {
                break;
            }
        }
        let value = sign * best;
        self.memo.insert(state.clone(), value);
        Ok(value)
    }
}

fn side_sign(p: Player) -> i8 {
    match p {
        Player::P0 => 1,
        Player::P1 => -1,
    }
}

/// One-shot solve with the default node budget.
pub fn oracle_value(state: &GameState) -> Result<Outcome, OracleError> {
    Oracle::default().value(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameId, HsrState, NimState};

    #[test]
    fn nim_initial_is_lost_for_mover() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        assert_eq!(oracle_value(&s).unwrap(), Outcome::P1Wins);
        let s = GameId::nim(3, 5).initial_state().unwrap();
        assert_eq!(oracle_value(&s).unwrap(), Outcome::P0Wins);
    }

    #[test]
    fn hsr_known_instances() {
        let s = GameId::hsr(4, 4, 16).initial_state().unwrap();
        assert_eq!(oracle_value(&s).unwrap(), Outcome::P0Wins);
        let s = GameId::hsr(4, 4, 17).initial_state().unwrap();
        assert_eq!(oracle_value(&s).unwrap(), Outcome::P1Wins);
    }

    #[test]
    fn optimal_actions_nim() {
        let mut o = Oracle::default();
        let s = GameState::Nim(NimState::at(3, 20, 5, Player::P0));
        assert_eq!(o.optimal_actions(&s).unwrap(), vec![Action(0)]);
        // every move loses from a multiple of four
        let s = GameState::Nim(NimState::at(3, 20, 8, Player::P1));
        assert_eq!(o.optimal_actions(&s).unwrap().len(), 3);
    }

    #[test]
    fn hsr_subposition() {
        let s = GameState::Hsr(HsrState::at(1, 1, 2, (4, 4, 16)));
        assert_eq!(oracle_value(&s).unwrap(), Outcome::P0Wins);
    }

    #[test]
    fn budget_guard() {
        let s = GameId::connect4(6, 7, 4).initial_state().unwrap();
        let err = Oracle::new(10_000).value(&s).unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded { budget: 10_000 });
    }

    #[test]
    fn small_connect_board() {
        // 3x3 connect-3: solvable instantly, and the result is exact either way.
        let s = GameId::connect4(3, 3, 3).initial_state().unwrap();
        let mut o = Oracle::default();
        let v = o.value(&s).unwrap();
        assert!(o.solved_positions() > 0);
        assert!(matches!(v, Outcome::P0Wins | Outcome::Draw | Outcome::P1Wins));
    }
}
