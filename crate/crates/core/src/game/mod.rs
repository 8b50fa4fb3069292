//! Game abstraction and the three concrete games: single-pile Nim, the
//! highest-safe-rung (HSR) logic game and Connect-4.
//!
//! Every state is an immutable value that carries its own rule parameters,
//! so a `GameState` alone is enough to enumerate moves, apply them, score
//! terminal positions and produce a network encoding.

mod connect4;
mod hsr;
mod nim;
pub mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use connect4::Connect4State;
pub use hsr::{HsrPhase, HsrState};
pub use nim::NimState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid game parameters: {0}")]
    InvalidParameters(String),
    #[error("illegal action {action} in state {state}")]
    IllegalAction { action: Action, state: String },
    #[error("no legal actions: state {0} is terminal")]
    TerminalState(String),
}

/// Side to move. `P0` always moves first; in HSR `P0` is the proponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P0,
    P1,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P0 => 0,
            Player::P1 => 1,
        }
    }
}

/// Final result of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    P0Wins,
    P1Wins,
    Draw,
}

impl Outcome {
    pub fn win_for(player: Player) -> Outcome {
        match player {
            Player::P0 => Outcome::P0Wins,
            Player::P1 => Outcome::P1Wins,
        }
    }

    /// Value in {-1, 0, +1} from P0's point of view.
    pub fn p0_value(self) -> i8 {
        match self {
            Outcome::P0Wins => 1,
            Outcome::P1Wins => -1,
            Outcome::Draw => 0,
        }
    }

    pub fn value_for(self, player: Player) -> f64 {
        let v = f64::from(self.p0_value());
        match player {
            Player::P0 => v,
            Player::P1 => -v,
        }
    }

    pub fn from_p0_value(v: i8) -> Outcome {
        match v.signum() {
            1 => Outcome::P0Wins,
            -1 => Outcome::P1Wins,
            _ => Outcome::Draw,
        }
    }
}

/// Index of an action in the game's policy vector.
///
/// Nim: `take t` is action `t - 1`. HSR: the proponent's rung choice `m` is
/// action `m - 1`; the opponent's branch choice is `0` (left) or `1` (right).
/// Connect-4: the column index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action(pub usize);

impl Action {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A game together with its rule parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "lowercase")]
pub enum GameId {
    Nim { max_take: u32, pile: u32 },
    Hsr { jars: u32, tests: u32, rungs: u32 },
    Connect4 { rows: u32, cols: u32, connect: u32 },
}

impl GameId {
    pub fn nim(max_take: u32, pile: u32) -> Self {
        GameId::Nim { max_take, pile }
    }

    pub fn hsr(jars: u32, tests: u32, rungs: u32) -> Self {
        GameId::Hsr { jars, tests, rungs }
    }

    pub fn connect4(rows: u32, cols: u32, connect: u32) -> Self {
        GameId::Connect4 { rows, cols, connect }
    }

    /// Default sizes: Nim(3,20), HSR(4,4,16), 6x7 connect-4.
    pub fn default_for(name: &str) -> Option<Self> {
        match name {
            "nim" => Some(Self::nim(3, 20)),
            "hsr" => Some(Self::hsr(4, 4, 16)),
            "connect4" => Some(Self::connect4(6, 7, 4)),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GameId::Nim { .. } => "nim",
            GameId::Hsr { .. } => "hsr",
            GameId::Connect4 { .. } => "connect4",
        }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |msg: String| Err(GameError::InvalidParameters(msg));
        match *self {
            GameId::Nim { max_take, pile } => {
                if max_take == 0 || pile == 0 {
                    return bad(format!("nim({max_take},{pile}): parameters must be positive"));
                }
                if max_take > pile {
                    return bad(format!("nim({max_take},{pile}): max_take exceeds pile"));
                }
            }
            GameId::Hsr { jars, tests, rungs } => {
                if jars == 0 || tests == 0 || rungs == 0 {
                    return bad(format!("hsr({jars},{tests},{rungs}): parameters must be positive"));
                }
            }
            GameId::Connect4 { rows, cols, connect } => {
                if rows == 0 || cols == 0 || connect == 0 {
                    return bad(format!("connect4({rows},{cols},{connect}): parameters must be positive"));
                }
                if rows > 16 || cols > 16 {
                    return bad(format!("connect4({rows},{cols},{connect}): board too large"));
                }
            }
        }
        Ok(())
    }

    /// Width of the policy vector (maximum number of distinct actions).
    pub fn action_space(&self) -> usize {
        match *self {
            GameId::Nim { max_take, .. } => max_take as usize,
            GameId::Hsr { rungs, .. } => (rungs as usize).max(2),
            GameId::Connect4 { cols, .. } => cols as usize,
        }
    }

    /// Length of the encoding vector.
    pub fn encoding_len(&self) -> usize {
        match *self {
            GameId::Nim { pile, .. } => pile as usize + 2,
            GameId::Hsr { .. } => 6,
            GameId::Connect4 { rows, cols, .. } => 2 * (rows * cols) as usize + 1,
        }
    }

    /// Rough count of distinct positions, used to size the backup window.
    pub fn state_space_estimate(&self) -> f64 {
        match *self {
            GameId::Nim { pile, .. } => f64::from(pile) * 2.0,
            GameId::Hsr { jars, tests, rungs } => {
                f64::from(jars + 1) * f64::from(tests + 1) * f64::from(rungs + 1) * 2.0
            }
            GameId::Connect4 { .. } => 4.5e12,
        }
    }

    pub fn initial_state(&self) -> Result<GameState, GameError> {
        self.validate()?;
        Ok(match *self {
            GameId::Nim { max_take, pile } => GameState::Nim(NimState::new(max_take, pile)),
            GameId::Hsr { jars, tests, rungs } => GameState::Hsr(HsrState::new(jars, tests, rungs)),
            GameId::Connect4 { rows, cols, connect } => GameState::Connect4(Connect4State::new(rows, cols, connect)),
        })
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameId::Nim { max_take, pile } => write!(f, "nim({max_take},{pile})"),
            GameId::Hsr { jars, tests, rungs } => write!(f, "hsr({jars},{tests},{rungs})"),
            GameId::Connect4 { rows, cols, connect } => write!(f, "connect4({rows}x{cols},{connect})"),
        }
    }
}

/// A position in one of the supported games.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GameState {
    Nim(NimState),
    Hsr(HsrState),
    Connect4(Connect4State),
}

impl GameState {
    pub fn game(&self) -> GameId {
        match self {
            GameState::Nim(s) => s.game(),
            GameState::Hsr(s) => s.game(),
            GameState::Connect4(s) => s.game(),
        }
    }

    pub fn player_to_move(&self) -> Player {
        match self {
            GameState::Nim(s) => s.to_move,
            GameState::Hsr(s) => s.to_move,
            GameState::Connect4(s) => s.to_move,
        }
    }

    pub fn move_count(&self) -> u32 {
        match self {
            GameState::Nim(s) => s.moves,
            GameState::Hsr(s) => s.moves,
            GameState::Connect4(s) => s.moves,
        }
    }

    pub fn terminal_value(&self) -> Option<Outcome> {
        match self {
            GameState::Nim(s) => s.terminal_value(),
            GameState::Hsr(s) => s.terminal_value(),
            GameState::Connect4(s) => s.terminal_value(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal_value().is_some()
    }

    /// Legal actions in ascending order. Errors on a terminal state.
    pub fn legal_actions(&self) -> Result<Vec<Action>, GameError> {
        if self.is_terminal() {
            return Err(GameError::TerminalState(self.to_string()));
        }
        Ok(self.actions_unchecked())
    }

    fn actions_unchecked(&self) -> Vec<Action> {
        match self {
            GameState::Nim(s) => s.actions(),
            GameState::Hsr(s) => s.actions(),
            GameState::Connect4(s) => s.actions(),
        }
    }

    /// Boolean mask of width `action_space()`; all false on terminal states.
    pub fn legal_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.game().action_space()];
        if !self.is_terminal() {
            for a in self.actions_unchecked() {
                mask[a.index()] = true;
            }
        }
        mask
    }

    pub fn is_legal(&self, action: Action) -> bool {
        !self.is_terminal() && self.actions_unchecked().contains(&action)
    }

    pub fn apply(&self, action: Action) -> Result<GameState, GameError> {
        if !self.is_legal(action) {
            return Err(GameError::IllegalAction { action, state: self.to_string() });
        }
        Ok(match self {
            GameState::Nim(s) => GameState::Nim(s.play(action)),
            GameState::Hsr(s) => GameState::Hsr(s.play(action)),
            GameState::Connect4(s) => GameState::Connect4(s.play(action)),
        })
    }

    /// Network input vector; see the README for the per-game layouts.
    pub fn encode(&self) -> Vec<f64> {
        match self {
            GameState::Nim(s) => s.encode(),
            GameState::Hsr(s) => s.encode(),
            GameState::Connect4(s) => s.encode(),
        }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameState::Nim(s) => write!(f, "nim[pile={}, {:?} to move]", s.pile, s.to_move),
            GameState::Hsr(s) => {
                write!(f, "hsr[k={}, q={}, n={}, {:?}, m={}]", s.jars, s.tests, s.rungs, s.phase, s.pending)
            }
            GameState::Connect4(s) => write!(f, "connect4[moves={}, {:?} to move]", s.moves, s.to_move),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_states() {
        let nim = GameId::nim(3, 20).initial_state().unwrap();
        match &nim {
            GameState::Nim(s) => assert_eq!(s.pile, 20),
            _ => unreachable!(),
        }
        assert_eq!(nim.player_to_move(), Player::P0);

        let hsr = GameId::hsr(4, 4, 16).initial_state().unwrap();
        match &hsr {
            GameState::Hsr(s) => {
                assert_eq!((s.jars, s.tests, s.rungs), (4, 4, 16));
                assert_eq!(s.phase, HsrPhase::ProponentPicks);
            }
            _ => unreachable!(),
        }
        assert_eq!(hsr.player_to_move(), Player::P0);

        let c4 = GameId::connect4(6, 7, 4).initial_state().unwrap();
        assert!(c4.encode()[..84].iter().all(|&x| x == 0.0));
        assert_eq!(c4.legal_actions().unwrap().len(), 7);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(GameId::nim(4, 3).initial_state().is_err());
        assert!(GameId::nim(0, 3).initial_state().is_err());
        assert!(GameId::hsr(0, 1, 1).initial_state().is_err());
        assert!(GameId::connect4(6, 0, 4).initial_state().is_err());
    }

    #[test]
    fn illegal_action_is_reported() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let err = s.apply(Action(5)).unwrap_err();
        assert!(matches!(err, GameError::IllegalAction { action: Action(5), .. }));
    }

    #[test]
    fn terminal_state_has_no_actions() {
        let s = GameId::nim(3, 3).initial_state().unwrap();
        let end = s.apply(Action(2)).unwrap();
        assert_eq!(end.terminal_value(), Some(Outcome::P0Wins));
        assert!(matches!(end.legal_actions(), Err(GameError::TerminalState(_))));
        assert!(end.legal_mask().iter().all(|&m| !m));
    }

    #[test]
    fn outcome_perspective() {
        assert_eq!(Outcome::P0Wins.value_for(Player::P1), -1.0);
        assert_eq!(Outcome::Draw.value_for(Player::P0), 0.0);
        assert_eq!(Outcome::from_p0_value(-1), Outcome::P1Wins);
    }
}
