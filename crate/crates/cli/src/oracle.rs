//! The `oracle` command: exact minimax value of a game's initial position,
//! and for HSR the direct recursion as a cross-check.

use std::fmt;

use dualmcts::game::oracle::{hsr_recursion, Oracle};
use dualmcts::game::{GameId, Outcome};

use crate::{CliError, GameArg, OracleArgs};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub game: GameId,
    /// Value for the side to move first.
    pub value: Outcome,
    /// HSR only: the recursion's truth value.
    pub recursion: Option<bool>,
    pub positions: usize,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = match self.value {
            Outcome::P0Wins => "mover wins",
            Outcome::P1Wins => "mover loses",
            Outcome::Draw => "draw",
        };
        write!(f, "{}: {value} ({} positions solved)", self.game, self.positions)?;
        if let Some(r) = self.recursion {
            write!(f, "\nrecursion: {}", if r { "True" } else { "False" })?;
        }
        Ok(())
    }
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<OracleReport, CliError> {
    let game = match (args.game, GameId::default_for(args.game.name()).expect("known game")) {
        (GameArg::Nim, GameId::Nim { max_take, pile }) => {
            GameId::nim(args.max_take.unwrap_or(max_take), args.pile.unwrap_or(pile))
        }
        (GameArg::Hsr, GameId::Hsr { jars, tests, rungs }) => {
            GameId::hsr(args.k.unwrap_or(jars), args.q.unwrap_or(tests), args.n.unwrap_or(rungs))
        }
        (GameArg::Connect4, GameId::Connect4 { rows, cols, connect }) => {
            GameId::connect4(args.rows.unwrap_or(rows), args.cols.unwrap_or(cols), args.connect.unwrap_or(connect))
        }
        _ => unreachable!("default game matches its name"),
    };
    let root = game.initial_state().map_err(|e| CliError::Config(e.to_string()))?;
    let mut oracle = Oracle::new(args.budget);
    let value = oracle.value(&root).map_err(CliError::OracleBudget)?;
    let recursion = match game {
        GameId::Hsr { jars, tests, rungs } => Some(hsr_recursion(jars, tests, rungs)),
        _ => None,
    };
    Ok(OracleReport { game, value, recursion, positions: oracle.solved_positions() })
}
