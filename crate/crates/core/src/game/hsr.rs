use std::collections::HashMap;

use super::{Action, GameId, Outcome, Player};

/// Whose choice is pending in the HSR logic game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HsrPhase {
    /// The proponent (P0) picks a test rung `m` in `1..=n`.
    ProponentPicks,
    /// The opponent (P1) picks which conjunct must hold: the jar breaks
    /// (`left`, `HSR(k-1, q-1, m)`) or survives (`right`, `HSR(k, q-1, n-m)`).
    OpponentPicks,
}

pub const LEFT: Action = Action(0);
pub const RIGHT: Action = Action(1);

/// Highest-safe-rung game: can `jars` jars and `tests` throws locate the
/// highest safe rung among `rungs` rungs? Played as a two-player logic game
/// between a proponent (existential choice of `m`) and an opponent
/// (universal choice of branch).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HsrState {
    pub max_jars: u32,
    pub max_tests: u32,
    pub max_rungs: u32,
    pub jars: u32,
    pub tests: u32,
    pub rungs: u32,
    pub phase: HsrPhase,
    /// The proponent's chosen rung while the opponent decides; 0 otherwise.
    pub pending: u32,
    pub to_move: Player,
    pub moves: u32,
}

impl HsrState {
    pub(super) fn new(jars: u32, tests: u32, rungs: u32) -> Self {
        Self::at(jars, tests, rungs, (jars, tests, rungs))
    }

    /// Proponent-to-move position `(jars, tests, rungs)` inside a game whose
    /// starting parameters are `initial`.
    pub fn at(jars: u32, tests: u32, rungs: u32, initial: (u32, u32, u32)) -> Self {
        Self {
            max_jars: initial.0,
            max_tests: initial.1,
            max_rungs: initial.2,
            jars,
            tests,
            rungs,
            phase: HsrPhase::ProponentPicks,
            pending: 0,
            to_move: Player::P0,
            moves: 0,
        }
    }

    pub(super) fn game(&self) -> GameId {
        GameId::hsr(self.max_jars, self.max_tests, self.max_rungs)
    }

    pub(super) fn terminal_value(&self) -> Option<Outcome> {
        if self.phase == HsrPhase::OpponentPicks {
            return None;
        }
        // n <= 1 also covers the n = 0 segment left behind by m = n.
        if self.rungs <= 1 {
            Some(Outcome::P0Wins)
        } else if self.jars == 0 || self.tests == 0 {
            Some(Outcome::P1Wins)
        } else {
            None
        }
    }

    pub(super) fn actions(&self) -> Vec<Action> {
        match self.phase {
            HsrPhase::ProponentPicks => (0..self.rungs as usize).map(Action).collect(),
            HsrPhase::OpponentPicks => vec![LEFT, RIGHT],
        }
    }

    pub(super) fn play(&self, action: Action) -> Self {
        let next = Self { to_move: self.to_move.other(), moves: self.moves + 1, ..self.clone() };
        match self.phase {
            HsrPhase::ProponentPicks => {
                Self { phase: HsrPhase::OpponentPicks, pending: action.index() as u32 + 1, ..next }
            }
            HsrPhase::OpponentPicks => {
                let m = self.pending;
                let (jars, rungs) = if action == LEFT { (self.jars - 1, m) } else { (self.jars, self.rungs - m) };
                Self { jars, tests: self.tests - 1, rungs, phase: HsrPhase::ProponentPicks, pending: 0, ..next }
            }
        }
    }

    pub(super) fn encode(&self) -> Vec<f64> {
        let norm = |v: u32, max: u32| f64::from(v) / f64::from(max);
        vec![
            norm(self.jars, self.max_jars),
            norm(self.tests, self.max_tests),
            norm(self.rungs, self.max_rungs),
            norm(self.pending, self.max_rungs),
            if self.phase == HsrPhase::OpponentPicks { 1.0 } else { 0.0 },
            self.to_move.index() as f64,
        ]
    }
}

/// Direct evaluation of the HSR recursion:
///
/// ```text
/// HSR(k,q,n) = true                                   if n = 1
///            = false                                  if n > 1 and (k = 0 or q = 0)
///            = exists m in 1..=n: HSR(k-1,q-1,m) and HSR(k,q-1,n-m)
/// ```
///
/// with `HSR(k,q,0) = true`.
pub fn hsr_recursion(jars: u32, tests: u32, rungs: u32) -> bool {
    fn go(k: u32, q: u32, n: u32, memo: &mut HashMap<(u32, u32, u32), bool>) -> bool {
        if n <= 1 {
            return true;
        }
        if k == 0 || q == 0 {
            return false;
        }
        if let Some(&v) = memo.get(&(k, q, n)) {
            return v;
        }
        let v = (1..=n).any(|m| go(k - 1, q - 1, m, memo) && go(k, q - 1, n - m, memo));
        memo.insert((k, q, n), v);
        v
    }
    go(jars, tests, rungs, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameState;

    #[test]
    fn proponent_has_one_action_per_rung() {
        let s = GameId::hsr(4, 4, 16).initial_state().unwrap();
        assert_eq!(s.legal_actions().unwrap().len(), 16);
    }

    #[test]
    fn pick_then_branch() {
        let s = GameId::hsr(4, 4, 16).initial_state().unwrap();
        let picked = s.apply(Action(7)).unwrap();
        assert_eq!(picked.legal_actions().unwrap(), vec![LEFT, RIGHT]);
        assert_eq!(picked.player_to_move(), Player::P1);
        let right = picked.apply(RIGHT).unwrap();
        match &right {
            GameState::Hsr(h) => assert_eq!((h.jars, h.tests, h.rungs), (4, 3, 8)),
            _ => unreachable!(),
        }
        let left = picked.apply(LEFT).unwrap();
        match &left {
            GameState::Hsr(h) => assert_eq!((h.jars, h.tests, h.rungs), (3, 3, 8)),
            _ => unreachable!(),
        }
        assert_eq!(right.player_to_move(), Player::P0);
    }

    #[test]
    fn terminal_rules() {
        let t = |k, q, n| GameState::Hsr(HsrState::at(k, q, n, (4, 4, 16))).terminal_value();
        assert_eq!(t(2, 0, 5), Some(Outcome::P1Wins));
        assert_eq!(t(0, 3, 2), Some(Outcome::P1Wins));
        assert_eq!(t(0, 0, 1), Some(Outcome::P0Wins));
        assert_eq!(t(2, 2, 0), Some(Outcome::P0Wins));
        assert_eq!(t(2, 2, 3), None);
    }

    #[test]
    fn encoding_layout() {
        let s = GameId::hsr(4, 4, 16).initial_state().unwrap();
        assert_eq!(s.encode(), vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let p = s.apply(Action(7)).unwrap();
        assert_eq!(p.encode(), vec![1.0, 1.0, 1.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn recursion_known_values() {
        assert!(hsr_recursion(4, 4, 16));
        assert!(!hsr_recursion(4, 4, 17));
        assert!(hsr_recursion(1, 1, 2));
        assert!(!hsr_recursion(1, 1, 3));
    }
}
