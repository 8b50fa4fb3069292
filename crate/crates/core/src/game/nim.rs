use super::{Action, GameId, Outcome, Player};

/// Single-pile Nim: take between 1 and `max_take` stones; whoever takes the
/// last stone wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NimState {
    pub max_take: u32,
    pub initial_pile: u32,
    pub pile: u32,
    pub to_move: Player,
    pub moves: u32,
}

impl NimState {
    pub(super) fn new(max_take: u32, pile: u32) -> Self {
        Self { max_take, initial_pile: pile, pile, to_move: Player::P0, moves: 0 }
    }

    /// Position with `pile` stones left and `to_move` on turn, in the game
    /// `Nim(max_take, initial_pile)`.
    pub fn at(max_take: u32, initial_pile: u32, pile: u32, to_move: Player) -> Self {
        assert!(pile <= initial_pile, "pile exceeds initial pile");
        Self { max_take, initial_pile, pile, to_move, moves: initial_pile - pile }
    }

    pub(super) fn game(&self) -> GameId {
        GameId::nim(self.max_take, self.initial_pile)
    }

    pub(super) fn terminal_value(&self) -> Option<Outcome> {
        // The previous mover took the last stone.
        (self.pile == 0).then(|| Outcome::win_for(self.to_move.other()))
    }

    pub(super) fn actions(&self) -> Vec<Action> {
        (0..self.max_take.min(self.pile) as usize).map(Action).collect()
    }

    pub(super) fn play(&self, action: Action) -> Self {
        Self {
            pile: self.pile - (action.index() as u32 + 1),
            to_move: self.to_move.other(),
            moves: self.moves + 1,
            ..self.clone()
        }
    }

    pub(super) fn encode(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.initial_pile as usize + 2];
        x[self.pile as usize] = 1.0;
        x[self.initial_pile as usize + 1] = self.to_move.index() as f64;
        x
    }
}

/// Closed form: the side to move loses iff `pile mod (max_take + 1) == 0`.
pub fn mover_wins(max_take: u32, pile: u32) -> bool {
    !pile.is_multiple_of(max_take + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameState;

    #[test]
    fn take_is_capped_by_pile() {
        let s = GameState::Nim(NimState::at(3, 20, 2, Player::P0));
        assert_eq!(s.legal_actions().unwrap(), vec![Action(0), Action(1)]);
    }

    #[test]
    fn apply_take_three() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let t = s.apply(Action(2)).unwrap();
        match &t {
            GameState::Nim(n) => assert_eq!(n.pile, 17),
            _ => unreachable!(),
        }
        assert_eq!(t.player_to_move(), Player::P1);
        // value semantics: the original is untouched
        match &s {
            GameState::Nim(n) => assert_eq!(n.pile, 20),
            _ => unreachable!(),
        }
    }

    #[test]
    fn last_stone_wins() {
        let s = GameState::Nim(NimState::at(3, 20, 0, Player::P1));
        assert_eq!(s.terminal_value(), Some(Outcome::P0Wins));
    }

    #[test]
    fn encoding_layout() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let x = s.encode();
        assert_eq!(x.len(), 22);
        assert_eq!(x[20], 1.0);
        assert_eq!(x.iter().sum::<f64>(), 1.0);
        assert_eq!(x[21], 0.0);
        let y = s.apply(Action(0)).unwrap().encode();
        assert_eq!(y[19], 1.0);
        assert_eq!(y[21], 1.0);
    }

    #[test]
    fn closed_form() {
        assert!(!mover_wins(3, 20));
        assert!(mover_wins(3, 5));
    }
}
