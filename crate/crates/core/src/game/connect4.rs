use super::{Action, GameId, Outcome, Player};

const EMPTY: u8 = 0;

/// Connect-`connect` on a `rows x cols` grid with gravity. Row 0 is the
/// bottom row; cells are stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Connect4State {
    pub rows: u32,
    pub cols: u32,
    pub connect: u32,
    cells: Vec<u8>,
    heights: Vec<u8>,
    winner: Option<Player>,
    pub to_move: Player,
    pub moves: u32,
}

fn mark(p: Player) -> u8 {
    p.index() as u8 + 1
}

impl Connect4State {
    pub(super) fn new(rows: u32, cols: u32, connect: u32) -> Self {
        Self {
            rows,
            cols,
            connect,
            cells: vec![EMPTY; (rows * cols) as usize],
            heights: vec![0; cols as usize],
            winner: None,
            to_move: Player::P0,
            moves: 0,
        }
    }

    pub(super) fn game(&self) -> GameId {
        GameId::connect4(self.rows, self.cols, self.connect)
    }

    pub fn cell(&self, row: u32, col: u32) -> Option<Player> {
        match self.cells[(row * self.cols + col) as usize] {
            1 => Some(Player::P0),
            2 => Some(Player::P1),
            _ => None,
        }
    }

    pub(super) fn terminal_value(&self) -> Option<Outcome> {
        if let Some(p) = self.winner {
            Some(Outcome::win_for(p))
        } else if self.moves == self.rows * self.cols {
            Some(Outcome::Draw)
        } else {
            None
        }
    }

    pub(super) fn actions(&self) -> Vec<Action> {
        (0..self.cols as usize).filter(|&c| u32::from(self.heights[c]) < self.rows).map(Action).collect()
    }

    pub(super) fn play(&self, action: Action) -> Self {
        let col = action.index() as u32;
        let row = u32::from(self.heights[col as usize]);
        let mut next = self.clone();
        next.cells[(row * self.cols + col) as usize] = mark(self.to_move);
        next.heights[col as usize] += 1;
        if next.line_through(row, col, self.to_move) {
            next.winner = Some(self.to_move);
        }
        next.to_move = self.to_move.other();
        next.moves += 1;
        next
    }

    fn line_through(&self, row: u32, col: u32, p: Player) -> bool {
        let m = mark(p);
        let owned = |r: i64, c: i64| {
            r >= 0
                && c >= 0
                && r < i64::from(self.rows)
                && c < i64::from(self.cols)
                && self.cells[(r * i64::from(self.cols) + c) as usize] == m
        };
        [(0, 1), (1, 0), (1, 1), (1, -1)].iter().any(|&(dr, dc)| {
            let run = |sign: i64| {
                (1..).take_while(|&i| owned(i64::from(row) + sign * i * dr, i64::from(col) + sign * i * dc)).count()
            };
            1 + run(1) + run(-1) >= self.connect as usize
        })
    }

    pub(super) fn encode(&self) -> Vec<f64> {
        let n = self.cells.len();
        let mut x = vec![0.0; 2 * n + 1];
        for (i, &c) in self.cells.iter().enumerate() {
            match c {
                1 => x[i] = 1.0,
                2 => x[n + i] = 1.0,
                _ => {}
            }
        }
        x[2 * n] = self.to_move.index() as f64;
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameState;

    fn play(game: GameId, cols: &[usize]) -> GameState {
        cols.iter().fold(game.initial_state().unwrap(), |s, &c| s.apply(Action(c)).unwrap())
    }

    #[test]
    fn gravity() {
        let s = play(GameId::connect4(6, 7, 4), &[3]);
        match &s {
            GameState::Connect4(c) => {
                assert_eq!(c.cell(0, 3), Some(Player::P0));
                assert_eq!(c.cell(1, 3), None);
            }
            _ => unreachable!(),
        }
        let x = s.encode();
        assert_eq!(x.len(), 85);
        assert_eq!(x[3], 1.0);
        assert_eq!(x[84], 1.0);
    }

    #[test]
    fn full_column_excluded() {
        let s = play(GameId::connect4(6, 7, 4), &[0, 0, 0, 0, 0, 0]);
        assert!(s.terminal_value().is_none());
        let acts = s.legal_actions().unwrap();
        assert_eq!(acts.len(), 6);
        assert!(!acts.contains(&Action(0)));
    }

    #[test]
    fn vertical_win() {
        let s = play(GameId::connect4(6, 7, 4), &[0, 1, 0, 1, 0, 1, 0]);
        assert_eq!(s.terminal_value(), Some(Outcome::P0Wins));
    }

    #[test]
    fn horizontal_and_diagonal_wins() {
        let h = play(GameId::connect4(6, 7, 4), &[0, 0, 1, 1, 2, 2, 3]);
        assert_eq!(h.terminal_value(), Some(Outcome::P0Wins));
        // P1 builds the anti-diagonal (0,3),(1,2),(2,1),(3,0)
        let d = play(GameId::connect4(6, 7, 4), &[0, 3, 0, 2, 1, 2, 1, 1, 6, 0, 5, 0]);
        assert_eq!(d.terminal_value(), Some(Outcome::P1Wins));
    }

    #[test]
    fn full_board_draw() {
        // 2x2 connect-3 can never be won
        let s = play(GameId::connect4(2, 2, 3), &[0, 0, 1, 1]);
        assert_eq!(s.terminal_value(), Some(Outcome::Draw));
    }
}
