//! Neural Monte Carlo tree search experiments: AlphaZero, MPV-MCTS and Dual
//! MCTS trained by self-play on Nim, HSR and Connect-4, with Elo and α-rank
//! evaluation.

pub mod eval;
pub mod game;
pub mod mcts;
pub mod net;
pub mod rng;
pub mod training;
