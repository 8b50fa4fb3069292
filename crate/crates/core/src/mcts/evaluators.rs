use std::sync::Mutex;

use super::{Evaluation, Evaluator};
use crate::game::oracle::Oracle;
use crate::game::GameState;

/// Uniform priors and a neutral value.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformEvaluator;

impl Evaluator for UniformEvaluator {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        let k = state.legal_actions().map(|a| a.len()).unwrap_or(0);
        Evaluation { priors: vec![1.0 / k as f64; k], value: 0.0 }
    }
}

/// Uniform priors with the exact game value from a minimax oracle.
#[derive(Debug, Default)]
pub struct TruthfulEvaluator {
    oracle: Mutex<Oracle>,
}

impl TruthfulEvaluator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Evaluator for TruthfulEvaluator {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        let value = self
            .oracle
            .lock()
            .expect("oracle lock")
            .value(state)
            .expect("truthful evaluator needs a solvable game")
            .value_for(state.player_to_move());
        Evaluation { value, ..UniformEvaluator.evaluate(state) }
    }
}
