use std::cell::RefCell;
use std::collections::HashMap;

use super::{NetError, NetShape, PolicyValueNet, Tap};
use crate::game::{GameId, GameState};
use crate::mcts::{Evaluation, Evaluator};

/// Search evaluator backed by one head of a network.
#[derive(Debug, Clone, Copy)]
pub struct NetEvaluator<'a> {
    net: &'a PolicyValueNet,
    tap: Tap,
}

impl<'a> NetEvaluator<'a> {
    pub fn new(net: &'a PolicyValueNet, tap: Tap, game: &GameId) -> Result<Self, NetError> {
        let shape = net.shape();
        if shape.input != game.encoding_len() {
            return Err(NetError::WidthMismatch { expected: game.encoding_len(), got: shape.input });
        }
        if shape.actions != game.action_space() {
            return Err(NetError::WidthMismatch { expected: game.action_space(), got: shape.actions });
        }
        if !net.has_head(tap) {
            return Err(NetError::MissingHead(tap));
        }
        Ok(Self { net, tap })
    }

    pub fn tap(&self) -> Tap {
        self.tap
    }
}

impl Evaluator for NetEvaluator<'_> {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        let mask = state.legal_mask();
        let out = self
            .net
            .forward_head(&state.encode(), &mask, self.tap)
            .expect("evaluator widths are checked at construction");
        let priors = out.policy.iter().zip(&mask).filter(|(_, &m)| m).map(|(&p, _)| p).collect();
        Evaluation { priors, value: out.value }
    }
}

/// Both heads of one network, sharing first-block features between them.
/// A position the sub head has seen costs the full head only its second
/// block. Outputs are identical to [`NetEvaluator`]'s.
#[derive(Debug)]
pub struct SharedTrunk<'a> {
    net: &'a PolicyValueNet,
    features: RefCell<HashMap<GameState, Vec<f64>>>,
}

impl<'a> SharedTrunk<'a> {
    pub fn new(net: &'a PolicyValueNet, game: &GameId) -> Result<Self, NetError> {
        NetEvaluator::new(net, Tap::Sub, game)?;
        NetEvaluator::new(net, Tap::Full, game)?;
        Ok(Self { net, features: RefCell::new(HashMap::new()) })
    }

    pub fn head(&self, tap: Tap) -> TrunkHead<'_, 'a> {
        TrunkHead { trunk: self, tap }
    }

    /// Positions whose features are cached.
    pub fn cached(&self) -> usize {
        self.features.borrow().len()
    }
}

/// One head of a [`SharedTrunk`].
#[derive(Debug, Clone, Copy)]
pub struct TrunkHead<'t, 'a> {
    trunk: &'t SharedTrunk<'a>,
    tap: Tap,
}

impl Evaluator for TrunkHead<'_, '_> {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        let net = self.trunk.net;
        let mask = state.legal_mask();
        let mut cache = self.trunk.features.borrow_mut();
        let feat = cache
            .entry(state.clone())
            .or_insert_with(|| net.features(&state.encode()).expect("trunk widths are checked at construction"));
        let out = net.head_from_features(feat, &mask, self.tap).expect("trunk widths are checked at construction");
        let priors = out.policy.iter().zip(&mask).filter(|(_, &m)| m).map(|(&p, _)| p).collect();
        Evaluation { priors, value: out.value }
    }
}

impl NetShape {
    /// Shape sized for `game` with the given hidden width.
    pub fn for_game(game: &GameId, hidden: usize, taps: &[Tap]) -> Self {
        let blocks = if taps.contains(&Tap::Full) { 2 } else { 1 };
        Self { input: game.encoding_len(), hidden, actions: game.action_space(), blocks, taps: taps.to_vec() }
    }
}
