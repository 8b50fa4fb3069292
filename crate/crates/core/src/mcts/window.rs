//! Sliding-window backup with ε-greedy selection at frozen nodes.
//!
//! Each node tracks how deep the explored subtree below it reaches. Once a
//! node lies more than `tau` edges above some leaf it is frozen: its edge
//! statistics stop changing and selection at that node follows the greedy
//! action cached at freeze time, overridden with probability `epsilon0 *
//! nu^k` (k = depth of the node on the current path) by a uniformly random
//! legal action. Backups therefore touch at most the `tau` edges nearest the
//! leaf.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{pucb_argmax, Path, SearchError, SearchTree, TreeNode};
use crate::game::{Action, GameId};
use crate::rng::Rng;

/// Scale applied to `ln(state space)` when sizing the window automatically.
pub const DEFAULT_KAPPA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub tau: u32,
    pub epsilon0: f64,
    pub nu: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { tau: 2, epsilon0: 0.1, nu: 0.9 }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.tau == 0 {
            return Err(SearchError::InvalidWindow("tau must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return Err(SearchError::InvalidWindow(format!("epsilon0 {} outside [0, 1]", self.epsilon0)));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(SearchError::InvalidWindow(format!("nu {} outside (0, 1]", self.nu)));
        }
        Ok(())
    }

    /// Probability of a random override at path depth `k`.
    pub fn epsilon_at(&self, k: u32) -> f64 {
        self.epsilon0 * self.nu.powi(k as i32)
    }
}

/// `max(2, ceil(kappa * ln(state space estimate)))`.
pub fn default_tau(game: &GameId, kappa: f64) -> u32 {
    let raw = (kappa * game.state_space_estimate().ln()).ceil();
    if raw.is_finite() && raw > 2.0 {
        raw as u32
    } else {
        2
    }
}

/// Updates subtree depths along `path` and freezes every node that now lies
/// more than `tau` edges above the leaf. Freezing is permanent and caches the
/// node's current PUCB choice.
pub fn refresh_freezing(tree: &mut SearchTree, cfg: &WindowConfig, path: &Path) {
    let len = path.len() as u32;
    let c = tree.exploration();
    for (i, &(id, _)) in path.steps.iter().enumerate() {
        let node = tree.node_mut(id);
        node.subtree_depth = node.subtree_depth.max(len - i as u32);
        if !node.frozen && node.subtree_depth > cfg.tau {
            node.frozen = true;
            node.cached_action = Some(node.edges[pucb_argmax(&node.edges, c)].action);
        }
    }
}

/// Chooses an action at `node` found at depth `k` of the current path.
pub fn select_action_windowed(node: &TreeNode, c: f64, cfg: &WindowConfig, k: u32, rng: &mut Rng) -> Action {
    match node.cached_action {
        Some(cached) if node.frozen => {
            let u: f64 = rng.random();
            if u < cfg.epsilon_at(k) {
                node.edges[rng.random_range(0..node.edges.len())].action
            } else {
                cached
            }
        }
        _ => node.edges[pucb_argmax(&node.edges, c)].action,
    }
}

/// Running-mean backup restricted to non-frozen nodes. Returns the number of
/// edges written.
///
/// Call [`refresh_freezing`] on the same path first; that is what confines
/// the writes to the window.
pub fn backup_windowed(tree: &mut SearchTree, path: &Path, leaf_value: f64, cfg: &WindowConfig) -> usize {
    let leaf_player = tree.node(path.leaf).player();
    let mut writes = 0;
    for &(id, edge) in path.steps.iter().rev() {
        let node = tree.node_mut(id);
        if node.frozen {
            continue;
        }
        let v = if node.player() == leaf_player { leaf_value } else { -leaf_value };
        node.edges[edge].stats.record(v);
        writes += 1;
    }
    debug_assert!(writes <= cfg.tau as usize || path.steps.iter().all(|&(id, _)| !tree.node(id).frozen));
    tree.count_writes(writes as u64);
    writes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameId;
    use crate::mcts::{SelectionPolicy, UniformEvaluator};
    use crate::rng;

    #[test]
    fn default_tau_rule() {
        assert_eq!(default_tau(&GameId::nim(3, 20), 0.5), 2);
        assert_eq!(default_tau(&GameId::connect4(6, 7, 4), 0.5), 15);
        assert_eq!(default_tau(&GameId::connect4(6, 7, 4), 0.0), 2);
        // hsr(4,4,16): 5*5*17*2 = 850, 0.5 ln 850 = 3.37
        assert_eq!(default_tau(&GameId::hsr(4, 4, 16), 0.5), 4);
    }

    #[test]
    fn epsilon_schedule() {
        let cfg = WindowConfig { tau: 3, epsilon0: 0.5, nu: 0.9 };
        assert!((cfg.epsilon_at(2) - 0.405).abs() < 1e-12);
        assert!(cfg.epsilon_at(3) <= cfg.epsilon_at(2));
    }

    #[test]
    fn validation() {
        assert!(WindowConfig { tau: 0, ..Default::default() }.validate().is_err());
        assert!(WindowConfig { epsilon0: 1.5, ..Default::default() }.validate().is_err());
        assert!(WindowConfig { nu: 0.0, ..Default::default() }.validate().is_err());
        assert!(WindowConfig { nu: 1.0, epsilon0: 0.0, tau: 1 }.validate().is_ok());
    }

    fn windowed_tree(tau: u32) -> SearchTree {
        let cfg = WindowConfig { tau, epsilon0: 0.0, nu: 1.0 };
        let root = GameId::nim(1, 12).initial_state().unwrap();
        SearchTree::with_rng(root, 1.0, SelectionPolicy::Windowed(cfg), rng::seeded(0)).unwrap()
    }

    #[test]
    fn shallow_tree_never_freezes() {
        // Nim(1, 12) is a single line of 12 forced moves.
        let mut t = windowed_tree(20);
        for _ in 0..30 {
            t.simulate(&UniformEvaluator).unwrap();
        }
        assert!(t.nodes().iter().all(|n| !n.frozen));
    }

    #[test]
    fn path_longer_than_window_freezes_root() {
        let mut t = windowed_tree(3);
        // Simulation i reaches depth i - 1; the fifth produces a 4-edge path.
        for _ in 0..4 {
            t.simulate(&UniformEvaluator).unwrap();
        }
        assert!(!t.root().frozen);
        let path = t.simulate(&UniformEvaluator).unwrap();
        assert_eq!(path.len(), 4);
        assert!(t.root().frozen);
        assert_eq!(t.root().cached_action, Some(Action(0)));
        let before = t.root().edges[0].stats;
        for _ in 0..5 {
            t.simulate(&UniformEvaluator).unwrap();
        }
        assert_eq!(t.root().edges[0].stats, before);
        assert_eq!(t.root().cached_action, Some(Action(0)));
    }

    #[test]
    fn minimal_window_updates_only_leaf_edge() {
        let mut t = windowed_tree(1);
        for _ in 0..8 {
            let before = t.counters().edge_writes;
            t.simulate(&UniformEvaluator).unwrap();
            assert!(t.counters().edge_writes - before <= 1);
        }
    }
}
