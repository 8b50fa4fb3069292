//! Per-move search for the three algorithms.
//!
//! Dual MCTS and MPV-MCTS share [`two_tree_search`]: a small tree is searched
//! first, then the large tree spends its budget on the frontier leaves the
//! small tree visited most. They differ only in the evaluators and in the
//! backup rule.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::AddAssign;

use rand::Rng as _;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::game::GameState;
use crate::mcts::{Evaluation, Evaluator, NodeId, SearchError, SearchTree, SelectionPolicy, WindowConfig};
use crate::net::{NetEvaluator, PolicyValueNet, SharedTrunk, Tap};
use crate::rng::Rng;

/// Per-move simulation budgets for the small (`b_sub`) and large (`b_full`)
/// trees. AlphaZero spends `b_sub + b_full` in one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub b_sub: u32,
    pub b_full: u32,
}

impl Budget {
    pub fn total(&self) -> u32 {
        self.b_sub + self.b_full
    }
}

/// Weights of the small-tree estimates when both trees know a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for MixWeights {
    fn default() -> Self {
        Self { alpha: 0.5, beta: 0.5 }
    }
}

/// `V = alpha V_sub + (1 - alpha) V_full`, `P = beta p_sub + (1 - beta) p_full`.
pub fn mix(sub: &Evaluation, full: &Evaluation, w: MixWeights) -> Evaluation {
    Evaluation {
        priors: sub.priors.iter().zip(&full.priors).map(|(s, f)| w.beta * s + (1.0 - w.beta) * f).collect(),
        value: w.alpha * sub.value + (1.0 - w.alpha) * full.value,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStats {
    pub sub_simulations: u64,
    pub full_simulations: u64,
    /// Network evaluations across both trees.
    pub evaluations: u64,
    pub edge_writes: u64,
    /// Large-tree leaves chosen by small-tree priority.
    pub priority_picks: u64,
    /// Large-tree leaves chosen by PUCB because no frontier leaf was known
    /// to the small tree.
    pub fallbacks: u64,
    /// Large-tree leaves whose estimates were mixed with the small tree's.
    pub mixed: u64,
}

impl MoveStats {
    pub fn simulations(&self) -> u64 {
        self.sub_simulations + self.full_simulations
    }
}

impl AddAssign for MoveStats {
    fn add_assign(&mut self, o: Self) {
        self.sub_simulations += o.sub_simulations;
        self.full_simulations += o.full_simulations;
        self.evaluations += o.evaluations;
        self.edge_writes += o.edge_writes;
        self.priority_picks += o.priority_picks;
        self.fallbacks += o.fallbacks;
        self.mixed += o.mixed;
    }
}

/// Result of searching one position.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveSearch {
    /// Root empirical policy over the game's full action width.
    pub policy: Vec<f64>,
    pub stats: MoveStats,
}

/// Settings shared by all move searches of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub c_puct: f64,
    pub window: WindowConfig,
    pub mix: MixWeights,
}

/// Memoizes an evaluator so mixed estimates can be looked up later.
struct Recording<'a> {
    inner: &'a dyn Evaluator,
    seen: RefCell<HashMap<GameState, Evaluation>>,
}

impl Evaluator for Recording<'_> {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        if let Some(e) = self.seen.borrow().get(state) {
            return e.clone();
        }
        let e = self.inner.evaluate(state);
        self.seen.borrow_mut().insert(state.clone(), e.clone());
        e
    }
}

fn child_rng(rng: &mut Rng) -> Rng {
    Rng::seed_from_u64(rng.random())
}

/// Small tree first, then the large tree driven by small-tree visit counts.
///
/// Each large-tree simulation expands the frontier leaf with the most
/// small-tree visits, breaking ties by the higher small-tree value (for the
/// player who moved into the leaf) and then by discovery order. When no
/// frontier leaf was visited by the small tree, ordinary selection is used.
#[allow(clippy::too_many_arguments)]
pub fn two_tree_search(
    state: &GameState,
    sub: &dyn Evaluator,
    full: &dyn Evaluator,
    budget: Budget,
    policy: SelectionPolicy,
    c_puct: f64,
    weights: MixWeights,
    rng: &mut Rng,
) -> Result<MoveSearch, SearchError> {
    if state.is_terminal() {
        return Err(SearchError::TerminalRoot);
    }
    let sub = Recording { inner: sub, seen: RefCell::new(HashMap::new()) };
    let mut small = SearchTree::with_rng(state.clone(), c_puct, policy, child_rng(rng))?;
    if budget.b_sub > 0 {
        small.run_simulations(budget.b_sub, &sub)?;
    }

    let mut large = SearchTree::with_rng(state.clone(), c_puct, policy, child_rng(rng))?;
    let mut stats = MoveStats::default();
    let seen = sub.seen.into_inner();
    for _ in 0..budget.b_full {
        let path = if !large.root().visited {
            large.path_to(large.root_id())
        } else if let Some(leaf) = priority_leaf(&large, &small, &seen) {
            stats.priority_picks += 1;
            large.path_to(leaf)
        } else {
            stats.fallbacks += 1;
            large.select_path()
        };
        let node = large.node(path.leaf);
        let value = if node.terminal.is_some() {
            large.expand(path.leaf, full)?
        } else {
            let own = full.evaluate(&node.state);
            let eval = match seen.get(&node.state) {
                Some(s) => {
                    stats.mixed += 1;
                    mix(s, &own, weights)
                }
                None => own,
            };
            large.expand_with(path.leaf, eval)?
        };
        large.backup(&path, value);
    }

    let (s, l) = (small.counters(), large.counters());
    stats.sub_simulations = s.simulations;
    stats.full_simulations = l.simulations;
    stats.evaluations = s.evaluations + l.evaluations;
    stats.edge_writes = s.edge_writes + l.edge_writes;
    Ok(MoveSearch { policy: large.root_policy_full()?, stats })
}

fn priority_leaf(large: &SearchTree, small: &SearchTree, seen: &HashMap<GameState, Evaluation>) -> Option<NodeId> {
    let mut best: Option<(u64, f64, NodeId)> = None;
    for id in large.frontier() {
        let node = large.node(id);
        let n_sub = small.lookup(&node.state).map_or(0, |i| small.node(i).visits());
        if n_sub == 0 {
            continue;
        }
        let v = seen.get(&node.state).map_or(0.0, |e| e.value);
        let v = match node.parent {
            Some((p, _)) if large.node(p).player() != node.player() => -v,
            _ => v,
        };
        // frontier ids ascend, so strict comparison keeps the earliest on ties
        if best.is_none_or(|(bn, bv, _)| n_sub > bn || (n_sub == bn && v > bv)) {
            best = Some((n_sub, v, id));
        }
    }
    best.map(|(_, _, id)| id)
}

/// Dual MCTS: one network, sub head on the small tree, full head on the
/// large tree, windowed backup in both. The heads share first-block features.
pub fn dual_mcts_move(
    state: &GameState,
    net: &PolicyValueNet,
    budget: Budget,
    settings: &SearchSettings,
    rng: &mut Rng,
) -> Result<MoveSearch, SearchError> {
    let trunk = SharedTrunk::new(net, &state.game()).expect("dual network has both heads for this game");
    two_tree_search(
        state,
        &trunk.head(Tap::Sub),
        &trunk.head(Tap::Full),
        budget,
        SelectionPolicy::Windowed(settings.window),
        settings.c_puct,
        settings.mix,
        rng,
    )
}

/// MPV-MCTS: separate small and large networks, standard backup.
pub fn mpv_move(
    state: &GameState,
    small: &PolicyValueNet,
    large: &PolicyValueNet,
    budget: Budget,
    settings: &SearchSettings,
    rng: &mut Rng,
) -> Result<MoveSearch, SearchError> {
    let game = state.game();
    let sub = NetEvaluator::new(small, Tap::Sub, &game).expect("small network has a sub head for this game");
    let full = NetEvaluator::new(large, Tap::Full, &game).expect("large network has a full head for this game");
    two_tree_search(state, &sub, &full, budget, SelectionPolicy::Standard, settings.c_puct, settings.mix, rng)
}

/// AlphaZero: one tree, full head, standard backup, `b_sub + b_full`
/// simulations.
pub fn alphazero_move(
    state: &GameState,
    net: &PolicyValueNet,
    budget: Budget,
    settings: &SearchSettings,
    rng: &mut Rng,
) -> Result<MoveSearch, SearchError> {
    let full = NetEvaluator::new(net, Tap::Full, &state.game()).expect("network has a full head for this game");
    single_tree_search(state, &full, budget.total(), settings.c_puct, rng)
}

/// One standard-PUCB tree with `simulations` simulations.
pub fn single_tree_search(
    state: &GameState,
    evaluator: &dyn Evaluator,
    simulations: u32,
    c_puct: f64,
    rng: &mut Rng,
) -> Result<MoveSearch, SearchError> {
    let mut tree = SearchTree::with_rng(state.clone(), c_puct, SelectionPolicy::Standard, child_rng(rng))?;
    tree.run_simulations(simulations, evaluator)?;
    let c = tree.counters();
    Ok(MoveSearch {
        policy: tree.root_policy_full()?,
        stats: MoveStats {
            full_simulations: c.simulations,
            evaluations: c.evaluations,
            edge_writes: c.edge_writes,
            ..MoveStats::default()
        },
    })
}
