//! Neural-guided Monte Carlo tree search.
//!
//! A [`SearchTree`] stores one node per distinct position (transpositions
//! share a node), each holding per-action [`EdgeStats`]. A simulation selects
//! a path with PUCB, expands the leaf with an [`Evaluator`] (or scores it
//! exactly if terminal) and backs the value up the path, either with the
//! plain running-mean update or with the sliding-window update from
//! [`window`].

mod evaluators;
pub mod window;

use std::collections::{BTreeSet, HashMap};

use rand::Rng as _;
use thiserror::Error;

use crate::game::{Action, GameState, Outcome, Player};
use crate::rng::{self, Rng};

pub use evaluators::{TruthfulEvaluator, UniformEvaluator};
pub use window::WindowConfig;

/// Exploration constant used when none is configured.
pub const DEFAULT_C_PUCT: f64 = 1.25;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("exploration constant must be positive and finite, got {0}")]
    InvalidExploration(f64),
    #[error("node {0} is already expanded")]
    AlreadyExpanded(NodeId),
    #[error("empirical policy requested for an unvisited node")]
    UnvisitedNode,
    #[error("root position is terminal")]
    TerminalRoot,
    #[error("evaluator returned {got} priors for {expected} legal actions")]
    PriorWidth { expected: usize, got: usize },
    #[error("invalid window configuration: {0}")]
    InvalidWindow(String),
}

/// Statistics of one (state, action) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStats {
    /// Visit count.
    pub n: u32,
    /// Mean backed-up value from the acting player's point of view.
    pub q: f64,
    /// Prior probability.
    pub p: f64,
}

impl EdgeStats {
    /// Folds one more backed-up value into the running mean.
    pub fn record(&mut self, v: f64) {
        self.n += 1;
        self.q += (v - self.q) / f64::from(self.n);
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub action: Action,
    pub child: NodeId,
    pub stats: EdgeStats,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub state: GameState,
    pub terminal: Option<Outcome>,
    /// Populated exactly when `visited`.
    pub edges: Vec<Edge>,
    pub visited: bool,
    /// Longest path (in edges) from this node to a leaf reached through it.
    pub subtree_depth: u32,
    pub cached_action: Option<Action>,
    pub frozen: bool,
    /// Parent edge through which the node was first discovered.
    pub parent: Option<(NodeId, usize)>,
}

impl TreeNode {
    pub fn player(&self) -> Player {
        self.state.player_to_move()
    }

    /// Number of simulations that reached this node: one for its expansion
    /// plus one per backed-up visit of its edges.
    pub fn visits(&self) -> u64 {
        u64::from(self.visited) + self.edges.iter().map(|e| u64::from(e.stats.n)).sum::<u64>()
    }

    fn edge_index(&self, action: Action) -> Option<usize> {
        self.edges.iter().position(|e| e.action == action)
    }
}

/// Prior over the legal actions (in ascending action order) and a value
/// estimate in `[-1, 1]` from the perspective of the side to move.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub priors: Vec<f64>,
    pub value: f64,
}

pub trait Evaluator {
    fn evaluate(&self, state: &GameState) -> Evaluation;
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn evaluate(&self, state: &GameState) -> Evaluation {
        (**self).evaluate(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionPolicy {
    Standard,
    Windowed(WindowConfig),
}

/// A root-to-leaf path: `(node, edge index)` pairs followed by the leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub steps: Vec<(NodeId, usize)>,
    pub leaf: NodeId,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub simulations: u64,
    /// Leaves scored by the evaluator (terminal leaves are scored exactly).
    pub evaluations: u64,
    /// Individual (N, Q) edge updates performed by backups.
    pub edge_writes: u64,
    pub max_writes_per_backup: u64,
}

#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
    index: HashMap<GameState, NodeId>,
    frontier: BTreeSet<NodeId>,
    c: f64,
    policy: SelectionPolicy,
    rng: Rng,
    counters: SearchCounters,
}

/// Index of the edge maximising `Q + c P sqrt(sum N) / (N + 1)`; ties go to
/// the lowest action.
pub fn pucb_argmax(edges: &[Edge], c: f64) -> usize {
    let total: u64 = edges.iter().map(|e| u64::from(e.stats.n)).sum();
    let sqrt_total = (total as f64).sqrt();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, e) in edges.iter().enumerate() {
        let s = e.stats.q + c * e.stats.p * sqrt_total / (f64::from(e.stats.n) + 1.0);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// `(1 + N(a)) / (|A| + sum N)` over the node's edges.
pub fn empirical_policy(node: &TreeNode) -> Result<Vec<f64>, SearchError> {
    if !node.visited {
        return Err(SearchError::UnvisitedNode);
    }
    Ok(visit_policy(node.edges.iter().map(|e| e.stats.n)))
}

fn visit_policy(counts: impl Iterator<Item = u32> + Clone) -> Vec<f64> {
    let (arity, total) = counts.clone().fold((0u64, 0u64), |(k, t), n| (k + 1, t + u64::from(n)));
    let denom = (arity + total) as f64;
    counts.map(|n| (1.0 + f64::from(n)) / denom).collect()
}

impl SearchTree {
    pub fn new(root: GameState, c: f64, policy: SelectionPolicy, seed: u64) -> Result<Self, SearchError> {
        Self::with_rng(root, c, policy, rng::seeded(seed))
    }

    pub fn with_rng(root: GameState, c: f64, policy: SelectionPolicy, rng: Rng) -> Result<Self, SearchError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(SearchError::InvalidExploration(c));
        }
        if let SelectionPolicy::Windowed(cfg) = policy {
            cfg.validate()?;
        }
        let mut tree = Self {
            nodes: Vec::new(),
            index: HashMap::new(),
            frontier: BTreeSet::new(),
            c,
            policy,
            rng,
            counters: SearchCounters::default(),
        };
        tree.insert(root, None);
        Ok(tree)
    }

    pub fn root_id(&self) -> NodeId {
        0
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lookup(&self, state: &GameState) -> Option<NodeId> {
        self.index.get(state).copied()
    }

    pub fn exploration(&self) -> f64 {
        self.c
    }

    pub fn policy(&self) -> SelectionPolicy {
        self.policy
    }

    pub fn counters(&self) -> SearchCounters {
        self.counters
    }

    /// Unexpanded, non-terminal nodes in discovery order.
    pub fn frontier(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.frontier.iter().copied()
    }

    fn insert(&mut self, state: GameState, parent: Option<(NodeId, usize)>) -> NodeId {
        if let Some(&id) = self.index.get(&state) {
            return id;
        }
        let id = self.nodes.len();
        let terminal = state.terminal_value();
        if terminal.is_none() {
            self.frontier.insert(id);
        }
        self.index.insert(state.clone(), id);
        self.nodes.push(TreeNode {
            state,
            terminal,
            edges: Vec::new(),
            visited: false,
            subtree_depth: 0,
            cached_action: None,
            frozen: false,
            parent,
        });
        id
    }

    /// Walks from the root to the first unvisited or terminal node.
    pub fn select_path(&mut self) -> Path {
        let mut steps = Vec::new();
        let mut id = self.root_id();
        loop {
            let node = &self.nodes[id];
            if !node.visited || node.terminal.is_some() {
                return Path { steps, leaf: id };
            }
            let edge = match self.policy {
                SelectionPolicy::Standard => pucb_argmax(&node.edges, self.c),
                SelectionPolicy::Windowed(cfg) => {
                    let a = window::select_action_windowed(node, self.c, &cfg, steps.len() as u32, &mut self.rng);
                    node.edge_index(a).expect("selected action has an edge")
                }
            };
            steps.push((id, edge));
            id = node.edges[edge].child;
        }
    }

    /// Path from the root to `id` along first-discovery parent edges.
    pub fn path_to(&self, id: NodeId) -> Path {
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some((parent, edge)) = self.nodes[cur].parent {
            steps.push((parent, edge));
            cur = parent;
        }
        steps.reverse();
        Path { steps, leaf: id }
    }

    /// Expands `leaf` with the evaluator's output and returns the leaf value
    /// from the leaf player's perspective. Terminal leaves return the exact
    /// outcome and are left unexpanded.
    pub fn expand(&mut self, leaf: NodeId, evaluator: &dyn Evaluator) -> Result<f64, SearchError> {
        let node = &self.nodes[leaf];
        if node.visited {
            return Err(SearchError::AlreadyExpanded(leaf));
        }
        if let Some(outcome) = node.terminal {
            return Ok(outcome.value_for(node.player()));
        }
        let eval = evaluator.evaluate(&node.state);
        self.expand_with(leaf, eval)
    }

    /// Like [`expand`](Self::expand) with a precomputed evaluation.
    pub fn expand_with(&mut self, leaf: NodeId, eval: Evaluation) -> Result<f64, SearchError> {
        let node = &self.nodes[leaf];
        if node.visited {
            return Err(SearchError::AlreadyExpanded(leaf));
        }
        if let Some(outcome) = node.terminal {
            return Ok(outcome.value_for(node.player()));
        }
        let actions = node.state.legal_actions().expect("non-terminal node");
        if eval.priors.len() != actions.len() {
            return Err(SearchError::PriorWidth { expected: actions.len(), got: eval.priors.len() });
        }
        let state = node.state.clone();
        let mut edges = Vec::with_capacity(actions.len());
        for (i, (&action, &p)) in actions.iter().zip(&eval.priors).enumerate() {
            let child = state.apply(action).expect("legal action");
            let child = self.insert(child, Some((leaf, i)));
            edges.push(Edge { action, child, stats: EdgeStats { n: 0, q: 0.0, p } });
        }
        let node = &mut self.nodes[leaf];
        node.edges = edges;
        node.visited = true;
        self.frontier.remove(&leaf);
        self.counters.evaluations += 1;
        Ok(eval.value)
    }

    /// Running-mean backup of `leaf_value` (leaf player's perspective) along
    /// every edge of the path, with the sign adjusted to each node's player.
    pub fn backup_standard(&mut self, path: &Path, leaf_value: f64) {
        let leaf_player = self.nodes[path.leaf].player();
        for &(id, edge) in path.steps.iter().rev() {
            let node = &mut self.nodes[id];
            let v = if node.player() == leaf_player { leaf_value } else { -leaf_value };
            node.edges[edge].stats.record(v);
        }
        self.record_writes(path.len() as u64);
    }

    fn record_writes(&mut self, writes: u64) {
        self.counters.edge_writes += writes;
        self.counters.max_writes_per_backup = self.counters.max_writes_per_backup.max(writes);
    }

    /// One select / expand / backup cycle.
    pub fn simulate(&mut self, evaluator: &dyn Evaluator) -> Result<Path, SearchError> {
        let path = self.select_path();
        let value = self.expand(path.leaf, evaluator)?;
        self.backup(&path, value);
        Ok(path)
    }

    /// Backs up with the tree's configured policy.
    pub fn backup(&mut self, path: &Path, leaf_value: f64) -> usize {
        self.counters.simulations += 1;
        match self.policy {
            SelectionPolicy::Standard => {
                self.backup_standard(path, leaf_value);
                path.len()
            }
            SelectionPolicy::Windowed(cfg) => {
                window::refresh_freezing(self, &cfg, path);
                window::backup_windowed(self, path, leaf_value, &cfg)
            }
        }
    }

    /// Runs `budget` simulations and returns the root's empirical policy.
    pub fn run_simulations(&mut self, budget: u32, evaluator: &dyn Evaluator) -> Result<Vec<f64>, SearchError> {
        if self.root().terminal.is_some() {
            return Err(SearchError::TerminalRoot);
        }
        for _ in 0..budget {
            self.simulate(evaluator)?;
        }
        self.root_policy()
    }

    pub fn root_policy(&self) -> Result<Vec<f64>, SearchError> {
        empirical_policy(self.root())
    }

    /// Root policy scattered into a vector of the game's full action width.
    pub fn root_policy_full(&self) -> Result<Vec<f64>, SearchError> {
        let pi = self.root_policy()?;
        let mut full = vec![0.0; self.root().state.game().action_space()];
        for (e, p) in self.root().edges.iter().zip(pi) {
            full[e.action.index()] = p;
        }
        Ok(full)
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        &mut self.nodes[id]
    }

    pub(crate) fn count_writes(&mut self, writes: u64) {
        self.record_writes(writes);
    }
}

/// Samples an index proportionally to `weights`.
pub fn sample_index(weights: &[f64], rng: &mut Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// First index of the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameId, NimState};

    fn edges(stats: &[(u32, f64, f64)]) -> Vec<Edge> {
        stats
            .iter()
            .enumerate()
            .map(|(i, &(n, q, p))| Edge { action: Action(i), child: 0, stats: EdgeStats { n, q, p } })
            .collect()
    }

    // Independent evaluation of the selection score for the worked examples.
    fn score(n: &[u32], q: &[f64], p: &[f64], c: f64, a: usize) -> f64 {
        let total: f64 = n.iter().map(|&x| x as f64).sum();
        q[a] + c * p[a] * total.sqrt() / (n[a] as f64 + 1.0)
    }

    #[test]
    fn pucb_worked_examples() {
        assert_eq!(pucb_argmax(&edges(&[(3, 0.2, 1.0)]), 1.0), 0);

        // all counts zero: every score is Q = 0, the tie goes to action 0
        let (n, q, p) = ([0, 0], [0.0, 0.0], [0.8, 0.2]);
        assert_eq!(score(&n, &q, &p, 1.0, 0), 0.0);
        assert_eq!(score(&n, &q, &p, 1.0, 1), 0.0);
        assert_eq!(pucb_argmax(&edges(&[(0, 0.0, 0.8), (0, 0.0, 0.2)]), 1.0), 0);

        let (n, q, p) = ([5, 1], [0.1, 0.5], [0.5, 0.5]);
        let s0 = score(&n, &q, &p, 1.0, 0);
        let s1 = score(&n, &q, &p, 1.0, 1);
        assert!((s0 - 0.304).abs() < 1e-3 && (s1 - 1.112).abs() < 1e-3);
        assert_eq!(pucb_argmax(&edges(&[(5, 0.1, 0.5), (1, 0.5, 0.5)]), 1.0), 1);
    }

    #[test]
    fn empirical_policy_examples() {
        let node = |counts: &[u32]| TreeNode {
            state: GameId::nim(3, 20).initial_state().unwrap(),
            terminal: None,
            edges: edges(&counts.iter().map(|&n| (n, 0.0, 0.0)).collect::<Vec<_>>()),
            visited: true,
            subtree_depth: 0,
            cached_action: None,
            frozen: false,
            parent: None,
        };
        assert_eq!(empirical_policy(&node(&[0, 0, 0])).unwrap(), vec![1.0 / 3.0; 3]);
        assert_eq!(empirical_policy(&node(&[3, 1, 0])).unwrap(), vec![4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
        assert_eq!(empirical_policy(&node(&[10])).unwrap(), vec![1.0]);
        let mut unvisited = node(&[]);
        unvisited.visited = false;
        assert!(empirical_policy(&unvisited).is_err());
    }

    #[test]
    fn expand_terminal_leaf_returns_exact_outcome() {
        let s = GameState::Nim(NimState::at(3, 20, 0, Player::P1));
        let mut t = SearchTree::new(s, 1.0, SelectionPolicy::Standard, 0).unwrap();
        // P0 took the last stone; P1 is to move and has lost.
        assert_eq!(t.expand(0, &UniformEvaluator).unwrap(), -1.0);
        assert!(!t.root().visited);
        assert!(t.root().edges.is_empty());
    }

    #[test]
    fn expand_initialises_edges() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let mut t = SearchTree::new(s, 1.0, SelectionPolicy::Standard, 0).unwrap();
        assert_eq!(t.expand(0, &UniformEvaluator).unwrap(), 0.0);
        let root = t.root();
        assert!(root.visited);
        assert_eq!(root.edges.len(), 3);
        for e in &root.edges {
            assert_eq!(e.stats, EdgeStats { n: 0, q: 0.0, p: 1.0 / 3.0 });
        }
        assert_eq!(t.expand(0, &UniformEvaluator), Err(SearchError::AlreadyExpanded(0)));
    }

    #[test]
    fn backup_running_mean() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let mut t = SearchTree::new(s, 1.0, SelectionPolicy::Standard, 0).unwrap();
        t.expand(0, &UniformEvaluator).unwrap();
        let path = Path { steps: vec![(0, 0)], leaf: t.root().edges[0].child };
        // The leaf player (P1) scores -1, so P0's edge earns +1.
        t.backup_standard(&path, -1.0);
        assert_eq!(t.root().edges[0].stats.n, 1);
        assert_eq!(t.root().edges[0].stats.q, 1.0);
        t.backup_standard(&path, 1.0);
        assert_eq!(t.root().edges[0].stats.n, 2);
        assert_eq!(t.root().edges[0].stats.q, 0.0);
    }

    #[test]
    fn two_level_backup_alternates_sign() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let mut t = SearchTree::new(s, 1.0, SelectionPolicy::Standard, 0).unwrap();
        t.expand(0, &UniformEvaluator).unwrap();
        let mid = t.root().edges[0].child;
        t.expand(mid, &UniformEvaluator).unwrap();
        let leaf = t.node(mid).edges[0].child;
        let path = Path { steps: vec![(0, 0), (mid, 0)], leaf };
        // Leaf value -1 for the leaf player (P0) means +1 for the player who
        // moved into the leaf, and -1 again one level up.
        t.backup_standard(&path, -1.0);
        assert_eq!(t.node(mid).edges[0].stats.q, 1.0);
        assert_eq!(t.root().edges[0].stats.q, -1.0);
    }

    #[test]
    fn first_simulation_only_expands_root() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        let mut t = SearchTree::new(s, 1.25, SelectionPolicy::Standard, 0).unwrap();
        let pi = t.run_simulations(1, &UniformEvaluator).unwrap();
        assert_eq!(pi, vec![1.0 / 3.0; 3]);
        assert!(t.root().edges.iter().all(|e| e.stats.n == 0));
    }

    #[test]
    fn rejects_bad_exploration_constant() {
        let s = GameId::nim(3, 20).initial_state().unwrap();
        assert!(SearchTree::new(s.clone(), 0.0, SelectionPolicy::Standard, 0).is_err());
        assert!(SearchTree::new(s, f64::NAN, SelectionPolicy::Standard, 0).is_err());
    }

    #[test]
    fn terminal_root_is_an_error() {
        let s = GameState::Nim(NimState::at(3, 20, 0, Player::P1));
        let mut t = SearchTree::new(s, 1.0, SelectionPolicy::Standard, 0).unwrap();
        assert_eq!(t.run_simulations(3, &UniformEvaluator), Err(SearchError::TerminalRoot));
    }

    #[test]
    fn sample_and_argmax() {
        let mut rng = rng::seeded(1);
        assert_eq!(sample_index(&[0.0, 1.0, 0.0], &mut rng), 1);
        assert_eq!(argmax(&[0.2, 0.5, 0.5]), 1);
    }
}
