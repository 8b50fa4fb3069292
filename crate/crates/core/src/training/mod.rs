//! Self-play training for AlphaZero, MPV-MCTS and Dual MCTS.

mod search;

use std::collections::VecDeque;
use std::fmt;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Action, GameError, GameId, GameState};
use crate::mcts::window::{default_tau, DEFAULT_KAPPA};
use crate::mcts::{argmax, sample_index, SearchError, WindowConfig, DEFAULT_C_PUCT};
use crate::net::{train_step, LossConfig, NetError, NetShape, PolicyValueNet, Sgd, Tap, TrainSample, DEFAULT_HIDDEN};
use crate::rng::{self, Rng};

pub use search::{
    alphazero_move, dual_mcts_move, mix, mpv_move, single_tree_search, two_tree_search, Budget, MixWeights, MoveSearch,
    MoveStats, SearchSettings,
};

/// A replay-buffer entry.
pub type TrajectorySample = TrainSample;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Net(#[from] NetError),
}

impl TrainError {
    /// True when training produced NaN or infinite values.
    pub fn is_non_finite(&self) -> bool {
        matches!(self, TrainError::Net(NetError::NonFinite(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    AlphaZero,
    Mpv,
    Dual,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::AlphaZero, Algorithm::Mpv, Algorithm::Dual];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "alphazero" => Some(Algorithm::AlphaZero),
            "mpv" => Some(Algorithm::Mpv),
            "dual" => Some(Algorithm::Dual),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AlphaZero => "alphazero",
            Algorithm::Mpv => "mpv",
            Algorithm::Dual => "dual",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// Always `b_sub` / `b_full`.
    Fixed,
    /// `b_full ~ U[1, n_max]`, `b_sub = round(gamma * b_full)`.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub mode: BudgetMode,
    pub b_sub: u32,
    pub b_full: u32,
    pub gamma: f64,
    pub n_max: u32,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { mode: BudgetMode::Fixed, b_sub: 50, b_full: 35, gamma: 1.4, n_max: 50 }
    }
}

impl BudgetConfig {
    pub fn fixed(&self) -> Budget {
        Budget { b_sub: self.b_sub, b_full: self.b_full }
    }
}

/// Draws the per-move budget.
pub fn sample_budget(cfg: &BudgetConfig, rng: &mut Rng) -> Budget {
    match cfg.mode {
        BudgetMode::Fixed => cfg.fixed(),
        BudgetMode::Sampled => {
            let b_full = rng.random_range(1..=cfg.n_max.max(1));
            let b_sub = ((cfg.gamma * f64::from(b_full)).round() as u32).max(b_full);
            Budget { b_sub, b_full }
        }
    }
}

/// Window settings as configured; `tau = None` sizes the window from the
/// game's state-space estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSettings {
    pub tau: Option<u32>,
    pub kappa: f64,
    pub epsilon0: f64,
    pub nu: f64,
}

impl Default for WindowSettings {
    fn default() -> Self {
        let w = WindowConfig::default();
        Self { tau: None, kappa: DEFAULT_KAPPA, epsilon0: w.epsilon0, nu: w.nu }
    }
}

impl WindowSettings {
    pub fn resolve(&self, game: &GameId) -> WindowConfig {
        WindowConfig {
            tau: self.tau.unwrap_or_else(|| default_tau(game, self.kappa)),
            epsilon0: self.epsilon0,
            nu: self.nu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub algorithm: Algorithm,
    pub game: GameId,
    pub budget: BudgetConfig,
    pub c_puct: f64,
    pub window: WindowSettings,
    pub mix: MixWeights,
    pub hidden: usize,
    pub lr: f64,
    pub momentum: f64,
    pub batch: usize,
    pub l2: f64,
    pub w_sub: f64,
    pub w_full: f64,
    pub buffer: usize,
    pub self_plays: usize,
    pub train_steps: usize,
    /// Plies at the start of each self-play game whose move is sampled from
    /// the search policy; later moves take its argmax.
    pub sample_plies: u32,
    pub seed: u64,
    pub max_iterations: u64,
    /// Run the episodes of an iteration on a thread pool. Results do not
    /// depend on this flag.
    pub parallel: bool,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Dual,
            game: GameId::nim(3, 20),
            budget: BudgetConfig::default(),
            c_puct: DEFAULT_C_PUCT,
            window: WindowSettings::default(),
            mix: MixWeights::default(),
            hidden: DEFAULT_HIDDEN,
            lr: 0.01,
            momentum: 0.0,
            batch: 32,
            l2: 1e-4,
            w_sub: 1.0,
            w_full: 1.0,
            buffer: 50_000,
            self_plays: 20,
            train_steps: 64,
            sample_plies: 6,
            seed: 0,
            max_iterations: 30,
            parallel: false,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: String| Err(TrainError::Config(msg));
        self.game.validate()?;
        let b = &self.budget;
        if !(1.0..=1.5).contains(&b.gamma) {
            return bad(format!("budget.gamma {} outside [1, 1.5]", b.gamma));
        }
        if b.b_full == 0 || b.b_sub < b.b_full {
            return bad(format!("budget needs b_sub >= b_full >= 1, got {}/{}", b.b_sub, b.b_full));
        }
        if b.mode == BudgetMode::Sampled && b.n_max == 0 {
            return bad("budget.n_max must be positive".into());
        }
        if !(self.c_puct.is_finite() && self.c_puct > 0.0) {
            return bad(format!("c_puct {} must be positive", self.c_puct));
        }
        self.window.resolve(&self.game).validate().map_err(|e| TrainError::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.mix.alpha) || !(0.0..=1.0).contains(&self.mix.beta) {
            return bad(format!("mix weights {:?} outside [0, 1]", self.mix));
        }
        if self.hidden == 0 || self.batch == 0 || self.buffer == 0 {
            return bad("hidden, batch and buffer must be positive".into());
        }
        let nonneg = [
            ("lr", self.lr),
            ("momentum", self.momentum),
            ("l2", self.l2),
            ("w_sub", self.w_sub),
            ("w_full", self.w_full),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} {v} must be finite and non-negative"));
            }
        }
        if self.momentum >= 1.0 {
            return bad(format!("momentum {} must be below 1", self.momentum));
        }
        Ok(())
    }

    pub fn search_settings(&self) -> SearchSettings {
        SearchSettings { c_puct: self.c_puct, window: self.window.resolve(&self.game), mix: self.mix }
    }

    pub fn loss(&self) -> LossConfig {
        LossConfig { w_sub: self.w_sub, w_full: self.w_full, l2: self.l2 }
    }
}

/// The trainable networks of one algorithm.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)] // a handful of models per run
pub enum Model {
    /// Four layers, full head only.
    AlphaZero(PolicyValueNet),
    /// Two-layer small network and four-layer large network.
    Mpv { small: PolicyValueNet, large: PolicyValueNet },
    /// Four layers with sub and full heads.
    Dual(PolicyValueNet),
}

impl Model {
    pub fn new(algorithm: Algorithm, game: &GameId, hidden: usize, seed: u64) -> Result<Self, NetError> {
        Ok(match algorithm {
            Algorithm::AlphaZero => {
                Model::AlphaZero(PolicyValueNet::new(NetShape::for_game(game, hidden, &[Tap::Full]), seed)?)
            }
            Algorithm::Mpv => Model::Mpv {
                small: PolicyValueNet::new_indexed(NetShape::for_game(game, hidden, &[Tap::Sub]), seed, 0)?,
                large: PolicyValueNet::new_indexed(NetShape::for_game(game, hidden, &[Tap::Full]), seed, 1)?,
            },
            Algorithm::Dual => {
                Model::Dual(PolicyValueNet::new(NetShape::for_game(game, hidden, &[Tap::Sub, Tap::Full]), seed)?)
            }
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Model::AlphaZero(_) => Algorithm::AlphaZero,
            Model::Mpv { .. } => Algorithm::Mpv,
            Model::Dual(_) => Algorithm::Dual,
        }
    }

    /// Networks in a fixed order (MPV: small, then large).
    pub fn nets(&self) -> Vec<&PolicyValueNet> {
        match self {
            Model::AlphaZero(n) | Model::Dual(n) => vec![n],
            Model::Mpv { small, large } => vec![small, large],
        }
    }

    fn nets_mut(&mut self) -> Vec<&mut PolicyValueNet> {
        match self {
            Model::AlphaZero(n) | Model::Dual(n) => vec![n],
            Model::Mpv { small, large } => vec![small, large],
        }
    }

    /// The network whose policy stands in for the whole agent when acting
    /// without search.
    pub fn policy_net(&self) -> (&PolicyValueNet, Tap) {
        match self {
            Model::AlphaZero(n) | Model::Dual(n) => (n, Tap::Full),
            Model::Mpv { large, .. } => (large, Tap::Full),
        }
    }

    /// Searches `state` with this model's algorithm.
    pub fn search(
        &self,
        state: &GameState,
        budget: Budget,
        settings: &SearchSettings,
        rng: &mut Rng,
    ) -> Result<MoveSearch, SearchError> {
        match self {
            Model::AlphaZero(n) => alphazero_move(state, n, budget, settings, rng),
            Model::Mpv { small, large } => mpv_move(state, small, large, budget, settings, rng),
            Model::Dual(n) => dual_mcts_move(state, n, budget, settings, rng),
        }
    }
}

/// Bounded FIFO store of training samples with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<TrajectorySample>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, items: VecDeque::with_capacity(capacity.min(1 << 16)) }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, sample: TrajectorySample) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(sample);
    }

    pub fn iter(&self) -> impl Iterator<Item = &TrajectorySample> {
        self.items.iter()
    }

    /// `n` samples drawn uniformly with replacement.
    pub fn sample(&self, n: usize, rng: &mut Rng) -> Vec<TrajectorySample> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..n).map(|_| self.items[rng.random_range(0..self.items.len())].clone()).collect()
    }
}

/// Picks the move to play from a search policy: proportional sampling for
/// the first `sample_plies` plies, argmax afterwards.
pub fn choose_action(state: &GameState, policy: &[f64], sample_plies: u32, rng: &mut Rng) -> Action {
    let legal = state.legal_actions().expect("non-terminal state");
    let weights: Vec<f64> = legal.iter().map(|a| policy[a.index()]).collect();
    let i = if state.move_count() < sample_plies { sample_index(&weights, rng) } else { argmax(&weights) };
    legal[i]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub samples: Vec<TrajectorySample>,
    pub final_state: GameState,
    pub stats: MoveStats,
}

/// Plays one game of self-play and labels every position with the final
/// outcome from its mover's point of view.
pub fn self_play_episode(
    model: &Model,
    game: &GameId,
    budget_cfg: &BudgetConfig,
    settings: &SearchSettings,
    sample_plies: u32,
    rng: &mut Rng,
) -> Result<Episode, TrainError> {
    let mut state = game.initial_state()?;
    let mut positions = Vec::new();
    let mut stats = MoveStats::default();
    while !state.is_terminal() {
        let budget = sample_budget(budget_cfg, rng);
        let found = model.search(&state, budget, settings, rng)?;
        stats += found.stats;
        let action = choose_action(&state, &found.policy, sample_plies, rng);
        let next = state.apply(action)?;
        positions.push((state, found.policy));
        state = next;
    }
    let outcome = state.terminal_value().expect("terminal");
    let samples = positions
        .into_iter()
        .map(|(s, policy)| TrainSample {
            input: s.encode(),
            mask: s.legal_mask(),
            policy,
            outcome: outcome.value_for(s.player_to_move()),
        })
        .collect();
    Ok(Episode { samples, final_state: state, stats })
}

/// Accounting for one training iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: u64,
    /// Wall-clock seconds for self-play plus training.
    pub time_step_s: f64,
    pub self_play_s: f64,
    pub train_s: f64,
    pub episodes: usize,
    pub samples_added: usize,
    pub moves: u64,
    pub search: MoveStats,
    /// Mean pre-step loss over the iteration's gradient steps.
    pub mean_loss: Option<f64>,
    pub buffer_len: usize,
}

impl IterationReport {
    /// Average simulations per searched move.
    pub fn sims_per_move(&self) -> f64 {
        if self.moves == 0 {
            0.0
        } else {
            self.search.simulations() as f64 / self.moves as f64
        }
    }
}

/// Owns the model, optimiser state and replay buffer of one run.
#[derive(Debug, Clone)]
pub struct Trainer {
    cfg: TrainerConfig,
    settings: SearchSettings,
    model: Model,
    optimisers: Vec<Sgd>,
    buffer: ReplayBuffer,
    iteration: u64,
}

impl Trainer {
    pub fn new(cfg: TrainerConfig) -> Result<Self, TrainError> {
        cfg.validate()?;
        let model = Model::new(cfg.algorithm, &cfg.game, cfg.hidden, cfg.seed)?;
        Ok(Self::with_model(cfg, model))
    }

    fn with_model(cfg: TrainerConfig, model: Model) -> Self {
        let optimisers = model.nets().iter().map(|_| Sgd::new(cfg.momentum)).collect();
        Self {
            settings: cfg.search_settings(),
            buffer: ReplayBuffer::new(cfg.buffer),
            model,
            optimisers,
            iteration: 0,
            cfg,
        }
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.cfg
    }

    pub fn settings(&self) -> &SearchSettings {
        &self.settings
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    /// Completed iterations.
    pub fn iterations(&self) -> u64 {
        self.iteration
    }

    /// Self-play followed by gradient steps on the replay buffer.
    pub fn training_iteration(&mut self) -> Result<IterationReport, TrainError> {
        let started = Instant::now();
        let index = self.iteration;
        let run = |e: usize| {
            let mut r = rng::stream(self.cfg.seed, rng::purpose::SELF_PLAY, (index << 24) | e as u64);
            self_play_episode(
                &self.model,
                &self.cfg.game,
                &self.cfg.budget,
                &self.settings,
                self.cfg.sample_plies,
                &mut r,
            )
        };
        let episodes: Vec<Episode> = if self.cfg.parallel {
            (0..self.cfg.self_plays).into_par_iter().map(run).collect::<Result<_, _>>()?
        } else {
            (0..self.cfg.self_plays).map(run).collect::<Result<_, _>>()?
        };
        let self_play_s = started.elapsed().as_secs_f64();

        let mut search = MoveStats::default();
        let mut moves = 0;
        let mut samples_added = 0;
        for ep in episodes {
            search += ep.stats;
            moves += ep.samples.len() as u64;
            samples_added += ep.samples.len();
            for s in ep.samples {
                self.buffer.push(s);
            }
        }

        let train_started = Instant::now();
        let mut rng = rng::stream(self.cfg.seed, rng::purpose::TRAIN, index);
        let loss_cfg = self.cfg.loss();
        let mut losses = Vec::new();
        if !self.buffer.is_empty() {
            for _ in 0..self.cfg.train_steps {
                let batch = self.buffer.sample(self.cfg.batch, &mut rng);
                let mut step_loss = 0.0;
                for (net, opt) in self.model.nets_mut().into_iter().zip(&mut self.optimisers) {
                    step_loss += train_step(net, &batch, opt, self.cfg.lr, &loss_cfg)?;
                }
                losses.push(step_loss);
            }
        }
        let train_s = train_started.elapsed().as_secs_f64();
        self.iteration += 1;
        Ok(IterationReport {
            iteration: self.iteration,
            time_step_s: started.elapsed().as_secs_f64(),
            self_play_s,
            train_s,
            episodes: self.cfg.self_plays,
            samples_added,
            moves,
            search,
            mean_loss: (!losses.is_empty()).then(|| losses.iter().sum::<f64>() / losses.len() as f64),
            buffer_len: self.buffer.len(),
        })
    }
}
