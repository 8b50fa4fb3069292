//! Step-by-step convergence tracking against a growing pool of checkpoints.
//!
//! The pool starts with a uniformly random agent. Each evaluated agent plays
//! every pool member once, is scored by α-rank over the whole pool, and then
//! joins the pool. Results between earlier members are kept, so each step
//! only plays the new agent's matches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    alpha_rank, alpha_rank_sweep, alpha_rank_two_population, elo_update, run_match_from_openings, Agent, EvalError,
    PolicyAgent, RandomAgent, RatingTable, SearchAgent, DEFAULT_ALPHA_SWEEP, DEFAULT_K, DEFAULT_POPULATION,
    INITIAL_RATING,
};
use crate::game::{GameId, Player};
use crate::rng;
use crate::training::{Budget, Model, SearchSettings};

/// α-rank mass at which a run counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.9;

/// How a checkpoint acts in evaluation matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    /// Argmax of the algorithm's own search policy.
    Search,
    /// Argmax of the network policy, no search.
    Policy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Games per match (even).
    pub games: usize,
    /// Random moves played before each pair of games.
    pub opening_plies: u32,
    pub agent: AgentKind,
    pub alphas: Vec<f64>,
    pub population: u32,
    pub k_factor: f64,
    pub threshold: f64,
    pub parallel: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            games: 20,
            opening_plies: 2,
            agent: AgentKind::Search,
            alphas: DEFAULT_ALPHA_SWEEP.to_vec(),
            population: DEFAULT_POPULATION,
            k_factor: DEFAULT_K,
            threshold: CONVERGENCE_THRESHOLD,
            parallel: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.games < 2 || !self.games.is_multiple_of(2) {
            return Err(EvalError::OddGames(self.games));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(EvalError::InvalidConfig(format!("selection intensities {:?}", self.alphas)));
        }
        if self.population < 2 {
            return Err(EvalError::InvalidConfig(format!("population size {} below 2", self.population)));
        }
        Ok(())
    }

    /// Wraps a trained model as an evaluation agent.
    pub fn agent_for(&self, model: &Model, budget: Budget, settings: &SearchSettings) -> Box<dyn Agent> {
        match self.agent {
            AgentKind::Search => Box::new(SearchAgent { model: model.clone(), budget, settings: *settings }),
            AgentKind::Policy => {
                let (net, tap) = model.policy_net();
                Box::new(PolicyAgent { net: net.clone(), tap })
            }
        }
    }
}

/// Outcome of evaluating one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEvaluation {
    pub name: String,
    /// α-rank mass of the new agent.
    pub alpha_rank: f64,
    /// Selection intensity the score was computed at.
    pub alpha: f64,
    pub elo: f64,
    pub converged: bool,
}

/// Games with a proponent and an opponent rank agents per role.
fn two_populations(game: &GameId) -> bool {
    matches!(game, GameId::Hsr { .. })
}

pub struct ConvergenceTracker {
    game: GameId,
    cfg: EvalConfig,
    seed: u64,
    names: Vec<String>,
    agents: Vec<Box<dyn Agent>>,
    /// `first[i][j]`: mean score of `i` moving first against `j`.
    first: Vec<Vec<f64>>,
    ratings: RatingTable,
}

impl ConvergenceTracker {
    /// Tracker whose pool holds the random anchor.
    pub fn new(game: GameId, cfg: EvalConfig, seed: u64) -> Result<Self, EvalError> {
        let mut t = Self::empty(game, cfg, seed)?;
        t.join("random", Box::new(RandomAgent))?;
        Ok(t)
    }

    /// Tracker with an empty pool.
    pub fn empty(game: GameId, cfg: EvalConfig, seed: u64) -> Result<Self, EvalError> {
        cfg.validate()?;
        Ok(Self {
            game,
            cfg,
            seed,
            names: Vec::new(),
            agents: Vec::new(),
            first: Vec::new(),
            ratings: RatingTable::new(),
        })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn pool(&self) -> &[String] {
        &self.names
    }

    pub fn ratings(&self) -> &RatingTable {
        &self.ratings
    }

    /// Adds an agent to the pool without scoring it.
    pub fn join(&mut self, name: &str, agent: Box<dyn Agent>) -> Result<(), EvalError> {
        self.play_in(name, agent)?;
        Ok(())
    }

    /// Scores `agent` against the current pool, then adds it to the pool.
    pub fn evaluate(&mut self, name: &str, agent: Box<dyn Agent>) -> Result<StepEvaluation, EvalError> {
        if self.agents.is_empty() {
            return Err(EvalError::EmptyPool);
        }
        let c = self.play_in(name, agent)?;
        let k = self.names.len();
        let cfg = &self.cfg;
        let (alpha, alpha_rank) = if two_populations(&self.game) {
            let row = self.first.clone();
            let col: Vec<Vec<f64>> = row.iter().map(|r| r.iter().map(|s| 1.0 - s).collect()).collect();
            let r = alpha_rank_sweep(&cfg.alphas, cfg.population, |a| alpha_rank_two_population(&row, &col, a))?;
            (r.config.alpha, (r.marginals[0][c] + r.marginals[1][c]) / 2.0)
        } else {
            let m: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| if i == j { 0.5 } else { (self.first[i][j] + 1.0 - self.first[j][i]) / 2.0 })
                        .collect()
                })
                .collect();
            let r = alpha_rank_sweep(&cfg.alphas, cfg.population, |a| alpha_rank(&m, a))?;
            (r.config.alpha, r.stationary[c])
        };
        Ok(StepEvaluation {
            name: name.to_string(),
            alpha_rank,
            alpha,
            elo: self.ratings.rating(name).expect("registered"),
            converged: alpha_rank >= cfg.threshold,
        })
    }

    /// Plays the newcomer against every member (and itself), records the
    /// role scores and Elo updates, and appends it. Returns its index.
    fn play_in(&mut self, name: &str, agent: Box<dyn Agent>) -> Result<usize, EvalError> {
        let c = self.names.len();
        let start = self.ratings.entries().last().map_or(INITIAL_RATING, |e| e.rating);
        self.ratings.register(name, start);
        let game = self.game;
        let games = self.cfg.games;
        let plies = self.cfg.opening_plies;
        let seed = self.seed;
        let newcomer: &dyn Agent = agent.as_ref();
        let opponents: Vec<(usize, &str, &dyn Agent)> = self
            .names
            .iter()
            .zip(&self.agents)
            .enumerate()
            .map(|(j, (n, a))| (j, n.as_str(), a.as_ref()))
            .chain(std::iter::once((c, name, newcomer)))
            .collect();
        let play = |&(j, other, opp): &(usize, &str, &dyn Agent)| {
            let mut r = rng::stream(seed, rng::purpose::EVAL, ((c as u64) << 32) | j as u64);
            run_match_from_openings((name, newcomer), (other, opp), &game, games, plies, &mut r)
        };
        let results: Vec<_> = if self.cfg.parallel {
            opponents.par_iter().map(play).collect::<Result<_, _>>()?
        } else {
            opponents.iter().map(play).collect::<Result<_, _>>()?
        };

        for row in &mut self.first {
            row.push(0.5);
        }
        self.first.push(vec![0.5; c + 1]);
        for (res, &(j, ..)) in results.iter().zip(&opponents) {
            let as_first = res.score_a_as(Player::P0).expect("both roles played");
            let as_second = res.score_a_as(Player::P1).expect("both roles played");
            if j == c {
                // self-play: the same agent in both seats
                self.first[c][c] = (as_first + 1.0 - as_second) / 2.0;
            } else {
                self.first[c][j] = as_first;
                self.first[j][c] = 1.0 - as_second;
                elo_update(&mut self.ratings, res, self.cfg.k_factor)?;
            }
        }
        self.names.push(name.to_string());
        self.agents.push(agent);
        Ok(c)
    }
}
