//! Run configuration file.
//!
//! A TOML document whose top-level keys are the trainer settings, plus an
//! optional `[eval]` table and the `stop_at_convergence` switch. Missing keys
//! take their defaults. Two shorthands are accepted: `game = "nim"` selects a
//! game at its default size, and `window.tau = "auto"` sizes the backup
//! window from the game.

use std::path::Path;

use dualmcts::eval::EvalConfig;
use dualmcts::game::GameId;
use dualmcts::training::{Algorithm, TrainerConfig};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub trainer: TrainerConfig,
    pub eval: EvalConfig,
    /// End the run at the first converged step instead of running all
    /// `max_iterations` steps.
    pub stop_at_convergence: bool,
}

/// Command-line values that replace file values when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<Algorithm>,
    pub game: Option<String>,
    pub seed: Option<u64>,
    pub max_steps: Option<u64>,
    pub b_sub: Option<u32>,
    pub b_full: Option<u32>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let mut table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        let eval = match table.remove("eval") {
            Some(v) => v.try_into().map_err(|e: toml::de::Error| CliError::Config(format!("[eval]: {e}")))?,
            None => EvalConfig::default(),
        };
        let stop_at_convergence = match table.remove("stop_at_convergence") {
            Some(Value::Boolean(b)) => b,
            Some(other) => return Err(CliError::Config(format!("stop_at_convergence must be a boolean, got {other}"))),
            None => false,
        };
        if let Some(Value::String(name)) = table.get("game") {
            let game = named_game(name)?;
            table.insert("game".into(), Value::try_from(game).expect("game serialises"));
        }
        if let Some(Value::Table(w)) = table.get_mut("window") {
            if w.get("tau").and_then(Value::as_str) == Some("auto") {
                w.remove("tau");
            }
        }
        let trainer = Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Ok(Self { trainer, eval, stop_at_convergence })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The same settings as a TOML document that [`RunConfig::from_toml`]
    /// reads back unchanged.
    pub fn to_toml(&self) -> String {
        let mut table = match Value::try_from(&self.trainer).expect("trainer config serialises") {
            Value::Table(t) => t,
            _ => unreachable!("structs serialise to tables"),
        };
        table.insert("stop_at_convergence".into(), Value::Boolean(self.stop_at_convergence));
        table.insert("eval".into(), Value::try_from(&self.eval).expect("eval config serialises"));
        toml::to_string(&table).expect("table serialises")
    }

    /// Flags win over file values. A `game` flag naming the configured game
    /// keeps its parameters; another name switches to that game's default size.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        let t = &mut self.trainer;
        if let Some(a) = o.algorithm {
            t.algorithm = a;
        }
        if let Some(name) = &o.game {
            if t.game.name() != name {
                t.game = named_game(name)?;
            }
        }
        if let Some(s) = o.seed {
            t.seed = s;
        }
        if let Some(n) = o.max_steps {
            t.max_iterations = n;
        }
        if let Some(b) = o.b_sub {
            t.budget.b_sub = b;
        }
        if let Some(b) = o.b_full {
            t.budget.b_full = b;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.trainer.validate()?;
        self.eval.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.trainer.max_iterations == 0 {
            return Err(CliError::Config("max_iterations must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.eval.threshold) {
            return Err(CliError::Config(format!("eval.threshold {} outside [0, 1]", self.eval.threshold)));
        }
        Ok(())
    }

    /// File (if any), then flags, then validation.
    pub fn resolve(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply(o)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn named_game(name: &str) -> Result<GameId, CliError> {
    GameId::default_for(name).ok_or_else(|| CliError::Config(format!("unknown game {name:?} (nim, hsr, connect4)")))
}
