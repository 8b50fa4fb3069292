//! JSON checkpoints. Floats are written in shortest round-trip form and read
//! back exactly, so a reload reproduces every parameter bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{NetError, NetShape, PolicyValueNet};
use crate::game::GameId;

/// Version written by this build. Version 1 lacked `rng_seed`.
pub const CHECKPOINT_FORMAT_VERSION: u32 = 2;

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    name: String,
    shape: [usize; 2],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format_version: u32,
    game: GameId,
    shape: NetShape,
    tensors: Vec<TensorRecord>,
    #[serde(default)]
    rng_seed: Option<u64>,
}

pub fn save_checkpoint(path: &Path, net: &PolicyValueNet, game: &GameId) -> Result<(), NetError> {
    if net.params().iter().any(|p| !p.is_finite()) {
        return Err(NetError::NonFinite("parameters".into()));
    }
    let tensors = net
        .tensors()
        .into_iter()
        .map(|t| TensorRecord { shape: [t.rows, t.cols], data: net.params()[t.range()].to_vec(), name: t.name })
        .collect();
    let file = CheckpointFile {
        format_version: CHECKPOINT_FORMAT_VERSION,
        game: *game,
        shape: net.shape().clone(),
        tensors,
        rng_seed: Some(net.seed()),
    };
    let json = serde_json::to_string(&file).map_err(|e| NetError::Corrupt(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(PolicyValueNet, GameId), NetError> {
    let text = fs::read_to_string(path)?;
    let header: serde_json::Value = serde_json::from_str(&text).map_err(|e| NetError::Corrupt(e.to_string()))?;
    let found = header
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| NetError::Corrupt("missing format_version".into()))?;
    if !(1..=CHECKPOINT_FORMAT_VERSION as u64).contains(&found) {
        return Err(NetError::VersionMismatch {
            found: u32::try_from(found).unwrap_or(u32::MAX),
            supported: CHECKPOINT_FORMAT_VERSION,
        });
    }
    let file: CheckpointFile = serde_json::from_value(header).map_err(|e| NetError::Corrupt(e.to_string()))?;
    let template = PolicyValueNet::zeros(file.shape.clone())?;
    let specs = template.tensors();
    if specs.len() != file.tensors.len() {
        return Err(NetError::Corrupt(format!("expected {} tensors, found {}", specs.len(), file.tensors.len())));
    }
    let mut params = Vec::with_capacity(template.num_params());
    for (spec, rec) in specs.iter().zip(&file.tensors) {
        if spec.name != rec.name || [spec.rows, spec.cols] != rec.shape || rec.data.len() != spec.len() {
            return Err(NetError::Corrupt(format!("tensor {} does not match the declared shape", rec.name)));
        }
        params.extend_from_slice(&rec.data);
    }
    let net = PolicyValueNet::from_parts(file.shape, params, file.rng_seed.unwrap_or(0))?;
    Ok((net, file.game))
}
