use std::path::Path;

use model::{Model, ModelConfig};
use serde::{Deserialize, Serialize};
use tensor_core::Rng;

use crate::error::TrainError;

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"IEDK";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Epoch bookkeeping stored next to the weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointMeta {
    pub epoch: usize,
    pub dev_eer: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    /// Byte offset into the blob that follows the JSON index.
    offset: u64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointIndex {
    config: ModelConfig,
    epoch: usize,
    dev_eer: f64,
    tensors: Vec<TensorEntry>,
}

fn io_err(path: &Path, source: std::io::Error) -> TrainError {
    TrainError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// File layout: 4-byte magic, u32 LE format version, u32 LE index
/// length, UTF-8 JSON index, then one raw little-endian f32 blob per
/// tensor in index order. Writing the same model twice gives identical
/// bytes.
pub fn save_checkpoint(
    model: &Model<f32>,
    meta: CheckpointMeta,
    path: &Path,
) -> Result<(), TrainError> {
    let mut tensors = Vec::with_capacity(model.params.len());
    let mut offset = 0u64;
    for (name, t) in model.params.iter() {
        tensors.push(TensorEntry {
            name: name.to_string(),
            shape: t.shape.clone(),
            offset,
        });
        offset += 4 * t.data.len() as u64;
    }
    let index = CheckpointIndex {
        config: model.cfg.clone(),
        epoch: meta.epoch,
        dev_eer: meta.dev_eer,
        tensors,
    };
    let json = serde_json::to_vec(&index).map_err(|e| TrainError::Checkpoint {
        detail: format!("index serialization failed: {e}"),
    })?;

    let mut buf = Vec::with_capacity(12 + json.len() + offset as usize);
    buf.extend_from_slice(&CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(json.len() as u32).to_le_bytes());
    buf.extend_from_slice(&json);
    for (_, t) in model.params.iter() {
        for &v in &t.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// Reads a checkpoint back into a model with the stored configuration.
/// The tensor set must match that configuration exactly: unknown names,
/// missing names, wrong shapes and short files are all distinct errors.
pub fn load_checkpoint(path: &Path) -> Result<(Model<f32>, CheckpointMeta), TrainError> {
    let buf = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let bad = |detail: String| TrainError::Checkpoint { detail };

    if buf.len() < 12 {
        return Err(bad(format!("file is {} bytes, header needs 12", buf.len())));
    }
    if buf[0..4] != CHECKPOINT_MAGIC {
        return Err(bad(format!(
            "magic {:?} does not introduce a checkpoint",
            &buf[0..4]
        )));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(bad(format!(
            "format version {version}, this build reads {CHECKPOINT_VERSION}"
        )));
    }
    let json_len = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
    if buf.len() < 12 + json_len {
        return Err(bad(format!(
            "index claims {json_len} bytes but only {} remain",
            buf.len() - 12
        )));
    }
    let index: CheckpointIndex =
        serde_json::from_slice(&buf[12..12 + json_len]).map_err(|e| bad(format!("index: {e}")))?;
    let blob = &buf[12 + json_len..];

    // The seed only shapes the throwaway initialization; every tensor is
    // overwritten from the file below.
    let mut model = Model::<f32>::init(index.config.clone(), &Rng::new(0))?;

    let mut seen = std::collections::HashSet::new();
    for e in &index.tensors {
        let t = model
            .params
            .get_mut(&e.name)
            .ok_or_else(|| bad(format!("unknown tensor `{}`", e.name)))?;
        if t.shape != e.shape {
            return Err(bad(format!(
                "tensor `{}` has shape {:?}, expected {:?}",
                e.name, e.shape, t.shape
            )));
        }
        let n = t.data.len();
        let start = e.offset as usize;
        let end = start + 4 * n;
        if end > blob.len() {
            return Err(bad(format!(
                "tensor `{}` needs bytes {start}..{end}, blob holds {}",
                e.name,
                blob.len()
            )));
        }
        for (i, v) in t.data.iter_mut().enumerate() {
            let o = start + 4 * i;
            *v = f32::from_le_bytes(blob[o..o + 4].try_into().unwrap());
        }
        seen.insert(e.name.clone());
    }
    for (name, _) in model.params.iter() {
        if !seen.contains(name) {
            return Err(bad(format!("tensor `{name}` missing from checkpoint")));
        }
    }

    Ok((
        model,
        CheckpointMeta {
            epoch: index.epoch,
            dev_eer: index.dev_eer,
        },
    ))
}
