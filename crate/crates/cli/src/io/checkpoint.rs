//! Model checkpoints: one binary file holding a versioned JSON header (the
//! architecture, class names, and encoding settings) followed by named
//! weight tensors.
//!
//! Layout, little-endian:
//!
//! ```text
//! 8 bytes   magic "TLMODEL1"
//! 4 bytes   format version (u32, currently 1)
//! 4 bytes   metadata length M (u32)
//! M bytes   metadata JSON (CheckpointMeta)
//! 4 bytes   tensor count (u32)
//! per tensor:
//!   4 bytes    name length (u32), then the UTF-8 name
//!   4 bytes    rank (u32), then rank u64 dimensions
//!   8*numel    row-major f64 data
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use trendlens_core::neural::{Classifier, ModelConfig, Tensor};

use crate::error::Error;

const MAGIC: &[u8; 8] = b"TLMODEL1";
const VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfigDto {
    pub vocab_size: usize,
    pub model_dim: usize,
    pub heads: usize,
    pub layers: usize,
    pub max_seq_len: usize,
    pub bag_dim: usize,
    pub svd_dim: usize,
    pub svd_hidden: usize,
    pub classes: usize,
    pub text_branch: bool,
    pub bag_branch: bool,
    pub svd_branch: bool,
}

impl From<&ModelConfig> for ConfigDto {
    fn from(c: &ModelConfig) -> Self {
        ConfigDto {
            vocab_size: c.vocab_size,
            model_dim: c.model_dim,
            heads: c.heads,
            layers: c.layers,
            max_seq_len: c.max_seq_len,
            bag_dim: c.bag_dim,
            svd_dim: c.svd_dim,
            svd_hidden: c.svd_hidden,
            classes: c.classes,
            text_branch: c.text_branch,
            bag_branch: c.bag_branch,
            svd_branch: c.svd_branch,
        }
    }
}

impl From<ConfigDto> for ModelConfig {
    fn from(c: ConfigDto) -> Self {
        ModelConfig {
            vocab_size: c.vocab_size,
            model_dim: c.model_dim,
            heads: c.heads,
            layers: c.layers,
            max_seq_len: c.max_seq_len,
            bag_dim: c.bag_dim,
            svd_dim: c.svd_dim,
            svd_hidden: c.svd_hidden,
            classes: c.classes,
            text_branch: c.text_branch,
            bag_branch: c.bag_branch,
            svd_branch: c.svd_branch,
        }
    }
}

/// Everything needed to re-encode a corpus against a trained model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub config: ConfigDto,
    pub labels: Vec<String>,
    /// TF-IDF vocabulary width the SVD factors expect.
    pub tfidf_width: usize,
    pub min_retweets: u64,
}

pub fn save_checkpoint(
    path: &Path,
    model: &Classifier,
    meta: &CheckpointMeta,
) -> Result<(), Error> {
    let meta_json = serde_json::to_vec(meta).expect("serializable meta");
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(meta_json.len() as u32).to_le_bytes());
    buf.extend_from_slice(&meta_json);
    let params = model.params();
    buf.extend_from_slice(&(params.len() as u32).to_le_bytes());
    for (name, tensor) in params {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(tensor.shape.len() as u32).to_le_bytes());
        for &dim in &tensor.shape {
            buf.extend_from_slice(&(dim as u64).to_le_bytes());
        }
        for value in &tensor.data {
            buf.extend_from_slice(&value.to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Classifier, CheckpointMeta), Error> {
    let buf = fs::read(path)
        .map_err(|e| Error::input(format!("cannot read model {}: {e}", path.display())))?;
    let bad = |msg: &str| Error::input(format!("{}: {msg}", path.display()));
    if buf.len() < 16 || &buf[0..8] != MAGIC {
        return Err(bad("not a model checkpoint: bad magic"));
    }
    let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("unsupported checkpoint version {version}")));
    }
    let meta_len = u32::from_le_bytes(buf[12..16].try_into().unwrap()) as usize;
    let mut offset = 16;
    if buf.len() < offset + meta_len {
        return Err(bad("truncated metadata"));
    }
    let meta: CheckpointMeta = serde_json::from_slice(&buf[offset..offset + meta_len])
        .map_err(|e| bad(&format!("bad metadata: {e}")))?;
    offset += meta_len;

    let take = |offset: &mut usize, n: usize| -> Result<&[u8], Error> {
        if buf.len() < *offset + n {
            return Err(bad("truncated tensor data"));
        }
        let slice = &buf[*offset..*offset + n];
        *offset += n;
        Ok(slice)
    };

    let tensor_count = u32::from_le_bytes(take(&mut offset, 4)?.try_into().unwrap()) as usize;
    let config: ModelConfig = meta.config.clone().into();
    let mut model = Classifier::new(config, 0).map_err(Error::from)?;
    let mut seen = 0usize;
    for _ in 0..tensor_count {
        let name_len = u32::from_le_bytes(take(&mut offset, 4)?.try_into().unwrap()) as usize;
        let name = String::from_utf8(take(&mut offset, name_len)?.to_vec())
            .map_err(|_| bad("tensor name not utf-8"))?;
        let rank = u32::from_le_bytes(take(&mut offset, 4)?.try_into().unwrap()) as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(u64::from_le_bytes(take(&mut offset, 8)?.try_into().unwrap()) as usize);
        }
        let numel: usize = shape.iter().product();
        let mut data = Vec::with_capacity(numel);
        let raw = take(&mut offset, numel * 8)?;
        for chunk in raw.chunks_exact(8) {
            data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        let slot = model
            .params_mut()
            .get_mut(&name)
            .ok_or_else(|| bad(&format!("unknown tensor '{name}' for this architecture")))?;
        if slot.shape != shape {
            return Err(bad(&format!(
                "tensor '{name}' has shape {shape:?}, expected {:?}",
                slot.shape
            )));
        }
        *slot = Tensor { shape, data };
        seen += 1;
    }
    if seen != model.params().len() {
        return Err(bad(&format!(
            "checkpoint holds {seen} tensors, architecture needs {}",
            model.params().len()
        )));
    }
    Ok((model, meta))
}
