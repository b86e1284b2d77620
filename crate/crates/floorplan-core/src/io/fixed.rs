use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rects_overlap, BlockKind, ProblemInstance};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedEntry {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

/// Names and lower-left coordinates of the blocks to pin in place.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixedConfig {
    pub entries: Vec<FixedEntry>,
}

impl FixedConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Returns a copy of the instance with the named blocks pinned at the
/// given coordinates.
pub fn apply_fixed(instance: &ProblemInstance, cfg: &FixedConfig) -> Result<ProblemInstance> {
    let mut out = instance.clone();
    let mut seen = Vec::new();
    for entry in &cfg.entries {
        if seen.contains(&entry.name) {
            return Err(Error::Config(format!("duplicate fixed block '{}'", entry.name)));
        }
        seen.push(entry.name.clone());
        let block = out
            .blocks
            .iter_mut()
            .find(|b| b.name == entry.name)
            .ok_or_else(|| Error::Config(format!("unknown block '{}'", entry.name)))?;
        block.kind = BlockKind::Fixed;
        block.fixed_origin = Some((entry.x, entry.y));
    }
    let fixed: Vec<_> = out.fixed_blocks().collect();
    for i in 0..fixed.len() {
        for j in i + 1..fixed.len() {
            let (a, b) = (fixed[i], fixed[j]);
            let ra = (a.fixed_origin.unwrap().0, a.fixed_origin.unwrap().1, a.width, a.height);
            let rb = (b.fixed_origin.unwrap().0, b.fixed_origin.unwrap().1, b.width, b.height);
            if rects_overlap(ra, rb) {
                return Err(Error::Config(format!(
                    "fixed blocks '{}' and '{}' overlap",
                    a.name, b.name
                )));
            }
        }
    }
    if out.num_free() == 0 {
        return Err(Error::Config("fixing every block leaves nothing to place".into()));
    }
    Ok(out)
}
