//! Settings from an optional TOML file, overridden by flags, with the node
//! budget capped by `METRICAT_BUDGET_NODES`.

use std::path::Path;

use metricat_core::Budget;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const NODES_ENV: &str = "METRICAT_BUDGET_NODES";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub budget_points: Option<usize>,
    pub budget_nodes: Option<u64>,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub max_size: Option<usize>,
    pub eps: Option<String>,
    pub steps: Option<usize>,
    pub policy: Option<String>,
    pub instances: Option<usize>,
    pub stage_points: Option<usize>,
    pub max_spans: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Resolves the search budget: flag, then file, then default; the
/// environment variable, when set, is a ceiling on the node count.
pub fn budget(points: Option<usize>, nodes: Option<u64>, file: &FileConfig) -> Result<Budget, CliError> {
    let points = points.or(file.budget_points).unwrap_or(Budget::DEFAULT_POINTS);
    let mut nodes = nodes.or(file.budget_nodes).unwrap_or(Budget::DEFAULT_NODES);
    if let Ok(raw) = std::env::var(NODES_ENV) {
        let cap: u64 =
            raw.trim().parse().map_err(|_| CliError::Usage(format!("{NODES_ENV} must be a nonnegative integer, got {raw:?}")))?;
        nodes = nodes.min(cap);
    }
    Ok(Budget::new(points, nodes))
}
