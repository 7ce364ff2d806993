use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{PipelineError, Stage};
use crate::problem::MAX_BRUTE_FORCE_CITIES;
use crate::shrink::TieBreak;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// Random Euclidean instance in the unit square, seeded from the root seed.
    Generate { n: usize },
    /// A TSP instance JSON file.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub instance: InstanceSource,
    /// Root seed; every random stream is derived from it.
    pub seed: u64,
    /// `None` selects `A = N * max d + 1`.
    pub penalty_a: Option<f64>,
    /// `None` selects `B = 1`.
    pub penalty_b: Option<f64>,
    pub beta: usize,
    pub shrink_target: usize,
    #[serde(default)]
    pub tie_break: TieBreak,
    pub separator_node_limit: usize,
    pub layers: usize,
    pub restarts: usize,
    pub max_evals: usize,
    pub shots: usize,
    pub top_k: usize,
}

pub const SHIPPED_SEED: u64 = 1;

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            instance: InstanceSource::Generate { n: 7 },
            seed: SHIPPED_SEED,
            penalty_a: None,
            penalty_b: None,
            beta: 0,
            shrink_target: 1,
            tie_break: TieBreak::Lexicographic,
            separator_node_limit: 100,
            layers: 2,
            restarts: 10,
            max_evals: 250,
            shots: 100_000,
            top_k: 50,
        }
    }
}

impl PipelineConfig {
    pub fn generate(n: usize, seed: u64) -> Self {
        PipelineConfig {
            instance: InstanceSource::Generate { n },
            seed,
            ..PipelineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::config(m));
        if let InstanceSource::Generate { n } = self.instance {
            if !(3..=MAX_BRUTE_FORCE_CITIES).contains(&n) {
                return bad(format!("n = {n} outside 3..={MAX_BRUTE_FORCE_CITIES}"));
            }
        }
        for (name, v) in [("penalty_a", self.penalty_a), ("penalty_b", self.penalty_b)] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return bad(format!("{name} = {x} must be positive"));
                }
            }
        }
        if self.shrink_target == 0 {
            return bad("shrink target must be at least 1".into());
        }
        if self.layers == 0 {
            return bad("at least one QAOA layer is required".into());
        }
        if self.restarts == 0 || self.max_evals == 0 {
            return bad("optimizer needs at least one restart and one evaluation".into());
        }
        if self.top_k == 0 {
            return bad("top_k must be at least 1".into());
        }
        Ok(())
    }
}

impl PipelineError {
    fn config(message: String) -> Self {
        PipelineError::Stage {
            stage: Stage::Config,
            message,
        }
    }
}
