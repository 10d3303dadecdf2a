/*
  Copyright 2026 The pathlib Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

//! Sampling-based planners: RRT, RRT-Connect, and RRT with guiding paths
//! and inhibited regions.

mod connect;
mod rrt;
mod sampler;
mod smooth;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diversity::Path;
use crate::mesh::TriMesh;
use crate::se3::{Configuration, MetricWeights, SampleBounds};

pub use connect::rrt_connect_plan;
pub use rrt::{rrt_ir_plan, rrt_plan};
pub use sampler::{GuidedSampler, SampleSource};
pub use smooth::{shortcut_path, smooth_rotations};
pub use tree::{Tree, TreeNode};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("start configuration is in collision")]
    InvalidStart,
    #[error("goal configuration is in collision")]
    InvalidGoal,
    #[error("invalid planner parameter: {0}")]
    InvalidParams(String),
}

/// Planner settings. Distances are in the configuration metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// probability of sampling the goal
    pub p_goal: f64,
    /// probability of sampling along a guiding path (when guides exist)
    pub p_bias: f64,
    /// perturbation radius around guide waypoints
    pub d_guide: f64,
    /// radius of inhibited balls
    pub d_inhibited: f64,
    /// radius around start and goal exempt from inhibition
    pub d_safe: f64,
    pub extend_step: f64,
    /// wall-clock limit in seconds
    pub max_time: f64,
    pub max_iterations: u64,
    pub collision_step: f64,
    pub seed: u64,
    pub weights: MetricWeights,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            p_goal: 0.05,
            p_bias: 0.80,
            d_guide: 0.50,
            d_inhibited: 1.20,
            d_safe: 0.80,
            extend_step: 0.4,
            max_time: 120.0,
            max_iterations: u64::MAX,
            collision_step: 0.05,
            seed: 0,
            weights: MetricWeights::default(),
        }
    }
}

impl PlannerParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidParams(m.to_string()));
        for (name, p) in [("p_goal", self.p_goal), ("p_bias", self.p_bias)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        for (name, v) in [
            ("d_guide", self.d_guide),
            ("d_inhibited", self.d_inhibited),
            ("d_safe", self.d_safe),
            ("extend_step", self.extend_step),
            ("collision_step", self.collision_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.max_time > 0.0) {
            return bad("max_time must be positive");
        }
        if !(self.weights.w_rot >= 0.0 && self.weights.w_rot.is_finite()) {
            return bad("w_rot must be nonnegative");
        }
        Ok(())
    }
}

/// Object, environment and query endpoints for one planning run.
#[derive(Clone, Copy, Debug)]
pub struct PlanningProblem<'a> {
    pub object: &'a TriMesh,
    pub environment: &'a TriMesh,
    pub start: Configuration,
    pub goal: Configuration,
    pub bounds: SampleBounds,
}

/// Per-run statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub success: bool,
    pub wall_time_s: f64,
    pub iterations: u64,
    pub nodes: usize,
    /// sum of segment lengths in the configuration metric
    pub path_length: f64,
    pub waypoints: usize,
}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub path: Option<Path>,
    pub stats: PlanStats,
    /// Final search trees, for inspection.
    pub trees: Vec<Tree>,
}
