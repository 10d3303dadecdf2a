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

//! Planning a query object with library guidance: template lookup,
//! alignment, path transfer and guided search.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diversity::Path;
use crate::icp::{icp_with_guess, transform_paths, AlignError, RigidTransform};
use crate::library::{select_template, LibraryError, MeshStore, PathLibrary};
use crate::planner::{rrt_ir_plan, PlanError, PlanOutcome, PlanStats, PlannerParams, PlanningProblem};

pub const DEFAULT_ICP_ITERATIONS: usize = 15;
pub const DEFAULT_ICP_EPS_MIN: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GuidedParams {
    /// `max_time` covers setup and search together.
    pub planner: PlannerParams,
    pub icp_iterations: usize,
    pub icp_eps_min: f64,
    /// Refuse to plan without a template instead of searching unguided.
    pub strict: bool,
}

impl Default for GuidedParams {
    fn default() -> Self {
        GuidedParams {
            planner: PlannerParams::default(),
            icp_iterations: DEFAULT_ICP_ITERATIONS,
            icp_eps_min: DEFAULT_ICP_EPS_MIN,
            strict: false,
        }
    }
}

/// Seconds spent per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub similarity_s: f64,
    pub icp_s: f64,
    pub planning_s: f64,
    pub total_s: f64,
}

impl Timing {
    pub fn setup_s(&self) -> f64 {
        self.similarity_s + self.icp_s
    }
}

#[derive(Clone, Debug)]
pub struct GuidedPlan {
    pub outcome: PlanOutcome,
    pub template: Option<String>,
    pub similarity: Option<f64>,
    pub transform: Option<RigidTransform>,
    pub guides: Vec<Path>,
    pub timing: Timing,
    /// True when no template existed and the search ran unguided.
    pub unguided: bool,
}

/// Plans for `problem.object` in environment `env_id` using the library's
/// closest template. Without a template the search runs unguided unless
/// `params.strict` is set.
pub fn plan_with_library(
    lib: &PathLibrary,
    store: &mut MeshStore,
    problem: &PlanningProblem<'_>,
    env_id: &str,
    params: &GuidedParams,
) -> Result<GuidedPlan, PipelineError> {
    let clock = Instant::now();
    let mut timing = Timing::default();
    let selection = match select_template(lib, store, problem.object, env_id) {
        Ok(s) => Some(s),
        Err(LibraryError::EmptyLibrary(env)) if !params.strict => {
            log::warn!("no template for environment {env:?}; planning unguided");
            None
        }
        Err(e) => return Err(e.into()),
    };
    timing.similarity_s = clock.elapsed().as_secs_f64();

    let (mut template, mut similarity, mut transform, mut guides) = (None, None, None, Vec::new());
    if let Some(sel) = &selection {
        let icp_clock = Instant::now();
        let record = &lib.records[sel.record];
        let template_mesh = store.template(record)?;
        let fit = icp_with_guess(problem.object, template_mesh, &sel.correspondences, params.icp_iterations, params.icp_eps_min)?;
        guides = transform_paths(&record.paths, &fit.transform);
        timing.icp_s = icp_clock.elapsed().as_secs_f64();
        template = Some(record.object_id.clone());
        similarity = Some(sel.similarity);
        transform = Some(fit.transform);
    }

    let left = params.planner.max_time - clock.elapsed().as_secs_f64();
    let outcome = if left > 0.0 {
        let mut planner = params.planner.clone();
        planner.max_time = left;
        rrt_ir_plan(problem, &guides, &[], &planner)?
    } else {
        PlanOutcome { path: None, stats: PlanStats::default(), trees: Vec::new() }
    };
    timing.planning_s = outcome.stats.wall_time_s;
    timing.total_s = clock.elapsed().as_secs_f64();
    Ok(GuidedPlan { outcome, template, similarity, transform, guides, timing, unguided: selection.is_none() })
}
