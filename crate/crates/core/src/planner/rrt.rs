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

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GuidedSampler, PlanError, PlanOutcome, PlanStats, PlannerParams, PlanningProblem, Tree};
use crate::diversity::Path;
use crate::mesh::CollisionChecker;
use crate::se3::{config_distance, Configuration, MetricWeights};

/// Plain RRT: goal-biased uniform sampling, single-step extension.
pub fn rrt_plan(problem: &PlanningProblem<'_>, params: &PlannerParams) -> Result<PlanOutcome, PlanError> {
    rrt_ir_plan(problem, &[], &[], params)
}

/// RRT sampling along `guides` and refusing nodes inside inhibited balls.
///
/// A new node is rejected when it lies within `d_inhibited` of any center
/// in `inhibited`, unless it is within `d_safe` of the start or the goal.
/// With no guides and no inhibited centers this is plain RRT.
pub fn rrt_ir_plan(
    problem: &PlanningProblem<'_>,
    guides: &[Path],
    inhibited: &[Configuration],
    params: &PlannerParams,
) -> Result<PlanOutcome, PlanError> {
    let clock = Instant::now();
    params.validate()?;
    let checker = CollisionChecker::new(problem.object, problem.environment, params.weights, params.collision_step);
    let (start, goal) = (problem.start, problem.goal);
    if !checker.config_valid(&start) {
        return Err(PlanError::InvalidStart);
    }
    if !checker.config_valid(&goal) {
        return Err(PlanError::InvalidGoal);
    }
    let w = params.weights;
    let mut tree = Tree::new(start);
    if config_distance(&start, &goal, &w) == 0.0 {
        return Ok(finish(vec![start], 0, vec![tree], clock, &w));
    }

    let sampler = GuidedSampler::new(goal, problem.bounds, guides, params);
    let inhibition = Inhibition {
        centers: inhibited,
        start,
        goal,
        d_inhibited: params.d_inhibited,
        d_safe: params.d_safe,
        weights: w,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut iterations = 0u64;
    while iterations < params.max_iterations && clock.elapsed().as_secs_f64() < params.max_time {
        iterations += 1;
        let (target, _) = sampler.sample(&mut rng);
        let near = tree.nearest(&target, &w);
        let from = *tree.config(near);
        let q_new = steer(&from, &target, params.extend_step, &w);
        if config_distance(&from, &q_new, &w) == 0.0 || inhibition.blocks(&q_new) {
            continue;
        }
        if !checker.extension_valid(&from, &q_new) {
            continue;
        }
        let idx = tree.add(q_new, near);
        let to_goal = config_distance(&q_new, &goal, &w);
        if to_goal == 0.0 {
            let path = tree.path_to(idx);
            return Ok(finish(path, iterations, vec![tree], clock, &w));
        }
        if to_goal <= params.extend_step && checker.extension_valid(&q_new, &goal) {
            let g = tree.add(goal, idx);
            let path = tree.path_to(g);
            return Ok(finish(path, iterations, vec![tree], clock, &w));
        }
    }
    Ok(failure(iterations, vec![tree], clock))
}

/// Moves from `from` toward `to` by at most `step` in the configuration metric.
pub(crate) fn steer(from: &Configuration, to: &Configuration, step: f64, w: &MetricWeights) -> Configuration {
    let d = config_distance(from, to, w);
    if d <= step {
        *to
    } else {
        from.interpolate(to, step / d)
    }
}

struct Inhibition<'a> {
    centers: &'a [Configuration],
    start: Configuration,
    goal: Configuration,
    d_inhibited: f64,
    d_safe: f64,
    weights: MetricWeights,
}

impl Inhibition<'_> {
    fn blocks(&self, q: &Configuration) -> bool {
        if self.centers.is_empty() {
            return false;
        }
        let d = |a: &Configuration| config_distance(a, q, &self.weights);
        if d(&self.start) <= self.d_safe || d(&self.goal) <= self.d_safe {
            return false;
        }
        self.centers.iter().any(|c| d(c) <= self.d_inhibited)
    }
}

pub(crate) fn finish(
    waypoints: Vec<Configuration>,
    iterations: u64,
    trees: Vec<Tree>,
    clock: Instant,
    w: &MetricWeights,
) -> PlanOutcome {
    let path = Path::new(waypoints).expect("solution paths are nonempty");
    let stats = PlanStats {
        success: true,
        wall_time_s: clock.elapsed().as_secs_f64(),
        iterations,
        nodes: trees.iter().map(Tree::len).sum(),
        path_length: path.length(w),
        waypoints: path.len(),
    };
    PlanOutcome {
        path: Some(path),
        stats,
        trees,
    }
}

pub(crate) fn failure(iterations: u64, trees: Vec<Tree>, clock: Instant) -> PlanOutcome {
    PlanOutcome {
        path: None,
        stats: PlanStats {
            success: false,
            wall_time_s: clock.elapsed().as_secs_f64(),
            iterations,
            nodes: trees.iter().map(Tree::len).sum(),
            path_length: 0.0,
            waypoints: 0,
        },
        trees,
    }
}
