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

use super::rrt::{failure, finish, steer};
use super::{PlanError, PlanOutcome, PlannerParams, PlanningProblem, Tree};
use crate::mesh::CollisionChecker;
use crate::se3::{config_distance, sample_uniform, Configuration};

enum Extend {
    Reached(usize),
    Advanced(usize),
    Trapped,
}

fn extend(tree: &mut Tree, target: &Configuration, params: &PlannerParams, checker: &CollisionChecker<'_>) -> Extend {
    let w = &params.weights;
    let near = tree.nearest(target, w);
    let from = *tree.config(near);
    let q_new = steer(&from, target, params.extend_step, w);
    if config_distance(&from, &q_new, w) == 0.0 {
        return Extend::Reached(near);
    }
    if !checker.extension_valid(&from, &q_new) {
        return Extend::Trapped;
    }
    let idx = tree.add(q_new, near);
    if config_distance(&q_new, target, w) == 0.0 {
        Extend::Reached(idx)
    } else {
        Extend::Advanced(idx)
    }
}

fn connect(tree: &mut Tree, target: &Configuration, params: &PlannerParams, checker: &CollisionChecker<'_>) -> Extend {
    loop {
        match extend(tree, target, params, checker) {
            Extend::Advanced(_) => {}
            other => return other,
        }
    }
}

/// Bidirectional RRT with the greedy connect heuristic. Samples are uniform;
/// `p_goal`, `p_bias` and the inhibition radii are not used.
pub fn rrt_connect_plan(problem: &PlanningProblem<'_>, params: &PlannerParams) -> Result<PlanOutcome, PlanError> {
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
    if config_distance(&start, &goal, &w) == 0.0 {
        return Ok(finish(vec![start], 0, vec![Tree::new(start)], clock, &w));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    // a grows toward samples, b tries to connect; they swap every iteration
    let mut a = Tree::new(start);
    let mut b = Tree::new(goal);
    let mut a_is_start = true;
    let mut iterations = 0u64;
    while iterations < params.max_iterations && clock.elapsed().as_secs_f64() < params.max_time {
        iterations += 1;
        let target = sample_uniform(&problem.bounds, &mut rng);
        let new = match extend(&mut a, &target, params, &checker) {
            Extend::Trapped => None,
            Extend::Advanced(i) | Extend::Reached(i) => Some(i),
        };
        if let Some(new) = new {
            let q_new = *a.config(new);
            if let Extend::Reached(meet) = connect(&mut b, &q_new, params, &checker) {
                let mut path = a.path_to(new);
                let mut rest = b.path_to(meet);
                rest.reverse();
                // rest[0] is q_new itself
                path.extend(rest.into_iter().skip(1));
                if !a_is_start {
                    path.reverse();
                }
                let trees = if a_is_start { vec![a, b] } else { vec![b, a] };
                return Ok(finish(path, iterations, trees, clock, &w));
            }
        }
        std::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    let trees = if a_is_start { vec![a, b] } else { vec![b, a] };
    Ok(failure(iterations, trees, clock))
}
