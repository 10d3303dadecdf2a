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

use std::f64::consts::PI;

use rand::Rng;

use super::PlannerParams;
use crate::diversity::Path;
use crate::se3::{random_in_ball, random_unit_vector, sample_uniform, Configuration, Rotation, SampleBounds};

/// Which branch produced a raw sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    Goal,
    Guide,
    Uniform,
}

/// Per-iteration sampling law: the goal with probability `p_goal`; else,
/// when guides exist, a perturbed guide waypoint with probability `p_bias`;
/// else a uniform configuration.
#[derive(Clone, Debug)]
pub struct GuidedSampler<'a> {
    goal: Configuration,
    bounds: SampleBounds,
    guides: &'a [Path],
    p_goal: f64,
    p_bias: f64,
    d_guide: f64,
    max_angle: f64,
}

impl<'a> GuidedSampler<'a> {
    pub fn new(goal: Configuration, bounds: SampleBounds, guides: &'a [Path], params: &PlannerParams) -> Self {
        let w = params.weights.w_rot;
        let max_angle = if w > 0.0 { (params.d_guide / w).min(PI) } else { PI };
        GuidedSampler {
            goal,
            bounds,
            guides,
            p_goal: params.p_goal,
            p_bias: params.p_bias,
            d_guide: params.d_guide,
            max_angle,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Configuration, SampleSource) {
        if rng.random::<f64>() < self.p_goal {
            return (self.goal, SampleSource::Goal);
        }
        if !self.guides.is_empty() && rng.random::<f64>() < self.p_bias {
            return (self.guided(rng), SampleSource::Guide);
        }
        (sample_uniform(&self.bounds, rng), SampleSource::Uniform)
    }

    fn guided<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let path = &self.guides[rng.random_range(0..self.guides.len())];
        let anchor = path.waypoints()[rng.random_range(0..path.len())];
        let offset = random_in_ball(self.d_guide, rng);
        let axis = random_unit_vector(rng);
        let angle = rng.random::<f64>() * self.max_angle;
        let twist = Rotation::from_axis_angle(&axis, angle);
        Configuration::new(anchor.translation + offset, twist.compose(&anchor.rotation))
    }
}
