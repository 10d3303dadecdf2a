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

use nalgebra::Vector3;

use super::bvh::BvhNode;
use super::tri_tri::triangles_intersect;
use super::{Aabb, TriMesh};
use crate::se3::{config_distance, Configuration, MetricWeights};

/// Largest subdivision depth used by `motion_valid` (2^30 segments).
const MAX_MOTION_DEPTH: u32 = 30;

fn box_pad(b: &Aabb) -> f64 {
    1e-9 * (1.0 + b.min.abs().max().max(b.max.abs().max()))
}

/// True iff any triangle of `a` posed by `pose_a` intersects any triangle of
/// `b` (given in the world frame).
pub fn meshes_intersect(a: &TriMesh, pose_a: &Configuration, b: &TriMesh) -> bool {
    let (Some(root_a), Some(root_b)) = (a.bvh().root(), b.bvh().root()) else {
        return false;
    };
    let world_box = |node: &BvhNode| {
        let local = node.aabb();
        let w = local.transformed(pose_a, 0.0);
        Aabb {
            min: w.min.add_scalar(-box_pad(&w)),
            max: w.max.add_scalar(box_pad(&w)),
        }
    };
    if !world_box(root_a).overlaps(root_b.aabb()) {
        return false;
    }
    let world: Vec<Vector3<f64>> = a.vertices().iter().map(|v| pose_a.transform_point(v)).collect();
    let posed = |t: usize| a.triangles()[t].map(|i| world[i]);

    let nodes_a = a.bvh().nodes();
    let nodes_b = b.bvh().nodes();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((ia, ib)) = stack.pop() {
        let na = &nodes_a[ia];
        let nb = &nodes_b[ib];
        if !world_box(na).overlaps(nb.aabb()) {
            continue;
        }
        match (na, nb) {
            (
                BvhNode::Leaf { start: sa, count: ca, .. },
                BvhNode::Leaf { start: sb, count: cb, .. },
            ) => {
                for &ta in a.bvh().leaf_triangles(*sa, *ca) {
                    let tri_a = posed(ta);
                    for &tb in b.bvh().leaf_triangles(*sb, *cb) {
                        if triangles_intersect(&tri_a, &b.triangle(tb)) {
                            return true;
                        }
                    }
                }
            }
            (BvhNode::Leaf { .. }, BvhNode::Internal { left, right, .. }) => {
                stack.push((ia, *left));
                stack.push((ia, *right));
            }
            (BvhNode::Internal { left, right, .. }, BvhNode::Leaf { .. }) => {
                stack.push((*left, ib));
                stack.push((*right, ib));
            }
            (
                BvhNode::Internal { aabb: ba, left: la, right: ra },
                BvhNode::Internal { aabb: bb, left: lb, right: rb },
            ) => {
                // split the bigger box
                if ba.extents().norm() >= bb.extents().norm() {
                    stack.push((*la, ib));
                    stack.push((*ra, ib));
                } else {
                    stack.push((ia, *lb));
                    stack.push((ia, *rb));
                }
            }
        }
    }
    false
}

/// All-pairs reference for `meshes_intersect`.
pub fn meshes_intersect_brute_force(a: &TriMesh, pose_a: &Configuration, b: &TriMesh) -> bool {
    (0..a.triangles().len()).any(|ta| {
        let tri_a = a.triangle(ta).map(|v| pose_a.transform_point(&v));
        (0..b.triangles().len()).any(|tb| triangles_intersect(&tri_a, &b.triangle(tb)))
    })
}

/// Surface-intersection validity: a pose is valid when no triangles touch.
/// A body fully enclosed by a solid without surface contact counts as valid.
pub fn config_valid(obj: &TriMesh, env: &TriMesh, q: &Configuration) -> bool {
    !meshes_intersect(obj, q, env)
}

/// Checks poses along the interpolated segment at dyadic parameters
/// `i / 2^k`, with `k` the smallest depth giving spacing `<= step` in the
/// configuration metric. Endpoints are always checked. A finer step only
/// adds checked poses, so it can never turn an invalid result valid.
pub fn motion_valid(
    obj: &TriMesh,
    env: &TriMesh,
    a: &Configuration,
    b: &Configuration,
    step: f64,
    weights: &MetricWeights,
) -> bool {
    motion_check(obj, env, a, b, step, weights, true)
}

fn motion_check(
    obj: &TriMesh,
    env: &TriMesh,
    a: &Configuration,
    b: &Configuration,
    step: f64,
    weights: &MetricWeights,
    check_start: bool,
) -> bool {
    assert!(step > 0.0, "motion step must be positive");
    if (check_start && !config_valid(obj, env, a)) || !config_valid(obj, env, b) {
        return false;
    }
    let d = config_distance(a, b, weights);
    let mut depth = 0;
    while depth < MAX_MOTION_DEPTH && d / (1u64 << depth) as f64 > step {
        depth += 1;
    }
    // breadth-first over levels so gross collisions show up early
    for level in 1..=depth {
        let n = 1u64 << level;
        for i in (1..n).step_by(2) {
            let q = a.interpolate(b, i as f64 / n as f64);
            if !config_valid(obj, env, &q) {
                return false;
            }
        }
    }
    true
}

/// Bundles an object, its environment and the motion-check settings.
#[derive(Clone, Copy, Debug)]
pub struct CollisionChecker<'a> {
    pub object: &'a TriMesh,
    pub environment: &'a TriMesh,
    pub weights: MetricWeights,
    pub step: f64,
}

impl<'a> CollisionChecker<'a> {
    pub fn new(object: &'a TriMesh, environment: &'a TriMesh, weights: MetricWeights, step: f64) -> Self {
        CollisionChecker {
            object,
            environment,
            weights,
            step,
        }
    }

    pub fn config_valid(&self, q: &Configuration) -> bool {
        config_valid(self.object, self.environment, q)
    }

    pub fn motion_valid(&self, a: &Configuration, b: &Configuration) -> bool {
        motion_valid(self.object, self.environment, a, b, self.step, &self.weights)
    }

    /// Same poses as `motion_valid` except `a`, which the caller already
    /// knows to be valid.
    pub fn extension_valid(&self, a: &Configuration, b: &Configuration) -> bool {
        motion_check(self.object, self.environment, a, b, self.step, &self.weights, false)
    }

    pub fn distance(&self, a: &Configuration, b: &Configuration) -> f64 {
        config_distance(a, b, &self.weights)
    }
}
