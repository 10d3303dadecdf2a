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

use crate::diversity::Path;
use crate::mesh::CollisionChecker;

/// Greedy shortcutting: from each kept waypoint jump to the farthest later
/// waypoint reachable by a valid straight motion. Deterministic; the result
/// keeps the endpoints and only ever drops waypoints.
pub fn shortcut_path(path: &Path, checker: &CollisionChecker<'_>) -> Path {
    let w = path.waypoints();
    if w.len() <= 2 {
        return path.clone();
    }
    let mut out = vec![w[0]];
    let mut i = 0;
    while i + 1 < w.len() {
        let mut next = i + 1;
        for j in (i + 2..w.len()).rev() {
            if checker.motion_valid(&w[i], &w[j]) {
                next = j;
                break;
            }
        }
        out.push(w[next]);
        i = next;
    }
    Path::new(out).expect("shortcut keeps the endpoints")
}

/// Pulls each interior waypoint's rotation toward the interpolation of its
/// neighbours, keeping a change only if the waypoint and both adjacent
/// motions stay valid. Positions are untouched.
pub fn smooth_rotations(path: &Path, checker: &CollisionChecker<'_>, passes: usize) -> Path {
    let mut w = path.waypoints().to_vec();
    if w.len() <= 2 {
        return path.clone();
    }
    for _ in 0..passes {
        let mut changed = false;
        for k in 1..w.len() - 1 {
            let (prev, next) = (w[k - 1], w[k + 1]);
            let a = (w[k].translation - prev.translation).norm();
            let b = (next.translation - w[k].translation).norm();
            let s = if a + b > 0.0 { a / (a + b) } else { 0.5 };
            let mut cand = w[k];
            cand.rotation = prev.rotation.slerp(&next.rotation, s);
            if cand.rotation.angle_to(&w[k].rotation) < 1e-9 {
                continue;
            }
            if checker.config_valid(&cand) && checker.motion_valid(&prev, &cand) && checker.motion_valid(&cand, &next) {
                w[k] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Path::new(w).expect("smoothing keeps waypoints")
}
