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

//! Path-to-path and path-to-set distances and the distinctness predicate
//! used to keep a diverse set of template paths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::se3::{config_distance, Configuration, MetricWeights};

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("path has no waypoints")]
    Empty,
    #[error("path waypoint {0} is not finite")]
    NonFinite(usize),
    #[error("path set is empty")]
    EmptySet,
}

/// Nonempty ordered sequence of waypoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Configuration>", into = "Vec<Configuration>")]
pub struct Path {
    waypoints: Vec<Configuration>,
}

pub type PathSet = Vec<Path>;

impl Path {
    pub fn new(waypoints: Vec<Configuration>) -> Result<Path, PathError> {
        if waypoints.is_empty() {
            return Err(PathError::Empty);
        }
        if let Some(i) = waypoints.iter().position(|q| !q.is_finite()) {
            return Err(PathError::NonFinite(i));
        }
        Ok(Path { waypoints })
    }

    pub fn waypoints(&self) -> &[Configuration] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> &Configuration {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &Configuration {
        &self.waypoints[self.waypoints.len() - 1]
    }

    /// Sum of segment lengths in the configuration metric.
    pub fn length(&self, w: &MetricWeights) -> f64 {
        self.waypoints.windows(2).map(|s| config_distance(&s[0], &s[1], w)).sum()
    }

    /// Applies `f` to every waypoint.
    pub fn map<F: FnMut(&Configuration) -> Configuration>(&self, f: F) -> Path {
        Path {
            waypoints: self.waypoints.iter().map(f).collect(),
        }
    }

    /// Inserts interpolated waypoints so consecutive waypoints are at most
    /// `spacing` apart. Optional densification before distance evaluation.
    pub fn resample(&self, spacing: f64, w: &MetricWeights) -> Path {
        assert!(spacing > 0.0);
        let mut out = vec![self.waypoints[0]];
        for seg in self.waypoints.windows(2) {
            let d = config_distance(&seg[0], &seg[1], w);
            let n = (d / spacing).ceil().max(1.0) as usize;
            for i in 1..=n {
                out.push(seg[0].interpolate(&seg[1], i as f64 / n as f64));
            }
        }
        Path { waypoints: out }
    }
}

impl TryFrom<Vec<Configuration>> for Path {
    type Error = PathError;

    fn try_from(waypoints: Vec<Configuration>) -> Result<Self, Self::Error> {
        Path::new(waypoints)
    }
}

impl From<Path> for Vec<Configuration> {
    fn from(p: Path) -> Self {
        p.waypoints
    }
}

/// Mean over waypoints of `p1` of the distance to the closest waypoint of
/// `p2`. Not symmetric.
pub fn path_distance(p1: &Path, p2: &Path, w: &MetricWeights) -> f64 {
    let total: f64 = p1
        .waypoints
        .iter()
        .map(|q1| {
            p2.waypoints
                .iter()
                .map(|q2| config_distance(q1, q2, w))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / p1.len() as f64
}

/// `max(path_distance(a, b), path_distance(b, a))`
pub fn symmetric_path_distance(a: &Path, b: &Path, w: &MetricWeights) -> f64 {
    path_distance(a, b, w).max(path_distance(b, a, w))
}

/// Smallest symmetrized distance from `p` to any path of `set`.
pub fn set_distance(p: &Path, set: &[Path], w: &MetricWeights) -> Result<f64, PathError> {
    if set.is_empty() {
        return Err(PathError::EmptySet);
    }
    Ok(set
        .iter()
        .map(|pk| symmetric_path_distance(p, pk, w))
        .fold(f64::INFINITY, f64::min))
}

/// True iff `set` is empty or `p` is strictly farther than `d_min` from it.
pub fn is_distinct(p: &Path, set: &[Path], d_min: f64, w: &MetricWeights) -> bool {
    match set_distance(p, set, w) {
        Ok(d) => d > d_min,
        Err(_) => true,
    }
}
