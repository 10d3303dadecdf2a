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
use crate::se3::{config_distance, Configuration, MetricWeights};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub config: Configuration,
    pub parent: Option<usize>,
}

/// Search tree rooted at node 0. Nearest-neighbor queries are exact linear
/// scans in the configuration metric.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    // translations kept contiguous for the scan
    points: Vec<[f64; 3]>,
}

impl Tree {
    pub fn new(root: Configuration) -> Self {
        Tree {
            nodes: vec![TreeNode {
                config: root,
                parent: None,
            }],
            points: vec![[root.translation.x, root.translation.y, root.translation.z]],
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &Configuration {
        &self.nodes[0].config
    }

    pub fn config(&self, i: usize) -> &Configuration {
        &self.nodes[i].config
    }

    pub fn add(&mut self, config: Configuration, parent: usize) -> usize {
        debug_assert!(parent < self.nodes.len());
        self.nodes.push(TreeNode {
            config,
            parent: Some(parent),
        });
        self.points.push([config.translation.x, config.translation.y, config.translation.z]);
        self.nodes.len() - 1
    }

    /// Index of the node closest to `q`; ties go to the lowest index.
    pub fn nearest(&self, q: &Configuration, w: &MetricWeights) -> usize {
        let t = [q.translation.x, q.translation.y, q.translation.z];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let dx = p[0] - t[0];
            let dy = p[1] - t[1];
            let dz = p[2] - t[2];
            let trans_sq = dx * dx + dy * dy + dz * dz;
            // translation alone bounds the metric from below
            if trans_sq > best_d * best_d {
                continue;
            }
            let d = config_distance(&self.nodes[i].config, q, w);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Waypoints from the root to node `i`.
    pub fn path_to(&self, i: usize) -> Vec<Configuration> {
        let mut out = vec![self.nodes[i].config];
        let mut cur = i;
        while let Some(p) = self.nodes[cur].parent {
            out.push(self.nodes[p].config);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn path_from_root(&self, i: usize) -> Path {
        Path::new(self.path_to(i)).expect("tree paths are nonempty")
    }
}
