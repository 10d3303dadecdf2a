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

use super::Aabb;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
pub enum BvhNode {
    Leaf { aabb: Aabb, start: usize, count: usize },
    Internal { aabb: Aabb, left: usize, right: usize },
}

impl BvhNode {
    pub fn aabb(&self) -> &Aabb {
        match self {
            BvhNode::Leaf { aabb, .. } | BvhNode::Internal { aabb, .. } => aabb,
        }
    }
}

/// Binary AABB tree over triangle indices, median split on the longest
/// axis of the triangle centroids. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    order: Vec<usize>,
}

impl Bvh {
    pub fn build(vertices: &[Vector3<f64>], triangles: &[[usize; 3]]) -> Bvh {
        let boxes: Vec<Aabb> = triangles
            .iter()
            .map(|t| Aabb::from_points(t.iter().map(|&i| &vertices[i])))
            .collect();
        let centroids: Vec<Vector3<f64>> = boxes.iter().map(Aabb::center).collect();
        let mut bvh = Bvh {
            nodes: Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1),
            order: (0..triangles.len()).collect(),
        };
        if !triangles.is_empty() {
            bvh.build_node(&boxes, &centroids, 0, triangles.len());
        }
        bvh
    }

    fn build_node(&mut self, boxes: &[Aabb], centroids: &[Vector3<f64>], start: usize, end: usize) -> usize {
        let slice = &self.order[start..end];
        let aabb = slice.iter().fold(Aabb::empty(), |b, &t| b.union(&boxes[t]));
        let index = self.nodes.len();
        let count = end - start;
        if count <= LEAF_SIZE {
            self.nodes.push(BvhNode::Leaf { aabb, start, count });
            return index;
        }
        let cbox = Aabb::from_points(slice.iter().map(|&t| &centroids[t]));
        let axis = cbox.extents().imax();
        let mid = count / 2;
        self.order[start..end].select_nth_unstable_by(mid, |&a, &b| {
            centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
        });
        // placeholder, patched once children exist
        self.nodes.push(BvhNode::Leaf { aabb, start, count });
        let left = self.build_node(boxes, centroids, start, start + mid);
        let right = self.build_node(boxes, centroids, start + mid, end);
        self.nodes[index] = BvhNode::Internal { aabb, left, right };
        index
    }

    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<&BvhNode> {
        self.nodes.first()
    }

    /// Triangle indices stored in a leaf.
    pub fn leaf_triangles(&self, start: usize, count: usize) -> &[usize] {
        &self.order[start..start + count]
    }
}
