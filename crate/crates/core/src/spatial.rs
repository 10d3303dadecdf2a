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

//! Exact nearest-point queries on a uniform grid.

use nalgebra::Vector3;

use crate::mesh::Aabb;

/// Uniform bucket grid over a fixed point set. Queries return the exact
/// nearest point, ties resolved toward the lower index.
#[derive(Clone, Debug)]
pub struct PointGrid {
    points: Vec<Vector3<f64>>,
    origin: Vector3<f64>,
    cell: f64,
    dims: [usize; 3],
    // cell -> point indices, CSR layout
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl PointGrid {
    pub fn new(points: &[Vector3<f64>]) -> PointGrid {
        assert!(!points.is_empty(), "point grid needs at least one point");
        let bounds = Aabb::from_points(points);
        let ext = bounds.extents();
        let n = points.len() as f64;
        let longest = ext.max();
        let cell = if longest > 0.0 { (longest / n.cbrt().ceil()).max(longest * 1e-6) } else { 1.0 };
        let dims = [0, 1, 2].map(|k| ((ext[k] / cell).floor() as usize + 1).min(1 << 10));
        let mut grid = PointGrid {
            points: points.to_vec(),
            origin: bounds.min,
            cell,
            dims,
            starts: vec![0; dims[0] * dims[1] * dims[2] + 1],
            items: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.flat(grid.cell_of(p))).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for i in 1..grid.starts.len() {
            grid.starts[i] += grid.starts[i - 1];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    fn cell_of(&self, p: &Vector3<f64>) -> [usize; 3] {
        [0, 1, 2].map(|k| {
            let c = ((p[k] - self.origin[k]) / self.cell).floor();
            if c <= 0.0 || c.is_nan() {
                0
            } else {
                (c as usize).min(self.dims[k] - 1)
            }
        })
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    /// Index of the nearest point and its squared distance.
    pub fn nearest(&self, q: &Vector3<f64>) -> (usize, f64) {
        let center = self.cell_of(q);
        let mut best = (usize::MAX, f64::INFINITY);
        let max_ring = *self.dims.iter().max().unwrap_or(&1);
        for ring in 0..=max_ring {
            self.visit_ring(center, ring, |i| {
                let d = (self.points[i] - q).norm_squared();
                if d < best.1 || (d == best.1 && i < best.0) {
                    best = (i, d);
                }
            });
            // cells beyond this ring are at least ring * cell away
            let reach = ring as f64 * self.cell;
            if best.0 != usize::MAX && best.1 < reach * reach {
                break;
            }
        }
        best
    }

    fn visit_ring<F: FnMut(usize)>(&self, c: [usize; 3], ring: usize, mut f: F) {
        let r = ring as isize;
        let range = |k: usize| {
            let lo = (c[k] as isize - r).max(0);
            let hi = (c[k] as isize + r).min(self.dims[k] as isize - 1);
            lo..=hi
        };
        for x in range(0) {
            for y in range(1) {
                for z in range(2) {
                    let on_shell = (x - c[0] as isize).abs() == r
                        || (y - c[1] as isize).abs() == r
                        || (z - c[2] as isize).abs() == r;
                    if !on_shell {
                        continue;
                    }
                    let cell = self.flat([x as usize, y as usize, z as usize]);
                    for &i in &self.items[self.starts[cell]..self.starts[cell + 1]] {
                        f(i);
                    }
                }
            }
        }
    }
}
