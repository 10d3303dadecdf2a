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

//! Procedural meshes: boxes, spheres, walls with rectangular windows.

use std::collections::HashMap;

use nalgebra::Vector3;
use rand::Rng;

use super::TriMesh;

/// Axis-aligned box given by center and half extents (8 vertices, 12 triangles).
pub fn box_mesh(center: Vector3<f64>, half: Vector3<f64>) -> TriMesh {
    subdivided_box(center, half, 1)
}

/// The `[0, 1]^3` cube.
pub fn unit_cube() -> TriMesh {
    box_mesh(Vector3::repeat(0.5), Vector3::repeat(0.5))
}

/// Box surface split into an `n x n` grid of quads per face, with shared
/// vertices along edges.
pub fn subdivided_box(center: Vector3<f64>, half: Vector3<f64>, n: usize) -> TriMesh {
    assert!(n >= 1);
    let mut ids: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vertex = |l: [usize; 3]| -> usize {
        *ids.entry(l).or_insert_with(|| {
            let p = Vector3::from(l.map(|c| c as f64 / n as f64 * 2.0 - 1.0));
            vertices.push(center + half.component_mul(&p));
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [0, n] {
            for i in 0..n {
                for j in 0..n {
                    let corner = |di: usize, dj: usize| {
                        let mut l = [0; 3];
                        l[axis] = side;
                        l[u] = i + di;
                        l[v] = j + dj;
                        l
                    };
                    let a = vertex(corner(0, 0));
                    let b = vertex(corner(1, 0));
                    let c = vertex(corner(1, 1));
                    let d = vertex(corner(0, 1));
                    if side == n {
                        triangles.push([a, b, c]);
                        triangles.push([a, c, d]);
                    } else {
                        triangles.push([a, c, b]);
                        triangles.push([a, d, c]);
                    }
                }
            }
        }
    }
    TriMesh::new(vertices, triangles).expect("box mesh is valid")
}

/// Latitude/longitude sphere centered at the origin.
pub fn uv_sphere(radius: f64, stacks: usize, slices: usize) -> TriMesh {
    assert!(stacks >= 2 && slices >= 3);
    let mut vertices = vec![Vector3::new(0.0, 0.0, radius)];
    for i in 1..stacks {
        let theta = std::f64::consts::PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / slices as f64;
            vertices.push(radius * Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()));
        }
    }
    vertices.push(Vector3::new(0.0, 0.0, -radius));
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * slices + j % slices;
    let mut triangles = Vec::new();
    for j in 0..slices {
        triangles.push([0, ring(1, j), ring(1, j + 1)]);
        triangles.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            triangles.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            triangles.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, triangles).expect("sphere mesh is valid")
}

/// Rectangular opening in a wall, centered at `(y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub y: f64,
    pub z: f64,
    pub width: f64,
    pub height: f64,
}

impl Window {
    pub fn square(y: f64, z: f64, size: f64) -> Self {
        Window {
            y,
            z,
            width: size,
            height: size,
        }
    }

    fn y_range(&self) -> [f64; 2] {
        [self.y - self.width / 2.0, self.y + self.width / 2.0]
    }

    fn z_range(&self) -> [f64; 2] {
        [self.z - self.height / 2.0, self.z + self.height / 2.0]
    }
}

/// Wall slab perpendicular to x, centered at `x = 0`, spanning `y_range` and
/// `z_range`, with rectangular through-holes. Built from non-overlapping boxes.
pub fn wall_with_windows(thickness: f64, y_range: [f64; 2], z_range: [f64; 2], windows: &[Window]) -> TriMesh {
    let mut ys = vec![y_range[0], y_range[1]];
    let mut zs = vec![z_range[0], z_range[1]];
    for w in windows {
        ys.extend(w.y_range());
        zs.extend(w.z_range());
    }
    let clean = |v: &mut Vec<f64>, r: [f64; 2]| {
        v.retain(|c| *c >= r[0] && *c <= r[1]);
        v.sort_by(f64::total_cmp);
        v.dedup();
    };
    clean(&mut ys, y_range);
    clean(&mut zs, z_range);
    let mut cells = Vec::new();
    for yw in ys.windows(2) {
        for zw in zs.windows(2) {
            let (cy, cz) = ((yw[0] + yw[1]) / 2.0, (zw[0] + zw[1]) / 2.0);
            let open = windows.iter().any(|w| {
                let (wy, wz) = (w.y_range(), w.z_range());
                cy > wy[0] && cy < wy[1] && cz > wz[0] && cz < wz[1]
            });
            if !open {
                cells.push(box_mesh(
                    Vector3::new(0.0, cy, cz),
                    Vector3::new(thickness / 2.0, (yw[1] - yw[0]) / 2.0, (zw[1] - zw[0]) / 2.0),
                ));
            }
        }
    }
    TriMesh::merge(&cells).expect("wall has at least one solid cell")
}

/// Adds isotropic uniform noise in `[-amplitude, amplitude]` to every vertex.
pub fn jitter<R: Rng + ?Sized>(mesh: &TriMesh, amplitude: f64, rng: &mut R) -> TriMesh {
    mesh.map_vertices(|v| {
        v + Vector3::new(
            rng.random_range(-amplitude..=amplitude),
            rng.random_range(-amplitude..=amplitude),
            rng.random_range(-amplitude..=amplitude),
        )
    })
    .expect("small jitter keeps a mesh valid")
}

/// An L-shaped bracket with an off-center tab: no mirror or rotational
/// symmetry and distinct principal axes.
pub fn bracket(n: usize) -> TriMesh {
    TriMesh::merge(&[
        subdivided_box(Vector3::new(0.0, 0.0, 0.0), Vector3::new(1.0, 0.45, 0.15), n),
        subdivided_box(Vector3::new(0.85, 0.0, 0.45), Vector3::new(0.15, 0.45, 0.35), n),
        subdivided_box(Vector3::new(-0.6, 0.3, -0.3), Vector3::new(0.2, 0.1, 0.15), n),
    ])
    .expect("bracket is valid")
}
