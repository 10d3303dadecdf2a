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

//! Shape similarity and vertex correspondences between meshes.
//!
//! The default matcher compares histograms of surface point-pair distances
//! (invariant to rotation and uniform scale) and pairs vertices after
//! bringing both meshes into a PCA-canonical frame.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::TriMesh;
use crate::spatial::PointGrid;

pub const DESCRIPTOR_BINS: usize = 64;
/// Normalized distances at or beyond this fall into the last bin.
pub const DESCRIPTOR_RANGE: f64 = 3.0;
pub const DEFAULT_PAIRS: usize = 4096;
pub const DEFAULT_CORRESPONDENCES: usize = 64;
/// Covariance eigenvalues closer than this count as repeated.
pub const EIGEN_GAP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("mesh has zero surface area")]
    ZeroArea,
    #[error("descriptor bin counts differ ({0} vs {1})")]
    BinMismatch(usize, usize),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("need at least 3 correspondences, mesh has {0} vertices")]
    TooFewVertices(usize),
}

/// Normalized histogram of pairwise surface distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ShapeDescriptor {
    bins: Vec<f64>,
}

impl ShapeDescriptor {
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }
}

impl TryFrom<Vec<f64>> for ShapeDescriptor {
    type Error = ShapeError;

    fn try_from(bins: Vec<f64>) -> Result<Self, ShapeError> {
        if bins.is_empty() || bins.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(ShapeError::InvalidDescriptor("bins must be finite and nonnegative".into()));
        }
        let sum: f64 = bins.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ShapeError::InvalidDescriptor(format!("bins sum to {sum}")));
        }
        Ok(ShapeDescriptor { bins })
    }
}

impl From<ShapeDescriptor> for Vec<f64> {
    fn from(d: ShapeDescriptor) -> Self {
        d.bins
    }
}

/// Vertex index pairs `(query, template)` into the original meshes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceSet {
    pub pairs: Vec<(usize, usize)>,
    /// Set when repeated principal moments forced identity axes.
    pub degenerate_pca: bool,
}

/// Distance histogram from `n_pairs` random surface point pairs.
pub fn descriptor(mesh: &TriMesh, n_pairs: usize, seed: u64) -> Result<ShapeDescriptor, ShapeError> {
    let n_pairs = n_pairs.max(1);
    let mut cdf = Vec::with_capacity(mesh.triangles().len());
    let mut total = 0.0;
    for t in 0..mesh.triangles().len() {
        total += mesh.triangle_area(t);
        cdf.push(total);
    }
    if !(total > 0.0) {
        return Err(ShapeError::ZeroArea);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| {
        let u = rng.random::<f64>() * total;
        let t = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let (mut a, mut b) = (rng.random::<f64>(), rng.random::<f64>());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        let [p0, p1, p2] = mesh.triangle(t);
        p0 + (p1 - p0) * a + (p2 - p0) * b
    };
    let dists: Vec<f64> = (0..n_pairs)
        .map(|_| {
            let p = sample(&mut rng);
            (sample(&mut rng) - p).norm()
        })
        .collect();
    let mean = dists.iter().sum::<f64>() / n_pairs as f64;
    if !(mean > 0.0) {
        return Err(ShapeError::ZeroArea);
    }
    let mut bins = vec![0.0; DESCRIPTOR_BINS];
    let width = DESCRIPTOR_RANGE / DESCRIPTOR_BINS as f64;
    for d in dists {
        let k = ((d / mean) / width).floor() as usize;
        bins[k.min(DESCRIPTOR_BINS - 1)] += 1.0;
    }
    for b in &mut bins {
        *b /= n_pairs as f64;
    }
    Ok(ShapeDescriptor { bins })
}

/// L1 distance between histograms; lower is more similar.
pub fn similarity(a: &ShapeDescriptor, b: &ShapeDescriptor) -> Result<f64, ShapeError> {
    if a.bins.len() != b.bins.len() {
        return Err(ShapeError::BinMismatch(a.bins.len(), b.bins.len()));
    }
    Ok(a.bins.iter().zip(&b.bins).map(|(x, y)| (x - y).abs()).sum())
}

struct Canonical {
    points: Vec<Vector3<f64>>,
    degenerate: bool,
}

/// Centers on the vertex mean, scales to unit mean vertex norm and rotates
/// onto right-handed principal axes (largest moment first).
fn canonicalize(mesh: &TriMesh) -> Canonical {
    let c = mesh.centroid();
    let verts = mesh.vertices();
    let n = verts.len() as f64;
    let scale = verts.iter().map(|v| (v - c).norm()).sum::<f64>() / n;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let centered: Vec<Vector3<f64>> = verts.iter().map(|v| (v - c) / scale).collect();
    let cov = centered.iter().fold(Matrix3::zeros(), |acc, x| acc + x * x.transpose()) / n;
    let eig = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.map(|i| eig.eigenvalues[i]);
    let degenerate = vals[0] - vals[1] <= EIGEN_GAP || vals[1] - vals[2] <= EIGEN_GAP;
    let axes = if degenerate {
        Matrix3::identity()
    } else {
        let e1 = eig.eigenvectors.column(order[0]).into_owned();
        let e2 = eig.eigenvectors.column(order[1]).into_owned();
        Matrix3::from_columns(&[e1, e2, e1.cross(&e2)])
    };
    let to_frame = axes.transpose();
    Canonical { points: centered.iter().map(|x| to_frame * x).collect(), degenerate }
}

/// The four sign patterns with determinant +1.
const FLIPS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

fn flip(p: &Vector3<f64>, f: &[f64; 3]) -> Vector3<f64> {
    Vector3::new(p.x * f[0], p.y * f[1], p.z * f[2])
}

fn symmetric_rmsd(a: &[Vector3<f64>], b: &[Vector3<f64>], grid_b: &PointGrid) -> f64 {
    let grid_a = PointGrid::new(a);
    let forward: f64 = a.iter().map(|p| grid_b.nearest(p).1).sum();
    let backward: f64 = b.iter().map(|p| grid_a.nearest(p).1).sum();
    ((forward + backward) / (a.len() + b.len()) as f64).sqrt()
}

/// Farthest-point subsampling of `l` indices from a seeded start.
fn farthest_points(points: &[Vector3<f64>], l: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..points.len());
    let mut chosen = vec![first];
    let mut dist: Vec<f64> = points.iter().map(|p| (p - points[first]).norm_squared()).collect();
    while chosen.len() < l {
        let far = dist.iter().copied().fold(0.0, f64::max);
        if far == 0.0 {
            break;
        }
        // near-ties go to the lowest index so rounding cannot reorder picks
        let best = dist.iter().position(|&d| d >= far * (1.0 - 1e-9)).unwrap_or(0);
        chosen.push(best);
        for (i, p) in points.iter().enumerate() {
            dist[i] = dist[i].min((p - points[best]).norm_squared());
        }
    }
    chosen
}

/// Pairs up to `l` spread-out query vertices with their nearest template
/// vertices after canonicalization.
pub fn correspondences(query: &TriMesh, template: &TriMesh, l: usize, seed: u64) -> Result<CorrespondenceSet, ShapeError> {
    let n = query.vertices().len();
    if n < 3 || template.vertices().len() < 3 {
        return Err(ShapeError::TooFewVertices(n.min(template.vertices().len())));
    }
    let q = canonicalize(query);
    let t = canonicalize(template);
    let degenerate = q.degenerate || t.degenerate;
    if degenerate {
        log::warn!("repeated principal moments; correspondences use identity axes");
    }
    let grid_t = PointGrid::new(&t.points);
    let mut best: Option<(f64, [f64; 3])> = None;
    for f in &FLIPS {
        let flipped: Vec<_> = q.points.iter().map(|p| flip(p, f)).collect();
        let score = symmetric_rmsd(&flipped, &t.points, &grid_t);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, *f));
        }
    }
    let f = best.expect("four flips scored").1;
    let picks = farthest_points(&q.points, l.clamp(3, n), seed);
    let pairs: Vec<(usize, usize)> = picks.into_iter().map(|i| (i, grid_t.nearest(&flip(&q.points[i], &f)).0)).collect();
    if pairs.len() < 3 {
        return Err(ShapeError::TooFewVertices(pairs.len()));
    }
    Ok(CorrespondenceSet { pairs, degenerate_pca: degenerate })
}

/// Interface for shape matchers: a descriptor, a similarity on descriptors
/// and vertex correspondences.
pub trait ShapeMatcher: Send + Sync {
    fn descriptor(&self, mesh: &TriMesh) -> Result<ShapeDescriptor, ShapeError>;

    fn similarity(&self, a: &ShapeDescriptor, b: &ShapeDescriptor) -> Result<f64, ShapeError> {
        similarity(a, b)
    }

    fn correspondences(&self, query: &TriMesh, template: &TriMesh) -> Result<CorrespondenceSet, ShapeError>;
}

/// Distance-histogram descriptor with PCA-frame correspondences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistributionMatcher {
    pub n_pairs: usize,
    pub correspondences: usize,
    pub seed: u64,
}

impl Default for DistributionMatcher {
    fn default() -> Self {
        DistributionMatcher { n_pairs: DEFAULT_PAIRS, correspondences: DEFAULT_CORRESPONDENCES, seed: 0x5eed }
    }
}

impl ShapeMatcher for DistributionMatcher {
    fn descriptor(&self, mesh: &TriMesh) -> Result<ShapeDescriptor, ShapeError> {
        descriptor(mesh, self.n_pairs, self.seed)
    }

    fn correspondences(&self, query: &TriMesh, template: &TriMesh) -> Result<CorrespondenceSet, ShapeError> {
        correspondences(query, template, self.correspondences, self.seed)
    }
}
