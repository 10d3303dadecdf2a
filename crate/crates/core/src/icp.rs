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

//! Least-squares rigid alignment and ICP seeded by correspondences.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diversity::Path;
use crate::mesh::TriMesh;
use crate::se3::{Configuration, Rotation};
use crate::shape::CorrespondenceSet;
use crate::spatial::PointGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("rigid alignment needs at least 3 point pairs, got {0}")]
    TooFewPairs(usize),
    #[error("point pairs are collinear or coincident")]
    Degenerate,
    #[error("correspondence ({0}, {1}) is out of range for the meshes")]
    IndexOutOfRange(usize, usize),
    #[error("non-finite point in alignment input")]
    NonFinite,
}

/// Rotation followed by translation: `p -> R p + t`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Configuration", into = "Configuration")]
pub struct RigidTransform {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        RigidTransform { rotation, translation }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    pub fn as_pose(&self) -> Configuration {
        Configuration::new(self.translation, self.rotation)
    }

    pub fn inverse(&self) -> Self {
        self.as_pose().inverse().into()
    }
}

impl From<Configuration> for RigidTransform {
    fn from(c: Configuration) -> Self {
        RigidTransform { rotation: c.rotation, translation: c.translation }
    }
}

impl From<RigidTransform> for Configuration {
    fn from(t: RigidTransform) -> Self {
        t.as_pose()
    }
}

/// Closed-form minimizer of `sum |b - (R a + t)|^2` over rotations and
/// translations, for pairs `(a, b)`.
pub fn solve_rigid(pairs: &[(Vector3<f64>, Vector3<f64>)]) -> Result<RigidTransform, AlignError> {
    if pairs.len() < 3 {
        return Err(AlignError::TooFewPairs(pairs.len()));
    }
    if pairs.iter().any(|(a, b)| !a.iter().chain(b.iter()).all(|x| x.is_finite())) {
        return Err(AlignError::NonFinite);
    }
    let n = pairs.len() as f64;
    let ca = pairs.iter().map(|p| p.0).sum::<Vector3<f64>>() / n;
    let cb = pairs.iter().map(|p| p.1).sum::<Vector3<f64>>() / n;
    let mut h = Matrix3::zeros();
    let mut spread = 0.0f64;
    for (a, b) in pairs {
        let da = a - ca;
        h += da * (b - cb).transpose();
        spread = spread.max(da.norm());
    }
    let svd = h.svd(true, true);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    let scale = spread * spread * n;
    // Rank below 2 leaves a free rotation about the point line.
    if !(s[0] > 1e-12 * scale.max(f64::MIN_POSITIVE)) || s[1] <= 1e-10 * s[0] {
        return Err(AlignError::Degenerate);
    }
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let r = v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let rotation = Rotation::from_matrix(&r);
    let translation = cb - rotation.rotate(&ca);
    Ok(RigidTransform { rotation, translation })
}

/// Sum of squared residuals of `pairs` under `t`.
pub fn residual(pairs: &[(Vector3<f64>, Vector3<f64>)], t: &RigidTransform) -> f64 {
    pairs.iter().map(|(a, b)| (b - t.apply(a)).norm_squared()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcpResult {
    pub transform: RigidTransform,
    /// Summed squared residual: the initial guess first, then one entry per
    /// iteration.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl IcpResult {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&0.0)
    }
}

/// ICP from `source` onto `target` starting from the alignment implied by
/// the correspondences. Each iteration pairs every source vertex with the
/// nearest target vertex under the current estimate and re-solves.
pub fn icp_with_guess(
    source: &TriMesh,
    target: &TriMesh,
    corr: &CorrespondenceSet,
    max_iterations: usize,
    eps_min: f64,
) -> Result<IcpResult, AlignError> {
    let (sv, tv) = (source.vertices(), target.vertices());
    let mut guess = Vec::with_capacity(corr.pairs.len());
    for &(i, j) in &corr.pairs {
        if i >= sv.len() || j >= tv.len() {
            return Err(AlignError::IndexOutOfRange(i, j));
        }
        guess.push((sv[i], tv[j]));
    }
    let mut transform = solve_rigid(&guess)?;
    let mut eps = residual(&guess, &transform);
    let mut residuals = vec![eps];
    let grid = PointGrid::new(tv);
    let mut k = 0;
    let mut pairs = Vec::with_capacity(sv.len());
    while k < max_iterations && eps > eps_min {
        pairs.clear();
        let mut matched = 0.0;
        for a in sv {
            let (j, d2) = grid.nearest(&transform.apply(a));
            pairs.push((*a, tv[j]));
            matched += d2;
        }
        let candidate = match solve_rigid(&pairs) {
            Ok(t) => t,
            Err(AlignError::Degenerate) => transform,
            Err(e) => return Err(e),
        };
        let new_eps = residual(&pairs, &candidate);
        // Rounding in the solve may cost a few ulps; never step uphill.
        let kept = residual(&pairs, &transform).min(matched);
        if new_eps <= kept {
            transform = candidate;
            eps = new_eps.min(eps);
        } else {
            eps = kept.min(eps);
        }
        residuals.push(eps);
        k += 1;
    }
    Ok(IcpResult { transform, residuals, iterations: k })
}

/// Re-poses template paths for a query object. `t` maps query coordinates
/// onto template coordinates, so each waypoint becomes `waypoint ∘ t`.
pub fn transform_paths(paths: &[Path], t: &RigidTransform) -> Vec<Path> {
    let pose = t.as_pose();
    paths.iter().map(|p| p.map(|q| q.compose(&pose))).collect()
}
