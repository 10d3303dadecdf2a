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

//! SE(3) poses for a rigid body: composition, the weighted configuration
//! metric, interpolation and seeded uniform sampling.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Unit quaternion rotation.
///
/// Equality treats `q` and `-q` as the same rotation.
#[derive(Clone, Copy, Debug)]
pub struct Rotation(UnitQuaternion<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(UnitQuaternion::identity())
    }

    /// Builds a rotation from raw quaternion components, normalizing them.
    /// Returns `None` for a zero or non-finite quaternion.
    pub fn from_wxyz(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let q = Quaternion::new(w, x, y, z);
        let n = q.norm();
        if !n.is_finite() || n < 1e-300 {
            return None;
        }
        // Already-unit input is kept bit for bit so serialized poses round-trip.
        if (n - 1.0).abs() <= 1e-15 {
            return Some(Rotation(UnitQuaternion::new_unchecked(q)));
        }
        Some(Rotation(UnitQuaternion::new_unchecked(q / n)))
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        match nalgebra::Unit::try_new(*axis, 1e-300) {
            Some(axis) => Rotation(UnitQuaternion::from_axis_angle(&axis, angle)),
            None => Rotation::identity(),
        }
    }

    pub fn rot_x(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::x(), angle)
    }

    pub fn rot_y(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::y(), angle)
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::z(), angle)
    }

    /// Projects a (nearly) orthonormal matrix onto the closest rotation.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let rot = nalgebra::Rotation3::from_matrix_unchecked(*m);
        Rotation(UnitQuaternion::from_rotation_matrix(&rot)).renormalized()
    }

    pub fn from_unit_quaternion(q: UnitQuaternion<f64>) -> Self {
        Rotation(q).renormalized()
    }

    pub fn as_unit_quaternion(&self) -> &UnitQuaternion<f64> {
        &self.0
    }

    /// Components in `(w, x, y, z)` order.
    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.0.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        self.0.to_rotation_matrix().into_inner()
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.inverse())
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0).renormalized()
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0.transform_vector(v)
    }

    /// Geodesic angle between two rotations, in `[0, pi]`.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        let a = self.0.quaternion();
        let b = other.0.quaternion();
        // relative rotation conj(a) * b
        let w = a.w * b.w + a.i * b.i + a.j * b.j + a.k * b.k;
        let x = a.w * b.i - b.w * a.i - (a.j * b.k - a.k * b.j);
        let y = a.w * b.j - b.w * a.j - (a.k * b.i - a.i * b.k);
        let z = a.w * b.k - b.w * a.k - (a.i * b.j - a.j * b.i);
        let s = (x * x + y * y + z * z).sqrt();
        2.0 * s.atan2(w.abs())
    }

    pub fn approx_eq(&self, other: &Rotation, tol: f64) -> bool {
        self.angle_to(other) <= tol
    }

    /// Shortest-arc spherical interpolation.
    pub fn slerp(&self, other: &Rotation, s: f64) -> Rotation {
        let a = *self.0.quaternion();
        let mut b = *other.0.quaternion();
        let mut dot = a.dot(&b);
        if dot < 0.0 {
            b = -b;
            dot = -dot;
        }
        let q = if dot > 1.0 - 1e-12 {
            a * (1.0 - s) + b * s
        } else {
            let theta = dot.min(1.0).acos();
            let sin_theta = theta.sin();
            let wa = ((1.0 - s) * theta).sin() / sin_theta;
            let wb = (s * theta).sin() / sin_theta;
            a * wa + b * wb
        };
        Rotation(UnitQuaternion::new_normalize(q))
    }

    fn renormalized(self) -> Self {
        let q = *self.0.quaternion();
        let n = q.norm();
        if (n - 1.0).abs() <= 1e-15 {
            self
        } else {
            Rotation(UnitQuaternion::new_unchecked(q / n))
        }
    }
}

impl PartialEq for Rotation {
    fn eq(&self, other: &Self) -> bool {
        let a = self.wxyz();
        let b = other.wxyz();
        a == b || a.iter().zip(&b).all(|(x, y)| *x == -*y)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Rotation::identity()
    }
}

/// A pose of the moving body: translation plus rotation.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Configuration {
    pub translation: Vector3<f64>,
    pub rotation: Rotation,
}

impl Configuration {
    pub fn new(translation: Vector3<f64>, rotation: Rotation) -> Self {
        Configuration {
            translation,
            rotation,
        }
    }

    pub fn identity() -> Self {
        Configuration::default()
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Configuration::new(Vector3::new(x, y, z), Rotation::identity())
    }

    pub fn from_rotation(rotation: Rotation) -> Self {
        Configuration::new(Vector3::zeros(), rotation)
    }

    /// `[x, y, z, qw, qx, qy, qz]`
    pub fn to_array(&self) -> [f64; 7] {
        let [w, x, y, z] = self.rotation.wxyz();
        [
            self.translation.x,
            self.translation.y,
            self.translation.z,
            w,
            x,
            y,
            z,
        ]
    }

    /// Parses `[x, y, z, qw, qx, qy, qz]`; the quaternion is normalized.
    pub fn from_array(v: [f64; 7]) -> Option<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let rotation = Rotation::from_wxyz(v[3], v[4], v[5], v[6])?;
        Some(Configuration::new(Vector3::new(v[0], v[1], v[2]), rotation))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Pose applying `other` first, then `self`.
    pub fn compose(&self, other: &Configuration) -> Configuration {
        Configuration {
            translation: self.translation + self.rotation.rotate(&other.translation),
            rotation: self.rotation.compose(&other.rotation),
        }
    }

    pub fn inverse(&self) -> Configuration {
        let inv = self.rotation.inverse();
        Configuration {
            translation: -inv.rotate(&self.translation),
            rotation: inv,
        }
    }

    /// Maps a body-frame point into the world frame.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    /// Linear translation and shortest-arc rotation interpolation.
    pub fn interpolate(&self, other: &Configuration, s: f64) -> Configuration {
        if s <= 0.0 {
            return *self;
        }
        if s >= 1.0 {
            return *other;
        }
        Configuration {
            translation: self.translation + (other.translation - self.translation) * s,
            rotation: self.rotation.slerp(&other.rotation, s),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.to_array();
        write!(
            f,
            "({:.4}, {:.4}, {:.4} | {:.4}, {:.4}, {:.4}, {:.4})",
            a[0], a[1], a[2], a[3], a[4], a[5], a[6]
        )
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = <[f64; 7]>::deserialize(deserializer)?;
        Configuration::from_array(raw)
            .ok_or_else(|| serde::de::Error::custom("invalid configuration: non-finite or zero quaternion"))
    }
}

/// Weight converting rotation angle into translation units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    /// map units per radian
    pub w_rot: f64,
}

impl MetricWeights {
    pub fn new(w_rot: f64) -> Self {
        assert!(w_rot >= 0.0, "w_rot must be nonnegative");
        MetricWeights { w_rot }
    }
}

impl Default for MetricWeights {
    fn default() -> Self {
        MetricWeights { w_rot: 0.5 }
    }
}

/// Translation distance plus weighted geodesic rotation angle.
pub fn config_distance(a: &Configuration, b: &Configuration, w: &MetricWeights) -> f64 {
    (a.translation - b.translation).norm() + w.w_rot * a.rotation.angle_to(&b.rotation)
}

/// Axis-aligned box bounding sampled translations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl SampleBounds {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Option<Self> {
        let ok = (0..3).all(|i| min[i].is_finite() && max[i].is_finite() && min[i] <= max[i]);
        ok.then_some(SampleBounds { min, max })
    }

    pub fn is_valid(&self) -> bool {
        SampleBounds::new(self.min, self.max).is_some()
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }
}

/// Uniform rotation by the subgroup algorithm (Shoemake).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    let (s2, c2) = (2.0 * PI * u2).sin_cos();
    let (s3, c3) = (2.0 * PI * u3).sin_cos();
    Rotation::from_wxyz(b * c3, a * s2, a * c2, b * s3).unwrap_or_default()
}

/// Translation uniform in `bounds`, rotation uniform on SO(3).
pub fn sample_uniform<R: Rng + ?Sized>(bounds: &SampleBounds, rng: &mut R) -> Configuration {
    let mut t = Vector3::zeros();
    for i in 0..3 {
        let u: f64 = rng.random();
        t[i] = bounds.min[i] + (bounds.max[i] - bounds.min[i]) * u;
    }
    Configuration::new(t, random_rotation(rng))
}

/// Uniform point in a ball of the given radius.
pub fn random_in_ball<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        );
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Uniform unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = random_in_ball(1.0, rng);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}
