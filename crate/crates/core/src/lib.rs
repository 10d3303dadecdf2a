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

//! Rigid-body motion planning in SE(3) guided by a library of template paths.
//!
//! Template paths are computed once per (object, environment) pair with an
//! inhibited-region RRT that keeps only mutually distinct paths. A new object
//! is matched to the closest template by shape, aligned to it with ICP, and
//! planned for with an RRT that samples densely along the transformed
//! template paths.

pub mod bench;
pub mod diversity;
pub mod icp;
pub mod library;
pub mod mesh;
pub mod pipeline;
pub mod planner;
pub mod se3;
pub mod shape;
pub mod spatial;

pub use diversity::{is_distinct, path_distance, set_distance, Path, PathError, PathSet};
pub use mesh::{load_mesh, Aabb, MeshError, TriMesh};
pub use icp::{icp_with_guess, solve_rigid, transform_paths, AlignError, IcpResult, RigidTransform};
pub use library::{prepare, select_template, LibraryError, LibraryRecord, MeshStore, PathLibrary};
pub use se3::{config_distance, Configuration, MetricWeights, Rotation, SampleBounds};
pub use shape::{CorrespondenceSet, DistributionMatcher, ShapeDescriptor, ShapeError, ShapeMatcher};
