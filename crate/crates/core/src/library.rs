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

//! The template path library: building records, template lookup, online
//! update and persistence.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diversity::{is_distinct, Path};
use crate::mesh::{load_mesh, CollisionChecker, MeshError, TriMesh};
use crate::planner::{rrt_ir_plan, shortcut_path, smooth_rotations, PlanError, PlannerParams, PlanningProblem};
use crate::se3::{config_distance, Configuration, MetricWeights, SampleBounds};
use crate::shape::{CorrespondenceSet, DistributionMatcher, ShapeDescriptor, ShapeError, ShapeMatcher};

pub const SCHEMA_VERSION: u64 = 1;
pub const DEFAULT_SCALE_FACTOR: f64 = 0.4;
pub const DEFAULT_D_MIN: f64 = 1.20;
pub const DEFAULT_PATIENCE: usize = 20;
pub const DEFAULT_D_SAFE: f64 = 0.80;
pub const DEFAULT_BUDGET_S: f64 = 300.0;
/// Descriptor distance above which an update starts a new template.
/// 90th percentile of same-class distances on the procedural corpus.
pub const DEFAULT_SIM_THRESHOLD: f64 = 0.158;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("no library record for environment {0:?}")]
    EmptyLibrary(String),
    #[error("unknown environment {0:?}")]
    UnknownEnvironment(String),
    #[error("record ({0:?}, {1:?}) already exists")]
    DuplicateRecord(String, String),
    #[error("no path found in {attempts} attempts ({elapsed_s:.1} s)")]
    PreparationFailed { attempts: usize, elapsed_s: f64 },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("mesh {path} has hash {found}, library expects {expected}")]
    HashMismatch { path: String, expected: String, found: String },
    #[error("unsupported library schema version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedSchema(u64),
    #[error("library file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("library file is malformed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Paths for one template object in one environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryRecord {
    pub object_id: String,
    pub env_id: String,
    /// Template mesh at full size.
    pub mesh_path: String,
    pub mesh_hash: String,
    /// Scale (about the centroid) of the object that produced `paths`.
    pub scale_factor: f64,
    pub descriptor: ShapeDescriptor,
    pub paths: Vec<Path>,
}

/// Environment mesh and sampling box, so queries by id are self-contained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentEntry {
    pub mesh_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_hash: Option<String>,
    pub bounds: SampleBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLibrary {
    pub schema_version: u64,
    pub metric_weights: MetricWeights,
    pub d_min: f64,
    #[serde(default = "default_sim_threshold")]
    pub sim_threshold: f64,
    #[serde(default)]
    pub matcher: DistributionMatcher,
    #[serde(default)]
    pub environments: BTreeMap<String, EnvironmentEntry>,
    pub records: Vec<LibraryRecord>,
}

fn default_sim_threshold() -> f64 {
    DEFAULT_SIM_THRESHOLD
}

impl Default for PathLibrary {
    fn default() -> Self {
        PathLibrary {
            schema_version: SCHEMA_VERSION,
            metric_weights: MetricWeights::default(),
            d_min: DEFAULT_D_MIN,
            sim_threshold: DEFAULT_SIM_THRESHOLD,
            matcher: DistributionMatcher::default(),
            environments: BTreeMap::new(),
            records: Vec::new(),
        }
    }
}

/// Winning record of a template lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub record: usize,
    pub similarity: f64,
    pub correspondences: CorrespondenceSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    AppendedPath { record: usize },
    Rejected { record: usize },
    CreatedRecord { record: usize },
}

impl PathLibrary {
    pub fn new(metric_weights: MetricWeights, d_min: f64) -> Self {
        PathLibrary { metric_weights, d_min, ..Default::default() }
    }

    pub fn record(&self, object_id: &str, env_id: &str) -> Option<&LibraryRecord> {
        self.records.iter().find(|r| r.object_id == object_id && r.env_id == env_id)
    }

    pub fn records_for<'a>(&'a self, env_id: &'a str) -> impl Iterator<Item = (usize, &'a LibraryRecord)> + 'a {
        self.records.iter().enumerate().filter(move |(_, r)| r.env_id == env_id)
    }

    pub fn insert(&mut self, record: LibraryRecord) -> Result<usize, LibraryError> {
        if self.record(&record.object_id, &record.env_id).is_some() {
            return Err(LibraryError::DuplicateRecord(record.object_id, record.env_id));
        }
        self.records.push(record);
        Ok(self.records.len() - 1)
    }

    /// Record of `env_id` whose descriptor is closest to `query`; ties go to
    /// the smaller object id.
    pub fn nearest_record(&self, query: &ShapeDescriptor, env_id: &str) -> Result<(usize, f64), LibraryError> {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in self.records_for(env_id) {
            let s = self.matcher.similarity(query, &r.descriptor)?;
            let better = match best {
                None => true,
                Some((j, bs)) => s < bs || (s == bs && r.object_id < self.records[j].object_id),
            };
            if better {
                best = Some((i, s));
            }
        }
        best.ok_or_else(|| LibraryError::EmptyLibrary(env_id.to_string()))
    }

    /// Online update with a path found for `query`: extend the matched record
    /// if the path is new, or start a record when no template is close.
    pub fn update(
        &mut self,
        query: &TriMesh,
        query_ref: &MeshRef,
        env_id: &str,
        found: Path,
        sim_threshold: f64,
    ) -> Result<UpdateOutcome, LibraryError> {
        let desc = self.matcher.descriptor(query)?;
        match self.nearest_record(&desc, env_id) {
            Ok((i, s)) if s <= sim_threshold => {
                let rec = &mut self.records[i];
                if is_distinct(&found, &rec.paths, self.d_min, &self.metric_weights) {
                    rec.paths.push(found);
                    Ok(UpdateOutcome::AppendedPath { record: i })
                } else {
                    Ok(UpdateOutcome::Rejected { record: i })
                }
            }
            Ok(_) | Err(LibraryError::EmptyLibrary(_)) => {
                let record = self.insert(LibraryRecord {
                    object_id: query_ref.object_id.clone(),
                    env_id: env_id.to_string(),
                    mesh_path: query_ref.mesh_path.clone(),
                    mesh_hash: query.content_hash(),
                    scale_factor: 1.0,
                    descriptor: desc,
                    paths: vec![found],
                })?;
                Ok(UpdateOutcome::CreatedRecord { record })
            }
            Err(e) => Err(e),
        }
    }

    pub fn save(&self, path: &FsPath) -> Result<(), LibraryError> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|source| LibraryError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: &FsPath) -> Result<PathLibrary, LibraryError> {
        let text = fs::read_to_string(path).map_err(|source| LibraryError::Io { path: path.to_path_buf(), source })?;
        PathLibrary::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<PathLibrary, LibraryError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(SCHEMA_VERSION) => Ok(serde_json::from_value(value)?),
            Some(v) => Err(LibraryError::UnsupportedSchema(v)),
            None => Err(LibraryError::Json(serde::de::Error::missing_field("schema_version"))),
        }
    }
}

/// Identity of a mesh as stored in a record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshRef {
    pub object_id: String,
    pub mesh_path: String,
}

/// Meshes referenced by a library, keyed by content hash. Paths are
/// resolved against `base_dir` when relative.
#[derive(Clone, Debug, Default)]
pub struct MeshStore {
    base_dir: Option<PathBuf>,
    meshes: HashMap<String, TriMesh>,
}

impl MeshStore {
    pub fn new(base_dir: Option<PathBuf>) -> Self {
        MeshStore { base_dir, meshes: HashMap::new() }
    }

    /// Registers an in-memory mesh; returns its hash.
    pub fn insert(&mut self, mesh: TriMesh) -> String {
        let hash = mesh.content_hash();
        self.meshes.insert(hash.clone(), mesh);
        hash
    }

    fn resolve_path(&self, p: &str) -> PathBuf {
        let p = PathBuf::from(p);
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        }
    }

    /// Mesh with the given hash, loading `mesh_path` on a miss.
    pub fn get(&mut self, mesh_path: &str, hash: Option<&str>) -> Result<&TriMesh, LibraryError> {
        if let Some(h) = hash {
            if self.meshes.contains_key(h) {
                return Ok(&self.meshes[h]);
            }
        }
        let mesh = load_mesh(&self.resolve_path(mesh_path))?;
        let found = mesh.content_hash();
        if let Some(h) = hash {
            if h != found {
                return Err(LibraryError::HashMismatch { path: mesh_path.to_string(), expected: h.to_string(), found });
            }
        }
        Ok(self.meshes.entry(found).or_insert(mesh))
    }

    pub fn template(&mut self, record: &LibraryRecord) -> Result<&TriMesh, LibraryError> {
        self.get(&record.mesh_path, Some(&record.mesh_hash))
    }
}

/// Template lookup for a query object: best record plus correspondences
/// from the query onto that record's template mesh.
pub fn select_template(
    lib: &PathLibrary,
    store: &mut MeshStore,
    query: &TriMesh,
    env_id: &str,
) -> Result<Selection, LibraryError> {
    let desc = lib.matcher.descriptor(query)?;
    let (record, similarity) = lib.nearest_record(&desc, env_id)?;
    let template = store.template(&lib.records[record])?;
    let correspondences = lib.matcher.correspondences(query, template)?;
    Ok(Selection { record, similarity, correspondences })
}

/// Settings for building one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrepareParams {
    /// Per-attempt planner settings; `max_time` and `max_iterations` cap
    /// each attempt.
    pub planner: PlannerParams,
    pub d_min: f64,
    pub patience: usize,
    pub d_safe: f64,
    pub scale_factor: f64,
    /// Wall-clock budget for the whole record.
    pub budget_s: f64,
    /// Shortcut found paths and smooth their rotations before storing them.
    pub shortcut: bool,
    /// Waypoint spacing of stored paths.
    pub spacing: f64,
}

impl Default for PrepareParams {
    fn default() -> Self {
        PrepareParams {
            planner: PlannerParams { max_time: 20.0, max_iterations: 20_000, ..PlannerParams::default() },
            d_min: DEFAULT_D_MIN,
            patience: DEFAULT_PATIENCE,
            d_safe: DEFAULT_D_SAFE,
            scale_factor: DEFAULT_SCALE_FACTOR,
            budget_s: DEFAULT_BUDGET_S,
            shortcut: true,
            spacing: 0.25,
        }
    }
}

/// Inputs for building one record.
#[derive(Clone, Copy, Debug)]
pub struct PrepareRequest<'a> {
    pub object_id: &'a str,
    /// Full-size template; paths are planned for a scaled copy.
    pub template: &'a TriMesh,
    pub mesh_path: &'a str,
    pub env_id: &'a str,
    pub environment: &'a TriMesh,
    pub start: Configuration,
    pub goal: Configuration,
    pub bounds: SampleBounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepareStop {
    Patience,
    Budget,
}

#[derive(Clone, Debug)]
pub struct Prepared {
    pub record: LibraryRecord,
    /// Inhibited centers accumulated over all attempts.
    pub inhibited: Vec<Configuration>,
    pub attempts: usize,
    pub paths_found: usize,
    pub elapsed_s: f64,
    pub stop: PrepareStop,
}

/// Builds a record by repeated inhibited-region planning. Every found path
/// extends the inhibited set; it is stored only if distinct from the stored
/// ones. Stops after `patience` consecutive attempts without a new distinct
/// path (failed attempts count) or when the budget runs out.
pub fn prepare(
    req: &PrepareRequest<'_>,
    params: &PrepareParams,
    matcher: &dyn ShapeMatcher,
) -> Result<Prepared, LibraryError> {
    let clock = Instant::now();
    let object = req.template.scale_about_centroid(params.scale_factor)?;
    let problem = PlanningProblem {
        object: &object,
        environment: req.environment,
        start: req.start,
        goal: req.goal,
        bounds: req.bounds,
    };
    let w = params.planner.weights;
    let checker = CollisionChecker::new(&object, req.environment, w, params.planner.collision_step);
    let mut planner = params.planner.clone();
    planner.d_safe = params.d_safe;
    let mut paths: Vec<Path> = Vec::new();
    let mut inhibited: Vec<Configuration> = Vec::new();
    let (mut attempts, mut found, mut same) = (0usize, 0usize, 0usize);
    let mut stop = PrepareStop::Patience;
    while same < params.patience {
        let left = params.budget_s - clock.elapsed().as_secs_f64();
        if left <= 0.0 {
            stop = PrepareStop::Budget;
            break;
        }
        planner.seed = params.planner.seed.wrapping_add(attempts as u64);
        planner.max_time = params.planner.max_time.min(left);
        attempts += 1;
        let outcome = rrt_ir_plan(&problem, &[], &inhibited, &planner)?;
        let Some(raw) = outcome.path else {
            same += 1;
            log::debug!("attempt {attempts}: no path");
            continue;
        };
        found += 1;
        let mut path = raw;
        if params.shortcut {
            path = shortcut_path(&path, &checker);
            path = smooth_rotations(&path, &checker, 10);
            path = shortcut_path(&path, &checker);
        }
        if params.spacing > 0.0 {
            path = path.resample(params.spacing, &w);
        }
        for q in path.waypoints() {
            if config_distance(q, &req.start, &w) > params.d_safe && config_distance(q, &req.goal, &w) > params.d_safe {
                inhibited.push(*q);
            }
        }
        if is_distinct(&path, &paths, params.d_min, &w) {
            log::debug!("attempt {attempts}: distinct path #{}", paths.len() + 1);
            paths.push(path);
            same = 0;
        } else {
            same += 1;
        }
    }
    let elapsed_s = clock.elapsed().as_secs_f64();
    if paths.is_empty() {
        return Err(LibraryError::PreparationFailed { attempts, elapsed_s });
    }
    let record = LibraryRecord {
        object_id: req.object_id.to_string(),
        env_id: req.env_id.to_string(),
        mesh_path: req.mesh_path.to_string(),
        mesh_hash: req.template.content_hash(),
        scale_factor: params.scale_factor,
        descriptor: matcher.descriptor(req.template)?,
        paths,
    };
    Ok(Prepared { record, inhibited, attempts, paths_found: found, elapsed_s, stop })
}
