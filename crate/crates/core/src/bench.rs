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

//! Benchmark runner: seeded repeated runs per scenario and planner, CSV
//! rows and censored runtime summaries.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diversity::Path;
use crate::library::{LibraryError, MeshStore, PathLibrary};
use crate::mesh::{load_mesh, MeshError, TriMesh};
use crate::pipeline::{plan_with_library, GuidedParams};
use crate::planner::{rrt_connect_plan, rrt_plan, PlannerParams, PlanningProblem};
use crate::se3::{Configuration, SampleBounds};

/// Column order of the results CSV.
pub const CSV_HEADER: [&str; 10] =
    ["scenario", "planner", "run", "seed", "success", "time_s", "setup_s", "iterations", "path_len", "waypoints"];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("scenario {0:?}: {1}")]
    Invalid(String, String),
    #[error("scenario {scenario:?}: {source}")]
    Mesh { scenario: String, source: MeshError },
    #[error("scenario {scenario:?}: {source}")]
    Library { scenario: String, source: LibraryError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "rrt")]
    Rrt,
    #[serde(rename = "rrt-connect")]
    RrtConnect,
    #[serde(rename = "rrt-lib")]
    RrtLib,
}

impl PlannerKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::RrtConnect => "rrt-connect",
            PlannerKind::RrtLib => "rrt-lib",
        }
    }
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One benchmark scenario. Mesh and library paths are relative to the
/// scenario file unless absolute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub env_mesh: String,
    pub query_mesh: String,
    pub start: Configuration,
    pub goal: Configuration,
    pub bounds: SampleBounds,
    pub planners: Vec<PlannerKind>,
    #[serde(default)]
    pub params: PlannerParams,
    pub runs: usize,
    pub time_limit: f64,
    #[serde(default)]
    pub seed_base: u64,
    /// Library file, needed by `rrt-lib`.
    #[serde(default)]
    pub library: Option<String>,
    /// Environment id inside the library; defaults to the scenario id.
    #[serde(default)]
    pub env_id: Option<String>,
    #[serde(default)]
    pub strict: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Invalid(self.id.clone(), m.to_string()));
        if self.runs < 1 {
            return bad("runs must be at least 1");
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return bad("time_limit must be positive");
        }
        if self.planners.is_empty() {
            return bad("no planners listed");
        }
        if !self.bounds.is_valid() {
            return bad("invalid bounds");
        }
        if self.planners.contains(&PlannerKind::RrtLib) && self.library.is_none() {
            return bad("rrt-lib needs a library");
        }
        Ok(())
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.seed_base.wrapping_add(run as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

impl ScenarioFile {
    pub fn load(path: &FsPath) -> Result<ScenarioFile, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario: String,
    pub planner: PlannerKind,
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    pub time_s: f64,
    pub setup_s: f64,
    pub iterations: u64,
    pub path_len: Option<f64>,
    pub waypoints: Option<usize>,
}

/// Loaded inputs of a scenario, shared read-only by its runs.
pub struct PreparedScenario {
    pub scenario: Scenario,
    pub environment: TriMesh,
    pub query: TriMesh,
    pub library: Option<(PathLibrary, MeshStore)>,
}

fn resolve(base: Option<&FsPath>, p: &str) -> PathBuf {
    match base {
        Some(dir) if FsPath::new(p).is_relative() => dir.join(p),
        _ => PathBuf::from(p),
    }
}

impl PreparedScenario {
    pub fn load(scenario: &Scenario, base_dir: Option<&FsPath>) -> Result<Self, BenchError> {
        scenario.validate()?;
        let mesh = |p: &str| {
            load_mesh(&resolve(base_dir, p)).map_err(|source| BenchError::Mesh { scenario: scenario.id.clone(), source })
        };
        let environment = mesh(&scenario.env_mesh)?;
        let query = mesh(&scenario.query_mesh)?;
        let library = match &scenario.library {
            Some(p) => {
                let path = resolve(base_dir, p);
                let lib = PathLibrary::load(&path).map_err(|source| BenchError::Library { scenario: scenario.id.clone(), source })?;
                let mut store = MeshStore::new(path.parent().map(FsPath::to_path_buf));
                for r in &lib.records {
                    store.template(r).map_err(|source| BenchError::Library { scenario: scenario.id.clone(), source })?;
                }
                Some((lib, store))
            }
            None => None,
        };
        Ok(PreparedScenario { scenario: scenario.clone(), environment, query, library })
    }

    fn env_id(&self) -> &str {
        self.scenario.env_id.as_deref().unwrap_or(&self.scenario.id)
    }

    /// Executes one seeded run. Errors and panics become failure rows.
    pub fn run(&self, planner: PlannerKind, run: usize) -> RunOutput {
        let s = &self.scenario;
        let seed = s.seed(run);
        let clock = Instant::now();
        let attempt = catch_unwind(AssertUnwindSafe(|| self.execute(planner, seed)));
        let mut row = RunResult {
            scenario: s.id.clone(),
            planner,
            run,
            seed,
            success: false,
            time_s: 0.0,
            setup_s: 0.0,
            iterations: 0,
            path_len: None,
            waypoints: None,
        };
        let mut path = None;
        match attempt {
            Ok(Ok(done)) => {
                row.success = done.success;
                row.time_s = done.time_s;
                row.setup_s = done.setup_s;
                row.iterations = done.iterations;
                if done.success {
                    row.path_len = Some(done.path_len);
                    row.waypoints = Some(done.waypoints);
                }
                path = done.path;
            }
            Ok(Err(msg)) => {
                log::warn!("{} {} run {run}: {msg}", s.id, planner);
                row.time_s = clock.elapsed().as_secs_f64();
            }
            Err(_) => {
                log::error!("{} {} run {run}: planner panicked", s.id, planner);
                row.time_s = clock.elapsed().as_secs_f64();
            }
        }
        RunOutput { row, path }
    }

    fn execute(&self, planner: PlannerKind, seed: u64) -> Result<Done, String> {
        let s = &self.scenario;
        let params = PlannerParams { max_time: s.time_limit, seed, ..s.params.clone() };
        let problem = PlanningProblem {
            object: &self.query,
            environment: &self.environment,
            start: s.start,
            goal: s.goal,
            bounds: s.bounds,
        };
        let (outcome, setup_s, time_s) = match planner {
            PlannerKind::Rrt => {
                let o = rrt_plan(&problem, &params).map_err(|e| e.to_string())?;
                let t = o.stats.wall_time_s;
                (o, 0.0, t)
            }
            PlannerKind::RrtConnect => {
                let o = rrt_connect_plan(&problem, &params).map_err(|e| e.to_string())?;
                let t = o.stats.wall_time_s;
                (o, 0.0, t)
            }
            PlannerKind::RrtLib => {
                let (lib, store) = self.library.as_ref().ok_or("rrt-lib needs a library")?;
                let mut store = store.clone();
                let guided = GuidedParams { planner: params, strict: s.strict, ..GuidedParams::default() };
                let g = plan_with_library(lib, &mut store, &problem, self.env_id(), &guided).map_err(|e| e.to_string())?;
                (g.outcome, g.timing.setup_s(), g.timing.total_s)
            }
        };
        let stats = outcome.stats;
        Ok(Done {
            path: outcome.path,
            success: stats.success,
            time_s,
            setup_s,
            iterations: stats.iterations,
            path_len: stats.path_length,
            waypoints: stats.waypoints,
        })
    }
}

struct Done {
    path: Option<Path>,
    success: bool,
    time_s: f64,
    setup_s: f64,
    iterations: u64,
    path_len: f64,
    waypoints: usize,
}

/// A CSV row plus the solution path, if any.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub row: RunResult,
    pub path: Option<Path>,
}

/// Runs every scenario x planner x run on `jobs` threads. Rows come back in
/// scenario, planner, run order regardless of scheduling.
pub fn run_bench(scenarios: &[PreparedScenario], jobs: usize) -> Result<Vec<RunOutput>, BenchError> {
    let tasks: Vec<(usize, PlannerKind, usize)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            p.scenario.planners.iter().flat_map(move |&k| (0..p.scenario.runs).map(move |r| (i, k, r)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    Ok(pool.install(|| tasks.par_iter().map(|&(i, k, r)| scenarios[i].run(k, r)).collect()))
}

/// Time limit of each scenario, keyed by id.
pub fn time_limits(scenarios: &[Scenario]) -> BTreeMap<String, f64> {
    scenarios.iter().map(|s| (s.id.clone(), s.time_limit)).collect()
}

pub fn write_csv(path: &FsPath, rows: &[RunResult]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
    Ok(())
}

pub fn read_csv(path: &FsPath) -> Result<Vec<RunResult>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<RunResult>, _>>()?)
}

/// Per scenario and planner statistics. Times of failed runs count as the
/// time limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub scenario: String,
    pub planner: PlannerKind,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub time_limit: f64,
    pub min_s: f64,
    pub q1_s: f64,
    pub median_s: f64,
    pub q3_s: f64,
    pub max_s: f64,
    pub mean_setup_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub entries: Vec<PlannerSummary>,
    pub note: String,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Time charged to a run in the summary.
pub fn censored_time(row: &RunResult, time_limit: f64) -> f64 {
    if row.success {
        row.time_s.min(time_limit)
    } else {
        time_limit
    }
}

/// Groups rows by (scenario, planner) in first-seen order.
pub fn summarize(rows: &[RunResult], time_limits: &BTreeMap<String, f64>) -> Summary {
    let mut order: Vec<(String, PlannerKind)> = Vec::new();
    let mut groups: BTreeMap<(String, PlannerKind), Vec<&RunResult>> = BTreeMap::new();
    for r in rows {
        let key = (r.scenario.clone(), r.planner);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    let entries = order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let limit = time_limits.get(&key.0).copied().unwrap_or(f64::INFINITY);
            let mut t: Vec<f64> = rs.iter().map(|r| censored_time(r, limit)).collect();
            t.sort_by(f64::total_cmp);
            let successes = rs.iter().filter(|r| r.success).count();
            PlannerSummary {
                scenario: key.0.clone(),
                planner: key.1,
                runs: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                time_limit: limit,
                min_s: t[0],
                q1_s: quantile(&t, 0.25),
                median_s: quantile(&t, 0.5),
                q3_s: quantile(&t, 0.75),
                max_s: t[t.len() - 1],
                mean_setup_s: rs.iter().map(|r| r.setup_s).sum::<f64>() / rs.len() as f64,
            }
        })
        .collect();
    Summary {
        entries,
        note: "times of failed runs are censored at the time limit; rrt-lib times include shape lookup and alignment".into(),
    }
}

pub fn write_summary(path: &FsPath, summary: &Summary) -> Result<(), BenchError> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path, text).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}
