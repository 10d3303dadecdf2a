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


use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pathlib_core::bench::{run_bench, summarize, time_limits, write_csv, write_summary, PreparedScenario, ScenarioFile};
use pathlib_core::library::{prepare, EnvironmentEntry, MeshStore, PathLibrary, PrepareParams, PrepareRequest};
use pathlib_core::pipeline::{plan_with_library, GuidedParams};
use pathlib_core::planner::{PlannerParams, PlanningProblem};
use pathlib_core::{load_mesh, Configuration, SampleBounds};

const SEED_ENV: &str = "PATHLIB_SEED";

#[derive(Parser)]
#[command(name = "pathlib", version, about = "Template path libraries for rigid-body planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a library from a template x environment config.
    Prepare(PrepareArgs),
    /// Plan for a query object using a library.
    Plan(PlanArgs),
    /// Run benchmark scenarios and write CSV rows and a summary.
    Bench(BenchArgs),
}

#[derive(Args)]
struct PrepareArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    lib: PathBuf,
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    env: String,
    /// x,y,z,qw,qx,qy,qz
    #[arg(long, value_parser = parse_config, allow_hyphen_values = true)]
    start: Configuration,
    #[arg(long, value_parser = parse_config, allow_hyphen_values = true)]
    goal: Configuration,
    /// Fail instead of planning unguided when no template exists.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: PathBuf,
    /// Overall time limit in seconds, setup included.
    #[arg(long, default_value_t = 120.0)]
    time_limit: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the timing report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the waypoints of every solved run under `<out-dir>/paths`.
    #[arg(long)]
    save_paths: bool,
}

fn parse_config(s: &str) -> Result<Configuration, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 7] = v.try_into().map_err(|v: Vec<f64>| format!("expected 7 numbers, got {}", v.len()))?;
    Configuration::from_array(arr).ok_or_else(|| "non-finite value or zero quaternion".to_string())
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{SEED_ENV}={v:?} is not an integer"))?)),
        Err(_) => Ok(None),
    }
}

#[derive(Deserialize)]
struct PrepareConfig {
    #[serde(default)]
    params: PrepareParams,
    #[serde(default)]
    sim_threshold: Option<f64>,
    templates: Vec<TemplateSpec>,
    environments: Vec<EnvironmentSpec>,
}

#[derive(Deserialize)]
struct TemplateSpec {
    id: String,
    mesh: PathBuf,
}

#[derive(Deserialize)]
struct EnvironmentSpec {
    id: String,
    mesh: PathBuf,
    bounds: SampleBounds,
    start: Configuration,
    goal: Configuration,
}

fn absolute(base: &FsPath, p: &FsPath) -> Result<PathBuf> {
    let joined = if p.is_relative() { base.join(p) } else { p.to_path_buf() };
    joined.canonicalize().with_context(|| format!("cannot resolve {}", joined.display()))
}

fn cmd_prepare(args: &PrepareArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg: PrepareConfig = serde_json::from_str(&text).context("parsing prepare config")?;
    if let Some(seed) = seed_override()? {
        cfg.params.planner.seed = seed;
    }
    let base = args.config.parent().unwrap_or(FsPath::new(".")).to_path_buf();
    let mut lib = PathLibrary::new(cfg.params.planner.weights, cfg.params.d_min);
    if let Some(t) = cfg.sim_threshold {
        lib.sim_threshold = t;
    }
    let mut envs = Vec::new();
    for e in &cfg.environments {
        let path = absolute(&base, &e.mesh)?;
        let mesh = load_mesh(&path).with_context(|| format!("environment {}", e.id))?;
        lib.environments.insert(
            e.id.clone(),
            EnvironmentEntry { mesh_path: path.display().to_string(), mesh_hash: Some(mesh.content_hash()), bounds: e.bounds },
        );
        envs.push((e, mesh));
    }
    let mut failures = 0;
    for t in &cfg.templates {
        let path = absolute(&base, &t.mesh)?;
        let template = load_mesh(&path).with_context(|| format!("template {}", t.id))?;
        let mesh_path = path.display().to_string();
        for (e, env_mesh) in &envs {
            let req = PrepareRequest {
                object_id: &t.id,
                template: &template,
                mesh_path: &mesh_path,
                env_id: &e.id,
                environment: env_mesh,
                start: e.start,
                goal: e.goal,
                bounds: e.bounds,
            };
            match prepare(&req, &cfg.params, &lib.matcher) {
                Ok(done) => {
                    println!(
                        "{} x {}: {} paths, {} attempts, {:.2} s",
                        t.id,
                        e.id,
                        done.record.paths.len(),
                        done.attempts,
                        done.elapsed_s
                    );
                    lib.insert(done.record)?;
                }
                Err(err) => {
                    failures += 1;
                    eprintln!("{} x {}: failed: {err}", t.id, e.id);
                }
            }
        }
    }
    lib.save(&args.out)?;
    println!("wrote {} records to {}", lib.records.len(), args.out.display());
    Ok(if failures > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

#[derive(Serialize)]
struct PlanReport {
    success: bool,
    template: Option<String>,
    similarity: Option<f64>,
    unguided: bool,
    similarity_s: f64,
    icp_s: f64,
    planning_s: f64,
    total_s: f64,
    iterations: u64,
    waypoints: usize,
    path_length: f64,
}

fn cmd_plan(args: &PlanArgs) -> Result<ExitCode> {
    let lib = PathLibrary::load(&args.lib)?;
    let entry = match lib.environments.get(&args.env) {
        Some(e) => e,
        None => bail!("environment {:?} is not in the library", args.env),
    };
    let base = args.lib.parent().map(FsPath::to_path_buf);
    let mut store = MeshStore::new(base);
    let environment = store.get(&entry.mesh_path, entry.mesh_hash.as_deref())?.clone();
    let query = load_mesh(&args.query)?;
    let seed = seed_override()?.or(args.seed).unwrap_or(0);
    let params = GuidedParams {
        planner: PlannerParams { max_time: args.time_limit, seed, weights: lib.metric_weights, ..PlannerParams::default() },
        strict: args.strict,
        ..GuidedParams::default()
    };
    let problem = PlanningProblem { object: &query, environment: &environment, start: args.start, goal: args.goal, bounds: entry.bounds };
    let plan = plan_with_library(&lib, &mut store, &problem, &args.env, &params)?;
    let stats = &plan.outcome.stats;
    let report = PlanReport {
        success: stats.success,
        template: plan.template.clone(),
        similarity: plan.similarity,
        unguided: plan.unguided,
        similarity_s: plan.timing.similarity_s,
        icp_s: plan.timing.icp_s,
        planning_s: plan.timing.planning_s,
        total_s: plan.timing.total_s,
        iterations: stats.iterations,
        waypoints: stats.waypoints,
        path_length: stats.path_length,
    };
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(p) = &args.report {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    match &plan.outcome.path {
        Some(path) => {
            std::fs::write(&args.out, serde_json::to_string(path)?).with_context(|| format!("writing {}", args.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            eprintln!("no path found within {} s", args.time_limit);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let mut file = ScenarioFile::load(&args.scenarios)?;
    if let Some(seed) = seed_override()? {
        for s in &mut file.scenarios {
            s.seed_base = seed;
        }
    }
    let base = args.scenarios.parent().map(FsPath::to_path_buf);
    let prepared = file
        .scenarios
        .iter()
        .map(|s| PreparedScenario::load(s, base.as_deref()))
        .collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let out = run_bench(&prepared, args.jobs)?;
    let rows: Vec<_> = out.iter().map(|o| o.row.clone()).collect();
    write_csv(&args.out_dir.join("results.csv"), &rows)?;
    let summary = summarize(&rows, &time_limits(&file.scenarios));
    write_summary(&args.out_dir.join("summary.json"), &summary)?;
    if args.save_paths {
        let dir = args.out_dir.join("paths");
        std::fs::create_dir_all(&dir)?;
        for o in &out {
            if let Some(p) = &o.path {
                let name = format!("{}_{}_{}.json", o.row.scenario, o.row.planner, o.row.run);
                std::fs::write(dir.join(name), serde_json::to_string(p)?)?;
            }
        }
    }
    for e in &summary.entries {
        println!(
            "{} {}: {}/{} solved, median {:.3} s (q1 {:.3}, q3 {:.3})",
            e.scenario, e.planner, e.successes, e.runs, e.median_s, e.q1_s, e.q3_s
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prepare(a) => cmd_prepare(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
