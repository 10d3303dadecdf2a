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


use std::path::Path;
use std::process::Command;

use nalgebra::Vector3;
use pathlib_core::mesh::primitives::{box_mesh, bracket, wall_with_windows, Window};
use pathlib_core::mesh::write_obj;
use pathlib_core::PathLibrary;
use serde_json::json;

fn pathlib() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pathlib"));
    c.env_remove("PATHLIB_SEED");
    c
}

fn setup(dir: &Path) {
    let window = wall_with_windows(1.0, [-5.0, 5.0], [-3.0, 3.0], &[Window::square(0.0, 0.0, 1.5)]);
    let open = box_mesh(Vector3::new(40.0, 40.0, 40.0), Vector3::repeat(0.5));
    let sealed = wall_with_windows(1.0, [-5.0, 5.0], [-3.0, 3.0], &[]);
    for (name, m) in [
        ("window.obj", window),
        ("open.obj", open),
        ("sealed.obj", sealed),
        ("cube.obj", box_mesh(Vector3::zeros(), Vector3::repeat(1.0))),
        ("slab.obj", box_mesh(Vector3::zeros(), Vector3::new(1.0, 0.4, 0.2))),
        ("bracket.obj", bracket(2)),
    ] {
        std::fs::write(dir.join(name), write_obj(&m)).unwrap();
    }
}

fn env(id: &str, mesh: &str) -> serde_json::Value {
    json!({
        "id": id, "mesh": mesh,
        "bounds": {"min": [-6.0, -4.0, -2.0], "max": [6.0, 4.0, 2.0]},
        "start": [-3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        "goal": [3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
    })
}

fn params() -> serde_json::Value {
    json!({"patience": 2, "budget_s": 5.0, "planner": {"max_iterations": 5000, "max_time": 5.0}})
}

fn write_config(dir: &Path, templates: &[&str], envs: Vec<serde_json::Value>) -> std::path::PathBuf {
    let templates: Vec<_> = templates.iter().map(|t| json!({"id": t, "mesh": format!("{t}.obj")})).collect();
    let cfg = json!({"params": params(), "templates": templates, "environments": envs});
    let p = dir.join("prepare.json");
    std::fs::write(&p, cfg.to_string()).unwrap();
    p
}

#[test]
fn prepare_one_record() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let cfg = write_config(dir.path(), &["cube"], vec![env("window", "window.obj")]);
    let out = dir.path().join("lib.json");
    let o = pathlib().args(["prepare", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("cube x window"));
    let lib = PathLibrary::load(&out).unwrap();
    assert_eq!(lib.records.len(), 1);
    assert!(lib.environments.contains_key("window"));
}

#[test]
fn prepare_grid_and_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let cfg = write_config(dir.path(), &["cube", "slab", "bracket"], vec![env("window", "window.obj"), env("open", "open.obj")]);
    let out = dir.path().join("lib.json");
    let o = pathlib().args(["prepare", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(PathLibrary::load(&out).unwrap().records.len(), 6);

    let cfg = write_config(dir.path(), &["cube"], vec![env("window", "window.obj"), env("sealed", "sealed.obj")]);
    let o = pathlib().args(["prepare", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cube x sealed: failed"));
    assert_eq!(PathLibrary::load(&out).unwrap().records.len(), 1);
}

fn prepared_library(dir: &Path) -> std::path::PathBuf {
    setup(dir);
    let cfg = write_config(dir, &["cube"], vec![env("window", "window.obj"), env("open", "open.obj")]);
    let out = dir.join("lib.json");
    let o = pathlib().args(["prepare", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success());
    out
}

#[test]
fn plan_with_identical_query() {
    let dir = tempfile::tempdir().unwrap();
    let lib = prepared_library(dir.path());
    // the library paths were made for the cube at 0.4 scale
    let small = box_mesh(Vector3::zeros(), Vector3::repeat(0.4));
    std::fs::write(dir.path().join("small.obj"), write_obj(&small)).unwrap();
    let out = dir.path().join("path.json");
    let report = dir.path().join("report.json");
    let o = pathlib()
        .args(["plan", "--lib"])
        .arg(&lib)
        .arg("--query")
        .arg(dir.path().join("small.obj"))
        .args(["--env", "window", "--start", "-3,0,0,1,0,0,0", "--goal", "3,0,0,1,0,0,0", "--time-limit", "30", "--out"])
        .arg(&out)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["success"], true);
    assert_eq!(r["template"], "cube");
    for key in ["similarity_s", "icp_s", "planning_s", "total_s"] {
        assert!(r[key].as_f64().unwrap() >= 0.0);
    }
    let path: Vec<[f64; 7]> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(path[0], [-3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    assert_eq!(*path.last().unwrap(), [3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn plan_errors() {
    let dir = tempfile::tempdir().unwrap();
    let lib = prepared_library(dir.path());
    let run = |env: &str, strict: bool| {
        let mut c = pathlib();
        c.args(["plan", "--lib"])
            .arg(&lib)
            .arg("--query")
            .arg(dir.path().join("cube.obj"))
            .args(["--env", env, "--start", "-3,0,0,1,0,0,0", "--goal", "3,0,0,1,0,0,0", "--out"])
            .arg(dir.path().join("p.json"));
        if strict {
            c.arg("--strict");
        }
        c.output().unwrap()
    };
    let o = run("nowhere", true);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere"));
    let o = pathlib().args(["plan", "--lib", "x.json", "--query", "q.obj", "--env", "e", "--start", "1,2,3", "--goal", "0,0,0,1,0,0,0", "--out", "p"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 7 numbers"));
}

#[test]
fn plan_without_templates_falls_back_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let lib_path = prepared_library(dir.path());
    let mut lib = PathLibrary::load(&lib_path).unwrap();
    lib.records.retain(|r| r.env_id != "open");
    lib.save(&lib_path).unwrap();
    let small = box_mesh(Vector3::zeros(), Vector3::repeat(0.4));
    std::fs::write(dir.path().join("small.obj"), write_obj(&small)).unwrap();
    let run = |strict: bool| {
        let mut c = pathlib();
        c.args(["plan", "--lib"])
            .arg(&lib_path)
            .arg("--query")
            .arg(dir.path().join("small.obj"))
            .args(["--env", "open", "--start", "-3,0,0,1,0,0,0", "--goal", "3,0,0,1,0,0,0", "--out"])
            .arg(dir.path().join("p.json"));
        if strict {
            c.arg("--strict");
        }
        c.output().unwrap()
    };
    let o = run(false);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["unguided"], true);
    let o = run(true);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no library record"));
}

#[test]
fn bench_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let small = box_mesh(Vector3::zeros(), Vector3::repeat(0.4));
    std::fs::write(dir.path().join("small.obj"), write_obj(&small)).unwrap();
    let scenarios = json!({"scenarios": [{
        "id": "win", "env_mesh": "window.obj", "query_mesh": "small.obj",
        "start": [-3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], "goal": [3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        "bounds": {"min": [-6.0, -4.0, -2.0], "max": [6.0, 4.0, 2.0]},
        "planners": ["rrt", "rrt-connect"], "runs": 5, "time_limit": 20.0, "seed_base": 7
    }]});
    let sfile = dir.path().join("scenarios.json");
    std::fs::write(&sfile, scenarios.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = pathlib()
        .args(["bench", "--scenarios"])
        .arg(&sfile)
        .arg("--out-dir")
        .arg(&out)
        .args(["--jobs", "2", "--save-paths"])
        .env("PATHLIB_SEED", "40")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "scenario,planner,run,seed,success,time_s,setup_s,iterations,path_len,waypoints");
    assert_eq!(lines.len(), 11);
    let seeds: Vec<u64> = lines[1..].iter().map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(&seeds[..5], &[40, 41, 42, 43, 44]);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["entries"].as_array().unwrap().len(), 2);
    let solved = lines[1..].iter().filter(|l| l.split(',').nth(4) == Some("true")).count();
    assert_eq!(std::fs::read_dir(out.join("paths")).unwrap().count(), solved);
}
