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


use std::collections::BTreeMap;
use std::path::Path as FsPath;

use nalgebra::Vector3;
use pathlib_core::bench::{
    quantile, read_csv, run_bench, summarize, time_limits, write_csv, PlannerKind, PreparedScenario, Scenario, ScenarioFile,
};
use pathlib_core::mesh::primitives::{box_mesh, wall_with_windows, Window};
use pathlib_core::mesh::write_obj;
use pathlib_core::planner::PlannerParams;
use pathlib_core::{Configuration, SampleBounds};

fn write_meshes(dir: &FsPath) {
    let env = wall_with_windows(1.0, [-5.0, 5.0], [-3.0, 3.0], &[Window::square(0.0, 0.0, 1.5)]);
    std::fs::write(dir.join("wall.obj"), write_obj(&env)).unwrap();
    std::fs::write(dir.join("cube.obj"), write_obj(&box_mesh(Vector3::zeros(), Vector3::repeat(0.4)))).unwrap();
}

fn scenario(id: &str, planners: Vec<PlannerKind>, runs: usize) -> Scenario {
    Scenario {
        id: id.into(),
        env_mesh: "wall.obj".into(),
        query_mesh: "cube.obj".into(),
        start: Configuration::from_translation(-3.0, 0.0, 0.0),
        goal: Configuration::from_translation(3.0, 0.0, 0.0),
        bounds: SampleBounds::new([-6.0, -4.0, -2.0], [6.0, 4.0, 2.0]).unwrap(),
        planners,
        params: PlannerParams { max_iterations: 100_000, ..PlannerParams::default() },
        runs,
        time_limit: 30.0,
        seed_base: 100,
        library: None,
        env_id: None,
        strict: false,
    }
}

#[test]
fn rows_cover_the_grid_and_summary_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    write_meshes(dir.path());
    let file = ScenarioFile { scenarios: vec![scenario("w", vec![PlannerKind::Rrt, PlannerKind::RrtConnect], 5)] };
    std::fs::write(dir.path().join("s.json"), serde_json::to_string(&file).unwrap()).unwrap();
    let file = ScenarioFile::load(&dir.path().join("s.json")).unwrap();
    let prepared: Vec<_> = file.scenarios.iter().map(|s| PreparedScenario::load(s, Some(dir.path())).unwrap()).collect();
    let out = run_bench(&prepared, 2).unwrap();
    assert_eq!(out.len(), 10);
    let rows: Vec<_> = out.iter().map(|o| o.row.clone()).collect();
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.planner, if i < 5 { PlannerKind::Rrt } else { PlannerKind::RrtConnect });
        assert_eq!(r.run, i % 5);
        assert_eq!(r.seed, 100 + (i % 5) as u64);
        assert_eq!(r.success, r.path_len.is_some());
        assert_eq!(r.success, r.waypoints.is_some());
        assert!(r.time_s <= 30.0 + 1.0);
    }
    for o in &out {
        assert_eq!(o.path.as_ref().map(|p| p.len()), o.row.waypoints);
    }
    let csv = dir.path().join("results.csv");
    write_csv(&csv, &rows).unwrap();
    let back = read_csv(&csv).unwrap();
    assert_eq!(back, rows);
    let summary = summarize(&back, &time_limits(&file.scenarios));

    // independent recomputation straight from the CSV text
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut by_planner: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let t = if f[4] == "true" { f[5].parse::<f64>().unwrap().min(30.0) } else { 30.0 };
        by_planner.entry(f[1].to_string()).or_default().push(t);
    }
    for e in &summary.entries {
        let mut t = by_planner[e.planner.name()].clone();
        t.sort_by(f64::total_cmp);
        let median = if t.len() % 2 == 1 { t[t.len() / 2] } else { (t[t.len() / 2 - 1] + t[t.len() / 2]) / 2.0 };
        assert_eq!(e.median_s, median);
        assert_eq!(e.q1_s, quantile(&t, 0.25));
        assert_eq!(e.runs, 5);
    }
}

#[test]
fn runs_do_not_depend_on_earlier_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_meshes(dir.path());
    let s = scenario("w", vec![PlannerKind::Rrt], 4);
    let full = run_bench(&[PreparedScenario::load(&s, Some(dir.path())).unwrap()], 1).unwrap();
    let alone = PreparedScenario::load(&s, Some(dir.path())).unwrap().run(PlannerKind::Rrt, 3);
    let a = &full[3].row;
    assert_eq!((a.seed, a.success, a.iterations, a.path_len), (alone.row.seed, alone.row.success, alone.row.iterations, alone.row.path_len));
    assert_eq!(full[3].path, alone.path);
}

#[test]
fn planner_errors_become_failure_rows() {
    let dir = tempfile::tempdir().unwrap();
    write_meshes(dir.path());
    let mut s = scenario("bad", vec![PlannerKind::Rrt, PlannerKind::RrtConnect], 2);
    s.start = Configuration::from_translation(0.5, 2.0, 0.0);
    let out = run_bench(&[PreparedScenario::load(&s, Some(dir.path())).unwrap()], 1).unwrap();
    assert_eq!(out.len(), 4);
    assert!(out.iter().all(|o| !o.row.success && o.row.path_len.is_none()));
    let summary = summarize(&out.iter().map(|o| o.row.clone()).collect::<Vec<_>>(), &time_limits(&[s]));
    assert!(summary.entries.iter().all(|e| e.success_rate == 0.0 && e.median_s == 30.0));
}

#[test]
fn missing_mesh_is_a_scenario_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("w", vec![PlannerKind::Rrt], 1);
    assert!(PreparedScenario::load(&s, Some(dir.path())).is_err());
}
