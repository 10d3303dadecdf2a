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


use nalgebra::Vector3;
use pathlib_core::diversity::{is_distinct, symmetric_path_distance};
use pathlib_core::library::{
    prepare, select_template, LibraryError, LibraryRecord, MeshRef, MeshStore, PathLibrary, PrepareParams, PrepareRequest,
    PrepareStop, UpdateOutcome,
};
use pathlib_core::mesh::primitives::{box_mesh, bracket, jitter, subdivided_box, uv_sphere, wall_with_windows, Window};
use pathlib_core::mesh::write_obj;
use pathlib_core::shape::{DistributionMatcher, ShapeMatcher};
use pathlib_core::{config_distance, Configuration, MetricWeights, Path, Rotation, SampleBounds, TriMesh};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn line_path(y: f64, n: usize) -> Path {
    Path::new((0..=n).map(|i| Configuration::from_translation(-4.0 + 8.0 * i as f64 / n as f64, y, 0.0)).collect()).unwrap()
}

fn record(id: &str, env: &str, mesh: &TriMesh, paths: Vec<Path>) -> LibraryRecord {
    LibraryRecord {
        object_id: id.into(),
        env_id: env.into(),
        mesh_path: format!("{id}.obj"),
        mesh_hash: mesh.content_hash(),
        scale_factor: 0.4,
        descriptor: DistributionMatcher::default().descriptor(mesh).unwrap(),
        paths,
    }
}

fn shapes() -> [(&'static str, TriMesh); 3] {
    [
        ("a-cube", subdivided_box(Vector3::zeros(), Vector3::repeat(1.0), 4)),
        ("b-slab", subdivided_box(Vector3::zeros(), Vector3::new(1.0, 0.3, 0.15), 4)),
        ("c-sphere", uv_sphere(1.0, 12, 24)),
    ]
}

fn library_with_shapes() -> (PathLibrary, MeshStore) {
    let mut lib = PathLibrary::default();
    let mut store = MeshStore::new(None);
    for (i, (id, m)) in shapes().into_iter().enumerate() {
        lib.insert(record(id, "env", &m, vec![line_path(i as f64, 8)])).unwrap();
        store.insert(m);
    }
    (lib, store)
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let empty = PathLibrary::default();
    let p = dir.path().join("empty.json");
    empty.save(&p).unwrap();
    assert_eq!(PathLibrary::load(&p).unwrap(), empty);

    let (mut lib, _) = library_with_shapes();
    lib.records[1].paths.push(Path::new(vec![Configuration::new(
        Vector3::new(0.1, 1.0 / 3.0, -2e-17),
        Rotation::from_axis_angle(&Vector3::new(1.0, 2.0, 3.0), 0.123456789),
    )]).unwrap());
    let p = dir.path().join("three.json");
    lib.save(&p).unwrap();
    let back = PathLibrary::load(&p).unwrap();
    assert_eq!(back, lib);
    for (a, b) in back.records.iter().zip(&lib.records) {
        for (pa, pb) in a.paths.iter().zip(&b.paths) {
            for (qa, qb) in pa.waypoints().iter().zip(pb.waypoints()) {
                assert_eq!(qa.to_array().map(f64::to_bits), qb.to_array().map(f64::to_bits));
            }
        }
    }
}

#[test]
fn unknown_schema_is_rejected() {
    let (lib, _) = library_with_shapes();
    let mut v = serde_json::to_value(&lib).unwrap();
    v["schema_version"] = serde_json::json!(99);
    let err = PathLibrary::from_json(&v.to_string()).unwrap_err();
    assert!(matches!(err, LibraryError::UnsupportedSchema(99)), "{err}");
    assert!(PathLibrary::from_json("{\"records\": []}").is_err());
}

#[test]
fn duplicate_keys_are_refused() {
    let (mut lib, _) = library_with_shapes();
    let m = box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
    assert!(matches!(lib.insert(record("a-cube", "env", &m, vec![line_path(0.0, 2)])), Err(LibraryError::DuplicateRecord(..))));
    assert!(lib.insert(record("a-cube", "other", &m, vec![line_path(0.0, 2)])).is_ok());
}

#[test]
fn select_template_picks_matching_class() {
    let (lib, mut store) = library_with_shapes();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, (id, m)) in shapes().iter().enumerate() {
        let noisy = jitter(m, 0.02, &mut rng);
        let sel = select_template(&lib, &mut store, &noisy, "env").unwrap();
        assert_eq!(lib.records[sel.record].object_id, *id);
        assert_eq!(sel.record, i);
        assert!(sel.correspondences.pairs.len() >= 3);
        let bigger = noisy.scale_about_centroid(3.0).unwrap();
        assert_eq!(select_template(&lib, &mut store, &bigger, "env").unwrap().record, i);
    }
}

#[test]
fn select_template_single_and_empty() {
    let mut lib = PathLibrary::default();
    let mut store = MeshStore::new(None);
    let q = bracket(2);
    assert!(matches!(select_template(&lib, &mut store, &q, "env"), Err(LibraryError::EmptyLibrary(_))));
    let sphere = uv_sphere(1.0, 8, 16);
    lib.insert(record("only", "env", &sphere, vec![line_path(0.0, 2)])).unwrap();
    store.insert(sphere);
    assert_eq!(select_template(&lib, &mut store, &q, "env").unwrap().record, 0);
    assert!(matches!(select_template(&lib, &mut store, &q, "elsewhere"), Err(LibraryError::EmptyLibrary(_))));
}

#[test]
fn ties_go_to_smaller_object_id() {
    let mut lib = PathLibrary::default();
    let m = bracket(2);
    lib.insert(record("zeta", "env", &m, vec![line_path(0.0, 2)])).unwrap();
    lib.insert(record("alpha", "env", &m, vec![line_path(0.0, 2)])).unwrap();
    let d = lib.matcher.descriptor(&m).unwrap();
    assert_eq!(lib.nearest_record(&d, "env").unwrap().0, 1);
}

#[test]
fn templates_are_loaded_from_disk_and_verified() {
    let dir = tempfile::tempdir().unwrap();
    let m = bracket(2);
    std::fs::write(dir.path().join("a-cube.obj"), write_obj(&m)).unwrap();
    let mut lib = PathLibrary::default();
    lib.insert(record("a-cube", "env", &m, vec![line_path(0.0, 2)])).unwrap();
    let mut store = MeshStore::new(Some(dir.path().to_path_buf()));
    assert_eq!(store.template(&lib.records[0]).unwrap().content_hash(), m.content_hash());
    lib.records[0].mesh_hash = "00".into();
    let mut fresh = MeshStore::new(Some(dir.path().to_path_buf()));
    assert!(matches!(fresh.template(&lib.records[0]), Err(LibraryError::HashMismatch { .. })));
}

#[test]
fn update_policy() {
    let (mut lib, _) = library_with_shapes();
    let cube = &shapes()[0].1;
    let r = MeshRef { object_id: "q".into(), mesh_path: "q.obj".into() };
    let before = lib.clone();
    let same = lib.records[0].paths[0].clone();
    assert_eq!(lib.update(cube, &r, "env", same, 0.2).unwrap(), UpdateOutcome::Rejected { record: 0 });
    assert_eq!(lib, before);

    let novel = line_path(3.0, 8);
    assert_eq!(lib.update(cube, &r, "env", novel.clone(), 0.2).unwrap(), UpdateOutcome::AppendedPath { record: 0 });
    assert_eq!(lib.records[0].paths.len(), 2);
    assert_eq!(lib.update(cube, &r, "env", novel, 0.2).unwrap(), UpdateOutcome::Rejected { record: 0 });

    // nothing is similar enough under a zero threshold
    let odd = bracket(2);
    let out = lib.update(&odd, &r, "env", line_path(-3.0, 8), 0.0).unwrap();
    assert_eq!(out, UpdateOutcome::CreatedRecord { record: 3 });
    assert_eq!(lib.records[3].scale_factor, 1.0);
    assert_eq!(lib.update(&odd, &r, "env", line_path(-3.0, 8), 0.0).unwrap(), UpdateOutcome::Rejected { record: 3 });
    let w = lib.metric_weights;
    for rec in &lib.records {
        for (i, p) in rec.paths.iter().enumerate() {
            assert!(is_distinct(p, &rec.paths[..i], lib.d_min, &w));
        }
    }
}

#[test]
fn update_on_new_environment_creates_record() {
    let (mut lib, _) = library_with_shapes();
    let r = MeshRef { object_id: "a-cube".into(), mesh_path: "a.obj".into() };
    let out = lib.update(&shapes()[0].1, &r, "fresh", line_path(0.0, 4), 1.0).unwrap();
    assert_eq!(out, UpdateOutcome::CreatedRecord { record: 3 });
}

fn corridor_request<'a>(template: &'a TriMesh, env: &'a TriMesh) -> PrepareRequest<'a> {
    PrepareRequest {
        object_id: "cube",
        template,
        mesh_path: "cube.obj",
        env_id: "corridor",
        environment: env,
        start: Configuration::from_translation(-4.0, 0.0, 0.0),
        goal: Configuration::from_translation(4.0, 0.0, 0.0),
        bounds: SampleBounds::new([-6.0, -4.0, -2.0], [6.0, 4.0, 2.0]).unwrap(),
    }
}

#[test]
fn single_corridor_yields_one_path() {
    let env = wall_with_windows(2.5, [-5.0, 5.0], [-3.0, 3.0], &[Window::square(0.0, 0.0, 1.5)]);
    let tpl = box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
    let req = corridor_request(&tpl, &env);
    let params = PrepareParams::default();
    let out = prepare(&req, &params, &DistributionMatcher::default()).unwrap();
    assert_eq!(out.record.paths.len(), 1);
    assert_eq!(out.stop, PrepareStop::Patience);
    assert!(out.attempts >= params.patience + 1);
    let w = MetricWeights::default();
    for q in &out.inhibited {
        assert!(config_distance(q, &req.start, &w) > params.d_safe);
        assert!(config_distance(q, &req.goal, &w) > params.d_safe);
    }
    let p = &out.record.paths[0];
    assert_eq!(*p.start(), req.start);
    assert_eq!(*p.end(), req.goal);
    assert_eq!(out.record.scale_factor, 0.4);

    let again = prepare(&req, &params, &DistributionMatcher::default()).unwrap();
    assert_eq!(again.record, out.record);
}

#[test]
fn sealed_wall_fails_within_budget() {
    let env = wall_with_windows(1.0, [-5.0, 5.0], [-3.0, 3.0], &[]);
    let tpl = box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
    let params = PrepareParams { budget_s: 2.0, patience: usize::MAX, ..PrepareParams::default() };
    let err = prepare(&corridor_request(&tpl, &env), &params, &DistributionMatcher::default()).unwrap_err();
    match err {
        LibraryError::PreparationFailed { elapsed_s, .. } => assert!(elapsed_s < 4.0),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn invalid_start_is_reported() {
    let env = wall_with_windows(1.0, [-5.0, 5.0], [-3.0, 3.0], &[]);
    let tpl = box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
    let mut req = corridor_request(&tpl, &env);
    req.start = Configuration::from_translation(0.5, 0.0, 0.0);
    assert!(matches!(prepare(&req, &PrepareParams::default(), &DistributionMatcher::default()), Err(LibraryError::Plan(_))));
}

#[test]
fn stored_paths_are_mutually_distinct() {
    let env = wall_with_windows(2.5, [-6.0, 6.0], [-3.0, 3.0], &[Window::square(-2.5, 0.0, 1.5), Window::square(2.5, 0.0, 1.5)]);
    let tpl = box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
    let req = PrepareRequest { env_id: "two", bounds: SampleBounds::new([-6.0, -5.0, -2.0], [6.0, 5.0, 2.0]).unwrap(), ..corridor_request(&tpl, &env) };
    let out = prepare(&req, &PrepareParams::default(), &DistributionMatcher::default()).unwrap();
    let ps = &out.record.paths;
    assert!(ps.len() >= 2);
    let w = MetricWeights::default();
    for i in 0..ps.len() {
        for j in 0..i {
            assert!(symmetric_path_distance(&ps[i], &ps[j], &w) > 1.2);
        }
    }
}

/// Procedural corpus: six shape classes, each with variants differing in
/// aspect ratio, surface noise, pose and scale.
fn corpus(per_class: usize) -> Vec<Vec<TriMesh>> {
    use pathlib_core::se3::random_rotation;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let classes: Vec<Box<dyn Fn(Vector3<f64>) -> TriMesh>> = vec![
        Box::new(|a| subdivided_box(Vector3::zeros(), a.component_mul(&Vector3::new(1.0, 1.0, 1.0)), 4)),
        Box::new(|a| subdivided_box(Vector3::zeros(), a.component_mul(&Vector3::new(1.0, 0.3, 0.15)), 4)),
        Box::new(|a| subdivided_box(Vector3::zeros(), a.component_mul(&Vector3::new(1.0, 0.2, 0.2)), 4)),
        Box::new(|a| subdivided_box(Vector3::zeros(), a.component_mul(&Vector3::new(1.0, 1.0, 0.1)), 4)),
        Box::new(|a| uv_sphere(1.0, 12, 24).map_vertices(|p| p.component_mul(&a)).unwrap()),
        Box::new(|a| bracket(3).map_vertices(|p| p.component_mul(&a)).unwrap()),
    ];
    classes
        .iter()
        .map(|make| {
            (0..per_class)
                .map(|_| {
                    let aspect = Vector3::from_fn(|_, _| rng.random_range(0.9..1.1));
                    let m = jitter(&make(aspect), 0.01, &mut rng);
                    let r = random_rotation(&mut rng);
                    let s = rng.random_range(0.5..2.0);
                    m.map_vertices(|p| r.rotate(p) * s).unwrap()
                })
                .collect()
        })
        .collect()
}

fn percentile_90(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * 0.9;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[test]
fn default_threshold_matches_corpus() {
    let m = DistributionMatcher::default();
    let descs: Vec<Vec<_>> = corpus(6).iter().map(|c| c.iter().map(|x| m.descriptor(x).unwrap()).collect()).collect();
    let mut intra = Vec::new();
    for c in &descs {
        for i in 0..c.len() {
            for j in 0..i {
                intra.push(m.similarity(&c[i], &c[j]).unwrap());
            }
        }
    }
    let p90 = percentile_90(intra);
    assert!((p90 - pathlib_core::library::DEFAULT_SIM_THRESHOLD).abs() < 0.005, "p90 {p90}");
}
