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

//! OBJ (ASCII `v`/`f` subset) and binary STL reading, OBJ writing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use super::{MeshError, TriMesh};

/// Loads a mesh, dispatching on the file extension (`.obj` or `.stl`).
pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<TriMesh, MeshError> {
    let path = path.as_ref();
    let io_err = |source| MeshError::Io {
        path: path.display().to_string(),
        source,
    };
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "obj" => parse_obj(&fs::read_to_string(path).map_err(io_err)?),
        "stl" => parse_stl(&fs::read(path).map_err(io_err)?),
        other => Err(MeshError::UnsupportedFormat(other.to_string())),
    }
}

/// Parses OBJ text. Polygons are fan-triangulated; indices are 1-based,
/// negative indices count back from the last vertex.
pub fn parse_obj(text: &str) -> Result<TriMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| MeshError::Parse {
                        line,
                        message: format!("bad vertex coordinate: {e}"),
                    })?;
                if coords.len() != 3 {
                    return Err(MeshError::Parse {
                        line,
                        message: "vertex needs three coordinates".into(),
                    });
                }
                vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let face: Vec<usize> = tokens
                    .map(|t| resolve_index(t, vertices.len(), line))
                    .collect::<Result<_, _>>()?;
                if face.len() < 3 {
                    return Err(MeshError::Parse {
                        line,
                        message: "face needs at least three vertices".into(),
                    });
                }
                for k in 1..face.len() - 1 {
                    triangles.push([face[0], face[k], face[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, triangles)
}

fn resolve_index(token: &str, count: usize, line: usize) -> Result<usize, MeshError> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("bad face index '{token}'"),
    })?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r as usize - 1),
        r => count.checked_sub(r.unsigned_abs() as usize),
    };
    match resolved {
        Some(i) if i < count => Ok(i),
        _ => Err(MeshError::Parse {
            line,
            message: format!("face index {raw} out of range ({count} vertices so far)"),
        }),
    }
}

/// Parses binary STL, welding bit-identical corner positions.
pub fn parse_stl(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    if bytes.len() < 84 {
        return Err(MeshError::Stl("file shorter than the 84-byte header".into()));
    }
    let count = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    let expected = 84 + 50 * count;
    if bytes.len() != expected {
        return Err(MeshError::Stl(format!(
            "expected {expected} bytes for {count} triangles, found {} (ASCII STL is not supported)",
            bytes.len()
        )));
    }
    let mut index: HashMap<[u32; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(count);
    for t in 0..count {
        let rec = &bytes[84 + 50 * t..84 + 50 * (t + 1)];
        let mut tri = [0usize; 3];
        for (k, corner) in tri.iter_mut().enumerate() {
            let off = 12 + 12 * k;
            let bits: [u32; 3] = std::array::from_fn(|c| {
                let o = off + 4 * c;
                u32::from_le_bytes([rec[o], rec[o + 1], rec[o + 2], rec[o + 3]])
            });
            *corner = *index.entry(bits).or_insert_with(|| {
                vertices.push(Vector3::from(bits.map(|b| f32::from_bits(b) as f64)));
                vertices.len() - 1
            });
        }
        triangles.push(tri);
    }
    TriMesh::new(vertices, triangles)
}

/// Serializes a mesh as OBJ text with round-trip-exact coordinates.
pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives::unit_cube;

    const CUBE_OBJ: &str = "\
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

    #[test]
    fn cube_obj() {
        let m = parse_obj(CUBE_OBJ).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.triangles().len(), 12);
    }

    #[test]
    fn quads_are_fan_triangulated() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nf 1/1/1 2/2/2 3/3/3 4/4/4\nf 1 2 6 5\n";
        let m = parse_obj(text).unwrap();
        assert_eq!(m.triangles().len(), 4);
        let neg = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(neg.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn zero_index_is_an_error() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n").unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 4, .. }), "{err}");
        assert!(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n").is_err());
        assert!(matches!(parse_obj("v 0 x 0\n"), Err(MeshError::Parse { line: 1, .. })));
        assert!(matches!(parse_obj("# nothing\n"), Err(MeshError::Empty)));
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let cube = unit_cube().transformed(&crate::se3::Configuration::new(
            Vector3::new(0.1, 0.2, 0.3),
            crate::se3::Rotation::rot_x(0.3),
        ));
        let back = parse_obj(&write_obj(&cube)).unwrap();
        assert_eq!(back.vertices(), cube.vertices());
        assert_eq!(back.triangles(), cube.triangles());
    }

    fn stl_bytes(mesh: &TriMesh) -> Vec<u8> {
        let mut out = vec![0u8; 80];
        out.extend((mesh.triangles().len() as u32).to_le_bytes());
        for t in 0..mesh.triangles().len() {
            out.extend([0u8; 12]);
            for v in mesh.triangle(t) {
                for c in v.iter() {
                    out.extend((*c as f32).to_le_bytes());
                }
            }
            out.extend([0u8; 2]);
        }
        out
    }

    #[test]
    fn binary_stl() {
        let cube = unit_cube();
        let m = parse_stl(&stl_bytes(&cube)).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.triangles().len(), 12);
        let mut truncated = stl_bytes(&cube);
        truncated.pop();
        assert!(matches!(parse_stl(&truncated), Err(MeshError::Stl(_))));
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let obj = dir.path().join("cube.obj");
        std::fs::write(&obj, CUBE_OBJ).unwrap();
        assert_eq!(load_mesh(&obj).unwrap().triangles().len(), 12);
        let stl = dir.path().join("cube.STL");
        std::fs::write(&stl, stl_bytes(&unit_cube())).unwrap();
        assert_eq!(load_mesh(&stl).unwrap().triangles().len(), 12);
        assert!(matches!(load_mesh(dir.path().join("missing.obj")), Err(MeshError::Io { .. })));
        assert!(matches!(load_mesh(dir.path().join("x.ply")), Err(MeshError::UnsupportedFormat(_))));
    }
}
