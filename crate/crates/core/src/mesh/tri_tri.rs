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

//! Möller's interval-overlap triangle/triangle test, with the coplanar case
//! handled by 2D edge and containment tests.

use nalgebra::Vector3;

type V = Vector3<f64>;

/// Relative tolerance snapping near-zero plane distances to the plane.
const PLANE_EPS: f64 = 1e-12;

/// True iff the closed triangles `(v0, v1, v2)` and `(u0, u1, u2)` share a point.
pub fn triangles_intersect(v: &[V; 3], u: &[V; 3]) -> bool {
    let scale = v
        .iter()
        .chain(u.iter())
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()))
        .max(1e-300);

    let n1 = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let d1 = -n1.dot(&v[0]);
    let eps1 = PLANE_EPS * n1.norm() * scale;
    let du = u.map(|p| snap(n1.dot(&p) + d1, eps1));
    let du0du1 = du[0] * du[1];
    let du0du2 = du[0] * du[2];
    if du0du1 > 0.0 && du0du2 > 0.0 {
        return false;
    }

    let n2 = (u[1] - u[0]).cross(&(u[2] - u[0]));
    let d2 = -n2.dot(&u[0]);
    let eps2 = PLANE_EPS * n2.norm() * scale;
    let dv = v.map(|p| snap(n2.dot(&p) + d2, eps2));
    let dv0dv1 = dv[0] * dv[1];
    let dv0dv2 = dv[0] * dv[2];
    if dv0dv1 > 0.0 && dv0dv2 > 0.0 {
        return false;
    }

    // project onto the largest component of the intersection line direction
    let dir = n1.cross(&n2);
    let axis = dir.iamax();
    let vp = v.map(|p| p[axis]);
    let up = u.map(|p| p[axis]);

    let Some(a) = interval_terms(vp, dv, dv0dv1, dv0dv2) else {
        return coplanar_intersect(&n1, v, u);
    };
    let Some(b) = interval_terms(up, du, du0du1, du0du2) else {
        return coplanar_intersect(&n1, v, u);
    };

    let xx = a.x0 * a.x1;
    let yy = b.x0 * b.x1;
    let xxyy = xx * yy;
    let tmp = a.a * xxyy;
    let mut i1 = [tmp + a.b * a.x1 * yy, tmp + a.c * a.x0 * yy];
    let tmp = b.a * xxyy;
    let mut i2 = [tmp + b.b * xx * b.x1, tmp + b.c * xx * b.x0];
    sort2(&mut i1);
    sort2(&mut i2);
    !(i1[1] < i2[0] || i2[1] < i1[0])
}

fn snap(d: f64, eps: f64) -> f64 {
    if d.abs() <= eps { 0.0 } else { d }
}

fn sort2(x: &mut [f64; 2]) {
    if x[0] > x[1] {
        x.swap(0, 1);
    }
}

struct Interval {
    a: f64,
    b: f64,
    c: f64,
    x0: f64,
    x1: f64,
}

/// Terms of the projected intersection interval; `None` when the triangle is
/// coplanar with the other one.
fn interval_terms(p: [f64; 3], d: [f64; 3], d0d1: f64, d0d2: f64) -> Option<Interval> {
    let make = |i: usize, j: usize, k: usize| Interval {
        a: p[i],
        b: (p[j] - p[i]) * d[i],
        c: (p[k] - p[i]) * d[i],
        x0: d[i] - d[j],
        x1: d[i] - d[k],
    };
    if d0d1 > 0.0 {
        Some(make(2, 0, 1))
    } else if d0d2 > 0.0 {
        Some(make(1, 0, 2))
    } else if d[1] * d[2] > 0.0 || d[0] != 0.0 {
        Some(make(0, 1, 2))
    } else if d[1] != 0.0 {
        Some(make(1, 0, 2))
    } else if d[2] != 0.0 {
        Some(make(2, 0, 1))
    } else {
        None
    }
}

fn coplanar_intersect(n: &V, v: &[V; 3], u: &[V; 3]) -> bool {
    let a = n.abs();
    let (i0, i1) = if a.x > a.y {
        if a.x > a.z { (1, 2) } else { (0, 1) }
    } else if a.z > a.y {
        (0, 1)
    } else {
        (0, 2)
    };
    let v2 = v.map(|p| [p[i0], p[i1]]);
    let u2 = u.map(|p| [p[i0], p[i1]]);

    for k in 0..3 {
        if edge_against_triangle_edges(v2[k], v2[(k + 1) % 3], &u2) {
            return true;
        }
    }
    point_in_triangle(v2[0], &u2) || point_in_triangle(u2[0], &v2)
}

fn edge_against_triangle_edges(v0: [f64; 2], v1: [f64; 2], u: &[[f64; 2]; 3]) -> bool {
    let ax = v1[0] - v0[0];
    let ay = v1[1] - v0[1];
    (0..3).any(|k| edge_edge(ax, ay, v0, u[k], u[(k + 1) % 3]))
}

fn edge_edge(ax: f64, ay: f64, v0: [f64; 2], u0: [f64; 2], u1: [f64; 2]) -> bool {
    let bx = u0[0] - u1[0];
    let by = u0[1] - u1[1];
    let cx = v0[0] - u0[0];
    let cy = v0[1] - u0[1];
    let f = ay * bx - ax * by;
    let d = by * cx - bx * cy;
    if (f > 0.0 && d >= 0.0 && d <= f) || (f < 0.0 && d <= 0.0 && d >= f) {
        let e = ax * cy - ay * cx;
        if f > 0.0 {
            e >= 0.0 && e <= f
        } else {
            e <= 0.0 && e >= f
        }
    } else {
        false
    }
}

fn point_in_triangle(p: [f64; 2], u: &[[f64; 2]; 3]) -> bool {
    let side = |a: [f64; 2], b: [f64; 2]| {
        let ea = b[1] - a[1];
        let eb = -(b[0] - a[0]);
        let ec = -ea * a[0] - eb * a[1];
        ea * p[0] + eb * p[1] + ec
    };
    let d0 = side(u[0], u[1]);
    let d1 = side(u[1], u[2]);
    let d2 = side(u[2], u[0]);
    d0 * d1 > 0.0 && d0 * d2 > 0.0
}
