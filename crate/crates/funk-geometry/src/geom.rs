//! Small fixed-size vector/matrix types and convex polygon helpers.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn v2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

pub const fn v3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec2 {
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is
    /// counterclockwise from `self`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        v2(self.x / n, self.y / n)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        v2(-self.y, self.x)
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Vec3 {
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        v3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        v3(self.x / n, self.y / n, self.z / n)
    }

    pub fn xy(self) -> Vec2 {
        v2(self.x, self.y)
    }

    pub fn from_xy(p: Vec2, z: f64) -> Vec3 {
        v3(p.x, p.y, z)
    }
}

macro_rules! vec_ops {
    ($t:ty, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { Self { $($f: self.$f + o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { Self { $($f: self.$f - o.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { Self { $($f: self.$f * s),+ } }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t { Self { $($f: self.$f / s),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { Self { $($f: -self.$f),+ } }
        }
    };
}

vec_ops!(Vec2, x, y);
vec_ops!(Vec3, x, y, z);

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3 {
    pub rows: [[f64; 3]; 3],
}

impl Mat3 {
    pub fn identity() -> Mat3 {
        Mat3::diagonal(1.0, 1.0, 1.0)
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Mat3 {
        Mat3 {
            rows: [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]],
        }
    }

    pub fn mul_vec(&self, p: Vec3) -> Vec3 {
        let r = &self.rows;
        v3(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        )
    }

    pub fn det(&self) -> f64 {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat3> {
        let r = &self.rows;
        let det = self.det();
        if det.abs() < 1e-300 {
            return None;
        }
        let c = |i: usize, j: usize| -> f64 {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            r[i1][j1] * r[i2][j2] - r[i1][j2] * r[i2][j1]
        };
        let mut rows = [[0.0; 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                // adjugate is the transposed cofactor matrix
                *slot = c(j, i) / det;
            }
        }
        Some(Mat3 { rows })
    }
}

// ---------------------------------------------------------------------------
// Convex polygon helpers. Polygons are vertex lists in counterclockwise
// order; edge k runs from vertex k to vertex k+1.
// ---------------------------------------------------------------------------

/// Signed area (positive for counterclockwise orientation).
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * acc
}

pub fn polygon_centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len() as f64;
    let mut c = v2(0.0, 0.0);
    for p in poly {
        c = c + *p;
    }
    c / n
}

/// Checks strict convexity and counterclockwise order.
pub fn is_convex_ccw(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        if (b - a).cross(c - b) <= 0.0 {
            return false;
        }
    }
    true
}

/// Inward unit normal and offset for each edge: the linear form
/// `E_k(x) = n_k · x + c_k` is positive inside and vanishes on edge k.
pub fn edge_forms(poly: &[Vec2]) -> Vec<(Vec2, f64)> {
    let n = poly.len();
    (0..n)
        .map(|k| {
            let a = poly[k];
            let b = poly[(k + 1) % n];
            let normal = (b - a).perp().normalized();
            (normal, -normal.dot(a))
        })
        .collect()
}

/// Minimum inward distance to the edge lines; positive strictly inside a
/// convex polygon.
pub fn polygon_inward_margin(poly: &[Vec2], p: Vec2) -> f64 {
    let n = poly.len();
    let mut m = f64::INFINITY;
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        let normal = (b - a).perp().normalized();
        m = m.min(normal.dot(p - a));
    }
    m
}

/// Even-odd crossing test; valid for any simple polygon.
pub fn point_in_polygon(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq < 1e-300 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Distance from `p` to the polygon boundary.
pub fn distance_to_boundary(poly: &[Vec2], p: Vec2) -> f64 {
    let n = poly.len();
    let mut d = f64::INFINITY;
    for i in 0..n {
        d = d.min(segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    d
}

/// Signed distance to the boundary of a simple polygon: positive inside,
/// negative outside.
pub fn polygon_signed_distance(poly: &[Vec2], p: Vec2) -> f64 {
    let d = distance_to_boundary(poly, p);
    if point_in_polygon(poly, p) {
        d
    } else {
        -d
    }
}

/// One Sutherland-Hodgman step: keeps the side where `n·x + c >= 0`.
pub fn clip_halfplane(poly: &[Vec2], n: Vec2, c: f64) -> Vec<Vec2> {
    let len = poly.len();
    let mut out = Vec::with_capacity(len + 1);
    for i in 0..len {
        let a = poly[i];
        let b = poly[(i + 1) % len];
        let fa = n.dot(a) + c;
        let fb = n.dot(b) + c;
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0) {
            let t = fa / (fa - fb);
            out.push(a.lerp(b, t));
        }
    }
    out
}

/// Separating-axis distance between two convex polygons: positive when
/// disjoint, zero at tangency, negative when overlapping.
pub fn convex_separation(a: &[Vec2], b: &[Vec2]) -> f64 {
    let axis_gap = |poly: &[Vec2], other: &[Vec2]| -> f64 {
        let n = poly.len();
        let mut best = f64::NEG_INFINITY;
        for k in 0..n {
            let p = poly[k];
            let q = poly[(k + 1) % n];
            let outward = -(q - p).perp().normalized();
            let mut gap = f64::INFINITY;
            for v in other {
                gap = gap.min(outward.dot(*v - p));
            }
            best = best.max(gap);
        }
        best
    };
    axis_gap(a, b).max(axis_gap(b, a))
}

/// Intersection of segments [p1,p2] and [q1,q2]; returns parameters along
/// each segment together with the point.
pub fn segment_intersection(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> Option<(f64, f64, Vec2)> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.cross(d2);
    if denom.abs() < 1e-300 {
        return None;
    }
    let t = (q1 - p1).cross(d2) / denom;
    let u = (q1 - p1).cross(d1) / denom;
    if !(-1e-12..=1.0 + 1e-12).contains(&t) || !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    Some((t, u, p1 + d1 * t))
}

/// Regular m-gon of circumradius `r`, first vertex at angle `phase`.
pub fn regular_polygon(m: usize, r: f64, phase: f64) -> Vec<Vec2> {
    (0..m)
        .map(|k| {
            let a = phase + 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            v2(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Drops consecutive duplicate vertices, then collinear middles.
pub fn simplify_polygon(poly: &[Vec2], tol: f64) -> Vec<Vec2> {
    let mut dedup: Vec<Vec2> = Vec::with_capacity(poly.len());
    for &p in poly {
        if dedup.last().map_or(true, |l| l.dist(p) > tol) {
            dedup.push(p);
        }
    }
    while dedup.len() > 1 && dedup.first().unwrap().dist(*dedup.last().unwrap()) <= tol {
        dedup.pop();
    }
    let n = dedup.len();
    if n < 3 {
        return dedup;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = dedup[(i + n - 1) % n];
        let cur = dedup[i];
        let next = dedup[(i + 1) % n];
        let area2 = (cur - prev).cross(next - cur);
        let scale = (cur - prev).norm() * (next - cur).norm();
        if area2.abs() <= tol * (1.0 + scale) {
            continue;
        }
        out.push(cur);
    }
    out
}
