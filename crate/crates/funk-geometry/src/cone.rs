//! Pointed convex cones with apex at the origin.
//!
//! Three 3-dimensional families (circular, elliptical, polyhedral) plus the
//! 2-dimensional wedge. All cones are normalized so that their axis is +z
//! (the wedge has no axis); elliptical cones store the linear map and its
//! inverse and answer every query through the circular base.

use crate::error::{FunkError, Result};
use crate::geom::{self, v2, Mat3, Vec2, Vec3};
use crate::tol;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircularCone {
    half_angle: f64,
    tan_half: f64,
    sin_half: f64,
    cos_half: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipticalCone {
    base: CircularCone,
    map: Mat3,
    inverse: Mat3,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyhedralCone {
    /// Inward unit facet normals; facet k spans the edge (v_k, v_{k+1}) of
    /// the unit section.
    normals: Vec<Vec3>,
    /// Cross-section polygon at z = 1, counterclockwise.
    section: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cone {
    Circular(CircularCone),
    Elliptical(EllipticalCone),
    Polyhedral(PolyhedralCone),
}

impl CircularCone {
    fn new(half_angle: f64) -> Result<CircularCone> {
        if !(half_angle.is_finite() && half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2)
        {
            return Err(FunkError::InvalidCone(format!(
                "half angle must lie in (0, pi/2), got {half_angle}"
            )));
        }
        Ok(CircularCone {
            half_angle,
            tan_half: half_angle.tan(),
            sin_half: half_angle.sin(),
            cos_half: half_angle.cos(),
        })
    }

    /// Euclidean distance to the lateral boundary within the axial slice;
    /// positive inside, negative outside.
    fn margin(&self, p: Vec3) -> f64 {
        p.z * self.sin_half - p.xy().norm() * self.cos_half
    }
}

impl Cone {
    pub fn circular(half_angle: f64) -> Result<Cone> {
        Ok(Cone::Circular(CircularCone::new(half_angle)?))
    }

    pub fn elliptical(half_angle: f64, map: Mat3) -> Result<Cone> {
        let base = CircularCone::new(half_angle)?;
        let inverse = map
            .inverse()
            .ok_or_else(|| FunkError::InvalidCone("linear map is singular".into()))?;
        Ok(Cone::Elliptical(EllipticalCone { base, map, inverse }))
    }

    /// Polyhedral cone over a convex polygon placed at z = 1.
    pub fn polyhedral_from_section(section: Vec<Vec2>) -> Result<Cone> {
        let mut section = geom::simplify_polygon(&section, 1e-12);
        if section.len() < 3 {
            return Err(FunkError::InvalidCone(
                "section polygon needs at least 3 vertices".into(),
            ));
        }
        if geom::polygon_area(&section) < 0.0 {
            section.reverse();
        }
        if !geom::is_convex_ccw(&section) {
            return Err(FunkError::InvalidCone("section polygon is not convex".into()));
        }
        let normals = section_normals(&section);
        Ok(Cone::Polyhedral(PolyhedralCone { normals, section }))
    }

    /// Polyhedral cone from inward facet normals. The +z axis must be
    /// interior (every normal has positive z) so that perpendicular
    /// cross-sections are bounded.
    pub fn polyhedral_from_normals(normals: Vec<Vec3>) -> Result<Cone> {
        if normals.len() < 3 {
            return Err(FunkError::InvalidCone("need at least 3 facet normals".into()));
        }
        let mut poly: Vec<Vec2> = {
            let b = 1e6;
            vec![v2(-b, -b), v2(b, -b), v2(b, b), v2(-b, b)]
        };
        for n in &normals {
            let n = n.normalized();
            if !(n.z > 1e-9) {
                return Err(FunkError::InvalidCone(
                    "every inward normal must have positive z (axis interior)".into(),
                ));
            }
            poly = geom::clip_halfplane(&poly, n.xy(), n.z);
            if poly.len() < 3 {
                return Err(FunkError::InvalidCone("facet normals leave an empty cone".into()));
            }
        }
        if poly.iter().any(|p| p.x.abs() > 1e5 || p.y.abs() > 1e5) {
            return Err(FunkError::InvalidCone(
                "cone is unbounded perpendicular to the axis".into(),
            ));
        }
        Cone::polyhedral_from_section(poly)
    }

    /// Maps a point into the frame where the cone is circular/polyhedral
    /// with axis +z. Identity except for elliptical cones.
    pub fn normalize_point(&self, p: Vec3) -> Vec3 {
        match self {
            Cone::Elliptical(e) => e.inverse.mul_vec(p),
            _ => p,
        }
    }

    /// Inverse of [`Cone::normalize_point`].
    pub fn denormalize_point(&self, p: Vec3) -> Vec3 {
        match self {
            Cone::Elliptical(e) => e.map.mul_vec(p),
            _ => p,
        }
    }

    /// Boundary margin of `p` in the normalized frame: positive strictly
    /// inside, zero on the boundary, negative outside.
    pub fn boundary_margin(&self, p: Vec3) -> f64 {
        match self {
            Cone::Circular(c) => c.margin(p),
            Cone::Elliptical(e) => e.base.margin(e.inverse.mul_vec(p)),
            Cone::Polyhedral(poly) => {
                let mut m = f64::INFINITY;
                for n in &poly.normals {
                    m = m.min(n.dot(p));
                }
                m
            }
        }
    }

    pub fn contains(&self, p: Vec3, strict: bool) -> bool {
        let m = self.boundary_margin(p);
        if strict {
            m >= tol::INTERIOR_MARGIN
        } else {
            m >= 0.0
        }
    }

    pub fn half_angle(&self) -> Option<f64> {
        match self {
            Cone::Circular(c) => Some(c.half_angle),
            Cone::Elliptical(e) => Some(e.base.half_angle),
            Cone::Polyhedral(_) => None,
        }
    }

    pub fn tan_half_angle(&self) -> Option<f64> {
        match self {
            Cone::Circular(c) => Some(c.tan_half),
            Cone::Elliptical(e) => Some(e.base.tan_half),
            Cone::Polyhedral(_) => None,
        }
    }

    /// Cross-section polygon of a polyhedral cone at z = 1.
    pub fn unit_section(&self) -> Option<&[Vec2]> {
        match self {
            Cone::Polyhedral(p) => Some(&p.section),
            _ => None,
        }
    }

    pub fn facet_normals(&self) -> Option<&[Vec3]> {
        match self {
            Cone::Polyhedral(p) => Some(&p.normals),
            _ => None,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, Cone::Polyhedral(_))
    }

    pub fn linear_map(&self) -> Option<&Mat3> {
        match self {
            Cone::Elliptical(e) => Some(&e.map),
            _ => None,
        }
    }
}

fn section_normals(section: &[Vec2]) -> Vec<Vec3> {
    // Facet k is spanned by the origin and the edge (v_k, v_{k+1}) at z = 1;
    // its inward normal is (a, 1) x (b, 1) up to orientation.
    let n = section.len();
    (0..n)
        .map(|k| {
            let a = Vec3::from_xy(section[k], 1.0);
            let b = Vec3::from_xy(section[(k + 1) % n], 1.0);
            let normal = a.cross(b).normalized();
            if normal.z < 0.0 {
                -normal
            } else {
                normal
            }
        })
        .collect()
}

/// A 2-dimensional cone (wedge) bounded by two rays from the origin.
///
/// The linear forms `L1`, `L2` vanish on the respective boundary rays and
/// are positive on the interior; sweeping counterclockwise from ray 1
/// crosses the interior and ends at ray 2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarCone {
    ray1: Vec2,
    ray2: Vec2,
    form1: Vec2,
    form2: Vec2,
}

impl PlanarCone {
    /// Builds the wedge between ray directions `d1` and `d2` (counterclockwise
    /// from `d1` to `d2`, opening angle strictly between 0 and pi).
    pub fn from_rays(d1: Vec2, d2: Vec2) -> Result<PlanarCone> {
        let (n1, n2) = (d1.norm(), d2.norm());
        if n1 < 1e-300 || n2 < 1e-300 {
            return Err(FunkError::InvalidCone("zero ray direction".into()));
        }
        let d1 = d1 / n1;
        let d2 = d2 / n2;
        if d1.cross(d2) <= 1e-12 {
            return Err(FunkError::InvalidCone(
                "rays must open counterclockwise by an angle in (0, pi)".into(),
            ));
        }
        Ok(PlanarCone {
            ray1: d1,
            ray2: d2,
            form1: d1.perp(),  // positive on the d2 side
            form2: -d2.perp(), // positive on the d1 side
        })
    }

    pub fn rays(&self) -> (Vec2, Vec2) {
        (self.ray1, self.ray2)
    }

    /// Signed distance to boundary ray 1 (positive inside).
    pub fn form1(&self, p: Vec2) -> f64 {
        self.form1.dot(p)
    }

    /// Signed distance to boundary ray 2 (positive inside).
    pub fn form2(&self, p: Vec2) -> f64 {
        self.form2.dot(p)
    }

    pub fn boundary_margin(&self, p: Vec2) -> f64 {
        self.form1(p).min(self.form2(p))
    }

    pub fn contains(&self, p: Vec2, strict: bool) -> bool {
        let m = self.boundary_margin(p);
        if strict {
            m >= tol::INTERIOR_MARGIN
        } else {
            m >= 0.0
        }
    }

    /// Gradients of the two boundary forms.
    pub(crate) fn form_normals(&self) -> (Vec2, Vec2) {
        (self.form1, self.form2)
    }
}
