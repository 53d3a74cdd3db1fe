//! Dimensional reduction onto a cross-section.
//!
//! Funk bisectors are unions of rays through the apex, so the Voronoi
//! diagram in the cone is determined by a weighted diagram on any bounded
//! cross-section. This module cuts the cone perpendicular to its axis
//! (above the sites for the forward metric, below for the reverse),
//! projects sites through the origin onto the cut with additive weights
//! `-ln(lambda)` (forward) or `+ln(lambda)` (reverse), and evaluates the
//! restricted Funk distance natively on the cut region.

use crate::cone::Cone;
use crate::error::{FunkError, Result};
use crate::geom::{self, Vec2, Vec3};
use crate::metric::Direction;
use crate::tol;
use serde::{Deserialize, Serialize};

/// The bounded convex region `C ∩ {z = h}`, expressed in the cone's
/// normalized frame (so circular and elliptical cones both yield disks
/// centered at the origin).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SectionRegion {
    Disk { radius: f64 },
    Polygon { vertices: Vec<Vec2> },
}

impl SectionRegion {
    /// Inward distance to the region boundary (positive inside).
    pub fn inward_margin(&self, p: Vec2) -> f64 {
        match self {
            SectionRegion::Disk { radius } => radius - p.norm(),
            SectionRegion::Polygon { vertices } => geom::polygon_inward_margin(vertices, p),
        }
    }

    pub fn contains(&self, p: Vec2, margin: f64) -> bool {
        self.inward_margin(p) >= margin
    }

    /// Characteristic length used to scale tolerances and step sizes.
    pub fn scale(&self) -> f64 {
        match self {
            SectionRegion::Disk { radius } => *radius,
            SectionRegion::Polygon { vertices } => {
                vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            SectionRegion::Disk { radius } => std::f64::consts::PI * radius * radius,
            SectionRegion::Polygon { vertices } => geom::polygon_area(vertices),
        }
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            SectionRegion::Disk { radius } => {
                (geom::v2(-radius, -radius), geom::v2(*radius, *radius))
            }
            SectionRegion::Polygon { vertices } => {
                let mut lo = geom::v2(f64::INFINITY, f64::INFINITY);
                let mut hi = geom::v2(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo = geom::v2(lo.x.min(v.x), lo.y.min(v.y));
                    hi = geom::v2(hi.x.max(v.x), hi.y.max(v.y));
                }
                (lo, hi)
            }
        }
    }
}

/// Forward Funk value restricted to a bounded convex region. Matches the
/// cone value for points lifted onto the section plane.
pub fn region_funk_value(region: &SectionRegion, a: Vec2, b: Vec2) -> f64 {
    match region {
        SectionRegion::Disk { radius } => {
            if a == b {
                return 0.0;
            }
            // exit point of the ray a -> b: largest root of |a + t d| = R
            let d = b - a;
            let qa = d.norm_sq();
            let qb = 2.0 * a.dot(d);
            let qc = a.norm_sq() - radius * radius;
            let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
            let t_exit = (-qb + disc.sqrt()) / (2.0 * qa);
            (t_exit / (t_exit - 1.0)).ln()
        }
        SectionRegion::Polygon { vertices } => {
            // unnormalized inward forms: the ratio is scale invariant
            let mut best = f64::NEG_INFINITY;
            let n = vertices.len();
            for k in 0..n {
                let p0 = vertices[k];
                let p1 = vertices[(k + 1) % n];
                let normal = (p1 - p0).perp();
                let da = normal.dot(a - p0);
                let db = normal.dot(b - p0);
                if db <= 0.0 {
                    if da > 0.0 {
                        return f64::INFINITY;
                    }
                    continue;
                }
                best = best.max(da / db);
            }
            best.ln()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossSection {
    /// Height of the cut plane `z = h` in the cone's normalized frame.
    pub height: f64,
    pub region: SectionRegion,
    pub direction: Direction,
}

/// A site projected through the origin onto the cross-section plane.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedSite {
    /// Plane coordinates of the projection.
    pub position: Vec2,
    /// Additive weight in nats.
    pub weight: f64,
    /// Index of the input site this projection came from.
    pub source_index: usize,
    /// Projection scale factor lambda = h / s_z.
    pub scale: f64,
}

/// Cross-section of a site's zero-radius ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ZeroBall {
    Disk { center: Vec2, radius: f64 },
    Polygon { vertices: Vec<Vec2> },
}

impl ZeroBall {
    pub fn contains(&self, p: Vec2, margin: f64) -> bool {
        match self {
            ZeroBall::Disk { center, radius } => radius - (p - *center).norm() >= margin,
            ZeroBall::Polygon { vertices } => geom::polygon_inward_margin(vertices, p) >= margin,
        }
    }

    pub fn as_polygon(&self, segments: usize) -> Vec<Vec2> {
        match self {
            ZeroBall::Disk { center, radius } => geom::regular_polygon(segments, *radius, 0.0)
                .into_iter()
                .map(|v| v + *center)
                .collect(),
            ZeroBall::Polygon { vertices } => vertices.clone(),
        }
    }
}

fn section_region(cone: &Cone, h: f64) -> SectionRegion {
    match cone {
        Cone::Polyhedral(_) => SectionRegion::Polygon {
            vertices: cone.unit_section().unwrap().iter().map(|&v| v * h).collect(),
        },
        _ => SectionRegion::Disk {
            radius: h * cone.tan_half_angle().unwrap(),
        },
    }
}

/// Cross-section at a fixed height in the normalized frame.
pub fn cross_section_at(cone: &Cone, height: f64, dir: Direction) -> Result<CrossSection> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(FunkError::InvalidInput("section height must be positive".into()));
    }
    Ok(CrossSection { height, region: section_region(cone, height), direction: dir })
}

/// Chooses the cut height from the normalized site heights: above the
/// highest site by the relative `margin` for the forward metric, below the
/// lowest for the reverse.
pub fn choose_cross_section(
    cone: &Cone,
    sites: &[Vec3],
    dir: Direction,
    margin: f64,
) -> Result<CrossSection> {
    if sites.is_empty() {
        return Err(FunkError::EmptySiteSet);
    }
    if !(margin > 0.0) {
        return Err(FunkError::InvalidInput("section margin must be positive".into()));
    }
    for &s in sites {
        if !cone.contains(s, true) {
            return Err(FunkError::NotInterior);
        }
    }
    let zs = sites.iter().map(|s| cone.normalize_point(*s).z);
    let height = match dir {
        Direction::Forward => (1.0 + margin) * zs.fold(f64::NEG_INFINITY, f64::max),
        Direction::Reverse => {
            if !(margin < 1.0) {
                return Err(FunkError::InvalidInput(
                    "reverse section margin must be below 1".into(),
                ));
            }
            (1.0 - margin) * zs.fold(f64::INFINITY, f64::min)
        }
    };
    if !(height > 0.0) {
        return Err(FunkError::Internal("section height is not positive".into()));
    }
    Ok(CrossSection {
        height,
        region: section_region(cone, height),
        direction: dir,
    })
}

/// Projects a site through the origin onto the section plane. The weight is
/// chosen so that for every query on the plane the weighted restricted
/// distance equals the distance from the original site.
pub fn project_site(
    cone: &Cone,
    cs: &CrossSection,
    site: Vec3,
    source_index: usize,
    dir: Direction,
) -> Result<WeightedSite> {
    if !cone.contains(site, true) {
        return Err(FunkError::NotInterior);
    }
    let s = cone.normalize_point(site);
    let wrong_side = match dir {
        Direction::Forward => s.z >= cs.height,
        Direction::Reverse => s.z <= cs.height,
    };
    if wrong_side && (s.z - cs.height).abs() > f64::EPSILON * cs.height {
        return Err(FunkError::WrongSideOfSection);
    }
    let scale = cs.height / s.z;
    let weight = match dir {
        Direction::Forward => -scale.ln(),
        Direction::Reverse => scale.ln(),
    };
    Ok(WeightedSite {
        position: s.xy() * scale,
        weight,
        source_index,
        scale,
    })
}

/// Cross-section of the forward zero ball `C_s ∩ {z = h}` (requires the
/// site below the plane).
pub fn zero_ball(cone: &Cone, cs: &CrossSection, site: Vec3) -> Result<ZeroBall> {
    directed_zero_ball(cone, cs, site, Direction::Forward)
}

/// Zero ball for either metric: the forward ball is a section of the cone
/// at the site, the reverse ball a section of the reflected cone.
pub fn directed_zero_ball(cone: &Cone, cs: &CrossSection, site: Vec3, dir: Direction) -> Result<ZeroBall> {
    if !cone.contains(site, true) {
        return Err(FunkError::NotInterior);
    }
    let s = cone.normalize_point(site);
    let gap = match dir {
        Direction::Forward => cs.height - s.z,
        Direction::Reverse => s.z - cs.height,
    };
    if gap <= 0.0 {
        return Err(FunkError::WrongSideOfSection);
    }
    Ok(match cone {
        Cone::Polyhedral(_) => {
            let unit = cone.unit_section().unwrap();
            let mut vertices: Vec<Vec2> = match dir {
                Direction::Forward => unit.iter().map(|&v| s.xy() + v * gap).collect(),
                Direction::Reverse => unit.iter().map(|&v| s.xy() - v * gap).collect(),
            };
            if geom::polygon_area(&vertices) < 0.0 {
                vertices.reverse();
            }
            ZeroBall::Polygon { vertices }
        }
        _ => ZeroBall::Disk {
            center: s.xy(),
            radius: gap * cone.tan_half_angle().unwrap(),
        },
    })
}

/// Euclidean center and radius of a zero ball (disks only).
pub fn zero_ball_disk(ball: &ZeroBall) -> Option<(Vec2, f64)> {
    match ball {
        ZeroBall::Disk { center, radius } => Some((*center, *radius)),
        ZeroBall::Polygon { .. } => None,
    }
}

/// Weighted restricted Funk distance from a projected site to a point of
/// the section.
pub fn weighted_distance(cs: &CrossSection, ws: &WeightedSite, q: Vec2, dir: Direction) -> Result<f64> {
    if !cs.region.contains(q, tol::INTERIOR_MARGIN) {
        return Err(FunkError::NotInterior);
    }
    Ok(weighted_value(cs, ws, q, dir))
}

/// Unchecked version of [`weighted_distance`]; finite for interior queries.
pub fn weighted_value(cs: &CrossSection, ws: &WeightedSite, q: Vec2, dir: Direction) -> f64 {
    let base = match dir {
        Direction::Forward => region_funk_value(&cs.region, ws.position, q),
        Direction::Reverse => region_funk_value(&cs.region, q, ws.position),
    };
    base + ws.weight
}

/// The ray through the origin hitting the section at `q`.
pub fn lift_to_ray(cs: &CrossSection, q: Vec2) -> Vec3 {
    Vec3::from_xy(q, cs.height).normalized()
}

/// Representative of an interior cone point on the section plane
/// (normalized frame); rejects points with non-positive height.
pub fn representative(cone: &Cone, cs: &CrossSection, q: Vec3) -> Result<Vec2> {
    let q = cone.normalize_point(q);
    if q.z <= 0.0 {
        return Err(FunkError::InvalidInput("point has non-positive height".into()));
    }
    Ok(q.xy() * (cs.height / q.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{v2, v3};
    use crate::metric::{funk_distance, Direction::*};

    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    fn circ45() -> Cone {
        Cone::circular(FRAC_PI_4).unwrap()
    }

    fn square_cone() -> Cone {
        Cone::polyhedral_from_section(vec![
            v2(-1.0, -1.0),
            v2(1.0, -1.0),
            v2(1.0, 1.0),
            v2(-1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn section_heights() {
        let cone = circ45();
        let sites = [v3(0.0, 0.1, 0.5), v3(0.1, 0.0, 0.65)];
        let cs = choose_cross_section(&cone, &sites, Forward, 0.1).unwrap();
        assert!((cs.height - 0.715).abs() < 1e-12);
        match cs.region {
            SectionRegion::Disk { radius } => assert!((radius - 0.715).abs() < 1e-12),
            _ => panic!("expected a disk"),
        }
        let cs = choose_cross_section(&cone, &sites, Reverse, 0.1).unwrap();
        assert!((cs.height - 0.45).abs() < 1e-12);
    }

    #[test]
    fn square_section_and_margin_validation() {
        let cone = square_cone();
        let sites = [v3(0.2, 0.2, 1.0)];
        assert!(choose_cross_section(&cone, &sites, Forward, 0.0).is_err());
        let cs = choose_cross_section(&cone, &sites, Forward, 0.05).unwrap();
        match &cs.region {
            SectionRegion::Polygon { vertices } => {
                assert_eq!(vertices.len(), 4);
                let side = vertices[1].dist(vertices[0]);
                assert!((side - 2.1).abs() < 1e-12);
            }
            _ => panic!("expected a polygon"),
        }
    }

    #[test]
    fn projection_examples() {
        let cone = circ45();
        let cs = CrossSection {
            height: 1.0,
            region: section_region(&cone, 1.0),
            direction: Forward,
        };
        let ws = project_site(&cone, &cs, v3(0.0, 0.0, 0.5), 0, Forward).unwrap();
        assert!((ws.position - v2(0.0, 0.0)).norm() < 1e-15);
        assert!((ws.scale - 2.0).abs() < 1e-15);
        assert!((ws.weight + 2f64.ln()).abs() < 1e-15);

        let cs_rev = CrossSection {
            height: 0.25,
            region: section_region(&cone, 0.25),
            direction: Reverse,
        };
        let ws = project_site(&cone, &cs_rev, v3(0.1, 0.0, 0.5), 0, Reverse).unwrap();
        assert!((ws.position - v2(0.05, 0.0)).norm() < 1e-15);
        assert!((ws.weight - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_ball_examples() {
        let cone = circ45();
        let cs = CrossSection {
            height: 1.0,
            region: section_region(&cone, 1.0),
            direction: Forward,
        };
        match zero_ball(&cone, &cs, v3(0.2, 0.0, 0.5)).unwrap() {
            ZeroBall::Disk { center, radius } => {
                assert!((center - v2(0.2, 0.0)).norm() < 1e-15);
                assert!((radius - 0.5).abs() < 1e-15);
            }
            _ => panic!(),
        }
        let cone30 = Cone::circular(30f64.to_radians()).unwrap();
        match zero_ball(&cone30, &cs, v3(0.0, 0.0, 0.5)).unwrap() {
            ZeroBall::Disk { radius, .. } => {
                assert!((radius - 0.5 * 30f64.to_radians().tan()).abs() < 1e-15)
            }
            _ => panic!(),
        }
        let sq = square_cone();
        let cs = CrossSection {
            height: 1.0,
            region: section_region(&sq, 1.0),
            direction: Forward,
        };
        match zero_ball(&sq, &cs, v3(0.1, 0.1, 0.5)).unwrap() {
            ZeroBall::Polygon { vertices } => {
                let (lo, hi) = {
                    let mut lo = v2(f64::INFINITY, f64::INFINITY);
                    let mut hi = v2(f64::NEG_INFINITY, f64::NEG_INFINITY);
                    for v in &vertices {
                        lo = v2(lo.x.min(v.x), lo.y.min(v.y));
                        hi = v2(hi.x.max(v.x), hi.y.max(v.y));
                    }
                    (lo, hi)
                };
                assert!((lo - v2(-0.4, -0.4)).norm() < 1e-12);
                assert!((hi - v2(0.6, 0.6)).norm() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn weighted_distance_reduction_identity() {
        let cone = circ45();
        let site = v3(0.1, -0.05, 0.5);
        let cs = choose_cross_section(&cone, &[site], Forward, 0.5).unwrap();
        let ws = project_site(&cone, &cs, site, 0, Forward).unwrap();
        // identity case: weight 0 at its own position
        assert!(weighted_distance(&cs, &ws, ws.position, Forward).unwrap() - ws.weight < 1e-12);
        for q in [v2(0.0, 0.0), v2(0.3, 0.2), v2(-0.4, 0.1)] {
            let lifted = Vec3::from_xy(q, cs.height);
            let direct = funk_distance(&cone, site, lifted, Forward).unwrap();
            let reduced = weighted_distance(&cs, &ws, q, Forward).unwrap();
            assert!((direct - reduced).abs() < 1e-10, "direct {direct} reduced {reduced}");
        }
    }

    #[test]
    fn region_value_matches_cone_value_on_polygon() {
        let sq = square_cone();
        let cs = choose_cross_section(&sq, &[v3(0.0, 0.0, 0.5)], Forward, 1.0).unwrap();
        let region = &cs.region;
        let pairs = [
            (v2(0.0, 0.0), v2(0.5, 0.0)),
            (v2(-0.3, 0.2), v2(0.4, -0.6)),
            (v2(0.1, 0.8), v2(0.2, 0.7)),
        ];
        for (a, b) in pairs {
            let native = region_funk_value(region, a, b);
            let lifted = funk_distance(
                &sq,
                Vec3::from_xy(a, cs.height),
                Vec3::from_xy(b, cs.height),
                Forward,
            )
            .unwrap();
            assert!((native - lifted).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_round_trip() {
        let cone = circ45();
        let cs = choose_cross_section(&cone, &[v3(0.0, 0.0, 0.5)], Forward, 0.1).unwrap();
        let q = v2(0.2, -0.1);
        let ray = lift_to_ray(&cs, q);
        assert!(ray.z > 0.0);
        let back = representative(&cone, &cs, ray * 3.7).unwrap();
        assert!((back - q).norm() < 1e-12);
        // axis point lifts to the axis
        let axis = lift_to_ray(&cs, v2(0.0, 0.0));
        assert!((axis - v3(0.0, 0.0, 1.0)).norm() < 1e-15);
    }
}
