//! Voronoi diagrams in 2-dimensional cones: explicit bisector rays and the
//! angular-sort diagram.
//!
//! With boundary linear forms `L1`, `L2` and sites in angular order
//! `<ray1, p, q, ray2>`, the forward bisector is the ray solving
//! `L2(x) L1(q) = L1(x) L2(p)` and the reverse bisector solves
//! `L2(x) L1(p) = L1(x) L2(q)`; both pass through the apex.

use crate::cone::PlanarCone;
use crate::error::{FunkError, Result};
use crate::geom::Vec2;
use crate::metric::Direction;
use crate::tol;
use serde::{Deserialize, Serialize};

fn require_interior(cone: &PlanarCone, p: Vec2) -> Result<()> {
    if cone.contains(p, true) {
        Ok(())
    } else {
        Err(FunkError::NotInterior)
    }
}

/// Forward value without interiority checks.
pub(crate) fn funk_value(cone: &PlanarCone, a: Vec2, b: Vec2) -> f64 {
    let r1 = cone.form1(a) / cone.form1(b);
    let r2 = cone.form2(a) / cone.form2(b);
    r1.max(r2).ln()
}

/// Funk distance in a 2-dimensional cone.
pub fn funk_distance(cone: &PlanarCone, a: Vec2, b: Vec2, dir: Direction) -> Result<f64> {
    require_interior(cone, a)?;
    require_interior(cone, b)?;
    Ok(match dir {
        Direction::Forward => funk_value(cone, a, b),
        Direction::Reverse => funk_value(cone, b, a),
    })
}

pub fn dominates(cone: &PlanarCone, a: Vec2, b: Vec2, dir: Direction) -> Result<bool> {
    require_interior(cone, a)?;
    require_interior(cone, b)?;
    let diff = match dir {
        Direction::Forward => b - a,
        Direction::Reverse => a - b,
    };
    let margin = cone.boundary_margin(diff);
    if margin.abs() <= tol::GENERAL_POSITION {
        return Err(FunkError::GeneralPositionViolation(
            "site difference lies on the wedge boundary".into(),
        ));
    }
    Ok(margin > 0.0)
}

/// Unit direction of the bisector ray between two non-dominating sites.
pub fn bisector_ray(cone: &PlanarCone, p: Vec2, q: Vec2, dir: Direction) -> Result<Vec2> {
    require_interior(cone, p)?;
    require_interior(cone, q)?;
    if p.cross(q).abs() <= tol::GENERAL_POSITION * p.norm() * q.norm() {
        return Err(FunkError::DegenerateOrder);
    }
    if dominates(cone, p, q, dir)? || dominates(cone, q, p, dir)? {
        return Err(FunkError::DominatedPair);
    }
    // canonical order: `first` is the site nearer boundary ray 1
    let (first, second) = if p.cross(q) > 0.0 { (p, q) } else { (q, p) };
    // The bisector is the kernel of a linear form; which sites feed L1/L2
    // swaps between the two metrics.
    let (k1, k2) = match dir {
        Direction::Forward => (cone.form1(second), cone.form2(first)),
        Direction::Reverse => (cone.form1(first), cone.form2(second)),
    };
    // phi(v) = k1 * L2(v) - k2 * L1(v); kernel direction is perp(grad phi)
    let (n1, n2) = cone.form_normals();
    let grad = n2 * k1 - n1 * k2;
    let mut d = grad.perp().normalized();
    if !cone.contains(d, false) {
        d = -d;
    }
    if !cone.contains(d, true) {
        return Err(FunkError::Internal("bisector direction left the cone".into()));
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarVoronoi {
    /// Surviving site indices in angular order from boundary ray 1.
    pub order: Vec<usize>,
    /// Bisector ray directions between angularly adjacent survivors
    /// (`order.len() - 1` of them).
    pub rays: Vec<Vec2>,
    pub dominated: Vec<usize>,
    pub direction: Direction,
}

/// Builds the diagram: prune dominated sites, sort survivors by angle, emit
/// one bisector ray per adjacent pair. Cells are the angular sectors between
/// consecutive rays.
pub fn voronoi(cone: &PlanarCone, sites: &[Vec2], dir: Direction) -> Result<PlanarVoronoi> {
    if sites.is_empty() {
        return Err(FunkError::EmptySiteSet);
    }
    for &s in sites {
        require_interior(cone, s)?;
    }
    let n = sites.len();
    let mut removed = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(cone, sites[i], sites[j], dir)? {
                removed[j] = true;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    // angular order via cross products against ray 1: a precedes b when the
    // sweep from ray 1 meets it first
    let mut degenerate = false;
    order.sort_by(|&a, &b| {
        let c = sites[a].cross(sites[b]);
        if c.abs() <= tol::GENERAL_POSITION * sites[a].norm() * sites[b].norm() {
            degenerate = true;
        }
        // positive cross product: a is met first sweeping from ray 1
        0.0f64.partial_cmp(&c).unwrap()
    });
    if degenerate {
        return Err(FunkError::DegenerateOrder);
    }
    let mut rays = Vec::with_capacity(order.len().saturating_sub(1));
    for w in order.windows(2) {
        rays.push(bisector_ray(cone, sites[w[0]], sites[w[1]], dir)?);
    }
    Ok(PlanarVoronoi {
        order,
        rays,
        dominated: (0..n).filter(|&i| removed[i]).collect(),
        direction: dir,
    })
}

impl PlanarVoronoi {
    /// Site owning the angular sector that contains `q`.
    pub fn locate(&self, q: Vec2) -> usize {
        let mut idx = 0;
        for ray in &self.rays {
            // q beyond this bisector (counterclockwise side) belongs to a
            // later cell
            if ray.cross(q) > 0.0 {
                idx += 1;
            } else {
                break;
            }
        }
        self.order[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v2;

    fn wedge() -> PlanarCone {
        PlanarCone::from_rays(v2(1.0, 1.0), v2(-1.0, 1.0)).unwrap()
    }

    #[test]
    fn wedge_distances() {
        let c = wedge();
        let d = funk_distance(&c, v2(0.0, 1.0), v2(0.0, 2.0), Direction::Forward).unwrap();
        assert!((d + 2f64.ln()).abs() < 1e-12);
        let d = funk_distance(&c, v2(0.0, 1.0), v2(0.5, 1.0), Direction::Forward).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-12);
        let p = v2(0.3, 0.9);
        assert!(funk_distance(&c, p, p, Direction::Forward).unwrap().abs() < 1e-12);
    }

    #[test]
    fn symmetric_bisector_is_vertical() {
        let c = wedge();
        let d = bisector_ray(&c, v2(-0.2, 1.0), v2(0.2, 1.0), Direction::Forward).unwrap();
        assert!((d - v2(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn asymmetric_bisector_direction() {
        let c = wedge();
        let d = bisector_ray(&c, v2(0.0, 1.0), v2(0.2, 1.0), Direction::Forward).unwrap();
        let expect = v2(1.0, 11.0).normalized();
        assert!((d - expect).norm() < 1e-12);
        // equal distances along the ray
        for lambda in [0.05, 0.11, 0.4] {
            let x = d * lambda;
            let fp = funk_distance(&c, v2(0.0, 1.0), x, Direction::Forward).unwrap();
            let fq = funk_distance(&c, v2(0.2, 1.0), x, Direction::Forward).unwrap();
            assert!((fp - fq).abs() < 1e-12);
        }
    }

    #[test]
    fn bisector_passes_through_zero_ball_crossing() {
        let c = wedge();
        let p = v2(0.2, 1.0); // adjacent to ray 1
        let q = v2(0.0, 1.0);
        let d = bisector_ray(&c, p, q, Direction::Forward).unwrap();
        // crossing of the ray2-parallel edge of C_p with the ray1-parallel
        // edge of C_q, computed independently
        let crossing = v2(0.1, 1.1);
        assert!(d.cross(crossing).abs() < 1e-12);
    }

    #[test]
    fn voronoi_prunes_and_orders() {
        let c = wedge();
        let dgm = voronoi(&c, &[v2(0.0, 1.0), v2(0.0, 2.0)], Direction::Forward).unwrap();
        assert_eq!(dgm.order, vec![0]);
        assert_eq!(dgm.dominated, vec![1]);
        assert!(dgm.rays.is_empty());

        let sites = [v2(0.4, 1.0), v2(-0.3, 0.8), v2(0.0, 1.0)];
        let dgm = voronoi(&c, &sites, Direction::Forward).unwrap();
        assert_eq!(dgm.order, vec![0, 2, 1]);
        assert_eq!(dgm.rays.len(), 2);
    }

    #[test]
    fn single_site_owns_everything() {
        let c = wedge();
        let dgm = voronoi(&c, &[v2(0.1, 0.7)], Direction::Reverse).unwrap();
        assert_eq!(dgm.order, vec![0]);
        assert_eq!(dgm.locate(v2(-0.2, 0.9)), 0);
    }
}
