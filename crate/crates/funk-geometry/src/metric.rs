//! Forward and reverse Funk distances, balls, domination, and the conical
//! partial order.
//!
//! The forward distance is `ln inf { beta : beta*b in C_a }`. It is signed:
//! negative when `b` lies inside the zero ball of `a`, zero on its boundary,
//! positive below it. The reverse distance swaps the arguments.

use crate::cone::Cone;
use crate::error::{FunkError, Result};
use crate::geom::Vec3;
use crate::tol;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Forward => write!(f, "forward"),
            Direction::Reverse => write!(f, "reverse"),
        }
    }
}

/// Forward Funk value without interiority checks. `b` must be strictly
/// interior for the value to be finite; `a` may sit on the boundary.
pub(crate) fn funk_value(cone: &Cone, a: Vec3, b: Vec3) -> f64 {
    match cone {
        Cone::Circular(_) => circular_value(cone.tan_half_angle().unwrap(), a, b),
        Cone::Elliptical(_) => circular_value(
            cone.tan_half_angle().unwrap(),
            cone.normalize_point(a),
            cone.normalize_point(b),
        ),
        Cone::Polyhedral(_) => {
            let normals = cone.facet_normals().unwrap();
            let mut best = f64::NEG_INFINITY;
            for n in normals {
                let na = n.dot(a);
                let nb = n.dot(b);
                if nb <= 0.0 {
                    if na > 0.0 {
                        return f64::INFINITY;
                    }
                    continue;
                }
                best = best.max(na / nb);
            }
            best.ln()
        }
    }
}

/// Larger root of the boundary quadratic for a circular cone with
/// tan(half angle) = t: the scaling of `b` that lands on the boundary of
/// the cone translated to `a`.
fn circular_value(t: f64, a: Vec3, b: Vec3) -> f64 {
    let t2 = t * t;
    let axy = a.xy();
    let bxy = b.xy();
    let qa = t2 * b.z * b.z - bxy.norm_sq();
    let qb = 2.0 * (axy.dot(bxy) - t2 * a.z * b.z);
    let qc = t2 * a.z * a.z - axy.norm_sq();
    let mut disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        // cannot happen for interior inputs; tolerate rounding at tangency
        debug_assert!(disc > -tol::DISCRIMINANT_CLAMP, "discriminant {disc}");
        disc = 0.0;
    }
    // qa > 0 and qb < 0 for interior points, so both terms are positive.
    let beta = (-qb + disc.sqrt()) / (2.0 * qa);
    beta.ln()
}

fn require_interior(cone: &Cone, p: Vec3) -> Result<()> {
    if cone.contains(p, true) {
        Ok(())
    } else {
        Err(FunkError::NotInterior)
    }
}

/// Funk distance between interior points, in nats.
pub fn funk_distance(cone: &Cone, a: Vec3, b: Vec3, dir: Direction) -> Result<f64> {
    require_interior(cone, a)?;
    require_interior(cone, b)?;
    Ok(match dir {
        Direction::Forward => funk_value(cone, a, b),
        Direction::Reverse => funk_value(cone, b, a),
    })
}

/// Apex of the radius-`rho` ball around `center`: the forward ball is the
/// cone translated to `e^{-rho} center`, the reverse ball is the reflected
/// cone translated to `e^{rho} center`.
pub fn ball_apex(cone: &Cone, center: Vec3, rho: f64, dir: Direction) -> Result<Vec3> {
    require_interior(cone, center)?;
    Ok(match dir {
        Direction::Forward => center * (-rho).exp(),
        Direction::Reverse => center * rho.exp(),
    })
}

pub fn ball_contains(cone: &Cone, center: Vec3, rho: f64, dir: Direction, q: Vec3) -> Result<bool> {
    let apex = ball_apex(cone, center, rho, dir)?;
    Ok(match dir {
        Direction::Forward => cone.contains(q - apex, false),
        Direction::Reverse => cone.contains(apex - q, false),
    })
}

/// Whether `a` dominates `b`: every point of the cone is then strictly
/// closer to `a`, so `b` has an empty Voronoi cell.
pub fn dominates(cone: &Cone, a: Vec3, b: Vec3, dir: Direction) -> Result<bool> {
    require_interior(cone, a)?;
    require_interior(cone, b)?;
    let diff = match dir {
        Direction::Forward => b - a,
        Direction::Reverse => a - b,
    };
    let margin = cone.boundary_margin(diff);
    if margin.abs() <= tol::GENERAL_POSITION {
        return Err(FunkError::GeneralPositionViolation(
            "site difference lies on the cone boundary".into(),
        ));
    }
    Ok(margin > 0.0)
}

/// Splits `sites` into (kept, removed) index lists; removed sites are those
/// dominated by some other site and would have empty Voronoi cells.
pub fn prune_dominated(cone: &Cone, sites: &[Vec3], dir: Direction) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = sites.len();
    let mut removed = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(cone, sites[i], sites[j], dir)? {
                removed[j] = true;
            }
        }
    }
    let kept = (0..n).filter(|&i| !removed[i]).collect();
    let gone = (0..n).filter(|&i| removed[i]).collect();
    Ok((kept, gone))
}

/// All ordered pairs (i, j) with `sites[j] - sites[i]` in the closed cone;
/// transitive by construction, no Hasse reduction applied.
pub fn partial_order(cone: &Cone, sites: &[Vec3]) -> Result<Vec<(usize, usize)>> {
    for &s in sites {
        require_interior(cone, s)?;
    }
    let mut pairs = Vec::new();
    for i in 0..sites.len() {
        for j in 0..sites.len() {
            if i != j && cone.contains(sites[j] - sites[i], false) {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}
