//! Circumcenter classification for three sites in a 3-dimensional cone.
//!
//! The cut plane passes through the extreme site `r` (highest for the
//! forward metric, lowest for the reverse), so `r` carries no weight. The
//! weighted bisector of the other two sites parameterizes a pencil of
//! opposite-direction balls tangent to both zero balls; circumcenters are
//! the roots of `g(t) = wd_r(center(t)) - radius(t)` along that pencil, and
//! the endpoint signs of `g` decide the zero-root regions.

use crate::cone::Cone;
use crate::elliptical;
use crate::error::{FunkError, Result};
use crate::geom::{self, Vec2, Vec3};
use crate::metric::{self, Direction};
use crate::polygonal;
use crate::section::{self, CrossSection, SectionRegion, WeightedSite, ZeroBall};
use crate::tol;
use serde::{Deserialize, Serialize};

/// Pencil parameter inset used to realize the limiting tangent balls.
pub const ENDPOINT_EPS: f64 = 1e-6;
/// Default density of the sign-change grid.
pub const GRID_SAMPLES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    /// Inside a zero ball: the third site is dominated, no cell at all.
    Z0,
    /// Inside both limiting tangent balls: no circumcenter.
    Z1,
    /// Inside exactly one limiting tangent ball: one circumcenter.
    B1,
    /// Between the zero balls and both tangent balls: two circumcenters.
    Z2,
    /// Outside everything: no circumcenter.
    W,
}

impl RegionLabel {
    pub fn expected_count(self) -> usize {
        match self {
            RegionLabel::B1 => 1,
            RegionLabel::Z2 => 2,
            _ => 0,
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionLabel::Z0 => "Z0",
            RegionLabel::Z1 => "Z1",
            RegionLabel::B1 => "B1",
            RegionLabel::Z2 => "Z2",
            RegionLabel::W => "W",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct CircumcenterSetup {
    pub cone: Cone,
    pub direction: Direction,
    pub cross_section: CrossSection,
    /// Projections of the two weighted sites.
    pub first: WeightedSite,
    pub second: WeightedSite,
    /// The extreme site's trace on the plane (weight zero).
    pub third: Vec2,
    pub zero_balls: (ZeroBall, ZeroBall),
    /// Weighted bisector polyline from u to v, where (first, u, second) is
    /// in clockwise order around the section.
    pub bisector: Vec<Vec2>,
    sites: [Vec3; 3],
}

/// Builds the section through the extreme site and the weighted bisector of
/// the other two.
pub fn circumcenter_setup(
    cone: &Cone,
    p: Vec3,
    q: Vec3,
    r: Vec3,
    dir: Direction,
) -> Result<CircumcenterSetup> {
    for s in [p, q, r] {
        if !cone.contains(s, true) {
            return Err(FunkError::NotInterior);
        }
    }
    let (pn, qn, rn) = (cone.normalize_point(p), cone.normalize_point(q), cone.normalize_point(r));
    let extreme_gap = match dir {
        Direction::Forward => rn.z - pn.z.max(qn.z),
        Direction::Reverse => pn.z.min(qn.z) - rn.z,
    };
    if extreme_gap <= tol::GENERAL_POSITION {
        return Err(FunkError::WrongExtremeSite);
    }
    if metric::dominates(cone, p, q, dir)? || metric::dominates(cone, q, p, dir)? {
        return Err(FunkError::DominatedPair);
    }
    let cs = section::cross_section_at(cone, rn.z, dir)?;
    let first = section::project_site(cone, &cs, p, 0, dir)?;
    let second = section::project_site(cone, &cs, q, 1, dir)?;
    let zero_balls = (
        section::directed_zero_ball(cone, &cs, p, dir)?,
        section::directed_zero_ball(cone, &cs, q, dir)?,
    );

    let mut bisector = match &cs.region {
        SectionRegion::Disk { .. } => {
            let pair = [first.clone(), second.clone()];
            elliptical::bisector_curve_disk(&cs, &pair, 0, 1, dir)?
        }
        SectionRegion::Polygon { vertices } => {
            polygonal::weighted_bisector(
                vertices,
                (first.position, first.weight),
                (second.position, second.weight),
                dir,
            )?
            .points
        }
    };
    // orient so the first endpoint u satisfies (first, u, second) clockwise
    let u = *bisector.first().unwrap();
    if (second.position - first.position).cross(u - first.position) <= 0.0 {
        bisector.reverse();
    }

    Ok(CircumcenterSetup {
        cone: cone.clone(),
        direction: dir,
        cross_section: cs,
        first,
        second,
        third: rn.xy(),
        zero_balls,
        bisector,
        sites: [p, q, r],
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PencilBall {
    pub center: Vec2,
    /// Common weighted distance from the two sites to the center.
    pub radius: f64,
}

impl CircumcenterSetup {
    /// The three input sites (p, q, r) in the cone's original frame.
    pub fn sites(&self) -> [Vec3; 3] {
        self.sites
    }

    fn wd(&self, ws: &WeightedSite, x: Vec2) -> f64 {
        section::weighted_value(&self.cross_section, ws, x, self.direction)
    }

    fn wd_third(&self, x: Vec2) -> f64 {
        let third = WeightedSite { position: self.third, weight: 0.0, source_index: 2, scale: 1.0 };
        self.wd(&third, x)
    }

    /// Pulls a near-bisector point exactly onto the weighted bisector.
    fn refine_onto_bisector(&self, mut x: Vec2) -> Vec2 {
        let h = 1e-7 * self.cross_section.region.scale();
        for _ in 0..12 {
            let g = self.wd(&self.first, x) - self.wd(&self.second, x);
            if g.abs() < 1e-13 {
                break;
            }
            let gx = (self.wd(&self.first, x + geom::v2(h, 0.0))
                - self.wd(&self.second, x + geom::v2(h, 0.0))
                - (self.wd(&self.first, x - geom::v2(h, 0.0))
                    - self.wd(&self.second, x - geom::v2(h, 0.0))))
                / (2.0 * h);
            let gy = (self.wd(&self.first, x + geom::v2(0.0, h))
                - self.wd(&self.second, x + geom::v2(0.0, h))
                - (self.wd(&self.first, x - geom::v2(0.0, h))
                    - self.wd(&self.second, x - geom::v2(0.0, h))))
                / (2.0 * h);
            let grad = geom::v2(gx, gy);
            let nsq = grad.norm_sq();
            if nsq < 1e-30 {
                break;
            }
            x = x - grad * (g / nsq);
        }
        x
    }

    /// Ball of the tangent pencil at arc-length parameter t in (0, 1).
    pub fn pencil(&self, t: f64) -> PencilBall {
        let raw = polygonal::point_along(&self.bisector, t);
        let center = self.refine_onto_bisector(raw);
        let radius = 0.5 * (self.wd(&self.first, center) + self.wd(&self.second, center));
        PencilBall { center, radius }
    }

    /// Signed clearance of the third site against the pencil ball at t.
    pub fn pencil_gap(&self, t: f64) -> f64 {
        let ball = self.pencil(t);
        self.wd_third(ball.center) - ball.radius
    }

    /// Euclidean tangency defect of the pencil ball's opposite-direction
    /// section against the two zero balls; `None` when the section is empty
    /// (negative opposite radius).
    pub fn pencil_tangency_residual(&self, ball: &PencilBall) -> Option<f64> {
        let rho = ball.radius;
        match &self.cross_section.region {
            SectionRegion::Disk { radius: section_radius } => {
                // the opposite-direction ball cuts the plane in a disk
                let (center_op, r_op) = match self.direction {
                    Direction::Forward => {
                        (ball.center * rho.exp(), (rho.exp() - 1.0) * section_radius)
                    }
                    Direction::Reverse => {
                        (ball.center * (-rho).exp(), (1.0 - (-rho).exp()) * section_radius)
                    }
                };
                if r_op <= 0.0 {
                    return None;
                }
                let mut worst: f64 = 0.0;
                for zb in [&self.zero_balls.0, &self.zero_balls.1] {
                    let (c, w) = section::zero_ball_disk(zb)?;
                    worst = worst.max(((center_op - c).norm() - (r_op + w)).abs());
                }
                Some(worst)
            }
            SectionRegion::Polygon { vertices } => {
                let op: Vec<Vec2> = match self.direction {
                    Direction::Forward => {
                        let f = rho.exp();
                        if f <= 1.0 {
                            return None;
                        }
                        let mut p: Vec<Vec2> = vertices
                            .iter()
                            .map(|&v| ball.center * f - v * (f - 1.0))
                            .collect();
                        p.reverse();
                        p
                    }
                    Direction::Reverse => {
                        let f = (-rho).exp();
                        if f >= 1.0 {
                            return None;
                        }
                        vertices.iter().map(|&v| ball.center * f + v * (1.0 - f)).collect()
                    }
                };
                let mut worst: f64 = 0.0;
                for zb in [&self.zero_balls.0, &self.zero_balls.1] {
                    let poly = zb.as_polygon(0);
                    worst = worst.max(geom::convex_separation(&op, &poly).abs());
                }
                Some(worst)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Circumcenter {
    /// Representative on the cut plane (normalized frame).
    pub representative: Vec2,
    /// Unit ray direction in the cone's original frame.
    pub ray_direction: Vec3,
    /// Common distance from the three sites, in nats.
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub label: RegionLabel,
    pub circumcenters: Vec<Circumcenter>,
}

/// Classifies the third site and returns the circumcenters, if any.
pub fn classify(setup: &CircumcenterSetup) -> Result<Classification> {
    let [p, q, r] = setup.sites;
    let dir = setup.direction;
    if metric::dominates(&setup.cone, p, r, dir)? || metric::dominates(&setup.cone, q, r, dir)? {
        return Ok(Classification { label: RegionLabel::Z0, circumcenters: Vec::new() });
    }

    let samples = GRID_SAMPLES;
    let ts: Vec<f64> = (0..samples)
        .map(|k| ENDPOINT_EPS + (1.0 - 2.0 * ENDPOINT_EPS) * k as f64 / (samples - 1) as f64)
        .collect();
    let gs: Vec<f64> = ts.iter().map(|&t| setup.pencil_gap(t)).collect();

    // grazing extremum without a sign change: the third site sits on a
    // region boundary
    for k in 1..samples - 1 {
        let same_sign = gs[k - 1].signum() == gs[k].signum() && gs[k].signum() == gs[k + 1].signum();
        if same_sign
            && gs[k].abs() < tol::BISECTOR_RESIDUAL
            && gs[k].abs() <= gs[k - 1].abs()
            && gs[k].abs() <= gs[k + 1].abs()
        {
            return Err(FunkError::DegenerateTangency);
        }
    }

    let mut roots = Vec::new();
    for k in 1..samples {
        if gs[k - 1] == 0.0 || gs[k - 1].signum() != gs[k].signum() {
            let (mut lo, mut hi) = (ts[k - 1], ts[k]);
            let mut flo = gs[k - 1];
            for _ in 0..60 {
                if hi - lo < 1e-10 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let fm = setup.pencil_gap(mid);
                if fm == 0.0 || fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }

    let s0 = gs[0] > 0.0;
    let s1 = gs[samples - 1] > 0.0;
    let label = match (roots.len(), s0, s1) {
        (0, false, false) => RegionLabel::Z1,
        (0, true, true) => RegionLabel::W,
        (1, a, b) if a != b => RegionLabel::B1,
        (2, true, true) => RegionLabel::Z2,
        _ => return Err(FunkError::DegenerateTangency),
    };

    let circumcenters = roots
        .iter()
        .map(|&t| {
            let ball = setup.pencil(t);
            let center = refine_circumcenter(setup, ball.center);
            let radius = setup.wd_third(center);
            Circumcenter {
                representative: center,
                ray_direction: setup
                    .cone
                    .denormalize_point(Vec3::from_xy(center, setup.cross_section.height))
                    .normalized(),
                radius,
            }
        })
        .collect();
    Ok(Classification { label, circumcenters })
}

/// Newton refinement of the three-way equidistance from the pencil estimate.
fn refine_circumcenter(setup: &CircumcenterSetup, mut x: Vec2) -> Vec2 {
    let h = 1e-7 * setup.cross_section.region.scale();
    let f = |x: Vec2| -> (f64, f64) {
        let d1 = setup.wd(&setup.first, x);
        let d2 = setup.wd(&setup.second, x);
        let d3 = setup.wd_third(x);
        (d1 - d2, d3 - 0.5 * (d1 + d2))
    };
    for _ in 0..25 {
        let (f1, f2) = f(x);
        if f1.abs() < 1e-13 && f2.abs() < 1e-13 {
            break;
        }
        let (fx1, fx2) = f(x + geom::v2(h, 0.0));
        let (gx1, gx2) = f(x - geom::v2(h, 0.0));
        let (fy1, fy2) = f(x + geom::v2(0.0, h));
        let (gy1, gy2) = f(x - geom::v2(0.0, h));
        let j11 = (fx1 - gx1) / (2.0 * h);
        let j12 = (fy1 - gy1) / (2.0 * h);
        let j21 = (fx2 - gx2) / (2.0 * h);
        let j22 = (fy2 - gy2) / (2.0 * h);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-30 {
            break;
        }
        let dx = (f1 * j22 - f2 * j12) / det;
        let dy = (j11 * f2 - j21 * f1) / det;
        let step = geom::v2(dx, dy);
        x = x - step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{v2, v3};
    use crate::metric::Direction::*;

    fn circ45() -> Cone {
        Cone::circular(std::f64::consts::FRAC_PI_4).unwrap()
    }

    fn symmetric_setup() -> CircumcenterSetup {
        circumcenter_setup(
            &circ45(),
            v3(-0.3, 0.0, 0.65),
            v3(0.3, 0.0, 0.65),
            v3(0.0, 0.0, 0.9),
            Forward,
        )
        .unwrap()
    }

    #[test]
    fn setup_geometry() {
        let s = symmetric_setup();
        assert!((s.cross_section.height - 0.9).abs() < 1e-15);
        match s.cross_section.region {
            SectionRegion::Disk { radius } => assert!((radius - 0.9).abs() < 1e-12),
            _ => panic!(),
        }
        let (c, w) = section::zero_ball_disk(&s.zero_balls.0).unwrap();
        assert!((c - v2(-0.3, 0.0)).norm() < 1e-12);
        assert!((w - 0.25).abs() < 1e-12);
        // bisector is the x = 0 chord; u is clockwise from p' toward +y
        assert!(s.bisector.first().unwrap().y > 0.0);
        for pt in &s.bisector {
            assert!(pt.x.abs() < 1e-7);
        }
    }

    #[test]
    fn wrong_extreme_site_rejected() {
        let cone = circ45();
        let err = circumcenter_setup(
            &cone,
            v3(-0.3, 0.0, 0.65),
            v3(0.3, 0.0, 0.65),
            v3(0.0, 0.0, 0.5),
            Forward,
        );
        assert!(matches!(err, Err(FunkError::WrongExtremeSite)));
    }

    #[test]
    fn dominated_pair_rejected() {
        let cone = circ45();
        let err = circumcenter_setup(
            &cone,
            v3(0.0, 0.0, 0.4),
            v3(0.01, 0.0, 0.6),
            v3(0.0, 0.0, 0.9),
            Forward,
        );
        assert!(matches!(err, Err(FunkError::DominatedPair)));
    }

    #[test]
    fn dominated_third_is_z0() {
        let cone = circ45();
        let p = v3(-0.3, 0.0, 0.65);
        let q = v3(0.3, 0.0, 0.65);
        let r = v3(-0.36, 0.0, 0.78); // 1.2 * p, on the ray above p
        let s = circumcenter_setup(&cone, p, q, r, Forward).unwrap();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::Z0);
        assert!(c.circumcenters.is_empty());
    }

    #[test]
    fn symmetric_instance_is_z2() {
        let s = symmetric_setup();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::Z2);
        assert_eq!(c.circumcenters.len(), 2);
        // tangent-circle algebra gives representatives at y = +-0.198/3.82
        let expected = 0.198 / 3.82;
        let mut ys: Vec<f64> = c.circumcenters.iter().map(|c| c.representative.y).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ys[0] + expected).abs() < 1e-9, "got {}", ys[0]);
        assert!((ys[1] - expected).abs() < 1e-9, "got {}", ys[1]);
        for cc in &c.circumcenters {
            assert!(cc.representative.x.abs() < 1e-9);
            // genuinely equidistant
            let d1 = s.wd(&s.first, cc.representative);
            let d2 = s.wd(&s.second, cc.representative);
            let d3 = s.wd_third(cc.representative);
            assert!((d1 - d2).abs() < 1e-10);
            assert!((d1 - d3).abs() < 1e-10);
        }
    }

    #[test]
    fn pencil_symmetry_and_tangency() {
        let s = symmetric_setup();
        let mid = s.pencil(0.5);
        assert!(mid.center.norm() < 1e-9);
        for k in 1..10 {
            let ball = s.pencil(k as f64 / 10.0);
            if let Some(res) = s.pencil_tangency_residual(&ball) {
                assert!(res < 1e-7, "tangency residual {res}");
            }
        }
    }

    #[test]
    fn nudged_instance_is_b1() {
        // push the third site along +y until exactly one root survives
        let cone = circ45();
        let p = v3(-0.3, 0.0, 0.65);
        let q = v3(0.3, 0.0, 0.65);
        let r = v3(0.0, 0.42, 0.9);
        let s = circumcenter_setup(&cone, p, q, r, Forward).unwrap();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::B1);
        assert_eq!(c.circumcenters.len(), 1);
    }

    #[test]
    fn far_corner_is_w() {
        let cone = circ45();
        let p = v3(-0.08, 0.0, 0.8);
        let q = v3(0.08, 0.0, 0.8);
        let r = v3(0.6, 0.0, 0.9);
        let s = circumcenter_setup(&cone, p, q, r, Forward).unwrap();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::W);
        assert!(c.circumcenters.is_empty());
    }

    #[test]
    fn square_cone_symmetric_triple() {
        let cone = Cone::polyhedral_from_section(vec![
            v2(-1.0, -1.0),
            v2(1.0, -1.0),
            v2(1.0, 1.0),
            v2(-1.0, 1.0),
        ])
        .unwrap();
        let s = circumcenter_setup(
            &cone,
            v3(-0.3, 0.0, 0.65),
            v3(0.3, 0.0, 0.65),
            v3(0.0, 0.0, 0.9),
            Forward,
        )
        .unwrap();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::Z2);
        assert_eq!(c.circumcenters.len(), 2);
        for cc in &c.circumcenters {
            let d1 = s.wd(&s.first, cc.representative);
            let d3 = s.wd_third(cc.representative);
            assert!((d1 - d3).abs() < 1e-9);
        }
    }

    #[test]
    fn reverse_direction_classifies() {
        let cone = circ45();
        let p = v3(-0.25, 0.0, 0.8);
        let q = v3(0.25, 0.0, 0.8);
        let r = v3(0.0, 0.1, 0.55);
        let s = circumcenter_setup(&cone, p, q, r, Reverse).unwrap();
        let c = classify(&s).unwrap();
        assert_eq!(c.label, RegionLabel::Z2);
        assert_eq!(c.circumcenters.len(), 2);
        for cc in &c.circumcenters {
            let d1 = s.wd(&s.first, cc.representative);
            let d3 = s.wd_third(cc.representative);
            assert!((d1 - d3).abs() < 1e-9);
        }
    }
}
