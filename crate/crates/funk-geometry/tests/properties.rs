//! Property tests for the metric invariants.

use funk_geometry::apollonius::{tritangent_circles, WeightedPoint};
use funk_geometry::geom::{v2, v3, Vec2, Vec3};
use funk_geometry::metric::{ball_contains, dominates, funk_distance, Direction};
use funk_geometry::section::{self, ZeroBall};
use funk_geometry::{Cone, PlanarCone};
use proptest::prelude::*;

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

/// Interior point of the 45-degree circular cone (and of the square cone).
fn interior_point() -> impl Strategy<Value = Vec3> {
    (0.2f64..1.4, 0.0f64..0.9, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(z, frac, angle)| v3(frac * z * angle.cos(), frac * z * angle.sin(), z))
}

fn directions() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Forward), Just(Direction::Reverse)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn triangle_inequality(a in interior_point(), b in interior_point(), c in interior_point(), dir in directions()) {
        for cone in [circ45(), square_cone()] {
            let ab = funk_distance(&cone, a, b, dir).unwrap();
            let bc = funk_distance(&cone, b, c, dir).unwrap();
            let ac = funk_distance(&cone, a, c, dir).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn straight_lines_are_geodesic(a in interior_point(), c in interior_point(), t in 0.05f64..0.95) {
        let b = a + (c - a) * t;
        for cone in [circ45(), square_cone()] {
            let ab = funk_distance(&cone, a, b, Direction::Forward).unwrap();
            let bc = funk_distance(&cone, b, c, Direction::Forward).unwrap();
            let ac = funk_distance(&cone, a, c, Direction::Forward).unwrap();
            prop_assert!((ac - ab - bc).abs() <= 1e-9);
        }
    }

    #[test]
    fn balls_match_distances(center in interior_point(), q in interior_point(), rho in -1.0f64..1.0, dir in directions()) {
        let cone = circ45();
        let d = funk_distance(&cone, center, q, dir).unwrap();
        // skip the boundary band where the carrier decision may go either way
        if (d - rho).abs() > 1e-9 {
            let inside = ball_contains(&cone, center, rho, dir, q).unwrap();
            prop_assert_eq!(inside, d <= rho);
        }
    }

    #[test]
    fn ray_additivity(p in interior_point(), q in interior_point(), lambda in 0.1f64..10.0) {
        let cone = circ45();
        let f = funk_distance(&cone, p, q, Direction::Forward).unwrap();
        let shifted = funk_distance(&cone, p * lambda, q, Direction::Forward).unwrap();
        prop_assert!((f + lambda.ln() - shifted).abs() <= 1e-9);
    }

    #[test]
    fn scaling_invariance(a in interior_point(), b in interior_point(), s in 0.05f64..20.0, dir in directions()) {
        for cone in [circ45(), square_cone()] {
            let d = funk_distance(&cone, a, b, dir).unwrap();
            let ds = funk_distance(&cone, a * s, b * s, dir).unwrap();
            prop_assert!((d - ds).abs() <= 1e-10);
        }
    }

    #[test]
    fn domination_implies_strict_order(a in interior_point(), offset in interior_point(), c in interior_point()) {
        let cone = circ45();
        let b = a + offset * 0.2;
        if let Ok(true) = dominates(&cone, a, b, Direction::Forward) {
            let da = funk_distance(&cone, a, c, Direction::Forward).unwrap();
            let db = funk_distance(&cone, b, c, Direction::Forward).unwrap();
            prop_assert!(da < db);
        }
    }

    #[test]
    fn bisector_rays_scale(a in interior_point(), b in interior_point(), p in interior_point(), lambda in 0.5f64..2.0) {
        // the equidistance gap is invariant along rays through the apex
        let cone = circ45();
        let gap = funk_distance(&cone, a, p, Direction::Forward).unwrap()
            - funk_distance(&cone, b, p, Direction::Forward).unwrap();
        let gap_scaled = funk_distance(&cone, a, p * lambda, Direction::Forward).unwrap()
            - funk_distance(&cone, b, p * lambda, Direction::Forward).unwrap();
        prop_assert!((gap - gap_scaled).abs() <= 1e-9);
    }

    #[test]
    fn zero_ball_boundary_has_zero_distance(site in interior_point(), angle in 0.0f64..std::f64::consts::TAU) {
        for cone in [circ45(), square_cone()] {
            let cs = section::choose_cross_section(&cone, &[site], Direction::Forward, 0.25).unwrap();
            let ball = section::zero_ball(&cone, &cs, site).unwrap();
            let boundary_point: Vec2 = match &ball {
                ZeroBall::Disk { center, radius } => {
                    *center + v2(angle.cos(), angle.sin()) * *radius
                }
                ZeroBall::Polygon { vertices } => {
                    // walk the perimeter by the angle fraction
                    let k = ((angle / std::f64::consts::TAU) * vertices.len() as f64) as usize
                        % vertices.len();
                    let a = vertices[k];
                    let b = vertices[(k + 1) % vertices.len()];
                    a.lerp(b, 0.5)
                }
            };
            let lifted = Vec3::from_xy(boundary_point, cs.height);
            if cone.contains(lifted, true) {
                let d = funk_distance(&cone, site, lifted, Direction::Forward).unwrap();
                prop_assert!(d.abs() <= 1e-9, "zero ball boundary at distance {d}");
            }
        }
    }

    #[test]
    fn projection_preserves_distances(site in interior_point(), q2 in (-0.6f64..0.6, -0.6f64..0.6), dir in directions()) {
        let cone = circ45();
        let cs = match dir {
            Direction::Forward => section::choose_cross_section(&cone, &[site], dir, 0.4).unwrap(),
            Direction::Reverse => section::choose_cross_section(&cone, &[site], dir, 0.4).unwrap(),
        };
        let q = v2(q2.0, q2.1) * cs.region.scale();
        if cs.region.contains(q, 1e-6) {
            let ws = section::project_site(&cone, &cs, site, 0, dir).unwrap();
            let reduced = section::weighted_distance(&cs, &ws, q, dir).unwrap();
            let direct =
                funk_distance(&cone, site, Vec3::from_xy(q, cs.height), dir).unwrap();
            prop_assert!((reduced - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn planar_distance_matches_oracle(ax in -0.5f64..0.5, ay in 0.6f64..1.5, bx in -0.5f64..0.5, by in 0.6f64..1.5) {
        let wedge = PlanarCone::from_rays(v2(1.0, 1.0), v2(-1.0, 1.0)).unwrap();
        let (a, b) = (v2(ax, ay), v2(bx, by));
        if wedge.contains(a, true) && wedge.contains(b, true) {
            for dir in [Direction::Forward, Direction::Reverse] {
                let fast = funk_geometry::planar::funk_distance(&wedge, a, b, dir).unwrap();
                let slow =
                    funk_geometry::oracle::beta_scaling_distance_planar(&wedge, a, b, dir).unwrap();
                prop_assert!((fast - slow).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn tritangent_circles_are_tangent(cx in -1.0f64..1.0, cy in -1.0f64..1.0, w1 in 0.0f64..0.4, w2 in 0.0f64..0.4, w3 in 0.0f64..0.4) {
        let s1 = WeightedPoint::new(v2(-1.0, 0.0), w1);
        let s2 = WeightedPoint::new(v2(1.0, 0.1), w2);
        let s3 = WeightedPoint::new(v2(cx, cy + 1.5), w3);
        if let Ok(circles) = tritangent_circles(&s1, &s2, &s3) {
            for (center, radius) in circles {
                for s in [&s1, &s2, &s3] {
                    let residual = ((center - s.center).norm() - (radius + s.weight)).abs();
                    prop_assert!(residual <= 1e-8, "tangency residual {residual}");
                }
            }
        }
    }
}
