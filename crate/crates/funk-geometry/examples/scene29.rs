use funk_geometry::elliptical;
use funk_geometry::geom::{v3, Vec3};
use funk_geometry::metric::{prune_dominated, Direction};
use funk_geometry::Cone;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TAU: f64 = std::f64::consts::TAU;

fn interior_point(rng: &mut ChaCha8Rng, cone: &Cone, zlo: f64, zhi: f64) -> Vec3 {
    loop {
        let z: f64 = rng.gen_range(zlo..zhi);
        let t = cone.tan_half_angle().unwrap();
        let frac: f64 = rng.gen_range(0.0..0.9);
        let angle: f64 = rng.gen_range(0.0..TAU);
        let p = v3(frac * z * t * angle.cos(), frac * z * t * angle.sin(), z);
        if cone.contains(p, true) {
            return p;
        }
    }
}

fn main() {
    let mut violations = 0;
    let mut tested = 0;
    for scene in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7000 + scene);
        let cone = Cone::circular(rng.gen_range(25f64..65f64).to_radians()).unwrap();
        let n = rng.gen_range(3..=20);
        // rejection-sample until no site dominates any other in either metric
        let sites: Vec<Vec3> = 'outer: loop {
            let candidate: Vec<Vec3> =
                (0..n).map(|_| interior_point(&mut rng, &cone, 0.4, 0.8)).collect();
            for dir in [Direction::Forward, Direction::Reverse] {
                match prune_dominated(&cone, &candidate, dir) {
                    Ok((_, removed)) if removed.is_empty() => {}
                    _ => continue 'outer,
                }
            }
            break candidate;
        };
        let fwd = elliptical::build_funk_voronoi(&cone, &sites, Direction::Forward).unwrap();
        let rev = elliptical::build_funk_voronoi(&cone, &sites, Direction::Reverse).unwrap();
        tested += 1;
        let fwd_triples: Vec<[usize; 3]> = fwd.vertices.iter().map(|v| v.sites).collect();
        for v in &rev.vertices {
            if !fwd_triples.contains(&v.sites) {
                violations += 1;
                println!(
                    "scene {scene} (n={n}): reverse triple {:?} not in forward ({} fwd, {} rev vertices)",
                    v.sites,
                    fwd.vertices.len(),
                    rev.vertices.len()
                );
            }
        }
    }
    println!("tested {tested} scenes, {violations} subset violations");
}
