//! Parallel vs. sequential throughput of the data-parallel kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funk_geometry::apollonius::{build_apollonius, build_apollonius_seq, WeightedPoint};
use funk_geometry::geom::{v2, v3, Vec3};
use funk_geometry::metric::Direction;
use funk_geometry::oracle::{grid_labeling, grid_labeling_seq};
use funk_geometry::section::{choose_cross_section, project_site, WeightedSite};
use funk_geometry::Cone;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sites(n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(0.4..1.0);
            let r: f64 = rng.gen_range(0.0..0.8) * z;
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            v3(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

fn bench_grid(c: &mut Criterion) {
    let cone = Cone::circular(std::f64::consts::FRAC_PI_4).unwrap();
    let sites = random_sites(20, 7);
    let cs = choose_cross_section(&cone, &sites, Direction::Forward, 0.05).unwrap();
    let ws: Vec<WeightedSite> = sites
        .iter()
        .enumerate()
        .map(|(i, &s)| project_site(&cone, &cs, s, i, Direction::Forward).unwrap())
        .collect();

    let mut group = c.benchmark_group("grid_labeling");
    for resolution in [128usize, 256] {
        group.bench_with_input(BenchmarkId::new("parallel", resolution), &resolution, |b, &res| {
            b.iter(|| grid_labeling(&cs, &ws, Direction::Forward, res))
        });
        group.bench_with_input(BenchmarkId::new("sequential", resolution), &resolution, |b, &res| {
            b.iter(|| grid_labeling_seq(&cs, &ws, Direction::Forward, res))
        });
    }
    group.finish();
}

fn bench_apollonius(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sites: Vec<WeightedPoint> = (0..60)
        .map(|_| {
            WeightedPoint::new(
                v2(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                rng.gen_range(0.0..0.08),
            )
        })
        .collect();

    let mut group = c.benchmark_group("apollonius_build");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| build_apollonius(&sites)));
    group.bench_function("sequential", |b| b.iter(|| build_apollonius_seq(&sites)));
    group.finish();
}

criterion_group!(benches, bench_grid, bench_apollonius);
criterion_main!(benches);
