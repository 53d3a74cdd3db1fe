//! `funk` command line: distances, Voronoi diagrams, circumcenters, and
//! oracle verification for Funk-metric scenes.
//!
//! Exit codes: 0 ok, 1 verification failed, 2 invalid input, 3 degeneracy.

mod output;
mod scene;
mod svg;

use clap::{Parser, Subcommand};
use funk_geometry::circumcenter::{circumcenter_setup, classify};
use funk_geometry::geom::{v2, Vec2};
use funk_geometry::metric::{funk_distance, Direction};
use funk_geometry::section::{self, WeightedSite};
use funk_geometry::{elliptical, oracle, planar, polygonal, FunkError};
use scene::{load_scene, Scene};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "funk", version, about = "Funk-metric geometry in convex cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print forward and reverse distances between two scene sites.
    Distance {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        metric: Option<String>,
    },
    /// Build the Voronoi diagram of the scene and write it as JSON.
    Voronoi {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Draw spokes in the SVG (polygonal sections only).
        #[arg(long)]
        spokes: bool,
    },
    /// Classify the circumcenters of a three-site scene.
    Circumcenter {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        metric: Option<String>,
    },
    /// Check a diagram against the brute-force oracle.
    Verify {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long)]
        metric: Option<String>,
        /// Cross-check a previously written diagram JSON file.
        #[arg(long)]
        diagram: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<FunkError> for Failure {
    fn from(e: FunkError) -> Failure {
        let code = match e {
            FunkError::GeneralPositionViolation(_)
            | FunkError::DegenerateOrder
            | FunkError::DegenerateTriple(_)
            | FunkError::OnSpoke
            | FunkError::TraceStall
            | FunkError::DegenerateTangency
            | FunkError::FilteredOut => EXIT_DEGENERATE,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<scene::SceneError> for Failure {
    fn from(e: scene::SceneError) -> Failure {
        Failure::invalid(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_scene(path: &PathBuf, metric: Option<&str>) -> Result<Scene, Failure> {
    let text = std::fs::read_to_string(path)?;
    Ok(load_scene(&text, metric)?)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Distance { scene, from, to, metric } => {
            cmd_distance(&read_scene(&scene, metric.as_deref())?, from, to)
        }
        Command::Voronoi { scene, out, svg, metric, seed, spokes } => {
            cmd_voronoi(&read_scene(&scene, metric.as_deref())?, &out, svg.as_deref(), seed, spokes)
        }
        Command::Circumcenter { scene, metric } => {
            cmd_circumcenter(&read_scene(&scene, metric.as_deref())?)
        }
        Command::Verify { scene, resolution, metric, diagram } => cmd_verify(
            &read_scene(&scene, metric.as_deref())?,
            resolution,
            diagram.as_deref(),
        ),
    }
}

fn cmd_distance(scene: &Scene, from: usize, to: usize) -> Result<u8, Failure> {
    let (f, r) = match scene {
        Scene::Spatial { cone, sites, .. } => {
            let (a, b) = pair(sites, from, to)?;
            (
                funk_distance(cone, a, b, Direction::Forward)?,
                funk_distance(cone, a, b, Direction::Reverse)?,
            )
        }
        Scene::Planar { cone, sites, .. } => {
            let (a, b) = pair(sites, from, to)?;
            (
                planar::funk_distance(cone, a, b, Direction::Forward)?,
                planar::funk_distance(cone, a, b, Direction::Reverse)?,
            )
        }
    };
    println!("F  = {f:.11e}");
    println!("Fr = {r:.11e}");
    Ok(0)
}

fn pair<T: Copy>(sites: &[T], from: usize, to: usize) -> Result<(T, T), Failure> {
    if from >= sites.len() || to >= sites.len() {
        return Err(Failure::invalid(format!(
            "site index out of range (scene has {} sites)",
            sites.len()
        )));
    }
    Ok((sites[from], sites[to]))
}

fn cmd_voronoi(
    scene: &Scene,
    out: &PathBuf,
    svg_path: Option<&std::path::Path>,
    seed: Option<u64>,
    spokes: bool,
) -> Result<u8, Failure> {
    let seed = seed.unwrap_or(scene.seed());
    let (file, rendered) = match scene {
        Scene::Spatial { cone, sites, metric, .. } if cone.is_polyhedral() => {
            let d = polygonal::build_with_seed(
                cone,
                sites,
                *metric,
                seed,
                funk_geometry::tol::SECTION_MARGIN,
            )?;
            let balls = kept_zero_balls(cone, &d.cross_section, sites, &d.kept, *metric)?;
            let rendered = svg::render_polygonal(&d, &balls, spokes);
            (output::from_polygonal(&d, sites), rendered)
        }
        Scene::Spatial { cone, sites, metric, .. } => {
            let d = elliptical::build_funk_voronoi(cone, sites, *metric)?;
            let balls = kept_zero_balls(cone, &d.cross_section, sites, &d.kept, *metric)?;
            let rendered = svg::render_elliptical(&d, &balls);
            (output::from_elliptical(&d, sites, seed), rendered)
        }
        Scene::Planar { cone, sites, metric, .. } => {
            let d = planar::voronoi(cone, sites, *metric)?;
            let rendered = svg::render_planar(cone, sites, &d.rays);
            (output::from_planar(&d, sites, seed), rendered)
        }
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Failure::invalid(format!("serialization failed: {e}")))?;
    std::fs::write(out, json + "\n")?;
    if let Some(path) = svg_path {
        std::fs::write(path, rendered)?;
    }
    Ok(0)
}

fn kept_zero_balls(
    cone: &funk_geometry::Cone,
    cs: &section::CrossSection,
    sites: &[funk_geometry::Vec3],
    kept: &[usize],
    dir: Direction,
) -> Result<Vec<section::ZeroBall>, Failure> {
    kept.iter()
        .map(|&i| section::directed_zero_ball(cone, cs, sites[i], dir).map_err(Failure::from))
        .collect()
}

fn cmd_circumcenter(scene: &Scene) -> Result<u8, Failure> {
    let Scene::Spatial { cone, sites, metric, .. } = scene else {
        return Err(Failure::invalid("circumcenter needs a 3-dimensional cone"));
    };
    if sites.len() != 3 {
        return Err(Failure::invalid("circumcenter needs exactly 3 sites"));
    }
    // the extreme site (highest for forward, lowest for reverse) carries the
    // cut plane
    let key = |i: usize| cone.normalize_point(sites[i]).z;
    let extreme = (0..3)
        .max_by(|&a, &b| {
            let (za, zb) = (key(a), key(b));
            match metric {
                Direction::Forward => za.partial_cmp(&zb).unwrap(),
                Direction::Reverse => zb.partial_cmp(&za).unwrap(),
            }
        })
        .unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != extreme).collect();
    let setup = circumcenter_setup(
        cone,
        sites[others[0]],
        sites[others[1]],
        sites[extreme],
        *metric,
    )?;
    let result = classify(&setup)?;
    println!("label = {}", result.label);
    println!("circumcenters = {}", result.circumcenters.len());
    for (k, c) in result.circumcenters.iter().enumerate() {
        println!(
            "center[{k}]: representative = ({:.11e}, {:.11e}) ray = ({:.11e}, {:.11e}, {:.11e}) radius = {:.11e}",
            c.representative.x,
            c.representative.y,
            c.ray_direction.x,
            c.ray_direction.y,
            c.ray_direction.z,
            c.radius
        );
    }
    Ok(0)
}

struct VerifyReport {
    agreement: f64,
    max_residual: f64,
}

impl VerifyReport {
    fn pass(&self) -> bool {
        self.agreement >= 0.999 && self.max_residual <= 1e-7
    }

    fn print(&self) {
        println!("agreement={:.6}", self.agreement);
        println!("max_residual={:.3e}", self.max_residual);
        println!("verdict={}", if self.pass() { "pass" } else { "fail" });
    }
}

fn cmd_verify(
    scene: &Scene,
    resolution: usize,
    diagram: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    if let Some(path) = diagram {
        return cross_check(scene, path);
    }
    let report = match scene {
        Scene::Spatial { cone, sites, metric, seed } => {
            verify_spatial(cone, sites, *metric, *seed, resolution)?
        }
        Scene::Planar { cone, sites, metric, .. } => {
            verify_planar(cone, sites, *metric, resolution)?
        }
    };
    report.print();
    Ok(if report.pass() { 0 } else { EXIT_VERIFY_FAILED })
}

fn verify_spatial(
    cone: &funk_geometry::Cone,
    sites: &[funk_geometry::Vec3],
    metric: Direction,
    seed: u64,
    resolution: usize,
) -> Result<VerifyReport, Failure> {
    if cone.is_polyhedral() {
        let d = polygonal::build_with_seed(
            cone,
            sites,
            metric,
            seed,
            funk_geometry::tol::SECTION_MARGIN,
        )?;
        let grid = oracle::grid_labeling(&d.cross_section, &d.weighted, metric, resolution);
        let (agreement, _) = oracle::agreement_fraction(&grid, 1e-6, |q| d.locate(q));
        let max_residual =
            d.vertices.iter().map(|v| v.residual).fold(0.0, f64::max);
        Ok(VerifyReport { agreement, max_residual })
    } else {
        let d = elliptical::build_funk_voronoi(cone, sites, metric)?;
        let grid = oracle::grid_labeling(&d.cross_section, &d.weighted, metric, resolution);
        let (agreement, _) = oracle::agreement_fraction(&grid, 1e-6, |q| d.locate(q));
        let max_residual =
            d.vertices.iter().map(|v| v.residual).fold(0.0, f64::max);
        Ok(VerifyReport { agreement, max_residual })
    }
}

fn verify_planar(
    cone: &funk_geometry::PlanarCone,
    sites: &[Vec2],
    metric: Direction,
    resolution: usize,
) -> Result<VerifyReport, Failure> {
    let d = planar::voronoi(cone, sites, metric)?;
    let reach = sites.iter().map(|s| s.norm()).fold(1.0, f64::max);
    let (r1, r2) = cone.rays();
    let mut total = 0usize;
    let mut agree = 0usize;
    let mut max_residual: f64 = 0.0;
    for iu in 1..resolution {
        for iv in 1..resolution {
            // interpolate between the boundary rays, then scale outward
            let t = iu as f64 / resolution as f64;
            let s = 0.1 + 2.0 * reach * iv as f64 / resolution as f64;
            let q = (r1 * (1.0 - t) + r2 * t).normalized() * s;
            if cone.boundary_margin(q) < 1e-9 {
                continue;
            }
            let mut best = (usize::MAX, f64::INFINITY);
            let mut second = f64::INFINITY;
            for (i, &site) in sites.iter().enumerate() {
                let dist = planar::funk_distance(cone, site, q, metric)?;
                if dist < best.1 {
                    second = best.1;
                    best = (i, dist);
                } else {
                    second = second.min(dist);
                }
            }
            if second - best.1 < 1e-6 {
                continue;
            }
            total += 1;
            if d.locate(q) == best.0 {
                agree += 1;
            }
        }
    }
    // bisector ray equidistance residual
    for (ray, pairidx) in d.rays.iter().zip(d.order.windows(2)) {
        for lambda in [0.5, 1.0, 2.0] {
            let x = *ray * (reach * lambda);
            let fp = planar::funk_distance(cone, sites[pairidx[0]], x, metric)?;
            let fq = planar::funk_distance(cone, sites[pairidx[1]], x, metric)?;
            max_residual = max_residual.max((fp - fq).abs());
        }
    }
    let agreement = if total == 0 { 1.0 } else { agree as f64 / total as f64 };
    Ok(VerifyReport { agreement, max_residual })
}

/// Re-verifies a previously written diagram file: recomputes every recorded
/// vertex residual from the file's own positions and weights, and compares
/// the vertex set against a fresh build.
fn cross_check(scene: &Scene, path: &std::path::Path) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path)?;
    let file: output::DiagramFile = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("malformed diagram JSON: {e}")))?;
    let mut ok = true;

    if let (Some(cs), Some(positions), Some(weights)) =
        (&file.cross_section, &file.positions, &file.weights)
    {
        let dir = match file.metric.as_str() {
            "reverse" => Direction::Reverse,
            _ => Direction::Forward,
        };
        let mut max_residual: f64 = 0.0;
        for v in &file.vertices {
            let rep = v2(v.representative[0], v.representative[1]);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &s in &v.sites {
                if s >= positions.len() {
                    ok = false;
                    continue;
                }
                let ws = WeightedSite {
                    position: v2(positions[s][0], positions[s][1]),
                    weight: weights[s],
                    source_index: s,
                    scale: 1.0,
                };
                let d = section::weighted_value(cs, &ws, rep, dir);
                lo = lo.min(d);
                hi = hi.max(d);
            }
            if v.sites.len() >= 2 {
                max_residual = max_residual.max(hi - lo);
            }
        }
        println!("recorded_vertex_residual={max_residual:.3e}");
        if max_residual > 1e-7 {
            ok = false;
        }
    }

    // the recorded vertex triples must match a fresh build exactly
    if let Scene::Spatial { cone, sites, seed, .. } = scene {
        let dir = match file.metric.as_str() {
            "reverse" => Direction::Reverse,
            _ => Direction::Forward,
        };
        let fresh: Vec<Vec<usize>> = if cone.is_polyhedral() {
            polygonal::build_with_seed(cone, sites, dir, *seed, funk_geometry::tol::SECTION_MARGIN)?
                .vertices
                .iter()
                .map(|v| v.sites.clone())
                .collect()
        } else {
            elliptical::build_funk_voronoi(cone, sites, dir)?
                .vertices
                .iter()
                .map(|v| v.sites.to_vec())
                .collect()
        };
        let mut recorded: Vec<Vec<usize>> = file.vertices.iter().map(|v| v.sites.clone()).collect();
        let mut expected = fresh;
        recorded.sort();
        expected.sort();
        println!("vertex_sets_match={}", recorded == expected);
        if recorded != expected {
            ok = false;
        }
    }

    println!("verdict={}", if ok { "pass" } else { "fail" });
    Ok(if ok { 0 } else { EXIT_VERIFY_FAILED })
}
