//! Funk Voronoi diagrams in 3-dimensional circular and elliptical cones.
//!
//! Pipeline: cut a cross-section disk, turn each surviving site's zero ball
//! into an additively weighted planar site, compute the Apollonius diagram
//! of those disks, then filter (reverse metric only) and relocate each
//! tangent circle back to a vertex ray of the cone. Elliptical cones are
//! handled entirely by the linear map and its inverse around the circular
//! kernel.
//!
//! Edge arcs on the cross-section are traced numerically along the true
//! weighted bisectors; the Apollonius diagram fixes which triples form
//! vertices, and relocation fixes where they sit.

use crate::apollonius::{self, TangentCircle, WeightedPoint};
use crate::cone::Cone;
use crate::error::{FunkError, Result};
use crate::geom::{v2, Vec2, Vec3};
use crate::metric::{self, Direction};
use crate::section::{self, CrossSection, SectionRegion, WeightedSite};
use crate::tol;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipticalSetup {
    pub cross_section: CrossSection,
    /// Projected sites for every input site, in input order.
    pub weighted: Vec<WeightedSite>,
    /// Apollonius sites of the kept (non-dominated) sites, aligned with `kept`.
    pub apollonius_sites: Vec<WeightedPoint>,
    pub kept: Vec<usize>,
    pub dominated: Vec<usize>,
}

/// Projects sites, prunes dominated ones, and extracts the Euclidean
/// center/radius of each survivor's zero ball.
pub fn setup(cone: &Cone, sites: &[Vec3], dir: Direction) -> Result<EllipticalSetup> {
    setup_with_margin(cone, sites, dir, tol::SECTION_MARGIN)
}

pub fn setup_with_margin(
    cone: &Cone,
    sites: &[Vec3],
    dir: Direction,
    margin: f64,
) -> Result<EllipticalSetup> {
    if cone.is_polyhedral() {
        return Err(FunkError::InvalidInput(
            "polyhedral cones use the polygonal pipeline".into(),
        ));
    }
    if sites.is_empty() {
        return Err(FunkError::EmptySiteSet);
    }
    let cs = section::choose_cross_section(cone, sites, dir, margin)?;
    let weighted = sites
        .iter()
        .enumerate()
        .map(|(i, &s)| section::project_site(cone, &cs, s, i, dir))
        .collect::<Result<Vec<_>>>()?;
    let (kept, dominated) = metric::prune_dominated(cone, sites, dir)?;
    let apollonius_sites = kept
        .iter()
        .map(|&i| {
            let ball = section::directed_zero_ball(cone, &cs, sites[i], dir)?;
            let (center, radius) = section::zero_ball_disk(&ball)
                .ok_or_else(|| FunkError::Internal("expected a disk zero ball".into()))?;
            Ok(WeightedPoint::new(center, radius))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EllipticalSetup { cross_section: cs, weighted, apollonius_sites, kept, dominated })
}

/// Reverse-metric vertices exist only when the tangent circle lies inside
/// the cross-section; forward vertices always survive.
pub fn filter_vertex(cs: &CrossSection, circle: &TangentCircle, dir: Direction) -> bool {
    match dir {
        Direction::Forward => true,
        Direction::Reverse => match &cs.region {
            SectionRegion::Disk { radius } => {
                circle.center.norm() + circle.radius <= radius - tol::GENERAL_POSITION
            }
            SectionRegion::Polygon { .. } => false,
        },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelocatedVertex {
    /// Intersection of the vertex ray with the cross-section plane
    /// (normalized frame).
    pub representative: Vec2,
    /// Unit ray direction through the apex, in the cone's original frame.
    pub ray_direction: Vec3,
    /// Apex of the tangent cone in the normalized frame.
    pub apex: Vec3,
}

/// Moves an Apollonius vertex back onto its Funk vertex ray. The tangent
/// circle is the cross-section of an opposite-direction ball; the apex of
/// the cone through that ball pins the ray.
pub fn relocate_vertex(
    cone: &Cone,
    cs: &CrossSection,
    circle: &TangentCircle,
    dir: Direction,
) -> Result<RelocatedVertex> {
    if !filter_vertex(cs, circle, dir) {
        return Err(FunkError::FilteredOut);
    }
    let tan = cone
        .tan_half_angle()
        .ok_or_else(|| FunkError::InvalidInput("polyhedral cones use the polygonal pipeline".into()))?;
    let lift = circle.radius / tan;
    let apex_z = match dir {
        Direction::Forward => cs.height + lift,
        Direction::Reverse => cs.height - lift,
    };
    if apex_z <= 0.0 {
        return Err(FunkError::Internal("vertex apex fell below the origin".into()));
    }
    let apex = Vec3::from_xy(circle.center, apex_z);
    Ok(RelocatedVertex {
        representative: circle.center * (cs.height / apex_z),
        ray_direction: cone.denormalize_point(apex).normalized(),
        apex,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcEnd {
    Vertex(usize),
    /// The arc leaves through the cross-section boundary.
    Boundary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramVertex {
    pub representative: Vec2,
    pub ray_direction: Vec3,
    /// Defining input site indices, increasing.
    pub sites: [usize; 3],
    /// Tangent circle on the cross-section (site indices remapped to input
    /// indices).
    pub circle: TangentCircle,
    /// Spread of the three weighted distances at the representative.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramEdge {
    pub sites: (usize, usize),
    pub ends: (ArcEnd, ArcEnd),
    pub polyline: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramCell {
    pub site: usize,
    pub edges: Vec<usize>,
    pub neighbors: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunkVoronoiDiagram {
    pub direction: Direction,
    pub cross_section: CrossSection,
    pub weighted: Vec<WeightedSite>,
    pub kept: Vec<usize>,
    pub dominated: Vec<usize>,
    pub vertices: Vec<DiagramVertex>,
    pub edges: Vec<DiagramEdge>,
    pub cells: Vec<DiagramCell>,
}

/// Full pipeline: setup, Apollonius, filter + relocate, arc tracing.
pub fn build_funk_voronoi(cone: &Cone, sites: &[Vec3], dir: Direction) -> Result<FunkVoronoiDiagram> {
    build_with_margin(cone, sites, dir, tol::SECTION_MARGIN)
}

pub fn build_with_margin(
    cone: &Cone,
    sites: &[Vec3],
    dir: Direction,
    margin: f64,
) -> Result<FunkVoronoiDiagram> {
    let setup = setup_with_margin(cone, sites, dir, margin)?;
    let cs = &setup.cross_section;
    let apollonius_diagram = apollonius::build_apollonius(&setup.apollonius_sites);

    // kept-local weighted sites drive all distance evaluations below
    let local_sites: Vec<WeightedSite> =
        setup.kept.iter().map(|&i| setup.weighted[i].clone()).collect();

    let mut vertices = Vec::new();
    let mut local_vertex_info = Vec::new();
    for circle in &apollonius_diagram.vertices {
        if !filter_vertex(cs, circle, dir) {
            continue;
        }
        let relocated = relocate_vertex(cone, cs, circle, dir)?;
        let mut global = [0usize; 3];
        for (slot, &loc) in global.iter_mut().zip(circle.sites.iter()) {
            *slot = setup.kept[loc];
        }
        global.sort_unstable();
        let residual = triple_residual(cs, &local_sites, circle.sites, relocated.representative, dir);
        local_vertex_info.push((relocated.representative, circle.sites));
        vertices.push(DiagramVertex {
            representative: relocated.representative,
            ray_direction: relocated.ray_direction,
            sites: global,
            circle: TangentCircle { center: circle.center, radius: circle.radius, sites: global },
            residual,
        });
    }

    let edges = trace_all_edges(cs, &local_sites, &local_vertex_info, dir)?;
    let edges: Vec<DiagramEdge> = edges
        .into_iter()
        .map(|arc| DiagramEdge {
            sites: (setup.kept[arc.pair.0], setup.kept[arc.pair.1]),
            ends: arc.ends,
            polyline: arc.polyline,
        })
        .collect();

    let mut cells: Vec<DiagramCell> = (0..sites.len())
        .map(|site| DiagramCell { site, edges: Vec::new(), neighbors: Vec::new() })
        .collect();
    for (ei, e) in edges.iter().enumerate() {
        let (i, j) = e.sites;
        cells[i].edges.push(ei);
        cells[j].edges.push(ei);
        if !cells[i].neighbors.contains(&j) {
            cells[i].neighbors.push(j);
        }
        if !cells[j].neighbors.contains(&i) {
            cells[j].neighbors.push(i);
        }
    }

    Ok(FunkVoronoiDiagram {
        direction: dir,
        cross_section: setup.cross_section,
        weighted: setup.weighted,
        kept: setup.kept,
        dominated: setup.dominated,
        vertices,
        edges,
        cells,
    })
}

fn triple_residual(
    cs: &CrossSection,
    local_sites: &[WeightedSite],
    triple: [usize; 3],
    rep: Vec2,
    dir: Direction,
) -> f64 {
    let vals: Vec<f64> = triple
        .iter()
        .map(|&loc| section::weighted_value(cs, &local_sites[loc], rep, dir))
        .collect();
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

impl FunkVoronoiDiagram {
    /// Weighted distance from an input site's projection to a point of the
    /// cross-section.
    pub fn weighted_distance_to(&self, site: usize, q: Vec2) -> f64 {
        section::weighted_value(&self.cross_section, &self.weighted[site], q, self.direction)
    }

    /// Point location by greedy descent over the diagram's adjacency graph.
    pub fn locate(&self, q: Vec2) -> Option<usize> {
        if self.kept.is_empty() {
            return None;
        }
        let euclid_start = self
            .kept
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = (self.weighted[a].position - q).norm_sq();
                let db = (self.weighted[b].position - q).norm_sq();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let mut best: Option<(usize, f64)> = None;
        for start in [self.kept[0], euclid_start] {
            let mut current = start;
            let mut current_d = self.weighted_distance_to(current, q);
            loop {
                let mut improved = false;
                for &nb in &self.cells[current].neighbors {
                    let d = self.weighted_distance_to(nb, q);
                    if d < current_d - 1e-15 {
                        current = nb;
                        current_d = d;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
            if best.map_or(true, |(_, bd)| current_d < bd) {
                best = Some((current, current_d));
            }
        }
        best.map(|(i, _)| i)
    }
}

// ---------------------------------------------------------------------------
// Weighted bisector tracing on the disk cross-section.
// ---------------------------------------------------------------------------

struct Arc {
    pair: (usize, usize),
    ends: (ArcEnd, ArcEnd),
    polyline: Vec<Vec2>,
}

struct TraceContext<'a> {
    cs: &'a CrossSection,
    sites: &'a [WeightedSite],
    dir: Direction,
    radius: f64,
}

impl TraceContext<'_> {
    /// Pulls rim-grazing probe points back inside the disk so finite
    /// differences never sample outside the region.
    fn clamp_inside(&self, q: Vec2) -> Vec2 {
        let limit = self.radius * (1.0 - 1e-9);
        let r = q.norm();
        if r > limit {
            q * (limit / r)
        } else {
            q
        }
    }

    fn wd(&self, local: usize, q: Vec2) -> f64 {
        section::weighted_value(self.cs, &self.sites[local], self.clamp_inside(q), self.dir)
    }

    /// Gap between the pair's weighted distances.
    fn gap(&self, i: usize, j: usize, q: Vec2) -> f64 {
        self.wd(i, q) - self.wd(j, q)
    }

    /// Finite boundary limit of the gap at angle `phi` on the rim.
    fn rim_gap(&self, i: usize, j: usize, phi: f64) -> f64 {
        let n = v2(phi.cos(), phi.sin());
        match self.dir {
            Direction::Forward => {
                // exact tangent-line limit of the forward values
                let di = self.radius - self.sites[i].position.dot(n);
                let dj = self.radius - self.sites[j].position.dot(n);
                (di / dj).ln() + self.sites[i].weight - self.sites[j].weight
            }
            Direction::Reverse => {
                // reverse values stay finite on the rim
                self.gap(i, j, n * self.radius)
            }
        }
    }

    fn grad_gap(&self, i: usize, j: usize, q: Vec2) -> Vec2 {
        let h = 1e-7 * self.radius;
        let gx = self.gap(i, j, q + v2(h, 0.0)) - self.gap(i, j, q - v2(h, 0.0));
        let gy = self.gap(i, j, q + v2(0.0, h)) - self.gap(i, j, q - v2(0.0, h));
        v2(gx, gy) / (2.0 * h)
    }

    /// Clearance of the pair over every other site (negative when a third
    /// site is closer).
    fn pair_margin(&self, i: usize, j: usize, q: Vec2) -> f64 {
        let here = 0.5 * (self.wd(i, q) + self.wd(j, q));
        let mut m = f64::INFINITY;
        for k in 0..self.sites.len() {
            if k != i && k != j {
                m = m.min(self.wd(k, q) - here);
            }
        }
        m
    }
}

fn trace_all_edges(
    cs: &CrossSection,
    local_sites: &[WeightedSite],
    vertex_info: &[(Vec2, [usize; 3])],
    dir: Direction,
) -> Result<Vec<Arc>> {
    let SectionRegion::Disk { radius } = cs.region else {
        return Err(FunkError::Internal("elliptical tracing needs a disk section".into()));
    };
    let n = local_sites.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let ctx = TraceContext { cs, sites: local_sites, dir, radius };

    let run = |&(i, j): &(usize, usize)| -> Result<Vec<Arc>> { trace_pair(&ctx, i, j, vertex_info) };

    #[cfg(feature = "parallel")]
    let traced: Vec<Result<Vec<Arc>>> = pairs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let traced: Vec<Result<Vec<Arc>>> = pairs.iter().map(run).collect();

    let mut out = Vec::new();
    for arcs in traced {
        out.extend(arcs?);
    }
    Ok(out)
}

/// Full weighted bisector of two projected sites across the disk section,
/// traced between its two rim crossings. Also used by the circumcenter
/// classifier.
pub(crate) fn bisector_curve_disk(
    cs: &CrossSection,
    sites: &[WeightedSite],
    i: usize,
    j: usize,
    dir: Direction,
) -> Result<Vec<Vec2>> {
    let SectionRegion::Disk { radius } = cs.region else {
        return Err(FunkError::Internal("disk tracing on a polygon section".into()));
    };
    let ctx = TraceContext { cs, sites, dir, radius };
    full_curve(&ctx, i, j)?.ok_or(FunkError::DominatedPair)
}

/// Traces the bisector across the disk; `None` when one site of the pair is
/// closer everywhere on the rim (no bisector reaches the boundary).
fn full_curve(ctx: &TraceContext<'_>, i: usize, j: usize) -> Result<Option<Vec<Vec2>>> {
    let radius = ctx.radius;
    // the rim-distance of a point is only known to ~1e-16 * R absolute, so
    // gap evaluations this far inside still carry several digits of signal
    let inset = 1e-6 * radius;
    let rim = |phi: f64| v2(phi.cos(), phi.sin()) * (radius - inset);

    // rim crossings of the gap
    let samples = 720;
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev = ctx.rim_gap(i, j, 0.0);
    for k in 1..=samples {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let cur = ctx.rim_gap(i, j, phi);
        if prev == 0.0 || prev.signum() != cur.signum() {
            let mut lo = 2.0 * std::f64::consts::PI * (k - 1) as f64 / samples as f64;
            let mut hi = phi;
            let mut flo = prev;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = ctx.rim_gap(i, j, mid);
                if fm == 0.0 {
                    lo = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    if crossings.len() < 2 {
        return Ok(None);
    }

    // trace from the first crossing; remaining crossings are candidate ends
    let step = radius / 400.0;
    let start = rim(crossings[0]);
    let ends: Vec<Vec2> = crossings[1..].iter().map(|&p| rim(p)).collect();
    Ok(Some(follow_curve(ctx, i, j, start, &ends, step)?))
}

/// Traces the full weighted bisector of a pair across the disk and keeps
/// the sub-arcs on which the pair is jointly nearest.
fn trace_pair(
    ctx: &TraceContext<'_>,
    i: usize,
    j: usize,
    vertex_info: &[(Vec2, [usize; 3])],
) -> Result<Vec<Arc>> {
    let step = ctx.radius / 400.0;
    match full_curve(ctx, i, j)? {
        Some(polyline) => Ok(extract_subarcs(ctx, i, j, &polyline, vertex_info, step)),
        None => Ok(Vec::new()),
    }
}

fn correct_onto_curve(ctx: &TraceContext<'_>, i: usize, j: usize, mut x: Vec2) -> Vec2 {
    for _ in 0..12 {
        let g = ctx.gap(i, j, x);
        if g.abs() < 1e-12 {
            break;
        }
        let grad = ctx.grad_gap(i, j, x);
        let nsq = grad.norm_sq();
        if nsq < 1e-30 {
            break;
        }
        x = x - grad * (g / nsq);
        // stay inside the disk
        let r = x.norm();
        if r > ctx.radius * (1.0 - 1e-12) {
            x = x * (ctx.radius * (1.0 - 1e-9) / r);
        }
    }
    x
}

fn follow_curve(
    ctx: &TraceContext<'_>,
    i: usize,
    j: usize,
    start: Vec2,
    ends: &[Vec2],
    step: f64,
) -> Result<Vec<Vec2>> {
    let mut x = correct_onto_curve(ctx, i, j, start);
    let mut dir_prev = (-start).normalized(); // inward
    let mut polyline = vec![x];
    let max_steps = 6000;
    for step_count in 0..max_steps {
        let grad = ctx.grad_gap(i, j, x);
        if grad.norm_sq() < 1e-30 {
            return Err(FunkError::TraceStall);
        }
        let mut t = grad.perp().normalized();
        if t.dot(dir_prev) < 0.0 {
            t = -t;
        }
        let mut next = x + t * step;
        if next.norm() > ctx.radius {
            next = next * (ctx.radius * (1.0 - 1e-9) / next.norm());
        }
        next = correct_onto_curve(ctx, i, j, next);
        dir_prev = t;
        polyline.push(next);
        x = next;

        for end in ends {
            if (x - *end).norm() < 1.5 * step && step_count > 2 {
                polyline.push(*end);
                return Ok(polyline);
            }
        }
        if step_count > 2 && x.norm() > ctx.radius * (1.0 - 2e-7) {
            // reached the rim away from a predicted crossing; close here
            return Ok(polyline);
        }
    }
    Err(FunkError::TraceStall)
}

/// Cuts the traced polyline into maximal runs on which the pair is jointly
/// nearest; run endpoints interior to the disk are diagram vertices.
fn extract_subarcs(
    ctx: &TraceContext<'_>,
    i: usize,
    j: usize,
    polyline: &[Vec2],
    vertex_info: &[(Vec2, [usize; 3])],
    step: f64,
) -> Vec<Arc> {
    let tolerance = 1e-9;
    let margins: Vec<f64> = polyline.iter().map(|&p| ctx.pair_margin(i, j, p)).collect();
    let snap = |p: Vec2| -> Option<(usize, Vec2)> {
        let mut best: Option<(usize, f64)> = None;
        for (vi, (rep, triple)) in vertex_info.iter().enumerate() {
            if !(triple.contains(&i) && triple.contains(&j)) {
                continue;
            }
            let d = (p - *rep).norm();
            if d < 5.0 * step && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((vi, d));
            }
        }
        best.map(|(vi, _)| (vi, vertex_info[vi].0))
    };

    let mut arcs = Vec::new();
    let mut run: Vec<Vec2> = Vec::new();
    let mut run_start_end: Option<ArcEnd> = None;
    let n = polyline.len();
    let refine = |a: Vec2, b: Vec2| -> Vec2 {
        // bisect the takeover point of a third site along the chord
        let (mut lo, mut hi) = (a, b);
        for _ in 0..40 {
            let mid = (lo + hi) * 0.5;
            if ctx.pair_margin(i, j, mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) * 0.5
    };

    for k in 0..n {
        let active = margins[k] >= -tolerance;
        if active {
            if run.is_empty() {
                if k == 0 {
                    run_start_end = Some(ArcEnd::Boundary);
                    run.push(polyline[0]);
                } else {
                    let cut = refine(polyline[k], polyline[k - 1]);
                    let (end, point) = match snap(cut) {
                        Some((vi, rep)) => (ArcEnd::Vertex(vi), rep),
                        None => (ArcEnd::Boundary, cut),
                    };
                    run_start_end = Some(end);
                    run.push(point);
                }
            }
            run.push(polyline[k]);
        } else if !run.is_empty() {
            let cut = refine(polyline[k - 1], polyline[k]);
            let (end, point) = match snap(cut) {
                Some((vi, rep)) => (ArcEnd::Vertex(vi), rep),
                None => (ArcEnd::Boundary, cut),
            };
            run.push(point);
            arcs.push(Arc {
                pair: (i, j),
                ends: (run_start_end.take().unwrap(), end),
                polyline: decimate(&run, tol::CHORD_TOLERANCE * ctx.radius),
            });
            run = Vec::new();
        }
    }
    if !run.is_empty() {
        arcs.push(Arc {
            pair: (i, j),
            ends: (run_start_end.take().unwrap(), ArcEnd::Boundary),
            polyline: decimate(&run, tol::CHORD_TOLERANCE * ctx.radius),
        });
    }
    arcs
}

/// Douglas-Peucker simplification for stored polylines.
pub(crate) fn decimate(points: &[Vec2], tolerance: f64) -> Vec<Vec2> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let ab = points[b] - points[a];
        let len = ab.norm().max(1e-300);
        let mut worst = (0usize, 0.0f64);
        for k in a + 1..b {
            let d = (ab.cross(points[k] - points[a]) / len).abs();
            if d > worst.1 {
                worst = (k, d);
            }
        }
        if worst.1 > tolerance {
            keep[worst.0] = true;
            stack.push((a, worst.0));
            stack.push((worst.0, b));
        }
    }
    points
        .iter()
        .zip(keep.iter())
        .filter_map(|(p, &k)| k.then_some(*p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::metric::Direction::*;

    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    fn circ45() -> Cone {
        Cone::circular(FRAC_PI_4).unwrap()
    }

    fn circle(center: Vec2, radius: f64) -> TangentCircle {
        TangentCircle { center, radius, sites: [0, 1, 2] }
    }

    fn disk_section(height: f64) -> CrossSection {
        CrossSection {
            height,
            region: SectionRegion::Disk { radius: height },
            direction: Forward,
        }
    }

    #[test]
    fn setup_single_site() {
        let cone = circ45();
        // fixed plane at h = 1 via margin (1/0.5 - 1)
        let s = setup_with_margin(&cone, &[v3(0.2, 0.0, 0.5)], Forward, 1.0).unwrap();
        assert!((s.cross_section.height - 1.0).abs() < 1e-12);
        assert_eq!(s.kept, vec![0]);
        let ap = &s.apollonius_sites[0];
        assert!((ap.center - v2(0.2, 0.0)).norm() < 1e-12);
        assert!((ap.weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn setup_prunes_dominated() {
        let cone = circ45();
        let s = setup(&cone, &[v3(0.0, 0.0, 0.5), v3(0.0, 0.0, 0.7)], Forward).unwrap();
        assert_eq!(s.kept, vec![0]);
        assert_eq!(s.dominated, vec![1]);
        assert_eq!(s.apollonius_sites.len(), 1);
    }

    #[test]
    fn filter_examples() {
        let cs = disk_section(1.0);
        assert!(filter_vertex(&cs, &circle(v2(0.9, 0.0), 0.5), Forward));
        assert!(filter_vertex(&cs, &circle(v2(0.0, 0.0), 0.5), Reverse));
        assert!(!filter_vertex(&cs, &circle(v2(0.8, 0.0), 0.5), Reverse));
    }

    #[test]
    fn relocate_examples() {
        let cone = circ45();
        let cs = disk_section(1.0);
        let rv = relocate_vertex(&cone, &cs, &circle(v2(0.0, 0.0), 0.25), Reverse).unwrap();
        assert!((rv.apex - v3(0.0, 0.0, 0.75)).norm() < 1e-12);
        assert!((rv.representative - v2(0.0, 0.0)).norm() < 1e-12);

        let rv = relocate_vertex(&cone, &cs, &circle(v2(0.3, 0.0), 0.2), Forward).unwrap();
        assert!((rv.apex - v3(0.3, 0.0, 1.2)).norm() < 1e-12);
        assert!((rv.representative - v2(0.25, 0.0)).norm() < 1e-12);
        // representative stays inside the circle
        assert!((rv.representative - v2(0.3, 0.0)).norm() <= 0.2 + 1e-12);
    }

    #[test]
    fn symmetric_triple_has_axis_vertex() {
        let cone = circ45();
        let sites: Vec<Vec3> = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                v3(0.2 * a.cos(), 0.2 * a.sin(), 0.5)
            })
            .collect();
        let dgm = build_funk_voronoi(&cone, &sites, Forward).unwrap();
        assert_eq!(dgm.vertices.len(), 1);
        let v = &dgm.vertices[0];
        assert!(v.representative.norm() < 1e-9);
        assert!(v.residual < 1e-9);
        assert_eq!(v.sites, [0, 1, 2]);
    }

    #[test]
    fn two_sites_make_one_edge() {
        let cone = circ45();
        let sites = [v3(-0.15, 0.0, 0.5), v3(0.15, 0.0, 0.5)];
        let dgm = build_funk_voronoi(&cone, &sites, Forward).unwrap();
        assert!(dgm.vertices.is_empty());
        assert_eq!(dgm.edges.len(), 1);
        let e = &dgm.edges[0];
        assert_eq!(e.ends, (ArcEnd::Boundary, ArcEnd::Boundary));
        // symmetric instance: the bisector is the x = 0 chord
        for p in &e.polyline {
            assert!(p.x.abs() < 1e-7, "off-chord point {p:?}");
        }
        assert_eq!(dgm.cells[0].neighbors, vec![1]);
    }

    #[test]
    fn elliptical_cone_round_trip() {
        let map = crate::geom::Mat3::diagonal(2.0, 1.0, 1.0);
        let cone = Cone::elliptical(FRAC_PI_4, map).unwrap();
        let base = circ45();
        let base_sites: Vec<Vec3> = vec![v3(0.1, 0.05, 0.5), v3(-0.1, -0.1, 0.55), v3(0.0, 0.15, 0.6)];
        let mapped: Vec<Vec3> = base_sites.iter().map(|&s| map.mul_vec(s)).collect();
        let d_ell = build_funk_voronoi(&cone, &mapped, Forward).unwrap();
        let d_base = build_funk_voronoi(&base, &base_sites, Forward).unwrap();
        assert_eq!(d_ell.vertices.len(), d_base.vertices.len());
        for (a, b) in d_ell.vertices.iter().zip(d_base.vertices.iter()) {
            // normalized-frame geometry coincides; rays differ by the map
            assert!((a.representative - b.representative).norm() < 1e-9);
            let mapped_ray = map.mul_vec(b.ray_direction).normalized();
            assert!((a.ray_direction - mapped_ray).norm() < 1e-9);
        }
    }

    #[test]
    fn locate_matches_scan_on_random_queries() {
        let cone = circ45();
        let sites = [
            v3(0.1, 0.0, 0.5),
            v3(-0.2, 0.1, 0.6),
            v3(0.05, -0.2, 0.55),
            v3(0.25, 0.2, 0.62),
        ];
        let dgm = build_funk_voronoi(&cone, &sites, Forward).unwrap();
        let cs = &dgm.cross_section;
        let mut checked = 0;
        for ix in 0..50 {
            for iy in 0..50 {
                let q = v2(
                    cs.region.scale() * (-0.95 + 1.9 * ix as f64 / 49.0),
                    cs.region.scale() * (-0.95 + 1.9 * iy as f64 / 49.0),
                );
                if !cs.region.contains(q, 1e-6) {
                    continue;
                }
                let scan = (0..sites.len())
                    .min_by(|&a, &b| {
                        dgm.weighted_distance_to(a, q)
                            .partial_cmp(&dgm.weighted_distance_to(b, q))
                            .unwrap()
                    })
                    .unwrap();
                let gap: f64 = (0..sites.len())
                    .filter(|&k| k != scan)
                    .map(|k| dgm.weighted_distance_to(k, q) - dgm.weighted_distance_to(scan, q))
                    .fold(f64::INFINITY, f64::min);
                if gap < 1e-6 {
                    continue;
                }
                checked += 1;
                assert_eq!(dgm.locate(q), Some(scan), "mismatch at {q:?}");
            }
        }
        assert!(checked > 1500);
    }
}
