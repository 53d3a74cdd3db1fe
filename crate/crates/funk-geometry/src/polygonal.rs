//! Weighted Funk Voronoi diagrams on a polygonal cross-section of a
//! 3-dimensional polyhedral cone.
//!
//! Spokes from a site (toward the polygon vertices for the forward metric,
//! directly away from them for the reverse) cut the polygon into sectors in
//! which the active boundary edge is fixed, so weighted bisectors are
//! piecewise linear. Cells are built by randomized incremental insertion,
//! clipping each cell radially about its site (cells are star-shaped).

use crate::cone::Cone;
use crate::error::{FunkError, Result};
use crate::geom::{self, v2, Vec2, Vec3};
use crate::metric::{self, Direction};
use crate::section::{self, CrossSection, SectionRegion, WeightedSite};
use crate::tol;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;

/// Restricted Funk value on a polygon (forward); unnormalized edge forms.
fn poly_value(polygon: &[Vec2], a: Vec2, b: Vec2) -> f64 {
    section::region_funk_value(
        &SectionRegion::Polygon { vertices: polygon.to_vec() },
        a,
        b,
    )
}

/// Weighted distance from site (position, weight) to `q` on the polygon.
fn weighted_value(polygon: &[Vec2], position: Vec2, weight: f64, q: Vec2, dir: Direction) -> f64 {
    match dir {
        Direction::Forward => poly_value(polygon, position, q) + weight,
        Direction::Reverse => poly_value(polygon, q, position) + weight,
    }
}

// ---------------------------------------------------------------------------
// Spokes and active edges
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpokeSet {
    pub origin: Vec2,
    pub direction: Direction,
    /// Unit spoke directions, one per polygon vertex, in vertex order
    /// (counterclockwise around the origin).
    pub rays: Vec<Vec2>,
}

/// Spokes of a site: sector k (between spokes k and k+1) sees polygon edge
/// k as its active boundary edge.
pub fn spokes(polygon: &[Vec2], p: Vec2, dir: Direction) -> Result<SpokeSet> {
    if geom::polygon_inward_margin(polygon, p) < tol::INTERIOR_MARGIN {
        return Err(FunkError::NotInterior);
    }
    let rays = polygon
        .iter()
        .map(|&v| {
            let d = (v - p).normalized();
            match dir {
                Direction::Forward => d,
                Direction::Reverse => -d,
            }
        })
        .collect();
    Ok(SpokeSet { origin: p, direction: dir, rays })
}

impl SpokeSet {
    /// Index of the sector containing `q` (equals the active edge index).
    pub fn sector_of(&self, q: Vec2) -> Result<usize> {
        let d = q - self.origin;
        if d.norm() < tol::INTERIOR_MARGIN {
            return Err(FunkError::InvalidInput("query coincides with the site".into()));
        }
        let m = self.rays.len();
        for k in 0..m {
            let a = self.rays[k];
            let b = self.rays[(k + 1) % m];
            if a.cross(d) >= 0.0 && d.cross(b) > 0.0 {
                return Ok(k);
            }
        }
        // numerical fall-through: q sits on a spoke
        Err(FunkError::OnSpoke)
    }
}

/// Active boundary edge for the distance from `p` to `q`: the edge whose
/// form ratio attains the Funk value. Raises OnSpoke when two edges tie.
pub fn active_edge(polygon: &[Vec2], p: Vec2, q: Vec2, dir: Direction) -> Result<usize> {
    let (from, to) = match dir {
        Direction::Forward => (p, q),
        Direction::Reverse => (q, p),
    };
    let n = polygon.len();
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for k in 0..n {
        let a = polygon[k];
        let b = polygon[(k + 1) % n];
        let normal = (b - a).perp();
        let df = normal.dot(from - a);
        let dt = normal.dot(to - a);
        if dt <= 0.0 {
            continue;
        }
        let ratio = df / dt;
        if ratio > best.1 {
            second = best.1;
            best = (k, ratio);
        } else if ratio > second {
            second = ratio;
        }
    }
    if best.0 == usize::MAX {
        return Err(FunkError::NotInterior);
    }
    if (best.1 - second).abs() <= tol::GENERAL_POSITION * best.1.abs().max(1.0) {
        return Err(FunkError::OnSpoke);
    }
    Ok(best.0)
}

// ---------------------------------------------------------------------------
// Weighted bisectors
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseBisector {
    /// Polyline from one boundary endpoint to the other.
    pub points: Vec<Vec2>,
    /// Active edge pair (for the first and second site) per segment;
    /// `active.len() + 1 == points.len()`.
    pub active: Vec<(usize, usize)>,
    /// Polygon boundary edges hit by the two endpoints.
    pub boundary_edges: (usize, usize),
}

impl PiecewiseBisector {
    pub fn segment_count(&self) -> usize {
        self.active.len()
    }

    /// Arc-length point at t in [0, 1].
    pub fn point_at(&self, t: f64) -> Vec2 {
        point_along(&self.points, t)
    }
}

pub(crate) fn point_along(points: &[Vec2], t: f64) -> Vec2 {
    let mut total = 0.0;
    for w in points.windows(2) {
        total += (w[1] - w[0]).norm();
    }
    let mut target = t.clamp(0.0, 1.0) * total;
    for w in points.windows(2) {
        let len = (w[1] - w[0]).norm();
        if target <= len || len == 0.0 {
            if len == 0.0 {
                continue;
            }
            return w[0] + (w[1] - w[0]) * (target / len);
        }
        target -= len;
    }
    *points.last().unwrap()
}

/// In-sector bisector line `L(x) = 0` as (gradient, offset).
fn sector_line(
    polygon: &[Vec2],
    s1: (Vec2, f64),
    s2: (Vec2, f64),
    sectors: (usize, usize),
    dir: Direction,
) -> (Vec2, f64) {
    let (na, ca) = edge_form(polygon, sectors.0);
    let (nb, cb) = edge_form(polygon, sectors.1);
    let ea_s1 = na.dot(s1.0) + ca;
    let eb_s2 = nb.dot(s2.0) + cb;
    debug_assert!(sectors.0 != sectors.1, "shared-edge sectors have no line");
    match dir {
        Direction::Forward => {
            // e^{w1} E_a(s1) E_b(x) = e^{w2} E_b(s2) E_a(x)
            let alpha = s1.1.exp() * ea_s1;
            let beta = s2.1.exp() * eb_s2;
            (nb * alpha - na * beta, cb * alpha - ca * beta)
        }
        Direction::Reverse => {
            // e^{w1} E_b(s2) E_a(x) = e^{w2} E_a(s1) E_b(x)
            let alpha = s1.1.exp() * eb_s2;
            let beta = s2.1.exp() * ea_s1;
            (na * alpha - nb * beta, ca * alpha - cb * beta)
        }
    }
}

fn edge_form(polygon: &[Vec2], k: usize) -> (Vec2, f64) {
    let a = polygon[k];
    let b = polygon[(k + 1) % polygon.len()];
    let n = (b - a).perp();
    (n, -n.dot(a))
}

/// Constant weighted gap inside a shared-edge sector. When both sites use
/// the same active edge the gap no longer depends on the query point: it
/// vanishes identically for edge-aligned pairs (a two-dimensional bisector
/// piece) and is bounded away from zero otherwise.
fn shared_edge_gap(polygon: &[Vec2], s1: (Vec2, f64), s2: (Vec2, f64), k: usize, dir: Direction) -> f64 {
    let (n, c) = edge_form(polygon, k);
    let e1 = n.dot(s1.0) + c;
    let e2 = n.dot(s2.0) + c;
    match dir {
        Direction::Forward => e1.ln() + s1.1 - e2.ln() - s2.1,
        Direction::Reverse => -e1.ln() + s1.1 + e2.ln() - s2.1,
    }
}

struct TraceHalf {
    /// Sector breaks then the boundary endpoint, in travel order.
    points: Vec<Vec2>,
    /// Active pair per piece (one per entry of `points`).
    tags: Vec<(usize, usize)>,
    boundary_edge: usize,
}

/// Weighted bisector between two non-dominating weighted sites on a convex
/// polygon: seeded on the connecting segment, then traced sector to sector
/// in both directions until the boundary.
pub fn weighted_bisector(
    polygon: &[Vec2],
    s1: (Vec2, f64),
    s2: (Vec2, f64),
    dir: Direction,
) -> Result<PiecewiseBisector> {
    let scale = polygon.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for s in [s1.0, s2.0] {
        if geom::polygon_inward_margin(polygon, s) < tol::INTERIOR_MARGIN {
            return Err(FunkError::NotInterior);
        }
    }
    check_not_dominated(polygon, s1, s2, dir)?;

    // seed: the weighted gap is monotone along the connecting segment
    let gap = |q: Vec2| -> f64 {
        weighted_value(polygon, s1.0, s1.1, q, dir) - weighted_value(polygon, s2.0, s2.1, q, dir)
    };
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
    let at = |t: f64| s1.0.lerp(s2.0, t);
    if !(gap(at(lo)) < 0.0 && gap(at(hi)) > 0.0) {
        return Err(FunkError::GeneralPositionViolation(
            "weighted gap does not change sign between the sites".into(),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gap(at(mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let seed = at(0.5 * (lo + hi));

    let sp1 = spokes(polygon, s1.0, dir)?;
    let sp2 = spokes(polygon, s2.0, dir)?;
    let sector = (sp1.sector_of(seed)?, sp2.sector_of(seed)?);
    let d0 = if sector.0 == sector.1 {
        // edge-aligned pair: the seed sits in a two-dimensional bisector
        // piece; leave it perpendicular to the connecting segment
        if shared_edge_gap(polygon, s1, s2, sector.0, dir).abs() > 1e-7 {
            return Err(FunkError::TraceStall);
        }
        (s2.0 - s1.0).perp().normalized()
    } else {
        let (grad, _) = sector_line(polygon, s1, s2, sector, dir);
        if grad.norm() < 1e-300 {
            return Err(FunkError::TraceStall);
        }
        grad.perp().normalized()
    };
    let budget = 4 * polygon.len() + 8;

    let half_fwd = trace_half(polygon, s1, s2, dir, &sp1, &sp2, seed, sector, d0, budget, scale)?;
    let half_bwd = trace_half(polygon, s1, s2, dir, &sp1, &sp2, seed, sector, -d0, budget, scale)?;

    if half_fwd.tags.len() + half_bwd.tags.len() - 1 > budget {
        return Err(FunkError::TraceStall);
    }

    // stitch: backward half reversed, seed's sector merges the middle pieces
    let mut points: Vec<Vec2> = half_bwd.points.iter().rev().copied().collect();
    let mut active: Vec<(usize, usize)> = half_bwd.tags.iter().rev().copied().collect();
    points.extend(half_fwd.points.iter().copied());
    active.extend(half_fwd.tags.iter().skip(1).copied());
    debug_assert_eq!(active.len() + 1, points.len());
    Ok(PiecewiseBisector {
        points,
        active,
        boundary_edges: (half_bwd.boundary_edge, half_fwd.boundary_edge),
    })
}

fn check_not_dominated(
    polygon: &[Vec2],
    s1: (Vec2, f64),
    s2: (Vec2, f64),
    dir: Direction,
) -> Result<()> {
    // reconstruct the 3D sites over the polygon at height 1 and reuse the
    // cone domination predicate
    let unit: Vec<Vec2> = polygon.to_vec();
    let cone = Cone::polyhedral_from_section(unit)?;
    let lift = |s: (Vec2, f64)| -> Vec3 {
        let factor = match dir {
            Direction::Forward => s.1.exp(),
            Direction::Reverse => (-s.1).exp(),
        };
        Vec3::from_xy(s.0, 1.0) * factor
    };
    let (a, b) = (lift(s1), lift(s2));
    if metric::dominates(&cone, a, b, dir)? || metric::dominates(&cone, b, a, dir)? {
        return Err(FunkError::DominatedPair);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn trace_half(
    polygon: &[Vec2],
    s1: (Vec2, f64),
    s2: (Vec2, f64),
    dir: Direction,
    sp1: &SpokeSet,
    sp2: &SpokeSet,
    seed: Vec2,
    seed_sector: (usize, usize),
    d0: Vec2,
    budget: usize,
    scale: f64,
) -> Result<TraceHalf> {
    let eps = 1e-9 * scale.max(1.0);
    let mut x = seed;
    let mut sector = seed_sector;
    let mut d = d0;
    let mut points = Vec::new();
    let mut tags = Vec::new();
    let n = polygon.len();
    for _ in 0..4 * budget {
        // nearest event along the travel ray
        let mut best_t = f64::INFINITY;
        let mut hit_edge: Option<usize> = None;
        for k in 0..n {
            let a = polygon[k];
            let b = polygon[(k + 1) % n];
            if let Some((t, u, _)) = ray_segment(x, d, a, b) {
                if t > eps && (-1e-12..=1.0 + 1e-12).contains(&u) && t < best_t {
                    best_t = t;
                    hit_edge = Some(k);
                }
            }
        }
        for sp in [sp1, sp2] {
            for ray in &sp.rays {
                if let Some((t, tau)) = ray_ray(x, d, sp.origin, *ray) {
                    if t > eps && tau > -1e-12 && t < best_t {
                        best_t = t;
                        hit_edge = None;
                    }
                }
            }
        }
        if !best_t.is_finite() {
            return Err(FunkError::TraceStall);
        }
        let hit = x + d * best_t;

        // forward bisectors terminate exactly at polygon corners (every
        // boundary edge carries a one-site collar), and spokes, edges, and
        // the bisector line all meet there; snap and finish
        for (vi, &v) in polygon.iter().enumerate() {
            if (hit - v).norm() < 1e-7 * scale.max(1.0) {
                points.push(v);
                tags.push(sector);
                return Ok(TraceHalf { points, tags, boundary_edge: vi });
            }
        }

        if let Some(edge) = hit_edge {
            points.push(hit);
            tags.push(sector);
            return Ok(TraceHalf { points, tags, boundary_edge: edge });
        }
        // spoke crossing: commit the break and switch to the next sector
        let probe = hit + d * (10.0 * eps);
        let next_sector = (sp1.sector_of(probe)?, sp2.sector_of(probe)?);
        if next_sector == sector {
            // grazing pass over a spoke with no sector change; keep going
            // on the same line
            x = probe;
            continue;
        }
        points.push(hit);
        tags.push(sector);
        sector = next_sector;
        if sector.0 == sector.1 {
            // both sites now share the active edge: either the whole sector
            // is equidistant (edge-aligned pair) and the trace passes
            // straight through, or the bisector cannot continue
            if shared_edge_gap(polygon, s1, s2, sector.0, dir).abs() > 1e-7 {
                return Err(FunkError::TraceStall);
            }
            x = hit;
            continue;
        }
        let (grad, c) = sector_line(polygon, s1, s2, sector, dir);
        if grad.norm() < 1e-300 {
            return Err(FunkError::TraceStall);
        }
        debug_assert!(
            (grad.dot(hit) + c).abs() <= 1e-6 * grad.norm() * scale.max(1.0),
            "bisector pieces must join continuously"
        );
        let mut nd = grad.perp().normalized();
        if nd.dot(d) < 0.0 {
            nd = -nd;
        }
        d = nd;
        x = hit;
    }
    Err(FunkError::TraceStall)
}

fn ray_segment(o: Vec2, d: Vec2, a: Vec2, b: Vec2) -> Option<(f64, f64, Vec2)> {
    let e = b - a;
    let denom = d.cross(e);
    if denom.abs() < 1e-300 {
        return None;
    }
    let t = (a - o).cross(e) / denom;
    let u = (a - o).cross(d) / denom;
    Some((t, u, o + d * t))
}

fn ray_ray(o: Vec2, d: Vec2, s: Vec2, u: Vec2) -> Option<(f64, f64)> {
    let denom = d.cross(u);
    if denom.abs() < 1e-300 {
        return None;
    }
    let t = (s - o).cross(u) / denom;
    let tau = (s - o).cross(d) / denom;
    Some((t, tau))
}

// ---------------------------------------------------------------------------
// Incremental diagram construction
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonCell {
    pub site: usize,
    /// Cell polygon, counterclockwise; empty for dominated sites.
    pub polygon: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonalVertex {
    pub position: Vec2,
    /// Sites meeting at this corner (three in general position).
    pub sites: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonalFunkDiagram {
    pub direction: Direction,
    pub cross_section: CrossSection,
    pub weighted: Vec<WeightedSite>,
    pub kept: Vec<usize>,
    pub dominated: Vec<usize>,
    pub cells: Vec<PolygonCell>,
    pub vertices: Vec<PolygonalVertex>,
    pub seed: u64,
}

pub fn build_polygonal_voronoi(
    cone: &Cone,
    sites: &[Vec3],
    dir: Direction,
) -> Result<PolygonalFunkDiagram> {
    build_with_seed(cone, sites, dir, DEFAULT_SEED, tol::SECTION_MARGIN)
}

pub fn build_with_seed(
    cone: &Cone,
    sites: &[Vec3],
    dir: Direction,
    seed: u64,
    margin: f64,
) -> Result<PolygonalFunkDiagram> {
    if !cone.is_polyhedral() {
        return Err(FunkError::InvalidInput(
            "circular and elliptical cones use the Apollonius pipeline".into(),
        ));
    }
    if sites.is_empty() {
        return Err(FunkError::EmptySiteSet);
    }
    let cs = section::choose_cross_section(cone, sites, dir, margin)?;
    let SectionRegion::Polygon { vertices: polygon } = cs.region.clone() else {
        return Err(FunkError::Internal("polyhedral cone must cut to a polygon".into()));
    };
    let weighted = sites
        .iter()
        .enumerate()
        .map(|(i, &s)| section::project_site(cone, &cs, s, i, dir))
        .collect::<Result<Vec<_>>>()?;
    let (kept, dominated) = metric::prune_dominated(cone, sites, dir)?;

    let mut order = kept.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    // incremental insertion; cells stay star-shaped about their sites
    let mut cells: Vec<Vec<Vec2>> = vec![Vec::new(); sites.len()];
    let mut inserted: Vec<usize> = Vec::new();
    for &k in &order {
        let wk = (weighted[k].position, weighted[k].weight);
        let mut cell = polygon.clone();
        for &j in &inserted {
            let wj = (weighted[j].position, weighted[j].weight);
            let bisector = weighted_bisector(&polygon, wk, wj, dir)?;
            let (side_k, side_j) = split_by_bisector(&polygon, &bisector, wk.0, wj.0)?;
            cell = radial_clip(wk.0, &cell, &side_k);
            cells[j] = radial_clip(wj.0, &cells[j], &side_j);
            if cell.len() < 3 {
                break;
            }
        }
        cells[k] = cell;
        inserted.push(k);
    }

    let scale = cs.region.scale();
    let vertices = collect_vertices(&cells, &kept, &weighted, &polygon, dir, scale);

    Ok(PolygonalFunkDiagram {
        direction: dir,
        cross_section: cs,
        weighted,
        kept,
        dominated,
        cells: (0..sites.len())
            .map(|site| PolygonCell { site, polygon: cells[site].clone() })
            .collect(),
        vertices,
        seed,
    })
}

/// Splits the section polygon along a bisector; returns the closed regions
/// containing the first and second site respectively.
fn split_by_bisector(
    polygon: &[Vec2],
    bisector: &PiecewiseBisector,
    first: Vec2,
    second: Vec2,
) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    let start = *bisector.points.first().unwrap();
    let end = *bisector.points.last().unwrap();
    let (e_start, e_end) = bisector.boundary_edges;

    // boundary chain from the end back to the start, counterclockwise
    let chain = |from_edge: usize, from: Vec2, to_edge: usize, to: Vec2| -> Vec<Vec2> {
        let n = polygon.len();
        let mut pts = vec![from];
        let mut e = from_edge;
        if from_edge == to_edge {
            // same edge: direct if `to` is ahead along the edge direction
            let dir = polygon[(from_edge + 1) % n] - polygon[from_edge];
            if dir.dot(to - from) >= 0.0 {
                pts.push(to);
                return pts;
            }
        }
        loop {
            e = (e + 1) % n;
            pts.push(polygon[e]);
            if e == to_edge {
                break;
            }
        }
        pts.push(to);
        pts
    };

    let mut region_a: Vec<Vec2> = bisector.points.clone();
    region_a.extend(chain(e_end, end, e_start, start).into_iter().skip(1));
    let mut region_a = geom::simplify_polygon(&region_a, 1e-12);
    if geom::polygon_area(&region_a) < 0.0 {
        region_a.reverse();
    }

    let mut region_b: Vec<Vec2> = bisector.points.iter().rev().copied().collect();
    region_b.extend(chain(e_start, start, e_end, end).into_iter().skip(1));
    let mut region_b = geom::simplify_polygon(&region_b, 1e-12);
    if geom::polygon_area(&region_b) < 0.0 {
        region_b.reverse();
    }

    let a_has_first = geom::polygon_signed_distance(&region_a, first) > 0.0;
    let b_has_first = geom::polygon_signed_distance(&region_b, first) > 0.0;
    let a_has_second = geom::polygon_signed_distance(&region_a, second) > 0.0;
    match (a_has_first, b_has_first, a_has_second) {
        (true, false, false) => Ok((region_a, region_b)),
        (false, true, true) => Ok((region_b, region_a)),
        _ => Err(FunkError::GeneralPositionViolation(
            "could not assign bisector sides to the sites".into(),
        )),
    }
}

/// Intersection of two regions star-shaped about the same center.
fn radial_clip(center: Vec2, a: &[Vec2], b: &[Vec2]) -> Vec<Vec2> {
    if a.len() < 3 || b.len() < 3 {
        return Vec::new();
    }
    let angle_of = |p: Vec2| -> f64 { (p.y - center.y).atan2(p.x - center.x) };
    let mut angles: Vec<f64> = Vec::new();
    for v in a.iter().chain(b.iter()) {
        angles.push(angle_of(*v));
    }
    let na = a.len();
    let nb = b.len();
    for i in 0..na {
        for j in 0..nb {
            if let Some((_, _, p)) =
                geom::segment_intersection(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])
            {
                angles.push(angle_of(p));
            }
        }
    }
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
    angles.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    if angles.is_empty() {
        return Vec::new();
    }

    let cast = |poly: &[Vec2], dir: Vec2| -> f64 {
        let n = poly.len();
        let mut best = f64::INFINITY;
        for k in 0..n {
            if let Some((t, u, _)) = ray_segment(center, dir, poly[k], poly[(k + 1) % n]) {
                if t > 0.0 && (-1e-9..=1.0 + 1e-9).contains(&u) {
                    best = best.min(t);
                }
            }
        }
        best
    };

    let mut out = Vec::with_capacity(angles.len());
    for &ang in &angles {
        let dir = v2(ang.cos(), ang.sin());
        let r = cast(a, dir).min(cast(b, dir));
        if !r.is_finite() {
            continue;
        }
        out.push(center + dir * r);
    }
    geom::simplify_polygon(&out, 1e-11)
}

fn collect_vertices(
    cells: &[Vec<Vec2>],
    kept: &[usize],
    weighted: &[WeightedSite],
    polygon: &[Vec2],
    dir: Direction,
    scale: f64,
) -> Vec<PolygonalVertex> {
    let tol_cluster = 1e-6 * scale.max(1.0);
    let mut corners: Vec<(Vec2, usize)> = Vec::new();
    for &site in kept {
        for &p in &cells[site] {
            corners.push((p, site));
        }
    }
    let mut used = vec![false; corners.len()];
    let mut vertices = Vec::new();
    for i in 0..corners.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![i];
        for j in i + 1..corners.len() {
            if !used[j] && (corners[j].0 - corners[i].0).norm() < tol_cluster {
                members.push(j);
            }
        }
        let mut sites: Vec<usize> = members.iter().map(|&m| corners[m].1).collect();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() < 3 {
            continue;
        }
        for &m in &members {
            used[m] = true;
        }
        let mut position = v2(0.0, 0.0);
        for &m in &members {
            position = position + corners[m].0;
        }
        let position = position / members.len() as f64;
        let vals: Vec<f64> = sites
            .iter()
            .map(|&s| weighted_value(polygon, weighted[s].position, weighted[s].weight, position, dir))
            .collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        vertices.push(PolygonalVertex { position, sites, residual: hi - lo });
    }
    vertices
}

impl PolygonalFunkDiagram {
    pub fn section_polygon(&self) -> &[Vec2] {
        match &self.cross_section.region {
            SectionRegion::Polygon { vertices } => vertices,
            SectionRegion::Disk { .. } => unreachable!("polygonal diagram with a disk section"),
        }
    }

    pub fn weighted_distance_to(&self, site: usize, q: Vec2) -> f64 {
        let ws = &self.weighted[site];
        weighted_value(self.section_polygon(), ws.position, ws.weight, q, self.direction)
    }

    /// Point location via the cell polygons: the cell whose boundary is
    /// deepest around the query (no distance comparisons involved).
    pub fn locate(&self, q: Vec2) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &site in &self.kept {
            let cell = &self.cells[site].polygon;
            if cell.len() < 3 {
                continue;
            }
            let margin = geom::polygon_signed_distance(cell, q);
            if best.map_or(true, |(_, bm)| margin > bm) {
                best = Some((site, margin));
            }
        }
        best.filter(|&(_, m)| m > -1e-9).map(|(s, _)| s)
    }

    /// Shared boundary segments between adjacent cells, for rendering.
    pub fn pair_boundaries(&self) -> Vec<((usize, usize), Vec<Vec2>)> {
        let scale = self.cross_section.region.scale();
        let tol_on = 1e-7 * scale.max(1.0);
        let mut out = Vec::new();
        for (ai, &a) in self.kept.iter().enumerate() {
            for &b in self.kept.iter().skip(ai + 1) {
                let cell_a = &self.cells[a].polygon;
                let cell_b = &self.cells[b].polygon;
                if cell_a.len() < 3 || cell_b.len() < 3 {
                    continue;
                }
                let mut segs: Vec<Vec2> = Vec::new();
                let n = cell_a.len();
                for k in 0..n {
                    let p = cell_a[k];
                    let q = cell_a[(k + 1) % n];
                    let mid = (p + q) * 0.5;
                    if geom::distance_to_boundary(cell_b, mid) <= tol_on {
                        if segs.last().map_or(true, |l| (*l - p).norm() > tol_on) {
                            segs.push(p);
                        }
                        segs.push(q);
                    }
                }
                if segs.len() >= 2 {
                    out.push(((a, b), segs));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::metric::Direction::*;

    fn unit_square() -> Vec<Vec2> {
        vec![v2(-1.0, -1.0), v2(1.0, -1.0), v2(1.0, 1.0), v2(-1.0, 1.0)]
    }

    fn square_cone() -> Cone {
        Cone::polyhedral_from_section(unit_square()).unwrap()
    }

    #[test]
    fn spokes_at_center_of_square() {
        let sq = unit_square();
        let f = spokes(&sq, v2(0.0, 0.0), Forward).unwrap();
        assert_eq!(f.rays.len(), 4);
        // center symmetry: reverse spokes are the same four diagonals
        let r = spokes(&sq, v2(0.0, 0.0), Reverse).unwrap();
        let mut fr: Vec<_> = f.rays.iter().map(|v| (v.x * 1e9) as i64).collect();
        let mut rr: Vec<_> = r.rays.iter().map(|v| (v.x * 1e9) as i64).collect();
        fr.sort_unstable();
        rr.sort_unstable();
        assert_eq!(fr, rr);
    }

    #[test]
    fn sector_and_active_edge_agree() {
        let sq = unit_square();
        let p = v2(0.5, 0.0);
        let sp = spokes(&sq, p, Forward).unwrap();
        let q = v2(0.9, 0.0);
        assert_eq!(sp.sector_of(q).unwrap(), 1); // right edge
        assert_eq!(active_edge(&sq, p, q, Forward).unwrap(), 1);
    }

    #[test]
    fn active_edge_examples() {
        let sq = unit_square();
        let p = v2(0.0, 0.0);
        assert_eq!(active_edge(&sq, p, v2(0.5, 0.0), Forward).unwrap(), 1);
        let d = poly_value(&sq, p, v2(0.5, 0.0));
        assert!((d - 2f64.ln()).abs() < 1e-12);
        assert_eq!(active_edge(&sq, p, v2(-0.5, 0.0), Forward).unwrap(), 3);
        // reverse: the ray from q through p exits the left edge
        assert_eq!(active_edge(&sq, p, v2(0.5, 0.0), Reverse).unwrap(), 3);
        let r = weighted_value(&sq, p, 0.0, v2(0.5, 0.0), Reverse);
        assert!((r - 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_bisector_is_vertical_segment() {
        let sq = unit_square();
        let b = weighted_bisector(&sq, (v2(-0.5, 0.0), 0.0), (v2(0.5, 0.0), 0.0), Forward).unwrap();
        for p in &b.points {
            assert!(p.x.abs() < 1e-9);
        }
        let first = b.points.first().unwrap();
        let last = b.points.last().unwrap();
        assert!((first.y.abs() - 1.0).abs() < 1e-9);
        assert!((last.y.abs() - 1.0).abs() < 1e-9);
        assert!(b.segment_count() <= 2 * 4 + 2);
    }

    #[test]
    fn weighted_bisector_points_are_equidistant() {
        let sq = unit_square();
        let s1 = (v2(-0.5, 0.1), 0.0);
        let s2 = (v2(0.5, -0.2), 2f64.ln());
        let b = weighted_bisector(&sq, s1, s2, Forward).unwrap();
        assert!(b.segment_count() <= 10);
        for k in 0..=32 {
            let q = b.point_at(k as f64 / 32.0 * 0.98 + 0.01);
            let d1 = weighted_value(&sq, s1.0, s1.1, q, Forward);
            let d2 = weighted_value(&sq, s2.0, s2.1, q, Forward);
            assert!((d1 - d2).abs() < 1e-9, "gap {} at {q:?}", d1 - d2);
        }
    }

    #[test]
    fn bisector_rejects_nested_sites() {
        let sq = unit_square();
        let err = weighted_bisector(&sq, (v2(0.0, 0.0), -1.0), (v2(0.05, 0.0), 0.0), Forward);
        assert!(matches!(err, Err(FunkError::DominatedPair)));
    }

    #[test]
    fn single_site_cell_is_whole_section() {
        let cone = square_cone();
        let dgm = build_polygonal_voronoi(&cone, &[v3(0.1, 0.0, 0.5)], Forward).unwrap();
        assert_eq!(dgm.kept, vec![0]);
        let cell_area = geom::polygon_area(&dgm.cells[0].polygon);
        let section_area = dgm.cross_section.region.area();
        assert!((cell_area - section_area).abs() < 1e-9 * section_area);
    }

    #[test]
    fn two_symmetric_sites_split_square() {
        let cone = square_cone();
        let sites = [v3(-0.25, 0.0, 0.5), v3(0.25, 0.0, 0.5)];
        let dgm = build_polygonal_voronoi(&cone, &sites, Forward).unwrap();
        let total: f64 = dgm.kept.iter().map(|&s| geom::polygon_area(&dgm.cells[s].polygon)).sum();
        let section_area = dgm.cross_section.region.area();
        assert!((total - section_area).abs() < 1e-6 * section_area);
        // split along x = 0
        for &s in &dgm.kept {
            for p in &dgm.cells[s].polygon {
                let sign = dgm.weighted[s].position.x.signum();
                assert!(p.x * sign > -1e-7);
            }
        }
        assert_eq!(dgm.locate(v2(-0.3, 0.2)), Some(0));
        assert_eq!(dgm.locate(v2(0.3, 0.2)), Some(1));
    }

    #[test]
    fn pentagon_cells_cover_and_match_scan() {
        let cone =
            Cone::polyhedral_from_section(geom::regular_polygon(5, 1.0, 0.3)).unwrap();
        let sites = [
            v3(0.1, 0.0, 0.5),
            v3(-0.2, 0.1, 0.6),
            v3(0.05, -0.25, 0.55),
            v3(0.3, 0.25, 0.7),
        ];
        for dir in [Forward, Reverse] {
            let dgm = build_polygonal_voronoi(&cone, &sites, dir).unwrap();
            let covered: f64 =
                dgm.kept.iter().map(|&s| geom::polygon_area(&dgm.cells[s].polygon)).sum();
            let area = dgm.cross_section.region.area();
            assert!((covered - area).abs() < 1e-6 * area, "{dir}: coverage defect");
            let mut checked = 0;
            let (lo, hi) = dgm.cross_section.region.bounding_box();
            for ix in 0..40 {
                for iy in 0..40 {
                    let q = v2(
                        lo.x + (hi.x - lo.x) * ix as f64 / 39.0,
                        lo.y + (hi.y - lo.y) * iy as f64 / 39.0,
                    );
                    if !dgm.cross_section.region.contains(q, 1e-3) {
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
                    assert_eq!(dgm.locate(q), Some(scan), "{dir}: mismatch at {q:?}");
                }
            }
            assert!(checked > 800, "{dir}: too few checked points");
        }
    }
}
