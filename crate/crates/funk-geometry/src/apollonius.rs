//! Additively weighted (Apollonius) Voronoi diagrams of disks in the plane.
//!
//! Sites are pairs (center, weight) under the distance `|q - c| - w`.
//! Vertices are circles externally tangent to three grown disks that contain
//! no fourth site; edges are hyperbola branches (a line for equal weights).
//! Construction enumerates all site triples and validates each candidate
//! against every other site, which is exact and comfortably fast at desk
//! scale. Combinatorial decisions use deterministically perturbed weights so
//! that cocircular degeneracies resolve reproducibly.

use crate::error::{FunkError, Result};
use crate::geom::{v2, Vec2};
use crate::tol;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub center: Vec2,
    pub weight: f64,
}

impl WeightedPoint {
    pub fn new(center: Vec2, weight: f64) -> WeightedPoint {
        WeightedPoint { center, weight }
    }
}

/// Additively weighted distance to a site.
pub fn apollonius_distance(s: &WeightedPoint, q: Vec2) -> f64 {
    (q - s.center).norm() - s.weight
}

/// A circle externally tangent to the grown disks of its defining triple.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TangentCircle {
    pub center: Vec2,
    pub radius: f64,
    /// Defining site indices, increasing.
    pub sites: [usize; 3],
}

impl TangentCircle {
    /// Worst tangency defect against the three defining sites.
    pub fn tangency_residual(&self, sites: &[WeightedPoint]) -> f64 {
        self.sites
            .iter()
            .map(|&i| {
                ((self.center - sites[i].center).norm() - (self.radius + sites[i].weight)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest clearance to a non-defining site; negative when some grown
    /// disk cuts into the circle.
    pub fn emptiness_margin(&self, sites: &[WeightedPoint]) -> f64 {
        let mut m = f64::INFINITY;
        for (j, s) in sites.iter().enumerate() {
            if self.sites.contains(&j) {
                continue;
            }
            m = m.min((self.center - s.center).norm() - (self.radius + s.weight));
        }
        m
    }
}

/// Circles externally tangent to three grown disks: solutions of
/// `|x - c_i| = r + w_i` with `r >= 0`. Zero, one, or two circles.
pub fn tritangent_circles(
    s1: &WeightedPoint,
    s2: &WeightedPoint,
    s3: &WeightedPoint,
) -> Result<Vec<(Vec2, f64)>> {
    let c1 = s1.center;
    let u2 = s2.center - c1;
    let u3 = s3.center - c1;
    let d2 = s2.weight - s1.weight;
    let d3 = s3.weight - s1.weight;
    let rhs2 = u2.dot(u2 + c1 * 2.0) - (s2.weight * s2.weight - s1.weight * s1.weight);
    let rhs3 = u3.dot(u3 + c1 * 2.0) - (s3.weight * s3.weight - s1.weight * s1.weight);
    // rhs above is |c_i|^2 - |c_1|^2 - (w_i^2 - w_1^2)

    let scale = u2.norm().max(u3.norm()).max(1.0);
    let det = u2.cross(u3);
    let mut out = Vec::new();
    if det.abs() > 1e-12 * scale * scale {
        // x(r) = p + q r from the two linearized tangency differences
        let inv = |bx: f64, by: f64| -> Vec2 {
            v2(
                (u3.y * bx - u2.y * by) / (2.0 * det),
                (-u3.x * bx + u2.x * by) / (2.0 * det),
            )
        };
        let p = inv(rhs2, rhs3);
        let q = inv(-2.0 * d2, -2.0 * d3);
        let e = p - c1;
        let qa = q.norm_sq() - 1.0;
        let qb = 2.0 * (e.dot(q) - s1.weight);
        let qc = e.norm_sq() - s1.weight * s1.weight;
        for r in solve_quadratic(qa, qb, qc) {
            if r >= -1e-12 {
                let r = r.max(0.0);
                out.push((p + q * r, r));
            }
        }
    } else {
        // collinear centers: work along the common axis
        let axis_len = u2.norm().max(u3.norm());
        if axis_len < 1e-12 * scale {
            return Err(FunkError::DegenerateTriple("coincident centers".into()));
        }
        let u = if u2.norm() >= u3.norm() { u2.normalized() } else { u3.normalized() };
        let a2 = u.dot(u2);
        let a3 = u.dot(u3);
        // 2 a_i xi + 2 d_i r = a_i^2 - (w_i^2 - w_1^2)
        let g2 = a2 * a2 - (s2.weight * s2.weight - s1.weight * s1.weight);
        let g3 = a3 * a3 - (s3.weight * s3.weight - s1.weight * s1.weight);
        let det2 = 4.0 * (a2 * d3 - a3 * d2);
        if det2.abs() < 1e-12 * scale {
            return Err(FunkError::DegenerateTriple(
                "collinear centers with matching weights".into(),
            ));
        }
        let xi = (2.0 * d3 * g2 - 2.0 * d2 * g3) / det2;
        let r = (2.0 * a2 * g3 - 2.0 * a3 * g2) / det2;
        if r >= -1e-12 {
            let r = r.max(0.0);
            let eta_sq = (r + s1.weight) * (r + s1.weight) - xi * xi;
            if eta_sq > 1e-24 {
                let eta = eta_sq.sqrt();
                out.push((c1 + u * xi + u.perp() * eta, r));
                out.push((c1 + u * xi - u.perp() * eta, r));
            } else if eta_sq > -1e-12 * scale {
                out.push((c1 + u * xi, r));
            }
        }
    }
    // squaring can introduce spurious roots; keep true tangencies only
    out.retain(|&(x, r)| {
        [s1, s2, s3]
            .iter()
            .all(|s| ((x - s.center).norm() - (r + s.weight)).abs() <= 1e-7 * scale.max(r))
    });
    Ok(out)
}

fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-14 {
        if b.abs() < 1e-300 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // stable split: compute the large-magnitude root first
    let q = -0.5 * (b + b.signum() * sq);
    if q.abs() < 1e-300 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeEnd {
    Vertex(usize),
    /// Unbounded end of a bisector branch.
    Open,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApolloniusEdge {
    /// The two sites this edge separates.
    pub sites: (usize, usize),
    pub ends: (EdgeEnd, EdgeEnd),
    /// Conic coefficients [A, B, C, D, E, F] of
    /// `Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0`; a line is stored with
    /// vanishing quadratic part.
    pub conic: [f64; 6],
    /// Signed branch parameters of the two ends (None for open ends).
    pub params: (Option<f64>, Option<f64>),
    /// Flattened polyline for rendering (open ends clipped).
    pub polyline: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApolloniusCell {
    pub site: usize,
    pub edges: Vec<usize>,
    pub neighbors: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApolloniusDiagram {
    pub sites: Vec<WeightedPoint>,
    /// Sites whose grown disk lies inside another's (empty cells).
    pub hidden: Vec<usize>,
    pub vertices: Vec<TangentCircle>,
    pub edges: Vec<ApolloniusEdge>,
    /// One cell per input site (hidden sites keep an empty cell record).
    pub cells: Vec<ApolloniusCell>,
}

/// Signed-parameter point on the bisector branch of sites (i, j): the pair
/// of points at common additive distance `t_min + |s|`, one per side of the
/// center line.
fn branch_point(si: &WeightedPoint, sj: &WeightedPoint, s: f64) -> Vec2 {
    let d = (sj.center - si.center).norm();
    let u = (sj.center - si.center) / d;
    let t_min = 0.5 * (d - si.weight - sj.weight);
    let t = t_min + s.abs();
    let r1 = t + si.weight;
    let r2 = t + sj.weight;
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h_sq = (r1 * r1 - a * a).max(0.0);
    let h = h_sq.sqrt() * s.signum();
    si.center + u * a + u.perp() * h
}

fn conic_coefficients(si: &WeightedPoint, sj: &WeightedPoint) -> [f64; 6] {
    let g = (sj.center - si.center) * 2.0;
    let dw = si.weight - sj.weight;
    let k = si.center.norm_sq() - sj.center.norm_sq() - dw * dw;
    if dw == 0.0 {
        return [0.0, 0.0, 0.0, g.x, g.y, k];
    }
    let w4 = 4.0 * dw * dw;
    [
        g.x * g.x - w4,
        2.0 * g.x * g.y,
        g.y * g.y - w4,
        2.0 * g.x * k + 2.0 * w4 * sj.center.x,
        2.0 * g.y * k + 2.0 * w4 * sj.center.y,
        k * k - w4 * sj.center.norm_sq(),
    ]
}

struct PairContext<'a> {
    sites: &'a [WeightedPoint],
    visible: &'a [usize],
    i: usize,
    j: usize,
}

impl PairContext<'_> {
    /// Whether (i, j) are the joint nearest sites at the branch point `s`.
    fn jointly_nearest(&self, s: f64) -> bool {
        let x = branch_point(&self.sites[self.i], &self.sites[self.j], s);
        let here = apollonius_distance(&self.sites[self.i], x);
        self.visible
            .iter()
            .filter(|&&k| k != self.i && k != self.j)
            .all(|&k| apollonius_distance(&self.sites[k], x) >= here - 1e-10)
    }
}

/// Builds the diagram; parallel candidate evaluation when the `parallel`
/// feature is enabled.
pub fn build_apollonius(sites: &[WeightedPoint]) -> ApolloniusDiagram {
    build_impl(sites, cfg!(feature = "parallel"))
}

/// Sequential twin of [`build_apollonius`] (identical output).
pub fn build_apollonius_seq(sites: &[WeightedPoint]) -> ApolloniusDiagram {
    build_impl(sites, false)
}

fn hidden_sites(sites: &[WeightedPoint]) -> Vec<bool> {
    let n = sites.len();
    let mut hidden = vec![false; n];
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let gap = (sites[j].center - sites[i].center).norm() + sites[j].weight
                - sites[i].weight;
            // additive containment; exact duplicates keep the lower index
            if gap < tol::GENERAL_POSITION && (gap.abs() > tol::GENERAL_POSITION || i < j) {
                hidden[j] = true;
            }
        }
    }
    hidden
}

fn candidate_triples(visible: &[usize]) -> Vec<[usize; 3]> {
    let mut triples = Vec::new();
    for a in 0..visible.len() {
        for b in a + 1..visible.len() {
            for c in b + 1..visible.len() {
                triples.push([visible[a], visible[b], visible[c]]);
            }
        }
    }
    triples
}

fn validate_triple(
    triple: [usize; 3],
    sites: &[WeightedPoint],
    perturbed: &[WeightedPoint],
    visible: &[usize],
) -> Vec<TangentCircle> {
    let [i, j, k] = triple;
    let Ok(candidates) = tritangent_circles(&perturbed[i], &perturbed[j], &perturbed[k]) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (center, radius) in candidates {
        let empty = visible.iter().all(|&m| {
            m == i
                || m == j
                || m == k
                || (center - perturbed[m].center).norm() - (radius + perturbed[m].weight)
                    >= -1e-13
        });
        if !empty {
            continue;
        }
        // combinatorics from perturbed weights, geometry from the originals
        let exact = tritangent_circles(&sites[i], &sites[j], &sites[k])
            .ok()
            .and_then(|sols| {
                sols.into_iter()
                    .min_by(|a, b| {
                        (a.0 - center).norm().partial_cmp(&(b.0 - center).norm()).unwrap()
                    })
                    .filter(|(c, _)| (*c - center).norm() < 1e-4 + (sites.len() as f64) * 1e-9)
            })
            .unwrap_or((center, radius));
        out.push(TangentCircle {
            center: exact.0,
            radius: exact.1,
            sites: triple,
        });
    }
    out
}

fn build_impl(sites: &[WeightedPoint], parallel: bool) -> ApolloniusDiagram {
    let n = sites.len();
    let hidden_mask = hidden_sites(sites);
    let visible: Vec<usize> = (0..n).filter(|&i| !hidden_mask[i]).collect();
    let perturbed: Vec<WeightedPoint> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| WeightedPoint::new(s.center, s.weight + i as f64 * tol::WEIGHT_PERTURBATION))
        .collect();

    let triples = candidate_triples(&visible);
    let vertices: Vec<TangentCircle> = if parallel {
        #[cfg(feature = "parallel")]
        {
            triples
                .par_iter()
                .map(|&t| validate_triple(t, sites, &perturbed, &visible))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            triples
                .iter()
                .flat_map(|&t| validate_triple(t, sites, &perturbed, &visible))
                .collect()
        }
    } else {
        triples
            .iter()
            .flat_map(|&t| validate_triple(t, sites, &perturbed, &visible))
            .collect()
    };

    // clip radius for open-edge rendering
    let spread = {
        let mut hi = 1.0f64;
        for s in sites {
            hi = hi.max(s.center.norm() + s.weight.abs());
        }
        for v in &vertices {
            hi = hi.max(v.center.norm() + v.radius);
        }
        2.5 * hi
    };

    let mut edges = Vec::new();
    for a in 0..visible.len() {
        for b in a + 1..visible.len() {
            let (i, j) = (visible[a], visible[b]);
            let ctx = PairContext { sites, visible: &visible, i, j };
            let d = (sites[j].center - sites[i].center).norm();
            if d < tol::GENERAL_POSITION {
                continue;
            }
            let t_min = 0.5 * (d - sites[i].weight - sites[j].weight);
            // events: vertices defined with both i and j, ordered along the branch
            let mut events: Vec<(f64, usize)> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.sites.contains(&i) && v.sites.contains(&j))
                .map(|(vi, v)| {
                    let u = (sites[j].center - sites[i].center) / d;
                    let side = u.cross(v.center - sites[i].center).signum();
                    let s = (v.radius - t_min).max(0.0) * if side == 0.0 { 1.0 } else { side };
                    (s, vi)
                })
                .collect();
            events.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

            let span = d.max(1.0);
            let mut intervals: Vec<(Option<(f64, usize)>, Option<(f64, usize)>)> = Vec::new();
            if events.is_empty() {
                intervals.push((None, None));
            } else {
                intervals.push((None, Some(events[0])));
                for w in events.windows(2) {
                    intervals.push((Some(w[0]), Some(w[1])));
                }
                intervals.push((Some(*events.last().unwrap()), None));
            }
            for (lo, hi) in intervals {
                let probe = match (lo, hi) {
                    (None, None) => 0.0,
                    (None, Some((s, _))) => s - span,
                    (Some((s, _)), None) => s + span,
                    (Some((s0, _)), Some((s1, _))) => 0.5 * (s0 + s1),
                };
                if let (Some((s0, _)), Some((s1, _))) = (lo, hi) {
                    if s1 - s0 < 1e-12 {
                        continue;
                    }
                }
                if !ctx.jointly_nearest(probe) {
                    continue;
                }
                let (s_lo, end_lo) = match lo {
                    Some((s, vi)) => (s, EdgeEnd::Vertex(vi)),
                    None => (clip_param(sites, i, j, probe, -1.0, spread), EdgeEnd::Open),
                };
                let (s_hi, end_hi) = match hi {
                    Some((s, vi)) => (s, EdgeEnd::Vertex(vi)),
                    None => (clip_param(sites, i, j, probe, 1.0, spread), EdgeEnd::Open),
                };
                let polyline = flatten_branch(&sites[i], &sites[j], s_lo, s_hi);
                edges.push(ApolloniusEdge {
                    sites: (i, j),
                    ends: (end_lo, end_hi),
                    conic: conic_coefficients(&sites[i], &sites[j]),
                    params: (
                        matches!(end_lo, EdgeEnd::Vertex(_)).then_some(s_lo),
                        matches!(end_hi, EdgeEnd::Vertex(_)).then_some(s_hi),
                    ),
                    polyline,
                });
            }
        }
    }

    let mut cells: Vec<ApolloniusCell> = (0..n)
        .map(|site| ApolloniusCell { site, edges: Vec::new(), neighbors: Vec::new() })
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

    ApolloniusDiagram {
        sites: sites.to_vec(),
        hidden: (0..n).filter(|&i| hidden_mask[i]).collect(),
        vertices,
        edges,
        cells,
    }
}

/// Walks outward from `from` until the branch point leaves the clip circle.
fn clip_param(
    sites: &[WeightedPoint],
    i: usize,
    j: usize,
    from: f64,
    dir: f64,
    clip: f64,
) -> f64 {
    let mut s = from;
    let step = clip * 0.05;
    for _ in 0..400 {
        let p = branch_point(&sites[i], &sites[j], s);
        if p.norm() > clip {
            return s;
        }
        s += dir * step;
    }
    s
}

fn flatten_branch(si: &WeightedPoint, sj: &WeightedPoint, s0: f64, s1: f64) -> Vec<Vec2> {
    let scale = (sj.center - si.center).norm().max(1.0);
    let tol_chord = tol::CHORD_TOLERANCE * scale;
    let mut pts = vec![branch_point(si, sj, s0)];
    subdivide(si, sj, s0, s1, tol_chord, 0, &mut pts);
    pts
}

fn subdivide(
    si: &WeightedPoint,
    sj: &WeightedPoint,
    s0: f64,
    s1: f64,
    tol_chord: f64,
    depth: usize,
    out: &mut Vec<Vec2>,
) {
    let p0 = branch_point(si, sj, s0);
    let p1 = branch_point(si, sj, s1);
    let sm = 0.5 * (s0 + s1);
    let pm = branch_point(si, sj, sm);
    let chord_mid = (p0 + p1) * 0.5;
    if depth >= 12 || (pm - chord_mid).norm() < tol_chord {
        out.push(p1);
        return;
    }
    subdivide(si, sj, s0, sm, tol_chord, depth + 1, out);
    subdivide(si, sj, sm, s1, tol_chord, depth + 1, out);
}

#[derive(Clone, Copy, Debug)]
pub struct Nearest {
    pub index: usize,
    /// Distance gap to the best competitor (ties below [`tol::AMBIGUITY_GAP`]).
    pub gap: f64,
}

impl Nearest {
    pub fn is_ambiguous(&self) -> bool {
        self.gap <= tol::AMBIGUITY_GAP
    }
}

/// Linear-scan nearest site; the definitional answer.
pub fn nearest_site_scan(sites: &[WeightedPoint], q: Vec2) -> Option<Nearest> {
    let mut best: Option<(usize, f64)> = None;
    let mut second = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = apollonius_distance(s, q);
        match best {
            None => best = Some((i, d)),
            Some((_, bd)) if d < bd => {
                second = bd;
                best = Some((i, d));
            }
            Some(_) => second = second.min(d),
        }
    }
    best.map(|(index, d)| Nearest { index, gap: second - d })
}

impl ApolloniusDiagram {
    /// Point location through the diagram structure: greedy descent over the
    /// cell adjacency graph. Agrees with the linear scan whenever the edge
    /// structure is correct.
    pub fn nearest(&self, q: Vec2) -> Option<Nearest> {
        let visible: Vec<usize> =
            (0..self.sites.len()).filter(|i| !self.hidden.contains(i)).collect();
        let mut current = *visible.first()?;
        let mut current_d = apollonius_distance(&self.sites[current], q);
        loop {
            let mut improved = false;
            for &nb in &self.cells[current].neighbors {
                let d = apollonius_distance(&self.sites[nb], q);
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
        let gap = self.cells[current]
            .neighbors
            .iter()
            .map(|&nb| apollonius_distance(&self.sites[nb], q) - current_d)
            .fold(f64::INFINITY, f64::min);
        Some(Nearest { index: current, gap })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(x: f64, y: f64, w: f64) -> WeightedPoint {
        WeightedPoint::new(v2(x, y), w)
    }

    #[test]
    fn distance_basics() {
        assert!((apollonius_distance(&wp(0.0, 0.0, 1.0), v2(2.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((apollonius_distance(&wp(1.0, 2.0, 0.5), v2(1.0, 2.0)) + 0.5).abs() < 1e-15);
        assert!((apollonius_distance(&wp(3.0, 4.0, 0.0), v2(0.0, 0.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn circumcircle_for_zero_weights() {
        let sols = tritangent_circles(&wp(0.0, 0.0, 0.0), &wp(1.0, 0.0, 0.0), &wp(0.0, 1.0, 0.0))
            .unwrap();
        assert_eq!(sols.len(), 1);
        let (c, r) = sols[0];
        assert!((c - v2(0.5, 0.5)).norm() < 1e-12);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tritangent_examples() {
        let sols = tritangent_circles(&wp(-1.0, 0.0, 0.0), &wp(1.0, 0.0, 0.0), &wp(0.0, 2.0, 0.0))
            .unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].0 - v2(0.0, 0.75)).norm() < 1e-12);
        assert!((sols[0].1 - 1.25).abs() < 1e-12);

        let sols =
            tritangent_circles(&wp(-1.0, 0.0, 0.5), &wp(1.0, 0.0, 0.5), &wp(0.0, 2.0, 0.0))
                .unwrap();
        let best = sols
            .iter()
            .min_by(|a, b| (a.0 - v2(0.0, 1.05)).norm().partial_cmp(&(b.0 - v2(0.0, 1.05)).norm()).unwrap())
            .unwrap();
        assert!((best.0 - v2(0.0, 1.05)).norm() < 1e-12);
        assert!((best.1 - 0.95).abs() < 1e-12);
    }

    #[test]
    fn collinear_unequal_weights_solved() {
        let s1 = wp(-1.0, 0.0, 0.4);
        let s2 = wp(0.0, 0.0, 0.0);
        let s3 = wp(1.0, 0.0, 0.4);
        let sols = tritangent_circles(&s1, &s2, &s3).unwrap();
        assert_eq!(sols.len(), 2);
        for (c, r) in &sols {
            assert!((c.x).abs() < 1e-12);
            assert!((c.y.abs() - 1.05).abs() < 1e-12);
            assert!((r - 1.05).abs() < 1e-12);
            for s in [&s1, &s2, &s3] {
                assert!(((*c - s.center).norm() - (r + s.weight)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn collinear_equal_weights_degenerate() {
        let err = tritangent_circles(&wp(-1.0, 0.0, 0.1), &wp(0.0, 0.0, 0.1), &wp(1.0, 0.0, 0.1));
        assert!(matches!(err, Err(FunkError::DegenerateTriple(_))));
    }

    #[test]
    fn single_site_diagram() {
        let d = build_apollonius(&[wp(0.2, 0.1, 0.4)]);
        assert!(d.vertices.is_empty());
        assert!(d.edges.is_empty());
        assert!(d.hidden.is_empty());
    }

    #[test]
    fn two_equal_sites_bisector_line() {
        let d = build_apollonius(&[wp(-1.0, 0.0, 0.2), wp(1.0, 0.0, 0.2)]);
        assert_eq!(d.edges.len(), 1);
        let e = &d.edges[0];
        assert_eq!(e.ends, (EdgeEnd::Open, EdgeEnd::Open));
        // equal weights: quadratic part vanishes, polyline stays on x = 0
        assert_eq!(&e.conic[0..3], &[0.0, 0.0, 0.0]);
        for p in &e.polyline {
            assert!(p.x.abs() < 1e-9);
        }
    }

    #[test]
    fn unit_square_perturbation_yields_two_vertices() {
        let d = build_apollonius(&[
            wp(0.0, 0.0, 0.0),
            wp(1.0, 0.0, 0.0),
            wp(1.0, 1.0, 0.0),
            wp(0.0, 1.0, 0.0),
        ]);
        assert_eq!(d.vertices.len(), 2);
        for v in &d.vertices {
            assert!((v.radius - 0.5f64.sqrt()).abs() < 1e-7);
            assert!((v.center - v2(0.5, 0.5)).norm() < 1e-7);
            assert!(v.tangency_residual(&d.sites) < 1e-9);
            assert!(v.emptiness_margin(&d.sites) > -1e-9);
        }
    }

    #[test]
    fn hidden_site_detected() {
        let d = build_apollonius(&[wp(0.0, 0.0, 2.0), wp(0.5, 0.0, 0.5)]);
        assert_eq!(d.hidden, vec![1]);
        assert!(d.edges.is_empty());
    }

    #[test]
    fn diagram_walk_matches_scan() {
        let sites = vec![
            wp(0.0, 0.0, 0.3),
            wp(2.0, 0.4, 0.1),
            wp(0.8, 1.7, 0.6),
            wp(-1.2, 1.1, 0.2),
            wp(0.4, -1.5, 0.0),
        ];
        let d = build_apollonius(&sites);
        let mut mismatches = 0;
        let mut k = 0u32;
        for ix in 0..40 {
            for iy in 0..40 {
                let q = v2(-3.0 + 6.0 * ix as f64 / 39.0, -3.0 + 6.0 * iy as f64 / 39.0);
                let scan = nearest_site_scan(&sites, q).unwrap();
                let walk = d.nearest(q).unwrap();
                if scan.is_ambiguous() || scan.gap < 1e-9 {
                    continue;
                }
                k += 1;
                if walk.index != scan.index {
                    mismatches += 1;
                }
            }
        }
        assert!(k > 1000);
        assert_eq!(mismatches, 0);
    }
}
