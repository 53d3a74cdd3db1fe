//! Diagram JSON schema written by `funk voronoi` and consumed by
//! `funk verify --diagram`.

use funk_geometry::elliptical::{ArcEnd, FunkVoronoiDiagram};
use funk_geometry::geom::{Vec2, Vec3};
use funk_geometry::planar::PlanarVoronoi;
use funk_geometry::polygonal::PolygonalFunkDiagram;
use funk_geometry::section::CrossSection;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexRecord {
    pub representative: [f64; 2],
    pub ray_direction: [f64; 3],
    pub sites: Vec<usize>,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle_center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub sites: [usize; 2],
    /// True where an endpoint is a diagram vertex (rather than the section
    /// boundary).
    pub vertex_ends: [bool; 2],
    pub polyline: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellRecord {
    pub site: usize,
    pub neighbors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramFile {
    pub pipeline: String,
    pub metric: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_section: Option<CrossSection>,
    pub sites: Vec<Vec<f64>>,
    /// Projected positions and additive weights, per input site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub dominated: Vec<usize>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub cells: Vec<CellRecord>,
    /// Angular order of surviving sites (planar diagrams only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

fn xy(p: Vec2) -> [f64; 2] {
    [p.x, p.y]
}

fn xyz(p: Vec3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

pub fn from_elliptical(d: &FunkVoronoiDiagram, sites: &[Vec3], seed: u64) -> DiagramFile {
    DiagramFile {
        pipeline: "elliptical".into(),
        metric: d.direction.to_string(),
        seed,
        cross_section: Some(d.cross_section.clone()),
        sites: sites.iter().map(|&s| vec![s.x, s.y, s.z]).collect(),
        positions: Some(d.weighted.iter().map(|w| xy(w.position)).collect()),
        weights: Some(d.weighted.iter().map(|w| w.weight).collect()),
        dominated: d.dominated.clone(),
        vertices: d
            .vertices
            .iter()
            .map(|v| VertexRecord {
                representative: xy(v.representative),
                ray_direction: xyz(v.ray_direction),
                sites: v.sites.to_vec(),
                residual: v.residual,
                circle_center: Some(xy(v.circle.center)),
                circle_radius: Some(v.circle.radius),
            })
            .collect(),
        edges: d
            .edges
            .iter()
            .map(|e| EdgeRecord {
                sites: [e.sites.0, e.sites.1],
                vertex_ends: [
                    matches!(e.ends.0, ArcEnd::Vertex(_)),
                    matches!(e.ends.1, ArcEnd::Vertex(_)),
                ],
                polyline: e.polyline.iter().map(|&p| xy(p)).collect(),
            })
            .collect(),
        cells: d
            .cells
            .iter()
            .map(|c| CellRecord { site: c.site, neighbors: c.neighbors.clone(), polygon: None })
            .collect(),
        order: None,
    }
}

pub fn from_polygonal(d: &PolygonalFunkDiagram, sites: &[Vec3]) -> DiagramFile {
    DiagramFile {
        pipeline: "polygonal".into(),
        metric: d.direction.to_string(),
        seed: d.seed,
        cross_section: Some(d.cross_section.clone()),
        sites: sites.iter().map(|&s| vec![s.x, s.y, s.z]).collect(),
        positions: Some(d.weighted.iter().map(|w| xy(w.position)).collect()),
        weights: Some(d.weighted.iter().map(|w| w.weight).collect()),
        dominated: d.dominated.clone(),
        vertices: d
            .vertices
            .iter()
            .map(|v| VertexRecord {
                representative: xy(v.position),
                ray_direction: xyz(funk_geometry::section::lift_to_ray(
                    &d.cross_section,
                    v.position,
                )),
                sites: v.sites.clone(),
                residual: v.residual,
                circle_center: None,
                circle_radius: None,
            })
            .collect(),
        edges: d
            .pair_boundaries()
            .iter()
            .map(|((a, b), polyline)| EdgeRecord {
                sites: [*a, *b],
                vertex_ends: [false, false],
                polyline: polyline.iter().map(|&p| xy(p)).collect(),
            })
            .collect(),
        cells: d
            .cells
            .iter()
            .map(|c| {
                let neighbors = d
                    .pair_boundaries()
                    .iter()
                    .filter_map(|((a, b), _)| {
                        if *a == c.site {
                            Some(*b)
                        } else if *b == c.site {
                            Some(*a)
                        } else {
                            None
                        }
                    })
                    .collect();
                CellRecord {
                    site: c.site,
                    neighbors,
                    polygon: Some(c.polygon.iter().map(|&p| xy(p)).collect()),
                }
            })
            .collect(),
        order: None,
    }
}

pub fn from_planar(d: &PlanarVoronoi, sites: &[Vec2], seed: u64) -> DiagramFile {
    DiagramFile {
        pipeline: "planar".into(),
        metric: d.direction.to_string(),
        seed,
        cross_section: None,
        sites: sites.iter().map(|&s| vec![s.x, s.y]).collect(),
        positions: None,
        weights: None,
        dominated: d.dominated.clone(),
        vertices: Vec::new(),
        edges: d
            .rays
            .iter()
            .zip(d.order.windows(2))
            .map(|(ray, pair)| EdgeRecord {
                sites: [pair[0], pair[1]],
                vertex_ends: [false, false],
                polyline: vec![[0.0, 0.0], xy(*ray)],
            })
            .collect(),
        cells: d
            .order
            .iter()
            .enumerate()
            .map(|(k, &site)| {
                let mut neighbors = Vec::new();
                if k > 0 {
                    neighbors.push(d.order[k - 1]);
                }
                if k + 1 < d.order.len() {
                    neighbors.push(d.order[k + 1]);
                }
                CellRecord { site, neighbors, polygon: None }
            })
            .collect(),
        order: Some(d.order.clone()),
    }
}
