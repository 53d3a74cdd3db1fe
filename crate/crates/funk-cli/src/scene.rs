//! Scene file schema: a cone, its sites, and run options.

use funk_geometry::geom::{v2, Mat3, Vec2, Vec3};
use funk_geometry::metric::Direction;
use funk_geometry::{Cone, PlanarCone};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    Circular {
        half_angle: f64,
    },
    Elliptical {
        half_angle: f64,
        map: [[f64; 3]; 3],
    },
    Polyhedral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        section: Option<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normals: Option<Vec<[f64; 3]>>,
    },
    Planar {
        rays: [[f64; 2]; 2],
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub cone: ConeSpec,
    pub sites: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated scene: either a 3-dimensional cone with 3-real sites or a
/// planar wedge with 2-real sites.
pub enum Scene {
    Spatial { cone: Cone, sites: Vec<Vec3>, metric: Direction, seed: u64 },
    Planar { cone: PlanarCone, sites: Vec<Vec2>, metric: Direction, seed: u64 },
}

pub struct SceneError(pub String);

impl Scene {
    pub fn seed(&self) -> u64 {
        match self {
            Scene::Spatial { seed, .. } | Scene::Planar { seed, .. } => *seed,
        }
    }
}

fn parse_metric(name: &str) -> Result<Direction, SceneError> {
    match name {
        "forward" => Ok(Direction::Forward),
        "reverse" => Ok(Direction::Reverse),
        other => Err(SceneError(format!("unknown metric {other:?} (forward|reverse)"))),
    }
}

/// Parses and validates a scene; `metric_override` comes from the CLI flag.
pub fn load_scene(text: &str, metric_override: Option<&str>) -> Result<Scene, SceneError> {
    let file: SceneFile =
        serde_json::from_str(text).map_err(|e| SceneError(format!("malformed scene JSON: {e}")))?;
    let metric = match metric_override.or(file.metric.as_deref()) {
        Some(name) => parse_metric(name)?,
        None => Direction::Forward,
    };
    let seed = file.seed.unwrap_or(funk_geometry::polygonal::DEFAULT_SEED);
    if file.sites.is_empty() {
        return Err(SceneError("scene has no sites".into()));
    }
    if let Some(w) = &file.weights {
        if w.len() != file.sites.len() {
            return Err(SceneError("weights length differs from sites".into()));
        }
        if w.iter().any(|&x| x != 0.0) {
            return Err(SceneError(
                "nonzero site weights are not supported; weights come from the projection".into(),
            ));
        }
    }

    match &file.cone {
        ConeSpec::Planar { rays } => {
            let cone = PlanarCone::from_rays(v2(rays[0][0], rays[0][1]), v2(rays[1][0], rays[1][1]))
                .map_err(|e| SceneError(e.to_string()))?;
            let mut sites = Vec::with_capacity(file.sites.len());
            for (i, s) in file.sites.iter().enumerate() {
                if s.len() != 2 {
                    return Err(SceneError(format!("site {i}: planar cones need 2 coordinates")));
                }
                let p = v2(s[0], s[1]);
                if !cone.contains(p, true) {
                    return Err(SceneError(format!("site {i} not interior")));
                }
                sites.push(p);
            }
            Ok(Scene::Planar { cone, sites, metric, seed })
        }
        spec => {
            let cone = build_cone(spec).map_err(|e| SceneError(e.to_string()))?;
            let mut sites = Vec::with_capacity(file.sites.len());
            for (i, s) in file.sites.iter().enumerate() {
                if s.len() != 3 {
                    return Err(SceneError(format!("site {i}: expected 3 coordinates")));
                }
                let p = funk_geometry::geom::v3(s[0], s[1], s[2]);
                if !cone.contains(p, true) {
                    return Err(SceneError(format!("site {i} not interior")));
                }
                sites.push(p);
            }
            Ok(Scene::Spatial { cone, sites, metric, seed })
        }
    }
}

fn build_cone(spec: &ConeSpec) -> funk_geometry::Result<Cone> {
    match spec {
        ConeSpec::Circular { half_angle } => Cone::circular(*half_angle),
        ConeSpec::Elliptical { half_angle, map } => {
            Cone::elliptical(*half_angle, Mat3 { rows: *map })
        }
        ConeSpec::Polyhedral { section, normals } => match (section, normals) {
            (Some(poly), _) => Cone::polyhedral_from_section(
                poly.iter().map(|&[x, y]| v2(x, y)).collect(),
            ),
            (None, Some(ns)) => Cone::polyhedral_from_normals(
                ns.iter().map(|&[x, y, z]| funk_geometry::geom::v3(x, y, z)).collect(),
            ),
            (None, None) => Err(funk_geometry::FunkError::InvalidCone(
                "polyhedral cone needs a section polygon or facet normals".into(),
            )),
        },
        ConeSpec::Planar { .. } => unreachable!("handled by the caller"),
    }
}
