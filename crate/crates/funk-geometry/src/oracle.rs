//! Brute-force oracles used by tests and the `verify` command.
//!
//! The scaling oracle answers distance queries through membership bisection
//! only, so it shares no arithmetic with the closed-form kernels it checks.
//! The grid oracle labels cross-section points by exhaustive scan, and the
//! circumcenter sweep re-samples the pencil gap on a shifted, denser grid.

use crate::circumcenter::CircumcenterSetup;
use crate::cone::{Cone, PlanarCone};
use crate::error::{FunkError, Result};
use crate::geom::{v2, Vec2, Vec3};
use crate::metric::Direction;
use crate::section::{self, CrossSection, WeightedSite};


#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Natural log of the infimum scale `beta*` for a membership predicate whose
/// true set is a half-line `[beta*, inf)` with `beta* > 0`.
pub fn infimum_scale(member: impl Fn(f64) -> bool) -> Option<f64> {
    let mut hi = 1.0f64;
    let mut grow = 0;
    while !member(hi) {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return None;
        }
    }
    let mut lo = hi;
    let mut shrink = 0;
    while member(lo) {
        lo *= 0.5;
        shrink += 1;
        if shrink > 2000 {
            return None;
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((0.5 * (lo + hi)).ln())
}

/// Distance by bisection on the defining infimum; membership tests only.
pub fn beta_scaling_distance(cone: &Cone, a: Vec3, b: Vec3, dir: Direction) -> Result<f64> {
    if !cone.contains(a, true) || !cone.contains(b, true) {
        return Err(FunkError::NotInterior);
    }
    let (from, to) = match dir {
        Direction::Forward => (a, b),
        Direction::Reverse => (b, a),
    };
    infimum_scale(|beta| cone.contains(to * beta - from, false))
        .ok_or_else(|| FunkError::Internal("scaling bisection failed to bracket".into()))
}

/// Planar-cone variant of [`beta_scaling_distance`].
pub fn beta_scaling_distance_planar(
    cone: &PlanarCone,
    a: Vec2,
    b: Vec2,
    dir: Direction,
) -> Result<f64> {
    if !cone.contains(a, true) || !cone.contains(b, true) {
        return Err(FunkError::NotInterior);
    }
    let (from, to) = match dir {
        Direction::Forward => (a, b),
        Direction::Reverse => (b, a),
    };
    infimum_scale(|beta| cone.contains(to * beta - from, false))
        .ok_or_else(|| FunkError::Internal("scaling bisection failed to bracket".into()))
}

/// Nearest-site labels over a cross-section grid.
#[derive(Clone, Debug)]
pub struct LabelGrid {
    pub resolution: usize,
    pub lo: Vec2,
    pub hi: Vec2,
    /// Row-major labels; `None` outside the region.
    pub labels: Vec<Option<usize>>,
    /// Gap to the runner-up at each labeled point.
    pub gaps: Vec<f64>,
}

impl LabelGrid {
    pub fn point(&self, ix: usize, iy: usize) -> Vec2 {
        let n = self.resolution as f64;
        v2(
            self.lo.x + (self.hi.x - self.lo.x) * (ix as f64 + 0.5) / n,
            self.lo.y + (self.hi.y - self.lo.y) * (iy as f64 + 0.5) / n,
        )
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.resolution + ix
    }
}

fn label_cell(
    cs: &CrossSection,
    sites: &[WeightedSite],
    dir: Direction,
    q: Vec2,
) -> (Option<usize>, f64) {
    let scale = cs.region.scale();
    if !cs.region.contains(q, 1e-9 * scale) {
        return (None, f64::INFINITY);
    }
    let mut best: Option<(usize, f64)> = None;
    let mut second = f64::INFINITY;
    for (i, ws) in sites.iter().enumerate() {
        let d = section::weighted_value(cs, ws, q, dir);
        match best {
            None => best = Some((i, d)),
            Some((_, bd)) if d < bd => {
                second = bd;
                best = Some((i, d));
            }
            Some(_) => second = second.min(d),
        }
    }
    match best {
        Some((i, d)) => (Some(i), second - d),
        None => (None, f64::INFINITY),
    }
}

/// Labels every grid point interior to the region with the argmin of the
/// weighted distance; rayon-parallel when the feature is enabled.
pub fn grid_labeling(
    cs: &CrossSection,
    sites: &[WeightedSite],
    dir: Direction,
    resolution: usize,
) -> LabelGrid {
    grid_impl(cs, sites, dir, resolution, cfg!(feature = "parallel"))
}

/// Sequential twin of [`grid_labeling`] (identical output).
pub fn grid_labeling_seq(
    cs: &CrossSection,
    sites: &[WeightedSite],
    dir: Direction,
    resolution: usize,
) -> LabelGrid {
    grid_impl(cs, sites, dir, resolution, false)
}

fn grid_impl(
    cs: &CrossSection,
    sites: &[WeightedSite],
    dir: Direction,
    resolution: usize,
    parallel: bool,
) -> LabelGrid {
    let resolution = resolution.max(2);
    let (lo, hi) = cs.region.bounding_box();
    let mut grid = LabelGrid {
        resolution,
        lo,
        hi,
        labels: Vec::new(),
        gaps: Vec::new(),
    };
    let rows: Vec<usize> = (0..resolution).collect();
    let row_eval = |&iy: &usize| -> Vec<(Option<usize>, f64)> {
        (0..resolution)
            .map(|ix| label_cell(cs, sites, dir, grid.point(ix, iy)))
            .collect()
    };
    let cells: Vec<Vec<(Option<usize>, f64)>> = if parallel {
        #[cfg(feature = "parallel")]
        {
            rows.par_iter().map(row_eval).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            rows.iter().map(row_eval).collect()
        }
    } else {
        rows.iter().map(row_eval).collect()
    };
    grid.labels.reserve(resolution * resolution);
    grid.gaps.reserve(resolution * resolution);
    for row in cells {
        for (label, gap) in row {
            grid.labels.push(label);
            grid.gaps.push(gap);
        }
    }
    grid
}

/// Re-evaluates the circumcenter pencil gap on a half-step-shifted grid and
/// brackets its roots independently of `classify`.
pub fn circumcenter_sweep(setup: &CircumcenterSetup, samples: usize) -> Vec<f64> {
    let eps = crate::circumcenter::ENDPOINT_EPS;
    let at = |k: f64| eps + (1.0 - 2.0 * eps) * k / samples as f64;
    let mut roots = Vec::new();
    let mut prev_t = at(0.5);
    let mut prev = setup.pencil_gap(prev_t);
    for k in 1..samples {
        let t = at(k as f64 + 0.5);
        let cur = setup.pencil_gap(t);
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (prev_t, t);
            let mut flo = prev;
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
        prev_t = t;
        prev = cur;
    }
    roots
}

/// Convenience: fraction of grid points (outside an ambiguity band) where a
/// locator agrees with the scan labels, plus the total compared.
pub fn agreement_fraction(
    grid: &LabelGrid,
    gap_band: f64,
    mut locate: impl FnMut(Vec2) -> Option<usize>,
) -> (f64, usize) {
    let mut total = 0usize;
    let mut agree = 0usize;
    for iy in 0..grid.resolution {
        for ix in 0..grid.resolution {
            let idx = grid.index(ix, iy);
            let Some(label) = grid.labels[idx] else { continue };
            if grid.gaps[idx] < gap_band {
                continue;
            }
            total += 1;
            if locate(grid.point(ix, iy)) == Some(label) {
                agree += 1;
            }
        }
    }
    let fraction = if total == 0 { 1.0 } else { agree as f64 / total as f64 };
    (fraction, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v3;
    use crate::metric::{funk_distance, Direction::*};
    use crate::planar;

    #[test]
    fn oracle_matches_axis_examples() {
        let wedge = PlanarCone::from_rays(v2(1.0, 1.0), v2(-1.0, 1.0)).unwrap();
        let d = beta_scaling_distance_planar(&wedge, v2(0.0, 1.0), v2(0.0, 2.0), Forward).unwrap();
        assert!((d + 2f64.ln()).abs() < 1e-9);
        let d = beta_scaling_distance_planar(&wedge, v2(0.0, 1.0), v2(0.5, 1.0), Forward).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-9);
        let p = v2(0.1, 0.9);
        assert!(beta_scaling_distance_planar(&wedge, p, p, Forward).unwrap().abs() < 1e-9);
    }

    #[test]
    fn oracle_agrees_with_closed_forms() {
        let cone = Cone::circular(0.6).unwrap();
        let pts = [
            v3(0.05, 0.1, 0.7),
            v3(-0.2, 0.1, 0.9),
            v3(0.3, -0.1, 1.2),
            v3(0.0, 0.0, 0.4),
        ];
        for &a in &pts {
            for &b in &pts {
                for dir in [Forward, Reverse] {
                    let fast = funk_distance(&cone, a, b, dir).unwrap();
                    let slow = beta_scaling_distance(&cone, a, b, dir).unwrap();
                    assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
                }
            }
        }
        let wedge = PlanarCone::from_rays(v2(1.0, 0.2), v2(-0.4, 1.0)).unwrap();
        let pts = [v2(0.1, 0.5), v2(-0.05, 0.8), v2(0.3, 0.9)];
        for &a in &pts {
            for &b in &pts {
                for dir in [Forward, Reverse] {
                    let fast = planar::funk_distance(&wedge, a, b, dir).unwrap();
                    let slow = beta_scaling_distance_planar(&wedge, a, b, dir).unwrap();
                    assert!((fast - slow).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_site_grid_is_uniform() {
        let cone = Cone::circular(std::f64::consts::FRAC_PI_4).unwrap();
        let site = v3(0.1, 0.0, 0.5);
        let cs = section::choose_cross_section(&cone, &[site], Forward, 0.1).unwrap();
        let ws = vec![section::project_site(&cone, &cs, site, 0, Forward).unwrap()];
        let grid = grid_labeling(&cs, &ws, Forward, 16);
        let labeled: Vec<_> = grid.labels.iter().flatten().collect();
        assert!(!labeled.is_empty());
        assert!(labeled.iter().all(|&&l| l == 0));
    }

    #[test]
    fn two_symmetric_sites_split_grid() {
        let cone = Cone::circular(std::f64::consts::FRAC_PI_4).unwrap();
        let sites = [v3(-0.2, 0.0, 0.5), v3(0.2, 0.0, 0.5)];
        let cs = section::choose_cross_section(&cone, &sites, Forward, 0.1).unwrap();
        let ws: Vec<WeightedSite> = sites
            .iter()
            .enumerate()
            .map(|(i, &s)| section::project_site(&cone, &cs, s, i, Forward).unwrap())
            .collect();
        let grid = grid_labeling(&cs, &ws, Forward, 64);
        for iy in 0..64 {
            for ix in 0..64 {
                let idx = grid.index(ix, iy);
                if let Some(label) = grid.labels[idx] {
                    if grid.gaps[idx] < 1e-6 {
                        continue;
                    }
                    let q = grid.point(ix, iy);
                    assert_eq!(label, usize::from(q.x > 0.0), "at {q:?}");
                }
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_grids_match() {
        let cone = Cone::circular(0.7).unwrap();
        let sites = [v3(-0.2, 0.1, 0.5), v3(0.2, 0.0, 0.6), v3(0.0, -0.25, 0.55)];
        let cs = section::choose_cross_section(&cone, &sites, Forward, 0.1).unwrap();
        let ws: Vec<WeightedSite> = sites
            .iter()
            .enumerate()
            .map(|(i, &s)| section::project_site(&cone, &cs, s, i, Forward).unwrap())
            .collect();
        let par = grid_labeling(&cs, &ws, Forward, 48);
        let seq = grid_labeling_seq(&cs, &ws, Forward, 48);
        assert_eq!(par.labels, seq.labels);
        assert_eq!(par.gaps, seq.gaps);
    }
}
