//! SVG rendering of cross-section diagrams.
//!
//! The cross-section is scaled into a 1000-unit viewbox with the y axis
//! pointing up.

use funk_geometry::elliptical::FunkVoronoiDiagram;
use funk_geometry::geom::{v2, Vec2};
use funk_geometry::polygonal::PolygonalFunkDiagram;
use funk_geometry::section::{SectionRegion, ZeroBall};
use std::fmt::Write;

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 40.0;

struct Frame {
    lo: Vec2,
    hi: Vec2,
}

impl Frame {
    fn new(lo: Vec2, hi: Vec2) -> Frame {
        Frame { lo, hi }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let span = (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y).max(1e-12);
        let s = (VIEW - 2.0 * MARGIN) / span;
        (
            MARGIN + (p.x - self.lo.x) * s,
            VIEW - MARGIN - (p.y - self.lo.y) * s,
        )
    }

    fn scale(&self, r: f64) -> f64 {
        let span = (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y).max(1e-12);
        r * (VIEW - 2.0 * MARGIN) / span
    }
}

fn header(out: &mut String) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
    )
    .unwrap();
    writeln!(out, r#"  <rect width="{VIEW}" height="{VIEW}" fill="white"/>"#).unwrap();
}

fn polyline(out: &mut String, frame: &Frame, pts: &[Vec2], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut path = String::new();
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = frame.map(*p);
        let cmd = if k == 0 { 'M' } else { 'L' };
        write!(path, "{cmd}{x:.2} {y:.2} ").unwrap();
    }
    writeln!(out, r#"  <path d="{}" fill="none" {style}/>"#, path.trim_end()).unwrap();
}

fn closed_polygon(out: &mut String, frame: &Frame, pts: &[Vec2], style: &str) {
    if pts.len() < 3 {
        return;
    }
    let mut path = String::new();
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = frame.map(*p);
        let cmd = if k == 0 { 'M' } else { 'L' };
        write!(path, "{cmd}{x:.2} {y:.2} ").unwrap();
    }
    writeln!(out, r#"  <path d="{}Z" {style}/>"#, path.trim_end()).unwrap();
}

fn circle(out: &mut String, frame: &Frame, center: Vec2, r: f64, style: &str) {
    let (cx, cy) = frame.map(center);
    writeln!(out, r#"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" {style}/>"#, frame.scale(r))
        .unwrap();
}

fn dot(out: &mut String, frame: &Frame, p: Vec2, r: f64, fill: &str) {
    let (cx, cy) = frame.map(p);
    writeln!(out, r#"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="{fill}"/>"#).unwrap();
}

fn zero_ball(out: &mut String, frame: &Frame, ball: &ZeroBall) {
    let style = r##"stroke="#88aadd" stroke-width="1" stroke-dasharray="6 4" fill="none""##;
    match ball {
        ZeroBall::Disk { center, radius } => circle(out, frame, *center, *radius, style),
        ZeroBall::Polygon { vertices } => closed_polygon(out, frame, vertices, style),
    }
}

pub fn render_elliptical(
    diagram: &FunkVoronoiDiagram,
    zero_balls: &[ZeroBall],
) -> String {
    let (lo, hi) = diagram.cross_section.region.bounding_box();
    let frame = Frame::new(lo, hi);
    let mut out = String::new();
    header(&mut out);
    if let SectionRegion::Disk { radius } = diagram.cross_section.region {
        circle(&mut out, &frame, v2(0.0, 0.0), radius, r#"stroke="black" stroke-width="2" fill="none""#);
    }
    for ball in zero_balls {
        zero_ball(&mut out, &frame, ball);
    }
    for e in &diagram.edges {
        polyline(&mut out, &frame, &e.polyline, r##"stroke="#cc3333" stroke-width="2""##);
    }
    for (i, w) in diagram.weighted.iter().enumerate() {
        let fill = if diagram.dominated.contains(&i) { "#bbbbbb" } else { "#222222" };
        dot(&mut out, &frame, w.position, 5.0, fill);
    }
    for v in &diagram.vertices {
        dot(&mut out, &frame, v.representative, 6.0, "#2255cc");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_polygonal(
    diagram: &PolygonalFunkDiagram,
    zero_balls: &[ZeroBall],
    spokes: bool,
) -> String {
    let (lo, hi) = diagram.cross_section.region.bounding_box();
    let frame = Frame::new(lo, hi);
    let section = diagram.section_polygon().to_vec();
    let mut out = String::new();
    header(&mut out);
    closed_polygon(&mut out, &frame, &section, r#"stroke="black" stroke-width="2" fill="none""#);
    if spokes {
        for &site in &diagram.kept {
            let p = diagram.weighted[site].position;
            for &v in &section {
                let dir = match diagram.direction {
                    funk_geometry::Direction::Forward => v,
                    funk_geometry::Direction::Reverse => {
                        // reverse spokes leave away from each vertex; draw to
                        // the far boundary along that direction
                        let d = (p - v).normalized();
                        let mut t = f64::INFINITY;
                        let n = section.len();
                        for k in 0..n {
                            let a = section[k];
                            let b = section[(k + 1) % n];
                            let e = b - a;
                            let den = d.cross(e);
                            if den.abs() < 1e-300 {
                                continue;
                            }
                            let tt = (a - p).cross(e) / den;
                            let u = (a - p).cross(d) / den;
                            if tt > 1e-9 && (0.0..=1.0).contains(&u) {
                                t = t.min(tt);
                            }
                        }
                        if t.is_finite() {
                            p + d * t
                        } else {
                            continue;
                        }
                    }
                };
                polyline(
                    &mut out,
                    &frame,
                    &[p, dir],
                    r##"stroke="#ddddaa" stroke-width="0.7""##,
                );
            }
        }
    }
    for ball in zero_balls {
        zero_ball(&mut out, &frame, ball);
    }
    for ((_, _), boundary) in diagram.pair_boundaries() {
        polyline(&mut out, &frame, &boundary, r##"stroke="#cc3333" stroke-width="2""##);
    }
    for (i, w) in diagram.weighted.iter().enumerate() {
        let fill = if diagram.dominated.contains(&i) { "#bbbbbb" } else { "#222222" };
        dot(&mut out, &frame, w.position, 5.0, fill);
    }
    for v in &diagram.vertices {
        dot(&mut out, &frame, v.position, 6.0, "#2255cc");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_planar(
    cone: &funk_geometry::PlanarCone,
    sites: &[Vec2],
    rays: &[Vec2],
) -> String {
    let reach = sites.iter().map(|s| s.norm()).fold(1.0, f64::max) * 1.5;
    let frame = Frame::new(v2(-reach, 0.0), v2(reach, reach * 1.2));
    let mut out = String::new();
    header(&mut out);
    let (d1, d2) = cone.rays();
    for d in [d1, d2] {
        polyline(&mut out, &frame, &[v2(0.0, 0.0), d * (2.5 * reach)], r#"stroke="black" stroke-width="2""#);
    }
    for ray in rays {
        polyline(
            &mut out,
            &frame,
            &[v2(0.0, 0.0), *ray * (2.5 * reach)],
            r##"stroke="#cc3333" stroke-width="2""##,
        );
    }
    for s in sites {
        dot(&mut out, &frame, *s, 5.0, "#222222");
    }
    out.push_str("</svg>\n");
    out
}
