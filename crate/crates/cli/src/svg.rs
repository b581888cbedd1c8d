use std::fmt::Write as _;

use orthospec::develop::DevelopedDomain;
use orthospec::enumerate::Orthogeodesic;
use orthospec::plane::{IdealPoint, Point};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideGeometry {
    /// "arc" or "boundary".
    pub kind: String,
    /// Arc index for arcs, component index for boundary sides.
    pub id: usize,
    pub tree: bool,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexagonGeometry {
    pub index: usize,
    pub vertices: Vec<[f64; 2]>,
    pub sides: Vec<SideGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisGeometry {
    pub component: usize,
    /// `None` stands for the point at infinity.
    pub start: Option<f64>,
    pub end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentGeometry {
    pub length: f64,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub base_point: [f64; 2],
    pub radius: f64,
    pub hexagons: Vec<HexagonGeometry>,
    pub seeds: Vec<AxisGeometry>,
    pub orthogeodesics: Vec<SegmentGeometry>,
}

fn xy(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

fn ideal(x: IdealPoint) -> Option<f64> {
    match x {
        IdealPoint::Finite(v) => Some(v),
        IdealPoint::Infinity => None,
    }
}

pub fn geometry(d: &DevelopedDomain, orthos: &[Orthogeodesic]) -> DomainGeometry {
    let s = &d.surface;
    let hexagons = d
        .hexagons
        .iter()
        .enumerate()
        .map(|(h, placed)| {
            let sides = (0..6)
                .map(|k| {
                    let (kind, id, tree) = if k % 2 == 0 {
                        let arc = s.gluing(h, k / 2).arc;
                        ("arc", arc, d.tree_arcs.contains(&arc))
                    } else {
                        ("boundary", s.locate_side(h, k / 2).0, false)
                    };
                    SideGeometry {
                        kind: kind.to_string(),
                        id,
                        tree,
                        start: xy(placed.vertices[k]),
                        end: xy(placed.vertices[(k + 1) % 6]),
                    }
                })
                .collect();
            HexagonGeometry { index: h, vertices: placed.vertices.iter().map(|&p| xy(p)).collect(), sides }
        })
        .collect();
    let seeds = d
        .boundary
        .iter()
        .map(|b| AxisGeometry { component: b.component, start: ideal(b.axis.start), end: ideal(b.axis.end) })
        .collect();
    let orthogeodesics = orthos
        .iter()
        .map(|o| {
            let (p, q) = o.lift.endpoints();
            SegmentGeometry { length: o.length, start: xy(p), end: xy(q) }
        })
        .collect();
    DomainGeometry { base_point: xy(d.base_point), radius: d.radius, hexagons, seeds, orthogeodesics }
}

/// Visible region of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Window {
    pub fn fit(g: &DomainGeometry) -> Window {
        let pts = g.hexagons.iter().flat_map(|h| h.vertices.iter());
        let (mut xmin, mut xmax, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for p in pts {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymax = ymax.max(p[1]);
        }
        let pad = 0.1 * (xmax - xmin).max(ymax);
        Window { xmin: xmin - pad, xmax: xmax + pad, ymax: ymax + pad }
    }
}

const WIDTH: f64 = 1000.0;

struct Canvas {
    w: Window,
    scale: f64,
}

impl Canvas {
    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        ((p[0] - self.w.xmin) * self.scale, (self.w.ymax - p[1]) * self.scale)
    }

    /// Path data for the geodesic segment from `p` to `q`.
    fn segment(&self, p: [f64; 2], q: [f64; 2]) -> String {
        let (x0, y0) = self.px(p);
        let (x1, y1) = self.px(q);
        let dx = q[0] - p[0];
        if dx.abs() < 1e-12 * (1.0 + p[0].abs()) {
            return format!("M {x0:.3} {y0:.3} L {x1:.3} {y1:.3}");
        }
        let c = ((q[0] * q[0] + q[1] * q[1]) - (p[0] * p[0] + p[1] * p[1])) / (2.0 * dx);
        let r = ((p[0] - c).powi(2) + p[1] * p[1]).sqrt() * self.scale;
        let sweep = if dx > 0.0 { 1 } else { 0 };
        format!("M {x0:.3} {y0:.3} A {r:.3} {r:.3} 0 0 {sweep} {x1:.3} {y1:.3}")
    }

    fn axis(&self, a: &AxisGeometry) -> String {
        let bottom = |x: f64| self.px([x, 0.0]);
        match (a.start, a.end) {
            (Some(u), Some(v)) => {
                let (x0, y0) = bottom(u);
                let (x1, y1) = bottom(v);
                let r = 0.5 * (v - u).abs() * self.scale;
                let sweep = if v > u { 1 } else { 0 };
                format!("M {x0:.3} {y0:.3} A {r:.3} {r:.3} 0 0 {sweep} {x1:.3} {y1:.3}")
            }
            (Some(x), None) | (None, Some(x)) => {
                let (x0, y0) = bottom(x);
                format!("M {x0:.3} {y0:.3} L {x0:.3} 0")
            }
            (None, None) => String::new(),
        }
    }
}

pub fn render(g: &DomainGeometry, window: Window) -> String {
    let scale = WIDTH / (window.xmax - window.xmin);
    let height = window.ymax * scale;
    let cv = Canvas { w: window, scale };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r##"<line x1="0" y1="{height:.3}" x2="{WIDTH:.3}" y2="{height:.3}" stroke="#888" stroke-width="1"/>"##);
    for h in &g.hexagons {
        let _ = writeln!(out, r#"<g class="hexagon" id="hexagon-{}">"#, h.index);
        let outline: Vec<String> = h.sides.iter().map(|s| cv.segment(s.start, s.end)).collect();
        let _ = writeln!(out, r##"<path class="outline" d="{}" fill="none" stroke="#ccc" stroke-width="0.5"/>"##, outline.join(" "));
        for s in &h.sides {
            let d = cv.segment(s.start, s.end);
            if s.kind == "arc" {
                let (color, class) = if s.tree { ("#999", "arc tree") } else { ("#1f77b4", "arc paired") };
                let _ = writeln!(
                    out,
                    r#"<path class="{class}" data-arc-id="arc-{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    s.id
                );
            } else {
                let _ = writeln!(
                    out,
                    r##"<path class="boundary" data-component="{}" d="{d}" fill="none" stroke="#d62728" stroke-width="2.5"/>"##,
                    s.id
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }
    for a in &g.seeds {
        let _ = writeln!(
            out,
            r##"<path class="seed-axis" data-component="{}" d="{}" fill="none" stroke="#d62728" stroke-width="0.75" stroke-dasharray="4 3"/>"##,
            a.component,
            cv.axis(a)
        );
    }
    for o in &g.orthogeodesics {
        let _ = writeln!(
            out,
            r##"<path class="orthogeodesic" data-length="{:.6}" d="{}" fill="none" stroke="#2ca02c" stroke-width="1"/>"##,
            o.length,
            cv.segment(o.start, o.end)
        );
    }
    out.push_str("</svg>\n");
    out
}
