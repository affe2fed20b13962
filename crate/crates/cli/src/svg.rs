//! SVG emission: cell complexes colored by gradient label with the singular
//! skeleton overlaid, covering layouts, and frame diagrams. Cells are exact
//! polygons, so vector output stays faithful at any zoom.

use std::fmt::Write as _;

use ortho2d::cells::PiecewiseAffineMap;
use ortho2d::covering::Covering;
use ortho2d::geom::SegmentSet;
use ortho2d::matrix::SignedMatrix;
use ortho2d::scalar::Scalar;

/// Fixed legend: one color per admissible gradient, stable across runs.
/// Index order follows [`SignedMatrix::ALL`].
pub const LABEL_COLORS: [(&str, &str); 8] = [
    ("+A1", "#1f77b4"),
    ("-A1", "#aec7e8"),
    ("+A2", "#2ca02c"),
    ("-A2", "#98df8a"),
    ("+A3", "#d62728"),
    ("-A3", "#ff9896"),
    ("+A4", "#9467bd"),
    ("-A4", "#c5b0d5"),
];

pub fn color_of(m: SignedMatrix) -> &'static str {
    LABEL_COLORS[m.index()].1
}

struct Canvas {
    svg: String,
    scale: f64,
    x0: f64,
    y1: f64,
}

impl Canvas {
    fn new(bbox: (f64, f64, f64, f64), px: f64) -> Canvas {
        let (x0, y0, x1, y1) = bbox;
        let w = (x1 - x0).max(1e-9);
        let h = (y1 - y0).max(1e-9);
        let scale = px / w.max(h);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.2} {:.2}\">",
            w * scale,
            h * scale
        );
        Canvas { svg, scale, x0, y1 }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }

    fn poly(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str, width: f64) {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let (px, py) = self.map(*x, *y);
            let _ = write!(d, "{}{:.3},{:.3} ", if i == 0 { "" } else { "" }, px, py);
        }
        let _ = writeln!(
            self.svg,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{:.3}\"/>",
            d.trim_end(),
            fill,
            stroke,
            width
        );
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let (x1, y1) = self.map(a.0, a.1);
        let (x2, y2) = self.map(b.0, b.1);
        let _ = writeln!(
            self.svg,
            "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"{stroke}\" stroke-width=\"{width:.3}\"/>"
        );
    }

    fn finish(mut self, legend: bool) -> String {
        if legend {
            let mut y = 14.0;
            for (label, color) in LABEL_COLORS {
                let _ = writeln!(
                    self.svg,
                    "<rect x=\"6\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\
                     <text x=\"20\" y=\"{:.1}\" font-size=\"10\" font-family=\"monospace\">{label}</text>",
                    y - 9.0,
                    y
                );
                y += 13.0;
            }
        }
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Cell map colored by gradient, singular set overlaid, boundary emphasized.
pub fn render_map<S: Scalar>(
    map: &PiecewiseAffineMap<S>,
    sigma: Option<&SegmentSet>,
    px: f64,
) -> String {
    let mut canvas = Canvas::new(map.domain.bbox_f64(), px);
    for cell in &map.cells {
        let pts: Vec<(f64, f64)> = cell
            .poly
            .verts
            .iter()
            .map(|v| (v.x.to_f64(), v.y.to_f64()))
            .collect();
        canvas.poly(&pts, color_of(cell.gradient), "none", 0.0);
    }
    if let Some(sigma) = sigma {
        for s in sigma.segments() {
            canvas.line((s.a.x, s.a.y), (s.b.x, s.b.y), "#000000", 1.0);
        }
    }
    let dom: Vec<(f64, f64)> = map
        .domain
        .verts
        .iter()
        .map(|v| (v.x.to_f64(), v.y.to_f64()))
        .collect();
    canvas.poly(&dom, "none", "#000000", 2.5);
    canvas.finish(true)
}

/// Covering layout: squares outlined and shaded by generation tag.
pub fn render_covering<S: Scalar>(cov: &Covering<S>, px: f64) -> String {
    let mut canvas = Canvas::new(cov.domain.bbox_f64(), px);
    let shades = ["#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c"];
    for sq in &cov.squares {
        let x0 = sq.min.x.to_f64();
        let y0 = sq.min.y.to_f64();
        let s = sq.side.to_f64();
        let gen = match &sq.tag {
            ortho2d::covering::Provenance::RectangleStep(i) => *i as usize,
            ortho2d::covering::Provenance::TriangleWord(w) => w.len(),
            ortho2d::covering::Provenance::VitaliLevel(n) => *n as usize,
        };
        canvas.poly(
            &[(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)],
            shades[gen.min(shades.len() - 1)],
            "#08306b",
            0.6,
        );
    }
    let dom: Vec<(f64, f64)> = cov
        .domain
        .verts
        .iter()
        .map(|v| (v.x.to_f64(), v.y.to_f64()))
        .collect();
    canvas.poly(&dom, "none", "#000000", 2.0);
    canvas.finish(false)
}
