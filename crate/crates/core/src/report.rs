//! External text interfaces: energy reports (JSON-compatible, 12 significant
//! digits, byte-stable), CSV sweeps, the domain specification file, and the
//! solution export format with exact binary-rational numerals.

use std::fmt::Write as _;

use crate::cells::{ConvexCell, PiecewiseAffineMap};
use crate::covering::{CoveringError, HFunc, MonotoneSpline, Piece, TriangularDomain};
use crate::energy::{EnergyReport, EnergySweep};
use crate::geom::{Point, Polygon};
use crate::matrix::SignedMatrix;
use crate::scalar::{Dyadic, Scalar};

/// Decimal with 12 significant digits; the fixed formatting keeps reports
/// byte-identical across runs and thread counts.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".to_string();
    }
    format!("{:.11e}", x)
}

fn dyadic_str(x: f64) -> String {
    Dyadic::from_f64_exact(x).to_dyadic_string()
}

pub fn energy_json(sweep: &EnergySweep) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"reports\": [\n");
    for (i, r) in sweep.reports.iter().enumerate() {
        out.push_str("    ");
        out.push_str(&report_json(r));
        if i + 1 < sweep.reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

fn report_json(r: &EnergyReport) -> String {
    let mut s = String::new();
    s.push('{');
    let _ = write!(
        s,
        "\"alpha\": \"{}\", \"delta\": \"{}\", \"h\": \"{}\", \"depth\": {}, ",
        sig12(r.alpha),
        sig12(r.delta),
        sig12(r.h),
        r.depth
    );
    let _ = write!(
        s,
        "\"f1\": \"{}\", \"f1_exact_zero\": {}, ",
        sig12(r.f1),
        r.f1_exact_zero
    );
    let _ = write!(
        s,
        "\"f2\": [[\"{}\", \"{}\"], [\"{}\", \"{}\"]], \"f2_total\": \"{}\", ",
        sig12(r.f2[0][0]),
        sig12(r.f2[0][1]),
        sig12(r.f2[1][0]),
        sig12(r.f2[1][1]),
        sig12(r.f2_total)
    );
    match r.tail_bound {
        Some(t) => {
            let _ = write!(s, "\"tail_bound\": \"{}\", ", sig12(t));
        }
        None => s.push_str("\"tail_bound\": null, "),
    }
    let _ = write!(
        s,
        "\"weight_margin\": \"{}\", \"jump_count\": {}, \"sigma_length\": \"{}\"",
        sig12(r.weight_margin),
        r.jump_count,
        sig12(r.sigma_length)
    );
    s.push('}');
    s
}

pub fn energy_csv(sweep: &EnergySweep) -> String {
    let mut out = String::from(
        "depth,alpha,delta,h,f1,f2_11,f2_12,f2_21,f2_22,f2_total,tail_bound,sigma_length\n",
    );
    for r in &sweep.reports {
        let tail = r.tail_bound.map(sig12).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.depth,
            sig12(r.alpha),
            sig12(r.delta),
            sig12(r.h),
            sig12(r.f1),
            sig12(r.f2[0][0]),
            sig12(r.f2[0][1]),
            sig12(r.f2[1][0]),
            sig12(r.f2[1][1]),
            sig12(r.f2_total),
            tail,
            sig12(r.sigma_length)
        );
    }
    out
}

/// Parsed domain specification: alpha plus rectangle and triangle pieces.
///
/// Grammar (JSON): `{"alpha": num, "rectangles": [{"x0":num, "y0":num,
/// "x1":num, "y1":num}, ...], "triangles": [{"a":num, "b":num, "h":
/// {"linear": {"c0":num, "c1":num}} | {"spline": {"knots":[...],
/// "values":[...], "derivs":[...]}}, "rotation": 0..3, "translate":
/// [num, num]}, ...]}` where every `num` may be a JSON number, a decimal
/// string, or an exact binary rational string `"p/2^k"`.
pub fn parse_domain_spec(text: &str) -> Result<(f64, Vec<Piece>), CoveringError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CoveringError::BadSpec(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| CoveringError::BadSpec("top level must be an object".into()))?;
    let alpha = match obj.get("alpha") {
        Some(a) => parse_number(a)?,
        None => 1.0,
    };
    let mut pieces = Vec::new();
    if let Some(rects) = obj.get("rectangles") {
        for r in rects
            .as_array()
            .ok_or_else(|| CoveringError::BadSpec("rectangles must be an array".into()))?
        {
            let g = |k: &str| -> Result<f64, CoveringError> {
                parse_number(
                    r.get(k)
                        .ok_or_else(|| CoveringError::BadSpec(format!("rectangle missing {k}")))?,
                )
            };
            let (x0, y0, x1, y1) = (g("x0")?, g("y0")?, g("x1")?, g("y1")?);
            if !(x1 > x0 && y1 > y0) {
                return Err(CoveringError::BadSpec("empty rectangle".into()));
            }
            pieces.push(Piece::Rect { x0, y0, x1, y1 });
        }
    }
    if let Some(tris) = obj.get("triangles") {
        for t in tris
            .as_array()
            .ok_or_else(|| CoveringError::BadSpec("triangles must be an array".into()))?
        {
            let a = parse_number(
                t.get("a")
                    .ok_or_else(|| CoveringError::BadSpec("triangle missing a".into()))?,
            )?;
            let b = parse_number(
                t.get("b")
                    .ok_or_else(|| CoveringError::BadSpec("triangle missing b".into()))?,
            )?;
            let h = t
                .get("h")
                .ok_or_else(|| CoveringError::BadSpec("triangle missing h".into()))?;
            let h = parse_hfunc(h)?;
            let rotation = t
                .get("rotation")
                .map(|r| r.as_u64().unwrap_or(0) as u8)
                .unwrap_or(0);
            let translate = match t.get("translate") {
                Some(arr) => {
                    let arr = arr
                        .as_array()
                        .ok_or_else(|| CoveringError::BadSpec("translate must be a pair".into()))?;
                    if arr.len() != 2 {
                        return Err(CoveringError::BadSpec("translate must be a pair".into()));
                    }
                    Point {
                        x: parse_number(&arr[0])?,
                        y: parse_number(&arr[1])?,
                    }
                }
                None => Point { x: 0.0, y: 0.0 },
            };
            pieces.push(Piece::Tri {
                tri: TriangularDomain::new(a, b, h)?,
                rotation,
                translate,
            });
        }
    }
    Ok((alpha, pieces))
}

fn parse_hfunc(v: &serde_json::Value) -> Result<HFunc, CoveringError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CoveringError::BadSpec("h must be an object".into()))?;
    if let Some(lin) = obj.get("linear") {
        let c0 = parse_number(
            lin.get("c0")
                .ok_or_else(|| CoveringError::BadSpec("linear h missing c0".into()))?,
        )?;
        let c1 = parse_number(
            lin.get("c1")
                .ok_or_else(|| CoveringError::BadSpec("linear h missing c1".into()))?,
        )?;
        return Ok(HFunc::Linear { c0, c1 });
    }
    if let Some(sp) = obj.get("spline") {
        let get_vec = |k: &str| -> Result<Vec<f64>, CoveringError> {
            sp.get(k)
                .and_then(|x| x.as_array())
                .ok_or_else(|| CoveringError::BadSpec(format!("spline missing {k}")))?
                .iter()
                .map(parse_number)
                .collect()
        };
        let knots = get_vec("knots")?;
        let values = get_vec("values")?;
        let derivs = get_vec("derivs")?;
        if knots.len() < 2 || knots.len() != values.len() || knots.len() != derivs.len() {
            return Err(CoveringError::BadSpec(
                "spline arrays must share a length >= 2".into(),
            ));
        }
        return Ok(HFunc::Spline(MonotoneSpline {
            knots,
            values,
            derivs,
        }));
    }
    Err(CoveringError::BadSpec(
        "h must be {\"linear\": ...} or {\"spline\": ...}".into(),
    ))
}

/// Accept JSON numbers, decimal strings, and `p/2^k` strings.
pub fn parse_number(v: &serde_json::Value) -> Result<f64, CoveringError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CoveringError::BadSpec("bad number".into())),
        serde_json::Value::String(s) => {
            if let Some(d) = Dyadic::parse(s) {
                return Ok(d.to_f64());
            }
            s.trim()
                .parse::<f64>()
                .map_err(|_| CoveringError::BadSpec(format!("cannot parse number {s:?}")))
        }
        _ => Err(CoveringError::BadSpec("expected a number".into())),
    }
}

/// Plain-text solution export: every coordinate as an exact binary rational.
///
/// ```text
/// cellmap v1
/// depth <K>
/// domain <n> <x1> <y1> ... <xn> <yn>
/// cells <count>
/// <label> <off_x> <off_y> <n> <x1> <y1> ... <xn> <yn>
/// untiled <count>
/// <n> <x1> <y1> ...
/// ```
pub fn export_map<S: Scalar>(map: &PiecewiseAffineMap<S>) -> String {
    let mut out = String::new();
    let num = |v: &S| dyadic_str(v.to_f64());
    out.push_str("cellmap v1\n");
    let _ = writeln!(out, "depth {}", map.depth);
    let _ = write!(out, "domain {}", map.domain.verts.len());
    for v in &map.domain.verts {
        let _ = write!(out, " {} {}", num(&v.x), num(&v.y));
    }
    out.push('\n');
    let _ = writeln!(out, "cells {}", map.cells.len());
    for c in &map.cells {
        let _ = write!(
            out,
            "{} {} {} {}",
            c.gradient.label(),
            num(&c.offset.x),
            num(&c.offset.y),
            c.poly.verts.len()
        );
        for v in &c.poly.verts {
            let _ = write!(out, " {} {}", num(&v.x), num(&v.y));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "untiled {}", map.untiled.len());
    for p in &map.untiled {
        let _ = write!(out, "{}", p.verts.len());
        for v in &p.verts {
            let _ = write!(out, " {} {}", num(&v.x), num(&v.y));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImportError(pub String);

impl std::fmt::Display for ImportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "import error: {}", self.0)
    }
}

impl std::error::Error for ImportError {}

/// Inverse of [`export_map`], exact for dyadic-representable coordinates.
pub fn import_map<S: Scalar>(text: &str) -> Result<PiecewiseAffineMap<S>, ImportError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| ImportError("empty".into()))?;
    if header.trim() != "cellmap v1" {
        return Err(ImportError(format!("unknown header {header:?}")));
    }
    let err = |m: &str| ImportError(m.to_string());
    let depth_line = lines.next().ok_or_else(|| err("missing depth"))?;
    let depth: u32 = depth_line
        .strip_prefix("depth ")
        .ok_or_else(|| err("bad depth line"))?
        .trim()
        .parse()
        .map_err(|_| err("bad depth"))?;
    let parse_scalar = |tok: &str| -> Result<S, ImportError> {
        let d = Dyadic::parse(tok).ok_or_else(|| ImportError(format!("bad numeral {tok:?}")))?;
        Ok(S::from_f64_exact(d.to_f64()))
    };
    let parse_poly = |toks: &mut std::str::SplitWhitespace| -> Result<Polygon<S>, ImportError> {
        let n: usize = toks
            .next()
            .ok_or_else(|| err("missing vertex count"))?
            .parse()
            .map_err(|_| err("bad vertex count"))?;
        let mut verts = Vec::with_capacity(n);
        for _ in 0..n {
            let x = parse_scalar(toks.next().ok_or_else(|| err("missing x"))?)?;
            let y = parse_scalar(toks.next().ok_or_else(|| err("missing y"))?)?;
            verts.push(Point::new(x, y));
        }
        Ok(Polygon::new(verts))
    };
    let domain_line = lines.next().ok_or_else(|| err("missing domain"))?;
    let mut toks = domain_line
        .strip_prefix("domain ")
        .ok_or_else(|| err("bad domain line"))?
        .split_whitespace();
    let domain = parse_poly(&mut toks)?;
    let count_line = lines.next().ok_or_else(|| err("missing cells"))?;
    let count: usize = count_line
        .strip_prefix("cells ")
        .ok_or_else(|| err("bad cells line"))?
        .trim()
        .parse()
        .map_err(|_| err("bad cell count"))?;
    let mut cells = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines.next().ok_or_else(|| err("truncated cells"))?;
        let mut toks = line.split_whitespace();
        let label = toks.next().ok_or_else(|| err("missing label"))?;
        let gradient = SignedMatrix::from_label(label)
            .ok_or_else(|| ImportError(format!("unknown label {label:?}")))?;
        let ox = parse_scalar(toks.next().ok_or_else(|| err("missing offset"))?)?;
        let oy = parse_scalar(toks.next().ok_or_else(|| err("missing offset"))?)?;
        let poly = parse_poly(&mut toks)?;
        cells.push(ConvexCell::new(poly, gradient, Point::new(ox, oy)));
    }
    let untiled_line = lines.next().ok_or_else(|| err("missing untiled"))?;
    let ucount: usize = untiled_line
        .strip_prefix("untiled ")
        .ok_or_else(|| err("bad untiled line"))?
        .trim()
        .parse()
        .map_err(|_| err("bad untiled count"))?;
    let mut untiled = Vec::with_capacity(ucount);
    for _ in 0..ucount {
        let line = lines.next().ok_or_else(|| err("truncated untiled"))?;
        let mut toks = line.split_whitespace();
        untiled.push(parse_poly(&mut toks)?);
    }
    Ok(PiecewiseAffineMap {
        cells,
        domain,
        depth,
        untiled,
    })
}
