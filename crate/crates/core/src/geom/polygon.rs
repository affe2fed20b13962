//! Convex polygons: area, orientation, containment, half-plane clipping.

use std::fmt;

use crate::geom::Point;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum PolygonError {
    /// Fewer than three vertices or vanishing area.
    ZeroAreaCell,
    /// A clip intersection is not representable in the scalar type
    /// (only possible with exact coordinates and a non-dyadic crossing).
    InexactIntersection,
}

impl fmt::Display for PolygonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonError::ZeroAreaCell => write!(f, "zero-area cell"),
            PolygonError::InexactIntersection => {
                write!(f, "clip intersection not representable exactly")
            }
        }
    }
}

impl std::error::Error for PolygonError {}

/// Simple polygon, vertices in counterclockwise order.
#[derive(Clone, PartialEq, Debug)]
pub struct Polygon<S> {
    pub verts: Vec<Point<S>>,
}

impl<S: Scalar> Polygon<S> {
    pub fn new(verts: Vec<Point<S>>) -> Self {
        Self { verts }
    }

    pub fn rectangle(x0: S, y0: S, x1: S, y1: S) -> Self {
        Self::new(vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ])
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    /// Twice the signed area (exact in exact scalars).
    pub fn double_signed_area(&self) -> S {
        let mut acc = S::zero();
        let n = self.verts.len();
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            acc = acc + a.cross(b);
        }
        acc
    }

    pub fn signed_area(&self) -> S {
        self.double_signed_area().half()
    }

    /// Shoelace area; errors on degenerate input.
    pub fn area(&self) -> Result<S, PolygonError> {
        if self.is_empty() {
            return Err(PolygonError::ZeroAreaCell);
        }
        let a = self.signed_area();
        if a <= S::zero() {
            return Err(PolygonError::ZeroAreaCell);
        }
        Ok(a)
    }

    /// Area treating empty polygons as zero (useful after clipping).
    pub fn area_or_zero(&self) -> S {
        if self.is_empty() {
            S::zero()
        } else {
            self.signed_area()
        }
    }

    pub fn is_ccw_convex(&self) -> bool {
        let n = self.verts.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            let c = &self.verts[(i + 2) % n];
            let cross = (b.clone().clone() - a.clone()).cross(&(c.clone() - b.clone()));
            if cross < S::zero() {
                return false;
            }
        }
        self.signed_area() > S::zero()
    }

    pub fn reverse(&mut self) {
        self.verts.reverse();
    }

    /// Strict interior test for convex ccw polygons.
    pub fn contains_interior(&self, p: &Point<S>) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            let cr = (b.clone() - a.clone()).cross(&(p.clone() - a.clone()));
            if cr <= S::zero() {
                return false;
            }
        }
        true
    }

    /// Interior-or-boundary test for convex ccw polygons.
    pub fn contains_closed(&self, p: &Point<S>) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            let cr = (b.clone() - a.clone()).cross(&(p.clone() - a.clone()));
            if cr < S::zero() {
                return false;
            }
        }
        true
    }

    pub fn centroid_f64(&self) -> Point<f64> {
        let n = self.verts.len() as f64;
        let mut x = 0.0;
        let mut y = 0.0;
        for v in &self.verts {
            x += v.x.to_f64();
            y += v.y.to_f64();
        }
        Point { x: x / n, y: y / n }
    }

    /// Dyadic interior point: midpoint of (midpoint of first edge, third vertex)
    /// for triangles, or the vertex average computed with powers of two when
    /// the vertex count is a power of two; falls back to an f64-derived point.
    pub fn interior_point(&self) -> Point<S> {
        if self.verts.len() == 3 {
            let m = self.verts[0].midpoint(&self.verts[1]);
            m.midpoint(&self.verts[2])
        } else if self.verts.len() == 4 {
            let m0 = self.verts[0].midpoint(&self.verts[2]);
            let m1 = self.verts[1].midpoint(&self.verts[3]);
            m0.midpoint(&m1)
        } else {
            let c = self.centroid_f64();
            Point::new(S::from_f64_exact(c.x), S::from_f64_exact(c.y))
        }
    }

    pub fn to_f64(&self) -> Polygon<f64> {
        Polygon::new(self.verts.iter().map(|v| v.to_f64()).collect())
    }

    pub fn bbox_f64(&self) -> (f64, f64, f64, f64) {
        let mut x0 = f64::INFINITY;
        let mut y0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for v in &self.verts {
            let p = v.to_f64();
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        (x0, y0, x1, y1)
    }
}

/// Clipping line through `point` with `normal`; keeps the side where
/// `normal . (x - point) >= 0`.
#[derive(Clone, Debug)]
pub struct ClipLine<S> {
    pub point: Point<S>,
    pub normal: Point<S>,
}

impl<S: Scalar> ClipLine<S> {
    pub fn new(point: Point<S>, normal: Point<S>) -> Self {
        Self { point, normal }
    }

    fn side(&self, p: &Point<S>) -> S {
        self.normal.dot(&(p.clone() - self.point.clone()))
    }
}

/// Sutherland–Hodgman clip of a convex polygon against one half-plane.
///
/// The result may be empty. With exact scalars the edge/line crossings must
/// be representable (always true for axis-aligned or diagonal geometry on a
/// dyadic grid); otherwise `InexactIntersection` is returned.
pub fn clip_polygon_halfplane<S: Scalar>(
    poly: &Polygon<S>,
    line: &ClipLine<S>,
) -> Result<Polygon<S>, PolygonError> {
    let n = poly.verts.len();
    let mut out: Vec<Point<S>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = &poly.verts[i];
        let nxt = &poly.verts[(i + 1) % n];
        let sc = line.side(cur);
        let sn = line.side(nxt);
        let cur_in = sc >= S::zero();
        let nxt_in = sn >= S::zero();
        if cur_in {
            out.push(cur.clone());
        }
        if cur_in != nxt_in {
            // Crossing at parameter t = sc / (sc - sn) along cur -> nxt,
            // computed per coordinate so the point stays exact whenever it is
            // representable even if t itself is not.
            let denom = sc.clone() - sn;
            let d = nxt.clone() - cur.clone();
            let px = (d.x * sc.clone())
                .div_exact(&denom)
                .ok_or(PolygonError::InexactIntersection)?;
            let py = (d.y * sc)
                .div_exact(&denom)
                .ok_or(PolygonError::InexactIntersection)?;
            out.push(Point::new(cur.x.clone() + px, cur.y.clone() + py));
        }
    }
    // Drop consecutive duplicates that appear when a vertex lies on the line.
    out.dedup();
    if out.len() >= 2 && out.first() == out.last() {
        out.pop();
    }
    if out.len() < 3 {
        return Ok(Polygon::new(Vec::new()));
    }
    let p = Polygon::new(out);
    if p.signed_area() <= S::zero() {
        return Ok(Polygon::new(Vec::new()));
    }
    Ok(p)
}
