//! Square coverings of domains: greedy covering of rectangles, the
//! self-similar q/u/r covering of triangular domains, and the dyadic
//! selection covering of arbitrary polygons. A covering is the scaffold a
//! global solution is assembled on, one rescaled building block per square.

use std::fmt;

use crate::geom::{point_segment_distance, Point, Polygon, Seg};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum CoveringError {
    MalformedTriangle(String),
    NotCompatible {
        alpha: f64,
        ratio: f64,
    },
    Overlap {
        first: usize,
        second: usize,
        area: f64,
    },
    BadSpec(String),
    EmptyCovering,
}

impl fmt::Display for CoveringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoveringError::MalformedTriangle(msg) => write!(f, "malformed triangle: {msg}"),
            CoveringError::NotCompatible { alpha, ratio } => write!(
                f,
                "triangle fails the compatibility inequality at alpha={alpha}: 2*max(r_B,r_H)^(alpha+1)={ratio} >= 1"
            ),
            CoveringError::Overlap {
                first,
                second,
                area,
            } => write!(f, "pieces {first} and {second} overlap (area {area:.3e})"),
            CoveringError::BadSpec(msg) => write!(f, "invalid domain spec: {msg}"),
            CoveringError::EmptyCovering => write!(f, "empty covering"),
        }
    }
}

impl std::error::Error for CoveringError {}

/// Letter of a covering word: upper or right sub-triangle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    U,
    R,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::U => 'u',
            Letter::R => 'r',
        }
    }
}

/// Where a placed square came from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// Index in the greedy rectangle sequence.
    RectangleStep(u32),
    /// Word over {u, r}, outermost operator first.
    TriangleWord(Vec<Letter>),
    /// Selection level of the dyadic covering.
    VitaliLevel(u32),
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::RectangleStep(i) => format!("step{i}"),
            Provenance::TriangleWord(w) => {
                if w.is_empty() {
                    "q".to_string()
                } else {
                    w.iter().map(|l| l.as_char()).collect()
                }
            }
            Provenance::VitaliLevel(n) => format!("level{n}"),
        }
    }
}

/// Axis-aligned placed square (rotation is a quarter-turn count kept for the
/// file format; the building block is invariant under it).
#[derive(Clone, Debug)]
pub struct PlacedSquare<S> {
    pub min: Point<S>,
    pub side: S,
    pub rotation: u8,
    pub tag: Provenance,
}

impl<S: Scalar> PlacedSquare<S> {
    pub fn center(&self) -> Point<S> {
        Point::new(
            self.min.x.clone() + self.side.half(),
            self.min.y.clone() + self.side.half(),
        )
    }

    pub fn polygon(&self) -> Polygon<S> {
        Polygon::rectangle(
            self.min.x.clone(),
            self.min.y.clone(),
            self.min.x.clone() + self.side.clone(),
            self.min.y.clone() + self.side.clone(),
        )
    }

    pub fn boundary_segs(&self) -> [Seg; 4] {
        let x0 = self.min.x.to_f64();
        let y0 = self.min.y.to_f64();
        let s = self.side.to_f64();
        let p = |x, y| Point { x, y };
        [
            Seg::new(p(x0, y0), p(x0 + s, y0)),
            Seg::new(p(x0 + s, y0), p(x0 + s, y0 + s)),
            Seg::new(p(x0 + s, y0 + s), p(x0, y0 + s)),
            Seg::new(p(x0, y0 + s), p(x0, y0)),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Covering<S> {
    pub squares: Vec<PlacedSquare<S>>,
    /// Polygonal outline of the covered domain.
    pub domain: Polygon<S>,
    /// Area not covered by the listed squares (0 for finite exact coverings;
    /// a positive bound for truncated ones).
    pub residual_area: f64,
    pub complete: bool,
    /// Upper bound on the diameter of any square the full covering would
    /// place beyond the generated ones (0 when the covering is complete).
    pub omitted_diameter: f64,
}

impl<S: Scalar> Covering<S> {
    pub fn sum_sides(&self) -> S {
        let mut acc = S::zero();
        for sq in &self.squares {
            acc = acc + sq.side.clone();
        }
        acc
    }

    pub fn to_f64(&self) -> Covering<f64> {
        Covering {
            squares: self
                .squares
                .iter()
                .map(|sq| PlacedSquare {
                    min: sq.min.to_f64(),
                    side: sq.side.to_f64(),
                    rotation: sq.rotation,
                    tag: sq.tag.clone(),
                })
                .collect(),
            domain: self.domain.to_f64(),
            residual_area: self.residual_area,
            complete: self.complete,
            omitted_diameter: self.omitted_diameter,
        }
    }
}

/// Greedy covering of an `a x b` rectangle (corner at the origin) by maximal
/// squares placed at minimal coordinates. For commensurable sides it is
/// finite and exact; the sum of sides never exceeds `a + b`, with equality
/// only in the incommensurable limit (integers give `a + b - gcd`).
pub fn rectangle_covering<S: Scalar>(a: S, b: S, max_squares: usize) -> Covering<S> {
    assert!(a >= b && b > S::zero(), "sides must satisfy a >= b > 0");
    let zero = S::zero();
    let mut squares = Vec::new();
    let (mut x0, mut y0) = (zero.clone(), zero.clone());
    let (x1, y1) = (a.clone(), b.clone());
    let mut step = 0u32;
    let mut exhausted = false;
    while squares.len() < max_squares {
        let w = x1.clone() - x0.clone();
        let h = y1.clone() - y0.clone();
        if w == zero || h == zero {
            exhausted = true;
            break;
        }
        let side = S::min_val(w.clone(), h.clone());
        squares.push(PlacedSquare {
            min: Point::new(x0.clone(), y0.clone()),
            side: side.clone(),
            rotation: 0,
            tag: Provenance::RectangleStep(step),
        });
        step += 1;
        if h < w {
            x0 = x0 + side;
        } else {
            y0 = y0 + side;
        }
    }
    if !exhausted {
        let w = x1.clone() - x0.clone();
        let h = y1.clone() - y0.clone();
        exhausted = w == zero || h == zero;
    }
    let rw = (x1.clone() - x0).to_f64();
    let rh = (y1.clone() - y0).to_f64();
    Covering {
        squares,
        domain: Polygon::rectangle(zero.clone(), zero, a, b),
        residual_area: if exhausted { 0.0 } else { (rw * rh).max(0.0) },
        complete: exhausted,
        omitted_diameter: if exhausted { 0.0 } else { rw.hypot(rh) },
    }
}

/// Greedy covering of the rectangle `[x0, x1] x [y0, y1]` in place
/// (orientation handled by transposing the normalized covering).
pub fn rect_region_covering<S: Scalar>(
    x0: S,
    y0: S,
    x1: S,
    y1: S,
    max_squares: usize,
) -> Covering<S> {
    let w = x1.clone() - x0.clone();
    let h = y1.clone() - y0.clone();
    let transpose = h > w;
    let base = if transpose {
        rectangle_covering(h.clone(), w.clone(), max_squares)
    } else {
        rectangle_covering(w.clone(), h.clone(), max_squares)
    };
    let squares = base
        .squares
        .into_iter()
        .map(|sq| PlacedSquare {
            min: if transpose {
                Point::new(x0.clone() + sq.min.y, y0.clone() + sq.min.x)
            } else {
                Point::new(x0.clone() + sq.min.x, y0.clone() + sq.min.y)
            },
            ..sq
        })
        .collect();
    Covering {
        squares,
        domain: Polygon::rectangle(x0, y0, x1, y1),
        residual_area: base.residual_area,
        complete: base.complete,
        omitted_diameter: base.omitted_diameter,
    }
}

/// Quarter-turn about the origin followed by a translation, applied to all
/// squares and the domain outline.
pub fn transform_covering<S: Scalar>(
    cov: &Covering<S>,
    quarter_turns: u8,
    translate: Point<S>,
) -> Covering<S> {
    let r = quarter_turns % 4;
    let rot_min = |min: &Point<S>, side: &S| -> Point<S> {
        match r {
            0 => min.clone(),
            1 => Point::new(-(min.y.clone() + side.clone()), min.x.clone()),
            2 => Point::new(
                -(min.x.clone() + side.clone()),
                -(min.y.clone() + side.clone()),
            ),
            _ => Point::new(min.y.clone(), -(min.x.clone() + side.clone())),
        }
    };
    let rot_pt = |p: &Point<S>| -> Point<S> {
        match r {
            0 => p.clone(),
            1 => Point::new(-p.y.clone(), p.x.clone()),
            2 => Point::new(-p.x.clone(), -p.y.clone()),
            _ => Point::new(p.y.clone(), -p.x.clone()),
        }
    };
    let squares = cov
        .squares
        .iter()
        .map(|sq| PlacedSquare {
            min: rot_min(&sq.min, &sq.side) + translate.clone(),
            side: sq.side.clone(),
            rotation: (sq.rotation + r) % 4,
            tag: sq.tag.clone(),
        })
        .collect();
    let mut verts: Vec<Point<S>> = cov
        .domain
        .verts
        .iter()
        .map(|v| rot_pt(v) + translate.clone())
        .collect();
    if Polygon::new(verts.clone()).signed_area() < S::zero() {
        verts.reverse();
    }
    Covering {
        squares,
        domain: Polygon::new(verts),
        residual_area: cov.residual_area,
        complete: cov.complete,
        omitted_diameter: cov.omitted_diameter,
    }
}

/// Height profile of a triangular domain: strictly decreasing and C^1.
#[derive(Clone, Debug)]
pub enum HFunc {
    Linear { c0: f64, c1: f64 },
    Spline(MonotoneSpline),
}

/// Cubic Hermite interpolant given knots, values and derivatives.
#[derive(Clone, Debug)]
pub struct MonotoneSpline {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl MonotoneSpline {
    fn segment(&self, t: f64) -> usize {
        let n = self.knots.len();
        let mut i = 0;
        while i + 2 < n && t >= self.knots[i + 1] {
            i += 1;
        }
        i
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let w = t1 - t0;
        let s = (t - t0) / w;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * w, self.derivs[i + 1] * w);
        let s2 = s * s;
        let s3 = s2 * s;
        v0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * (s3 - 2.0 * s2 + s)
            + v1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * (s3 - s2)
    }

    fn eval_prime(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let w = t1 - t0;
        let s = (t - t0) / w;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * w, self.derivs[i + 1] * w);
        let ds = v0 * (6.0 * s * s - 6.0 * s)
            + d0 * (3.0 * s * s - 4.0 * s + 1.0)
            + v1 * (-6.0 * s * s + 6.0 * s)
            + d1 * (3.0 * s * s - 2.0 * s);
        ds / w
    }

    /// Exact range of the (piecewise quadratic) derivative over one knot
    /// interval intersected with `[lo, hi]`.
    fn prime_range_on(&self, i: usize, lo: f64, hi: f64) -> (f64, f64) {
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let a = lo.max(t0);
        let b = hi.min(t1);
        let mut mn = self.eval_prime(a).min(self.eval_prime(b));
        let mut mx = self.eval_prime(a).max(self.eval_prime(b));
        // Vertex of the quadratic derivative in local coordinates.
        let w = t1 - t0;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * w, self.derivs[i + 1] * w);
        let qa = 6.0 * v0 + 3.0 * d0 - 6.0 * v1 + 3.0 * d1;
        let qb = -6.0 * v0 - 4.0 * d0 + 6.0 * v1 - 2.0 * d1;
        if qa != 0.0 {
            let s_v = -qb / (2.0 * qa);
            let t_v = t0 + s_v * w;
            if t_v > a && t_v < b {
                let val = self.eval_prime(t_v);
                mn = mn.min(val);
                mx = mx.max(val);
            }
        }
        (mn, mx)
    }
}

/// Region under a strictly decreasing C^1 graph over `[a, b]`, bounded below
/// by the level `h(b)`.
#[derive(Clone, Debug)]
pub struct TriangularDomain {
    pub a: f64,
    pub b: f64,
    pub h: HFunc,
}

impl TriangularDomain {
    pub fn new(a: f64, b: f64, h: HFunc) -> Result<Self, CoveringError> {
        if !(a < b) {
            return Err(CoveringError::MalformedTriangle(format!(
                "need a < b, got [{a}, {b}]"
            )));
        }
        let t = Self { a, b, h };
        let (_, mx) = t.h_prime_range();
        if !(mx < 0.0) {
            return Err(CoveringError::MalformedTriangle(format!(
                "h' must be negative on [a, b] (max h' = {mx})"
            )));
        }
        Ok(t)
    }

    pub fn h_at(&self, t: f64) -> f64 {
        match &self.h {
            HFunc::Linear { c0, c1 } => c0 + c1 * t,
            HFunc::Spline(s) => s.eval(t),
        }
    }

    pub fn h_prime_at(&self, t: f64) -> f64 {
        match &self.h {
            HFunc::Linear { c1, .. } => *c1,
            HFunc::Spline(s) => s.eval_prime(t),
        }
    }

    /// (min, max) of h' on [a, b], exact per quadratic piece.
    pub fn h_prime_range(&self) -> (f64, f64) {
        match &self.h {
            HFunc::Linear { c1, .. } => (*c1, *c1),
            HFunc::Spline(s) => {
                let mut mn = f64::INFINITY;
                let mut mx = f64::NEG_INFINITY;
                for i in 0..s.knots.len() - 1 {
                    if s.knots[i + 1] <= self.a || s.knots[i] >= self.b {
                        continue;
                    }
                    let (lo, hi) = s.prime_range_on(i, self.a, self.b);
                    mn = mn.min(lo);
                    mx = mx.max(hi);
                }
                (mn, mx)
            }
        }
    }

    /// `c1 = -min h'` (steepest slope magnitude).
    pub fn c1(&self) -> f64 {
        -self.h_prime_range().0
    }

    /// `c2 = -max h'` (gentlest slope magnitude).
    pub fn c2(&self) -> f64 {
        -self.h_prime_range().1
    }

    pub fn base(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.h_at(self.a) - self.h_at(self.b)
    }

    pub fn area(&self) -> f64 {
        // Integral of h - h(b) over [a, b] (exact for linear profiles).
        let hb = self.h_at(self.b);
        crate::quad::integrate(|t| self.h_at(t) - hb, self.a, self.b, 1e-12)
    }

    /// Polygonal outline, hypotenuse sampled with `samples` points
    /// (2 suffices for a linear profile). The corner (b, h(b)) belongs to
    /// both the base and the hypotenuse and is emitted once.
    pub fn outline(&self, samples: usize) -> Polygon<f64> {
        let hb = self.h_at(self.b);
        let mut verts = vec![Point { x: self.a, y: hb }, Point { x: self.b, y: hb }];
        let n = samples.max(2);
        for i in 1..n {
            let t = self.b - (self.b - self.a) * i as f64 / (n - 1) as f64;
            verts.push(Point {
                x: t,
                y: self.h_at(t),
            });
        }
        Polygon::new(verts)
    }
}

/// The corner square and the two residual triangular domains of one
/// splitting step: `q` is the maximal square anchored at the lower-left
/// corner, `u` sits above it, `r` to its right.
pub fn triangle_split(
    t: &TriangularDomain,
) -> Result<(PlacedSquare<f64>, TriangularDomain, TriangularDomain), CoveringError> {
    let hb = t.h_at(t.b);
    // Root of h(x) = x + h(b) - a: strictly decreasing versus strictly
    // increasing, so the bracket is guaranteed; bisection to 1e-12.
    let g = |x: f64| t.h_at(x) - (x + hb - t.a);
    let (mut lo, mut hi) = (t.a, t.b);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(CoveringError::MalformedTriangle(
            "corner-square root not bracketed".into(),
        ));
    }
    for _ in 0..200 {
        if hi - lo < 1e-13 * (1.0 + t.b.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x10 = 0.5 * (lo + hi);
    let side = x10 - t.a;
    if side <= 0.0 {
        return Err(CoveringError::MalformedTriangle(
            "degenerate corner square".into(),
        ));
    }
    let q = PlacedSquare {
        min: Point { x: t.a, y: hb },
        side,
        rotation: 0,
        tag: Provenance::TriangleWord(Vec::new()),
    };
    let upper = TriangularDomain {
        a: t.a,
        b: x10,
        h: t.h.clone(),
    };
    let right = TriangularDomain {
        a: x10,
        b: t.b,
        h: t.h.clone(),
    };
    Ok((q, upper, right))
}

/// All corner squares of the word expansion up to step `m_max`: one square
/// at step 0 and `2^m` squares at step m, tagged with their word
/// (lexicographic order within a step, `u` before `r`).
pub fn triangle_covering(t: &TriangularDomain, m_max: u32) -> Result<Covering<f64>, CoveringError> {
    let mut squares = Vec::new();
    let mut frontier: Vec<(TriangularDomain, Vec<Letter>)> = vec![(t.clone(), Vec::new())];
    for _step in 0..=m_max {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (tri, word) in frontier.iter() {
            let (mut q, upper, right) = triangle_split(tri)?;
            q.tag = Provenance::TriangleWord(word.clone());
            squares.push(q);
            let mut wu = vec![Letter::U];
            wu.extend_from_slice(word);
            let mut wr = vec![Letter::R];
            wr.extend_from_slice(word);
            next.push((upper, wu));
            next.push((right, wr));
        }
        // Lexicographic order within the next step: all u-prefixed words
        // (in previous order) precede all r-prefixed ones.
        next.sort_by(|a, b| word_key(&a.1).cmp(&word_key(&b.1)));
        frontier = next;
    }
    let covered: f64 = squares.iter().map(|s| s.side * s.side).sum();
    let residual = (t.area() - covered).max(0.0);
    // Squares placed after the last generated step live inside the frontier
    // triangles; the next corner square bounds all deeper ones.
    let (r_b, r_h) = covering_ratios(t);
    let omitted_side = frontier
        .iter()
        .map(|(tri, _)| (r_b * tri.base()).min(r_h * tri.height()))
        .fold(0.0f64, f64::max);
    Ok(Covering {
        squares,
        domain: t.outline(match t.h {
            HFunc::Linear { .. } => 2,
            HFunc::Spline(_) => 64,
        }),
        residual_area: residual,
        complete: false,
        omitted_diameter: omitted_side * std::f64::consts::SQRT_2,
    })
}

fn word_key(w: &[Letter]) -> Vec<u8> {
    w.iter()
        .map(|l| match l {
            Letter::U => 0u8,
            Letter::R => 1u8,
        })
        .collect()
}

/// Covering ratios of a triangular domain: the corner-square side is at most
/// `r_H` times the height and `r_B` times the base.
pub fn covering_ratios(t: &TriangularDomain) -> (f64, f64) {
    let c1 = t.c1();
    let c2 = t.c2();
    let r_b = 1.0 / (1.0 + 1.0 / c1);
    let r_h = 1.0 / (1.0 + c2);
    (r_b, r_h)
}

/// Compatibility inequality `2 max(r_B, r_H)^(alpha+1) < 1` that makes the
/// per-step energy series geometric with ratio < 1.
pub fn alpha_compatible(t: &TriangularDomain, alpha: f64) -> (bool, f64, f64) {
    let (r_b, r_h) = covering_ratios(t);
    let ratio = 2.0 * r_b.max(r_h).powf(alpha + 1.0);
    (ratio < 1.0, r_b, r_h)
}

/// Dyadic selection covering of a simple polygon: at stage n, grid squares
/// of diagonal below `2^-n` are selected when they are not inside an earlier
/// square and their center clears the inward band `{d(., boundary) > 2^-n}`
/// within half a diagonal. Selected squares always lie inside the domain,
/// interiors are exactly disjoint (nested aligned grids), and only finitely
/// many squares meet any compact subset.
pub fn vitali_dyadic_covering<S: Scalar>(domain: &Polygon<S>, n_max: u32) -> Covering<S> {
    let dom64 = domain.to_f64();
    let boundary: Vec<Seg> = {
        let n = dom64.verts.len();
        (0..n)
            .map(|i| Seg::new(dom64.verts[i], dom64.verts[(i + 1) % n]))
            .collect()
    };
    let dist_boundary = |p: &Point<f64>| -> f64 {
        boundary
            .iter()
            .map(|s| point_segment_distance(p, s))
            .fold(f64::INFINITY, f64::min)
    };
    let (bx0, by0, bx1, by1) = dom64.bbox_f64();
    let mut selected: Vec<std::collections::HashSet<(i64, i64)>> = Vec::new();
    let mut squares = Vec::new();
    for n in 0..=n_max {
        let grid_exp = -(n as i32 + 1);
        let g = (grid_exp as f64).exp2();
        let eps = (-(n as f64)).exp2();
        let diag = std::f64::consts::SQRT_2 * g;
        let i0 = (bx0 / g).floor() as i64;
        let i1 = (bx1 / g).ceil() as i64;
        let j0 = (by0 / g).floor() as i64;
        let j1 = (by1 / g).ceil() as i64;
        let mut level_set = std::collections::HashSet::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                // Skip children of previously selected squares (grids nest).
                let inside_previous = selected.iter().enumerate().any(|(m, set)| {
                    let shift = n - m as u32;
                    set.contains(&(i >> shift, j >> shift))
                });
                if inside_previous {
                    continue;
                }
                let center = Point {
                    x: (i as f64 + 0.5) * g,
                    y: (j as f64 + 0.5) * g,
                };
                if !polygon_contains_evenodd(&dom64, &center) {
                    continue;
                }
                if dist_boundary(&center) + diag / 2.0 <= eps {
                    continue;
                }
                level_set.insert((i, j));
                squares.push(PlacedSquare {
                    min: Point::new(
                        S::from_int(i).mul_pow2(grid_exp),
                        S::from_int(j).mul_pow2(grid_exp),
                    ),
                    side: S::one().mul_pow2(grid_exp),
                    rotation: 0,
                    tag: Provenance::VitaliLevel(n),
                });
            }
        }
        selected.push(level_set);
    }
    let covered: f64 = squares
        .iter()
        .map(|s| {
            let v = s.side.to_f64();
            v * v
        })
        .sum();
    let area = dom64.signed_area().abs();
    Covering {
        squares,
        domain: domain.clone(),
        residual_area: (area - covered).max(0.0),
        complete: false,
        // Deeper selections have diagonals below the next stage bound.
        omitted_diameter: (-(n_max as f64 + 1.0)).exp2(),
    }
}

/// Even-odd containment for simple polygons.
pub fn polygon_contains_evenodd(poly: &Polygon<f64>, p: &Point<f64>) -> bool {
    let n = poly.verts.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly.verts[i];
        let b = poly.verts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) && p.x < (a.x - b.x) * (p.y - b.y) / (a.y - b.y) + b.x {
            inside = !inside;
        }
    }
    inside
}

/// One piece of a compatible domain.
#[derive(Clone, Debug)]
pub enum Piece {
    Rect {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },
    Tri {
        tri: TriangularDomain,
        /// Quarter-turns applied about the origin before translation.
        rotation: u8,
        translate: Point<f64>,
    },
}

impl Piece {
    /// Outline in world coordinates (convex for rectangles and linear
    /// profiles; spline hypotenuses are sampled, so the outline is the
    /// polygonal approximation the overlap check operates on).
    pub fn outline(&self) -> Polygon<f64> {
        match self {
            Piece::Rect { x0, y0, x1, y1 } => Polygon::rectangle(*x0, *y0, *x1, *y1),
            Piece::Tri {
                tri,
                rotation,
                translate,
            } => {
                let base = tri.outline(match tri.h {
                    HFunc::Linear { .. } => 2,
                    HFunc::Spline(_) => 64,
                });
                let mut verts: Vec<Point<f64>> = base
                    .verts
                    .iter()
                    .map(|v| rotate_quarter(*v, *rotation) + *translate)
                    .collect();
                if Polygon::new(verts.clone()).signed_area() < 0.0 {
                    verts.reverse();
                }
                Polygon::new(verts)
            }
        }
    }
}

pub fn rotate_quarter(p: Point<f64>, quarter_turns: u8) -> Point<f64> {
    match quarter_turns % 4 {
        0 => p,
        1 => Point { x: -p.y, y: p.x },
        2 => Point { x: -p.x, y: -p.y },
        _ => Point { x: p.y, y: -p.x },
    }
}

/// Validated union of rectangles and compatible triangular pieces.
#[derive(Clone, Debug)]
pub struct CompatibleDomain {
    pub alpha: f64,
    pub pieces: Vec<Piece>,
}

/// Validate piecewise structure: pairwise interior-disjoint pieces, each
/// triangle compatible at the requested exponent.
pub fn assemble_compatible(
    alpha: f64,
    pieces: Vec<Piece>,
) -> Result<CompatibleDomain, CoveringError> {
    if pieces.is_empty() {
        return Err(CoveringError::BadSpec("no pieces".into()));
    }
    for piece in &pieces {
        if let Piece::Tri { tri, .. } = piece {
            let (ok, r_b, r_h) = alpha_compatible(tri, alpha);
            if !ok {
                let ratio = 2.0 * r_b.max(r_h).powf(alpha + 1.0);
                return Err(CoveringError::NotCompatible { alpha, ratio });
            }
        }
    }
    let outlines: Vec<Polygon<f64>> = pieces.iter().map(Piece::outline).collect();
    for i in 0..outlines.len() {
        for j in i + 1..outlines.len() {
            let area = convex_intersection_area(&outlines[i], &outlines[j]);
            if area >= 1e-12 {
                return Err(CoveringError::Overlap {
                    first: i,
                    second: j,
                    area,
                });
            }
        }
    }
    Ok(CompatibleDomain { alpha, pieces })
}

/// Intersection area with a convex clipper (the subject may be any simple
/// polygon).
fn convex_intersection_area(subject: &Polygon<f64>, clipper: &Polygon<f64>) -> f64 {
    let mut poly = subject.clone();
    let n = clipper.verts.len();
    for i in 0..n {
        if poly.is_empty() {
            return 0.0;
        }
        let a = clipper.verts[i];
        let b = clipper.verts[(i + 1) % n];
        let edge = b - a;
        let normal = Point {
            x: -edge.y,
            y: edge.x,
        };
        let line = crate::geom::ClipLine::new(a, normal);
        poly = crate::geom::clip_polygon_halfplane(&poly, &line).expect("float clip is total");
    }
    poly.area_or_zero().abs()
}
