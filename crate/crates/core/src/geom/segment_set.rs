//! Finite unions of segments: length with overlap deduplication, nearest
//! distance queries through a uniform grid, Hausdorff distance.

use std::collections::HashMap;

use crate::geom::Point;

pub type P = Point<f64>;

/// Closed segment, possibly degenerate (a point).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seg {
    pub a: P,
    pub b: P,
}

impl Seg {
    pub fn new(a: P, b: P) -> Self {
        Self { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(&self.b)
    }

    pub fn eval(&self, t: f64) -> P {
        Point {
            x: self.a.x + t * (self.b.x - self.a.x),
            y: self.a.y + t * (self.b.y - self.a.y),
        }
    }
}

pub fn point_segment_distance(p: &P, s: &Seg) -> f64 {
    let d = s.b - s.a;
    let l2 = d.dot(&d);
    if l2 == 0.0 {
        return p.dist(&s.a);
    }
    let t = ((*p - s.a).dot(&d) / l2).clamp(0.0, 1.0);
    p.dist(&s.eval(t))
}

const KEY_SCALE: f64 = 1e9;

fn quantize(v: f64) -> i64 {
    (v * KEY_SCALE).round() as i64
}

/// Direction-and-offset key identifying the supporting line of a segment,
/// quantized at 1e-9. Exact for the dyadic axis-aligned and 45-degree
/// segments the constructions produce.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct LineKey {
    nx: i64,
    ny: i64,
    c: i64,
}

/// Canonical frame of the supporting line: unit normal with positive leading
/// component, offset, and the parameter interval of the segment along the
/// direction `(n.y, -n.x)`. Points recover as `p(t) = n*c + dir*t`.
fn line_frame(s: &Seg) -> Option<(LineKey, P, f64, f64, f64)> {
    let d = s.b - s.a;
    let len = d.norm();
    if len == 0.0 {
        return None;
    }
    let mut n = Point {
        x: -d.y / len,
        y: d.x / len,
    };
    if n.x < 0.0 || (n.x == 0.0 && n.y < 0.0) {
        n = -n;
    }
    let c = n.dot(&s.a);
    let dir = Point { x: n.y, y: -n.x };
    let ta = dir.dot(&s.a);
    let tb = dir.dot(&s.b);
    let key = LineKey {
        nx: quantize(n.x),
        ny: quantize(n.y),
        c: quantize(c),
    };
    Some((key, n, c, ta.min(tb), ta.max(tb)))
}

/// Union of segments with measure-zero overlap after canonicalization.
#[derive(Clone, Debug, Default)]
pub struct SegmentSet {
    segs: Vec<Seg>,
    grid: Option<Grid>,
}

impl SegmentSet {
    pub fn new(raw: Vec<Seg>) -> Self {
        let segs = canonicalize(raw);
        let mut set = Self { segs, grid: None };
        set.grid = Grid::build(&set.segs);
        set
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segments(&self) -> &[Seg] {
        &self.segs
    }

    /// One-dimensional measure; collinear overlaps were merged at build time.
    pub fn length(&self) -> f64 {
        self.segs.iter().map(Seg::len).sum()
    }

    /// Distance from `p` to the union (exact minimum over members).
    pub fn distance(&self, p: &P) -> f64 {
        if self.segs.is_empty() {
            return f64::INFINITY;
        }
        if let Some(grid) = &self.grid {
            grid.distance(&self.segs, p)
        } else {
            self.segs
                .iter()
                .map(|s| point_segment_distance(p, s))
                .fold(f64::INFINITY, f64::min)
        }
    }

    pub fn bbox(&self) -> Option<(f64, f64, f64, f64)> {
        if self.segs.is_empty() {
            return None;
        }
        let mut bb = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for s in &self.segs {
            for p in [s.a, s.b] {
                bb.0 = bb.0.min(p.x);
                bb.1 = bb.1.min(p.y);
                bb.2 = bb.2.max(p.x);
                bb.3 = bb.3.max(p.y);
            }
        }
        Some(bb)
    }
}

/// Merge collinear overlaps: group by supporting line, sort intervals, fuse.
fn canonicalize(raw: Vec<Seg>) -> Vec<Seg> {
    struct Group {
        n: P,
        c: f64,
        intervals: Vec<(f64, f64)>,
    }
    let mut by_line: HashMap<LineKey, Group> = HashMap::new();
    let mut out = Vec::new();
    for s in raw {
        match line_frame(&s) {
            Some((key, n, c, t0, t1)) => {
                by_line
                    .entry(key)
                    .or_insert(Group {
                        n,
                        c,
                        intervals: Vec::new(),
                    })
                    .intervals
                    .push((t0, t1));
            }
            None => out.push(s), // isolated point, keeps distance queries honest
        }
    }
    let mut keys: Vec<LineKey> = by_line.keys().copied().collect();
    keys.sort_by_key(|k| (k.nx, k.ny, k.c));
    for key in keys {
        let mut g = by_line.remove(&key).unwrap();
        g.intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let dir = Point {
            x: g.n.y,
            y: -g.n.x,
        };
        let at = |t: f64| Point {
            x: g.n.x * g.c + dir.x * t,
            y: g.n.y * g.c + dir.y * t,
        };
        let mut iter = g.intervals.into_iter();
        let (mut t0, mut t1) = iter.next().unwrap();
        for (s0, s1) in iter {
            if s0 <= t1 + 1e-12 {
                t1 = t1.max(s1);
            } else {
                out.push(Seg::new(at(t0), at(t1)));
                t0 = s0;
                t1 = s1;
            }
        }
        out.push(Seg::new(at(t0), at(t1)));
    }
    out
}

/// Uniform bucket grid over the segment bounding box.
#[derive(Clone, Debug)]
struct Grid {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Grid {
    fn build(segs: &[Seg]) -> Option<Grid> {
        if segs.len() < 8 {
            return None;
        }
        let mut bb = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        let mut total = 0.0;
        for s in segs {
            for p in [s.a, s.b] {
                bb.0 = bb.0.min(p.x);
                bb.1 = bb.1.min(p.y);
                bb.2 = bb.2.max(p.x);
                bb.3 = bb.3.max(p.y);
            }
            total += s.len();
        }
        let w = (bb.2 - bb.0).max(1e-9);
        let h = (bb.3 - bb.1).max(1e-9);
        let cell = (total / segs.len() as f64).max(w.min(h) / 256.0).max(1e-9);
        let nx = ((w / cell).ceil() as usize + 1).min(512);
        let ny = ((h / cell).ceil() as usize + 1).min(512);
        let cell = (w / nx as f64).max(h / ny as f64).max(1e-9);
        let mut grid = Grid {
            x0: bb.0,
            y0: bb.1,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (idx, s) in segs.iter().enumerate() {
            let (i0, j0) = grid.locate(s.a.x.min(s.b.x), s.a.y.min(s.b.y));
            let (i1, j1) = grid.locate(s.a.x.max(s.b.x), s.a.y.max(s.b.y));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    grid.buckets[j * grid.nx + i].push(idx as u32);
                }
            }
        }
        Some(grid)
    }

    fn locate(&self, x: f64, y: f64) -> (usize, usize) {
        let i = (((x - self.x0) / self.cell).floor() as i64).clamp(0, self.nx as i64 - 1) as usize;
        let j = (((y - self.y0) / self.cell).floor() as i64).clamp(0, self.ny as i64 - 1) as usize;
        (i, j)
    }

    fn distance(&self, segs: &[Seg], p: &P) -> f64 {
        let (ci, cj) = self.locate(p.x, p.y);
        let mut best = f64::INFINITY;
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            // Once a candidate is found, one extra ring guarantees the true
            // minimum (cells outside are farther than `ring - 1` cells away).
            if best.is_finite() && (ring as f64 - 1.0) * self.cell > best {
                break;
            }
            let mut visited_any = false;
            for j in cj.saturating_sub(ring)..=(cj + ring).min(self.ny - 1) {
                for i in ci.saturating_sub(ring)..=(ci + ring).min(self.nx - 1) {
                    let on_ring = j == cj.saturating_sub(ring)
                        || j == (cj + ring).min(self.ny - 1)
                        || i == ci.saturating_sub(ring)
                        || i == (ci + ring).min(self.nx - 1);
                    if ring > 0 && !on_ring {
                        continue;
                    }
                    visited_any = true;
                    for &idx in &self.buckets[j * self.nx + i] {
                        best = best.min(point_segment_distance(p, &segs[idx as usize]));
                    }
                }
            }
            if !visited_any && best.is_finite() {
                break;
            }
        }
        if !best.is_finite() {
            // Point far outside the grid: fall back to the full scan.
            return segs
                .iter()
                .map(|s| point_segment_distance(p, s))
                .fold(f64::INFINITY, f64::min);
        }
        best
    }
}

/// Hausdorff distance between two segment unions.
///
/// With both sets nonempty this is the usual max of the two directed
/// sup-inf distances; an empty side uses the convention d(x, empty) =
/// `empty_value` (the domain diameter in the callers).
pub fn hausdorff_distance(a: &SegmentSet, b: &SegmentSet, empty_value: f64) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => empty_value,
        (false, false) => directed_hausdorff(a, b).max(directed_hausdorff(b, a)),
    }
}

/// sup_{x in A} d(x, B) by branch-and-bound along each segment of A.
///
/// The distance to one segment is convex along a line, so
/// `min_f max(d_f(t0), d_f(t1))` over the features `f` of B bounds the
/// supremum of `d(., B)` on `[t0, t1]` from above; it is tight as soon as a
/// single feature is nearest on the whole subinterval.
fn directed_hausdorff(a: &SegmentSet, b: &SegmentSet) -> f64 {
    let tol = 1e-10;
    let mut best = 0.0f64;
    let upper = |p0: &P, p1: &P| -> f64 {
        b.segments()
            .iter()
            .map(|f| point_segment_distance(p0, f).max(point_segment_distance(p1, f)))
            .fold(f64::INFINITY, f64::min)
    };
    for s in a.segments() {
        best = best.max(b.distance(&s.a)).max(b.distance(&s.b));
        let mut stack = vec![(0.0f64, 1.0f64)];
        while let Some((t0, t1)) = stack.pop() {
            let p0 = s.eval(t0);
            let p1 = s.eval(t1);
            if upper(&p0, &p1) <= best + tol {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            best = best.max(b.distance(&s.eval(tm)));
            if (t1 - t0) * s.len() > 1e-13 {
                stack.push((t0, tm));
                stack.push((tm, t1));
            }
        }
    }
    best
}
