//! Tube-area estimator: L^2 of the open rho-neighborhood of a segment union,
//! divided by 2 rho.
//!
//! The neighborhood of one segment is a stadium (oriented rectangle plus two
//! end disks), so its vertical slice at fixed x is a single interval. The
//! union slice is a merge of intervals, and the area is the integral of the
//! slice length, done piecewise-adaptively between the finitely many x
//! values where the slice structure can change.

use crate::geom::{Point, Seg, SegmentSet};

/// `L^2(I_rho(S)) / (2 rho)`; for connected rectifiable S this tends to the
/// one-dimensional measure as rho goes to zero.
pub fn minkowski_ratio(set: &SegmentSet, rho: f64) -> f64 {
    assert!(rho > 0.0, "rho must be positive");
    if set.is_empty() {
        return 0.0;
    }
    tube_area(set, rho) / (2.0 * rho)
}

/// Area of the open rho-neighborhood of the union.
pub fn tube_area(set: &SegmentSet, rho: f64) -> f64 {
    let segs = set.segments();
    // Breakpoints: extremes of every stadium plus endpoint abscissae.
    let mut xs: Vec<f64> = Vec::new();
    for s in segs {
        for p in [s.a, s.b] {
            xs.push(p.x - rho);
            xs.push(p.x + rho);
            xs.push(p.x);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 < 1e-15 {
            continue;
        }
        area += adaptive_slice_integral(segs, rho, x0, x1);
    }
    area
}

fn slice_len(segs: &[Seg], rho: f64, x: f64) -> f64 {
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for s in segs {
        if let Some((lo, hi)) = stadium_slice(s, rho, x) {
            iv.push((lo, hi));
        }
    }
    if iv.is_empty() {
        return 0.0;
    }
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let (mut lo, mut hi) = iv[0];
    for &(a, b) in &iv[1..] {
        if a <= hi {
            hi = hi.max(b);
        } else {
            total += hi - lo;
            lo = a;
            hi = b;
        }
    }
    total + (hi - lo)
}

/// Vertical slice of the stadium around `s` at abscissa `x`: one interval,
/// the convex hull in y of the oriented-rectangle slice and the end-disk
/// slices.
fn stadium_slice(s: &Seg, rho: f64, x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut widen = |l: f64, h: f64| {
        lo = lo.min(l);
        hi = hi.max(h);
    };
    for p in [s.a, s.b] {
        let dx = x - p.x;
        if dx.abs() < rho {
            let half = (rho * rho - dx * dx).sqrt();
            widen(p.y - half, p.y + half);
        }
    }
    let d = s.b - s.a;
    let len = d.norm();
    if len > 0.0 {
        let n = Point {
            x: -d.y / len,
            y: d.x / len,
        };
        // Rectangle corners a +- rho n, b +- rho n; slice via the four edges.
        let corners = [
            s.a + n.scale(&rho),
            s.b + n.scale(&rho),
            s.b - n.scale(&rho),
            s.a - n.scale(&rho),
        ];
        let mut ys: Vec<f64> = Vec::new();
        for i in 0..4 {
            let p = corners[i];
            let q = corners[(i + 1) % 4];
            if (p.x - x) * (q.x - x) <= 0.0 && (p.x - q.x).abs() > 0.0 {
                let t = (x - p.x) / (q.x - p.x);
                if (0.0..=1.0).contains(&t) {
                    ys.push(p.y + t * (q.y - p.y));
                }
            }
        }
        if ys.len() >= 2 {
            let l = ys.iter().cloned().fold(f64::INFINITY, f64::min);
            let h = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            widen(l, h);
        }
    }
    if lo.is_finite() {
        Some((lo, hi))
    } else {
        None
    }
}

/// Adaptive Simpson on the slice-length function over one smooth-ish piece.
fn adaptive_slice_integral(segs: &[Seg], rho: f64, x0: f64, x1: f64) -> f64 {
    fn simpson(f0: f64, fm: f64, f1: f64, h: f64) -> f64 {
        h / 6.0 * (f0 + 4.0 * fm + f1)
    }
    fn recurse(
        segs: &[Seg],
        rho: f64,
        x0: f64,
        x1: f64,
        f0: f64,
        fm: f64,
        f1: f64,
        whole: f64,
        depth: u32,
        tol: f64,
    ) -> f64 {
        let xm = 0.5 * (x0 + x1);
        let xl = 0.5 * (x0 + xm);
        let xr = 0.5 * (xm + x1);
        let fl = slice_len(segs, rho, xl);
        let fr = slice_len(segs, rho, xr);
        let left = simpson(f0, fl, fm, xm - x0);
        let right = simpson(fm, fr, f1, x1 - xm);
        if depth >= 28 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(segs, rho, x0, xm, f0, fl, fm, left, depth + 1, tol / 2.0)
            + recurse(segs, rho, xm, x1, fm, fr, f1, right, depth + 1, tol / 2.0)
    }
    let f0 = slice_len(segs, rho, x0);
    let f1 = slice_len(segs, rho, x1);
    let xm = 0.5 * (x0 + x1);
    let fm = slice_len(segs, rho, xm);
    let whole = simpson(f0, fm, f1, x1 - x0);
    // Budget: relative 1e-6 of a crude bound for this piece.
    let tol = 1e-6 * ((x1 - x0) * (f0 + fm + f1 + 6.0 * rho)).max(1e-300);
    recurse(segs, rho, x0, x1, f0, fm, f1, whole, 0, tol)
}
