//! Area of the intersection of an open disk with a polygon.
//!
//! Green's theorem over the polygon boundary: each directed edge contributes
//! the signed area of the region swept between the disk center and the
//! circle-clipped edge, with circular-sector terms where the edge leaves the
//! disk. Deterministic, with only floating roundoff (far below the 1e-9 r^2
//! budget the measure checks allow).

use crate::geom::{Point, Polygon};
use crate::scalar::Scalar;

/// Intersection area of `disk(center, radius)` with a ccw polygon.
pub fn disk_polygon_area<S: Scalar>(center: &Point<S>, radius: f64, poly: &Polygon<S>) -> f64 {
    let c = center.to_f64();
    let n = poly.verts.len();
    if n < 3 {
        return 0.0;
    }
    let mut area = 0.0;
    for i in 0..n {
        let a = poly.verts[i].to_f64() - c;
        let b = poly.verts[(i + 1) % n].to_f64() - c;
        area += edge_contribution(a, b, radius);
    }
    area.max(0.0)
}

/// Signed contribution of the triangle (0, a, b) intersected with the disk
/// of radius `r` about the origin.
fn edge_contribution(a: Point<f64>, b: Point<f64>, r: f64) -> f64 {
    let r2 = r * r;
    let ra2 = a.dot(&a);
    let rb2 = b.dot(&b);
    let a_in = ra2 <= r2;
    let b_in = rb2 <= r2;
    let cross = a.cross(&b);
    if a_in && b_in {
        return 0.5 * cross;
    }
    // Chord intersections of segment a->b with the circle.
    let d = b - a;
    let dd = d.dot(&d);
    if dd == 0.0 {
        return if a_in {
            0.5 * cross
        } else {
            sector_area(a, b, r)
        };
    }
    let proj = -(a.dot(&d)) / dd;
    let disc = proj * proj - (ra2 - r2) / dd;
    if disc <= 0.0 {
        // No crossing: whole edge outside, sweep a pure arc.
        return sector_area(a, b, r);
    }
    let sq = disc.sqrt();
    let t1 = proj - sq;
    let t2 = proj + sq;
    let at = |t: f64| Point {
        x: a.x + t * d.x,
        y: a.y + t * d.y,
    };
    match (a_in, b_in) {
        (true, false) => {
            let p = at(t2.clamp(0.0, 1.0));
            0.5 * a.cross(&p) + sector_area(p, b, r)
        }
        (false, true) => {
            let p = at(t1.clamp(0.0, 1.0));
            sector_area(a, p, r) + 0.5 * p.cross(&b)
        }
        (false, false) => {
            if t1 > 0.0 && t2 < 1.0 && t1 < t2 {
                let p = at(t1);
                let q = at(t2);
                sector_area(a, p, r) + 0.5 * p.cross(&q) + sector_area(q, b, r)
            } else {
                sector_area(a, b, r)
            }
        }
        (true, true) => unreachable!(),
    }
}

/// Area of the circular sector of radius `r` swept from direction `a` to
/// direction `b` (signed by orientation).
fn sector_area(a: Point<f64>, b: Point<f64>, r: f64) -> f64 {
    let ang = (a.cross(&b)).atan2(a.dot(&b));
    0.5 * r * r * ang
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon<f64> {
        Polygon::rectangle(x0, y0, x1, y1)
    }

    #[test]
    fn disjoint_disk_gives_zero() {
        let poly = square(10.0, 10.0, 11.0, 11.0);
        let a = disk_polygon_area(&Point::new(0.0, 0.0), 1.0, &poly);
        assert_eq!(a, 0.0);
    }

    #[test]
    fn disk_inside_huge_square_gives_pi() {
        let poly = square(-100.0, -100.0, 100.0, 100.0);
        let a = disk_polygon_area(&Point::new(3.0, -2.0), 1.0, &poly);
        assert!((a - PI).abs() < 1e-9);
    }

    #[test]
    fn disk_on_halfplane_edge_gives_half_pi() {
        let poly = square(0.0, -100.0, 200.0, 100.0);
        let a = disk_polygon_area(&Point::new(0.0, 7.0), 1.0, &poly);
        assert!((a - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn quarter_disk_at_corner() {
        let poly = square(0.0, 0.0, 50.0, 50.0);
        let a = disk_polygon_area(&Point::new(0.0, 0.0), 2.0, &poly);
        assert!((a - PI).abs() < 1e-9);
    }

    #[test]
    fn matches_polygon_area_for_big_disk() {
        let poly = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.75),
        ]);
        let a = disk_polygon_area(&Point::new(0.4, 0.2), 10.0, &poly);
        assert!((a - poly.area().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_fine_grid_sampling() {
        let poly = Polygon::new(vec![
            Point::new(-0.4, -0.9),
            Point::new(1.3, -0.2),
            Point::new(0.8, 1.1),
            Point::new(-0.7, 0.6),
        ]);
        let c = Point::new(0.15, 0.1);
        let r = 0.8;
        let exact = disk_polygon_area(&c, r, &poly);
        let n = 1500;
        let mut hits = 0u64;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(
                    -1.0 + 2.6 * (i as f64 + 0.5) / n as f64,
                    -1.0 + 2.6 * (j as f64 + 0.5) / n as f64,
                );
                if (p - c).norm() < r && poly.contains_interior(&p) {
                    hits += 1;
                }
            }
        }
        let approx = hits as f64 * (2.6 / n as f64) * (2.6 / n as f64);
        assert!((exact - approx).abs() < 5e-3, "exact={exact} grid={approx}");
    }
}
