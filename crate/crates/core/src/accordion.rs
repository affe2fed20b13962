//! The accordion map: a continuous piecewise-affine solution on nested
//! double frames whose gradient jumps accumulate on a family of concentric
//! squares. With a radius sequence tending to zero the square fills in and
//! the jump support has infinite total length; with radii bottoming out at a
//! positive level, the alternating radius series oscillates and no boundary
//! value on the inner square is consistent with both parities.
//!
//! Each double frame between max-norm radii `s < t < l` splits into sixteen
//! trapezoids; the map is `sign A_i x + (0, beta)` on the inner ring and
//! `sign A_i x + (0, 2t + beta)` on the outer one, with `beta` chained so
//! consecutive frames agree on the shared square.

use std::fmt;

use crate::cells::{ConvexCell, PiecewiseAffineMap};
use crate::geom::{Point, Polygon};
use crate::matrix::SignedMatrix;

#[derive(Clone, Debug, PartialEq)]
pub enum AccordionError {
    NotDecreasing { index: usize },
    FirstTermNotOne,
    TooFewFrames,
}

impl fmt::Display for AccordionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccordionError::NotDecreasing { index } => {
                write!(
                    f,
                    "radius sequence not strictly decreasing at index {index}"
                )
            }
            AccordionError::FirstTermNotOne => write!(f, "radius sequence must start at 1"),
            AccordionError::TooFewFrames => write!(f, "need at least one frame"),
        }
    }
}

impl std::error::Error for AccordionError {}

/// Radius sequence families (1-based index).
#[derive(Clone, Debug)]
pub enum Sequence {
    /// `s_j = 1/j` (vanishing limit, divergent jump length).
    Harmonic,
    /// `s_j = 1/2 + 1/(2j)` (limit 1/2; the alternating series oscillates).
    LimitHalf,
    /// `s_j = q^(j-1)` for `0 < q < 1`.
    Geometric {
        q: f64,
    },
    Custom(Vec<f64>),
}

impl Sequence {
    pub fn value(&self, j: usize) -> f64 {
        assert!(j >= 1);
        match self {
            Sequence::Harmonic => 1.0 / j as f64,
            Sequence::LimitHalf => 0.5 + 0.5 / j as f64,
            Sequence::Geometric { q } => q.powi(j as i32 - 1),
            Sequence::Custom(v) => v[j - 1],
        }
    }
}

#[derive(Clone, Debug)]
pub struct AccordionSpec {
    pub seq: Sequence,
    /// Number of double frames (frame n uses radii `s_{2n-1} > s_{2n} > s_{2n+1}`).
    pub frames: usize,
}

impl AccordionSpec {
    pub fn new(seq: Sequence, frames: usize) -> Result<Self, AccordionError> {
        if frames == 0 {
            return Err(AccordionError::TooFewFrames);
        }
        let spec = Self { seq, frames };
        if (spec.s(1) - 1.0).abs() > 1e-15 {
            return Err(AccordionError::FirstTermNotOne);
        }
        for j in 1..=2 * frames + 1 {
            let a = spec.s(j);
            let b = spec.s(j + 1);
            if !(b > 0.0 && b < a) {
                return Err(AccordionError::NotDecreasing { index: j });
            }
        }
        Ok(spec)
    }

    pub fn s(&self, j: usize) -> f64 {
        self.seq.value(j)
    }

    /// Alternating partial sum `sum_{k=1}^m (-1)^(k+1) s_k`.
    pub fn alternating_partial_sum(&self, m: usize) -> f64 {
        let mut acc = 0.0;
        for k in 1..=m {
            let term = self.s(k);
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Closed form of the map's second component at `(s_{2n}, 0)`.
    pub fn axis_value_even(&self, n: usize) -> f64 {
        -self.s(2 * n) + 2.0 * self.alternating_partial_sum(2 * n - 1)
    }

    /// Closed form of the map's second component at `(s_{2n+1}, 0)`.
    pub fn axis_value_odd(&self, n: usize) -> f64 {
        self.s(2 * n + 1) + 2.0 * self.alternating_partial_sum(2 * n)
    }

    /// Length of the gradient-jump support contributed by the frame squares
    /// after `n_frames` frames: `8 sum_{n=2}^{N} s_{n+1}`.
    pub fn jump_boundary_length(&self, n_frames: usize) -> f64 {
        let mut acc = 0.0;
        for n in 2..=n_frames {
            acc += self.s(n + 1);
        }
        8.0 * acc
    }

    /// Frame offsets `beta` for frames `1, 3, 5, ...` (continuity chaining
    /// normalized to value `(0, 1)` at `(1, 0)`).
    pub fn frame_betas(&self) -> Vec<f64> {
        let mut betas = Vec::with_capacity(self.frames);
        let mut beta = 1.0 + self.s(1) - 2.0 * self.s(2);
        betas.push(beta);
        for n in 1..self.frames {
            let j = 2 * n - 1;
            beta += 2.0 * (self.s(j + 2) - self.s(j + 3));
            betas.push(beta);
        }
        betas
    }
}

/// Build the map on the union of the frames (an annulus around the origin).
pub fn build_accordion(spec: &AccordionSpec) -> Result<PiecewiseAffineMap<f64>, AccordionError> {
    let betas = spec.frame_betas();
    let mut cells = Vec::with_capacity(16 * spec.frames);
    for (n, beta) in betas.iter().enumerate() {
        let j = 2 * n + 1;
        let (s, t, l) = (spec.s(j + 2), spec.s(j + 1), spec.s(j));
        push_ring(&mut cells, s, t, RingKind::Inner, *beta);
        push_ring(&mut cells, t, l, RingKind::Outer { t }, *beta);
    }
    let out = spec.s(1);
    let inner = spec.s(2 * spec.frames + 1);
    Ok(PiecewiseAffineMap {
        cells,
        domain: Polygon::rectangle(-out, -out, out, out),
        depth: spec.frames as u32,
        untiled: vec![Polygon::rectangle(-inner, -inner, inner, inner)],
    })
}

enum RingKind {
    Inner,
    Outer { t: f64 },
}

/// The eight trapezoids of one ring between max-norm radii `r0 < r1`.
/// Labels follow the reference layout: on the inner ring the region with
/// gradient `sign A_i`, on the outer ring the same position carries the
/// negated label of the facing inner region and the extra `2t` offset.
fn push_ring(cells: &mut Vec<ConvexCell<f64>>, r0: f64, r1: f64, kind: RingKind, beta: f64) {
    let offset = match kind {
        RingKind::Inner => Point { x: 0.0, y: beta },
        RingKind::Outer { t } => Point {
            x: 0.0,
            y: 2.0 * t + beta,
        },
    };
    let p = |x: f64, y: f64| Point { x, y };
    // (vertices ccw, inner-ring gradient, outer-ring gradient)
    let regions: [([Point<f64>; 4], SignedMatrix, SignedMatrix); 8] = [
        // top-left / top-right trapezoid halves
        (
            [p(-r0, r0), p(0.0, r0), p(0.0, r1), p(-r1, r1)],
            SignedMatrix::A1,
            SignedMatrix::NegA3,
        ),
        (
            [p(0.0, r0), p(r0, r0), p(r1, r1), p(0.0, r1)],
            SignedMatrix::A3,
            SignedMatrix::NegA1,
        ),
        // right trapezoid, upper/lower halves
        (
            [p(r0, 0.0), p(r1, 0.0), p(r1, r1), p(r0, r0)],
            SignedMatrix::A4,
            SignedMatrix::NegA2,
        ),
        (
            [p(r0, -r0), p(r1, -r1), p(r1, 0.0), p(r0, 0.0)],
            SignedMatrix::A2,
            SignedMatrix::NegA4,
        ),
        // bottom-right / bottom-left halves
        (
            [p(0.0, -r1), p(r1, -r1), p(r0, -r0), p(0.0, -r0)],
            SignedMatrix::NegA1,
            SignedMatrix::A3,
        ),
        (
            [p(-r1, -r1), p(0.0, -r1), p(0.0, -r0), p(-r0, -r0)],
            SignedMatrix::NegA3,
            SignedMatrix::A1,
        ),
        // left trapezoid, lower/upper halves
        (
            [p(-r1, -r1), p(-r0, -r0), p(-r0, 0.0), p(-r1, 0.0)],
            SignedMatrix::NegA4,
            SignedMatrix::A2,
        ),
        (
            [p(-r1, 0.0), p(-r0, 0.0), p(-r0, r0), p(-r1, r1)],
            SignedMatrix::NegA2,
            SignedMatrix::A4,
        ),
    ];
    for (verts, inner_grad, outer_grad) in regions {
        let grad = match kind {
            RingKind::Inner => inner_grad,
            RingKind::Outer { .. } => outer_grad,
        };
        let mut vs = verts.to_vec();
        if Polygon::new(vs.clone()).signed_area() < 0.0 {
            vs.reverse();
        }
        cells.push(ConvexCell::new(Polygon::new(vs), grad, offset));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{interfaces, jump_segments};
    use crate::solution::edge_continuity_defect;

    fn harmonic(frames: usize) -> AccordionSpec {
        AccordionSpec::new(Sequence::Harmonic, frames).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            AccordionSpec::new(Sequence::Custom(vec![1.0, 1.0, 0.5]), 1),
            Err(AccordionError::NotDecreasing { .. })
        ));
        assert!(matches!(
            AccordionSpec::new(Sequence::Custom(vec![0.9, 0.5, 0.4]), 1),
            Err(AccordionError::FirstTermNotOne)
        ));
        assert!(AccordionSpec::new(Sequence::Harmonic, 5).is_ok());
        assert!(AccordionSpec::new(Sequence::LimitHalf, 50).is_ok());
    }

    #[test]
    fn axis_values_match_the_closed_form() {
        let spec = harmonic(25);
        let map = build_accordion(&spec).unwrap();
        // First even point: value (0, -s_2 + 2 s_1) = (0, 3/2).
        assert!((spec.axis_value_even(1) - 1.5).abs() < 1e-15);
        for n in 1..=20 {
            let pe = Point {
                x: spec.s(2 * n),
                y: 0.0,
            };
            let po = Point {
                x: spec.s(2 * n + 1),
                y: 0.0,
            };
            let ve = map.eval(&pe).expect("even axis point covered");
            let vo = map.eval(&po).expect("odd axis point covered");
            assert!(ve.x.abs() < 1e-12);
            assert!(vo.x.abs() < 1e-12);
            assert!(
                (ve.y - spec.axis_value_even(n)).abs() < 1e-12,
                "even n={n}: {} vs {}",
                ve.y,
                spec.axis_value_even(n)
            );
            assert!(
                (vo.y - spec.axis_value_odd(n)).abs() < 1e-12,
                "odd n={n}: {} vs {}",
                vo.y,
                spec.axis_value_odd(n)
            );
        }
    }

    #[test]
    fn map_is_continuous_and_admissible() {
        let spec = harmonic(6);
        let map = build_accordion(&spec).unwrap();
        assert_eq!(map.cells.len(), 16 * 6);
        let (defect, _) = edge_continuity_defect(&map.cells);
        assert!(defect <= 1e-10, "edge defect {defect}");
        // Interfaces exist between consecutive frames (shared squares).
        let itfs = interfaces(&map.cells).unwrap();
        assert!(itfs.len() > 16 * 6);
        // The frames tile the annulus between the innermost radius and 1.
        let inner = spec.s(2 * 6 + 1);
        let annulus = 4.0 * (1.0 - inner * inner);
        let total: f64 = map.cells.iter().map(|c| c.poly.area().unwrap()).sum();
        assert!(
            (total - annulus).abs() < 1e-12,
            "tiling area {total} vs {annulus}"
        );
    }

    #[test]
    fn frame_square_jump_length_matches_the_radius_sum() {
        let spec = harmonic(4);
        let map = build_accordion(&spec).unwrap();
        let jumps = jump_segments(&map.cells).unwrap();
        // Jump mass on the concentric squares: every interior radius
        // s_2..s_{2N} contributes its full perimeter 8 s (the innermost
        // square borders the unconstructed center, the outermost the
        // domain boundary).
        let mut on_squares = 0.0;
        for js in &jumps {
            let a = js.a;
            let b = js.b;
            let ra = a.x.abs().max(a.y.abs());
            let rb = b.x.abs().max(b.y.abs());
            if (ra - rb).abs() < 1e-12 {
                on_squares += js.seg().len();
            }
        }
        let expected: f64 = (2..=2 * 4).map(|m| 8.0 * spec.s(m)).sum();
        assert!(
            (on_squares - expected).abs() < 1e-9,
            "measured {on_squares} expected {expected}"
        );
        // The reported truncation formula is a lower part of that support.
        assert!(spec.jump_boundary_length(4) <= expected + 1e-12);
    }

    #[test]
    fn harmonic_jump_length_grows_like_the_log() {
        let spec = AccordionSpec::new(Sequence::Harmonic, 2).unwrap();
        let mut last = 0.0;
        for n in [10usize, 100, 1000] {
            let v = spec.jump_boundary_length(n);
            assert!(v > last);
            last = v;
        }
        let n = 200_000usize;
        let v = spec.jump_boundary_length(n);
        let log_model = 8.0 * (n as f64).ln();
        assert!(
            (v - log_model).abs() / log_model < 0.1,
            "{v} vs 8 ln N = {log_model}"
        );
    }

    #[test]
    fn limit_half_alternating_sums_oscillate() {
        let spec = AccordionSpec::new(Sequence::LimitHalf, 400).unwrap();
        // Even and odd partial sums of the alternating radius series settle
        // a gap of the limit radius apart, twice that after the doubling.
        let even = 2.0 * spec.alternating_partial_sum(600);
        let odd = 2.0 * spec.alternating_partial_sum(601);
        assert!((odd - even - 2.0 * 0.5).abs() < 0.01, "gap {}", odd - even);
        // The axis values themselves converge to a common limit; the
        // oscillation lives in the series, not the chained map.
        let e = spec.axis_value_even(200);
        let o = spec.axis_value_odd(200);
        assert!((e - o).abs() < 0.01);
        assert!((e - (0.5 + std::f64::consts::LN_2)).abs() < 0.01);
    }
}
