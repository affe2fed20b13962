//! The piecewise-affine building block on the square (-2,2)^2: base tent
//! functions, their dyadic rescalings, the column layout of squares
//! accumulating at the boundary, point evaluation, and the exact cell
//! decomposition at a truncation depth.
//!
//! Both components are invariant under the dihedral symmetries of the
//! square, so everything is defined on the triangle T = {0 <= y <= x <= 2}
//! and extended by reflections; the admissible-gradient set is exactly the
//! symmetry group, which keeps the reflected gradients admissible.

use crate::cells::{ConvexCell, PiecewiseAffineMap};
use crate::geom::{Point, Polygon, Vec2};
use crate::matrix::SignedMatrix;
use crate::scalar::Scalar;

/// Second-component branch of a layout square.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Branch {
    /// Even row index (not topmost).
    D,
    /// Odd row index (not topmost).
    C,
    /// Topmost square of a column, centered on the diagonal.
    B,
}

/// Octants of a square around its center, counterclockwise from
/// "east of the diagonal" in the upper right.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Octant {
    Ene,
    Nne,
    Nnw,
    Wnw,
    Wsw,
    Ssw,
    Sse,
    Ese,
}

impl Octant {
    pub const ALL: [Octant; 8] = [
        Octant::Ene,
        Octant::Nne,
        Octant::Nnw,
        Octant::Wnw,
        Octant::Wsw,
        Octant::Ssw,
        Octant::Sse,
        Octant::Ese,
    ];

    /// Octants below the diagonal y = x (local coordinates), the part of the
    /// topmost square that lies inside T.
    pub const BELOW_DIAGONAL: [Octant; 4] = [Octant::Ene, Octant::Ese, Octant::Sse, Octant::Ssw];

    /// Dihedral element mapping the reference octant `Ene` onto `self`.
    pub fn transform(self) -> SignedMatrix {
        match self {
            Octant::Ene => SignedMatrix::A1,
            Octant::Nne => SignedMatrix::A2,
            Octant::Nnw => SignedMatrix::A4,
            Octant::Wnw => SignedMatrix::A3,
            Octant::Wsw => SignedMatrix::NegA1,
            Octant::Ssw => SignedMatrix::NegA2,
            Octant::Sse => SignedMatrix::NegA4,
            Octant::Ese => SignedMatrix::NegA3,
        }
    }

    /// Classify local coordinates; `None` on the separating lines.
    pub fn classify<S: Scalar>(d: &Vec2<S>) -> Option<Octant> {
        let zero = S::zero();
        let ax = d.x.abs();
        let ay = d.y.abs();
        if d.x == zero || d.y == zero || ax == ay {
            return None;
        }
        Some(if ay < ax {
            if d.x > zero {
                if d.y > zero {
                    Octant::Ene
                } else {
                    Octant::Ese
                }
            } else if d.y > zero {
                Octant::Wnw
            } else {
                Octant::Wsw
            }
        } else if d.y > zero {
            if d.x > zero {
                Octant::Nne
            } else {
                Octant::Nnw
            }
        } else if d.x > zero {
            Octant::Sse
        } else {
            Octant::Ssw
        })
    }
}

/// Base tent `min{1 + x, 1 - x, 1 + y, 1 - y}`.
pub fn base_a<S: Scalar>(x: &S, y: &S) -> S {
    let one = S::one();
    let m1 = S::min_val(one.clone() + x.clone(), one.clone() - x.clone());
    let m2 = S::min_val(one.clone() + y.clone(), one - y.clone());
    S::min_val(m1, m2)
}

/// Base ridge `max{1 - |x|, 1 - |y|}`.
pub fn base_b<S: Scalar>(x: &S, y: &S) -> S {
    let one = S::one();
    S::max_val(one.clone() - x.abs(), one - y.abs())
}

/// Four-case base function used on odd rows. The cases overlap on the
/// sector boundaries; the first listed match wins and all matches agree
/// (checked in debug builds and by tests).
pub fn base_c<S: Scalar>(x: &S, y: &S) -> S {
    let one = S::one();
    let cases: [(bool, S); 4] = [
        (x.abs() <= y.clone(), one.clone() - x.abs()),
        (y.abs() <= -x.clone(), one.clone() - y.clone()),
        (x.abs() <= -y.clone(), one.clone() - x.clone()),
        (y.abs() <= x.clone(), one - y.abs()),
    ];
    first_case(&cases)
}

/// Four-case base function used on even rows.
pub fn base_d<S: Scalar>(x: &S, y: &S) -> S {
    let one = S::one();
    let cases: [(bool, S); 4] = [
        (x.abs() <= y.clone(), one.clone() - x.clone()),
        (y.abs() <= -x.clone(), one.clone() + y.clone()),
        (x.abs() <= -y.clone(), one.clone() - x.abs()),
        (y.abs() <= x.clone(), one - y.abs()),
    ];
    first_case(&cases)
}

fn first_case<S: Scalar>(cases: &[(bool, S); 4]) -> S {
    let mut chosen: Option<&S> = None;
    for (hit, v) in cases {
        if *hit {
            match chosen {
                None => chosen = Some(v),
                Some(prev) => {
                    debug_assert!(prev == v, "overlapping cases disagree: {prev:?} vs {v:?}")
                }
            }
            #[cfg(not(debug_assertions))]
            break;
        }
    }
    chosen.expect("case list covers the plane").clone()
}

pub fn base_value<S: Scalar>(branch: Branch, x: &S, y: &S) -> S {
    match branch {
        Branch::D => base_d(x, y),
        Branch::C => base_c(x, y),
        Branch::B => base_b(x, y),
    }
}

/// `2^-k f(2^k x, 2^k y)`; preserves the Lipschitz constant.
pub fn rescale<S: Scalar>(f: impl Fn(&S, &S) -> S, k: u32, x: &S, y: &S) -> S {
    let xs = x.mul_pow2(k as i32);
    let ys = y.mul_pow2(k as i32);
    f(&xs, &ys).mul_pow2(-(k as i32))
}

/// Exact gradient row of a base function on one octant, derived from the
/// defining formulas by exact differencing at interior dyadic points (the
/// function is affine there, so the differences are the gradient).
pub fn base_gradient_row<S: Scalar>(f: impl Fn(&S, &S) -> S, oct: Octant) -> [i8; 2] {
    let g = oct.transform();
    let q0 = Point::new(S::from_int(5).mul_pow2(-3), S::from_int(1).mul_pow2(-2));
    let step = S::from_int(1).mul_pow2(-4);
    let q1 = Point::new(q0.x.clone() + step.clone(), q0.y.clone());
    let q2 = Point::new(q0.x.clone(), q0.y.clone() + step.clone());
    let p0 = g * q0;
    let p1 = g * q1;
    let p2 = g * q2;
    let f0 = f(&p0.x, &p0.y);
    let d1 = (f(&p1.x, &p1.y) - f0.clone()).mul_pow2(4);
    let d2 = (f(&p2.x, &p2.y) - f0).mul_pow2(4);
    // Row in the rotated frame, pulled back through the transform.
    let gi = |v: &S| -> i8 {
        let w = v.to_f64();
        debug_assert!(w == w.round() && w.abs() <= 1.0, "gradient entry {w}");
        w as i8
    };
    let local = [gi(&d1), gi(&d2)];
    let t = g.transpose().entries();
    [
        local[0] * t[0][0] + local[1] * t[1][0],
        local[0] * t[0][1] + local[1] * t[1][1],
    ]
}

/// Gradient matrix of the building block on one octant of a square with the
/// given branch, derived from the base-function formulas.
pub fn octant_gradient(branch: Branch, oct: Octant) -> SignedMatrix {
    let row0 = base_gradient_row(base_a::<crate::scalar::Dyadic>, oct);
    let row1 = match branch {
        Branch::D => base_gradient_row(base_d::<crate::scalar::Dyadic>, oct),
        Branch::C => base_gradient_row(base_c::<crate::scalar::Dyadic>, oct),
        Branch::B => base_gradient_row(base_b::<crate::scalar::Dyadic>, oct),
    };
    SignedMatrix::from_rows(row0, row1)
        .expect("octant gradients of the building block are admissible")
}

/// Frozen label layout of the even-row squares, octant order as in
/// [`Octant::ALL`]; the formula-derived gradients are checked against it.
pub const TABLE_EVEN: [SignedMatrix; 8] = [
    SignedMatrix::NegA1,
    SignedMatrix::NegA2,
    SignedMatrix::NegA2,
    SignedMatrix::A1,
    SignedMatrix::A1,
    SignedMatrix::A2,
    SignedMatrix::NegA4,
    SignedMatrix::A3,
];

/// Frozen label layout of the odd-row squares.
pub const TABLE_ODD: [SignedMatrix; 8] = [
    SignedMatrix::NegA1,
    SignedMatrix::NegA2,
    SignedMatrix::A4,
    SignedMatrix::NegA3,
    SignedMatrix::NegA3,
    SignedMatrix::NegA4,
    SignedMatrix::NegA4,
    SignedMatrix::A3,
];

/// Label layout of the topmost (diagonal) squares; carries every admissible
/// gradient exactly once.
pub const TABLE_TOP: [SignedMatrix; 8] = [
    SignedMatrix::NegA1,
    SignedMatrix::NegA2,
    SignedMatrix::A4,
    SignedMatrix::NegA3,
    SignedMatrix::A1,
    SignedMatrix::A2,
    SignedMatrix::NegA4,
    SignedMatrix::A3,
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

/// The frozen label layout for even/odd squares.
pub fn gradient_table(parity: Parity) -> [SignedMatrix; 8] {
    match parity {
        Parity::Even => TABLE_EVEN,
        Parity::Odd => TABLE_ODD,
    }
}

/// Column abscissa `x_k = 2 - 2^(1-k)` (so `x_0 = 0`).
pub fn column_x<S: Scalar>(k: u32) -> S {
    S::from_int(2) - S::one().mul_pow2(1 - k as i32)
}

/// Side of a level-k square: `2^(1-k)`.
pub fn side<S: Scalar>(k: u32) -> S {
    S::one().mul_pow2(1 - k as i32)
}

pub fn branch_for(k: u32, i: u64) -> Branch {
    if i == (1u64 << k) - 2 {
        Branch::B
    } else if i % 2 == 0 {
        Branch::D
    } else {
        Branch::C
    }
}

/// One square of the layout inside the triangle T.
#[derive(Clone, Debug)]
pub struct LayoutSquare<S> {
    pub k: u32,
    pub i: u64,
    /// (x0, y0, x1, y1)
    pub rect: [S; 4],
    pub branch: Branch,
}

impl<S: Scalar> LayoutSquare<S> {
    pub fn center(&self) -> Point<S> {
        Point::new(
            (self.rect[0].clone() + self.rect[2].clone()).half(),
            (self.rect[1].clone() + self.rect[3].clone()).half(),
        )
    }

    pub fn half_side(&self) -> S {
        (self.rect[2].clone() - self.rect[0].clone()).half()
    }
}

/// Dyadic layout of all squares at levels `1..=depth`.
#[derive(Clone, Debug)]
pub struct PyramidLayout<S> {
    pub depth: u32,
    pub squares: Vec<LayoutSquare<S>>,
}

impl<S: Scalar> PyramidLayout<S> {
    pub fn generate(depth: u32) -> Self {
        assert!(depth >= 1 && depth < 40, "depth out of supported range");
        let mut squares = Vec::new();
        for k in 1..=depth {
            let x0 = column_x::<S>(k - 1);
            let x1 = column_x::<S>(k);
            let s = side::<S>(k);
            for i in 0..=(1u64 << k) - 2 {
                let y0 = s.clone() * S::from_int(i as i64);
                let y1 = s.clone() * S::from_int(i as i64 + 1);
                squares.push(LayoutSquare {
                    k,
                    i,
                    rect: [x0.clone(), y0, x1.clone(), y1],
                    branch: branch_for(k, i),
                });
            }
        }
        Self { depth, squares }
    }
}

/// Where a point landed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PvLocus {
    /// Interior of a constant-gradient subcell of square (k, i) (indices in
    /// the fundamental triangle after symmetry reduction).
    Cell { k: u32, i: u64, octant: Octant },
    /// On a gradient-discontinuity line; the value is still well defined.
    SingularLine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvSample<S> {
    pub value: Point<S>,
    /// `None` exactly on singular lines.
    pub gradient: Option<SignedMatrix>,
    pub locus: PvLocus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PvOutcome<S> {
    Tiled(PvSample<S>),
    /// Strictly inside the domain but beyond the truncation depth (the strip
    /// accumulating at the boundary).
    Untiled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvError {
    OutsideDomain,
}

impl std::fmt::Display for PvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "point outside the open square (-2,2)^2")
    }
}

impl std::error::Error for PvError {}

/// Evaluate the building block at a point of (-2,2)^2 truncated at `depth`.
pub fn pv_eval<S: Scalar>(p: &Point<S>, depth: u32) -> Result<PvOutcome<S>, PvError> {
    let two = S::from_int(2);
    if p.x.abs() >= two || p.y.abs() >= two {
        return Err(PvError::OutsideDomain);
    }
    // Reduce to T = {0 <= y <= x} tracking the dihedral element `t` with
    // q = t p; values are invariant, gradients compose as D(q) * t.
    let mut x = p.x.clone();
    let mut y = p.y.clone();
    let mut t = SignedMatrix::A1;
    let mut singular = false;
    let zero = S::zero();
    if x < zero {
        x = -x;
        t = SignedMatrix::A3.compose(t);
    } else if x == zero {
        singular = true;
    }
    if y < zero {
        y = -y;
        t = SignedMatrix::NegA3.compose(t);
    } else if y == zero {
        singular = true;
    }
    if y > x {
        std::mem::swap(&mut x, &mut y);
        t = SignedMatrix::A2.compose(t);
    } else if y == x {
        singular = true;
    }

    // Locate the column: smallest k with x <= x_k.
    let mut level = None;
    for k in 1..=depth {
        let xk = column_x::<S>(k);
        if x < xk {
            level = Some(k);
            break;
        }
        if x == xk {
            level = Some(k);
            singular = true;
            break;
        }
    }
    let Some(k) = level else {
        return Ok(PvOutcome::Untiled);
    };

    // Row index i = floor(y / side_k), clamped to the topmost square.
    let scaled = y.mul_pow2(k as i32 - 1);
    let mut i = scaled.floor_i64().max(0) as u64;
    if scaled == S::from_int(i as i64) {
        singular = true;
    }
    let top = (1u64 << k) - 2;
    if i > top {
        i = top;
    }
    let branch = branch_for(k, i);

    let s = side::<S>(k);
    let cx = column_x::<S>(k - 1) + s.half();
    let cy = s.clone() * S::from_int(i as i64) + s.half();
    let d = Vec2::new(x - cx, y - cy);
    let value_local = Point::new(
        rescale(base_a::<S>, k, &d.x, &d.y),
        rescale(|u: &S, v: &S| base_value(branch, u, v), k, &d.x, &d.y),
    );
    let octant = Octant::classify(&d);
    let gradient = if singular {
        None
    } else {
        octant.map(|oct| octant_gradient(branch, oct).compose(t))
    };
    let locus = match (singular, octant) {
        (false, Some(octant)) => PvLocus::Cell { k, i, octant },
        _ => PvLocus::SingularLine,
    };
    Ok(PvOutcome::Tiled(PvSample {
        value: value_local,
        gradient,
        locus,
    }))
}

/// Exact cell decomposition of the building block at truncation `depth`:
/// every level square splits into eight octant triangles, generated on T and
/// reflected over the whole square with disjoint interiors.
pub fn pv_cells<S: Scalar>(depth: u32) -> PiecewiseAffineMap<S> {
    let layout = PyramidLayout::<S>::generate(depth);
    let mut cells = Vec::new();
    for sq in &layout.squares {
        let m = sq.center();
        let h = sq.half_side();
        let octants: &[Octant] = if sq.branch == Branch::B {
            &Octant::BELOW_DIAGONAL
        } else {
            &Octant::ALL
        };
        for &oct in octants {
            let g = oct.transform();
            let corners = [
                Point::new(S::zero(), S::zero()),
                Point::new(h.clone(), S::zero()),
                Point::new(h.clone(), h.clone()),
            ];
            let mut verts: Vec<Point<S>> =
                corners.iter().map(|c| m.clone() + g * c.clone()).collect();
            if g.det() < 0 {
                verts.reverse();
            }
            let grad = octant_gradient(sq.branch, oct);
            // Value at the square center is (h, h) on every square.
            let offset = Point::new(h.clone(), h.clone()) - grad * m.clone();
            for refl in SignedMatrix::ALL {
                let mut rv: Vec<Point<S>> = verts.iter().map(|v| refl * v.clone()).collect();
                if refl.det() < 0 {
                    rv.reverse();
                }
                let grad_r = grad.compose(refl.transpose());
                let off_r = offset.clone();
                cells.push(ConvexCell::new(Polygon::new(rv), grad_r, off_r));
            }
        }
    }
    let two = S::from_int(2);
    let xk = column_x::<S>(depth);
    let domain = Polygon::rectangle(-two.clone(), -two.clone(), two.clone(), two.clone());
    let untiled = vec![
        Polygon::rectangle(-two.clone(), xk.clone(), two.clone(), two.clone()),
        Polygon::rectangle(-two.clone(), -two.clone(), two.clone(), -xk.clone()),
        Polygon::rectangle(-two.clone(), -xk.clone(), -xk.clone(), xk.clone()),
        Polygon::rectangle(xk.clone(), -xk.clone(), two.clone(), xk.clone()),
    ];
    PiecewiseAffineMap {
        cells,
        domain,
        depth,
        untiled,
    }
}

/// The scalar pyramid `p(x) = r - max_i <xi_i, x - x0>` on its support
/// polygon, for slope vectors that positively span the plane.
#[derive(Clone, Debug)]
pub struct ScalarPyramid {
    pub xis: Vec<Point<f64>>,
    pub r: f64,
    pub x0: Point<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarPyramidError {
    /// The origin is not interior to the convex hull of the slopes, so the
    /// support set is unbounded.
    UnboundedPyramid,
}

impl std::fmt::Display for ScalarPyramidError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unbounded pyramid")
    }
}

impl std::error::Error for ScalarPyramidError {}

impl ScalarPyramid {
    pub fn new(
        xis: Vec<Point<f64>>,
        r: f64,
        x0: Point<f64>,
    ) -> Result<ScalarPyramid, ScalarPyramidError> {
        if r <= 0.0 || xis.len() < 3 {
            return Err(ScalarPyramidError::UnboundedPyramid);
        }
        // Bounded support iff the slopes positively span the plane: no
        // closed half-plane contains all of them (max angular gap < pi).
        let mut angles: Vec<f64> = Vec::new();
        for v in &xis {
            if v.norm() == 0.0 {
                return Err(ScalarPyramidError::UnboundedPyramid);
            }
            angles.push(v.y.atan2(v.x));
        }
        angles.sort_by(f64::total_cmp);
        let mut max_gap: f64 = 0.0;
        for i in 0..angles.len() {
            let next = if i + 1 < angles.len() {
                angles[i + 1]
            } else {
                angles[0] + std::f64::consts::TAU
            };
            max_gap = max_gap.max(next - angles[i]);
        }
        if max_gap >= std::f64::consts::PI - 1e-12 {
            return Err(ScalarPyramidError::UnboundedPyramid);
        }
        Ok(ScalarPyramid { xis, r, x0 })
    }

    pub fn eval(&self, p: &Point<f64>) -> f64 {
        let d = *p - self.x0;
        let m = self
            .xis
            .iter()
            .map(|xi| xi.dot(&d))
            .fold(f64::NEG_INFINITY, f64::max);
        self.r - m
    }

    /// The a.e. gradient `-xi_argmax`, `None` on ties.
    pub fn gradient(&self, p: &Point<f64>) -> Option<Point<f64>> {
        let d = *p - self.x0;
        let vals: Vec<f64> = self.xis.iter().map(|xi| xi.dot(&d)).collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ties = vals.iter().filter(|v| (*v - best).abs() < 1e-12).count();
        if ties != 1 {
            return None;
        }
        let idx = vals.iter().position(|v| (*v - best).abs() < 1e-12)?;
        Some(-self.xis[idx])
    }

    /// Support polygon `{p >= 0}` by half-plane clipping of a large box.
    pub fn polytope(&self) -> Polygon<f64> {
        let min_norm = self
            .xis
            .iter()
            .map(Point::norm)
            .fold(f64::INFINITY, f64::min);
        let reach = 4.0 * self.r / min_norm.max(1e-12) + 1.0;
        let mut poly = Polygon::rectangle(
            self.x0.x - reach,
            self.x0.y - reach,
            self.x0.x + reach,
            self.x0.y + reach,
        );
        for xi in &self.xis {
            // <xi, x - x0> <= r, i.e. keep <-xi, x - q> >= 0 for the point q
            // on the face.
            let scale = self.r / xi.dot(xi);
            let q = self.x0 + xi.scale(&scale);
            let line = crate::geom::ClipLine::new(q, -*xi);
            poly =
                crate::geom::clip_polygon_halfplane(&poly, &line).expect("float clipping is total");
            if poly.is_empty() {
                break;
            }
        }
        poly
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dyadic;

    fn dy(n: i64, k: u32) -> Dyadic {
        Dyadic::ratio(n, k)
    }

    #[test]
    fn base_values_match_hand_evaluation() {
        assert_eq!(base_a(&0.0, &0.0), 1.0);
        assert_eq!(base_a(&1.0, &0.0), 0.0);
        assert!((base_a(&0.2, &-0.6) - 0.4).abs() < 1e-15);
        assert!((base_b(&0.2, &-0.6) - 0.8).abs() < 1e-15);
        assert_eq!(base_c(&0.0, &0.5), 1.0);
        // The fourth case of the even-row function applies on |y| <= x.
        assert_eq!(base_d(&0.5, &0.0), 1.0);
        assert_eq!(base_d(&0.5, &-0.25), 0.75);
    }

    #[test]
    fn overlapping_cases_agree_on_sector_boundaries() {
        // Walk the four boundary rays of the case lists; the debug assertion
        // inside `first_case` flags any discontinuity.
        for i in -8..=8i64 {
            let v = dy(i, 3);
            for (x, y) in [
                (v, v),
                (v, -v),
                (-v, v),
                (-v, -v),
                (v, Dyadic::ZERO),
                (Dyadic::ZERO, v),
            ] {
                let _ = base_c(&x, &y);
                let _ = base_d(&x, &y);
            }
        }
    }

    #[test]
    fn rescale_scales_peak_values() {
        assert_eq!(rescale(base_a::<f64>, 1, &0.0, &0.0), 0.5);
        assert_eq!(rescale(base_a::<f64>, 2, &0.0, &0.0), 0.25);
        // sup over the level-k cell is 2^-k, attained at the center.
        let k = 3;
        let mut sup: f64 = 0.0;
        for ix in -20..=20 {
            for iy in -20..=20 {
                let x = ix as f64 / 20.0 * 0.125;
                let y = iy as f64 / 20.0 * 0.125;
                sup = sup.max(rescale(base_a::<f64>, k, &x, &y).abs());
            }
        }
        assert!((sup - 0.125).abs() < 1e-12);
    }

    #[test]
    fn octant_gradients_are_admissible_and_match_frozen_tables() {
        for (branch, table) in [
            (Branch::D, TABLE_EVEN),
            (Branch::C, TABLE_ODD),
            (Branch::B, TABLE_TOP),
        ] {
            for (idx, oct) in Octant::ALL.into_iter().enumerate() {
                assert_eq!(
                    octant_gradient(branch, oct),
                    table[idx],
                    "branch {branch:?} octant {oct:?}"
                );
            }
        }
    }

    #[test]
    fn both_row_tables_cover_the_whole_gradient_set() {
        let mut seen = std::collections::BTreeSet::new();
        for m in TABLE_EVEN.iter().chain(TABLE_ODD.iter()) {
            seen.insert(*m);
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn layout_squares_sit_inside_the_triangle_and_partition_it() {
        let layout = PyramidLayout::<Dyadic>::generate(6);
        let mut total = Dyadic::ZERO;
        for sq in &layout.squares {
            // Inside the closed triangle 0 <= y <= x <= 2: the top-right
            // corner dominates in x, the top edge must stay below y = x
            // except for the topmost square which is bisected by it.
            assert!(sq.rect[0] >= Dyadic::ZERO && sq.rect[3] <= Dyadic::int(2));
            if sq.branch == Branch::B {
                assert_eq!(sq.rect[0], sq.rect[1], "top square sits on the diagonal");
            } else {
                assert!(sq.rect[3] <= sq.rect[0], "below the diagonal");
            }
            let area = (sq.rect[2] - sq.rect[0]) * (sq.rect[3] - sq.rect[1]);
            total = total + area;
        }
        // Column k covers the strip up to x_6; inside T the squares cover
        // the trapezoid {0 <= y <= x <= x_6} once the top squares are halved.
        let xk = column_x::<Dyadic>(6);
        let expected_double = xk * xk; // 2 * (triangle area x_k^2 / 2)
        let mut doubled = Dyadic::ZERO;
        for sq in &layout.squares {
            let area = (sq.rect[2] - sq.rect[0]) * (sq.rect[3] - sq.rect[1]);
            doubled = doubled
                + if sq.branch == Branch::B {
                    area
                } else {
                    area.mul_pow2(1)
                };
        }
        assert_eq!(doubled, expected_double);
        assert!(total > Dyadic::ZERO);
    }

    #[test]
    fn eval_matches_hand_picked_values() {
        // Center of the first square.
        let out = pv_eval(&Point::new(dy(1, 1), dy(1, 1)), 6).unwrap();
        match out {
            PvOutcome::Tiled(s) => {
                assert_eq!(s.value, Point::new(dy(1, 1), dy(1, 1)));
                assert_eq!(s.gradient, None, "center is singular");
            }
            _ => panic!("tiled point"),
        }
        // Interior point with a known gradient.
        let out = pv_eval(&Point::new(0.6, 0.2), 6).unwrap();
        match out {
            PvOutcome::Tiled(s) => {
                assert_eq!(s.gradient, Some(SignedMatrix::NegA4));
                assert_eq!(
                    s.locus,
                    PvLocus::Cell {
                        k: 1,
                        i: 0,
                        octant: Octant::Sse
                    }
                );
            }
            _ => panic!("tiled point"),
        }
        // Beyond the truncation depth.
        let out = pv_eval(&Point::new(dy(127, 6), dy(0, 0).half()), 3).unwrap();
        assert_eq!(out, PvOutcome::Untiled);
        // Outside.
        assert_eq!(
            pv_eval(&Point::new(2.0, 0.0), 3),
            Err(PvError::OutsideDomain)
        );
    }

    #[test]
    fn values_are_dihedral_invariant() {
        let pts = [
            Point::new(dy(5, 3), dy(3, 3)),
            Point::new(dy(11, 3), dy(1, 4)),
            Point::new(dy(29, 4), dy(13, 4)),
        ];
        for p in pts {
            let base = match pv_eval(&p, 8).unwrap() {
                PvOutcome::Tiled(s) => s.value,
                _ => panic!("point should be tiled"),
            };
            for g in SignedMatrix::ALL {
                let q = g * p.clone();
                match pv_eval(&q, 8).unwrap() {
                    PvOutcome::Tiled(s) => assert_eq!(s.value, base, "transform {g}"),
                    _ => panic!("reflected point should be tiled"),
                }
            }
        }
    }

    #[test]
    fn finite_differences_confirm_gradients() {
        let mut rng = crate::rng::Rng::new(0xfeed);
        let depth = 7;
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 2000 && attempts < 100_000 {
            attempts += 1;
            let p = Point::new(rng.next_f64() * 3.8 - 1.9, rng.next_f64() * 3.8 - 1.9);
            let sample = match pv_eval(&p, depth) {
                Ok(PvOutcome::Tiled(s)) => s,
                _ => continue,
            };
            let Some(m) = sample.gradient else { continue };
            let h = 1e-7;
            let eval = |q: Point<f64>| -> Option<PvSample<f64>> {
                match pv_eval(&q, depth) {
                    Ok(PvOutcome::Tiled(s)) => Some(s),
                    _ => None,
                }
            };
            let stencil = [
                eval(Point::new(p.x + h, p.y)),
                eval(Point::new(p.x - h, p.y)),
                eval(Point::new(p.x, p.y + h)),
                eval(Point::new(p.x, p.y - h)),
            ];
            // Only stencils fully inside one constant-gradient cell are
            // conclusive; near a singular line the difference quotients may
            // legitimately disagree.
            if !stencil
                .iter()
                .all(|s| matches!(s, Some(v) if v.locus == sample.locus))
            {
                continue;
            }
            let v = |i: usize| stencil[i].as_ref().unwrap().value;
            let (xp, xm, yp, ym) = (v(0), v(1), v(2), v(3));
            let e = m.entries();
            let fd = [
                [(xp.x - xm.x) / (2.0 * h), (yp.x - ym.x) / (2.0 * h)],
                [(xp.y - xm.y) / (2.0 * h), (yp.y - ym.y) / (2.0 * h)],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    assert!(
                        (fd[r][c] - e[r][c] as f64).abs() <= 1e-5,
                        "entry ({r},{c}) fd={} analytic={}",
                        fd[r][c],
                        e[r][c]
                    );
                }
            }
            checked += 1;
        }
        assert!(checked >= 2000, "only {checked} conclusive stencils");
    }

    #[test]
    fn boundary_decay_at_truncation_depth() {
        // Values on the deepest generated cells are capped by twice the
        // level scale: per component by 2^-K, in norm by sqrt(2) 2^-K.
        let depth = 6;
        let map = pv_cells::<Dyadic>(depth);
        let x_prev = column_x::<Dyadic>(depth - 1);
        let mut sup: f64 = 0.0;
        for cell in &map.cells {
            let p = cell.poly.interior_point();
            if p.linf_norm() <= x_prev {
                continue; // not a deepest-level cell
            }
            for q in cell.poly.verts.iter().chain(std::iter::once(&p)) {
                let v = cell.eval(q).to_f64();
                sup = sup.max(v.norm());
            }
        }
        let bound = 2.0f64.powi(1 - depth as i32);
        assert!(sup <= bound, "sup {sup} vs 2*2^-K = {bound}");
        assert!(sup >= bound / 2.0, "the cap is attained up to a factor 2");
    }

    #[test]
    fn lipschitz_bound_on_sampled_pairs() {
        let mut rng = crate::rng::Rng::new(0xcafe);
        let depth = 7;
        let mut pairs = 0;
        while pairs < 4000 {
            let p = Point::new(rng.next_f64() * 3.9 - 1.95, rng.next_f64() * 3.9 - 1.95);
            let q = Point::new(rng.next_f64() * 3.9 - 1.95, rng.next_f64() * 3.9 - 1.95);
            let (Ok(PvOutcome::Tiled(sp)), Ok(PvOutcome::Tiled(sq))) =
                (pv_eval(&p, depth), pv_eval(&q, depth))
            else {
                continue;
            };
            let dv = (sp.value - sq.value).norm();
            let dp = (p - q).norm();
            assert!(dv <= 2.0 * dp + 1e-12, "|du| = {dv} at |dp| = {dp}");
            pairs += 1;
        }
    }

    #[test]
    fn scalar_pyramid_linf_ball() {
        let xis = vec![
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
        ];
        let p = ScalarPyramid::new(xis, 1.0, Point::new(0.0, 0.0)).unwrap();
        // p(x) = 1 - linf(x).
        for (x, y) in [(0.3, -0.2), (0.9, 0.9), (-0.5, 0.1)] {
            let expected = 1.0 - x.abs().max(y.abs());
            assert!((p.eval(&Point::new(x, y)) - expected).abs() < 1e-12);
        }
        assert!((p.eval(&p.x0) - p.r).abs() < 1e-15, "value r at the apex");
        let poly = p.polytope();
        assert!((poly.area().unwrap() - 4.0).abs() < 1e-9, "unit linf ball");
        for v in &poly.verts {
            assert!(p.eval(v).abs() < 1e-12, "vanishes on the support boundary");
        }
        let g = p.gradient(&Point::new(0.5, 0.1)).unwrap();
        assert_eq!((g.x, g.y), (-1.0, 0.0));
    }

    #[test]
    fn scalar_pyramid_rejects_unbounded_slope_sets() {
        let xis = vec![
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        assert_eq!(
            ScalarPyramid::new(xis, 1.0, Point::new(0.0, 0.0)).unwrap_err(),
            ScalarPyramidError::UnboundedPyramid
        );
    }

    #[test]
    fn depth_one_cells_are_the_four_reflected_squares() {
        let map = pv_cells::<Dyadic>(1);
        assert_eq!(map.cells.len(), 32);
        let mut area = Dyadic::ZERO;
        for c in &map.cells {
            area = area + c.poly.area().unwrap();
        }
        assert_eq!(area, Dyadic::int(4), "four unit squares");
    }

    #[test]
    fn cells_tile_without_overlap_and_agree_with_eval() {
        let depth = 4;
        let map = pv_cells::<Dyadic>(depth);
        let mut area = Dyadic::ZERO;
        for c in &map.cells {
            assert!(c.poly.is_ccw_convex());
            area = area + c.poly.area().unwrap();
        }
        let xk = column_x::<Dyadic>(depth);
        assert_eq!(area, (xk * xk).mul_pow2(2), "tiled area = (2 x_k)^2");
        // Cell affine data agrees with direct evaluation at interior points.
        for c in map.cells.iter().step_by(7) {
            let p = c.poly.interior_point();
            match pv_eval(&p, depth).unwrap() {
                PvOutcome::Tiled(s) => {
                    assert_eq!(s.value, c.eval(&p));
                    if let Some(g) = s.gradient {
                        assert_eq!(g, c.gradient);
                    }
                }
                _ => panic!("cell interior must be tiled"),
            }
        }
    }
}
