//! Piecewise-affine maps as explicit polygonal cell complexes. Each cell
//! carries one of the eight admissible gradients and the affine offset, so
//! the map restricted to the cell is `x -> gradient * x + offset`.

use crate::geom::{Point, Polygon, Vec2};
use crate::matrix::SignedMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ConvexCell<S> {
    /// Vertices in counterclockwise order, convex, positive area.
    pub poly: Polygon<S>,
    pub gradient: SignedMatrix,
    /// Value of the affine map at the origin.
    pub offset: Vec2<S>,
}

impl<S: Scalar> ConvexCell<S> {
    pub fn new(poly: Polygon<S>, gradient: SignedMatrix, offset: Vec2<S>) -> Self {
        Self {
            poly,
            gradient,
            offset,
        }
    }

    pub fn eval(&self, p: &Point<S>) -> Point<S> {
        self.gradient * p.clone() + self.offset.clone()
    }

    pub fn to_f64(&self) -> ConvexCell<f64> {
        ConvexCell {
            poly: self.poly.to_f64(),
            gradient: self.gradient,
            offset: self.offset.to_f64(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PiecewiseAffineMap<S> {
    pub cells: Vec<ConvexCell<S>>,
    pub domain: Polygon<S>,
    /// Truncation generation the cells were built to.
    pub depth: u32,
    /// Not-yet-constructed remainder (accumulation strips near the boundary
    /// or the fractal center), explicit so measure bookkeeping stays honest.
    pub untiled: Vec<Polygon<S>>,
}

impl<S: Scalar> PiecewiseAffineMap<S> {
    /// Evaluate at a point covered by some cell (closed containment, so edge
    /// and vertex points work; continuity makes the choice immaterial).
    pub fn eval(&self, p: &Point<S>) -> Option<Point<S>> {
        self.cells
            .iter()
            .find(|c| c.poly.contains_closed(p))
            .map(|c| c.eval(p))
    }

    pub fn to_f64(&self) -> PiecewiseAffineMap<f64> {
        PiecewiseAffineMap {
            cells: self.cells.iter().map(ConvexCell::to_f64).collect(),
            domain: self.domain.to_f64(),
            depth: self.depth,
            untiled: self.untiled.iter().map(Polygon::to_f64).collect(),
        }
    }

    pub fn cell_area_total(&self) -> S {
        let mut acc = S::zero();
        for c in &self.cells {
            acc = acc + c.poly.signed_area();
        }
        acc
    }

    pub fn untiled_area_total(&self) -> S {
        let mut acc = S::zero();
        for p in &self.untiled {
            acc = acc + p.signed_area();
        }
        acc
    }
}
