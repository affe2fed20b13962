use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Point (or displacement) in the plane.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

/// Alias used when a value is a displacement rather than a location.
pub type Vec2<S> = Point<S>;

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Self::new(S::from_f64_exact(x), S::from_f64_exact(y))
    }

    pub fn to_f64(&self) -> Point<f64> {
        Point {
            x: self.x.to_f64(),
            y: self.y.to_f64(),
        }
    }

    pub fn dot(&self, other: &Self) -> S {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn cross(&self, other: &Self) -> S {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    pub fn mul_pow2(&self, k: i32) -> Self {
        Self::new(self.x.mul_pow2(k), self.y.mul_pow2(k))
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        Self::new(
            (self.x.clone() + other.x.clone()).half(),
            (self.y.clone() + other.y.clone()).half(),
        )
    }

    pub fn linf_norm(&self) -> S {
        S::max_val(self.x.abs(), self.y.abs())
    }
}

impl Point<f64> {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }
}

impl<S: Scalar> Add for Point<S> {
    type Output = Point<S>;
    fn add(self, rhs: Point<S>) -> Point<S> {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<S: Scalar> Sub for Point<S> {
    type Output = Point<S>;
    fn sub(self, rhs: Point<S>) -> Point<S> {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<S: Scalar> Neg for Point<S> {
    type Output = Point<S>;
    fn neg(self) -> Point<S> {
        Point::new(-self.x, -self.y)
    }
}

impl<S: Scalar> Mul<Point<S>> for crate::matrix::SignedMatrix {
    type Output = Point<S>;
    fn mul(self, p: Point<S>) -> Point<S> {
        let term = |c: i8, v: &S| -> S {
            match c {
                0 => S::zero(),
                1 => v.clone(),
                -1 => -v.clone(),
                _ => unreachable!("signed matrix entries are in {{-1,0,1}}"),
            }
        };
        let e = self.entries();
        Point::new(
            term(e[0][0], &p.x) + term(e[0][1], &p.y),
            term(e[1][0], &p.x) + term(e[1][1], &p.y),
        )
    }
}
