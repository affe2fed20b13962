//! Scalar abstraction: the geometry kernel is generic over the coordinate
//! type, instantiated either with [`Dyadic`] (exact binary rationals) or
//! `f64`.
//!
//! Exact coordinates are closed under `+`, `-`, `*`, `min`/`max` and division
//! by powers of two, which is all the square constructions ever need. General
//! division is only available through [`Scalar::div_exact`], which reports
//! whether the quotient is representable.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Coordinate scalar for the planar kernel.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// True when arithmetic in this type is exact (no rounding).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// Multiply by `2^k` (exact in both backends).
    fn mul_pow2(&self, k: i32) -> Self;

    /// Divide by two, exactly.
    fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    fn to_f64(&self) -> f64;

    /// Exact conversion from a double (every finite `f64` is a dyadic).
    fn from_f64_exact(v: f64) -> Self;

    /// `self / other` when the quotient is representable, else `None`.
    fn div_exact(&self, other: &Self) -> Option<Self>;

    /// Largest integer `n` with `n <= self`.
    fn floor_i64(&self) -> i64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_val(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_val(a: Self, b: Self) -> Self {
        if a < b {
            b
        } else {
            a
        }
    }

    fn signum_i(&self) -> i32 {
        if *self < Self::zero() {
            -1
        } else if *self == Self::zero() {
            0
        } else {
            1
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn mul_pow2(&self, k: i32) -> Self {
        self * (k as f64).exp2()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_exact(v: f64) -> Self {
        v
    }

    fn div_exact(&self, other: &Self) -> Option<Self> {
        if *other == 0.0 {
            None
        } else {
            Some(self / other)
        }
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
}

/// Exact dyadic rational `mant * 2^exp`, normalized so `mant` is odd
/// (or zero with `exp == 0`).
///
/// The mantissa is an `i128`; overflow panics. All coordinates produced by
/// the square constructions stay far below that limit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: i128,
    exp: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mant: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { mant: 1, exp: 0 };

    pub fn new(mant: i128, exp: i32) -> Self {
        Self { mant, exp }.normalize()
    }

    pub fn int(v: i64) -> Self {
        Self::new(v as i128, 0)
    }

    /// `num / 2^k` for `k >= 0`.
    pub fn ratio(num: i64, k: u32) -> Self {
        Self::new(num as i128, -(k as i32))
    }

    fn normalize(mut self) -> Self {
        if self.mant == 0 {
            self.exp = 0;
            return self;
        }
        while self.mant & 1 == 0 {
            self.mant >>= 1;
            self.exp += 1;
        }
        self
    }

    pub fn mantissa(&self) -> i128 {
        self.mant
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    fn align(a: Dyadic, b: Dyadic) -> (i128, i128, i32) {
        // Shift both mantissas to the smaller exponent.
        let e = a.exp.min(b.exp);
        let sa = (a.exp - e) as u32;
        let sb = (b.exp - e) as u32;
        let ma = a
            .mant
            .checked_shl(sa)
            .unwrap_or_else(|| panic!("dyadic alignment overflow ({} << {})", a.mant, sa));
        let mb = b
            .mant
            .checked_shl(sb)
            .unwrap_or_else(|| panic!("dyadic alignment overflow ({} << {})", b.mant, sb));
        (ma, mb, e)
    }

    /// Canonical text form: integers print plainly, fractions as `p/2^k`.
    pub fn to_dyadic_string(&self) -> String {
        if self.exp >= 0 {
            let v = self
                .mant
                .checked_shl(self.exp as u32)
                .expect("dyadic integer overflow");
            format!("{}", v)
        } else {
            format!("{}/2^{}", self.mant, -self.exp)
        }
    }

    /// Parse the canonical form produced by [`Dyadic::to_dyadic_string`],
    /// plus plain decimal strings (`"1.5"`, exact via binary expansion).
    pub fn parse(s: &str) -> Option<Dyadic> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once("/2^") {
            let mant: i128 = num.trim().parse().ok()?;
            let k: i32 = den.trim().parse().ok()?;
            if k < 0 {
                return None;
            }
            return Some(Dyadic::new(mant, -k));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            // Exact only when the decimal expansion is a dyadic (denominator
            // 10^n must reduce to a power of two times an integer factor of
            // the numerator). Convert via scaled integers.
            let neg = int_part.trim_start().starts_with('-');
            let int_digits = int_part.trim().trim_start_matches(['-', '+']);
            let ip: i128 = if int_digits.is_empty() {
                0
            } else {
                int_digits.parse().ok()?
            };
            let fp: i128 = if frac_part.is_empty() {
                0
            } else {
                frac_part.parse().ok()?
            };
            let mut den: i128 = 1;
            for _ in 0..frac_part.len() {
                den = den.checked_mul(10)?;
            }
            let mut num = ip.checked_mul(den)?.checked_add(fp)?;
            if neg {
                num = -num;
            }
            // num / den with den = 10^n = 2^n * 5^n.
            let mut exp = 0i32;
            let mut d = den;
            while d % 2 == 0 {
                d /= 2;
                exp -= 1;
            }
            if num % d != 0 {
                return None;
            }
            return Some(Dyadic::new(num / d, exp));
        }
        let v: i128 = s.parse().ok()?;
        Some(Dyadic::new(v, 0))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dyadic_string())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dyadic_string())
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (ma, mb, e) = Dyadic::align(self, rhs);
        Dyadic::new(ma.checked_add(mb).expect("dyadic add overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (ma, mb, e) = Dyadic::align(self, rhs);
        Dyadic::new(ma.checked_sub(mb).expect("dyadic sub overflow"), e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(
            self.mant
                .checked_mul(rhs.mant)
                .expect("dyadic mul overflow"),
            self.exp + rhs.exp,
        )
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> std::cmp::Ordering {
        let (ma, mb, _) = Dyadic::align(*self, *other);
        ma.cmp(&mb)
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic::ZERO
    }
    fn is_zero(&self) -> bool {
        self.mant == 0
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic::ONE
    }
}

impl Scalar for Dyadic {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Dyadic::int(v)
    }

    fn mul_pow2(&self, k: i32) -> Self {
        if self.mant == 0 {
            return *self;
        }
        Dyadic {
            mant: self.mant,
            exp: self.exp + k,
        }
    }

    fn to_f64(&self) -> f64 {
        // Exact while |mant| < 2^53 and the exponent is in range; true for
        // every value this crate produces.
        self.mant as f64 * (self.exp as f64).exp2()
    }

    fn from_f64_exact(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite f64 cannot become a dyadic");
        if v == 0.0 {
            return Dyadic::ZERO;
        }
        let (mant, exp) = {
            let bits = v.to_bits();
            let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
            let biased = ((bits >> 52) & 0x7ff) as i32;
            let frac = (bits & ((1u64 << 52) - 1)) as i128;
            if biased == 0 {
                (sign * frac, -1074)
            } else {
                (sign * (frac + (1 << 52)), biased - 1075)
            }
        };
        Dyadic::new(mant, exp)
    }

    fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.mant == 0 {
            return None;
        }
        let g = gcd_i128(self.mant.unsigned_abs(), other.mant.unsigned_abs());
        let mut num = self.mant / g as i128;
        let den = other.mant / g as i128;
        if den.abs() != 1 {
            return None;
        }
        if den < 0 {
            num = -num;
        }
        Some(Dyadic::new(num, self.exp - other.exp))
    }

    fn floor_i64(&self) -> i64 {
        if self.exp >= 0 {
            (self.mant << self.exp) as i64
        } else {
            let shift = (-self.exp) as u32;
            if shift >= 127 {
                if self.mant < 0 {
                    -1
                } else {
                    0
                }
            } else {
                (self.mant >> shift) as i64
            }
        }
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
