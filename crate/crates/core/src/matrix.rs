//! The eight admissible gradients: signed permutation matrices of the plane.
//!
//! `E = { ±A1, ±A2, ±A3, ±A4 }` with
//! `A1 = I`, `A2 = [[0,1],[1,0]]`, `A3 = [[-1,0],[0,1]]`, `A4 = [[0,-1],[1,0]]`.
//! The set is exactly the symmetry group of the square, which is what makes
//! the reflection bookkeeping below closed.

use std::fmt;

/// One of the eight admissible gradient matrices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignedMatrix {
    A1,
    NegA1,
    A2,
    NegA2,
    A3,
    NegA3,
    A4,
    NegA4,
}

use SignedMatrix::*;

impl SignedMatrix {
    /// All eight admissible gradients, in label order `A1, -A1, ..., A4, -A4`.
    pub const ALL: [SignedMatrix; 8] = [A1, NegA1, A2, NegA2, A3, NegA3, A4, NegA4];

    /// Integer entries, row-major. Row `j` is the gradient of component `j`.
    pub fn entries(self) -> [[i8; 2]; 2] {
        match self {
            A1 => [[1, 0], [0, 1]],
            NegA1 => [[-1, 0], [0, -1]],
            A2 => [[0, 1], [1, 0]],
            NegA2 => [[0, -1], [-1, 0]],
            A3 => [[-1, 0], [0, 1]],
            NegA3 => [[1, 0], [0, -1]],
            A4 => [[0, -1], [1, 0]],
            NegA4 => [[0, 1], [-1, 0]],
        }
    }

    pub fn from_entries(e: [[i8; 2]; 2]) -> Option<SignedMatrix> {
        Self::ALL.into_iter().find(|m| m.entries() == e)
    }

    pub fn from_rows(r0: [i8; 2], r1: [i8; 2]) -> Option<SignedMatrix> {
        Self::from_entries([r0, r1])
    }

    pub fn negate(self) -> SignedMatrix {
        match self {
            A1 => NegA1,
            NegA1 => A1,
            A2 => NegA2,
            NegA2 => A2,
            A3 => NegA3,
            NegA3 => A3,
            A4 => NegA4,
            NegA4 => A4,
        }
    }

    /// Matrix product; `E` is closed under it.
    pub fn compose(self, rhs: SignedMatrix) -> SignedMatrix {
        let a = self.entries();
        let b = rhs.entries();
        let mut c = [[0i8; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SignedMatrix::from_entries(c).expect("signed matrices are closed under product")
    }

    pub fn transpose(self) -> SignedMatrix {
        let e = self.entries();
        SignedMatrix::from_entries([[e[0][0], e[1][0]], [e[0][1], e[1][1]]])
            .expect("transpose stays in the set")
    }

    pub fn det(self) -> i8 {
        let e = self.entries();
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Stable index 0..8 in [`SignedMatrix::ALL`] order.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|m| *m == self).unwrap()
    }

    pub fn label(self) -> &'static str {
        match self {
            A1 => "+A1",
            NegA1 => "-A1",
            A2 => "+A2",
            NegA2 => "-A2",
            A3 => "+A3",
            NegA3 => "-A3",
            A4 => "+A4",
            NegA4 => "-A4",
        }
    }

    pub fn from_label(s: &str) -> Option<SignedMatrix> {
        Self::ALL.into_iter().find(|m| m.label() == s)
    }
}

impl fmt::Debug for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl fmt::Display for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// The admissible gradient set `E`.
pub fn matrix_set_e() -> [SignedMatrix; 8] {
    SignedMatrix::ALL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_has_eight_orthogonal_members_closed_under_negation() {
        let e = matrix_set_e();
        assert_eq!(e.len(), 8);
        for m in e {
            let p = m.compose(m.transpose());
            assert_eq!(p, A1, "M * M^T = I for {m}");
            assert!(m.det() == 1 || m.det() == -1);
            assert!(e.contains(&m.negate()));
        }
        for (i, a) in e.iter().enumerate() {
            for b in &e[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn contains_the_named_values() {
        assert_eq!(A1.entries(), [[1, 0], [0, 1]]);
        assert_eq!(A4.entries(), [[0, -1], [1, 0]]);
        assert_eq!(SignedMatrix::from_entries([[0, 1], [-1, 0]]), Some(NegA4));
    }

    #[test]
    fn closed_under_composition() {
        for a in SignedMatrix::ALL {
            for b in SignedMatrix::ALL {
                let _ = a.compose(b);
            }
        }
        assert_eq!(A2.compose(A2), A1);
        assert_eq!(A3.compose(A2), A4);
    }
}
