//! Maps between polynomial zeros and coefficients.
//!
//! Quadratic bridge: `z^2 + y1 z + y2 = (z - x1)(z - x2)`.
//! Cubic double-root bridge: `z^3 + y1 z^2 + y2 z + y3 = (z - x1)^2 (z - x2)`,
//! where only `(y1, y2)` are free and `y3` follows from them up to a sign.

use serde::{Deserialize, Serialize};

use crate::numeric::{approx_eq, sqrt_branch, Cx, Sign, Tolerance};
pub use crate::pair::{DistinctZeroPair, ZeroPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonicQuadratic {
    pub y1: Cx,
    pub y2: Cx,
}

impl MonicQuadratic {
    pub fn eval(&self, z: Cx) -> Cx {
        (z + self.y1) * z + self.y2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonicCubic {
    pub y1: Cx,
    pub y2: Cx,
    pub y3: Cx,
}

impl MonicCubic {
    pub fn eval(&self, z: Cx) -> Cx {
        ((z + self.y1) * z + self.y2) * z + self.y3
    }

    /// Whether `y3` is one of the two values compatible with a double root.
    pub fn has_double_root(&self, tol: Tolerance) -> bool {
        Sign::BOTH
            .iter()
            .any(|&s| approx_eq(self.y3, y3_from_y12(self.y1, self.y2, s), tol))
    }
}

/// Label of the `±` closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub sign: Sign,
}

impl Branch {
    pub const PLUS: Branch = Branch { sign: Sign::Plus };
    pub const MINUS: Branch = Branch { sign: Sign::Minus };
    pub const BOTH: [Branch; 2] = [Branch::PLUS, Branch::MINUS];
}

impl From<Sign> for Branch {
    fn from(sign: Sign) -> Self {
        Branch { sign }
    }
}

/// Roots of `a z^2 + b z + c` labelled as `(-b + G)/(2a)` and
/// `(-b - G)/(2a)`, `G` the principal root of `b^2 - 4ac`.
///
/// The larger-magnitude root is formed without cancellation and its partner
/// comes from the product of roots `c/a`. Requires `a != 0`.
pub(crate) fn labelled_quadratic_roots(a: Cx, b: Cx, c: Cx) -> (Cx, Cx) {
    labelled_roots_with_disc(a, b, c, b * b - 4.0 * a * c)
}

/// [`labelled_quadratic_roots`] with `b^2 - 4ac` supplied by the caller.
pub(crate) fn labelled_roots_with_disc(a: Cx, b: Cx, c: Cx, disc: Cx) -> (Cx, Cx) {
    let g = sqrt_branch(disc, Sign::Plus);
    // pick tau with |b + tau g| maximal
    let tau = if (b.conj() * g).re >= 0.0 { 1.0 } else { -1.0 };
    let qv = -(b + tau * g) / 2.0;
    if qv == Cx::new(0.0, 0.0) {
        // b = 0 and g = 0, so c = 0 as well: double root at zero
        return (qv, qv);
    }
    let big = qv / a; // (-b - tau g) / 2a
    let small = c / qv; // (-b + tau g) / 2a
    if tau > 0.0 {
        (small, big)
    } else {
        (big, small)
    }
}

pub fn quad_from_zeros(p: &ZeroPair) -> MonicQuadratic {
    let [x1, x2] = p.0;
    MonicQuadratic {
        y1: -(x1 + x2),
        y2: x1 * x2,
    }
}

/// Zeros of `z^2 + y1 z + y2`. The first stored zero is
/// `(-y1 + sqrt(y1^2 - 4 y2))/2` with the principal root.
pub fn quad_zeros(m: &MonicQuadratic) -> ZeroPair {
    let (plus, minus) = labelled_quadratic_roots(Cx::new(1.0, 0.0), m.y1, m.y2);
    ZeroPair([plus, minus])
}

/// [`quad_zeros`] with the discriminant `y1^2 - 4 y2` supplied by the caller.
pub(crate) fn quad_zeros_with_disc(m: &MonicQuadratic, disc: Cx) -> ZeroPair {
    let g = sqrt_branch(disc, Sign::Plus);
    let b = m.y1;
    let tau = if (b.conj() * g).re >= 0.0 { 1.0 } else { -1.0 };
    let qv = -(b + tau * g) / 2.0;
    if qv == Cx::new(0.0, 0.0) {
        return ZeroPair([qv, qv]);
    }
    let (big, small) = (qv, m.y2 / qv);
    ZeroPair(if tau > 0.0 {
        [small, big]
    } else {
        [big, small]
    })
}

pub fn cubic_from_zeros(d: &DistinctZeroPair) -> MonicCubic {
    let (x1, x2) = (d.x1, d.x2);
    MonicCubic {
        y1: -(2.0 * x1 + x2),
        y2: x1 * (x1 + 2.0 * x2),
        y3: -(x1 * x1 * x2),
    }
}

/// Double/simple zeros from `(y1, y2)`:
/// `x1 = (-y1 + sigma * s)/3`, `x2 = -y1 - 2 x1`, `s` the principal root of
/// `y1^2 - 3 y2` and `sigma` the branch sign. The two branches are the two
/// solutions of `3 x1^2 + 2 y1 x1 + y2 = 0`.
pub fn cubic_zeros_branch(y1: Cx, y2: Cx, b: Branch) -> DistinctZeroPair {
    let s = sqrt_branch(y1 * y1 - 3.0 * y2, b.sign);
    let x1 = (-y1 + s) / 3.0;
    DistinctZeroPair {
        x1,
        x2: -y1 - 2.0 * x1,
    }
}

/// [`cubic_zeros_branch`] with the discriminant `y1^2 - 3 y2` supplied by the caller.
pub(crate) fn cubic_zeros_with_disc(y1: Cx, disc: Cx, b: Branch) -> DistinctZeroPair {
    let s = sqrt_branch(disc, b.sign);
    let x1 = (-y1 + s) / 3.0;
    DistinctZeroPair {
        x1,
        x2: -y1 - 2.0 * x1,
    }
}

/// The zero formula with the prefactor `1/2` instead of `1/3`:
/// `x_n = (1/2){-y1 + S (-1)^n n sqrt(y1^2 - 3 y2)}`.
///
/// Kept only to document that it does not invert [`cubic_from_zeros`]; the
/// verification report prints its round-trip residual next to the `1/3` form.
pub fn cubic_zeros_half_prefactor(y1: Cx, y2: Cx, s: Sign) -> DistinctZeroPair {
    let root = sqrt_branch(y1 * y1 - 3.0 * y2, s);
    DistinctZeroPair {
        x1: 0.5 * (-y1 - root),
        x2: 0.5 * (-y1 + 2.0 * root),
    }
}

/// `y3 = {-2 y1^3 + 9 y1 y2 + 2 S (y1^2 - 3 y2)^(3/2)} / 27`, the cube taken
/// of `sqrt_branch(y1^2 - 3 y2, S)`.
pub fn y3_from_y12(y1: Cx, y2: Cx, s: Sign) -> Cx {
    let w = sqrt_branch(y1 * y1 - 3.0 * y2, s);
    (-2.0 * y1 * y1 * y1 + 9.0 * y1 * y2 + 2.0 * w * w * w) / 27.0
}
