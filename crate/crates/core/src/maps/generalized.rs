//! The `B/C` generalisation: `y1 = B1 z1 + B2 z2`,
//! `y2 = C1 z1^2 + C2 z2^2 + C3 z1 z2`, with the y-system taken at
//! `q = 2k`, `r = 2(1+k)`.
//!
//! The resulting step map is
//! `z_n' = (B1 z1 + B2 z2)^k (E_n1 z1 + E_n2 z2)`. For `k = 1` it is the
//! displayed homogeneous quadratic, and for `k = -1` the rational form whose
//! numerator table equals `E` entry for entry, so one table serves every `k`.

use serde::{Deserialize, Serialize};

use crate::bridge::{labelled_quadratic_roots, labelled_roots_with_disc, Branch};
use crate::error::{Error, Result};
use crate::numeric::{check_finite, cpow, is_finite, Cx, Sign};
use crate::pair::OrderedPair;
use crate::ysystem::{YParams, YState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedParams {
    alpha: Cx,
    beta: Cx,
    b: [Cx; 2],
    c: [Cx; 3],
    k: i64,
    d: Cx,
    g: [Cx; 3],
    gamma: Cx,
}

impl GeneralizedParams {
    /// Validates `B2 != 0` and `B1^2 C2 + B2^2 C1 - B1 B2 C3 != 0`, then
    /// derives `d`, `g1..g3` and `gamma`.
    pub fn new(alpha: Cx, beta: Cx, b: [Cx; 2], c: [Cx; 3], k: i64) -> Result<Self> {
        let all = [alpha, beta, b[0], b[1], c[0], c[1], c[2]];
        if !all.iter().all(|&v| is_finite(v)) {
            return Err(Error::InvalidParams(
                "non-finite generalized parameter".into(),
            ));
        }
        let [b1, b2] = b;
        let [c1, c2, c3] = c;
        if b2 == Cx::new(0.0, 0.0) {
            return Err(Error::InvalidParams("B2 must be non-zero".into()));
        }
        let denom = b1 * b1 * c2 + b2 * b2 * c1 - b1 * b2 * c3;
        if denom == Cx::new(0.0, 0.0) {
            return Err(Error::InvalidParams(
                "B1^2 C2 + B2^2 C1 - B1 B2 C3 must be non-zero".into(),
            ));
        }
        let d = 0.5 / denom;
        let g1 = 2.0 * b1 * c2 - b2 * c3;
        let g2 = 2.0 * b2 * c1 - b1 * c3;
        let g3 = -g1;
        let gamma = (c3 * c3 - 4.0 * c1 * c2) * (beta * beta - alpha * alpha) / (4.0 * denom);
        let out = Self {
            alpha,
            beta,
            b,
            c,
            k,
            d,
            g: [g1, g2, g3],
            gamma,
        };
        for v in [d, g1, g2, gamma] {
            check_finite(v)?;
        }
        Ok(out)
    }

    pub fn alpha(&self) -> Cx {
        self.alpha
    }
    pub fn beta(&self) -> Cx {
        self.beta
    }
    pub fn b(&self) -> [Cx; 2] {
        self.b
    }
    pub fn c(&self) -> [Cx; 3] {
        self.c
    }
    pub fn k(&self) -> i64 {
        self.k
    }
    pub fn d(&self) -> Cx {
        self.d
    }
    /// `[g1, g2, g3]`; `g3 = -g1` identically.
    pub fn g(&self) -> [Cx; 3] {
        self.g
    }
    pub fn gamma(&self) -> Cx {
        self.gamma
    }

    /// y-system parameters `(alpha, beta, gamma, k, 2k, 2(1+k))` driving this map.
    pub fn y_params(&self) -> Result<YParams> {
        YParams::special(self.alpha, self.beta, self.gamma, self.k)
    }

    /// The coefficient table `E` for sign `s`.
    ///
    /// `E12` is written `d B2 (alpha g1 + S beta g3)`; the expanded
    /// `d (alpha g1 B2 + S beta B2 g3)` is the same number.
    pub fn e_table(&self, s: Sign) -> [[Cx; 2]; 2] {
        let [b1, b2] = self.b;
        let [g1, g2, g3] = self.g;
        let (al, d) = (self.alpha, self.d);
        let sb = self.beta * s.value();
        let damp = al * (1.0 - b1 * d * g1);
        [
            [
                d * (al * g1 * b1 + sb * b2 * g2),
                d * b2 * (al * g1 + sb * g3),
            ],
            [damp * (b1 / b2) - b1 * d * sb * g2, damp - b1 * d * sb * g3],
        ]
    }

    /// `B1 z1 + B2 z2`
    pub fn linear_form(&self, z: &OrderedPair) -> Cx {
        self.b[0] * z[0] + self.b[1] * z[1]
    }
}

pub fn step_generalized(p: &GeneralizedParams, s: Sign, z: &OrderedPair) -> Result<OrderedPair> {
    let e = p.e_table(s);
    let base = cpow(p.linear_form(z), p.k)?;
    Ok([
        check_finite(base * (e[0][0] * z[0] + e[0][1] * z[1]))?,
        check_finite(base * (e[1][0] * z[0] + e[1][1] * z[1]))?,
    ])
}

pub fn yz_forward(p: &GeneralizedParams, z: &OrderedPair) -> YState {
    let [c1, c2, c3] = p.c;
    let [z1, z2] = *z;
    YState {
        y1: p.linear_form(z),
        y2: c1 * z1 * z1 + c2 * z2 * z2 + c3 * z1 * z2,
    }
}

/// Coefficients `(f, g, h)` of the quadratic in `z1` solved by [`yz_invert`].
fn inversion_quadratic(p: &GeneralizedParams, y: &YState) -> Result<(Cx, Cx, Cx)> {
    let [b1, b2] = p.b;
    let [c1, c2, c3] = p.c;
    let b2sq = b2 * b2;
    let f = (b2sq * c1 + b1 * b1 * c2 - c3 * b1 * b2) / b2sq;
    if f == Cx::new(0.0, 0.0) || !is_finite(f) {
        return Err(Error::DegenerateQuadratic);
    }
    let g = (b2 * c3 - 2.0 * b1 * c2) * y.y1 / b2sq;
    let h = (c2 * y.y1 * y.y1 - b2sq * y.y2) / b2sq;
    Ok((f, g, h))
}

/// Inverse of [`yz_forward`]: `z1 = (-g ± G)/(2f)` with `G` the principal
/// root of `g^2 - 4fh`, `z2 = (y1 - B1 z1)/B2`.
pub fn yz_invert(p: &GeneralizedParams, y: &YState, b: Branch) -> Result<OrderedPair> {
    yz_invert_with_disc(p, y, None, b)
}

/// `g^2 - 4fh` of [`yz_invert`] at the coefficients of `z`, formed as
/// `(2 f z1 + g)^2` so it does not cancel when the two preimages are close.
///
/// It equals `(C3^2 - 4 C1 C2)/B2^2 (y1^2 - kappa y2)` with
/// `kappa = (alpha^2 - beta^2)/gamma`, so it evolves by the same factor as
/// the special-system discriminant.
pub(crate) fn inversion_discriminant(p: &GeneralizedParams, z: &OrderedPair) -> Result<Cx> {
    let (f, g, _) = inversion_quadratic(p, &yz_forward(p, z))?;
    let w = 2.0 * f * z[0] + g;
    check_finite(w * w)
}

/// [`yz_invert`] with the discriminant `g^2 - 4fh` optionally supplied.
pub(crate) fn yz_invert_with_disc(
    p: &GeneralizedParams,
    y: &YState,
    disc: Option<Cx>,
    b: Branch,
) -> Result<OrderedPair> {
    let [b1, b2] = p.b;
    let (f, g, h) = inversion_quadratic(p, y)?;
    let (plus, minus) = match disc {
        Some(d) => labelled_roots_with_disc(f, g, h, d),
        None => labelled_quadratic_roots(f, g, h),
    };
    let z1 = match b.sign {
        Sign::Plus => plus,
        Sign::Minus => minus,
    };
    let z2 = (y.y1 - b1 * z1) / b2;
    Ok([check_finite(z1)?, check_finite(z2)?])
}
