//! The cubic family seen through an invertible linear change of variables
//! `z = A x`, and the `k = 1` coefficient tables together with their
//! common-zero constraint.
//!
//! With `W = lambda2 z1 + lambda1 z2` (`lambda_n = (-1)^n (2 A_n2 - A_n1)`)
//! the conjugated map reads
//!
//! ```text
//! z_n' = D^-(k+1) W^k [A_n1 f1 + A_n2 f2]
//! f_m  = (th(2,m;m) A22 - th(1,m;m+1) A21) z1 + (th(1,m;m+1) A11 - th(2,m;m) A12) z2
//! th(n1,n2;n) = (-1)^k n1 a + (-1)^n n2 S b
//! ```
//!
//! `f_m` is `D` times the bracket of the cubic family's `m`-th component
//! written in the `z` variables.

use serde::{Deserialize, Serialize};

use super::generalized::GeneralizedParams;
use super::{parity, CubicFamilyParams};
use crate::error::{Error, Result};
use crate::numeric::{check_finite, cpow, is_finite, Cx, Sign};
use crate::pair::OrderedPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearChange {
    pub a11: Cx,
    pub a12: Cx,
    pub a21: Cx,
    pub a22: Cx,
}

impl LinearChange {
    pub fn new(a11: Cx, a12: Cx, a21: Cx, a22: Cx) -> Result<Self> {
        let m = Self { a11, a12, a21, a22 };
        if ![a11, a12, a21, a22].iter().all(|&v| is_finite(v)) {
            return Err(Error::InvalidParams("non-finite matrix entry".into()));
        }
        if m.det() == Cx::new(0.0, 0.0) {
            return Err(Error::SingularChange);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let (one, zero) = (Cx::new(1.0, 0.0), Cx::new(0.0, 0.0));
        Self {
            a11: one,
            a12: zero,
            a21: zero,
            a22: one,
        }
    }

    pub fn det(&self) -> Cx {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    fn row(&self, n: usize) -> [Cx; 2] {
        if n == 0 {
            [self.a11, self.a12]
        } else {
            [self.a21, self.a22]
        }
    }

    /// `z = A x`
    pub fn apply(&self, x: &OrderedPair) -> OrderedPair {
        [
            self.a11 * x[0] + self.a12 * x[1],
            self.a21 * x[0] + self.a22 * x[1],
        ]
    }

    /// `x = A^-1 z`
    pub fn invert(&self, z: &OrderedPair) -> Result<OrderedPair> {
        let d = self.det();
        if d == Cx::new(0.0, 0.0) {
            return Err(Error::SingularChange);
        }
        Ok([
            check_finite((self.a22 * z[0] - self.a12 * z[1]) / d)?,
            check_finite((-self.a21 * z[0] + self.a11 * z[1]) / d)?,
        ])
    }

    /// `[lambda1, lambda2]`
    pub fn lambdas(&self) -> [Cx; 2] {
        [self.a11 - 2.0 * self.a12, 2.0 * self.a22 - self.a21]
    }
}

/// `(-1)^k n1 a + (-1)^n n2 S b`
fn theta(p: &CubicFamilyParams, k: i64, s: Sign, n1: f64, n2: f64, n: i64) -> Cx {
    parity(k) * n1 * p.a + parity(n) * n2 * s.value() * p.b
}

/// Which index pattern is used for the `f_m` coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThetaIndices {
    Derived,
    /// `(th(2,m;1) A22 - th(1,m;1) A21) z1 + (th(1,m;0) A11 + th(2,m;0) A12) z2`
    Printed,
}

/// Coefficients `(P_m, Q_m)` of `f_m = P_m z1 + Q_m z2`.
fn f_coeffs(
    a: &LinearChange,
    p: &CubicFamilyParams,
    k: i64,
    s: Sign,
    form: ThetaIndices,
) -> [[Cx; 2]; 2] {
    let mut out = [[Cx::new(0.0, 0.0); 2]; 2];
    for (idx, row) in out.iter_mut().enumerate() {
        let m = idx as i64 + 1;
        let mf = m as f64;
        *row = match form {
            ThetaIndices::Derived => [
                theta(p, k, s, 2.0, mf, m) * a.a22 - theta(p, k, s, 1.0, mf, m + 1) * a.a21,
                theta(p, k, s, 1.0, mf, m + 1) * a.a11 - theta(p, k, s, 2.0, mf, m) * a.a12,
            ],
            ThetaIndices::Printed => [
                theta(p, k, s, 2.0, mf, 1) * a.a22 - theta(p, k, s, 1.0, mf, 1) * a.a21,
                theta(p, k, s, 1.0, mf, 0) * a.a11 + theta(p, k, s, 2.0, mf, 0) * a.a12,
            ],
        };
    }
    out
}

fn conjugated_step(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
    z: &OrderedPair,
    form: ThetaIndices,
) -> Result<OrderedPair> {
    let d = a.det();
    if d == Cx::new(0.0, 0.0) {
        return Err(Error::SingularChange);
    }
    let [l1, l2] = a.lambdas();
    let w = l2 * z[0] + l1 * z[1];
    let k = p.k;
    let kp1 = k
        .checked_add(1)
        .ok_or(Error::ExponentOverflow { step: None })?;
    let scale = cpow(d, -kp1)? * cpow(w, k)?;
    let fc = f_coeffs(a, p, k, s, form);
    let f = [
        fc[0][0] * z[0] + fc[0][1] * z[1],
        fc[1][0] * z[0] + fc[1][1] * z[1],
    ];
    let mut out = [Cx::new(0.0, 0.0); 2];
    for (n, slot) in out.iter_mut().enumerate() {
        let [an1, an2] = a.row(n);
        *slot = check_finite(scale * (an1 * f[0] + an2 * f[1]))?;
    }
    Ok(out)
}

/// One step of the conjugated cubic family; equals
/// `A step_cubic_family(p, s, A^-1 z)`.
pub fn step_conjugated(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
    z: &OrderedPair,
) -> Result<OrderedPair> {
    conjugated_step(a, p, s, z, ThetaIndices::Derived)
}

/// The same map with the `f_m` index pattern as displayed alongside the
/// theta definition. Only used to report that it is not the conjugate.
pub fn step_conjugated_printed(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
    z: &OrderedPair,
) -> Result<OrderedPair> {
    conjugated_step(a, p, s, z, ThetaIndices::Printed)
}

/// Rational form at `k = -1`: `z_n' = (A_n1 f1 + A_n2 f2) / (lambda2 z1 + lambda1 z2)`.
pub fn step_conjugated_k_minus_one(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
    z: &OrderedPair,
) -> Result<OrderedPair> {
    if p.k != -1 {
        return Err(Error::InvalidParams(format!(
            "rational form needs k = -1, got {}",
            p.k
        )));
    }
    let [l1, l2] = a.lambdas();
    let den = l2 * z[0] + l1 * z[1];
    if den == Cx::new(0.0, 0.0) {
        return Err(Error::ZeroToNegativePower {
            exponent: -1,
            step: None,
        });
    }
    let fc = f_coeffs(a, p, -1, s, ThetaIndices::Derived);
    let f = [
        fc[0][0] * z[0] + fc[0][1] * z[1],
        fc[1][0] * z[0] + fc[1][1] * z[1],
    ];
    Ok([
        check_finite((a.a11 * f[0] + a.a12 * f[1]) / den)?,
        check_finite((a.a21 * f[0] + a.a22 * f[1]) / den)?,
    ])
}

/// `lambda_n` and `eta_mj` (`eta[m][0]` multiplies `z1`, `eta[m][1]` multiplies `z2` in `f_m`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugationCoefficients {
    pub det: Cx,
    pub lambda: [Cx; 2],
    pub eta: [[Cx; 2]; 2],
}

pub fn conjugation_coefficients(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
) -> ConjugationCoefficients {
    ConjugationCoefficients {
        det: a.det(),
        lambda: a.lambdas(),
        eta: f_coeffs(a, p, p.k, s, ThetaIndices::Derived),
    }
}

/// Coefficients of a homogeneous quadratic map
/// `x_n' = a_n1 x1^2 + a_n2 x2^2 + a_n3 x1 x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K1CoeffTable {
    pub a: [[Cx; 3]; 2],
}

impl K1CoeffTable {
    pub fn new(rows: [[Cx; 3]; 2]) -> Self {
        Self { a: rows }
    }

    pub fn eval(&self, z: &OrderedPair) -> OrderedPair {
        let [z1, z2] = *z;
        let row = |r: &[Cx; 3]| r[0] * z1 * z1 + r[1] * z2 * z2 + r[2] * z1 * z2;
        [row(&self.a[0]), row(&self.a[1])]
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

fn table_from_eta(a: &LinearChange, lambda: [Cx; 2], eta: [[Cx; 2]; 2]) -> Result<K1CoeffTable> {
    let d = a.det();
    if d == Cx::new(0.0, 0.0) {
        return Err(Error::SingularChange);
    }
    let inv_d2 = (d * d).inv();
    let [l1, l2] = lambda;
    let mut rows = [[Cx::new(0.0, 0.0); 3]; 2];
    for (n, row) in rows.iter_mut().enumerate() {
        let [an1, an2] = a.row(n);
        let p_mix = eta[0][0] * an1 + eta[1][0] * an2;
        let q_mix = eta[0][1] * an1 + eta[1][1] * an2;
        *row = [
            check_finite(inv_d2 * l2 * p_mix)?,
            check_finite(inv_d2 * l1 * q_mix)?,
            check_finite(inv_d2 * (l1 * p_mix + l2 * q_mix))?,
        ];
    }
    Ok(K1CoeffTable { a: rows })
}

fn require_k1(k: i64) -> Result<()> {
    if k == 1 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "coefficient table is defined for k = 1, got {k}"
        )))
    }
}

/// `a_nj` of the conjugated cubic family at `k = 1`.
pub fn k1_coeff_table(a: &LinearChange, p: &CubicFamilyParams, s: Sign) -> Result<K1CoeffTable> {
    require_k1(p.k)?;
    let c = conjugation_coefficients(a, p, s);
    table_from_eta(a, c.lambda, c.eta)
}

/// The table built from the `eta` expressions as displayed:
/// `eta_n1 = -th_1(1,n;n) A21 - th_0(2,n;n+1) A22`,
/// `eta_n2 = -th_0(1,n;n) A11 + th_0(2,n;n+1) A12`.
///
/// The `A21` term of `eta_n1` carries the wrong sign on its `b` part, so this
/// table does not reproduce [`step_conjugated`] unless `b A21 = 0`.
pub fn k1_table_from_printed_eta(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
) -> Result<K1CoeffTable> {
    require_k1(p.k)?;
    let mut eta = [[Cx::new(0.0, 0.0); 2]; 2];
    for (idx, row) in eta.iter_mut().enumerate() {
        let n = idx as i64 + 1;
        let nf = n as f64;
        *row = [
            -theta(p, 1, s, 1.0, nf, n) * a.a21 - theta(p, 0, s, 2.0, nf, n + 1) * a.a22,
            -theta(p, 0, s, 1.0, nf, n) * a.a11 + theta(p, 0, s, 2.0, nf, n + 1) * a.a12,
        ];
    }
    table_from_eta(a, a.lambdas(), eta)
}

/// `a_nj` of the generalized `B/C` system at `k = 1`:
/// `a_n1 = B1 E_n1`, `a_n2 = B2 E_n2`, `a_n3 = B1 E_n2 + B2 E_n1`.
pub fn generalized_k1_table(p: &GeneralizedParams, s: Sign) -> Result<K1CoeffTable> {
    require_k1(p.k())?;
    let e = p.e_table(s);
    let [b1, b2] = p.b();
    let row = |r: [Cx; 2]| [b1 * r[0], b2 * r[1], b1 * r[1] + b2 * r[0]];
    Ok(K1CoeffTable {
        a: [row(e[0]), row(e[1])],
    })
}

/// `(a11 a22 - a21 a12)^2 + (a13 a21 - a11 a23)(a13 a22 - a12 a23)`, which
/// vanishes when both rows share a linear factor.
pub fn conda_residual(t: &K1CoeffTable) -> Cx {
    let [[a11, a12, a13], [a21, a22, a23]] = t.a;
    let first = a11 * a22 - a21 * a12;
    first * first + (a13 * a21 - a11 * a23) * (a13 * a22 - a12 * a23)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::step_cubic_family;
    use crate::numeric::{approx_eq, c, re, Tolerance};
    use crate::pair::{DistinctZeroPair, PairState};

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn sample_change() -> LinearChange {
        LinearChange::new(c(0.9, 0.2), c(-0.4, 0.7), c(0.3, -1.1), c(1.2, 0.5)).unwrap()
    }

    fn conjugate_oracle(
        a: &LinearChange,
        p: &CubicFamilyParams,
        s: Sign,
        z: &OrderedPair,
    ) -> OrderedPair {
        let x = a.invert(z).unwrap();
        let out = step_cubic_family(p, s, &DistinctZeroPair::from_array(x)).unwrap();
        a.apply(&out.to_array())
    }

    #[test]
    fn singular_change_rejected() {
        assert_eq!(
            LinearChange::new(re(1.0), re(2.0), re(2.0), re(4.0)),
            Err(Error::SingularChange)
        );
    }

    #[test]
    fn identity_change_is_cubic_family() {
        let p = CubicFamilyParams::new(c(0.5, -0.3), c(0.8, 0.1), 2);
        let x = [c(0.2, 0.4), c(-0.6, 0.3)];
        for s in Sign::BOTH {
            let got = step_conjugated(&LinearChange::identity(), &p, s, &x).unwrap();
            let direct = step_cubic_family(&p, s, &DistinctZeroPair::from_array(x)).unwrap();
            assert!(got.same_state(&direct.to_array(), Tolerance::rel(1e-14)));
        }
    }

    #[test]
    fn diagonal_change_example() {
        let a = LinearChange::new(re(1.0), re(0.0), re(0.0), re(2.0)).unwrap();
        let p = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        let got = step_conjugated(&a, &p, Sign::Plus, &[re(1.0), re(0.0)]).unwrap();
        assert!(got.same_state(&[re(-6.0), re(0.0)], TOL));
    }

    #[test]
    fn conjugation_identity_generic() {
        let a = sample_change();
        let z = [c(0.3, -0.5), c(0.7, 0.2)];
        for k in [-1, 1, 2, 3] {
            let p = CubicFamilyParams::new(c(0.6, 0.4), c(-0.2, 0.9), k);
            for s in Sign::BOTH {
                let got = step_conjugated(&a, &p, s, &z).unwrap();
                assert!(
                    got.same_state(&conjugate_oracle(&a, &p, s, &z), TOL),
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn printed_theta_indices_are_not_the_conjugate() {
        let a = sample_change();
        let p = CubicFamilyParams::new(c(0.6, 0.4), c(-0.2, 0.9), 1);
        let z = [c(0.3, -0.5), c(0.7, 0.2)];
        let printed = step_conjugated_printed(&a, &p, Sign::Plus, &z).unwrap();
        assert!(!printed.same_state(
            &conjugate_oracle(&a, &p, Sign::Plus, &z),
            Tolerance::rel(1e-3)
        ));
    }

    #[test]
    fn rational_form_at_k_minus_one() {
        let a = sample_change();
        let p = CubicFamilyParams::new(c(0.6, 0.4), c(-0.2, 0.9), -1);
        let z = [c(0.3, -0.5), c(0.7, 0.2)];
        for s in Sign::BOTH {
            let r = step_conjugated_k_minus_one(&a, &p, s, &z).unwrap();
            assert!(r.same_state(&step_conjugated(&a, &p, s, &z).unwrap(), TOL));
        }
        let p1 = CubicFamilyParams { k: 1, ..p };
        assert!(step_conjugated_k_minus_one(&a, &p1, Sign::Plus, &z).is_err());
    }

    #[test]
    fn identity_k1_table_by_hand() {
        // w = 2x1 + x2, v = x1 - x2, a = b = 1, S = +:
        // x1' = w(-w - v) = -6 x1^2 - 3 x1 x2, x2' = w(-w + 2v) = -3 x2^2 - 6 x1 x2
        let p = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        let t = k1_coeff_table(&LinearChange::identity(), &p, Sign::Plus).unwrap();
        let expect = [[re(-6.0), re(0.0), re(-3.0)], [re(0.0), re(-3.0), re(-6.0)]];
        for (n, (got, want)) in t.a.iter().zip(&expect).enumerate() {
            for (j, (g, w)) in got.iter().zip(want).enumerate() {
                assert!(approx_eq(*g, *w, TOL), "a{}{}", n + 1, j + 1);
            }
        }
        assert!(conda_residual(&t).norm() < 1e-12);
    }

    #[test]
    fn k1_table_matches_step_on_probes() {
        let a = sample_change();
        let p = CubicFamilyParams::new(c(0.6, 0.4), c(-0.2, 0.9), 1);
        for s in Sign::BOTH {
            let t = k1_coeff_table(&a, &p, s).unwrap();
            for z in [
                [c(0.3, -0.5), c(0.7, 0.2)],
                [re(1.0), re(0.0)],
                [c(-0.1, 0.8), c(0.4, 0.4)],
            ] {
                assert!(t
                    .eval(&z)
                    .same_state(&step_conjugated(&a, &p, s, &z).unwrap(), TOL));
            }
        }
        assert!(k1_coeff_table(&a, &CubicFamilyParams { k: 2, ..p }, Sign::Plus).is_err());
    }

    #[test]
    fn printed_eta_fails_probes_for_generic_change() {
        let a = sample_change();
        let p = CubicFamilyParams::new(c(0.6, 0.4), c(-0.2, 0.9), 1);
        let printed = k1_table_from_printed_eta(&a, &p, Sign::Plus).unwrap();
        let z = [c(0.3, -0.5), c(0.7, 0.2)];
        let truth = step_conjugated(&a, &p, Sign::Plus, &z).unwrap();
        assert!(!printed.eval(&z).same_state(&truth, Tolerance::rel(1e-3)));
        // with A21 = 0 the typo is invisible
        let upper = LinearChange::new(c(0.9, 0.2), c(-0.4, 0.7), re(0.0), c(1.2, 0.5)).unwrap();
        let printed = k1_table_from_printed_eta(&upper, &p, Sign::Plus).unwrap();
        let truth = k1_coeff_table(&upper, &p, Sign::Plus).unwrap();
        assert!(printed.eval(&z).same_state(&truth.eval(&z), TOL));
    }

    #[test]
    fn conda_examples() {
        let t = K1CoeffTable::new([[re(0.0), re(-2.0), re(-2.0)], [re(-2.0), re(0.0), re(-2.0)]]);
        assert_eq!(conda_residual(&t), re(0.0));
        let id = K1CoeffTable::new([[re(1.0), re(0.0), re(0.0)], [re(0.0), re(1.0), re(0.0)]]);
        assert_eq!(conda_residual(&id), re(1.0));
    }

    #[test]
    fn generalized_table_reduces_to_quadratic_family() {
        let p = GeneralizedParams::new(
            re(2.0),
            re(2.0),
            [re(-1.0), re(-1.0)],
            [re(0.0), re(0.0), re(1.0)],
            1,
        )
        .unwrap();
        let t = generalized_k1_table(&p, Sign::Minus).unwrap();
        let expect =
            K1CoeffTable::new([[re(0.0), re(-2.0), re(-2.0)], [re(-2.0), re(0.0), re(-2.0)]]);
        assert_eq!(t, expect);
    }
}
