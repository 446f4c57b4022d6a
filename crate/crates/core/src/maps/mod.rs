//! One-step recursion maps.
//!
//! Every map takes the per-step sign `S` explicitly. The two-parameter
//! families live here; the `B/C` generalisation and the linear conjugation
//! of the cubic family have their own modules.

pub mod conjugated;
pub mod generalized;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{check_finite, cpow, sqrt_branch, Cx, Sign};
use crate::pair::{DistinctZeroPair, ZeroPair};
use crate::ysystem::YParams;

pub use conjugated::{
    conda_residual, conjugation_coefficients, generalized_k1_table, k1_coeff_table,
    k1_table_from_printed_eta, step_conjugated, step_conjugated_k_minus_one,
    ConjugationCoefficients, K1CoeffTable, LinearChange,
};
pub use generalized::{step_generalized, yz_forward, yz_invert, GeneralizedParams};

fn exp_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b)
        .ok_or(Error::ExponentOverflow { step: None })
}

fn exp_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b)
        .ok_or(Error::ExponentOverflow { step: None })
}

/// `(-1)^n` as a real factor.
fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Quadratic family `x_n' = [-(x1+x2)]^k [a(x1+x2) + S(-1)^n b(x1-x2)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFamilyParams {
    pub a: Cx,
    pub b: Cx,
    pub k: i64,
}

impl QuadraticFamilyParams {
    pub fn new(a: Cx, b: Cx, k: i64) -> Self {
        Self { a, b, k }
    }

    /// `alpha = 2a`, `beta = 2b`, `gamma = a^2 - b^2`, `q = 2k`, `r = 2(1+k)`.
    pub fn sqrt_params(&self) -> SqrtSystemParams {
        SqrtSystemParams {
            alpha: 2.0 * self.a,
            beta: 2.0 * self.b,
            gamma: self.a * self.a - self.b * self.b,
            k: self.k,
            q: 2 * self.k,
            r: 2 * (1 + self.k),
        }
    }
}

/// Cubic family `x_n' = (2x1+x2)^k [(-1)^k a(2x1+x2) + S(-1)^n n b(x1-x2)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicFamilyParams {
    pub a: Cx,
    pub b: Cx,
    pub k: i64,
}

impl CubicFamilyParams {
    pub fn new(a: Cx, b: Cx, k: i64) -> Self {
        Self { a, b, k }
    }

    /// `alpha = 3a`, `beta = 3b`, `gamma = 3(a^2 - b^2)`, `q = 2k`, `r = 2(1+k)`.
    pub fn sqrt_params(&self) -> SqrtSystemParams {
        SqrtSystemParams {
            alpha: 3.0 * self.a,
            beta: 3.0 * self.b,
            gamma: 3.0 * (self.a * self.a - self.b * self.b),
            k: self.k,
            q: 2 * self.k,
            r: 2 * (1 + self.k),
        }
    }
}

/// Parameters of the square-root systems obtained by pushing the y-system
/// through the quadratic or cubic bridge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtSystemParams {
    pub alpha: Cx,
    pub beta: Cx,
    pub gamma: Cx,
    pub k: i64,
    pub q: i64,
    pub r: i64,
}

impl SqrtSystemParams {
    pub fn y_params(&self) -> Result<YParams> {
        YParams::new(self.alpha, self.beta, self.gamma, self.k, self.q, self.r)
    }
}

pub fn step_quadratic_family(p: &QuadraticFamilyParams, s: Sign, x: &ZeroPair) -> Result<ZeroPair> {
    let [x1, x2] = x.0;
    let sum = x1 + x2;
    let base = cpow(-sum, p.k)?;
    let lead = p.a * sum;
    let t = p.b * (x1 - x2) * s.value();
    Ok(ZeroPair([
        check_finite(base * (lead - t))?,
        check_finite(base * (lead + t))?,
    ]))
}

pub fn step_cubic_family(
    p: &CubicFamilyParams,
    s: Sign,
    x: &DistinctZeroPair,
) -> Result<DistinctZeroPair> {
    let w = 2.0 * x.x1 + x.x2;
    let base = cpow(w, p.k)?;
    let lead = parity(p.k) * p.a * w;
    let t = p.b * (x.x1 - x.x2) * s.value();
    Ok(DistinctZeroPair {
        x1: check_finite(base * (lead - t))?,
        x2: check_finite(base * (lead + 2.0 * t))?,
    })
}

/// Two steps of the cubic family in one go:
///
/// ```text
/// x_n(l+2) = (-1)^k 3^(k+1) a^k w^(k(k+2)) {a^2 w - S(l)S(l+1) (-1)^n n b^2 v}
/// ```
///
/// with `w = 2x1+x2`, `v = x1-x2`. Only the product of the two signs enters.
pub fn double_step_cubic(
    p: &CubicFamilyParams,
    s01: Sign,
    x: &DistinctZeroPair,
) -> Result<DistinctZeroPair> {
    let w = 2.0 * x.x1 + x.x2;
    let v = x.x1 - x.x2;
    let k = p.k;
    let prefactor = parity(k)
        * cpow(Cx::new(3.0, 0.0), exp_add(k, 1)?)?
        * cpow(p.a, k)?
        * cpow(w, exp_mul(k, exp_add(k, 2)?)?)?;
    let lead = p.a * p.a * w;
    let t = p.b * p.b * v * s01.value();
    Ok(DistinctZeroPair {
        x1: check_finite(prefactor * (lead + t))?,
        x2: check_finite(prefactor * (lead - 2.0 * t))?,
    })
}

/// Square-root quadratic system:
///
/// ```text
/// x_n' = (1/2){-alpha [-(x1+x2)]^(k+1) + (-1)^n D1}
/// D1   = S {alpha^2 [-(x1+x2)]^(2(k+1)) - 4 beta^2 x1 x2 [-(x1+x2)]^q - 4 gamma [-(x1+x2)]^r}^(1/2)
/// ```
pub fn step_sqrt_quadratic(p: &SqrtSystemParams, s: Sign, x: &ZeroPair) -> Result<ZeroPair> {
    let [x1, x2] = x.0;
    let m = -(x1 + x2);
    let lead = p.alpha * cpow(m, exp_add(p.k, 1)?)?;
    let disc = p.alpha * p.alpha * cpow(m, exp_mul(2, exp_add(p.k, 1)?)?)?
        - 4.0 * p.beta * p.beta * x1 * x2 * cpow(m, p.q)?
        - 4.0 * p.gamma * cpow(m, p.r)?;
    let delta = sqrt_branch(check_finite(disc)?, s);
    Ok(ZeroPair([
        check_finite(0.5 * (-lead - delta))?,
        check_finite(0.5 * (-lead + delta))?,
    ]))
}

/// Which zero formula the square-root cubic system uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicZeroForm {
    /// `x_n' = (1/3){-y1' + S(-1)^n n D}`, `D^2 = y1'^2 - 3 y2'` with
    /// `y2 = x1(x1+2x2)`; consistent with the double-root bridge.
    Corrected,
    /// Prefactor `1/2`, no `n` factor, and `x1^2 x2` in place of
    /// `x1(x1+2x2)` under the root. Does not reproduce the cubic family.
    Printed,
}

/// Square-root cubic system, the image of the y-system under the double-root
/// bridge.
pub fn step_sqrt_cubic(
    p: &SqrtSystemParams,
    s: Sign,
    x: &DistinctZeroPair,
) -> Result<DistinctZeroPair> {
    step_sqrt_cubic_with(p, s, x, CubicZeroForm::Corrected)
}

pub fn step_sqrt_cubic_with(
    p: &SqrtSystemParams,
    s: Sign,
    x: &DistinctZeroPair,
    form: CubicZeroForm,
) -> Result<DistinctZeroPair> {
    let (x1, x2) = (x.x1, x.x2);
    let m = -(2.0 * x1 + x2);
    let lead = p.alpha * cpow(m, exp_add(p.k, 1)?)?;
    let coupling = match form {
        CubicZeroForm::Corrected => x1 * (x1 + 2.0 * x2),
        CubicZeroForm::Printed => x1 * x1 * x2,
    };
    let disc = p.alpha * p.alpha * cpow(m, exp_mul(2, exp_add(p.k, 1)?)?)?
        - 3.0 * p.beta * p.beta * coupling * cpow(m, p.q)?
        - 3.0 * p.gamma * cpow(m, p.r)?;
    let delta = sqrt_branch(check_finite(disc)?, s);
    let (n1, n2) = match form {
        CubicZeroForm::Corrected => ((-lead - delta) / 3.0, (-lead + 2.0 * delta) / 3.0),
        CubicZeroForm::Printed => (0.5 * (-lead - delta), 0.5 * (-lead + delta)),
    };
    Ok(DistinctZeroPair {
        x1: check_finite(n1)?,
        x2: check_finite(n2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{approx_eq, c, re, Tolerance};
    use crate::pair::{pair_eq_unordered, PairState};

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn dz(x1: f64, x2: f64) -> DistinctZeroPair {
        DistinctZeroPair::new(re(x1), re(x2))
    }

    #[test]
    fn quadratic_family_examples() {
        let p = QuadraticFamilyParams::new(re(1.0), re(1.0), 1);
        let x = ZeroPair::new(re(1.0), re(0.0));
        let plus = step_quadratic_family(&p, Sign::Plus, &x).unwrap();
        let minus = step_quadratic_family(&p, Sign::Minus, &x).unwrap();
        let expect = ZeroPair::new(re(-2.0), re(0.0));
        assert!(pair_eq_unordered(&plus, &expect, TOL));
        assert!(pair_eq_unordered(&minus, &expect, TOL));
        assert_eq!(plus, minus.swapped());
    }

    #[test]
    fn quadratic_family_k1_matches_displayed_form() {
        // x_n' = -(x1+x2)[a(x1+x2) + S b(x_n - x_{n+1})], with S = -s
        let p = QuadraticFamilyParams::new(c(0.3, -0.2), c(1.1, 0.4), 1);
        let (x1, x2) = (c(0.7, 0.2), c(-0.3, 0.9));
        let got = step_quadratic_family(&p, Sign::Plus, &ZeroPair::new(x1, x2)).unwrap();
        let big_s = -1.0;
        let d1 = -(x1 + x2) * (p.a * (x1 + x2) + big_s * p.b * (x1 - x2));
        let d2 = -(x1 + x2) * (p.a * (x1 + x2) + big_s * p.b * (x2 - x1));
        assert!(approx_eq(got.0[0], d1, TOL) && approx_eq(got.0[1], d2, TOL));
    }

    #[test]
    fn quadratic_family_b_zero_collapses() {
        let p = QuadraticFamilyParams::new(c(0.5, 0.5), re(0.0), 2);
        let (x1, x2) = (c(0.2, 0.1), c(0.6, -0.3));
        let out = step_quadratic_family(&p, Sign::Plus, &ZeroPair::new(x1, x2)).unwrap();
        let sum = x1 + x2;
        let expect = (-sum) * (-sum) * p.a * sum;
        assert!(approx_eq(out.0[0], expect, TOL) && approx_eq(out.0[1], expect, TOL));
    }

    #[test]
    fn quadratic_family_negative_k_on_zero_sum() {
        let p = QuadraticFamilyParams::new(re(1.0), re(1.0), -1);
        let x = ZeroPair::new(re(1.0), re(-1.0));
        assert!(matches!(
            step_quadratic_family(&p, Sign::Plus, &x),
            Err(Error::ZeroToNegativePower { .. })
        ));
    }

    #[test]
    fn cubic_family_examples() {
        let p = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        assert_eq!(
            step_cubic_family(&p, Sign::Plus, &dz(1.0, 0.0)).unwrap(),
            dz(-6.0, 0.0)
        );
        assert_eq!(
            step_cubic_family(&p, Sign::Minus, &dz(1.0, 0.0)).unwrap(),
            dz(-2.0, -8.0)
        );
        let p0 = CubicFamilyParams::new(c(0.4, 0.3), re(0.0), 2);
        let x = DistinctZeroPair::new(c(0.1, 0.5), c(-0.7, 0.2));
        let out = step_cubic_family(&p0, Sign::Minus, &x).unwrap();
        let w = 2.0 * x.x1 + x.x2;
        let expect = w * w * p0.a * w;
        assert!(approx_eq(out.x1, expect, TOL) && approx_eq(out.x2, expect, TOL));
    }

    #[test]
    fn double_step_examples() {
        let p = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        assert_eq!(
            double_step_cubic(&p, Sign::Plus, &dz(1.0, 0.0)).unwrap(),
            dz(-216.0, 0.0)
        );
        assert_eq!(
            double_step_cubic(&p, Sign::Minus, &dz(1.0, 0.0)).unwrap(),
            dz(-72.0, -288.0)
        );
        // iterate with S = +, S' = - as a cross-check
        let one = step_cubic_family(&p, Sign::Plus, &dz(1.0, 0.0)).unwrap();
        let two = step_cubic_family(&p, Sign::Minus, &one).unwrap();
        assert!(two.same_state(&dz(-72.0, -288.0), TOL));

        let p0 = CubicFamilyParams::new(c(0.8, -0.1), re(0.0), 2);
        let x = DistinctZeroPair::new(c(0.3, 0.2), c(0.5, -0.4));
        assert_eq!(
            double_step_cubic(&p0, Sign::Plus, &x).unwrap(),
            double_step_cubic(&p0, Sign::Minus, &x).unwrap()
        );
    }

    #[test]
    fn sqrt_quadratic_zero_beta_gamma() {
        let p = SqrtSystemParams {
            alpha: c(0.7, 0.2),
            beta: re(0.0),
            gamma: re(0.0),
            k: 2,
            q: 1,
            r: 3,
        };
        let x = ZeroPair::new(c(0.3, 0.1), c(0.4, -0.5));
        let out = step_sqrt_quadratic(&p, Sign::Plus, &x).unwrap();
        let m = -(x.0[0] + x.0[1]);
        let expect = ZeroPair::new(re(0.0), -p.alpha * m * m * m);
        assert!(pair_eq_unordered(&out, &expect, TOL));
    }

    #[test]
    fn sqrt_quadratic_on_zero_sum_line() {
        let p = SqrtSystemParams {
            alpha: c(0.7, 0.2),
            beta: c(1.0, 1.0),
            gamma: re(2.0),
            k: 1,
            q: 1,
            r: 2,
        };
        let out = step_sqrt_quadratic(&p, Sign::Minus, &ZeroPair::new(c(0.3, 0.4), c(-0.3, -0.4)))
            .unwrap();
        assert_eq!(out, ZeroPair::new(re(0.0), re(0.0)));
    }

    #[test]
    fn sqrt_quadratic_sign_swaps() {
        let p = SqrtSystemParams {
            alpha: c(0.7, 0.2),
            beta: c(1.0, 1.0),
            gamma: re(2.0),
            k: 2,
            q: -1,
            r: 2,
        };
        let x = ZeroPair::new(c(0.3, 0.4), c(0.1, -0.9));
        let plus = step_sqrt_quadratic(&p, Sign::Plus, &x).unwrap();
        let minus = step_sqrt_quadratic(&p, Sign::Minus, &x).unwrap();
        assert_eq!(plus, minus.swapped());
    }

    #[test]
    fn sqrt_cubic_reduces_to_cubic_family() {
        let fam = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        let sp = fam.sqrt_params();
        let x = dz(1.0, 0.0);
        let mut got: Vec<_> = Sign::BOTH
            .iter()
            .map(|&s| step_sqrt_cubic(&sp, s, &x).unwrap())
            .collect();
        let expect = [dz(-6.0, 0.0), dz(-2.0, -8.0)];
        if !got[0].same_state(&expect[0], TOL) {
            got.swap(0, 1);
        }
        assert!(got[0].same_state(&expect[0], TOL) && got[1].same_state(&expect[1], TOL));
    }

    #[test]
    fn sqrt_cubic_equal_zeros_branches_coincide() {
        let fam = CubicFamilyParams::new(c(0.6, 0.2), c(-0.4, 0.9), 2);
        let sp = fam.sqrt_params();
        let x = DistinctZeroPair::new(c(0.3, -0.2), c(0.3, -0.2));
        let a = step_sqrt_cubic(&sp, Sign::Plus, &x).unwrap();
        let b = step_sqrt_cubic(&sp, Sign::Minus, &x).unwrap();
        // the discriminant vanishes only up to roundoff, and its root amplifies that
        assert!(a.same_state(&b, Tolerance::new(1e-6, 1e-12).unwrap()));
    }

    #[test]
    fn sqrt_cubic_zero_b_components_equal() {
        let fam = CubicFamilyParams::new(c(0.6, 0.2), re(0.0), 1);
        let x = DistinctZeroPair::new(c(0.3, -0.2), c(-0.5, 0.1));
        let out = step_sqrt_cubic(&fam.sqrt_params(), Sign::Plus, &x).unwrap();
        // the discriminant cancels to roundoff level before the root is taken
        assert!(approx_eq(
            out.x1,
            out.x2,
            Tolerance::new(1e-6, 1e-12).unwrap()
        ));
    }

    #[test]
    fn printed_sqrt_cubic_differs() {
        let fam = CubicFamilyParams::new(re(1.0), re(1.0), 1);
        let printed = step_sqrt_cubic_with(
            &fam.sqrt_params(),
            Sign::Plus,
            &dz(1.0, 0.0),
            CubicZeroForm::Printed,
        )
        .unwrap();
        let targets = [dz(-6.0, 0.0), dz(-2.0, -8.0)];
        assert!(targets
            .iter()
            .all(|t| !printed.same_state(t, Tolerance::rel(1e-3))));
    }
}
