//! The base solvable system
//!
//! ```text
//! y1' = alpha * y1^(1+k)
//! y2' = beta^2 * y2 * y1^q + gamma * y1^r
//! ```
//!
//! together with its closed-form solution for arbitrary integer `(k, q, r)`
//! and the explicit geometric-sum form for `q = 2k`, `r = 2(1+k)`.
//!
//! Every exponent is computed in exact `i128` arithmetic first and only then
//! applied through [`cpow`]. The exponents grow like `(1+k)^ell`, so an
//! exponent that does not fit in `i64` is reported as
//! [`Error::ExponentOverflow`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{approx_eq, check_finite, cpow, monomial, Cx, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YParams {
    pub alpha: Cx,
    pub beta: Cx,
    pub gamma: Cx,
    pub k: i64,
    pub q: i64,
    pub r: i64,
}

impl YParams {
    pub fn new(alpha: Cx, beta: Cx, gamma: Cx, k: i64, q: i64, r: i64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            k,
            q,
            r,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the geometric-sum assignment `q = 2k`, `r = 2(1+k)`.
    pub fn special(alpha: Cx, beta: Cx, gamma: Cx, k: i64) -> Result<Self> {
        Self::new(alpha, beta, gamma, k, 2 * k, 2 * (1 + k))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParams(
                "k must be non-zero (closed-form exponents divide by k)".into(),
            ));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    pub fn u(&self) -> i64 {
        u_exponent(self.k, self.q, self.r)
    }

    pub fn is_special(&self) -> bool {
        self.q == 2 * self.k && self.r == 2 * (1 + self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YState {
    pub y1: Cx,
    pub y2: Cx,
}

impl YState {
    pub fn new(y1: Cx, y2: Cx) -> Self {
        Self { y1, y2 }
    }

    pub fn approx_eq(&self, other: &YState, tol: Tolerance) -> bool {
        approx_eq(self.y1, other.y1, tol) && approx_eq(self.y2, other.y2, tol)
    }
}

/// Closed-form value at some `ell`.
///
/// `y2_accumulator` is the bracketed sum `Y2(ell)`; it involves
/// `beta^(-2(s+1))` and is `None` when `beta = 0` or when evaluating it on
/// its own overflows (the state itself is computed in a form that does not
/// need it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YClosedForm {
    pub state: YState,
    pub y2_accumulator: Option<Cx>,
    pub u: i64,
}

/// `u = k r - (1+k) q`.
pub fn u_exponent(k: i64, q: i64, r: i64) -> i64 {
    k * r - (1 + k) * q
}

pub fn y_step(p: &YParams, s: &YState) -> Result<YState> {
    let y1 = check_finite(p.alpha * cpow(s.y1, 1 + p.k)?)?;
    let y2 = p.beta * p.beta * s.y2 * cpow(s.y1, p.q)? + p.gamma * cpow(s.y1, p.r)?;
    Ok(YState {
        y1,
        y2: check_finite(y2)?,
    })
}

/// Chained `y_step`, returning `ell + 1` states starting with `y0`.
pub fn y_iterate(p: &YParams, y0: &YState, ell: usize) -> Result<Vec<YState>> {
    let mut out = Vec::with_capacity(ell + 1);
    out.push(*y0);
    let mut cur = *y0;
    for step in 1..=ell {
        cur = y_step(p, &cur).map_err(|e| e.at_step(step))?;
        out.push(cur);
    }
    Ok(out)
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::ExponentOverflow { step: None })
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b)
        .ok_or(Error::ExponentOverflow { step: None })
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b)
        .ok_or(Error::ExponentOverflow { step: None })
}

fn exact_div(numerator: i128, denominator: i128) -> Result<i128> {
    if numerator % denominator != 0 {
        return Err(Error::NonIntegerExponent {
            numerator,
            denominator,
        });
    }
    Ok(numerator / denominator)
}

/// `(1+k)^n` in exact arithmetic.
pub fn growth(k: i64, n: usize) -> Result<i128> {
    let base = 1 + k as i128;
    let mut acc: i128 = 1;
    for _ in 0..n {
        acc = mul(acc, base)?;
    }
    Ok(acc)
}

/// Whether `k | (1+k)^ell - 1` and `k^2 | (1+k)^ell - k*ell - 1`, the two
/// facts that keep every closed-form exponent integral.
pub fn exponents_integral(k: i64, ell: usize) -> Result<(bool, bool)> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be non-zero".into()));
    }
    let k = k as i128;
    let p = growth(k as i64, ell)?;
    let first = (p - 1) % k == 0;
    let second = (p - k * ell as i128 - 1) % (k * k) == 0;
    Ok((first, second))
}

/// Exponents shared by both closed forms at a given `ell`.
struct Exponents {
    /// `(1+k)^ell`
    pow: i128,
    /// `((1+k)^ell - 1) / k`, the power of `alpha` in `y1(ell)`
    alpha_y1: i128,
}

impl Exponents {
    fn at(k: i64, ell: usize) -> Result<Self> {
        let pow = growth(k, ell)?;
        let alpha_y1 = exact_div(pow - 1, k as i128)?;
        Ok(Self { pow, alpha_y1 })
    }
}

fn closed_y1(p: &YParams, c: Cx, ex: &Exponents) -> Result<Cx> {
    monomial(&[(p.alpha, to_i64(ex.alpha_y1)?), (c, to_i64(ex.pow)?)])
}

/// Closed-form solution for general integer `(k, q, r)`.
///
/// `y2(ell)` is evaluated with `beta^(2 ell)` and the homogeneous powers of
/// `alpha` and `y1(0)` folded into each summand, so every term is a single
/// monomial with exact integer exponents; this is the same expression as the
/// bracketed form and stays defined at `beta = 0`.
pub fn y_closed(p: &YParams, y0: &YState, ell: usize) -> Result<YClosedForm> {
    p.validate()?;
    closed_general(p, y0, ell).map_err(|e| e.at_step(ell))
}

fn closed_general(p: &YParams, y0: &YState, ell: usize) -> Result<YClosedForm> {
    let k = p.k as i128;
    let q = p.q as i128;
    let u = p.u() as i128;
    let c = y0.y1;
    let ex = Exponents::at(p.k, ell)?;
    let y1 = closed_y1(p, c, &ex)?;

    // homogeneous part: beta^(2 ell) alpha^F c^G y2(0)
    let l = ell as i128;
    let alpha_hom = mul(q, exact_div(ex.pow - mul(k, l)? - 1, k * k)?)?;
    let c_hom = mul(q, ex.alpha_y1)?;
    let beta2 = p.beta * p.beta;
    let mut y2 = monomial(&[
        (beta2, to_i64(l)?),
        (p.alpha, to_i64(alpha_hom)?),
        (c, to_i64(c_hom)?),
    ])? * y0.y2;

    let mut sum = Cx::new(0.0, 0.0);
    let mut literal_sum: Option<Cx> = if p.beta == Cx::new(0.0, 0.0) {
        None
    } else {
        Some(Cx::new(0.0, 0.0))
    };
    for s in 0..ell {
        let ps = growth(p.k, s)?;
        let si = s as i128;
        let alpha_s = exact_div(add(mul(u, ps - 1)?, mul(mul(k, q)?, si)?)?, k * k)?;
        let c_s = exact_div(add(mul(u, ps)?, q)?, k)?;
        let term = monomial(&[
            (beta2, to_i64(l - 1 - si)?),
            (p.alpha, to_i64(add(alpha_hom, alpha_s)?)?),
            (c, to_i64(add(c_hom, c_s)?)?),
        ])?;
        sum += term;
        if let Some(acc) = literal_sum.as_mut() {
            let lit = (|| {
                monomial(&[
                    (beta2, to_i64(-(si + 1))?),
                    (p.alpha, to_i64(alpha_s)?),
                    (c, to_i64(c_s)?),
                ])
            })();
            match lit {
                Ok(v) => *acc += v,
                Err(_) => literal_sum = None,
            }
        }
    }
    y2 += p.gamma * sum;
    let y2_accumulator = literal_sum
        .map(|acc| y0.y2 + p.gamma * acc)
        .filter(|v| v.re.is_finite() && v.im.is_finite());

    Ok(YClosedForm {
        state: YState {
            y1,
            y2: check_finite(y2)?,
        },
        y2_accumulator,
        u: p.u(),
    })
}

/// Closed form for `q = 2k`, `r = 2(1+k)`, where the sum is geometric with
/// ratio `(alpha/beta)^2`.
///
/// With `A = alpha^2`, `B = beta^2` the summed part is
/// `H = sum_{s<ell} A^s B^(ell-1-s) = (A^ell - B^ell)/(A - B)`. When `A` and
/// `B` are close the closed quotient cancels badly, so the finite sum is
/// evaluated directly; at `A = B` this is exactly the limit `ell * A^(ell-1)`.
pub fn y_closed_special(p: &YParams, y0: &YState, ell: usize) -> Result<YClosedForm> {
    p.validate()?;
    if !p.is_special() {
        return Err(Error::QrMismatch {
            k: p.k,
            q: p.q,
            r: p.r,
        });
    }
    closed_special(p, y0, ell).map_err(|e| e.at_step(ell))
}

/// Relative gap `|A - B| / max(|A|,|B|)` below which the geometric sum is
/// summed term by term.
const GEOMETRIC_DIRECT_GAP: f64 = 1e-4;

fn geometric_sum(a: Cx, b: Cx, ell: usize) -> Result<Cx> {
    if ell == 0 {
        return Ok(Cx::new(0.0, 0.0));
    }
    let n = to_i64(ell as i128)?;
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        // 0^0 = 1 for the single surviving term at ell = 1
        return Ok(if ell == 1 {
            Cx::new(1.0, 0.0)
        } else {
            Cx::new(0.0, 0.0)
        });
    }
    if (a - b).norm() <= GEOMETRIC_DIRECT_GAP * scale {
        let mut sum = Cx::new(0.0, 0.0);
        for s in 0..n {
            sum += cpow(a, s)? * cpow(b, n - 1 - s)?;
        }
        check_finite(sum)
    } else {
        check_finite((cpow(a, n)? - cpow(b, n)?) / (a - b))
    }
}

fn closed_special(p: &YParams, y0: &YState, ell: usize) -> Result<YClosedForm> {
    let k = p.k as i128;
    let c = y0.y1;
    let ex = Exponents::at(p.k, ell)?;
    let y1 = closed_y1(p, c, &ex)?;

    let l = ell as i128;
    let alpha_exp = mul(2, exact_div(ex.pow - mul(k, l)? - 1, k)?)?;
    let c_exp = mul(2, ex.pow - 1)?;
    let a2 = p.alpha * p.alpha;
    let b2 = p.beta * p.beta;
    let h = geometric_sum(a2, b2, ell)?;
    let bracket = cpow(b2, to_i64(l)?)? * y0.y2 + p.gamma * c * c * h;
    let y2 = monomial(&[(p.alpha, to_i64(alpha_exp)?), (c, to_i64(c_exp)?)])? * bracket;

    let y2_accumulator = if b2 == Cx::new(0.0, 0.0) {
        None
    } else {
        // Y2 = y2(0) + gamma beta^-2 c^2 [(rho^ell - 1)/(rho - 1)], rho = (alpha/beta)^2
        let rho = a2 / b2;
        geometric_sum(rho, Cx::new(1.0, 0.0), ell)
            .ok()
            .map(|g| y0.y2 + p.gamma / b2 * c * c * g)
            .filter(|v| v.re.is_finite() && v.im.is_finite())
    };

    Ok(YClosedForm {
        state: YState {
            y1,
            y2: check_finite(y2)?,
        },
        y2_accumulator,
        u: 0,
    })
}

/// Factor `alpha^(2(P-k ell-1)/k) c^(2(P-1)) beta^(2 ell)`, `P = (1+k)^ell`,
/// by which `y1^2 - kappa y2` is multiplied after `ell` steps of the special
/// system when `gamma = (alpha^2 - beta^2)/kappa`.
///
/// Evaluating the discriminant this way avoids the cancellation in
/// `y1^2 - kappa y2`, which matters whenever the two zeros are close.
pub fn special_discriminant_scale(p: &YParams, y0: &YState, ell: usize) -> Result<Cx> {
    p.validate()?;
    if !p.is_special() {
        return Err(Error::QrMismatch {
            k: p.k,
            q: p.q,
            r: p.r,
        });
    }
    discriminant_scale(p, y0.y1, ell).map_err(|e| e.at_step(ell))
}

fn discriminant_scale(p: &YParams, c: Cx, ell: usize) -> Result<Cx> {
    let k = p.k as i128;
    let l = ell as i128;
    let pow = growth(p.k, ell)?;
    let alpha_exp = mul(2, exact_div(pow - mul(k, l)? - 1, k)?)?;
    let c_exp = mul(2, pow - 1)?;
    monomial(&[
        (p.alpha, to_i64(alpha_exp)?),
        (c, to_i64(c_exp)?),
        (p.beta * p.beta, to_i64(l)?),
    ])
}
