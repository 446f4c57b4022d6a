//! Closed-form initial-value solvers.
//!
//! Each solver maps the initial state to coefficients, evaluates the
//! coefficients at every `ell` directly from the closed form and inverts the
//! bridge, giving the two candidate states per step. At `ell = 0` both
//! candidates are the initial state itself.

use serde::{Deserialize, Serialize};

use crate::bridge::{
    cubic_zeros_branch, cubic_zeros_with_disc, quad_from_zeros, quad_zeros, quad_zeros_with_disc,
    Branch, MonicQuadratic,
};
use crate::error::{Error, Result};
use crate::maps::generalized::{inversion_discriminant, yz_invert_with_disc};
use crate::maps::{
    yz_forward, CubicFamilyParams, GeneralizedParams, LinearChange, QuadraticFamilyParams,
    SqrtSystemParams,
};
use crate::numeric::{check_finite, Cx};
use crate::pair::{DistinctZeroPair, OrderedPair, PairState, ZeroPair};
use crate::ysystem::{special_discriminant_scale, y_closed, y_closed_special, YState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry<T> {
    pub ell: usize,
    pub plus: T,
    pub minus: T,
    pub y: YState,
}

impl<T: PairState> BranchEntry<T> {
    pub fn branch(&self, b: Branch) -> T {
        match b.sign {
            crate::numeric::Sign::Plus => self.plus,
            crate::numeric::Sign::Minus => self.minus,
        }
    }
}

/// Per-step branch pairs for `ell = 0..=ellmax`, or a prefix of them when
/// evaluation failed; `truncated` then holds the error with its step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSolution<T> {
    pub entries: Vec<BranchEntry<T>>,
    pub truncated: Option<Error>,
}

impl<T: PairState> BranchSolution<T> {
    pub fn at(&self, ell: usize) -> Option<&BranchEntry<T>> {
        self.entries.get(ell)
    }

    pub fn is_complete(&self) -> bool {
        self.truncated.is_none()
    }

    /// Converts every state, e.g. to plain ordered pairs.
    pub fn map<U, F: Fn(T) -> U>(self, f: F) -> BranchSolution<U> {
        BranchSolution {
            entries: self
                .entries
                .into_iter()
                .map(|e| BranchEntry {
                    ell: e.ell,
                    plus: f(e.plus),
                    minus: f(e.minus),
                    y: e.y,
                })
                .collect(),
            truncated: self.truncated,
        }
    }
}

/// Drives the per-step evaluation. Non-numeric errors abort the whole solve;
/// numeric ones end the list at the failing step.
fn build<T, F>(x0: T, y0: YState, ellmax: usize, eval: F) -> Result<BranchSolution<T>>
where
    T: PairState,
    F: Fn(usize) -> Result<(YState, T, T)>,
{
    let mut entries = vec![BranchEntry {
        ell: 0,
        plus: x0,
        minus: x0,
        y: y0,
    }];
    for ell in 1..=ellmax {
        match eval(ell) {
            Ok((y, plus, minus)) => entries.push(BranchEntry {
                ell,
                plus,
                minus,
                y,
            }),
            Err(e) if e.is_numeric() => {
                return Ok(BranchSolution {
                    entries,
                    truncated: Some(e.at_step(ell)),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BranchSolution {
        entries,
        truncated: None,
    })
}

fn finite_pair(a: Cx, b: Cx) -> Result<[Cx; 2]> {
    Ok([check_finite(a)?, check_finite(b)?])
}

fn check_state<T: PairState>(x: &T) -> Result<()> {
    let [a, b] = x.to_array();
    finite_pair(a, b)
        .map(|_| ())
        .map_err(|_| Error::InvalidParams("initial state must be finite".into()))
}

fn quad_y0(x0: &ZeroPair) -> YState {
    let m = quad_from_zeros(x0);
    YState::new(m.y1, m.y2)
}

fn quad_branches(y: &YState, disc: Option<Cx>) -> Result<(ZeroPair, ZeroPair)> {
    let m = MonicQuadratic { y1: y.y1, y2: y.y2 };
    let z = match disc {
        Some(d) => quad_zeros_with_disc(&m, d),
        None => quad_zeros(&m),
    };
    let [a, b] = finite_pair(z.first(), z.second())?;
    Ok((ZeroPair([a, b]), ZeroPair([b, a])))
}

fn cubic_y0(x0: &DistinctZeroPair) -> YState {
    YState::new(-(2.0 * x0.x1 + x0.x2), x0.x1 * (x0.x1 + 2.0 * x0.x2))
}

fn cubic_branches(y: &YState, disc: Option<Cx>) -> Result<(DistinctZeroPair, DistinctZeroPair)> {
    let mut out = [DistinctZeroPair::new(Cx::new(0.0, 0.0), Cx::new(0.0, 0.0)); 2];
    for (slot, b) in out.iter_mut().zip(Branch::BOTH) {
        let d = match disc {
            Some(d) => cubic_zeros_with_disc(y.y1, d, b),
            None => cubic_zeros_branch(y.y1, y.y2, b),
        };
        let [x1, x2] = finite_pair(d.x1, d.x2)?;
        *slot = DistinctZeroPair::new(x1, x2);
    }
    Ok((out[0], out[1]))
}

/// Square-root quadratic system for any `(k, q, r)`. Both branches hold the
/// same unordered pair, listed in opposite orders.
pub fn solve_sqrt_quadratic(
    p: &SqrtSystemParams,
    x0: &ZeroPair,
    ellmax: usize,
) -> Result<BranchSolution<ZeroPair>> {
    let yp = p.y_params()?;
    check_state(x0)?;
    let y0 = quad_y0(x0);
    build(*x0, y0, ellmax, |ell| {
        let y = y_closed(&yp, &y0, ell)?.state;
        let (a, b) = quad_branches(&y, None)?;
        Ok((y, a, b))
    })
}

/// Quadratic family via the special closed form. Since
/// `gamma = (alpha^2 - beta^2)/4`, the discriminant `(x1 - x2)^2` evolves by
/// a single monomial factor and is never formed by subtraction.
pub fn solve_quadratic_family(
    p: &QuadraticFamilyParams,
    x0: &ZeroPair,
    ellmax: usize,
) -> Result<BranchSolution<ZeroPair>> {
    let yp = p.sqrt_params().y_params()?;
    check_state(x0)?;
    let y0 = quad_y0(x0);
    let d0 = (x0.first() - x0.second()) * (x0.first() - x0.second());
    build(*x0, y0, ellmax, |ell| {
        let y = y_closed_special(&yp, &y0, ell)?.state;
        let disc = check_finite(special_discriminant_scale(&yp, &y0, ell)? * d0)?;
        let (a, b) = quad_branches(&y, Some(disc))?;
        Ok((y, a, b))
    })
}

/// `B/C` system: coefficients from [`yz_forward`], evolved with the special
/// closed form, inverted with [`yz_invert`] on both branches. The inversion
/// discriminant is carried in closed form from `z0`.
pub fn solve_generalized(
    p: &GeneralizedParams,
    z0: &OrderedPair,
    ellmax: usize,
) -> Result<BranchSolution<OrderedPair>> {
    let yp = p.y_params()?;
    check_state(z0)?;
    let y0 = yz_forward(p, z0);
    let d0 = inversion_discriminant(p, z0)?;
    build(*z0, y0, ellmax, |ell| {
        let y = y_closed_special(&yp, &y0, ell)?.state;
        let disc = Some(check_finite(
            special_discriminant_scale(&yp, &y0, ell)? * d0,
        )?);
        let a = yz_invert_with_disc(p, &y, disc, Branch::PLUS)?;
        let b = yz_invert_with_disc(p, &y, disc, Branch::MINUS)?;
        Ok((y, finite_pair(a[0], a[1])?, finite_pair(b[0], b[1])?))
    })
}

pub fn solve_sqrt_cubic(
    p: &SqrtSystemParams,
    x0: &DistinctZeroPair,
    ellmax: usize,
) -> Result<BranchSolution<DistinctZeroPair>> {
    let yp = p.y_params()?;
    check_state(x0)?;
    let y0 = cubic_y0(x0);
    build(*x0, y0, ellmax, |ell| {
        let y = y_closed(&yp, &y0, ell)?.state;
        let (a, b) = cubic_branches(&y, None)?;
        Ok((y, a, b))
    })
}

/// Cubic family via the special closed form; as for the quadratic family the
/// discriminant `(x1 - x2)^2` is propagated as a monomial factor.
pub fn solve_cubic_family(
    p: &CubicFamilyParams,
    x0: &DistinctZeroPair,
    ellmax: usize,
) -> Result<BranchSolution<DistinctZeroPair>> {
    let yp = p.sqrt_params().y_params()?;
    check_state(x0)?;
    let y0 = cubic_y0(x0);
    let d0 = (x0.x1 - x0.x2) * (x0.x1 - x0.x2);
    build(*x0, y0, ellmax, |ell| {
        let y = y_closed_special(&yp, &y0, ell)?.state;
        let disc = check_finite(special_discriminant_scale(&yp, &y0, ell)? * d0)?;
        let (a, b) = cubic_branches(&y, Some(disc))?;
        Ok((y, a, b))
    })
}

/// Cubic family in the variables `z = A x`. The reported `y` entries are the
/// coefficients of the underlying `x` orbit.
pub fn solve_conjugated(
    a: &LinearChange,
    p: &CubicFamilyParams,
    z0: &OrderedPair,
    ellmax: usize,
) -> Result<BranchSolution<OrderedPair>> {
    check_state(z0)?;
    let x0 = a.invert(z0).map_err(|e| match e {
        Error::SingularChange => e,
        _ => Error::InvalidParams("initial state does not map back to finite x".into()),
    })?;
    let sol = solve_cubic_family(p, &DistinctZeroPair::from_array(x0), ellmax)?;
    let mut out = sol.map(|x| a.apply(&x.to_array()));
    // the initial entry is z0 exactly rather than A A^-1 z0
    out.entries[0].plus = *z0;
    out.entries[0].minus = *z0;
    Ok(out)
}
