//! Brute-force checks of the closed forms: every sign sequence is iterated
//! and the reachable states are compared with the solver branches.

mod report;
mod sampling;
mod suites;

pub use report::{DiscrepancyNote, PropertyResult, SuiteReport, VerifyReport};
pub use sampling::{default_ellmax, Sampler, SAMPLING_SCALE};
pub use suites::{check_identities, run_suites, VerifyConfig, SUITES};

use serde::{Deserialize, Serialize};

use crate::bridge::{quad_from_zeros, Branch};
use crate::error::{Error, Result};
use crate::maps::{
    step_conjugated, step_cubic_family, step_generalized, step_quadratic_family, step_sqrt_cubic,
    step_sqrt_quadratic, yz_forward, CubicFamilyParams, GeneralizedParams, LinearChange,
    QuadraticFamilyParams, SqrtSystemParams,
};
use crate::numeric::{Cx, Sign, SignSequence, Tolerance};
use crate::pair::{DistinctZeroPair, PairState, ZeroPair};
use crate::solver::{
    solve_conjugated, solve_cubic_family, solve_generalized, solve_quadratic_family,
    solve_sqrt_cubic, solve_sqrt_quadratic, BranchSolution,
};
use crate::ysystem::YState;

/// Hard cap on enumeration depth (`2^10` sign sequences).
pub const MAX_ENUMERATION_DEPTH: usize = 10;

/// A two-variable system together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    QuadFamily(QuadraticFamilyParams),
    Generalized(GeneralizedParams),
    CubicFamily(CubicFamilyParams),
    SqrtQuad(SqrtSystemParams),
    SqrtCubic(SqrtSystemParams),
    Conjugated {
        change: LinearChange,
        params: CubicFamilyParams,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::QuadFamily(_) => "quad-family",
            Family::Generalized(_) => "generalized",
            Family::CubicFamily(_) => "cubic-family",
            Family::SqrtQuad(_) => "sqrt-quad",
            Family::SqrtCubic(_) => "sqrt-cubic",
            Family::Conjugated { .. } => "conjugated",
        }
    }

    /// Whether states are unordered zero pairs.
    pub fn unordered(&self) -> bool {
        matches!(self, Family::QuadFamily(_) | Family::SqrtQuad(_))
    }

    pub fn step(&self, s: Sign, x: &[Cx; 2]) -> Result<[Cx; 2]> {
        Ok(match self {
            Family::QuadFamily(p) => step_quadratic_family(p, s, &ZeroPair(*x))?.0,
            Family::SqrtQuad(p) => step_sqrt_quadratic(p, s, &ZeroPair(*x))?.0,
            Family::CubicFamily(p) => {
                step_cubic_family(p, s, &DistinctZeroPair::from_array(*x))?.to_array()
            }
            Family::SqrtCubic(p) => {
                step_sqrt_cubic(p, s, &DistinctZeroPair::from_array(*x))?.to_array()
            }
            Family::Generalized(p) => step_generalized(p, s, x)?,
            Family::Conjugated { change, params } => step_conjugated(change, params, s, x)?,
        })
    }

    pub fn solve(&self, x0: &[Cx; 2], ellmax: usize) -> Result<BranchSolution<[Cx; 2]>> {
        let arr = |v: DistinctZeroPair| v.to_array();
        Ok(match self {
            Family::QuadFamily(p) => {
                solve_quadratic_family(p, &ZeroPair(*x0), ellmax)?.map(|v| v.0)
            }
            Family::SqrtQuad(p) => solve_sqrt_quadratic(p, &ZeroPair(*x0), ellmax)?.map(|v| v.0),
            Family::CubicFamily(p) => {
                solve_cubic_family(p, &DistinctZeroPair::from_array(*x0), ellmax)?.map(arr)
            }
            Family::SqrtCubic(p) => {
                solve_sqrt_cubic(p, &DistinctZeroPair::from_array(*x0), ellmax)?.map(arr)
            }
            Family::Generalized(p) => solve_generalized(p, x0, ellmax)?,
            Family::Conjugated { change, params } => solve_conjugated(change, params, x0, ellmax)?,
        })
    }

    /// Coefficients `(y1, y2)` of a state under this family's bridge.
    pub fn coefficients(&self, x: &[Cx; 2]) -> Result<YState> {
        let cubic = |v: [Cx; 2]| YState::new(-(2.0 * v[0] + v[1]), v[0] * (v[0] + 2.0 * v[1]));
        Ok(match self {
            Family::QuadFamily(_) | Family::SqrtQuad(_) => {
                let m = quad_from_zeros(&ZeroPair(*x));
                YState::new(m.y1, m.y2)
            }
            Family::CubicFamily(_) | Family::SqrtCubic(_) => cubic(*x),
            Family::Generalized(p) => yz_forward(p, x),
            Family::Conjugated { change, .. } => cubic(change.invert(x)?),
        })
    }
}

/// Largest componentwise deviation relative to the larger of the two states'
/// magnitudes, minimised over relabellings when `unordered`.
///
/// Scaling by the whole state keeps a component that is small compared with
/// its partner from dominating through roundoff alone.
pub fn pair_distance(a: &[Cx; 2], b: &[Cx; 2], unordered: bool) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let dev = |p: &[Cx; 2]| (a[0] - p[0]).norm().max((a[1] - p[1]).norm());
    let direct = dev(b);
    let d = if unordered {
        direct.min(dev(&[b[1], b[0]]))
    } else {
        direct
    };
    d / scale
}

/// Relative deviation of two coefficient states. `y2` is quadratic in the
/// state, so its deviation is measured against `max(|y2|, |y1|^2)`.
pub fn ystate_residual(a: &YState, b: &YState) -> f64 {
    coefficient_residual(a, b, 0.0)
}

/// [`ystate_residual`] for coefficients of a state of magnitude `scale`:
/// deviations are measured against at least `scale` for `y1` and `scale^2`
/// for `y2`, the size of the rounding error the bridge itself introduces.
pub fn coefficient_residual(a: &YState, b: &YState, scale: f64) -> f64 {
    let s1 = a.y1.norm().max(b.y1.norm()).max(scale);
    let s2 = a.y2.norm().max(b.y2.norm()).max(s1 * s1);
    let r1 = if s1 == 0.0 {
        0.0
    } else {
        (a.y1 - b.y1).norm() / s1
    };
    let r2 = if s2 == 0.0 {
        0.0
    } else {
        (a.y2 - b.y2).norm() / s2
    };
    r1.max(r2)
}

/// Largest distance from a member of `a` to the nearest member of `b`, both ways.
pub fn set_distance(a: &[[Cx; 2]], b: &[[Cx; 2]], unordered: bool) -> f64 {
    let one_way = |x: &[[Cx; 2]], y: &[[Cx; 2]]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| pair_distance(p, q, unordered))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Relative size of the perturbations used by [`condition_estimate`].
const CONDITION_STEP: f64 = 1e-11;

fn nudge(x: &[Cx; 2], h: f64) -> [Cx; 2] {
    [
        x[0] * (1.0 + h * Cx::new(0.6, 0.8)),
        x[1] * (1.0 + h * Cx::new(-0.8, 0.6)),
    ]
}

/// Estimates how strongly relative errors of size `u` in the data are
/// amplified up to step `ellmax`, as the largest relative change divided by
/// the relative size of a small perturbation.
///
/// Two effects are measured: the solver branches after perturbing `x0`
/// (conditioning of the problem), and the all-`+` and all-`-` orbits when
/// every iterate is perturbed (stability of iterating the map, which loses
/// accuracy e.g. when the coefficients recovered from nearly opposite zeros
/// cancel). Roundoff in a comparison is roughly this factor times machine
/// epsilon.
pub fn condition_estimate(family: &Family, x0: &[Cx; 2], ellmax: usize) -> Result<f64> {
    if ellmax == 0 || x0.iter().all(|v| v.norm() == 0.0) {
        return Ok(1.0);
    }
    let h = CONDITION_STEP;
    let xp = nudge(x0, h);
    let unordered = family.unordered();
    let a = family.solve(x0, ellmax)?;
    let b = family.solve(&xp, ellmax)?;
    let mut kappa: f64 = 1.0;
    for (ea, eb) in a.entries.iter().zip(&b.entries).skip(1) {
        let d = set_distance(&[ea.plus, ea.minus], &[eb.plus, eb.minus], unordered);
        kappa = kappa.max(d / h);
    }
    for s in Sign::BOTH {
        let (mut u, mut v) = (*x0, xp);
        for _ in 0..ellmax {
            u = family.step(s, &u)?;
            v = nudge(&family.step(s, &v)?, h);
            kappa = kappa.max(pair_distance(&u, &v, unordered) / h);
        }
    }
    Ok(if kappa.is_nan() { f64::INFINITY } else { kappa })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub ell: usize,
    pub state: [Cx; 2],
    /// First sign sequence that reached this state.
    pub prefix: SignSequence,
    /// Solver branch the state matched, once compared.
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFailure {
    pub prefix: SignSequence,
    pub error: Error,
}

/// Result of the full sign-sequence expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignOrbits {
    /// Deduplicated states per `ell`, `levels[0]` being the initial state.
    pub levels: Vec<Vec<OrbitRecord>>,
    /// Number of sign sequences of each length that iterated without error.
    pub sequences: Vec<usize>,
    pub failures: Vec<BranchFailure>,
}

impl SignOrbits {
    /// Deepest level all of whose sequences survived.
    pub fn complete_depth(&self) -> usize {
        let mut depth = 0;
        for (ell, &n) in self.sequences.iter().enumerate() {
            if n == 1usize << ell {
                depth = ell;
            } else {
                break;
            }
        }
        depth
    }
}

fn dedupe_insert(level: &mut Vec<OrbitRecord>, rec: OrbitRecord, unordered: bool, tol: Tolerance) {
    if !level
        .iter()
        .any(|r| pair_distance(&r.state, &rec.state, unordered) <= tol.rel)
    {
        level.push(rec);
    }
}

/// Iterates every sign sequence of length up to `ellmax` and collects the
/// distinct states reached at each step. Step errors end the affected
/// sequence and are recorded.
pub fn enumerate_sign_orbits(family: &Family, x0: &[Cx; 2], ellmax: usize) -> Result<SignOrbits> {
    if ellmax > MAX_ENUMERATION_DEPTH {
        return Err(Error::InvalidParams(format!(
            "enumeration depth {ellmax} exceeds the cap of {MAX_ENUMERATION_DEPTH}"
        )));
    }
    let unordered = family.unordered();
    let tol = Tolerance::DEDUPE;
    let mut frontier = vec![(SignSequence::new(), *x0)];
    let mut levels = vec![vec![OrbitRecord {
        ell: 0,
        state: *x0,
        prefix: SignSequence::new(),
        branch: None,
    }]];
    let mut sequences = vec![1];
    let mut failures = Vec::new();
    for ell in 1..=ellmax {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        let mut level = Vec::new();
        for (prefix, x) in &frontier {
            for s in Sign::BOTH {
                let seq = prefix.extended(s);
                match family.step(s, x) {
                    Ok(y) => {
                        let rec = OrbitRecord {
                            ell,
                            state: y,
                            prefix: seq.clone(),
                            branch: None,
                        };
                        dedupe_insert(&mut level, rec, unordered, tol);
                        next.push((seq, y));
                    }
                    Err(e) => failures.push(BranchFailure {
                        prefix: seq,
                        error: e.at_step(ell),
                    }),
                }
            }
        }
        sequences.push(next.len());
        levels.push(level);
        frontier = next;
    }
    Ok(SignOrbits {
        levels,
        sequences,
        failures,
    })
}

/// Outcome of comparing enumeration with the solver for one initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    /// Levels `1..=levels_checked` were compared.
    pub levels_checked: usize,
    pub max_distinct: usize,
    /// Largest distance between a reachable state and the nearest branch,
    /// or (for set equality) between a branch and the nearest reachable state.
    pub residual: f64,
    /// Largest deviation of bridge coefficients of reachable states from the
    /// closed-form `y`.
    pub shadow_residual: f64,
    /// First error met by the solver or the enumeration.
    pub error: Option<Error>,
    /// See [`condition_estimate`]; infinite when it could not be evaluated.
    pub condition: f64,
}

fn compare(
    family: &Family,
    x0: &[Cx; 2],
    ellmax: usize,
    both_ways: bool,
) -> Result<(Fragment, SignOrbits)> {
    let mut orbits = enumerate_sign_orbits(family, x0, ellmax)?;
    let sol = family.solve(x0, ellmax)?;
    let unordered = family.unordered();
    let depth = orbits.complete_depth().min(sol.entries.len() - 1);
    let error = sol
        .truncated
        .clone()
        .or_else(|| orbits.failures.first().map(|f| f.error.clone()));
    let condition = condition_estimate(family, x0, depth).unwrap_or(f64::INFINITY);
    let mut frag = Fragment {
        levels_checked: depth,
        max_distinct: 1,
        residual: 0.0,
        shadow_residual: 0.0,
        error,
        condition,
    };
    for ell in 0..=depth {
        let entry = &sol.entries[ell];
        let branches = [(Branch::PLUS, entry.plus), (Branch::MINUS, entry.minus)];
        let level = &mut orbits.levels[ell];
        frag.max_distinct = frag.max_distinct.max(level.len());
        for rec in level.iter_mut() {
            let (b, d) = branches
                .iter()
                .map(|(b, s)| (*b, pair_distance(&rec.state, s, unordered)))
                .fold((Branch::PLUS, f64::INFINITY), |acc, v| {
                    if v.1 < acc.1 {
                        v
                    } else {
                        acc
                    }
                });
            rec.branch = Some(b);
            frag.residual = frag.residual.max(d);
            let y = family.coefficients(&rec.state)?;
            let scale = rec.state.iter().map(|v| v.norm()).fold(0.0, f64::max);
            frag.shadow_residual = frag
                .shadow_residual
                .max(coefficient_residual(&y, &entry.y, scale));
        }
        if both_ways {
            for (_, s) in &branches {
                let d = level
                    .iter()
                    .map(|r| pair_distance(&r.state, s, unordered))
                    .fold(f64::INFINITY, f64::min);
                frag.residual = frag.residual.max(d);
            }
        }
    }
    Ok((frag, orbits))
}

/// Distinct reachable states per step and their set-equality with the two
/// solver branches.
pub fn check_branch_collapse(family: &Family, x0: &[Cx; 2], ellmax: usize) -> Result<Fragment> {
    compare(family, x0, ellmax, true).map(|(f, _)| f)
}

/// Every reachable state matches one of the solver branches, and its bridge
/// coefficients match the closed-form `y`.
pub fn check_closed_vs_iterated(family: &Family, x0: &[Cx; 2], ellmax: usize) -> Result<Fragment> {
    compare(family, x0, ellmax, false).map(|(f, _)| f)
}

/// Enumeration with each distinct state labelled by the solver branch it matched.
pub fn labelled_orbits(family: &Family, x0: &[Cx; 2], ellmax: usize) -> Result<SignOrbits> {
    compare(family, x0, ellmax, false).map(|(_, o)| o)
}
