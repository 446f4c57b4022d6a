use crate::bridge::{cubic_from_zeros, cubic_zeros_branch, cubic_zeros_half_prefactor, Branch};
use crate::error::{Error, Result};
use crate::maps::conjugated::step_conjugated_printed;
use crate::maps::{
    conda_residual, conjugation_coefficients, double_step_cubic, generalized_k1_table,
    k1_coeff_table, k1_table_from_printed_eta, step_conjugated, step_conjugated_k_minus_one,
    step_cubic_family, step_generalized, step_quadratic_family, step_sqrt_cubic,
    step_sqrt_cubic_with, step_sqrt_quadratic, yz_forward, yz_invert, CubicFamilyParams,
    CubicZeroForm, GeneralizedParams, K1CoeffTable, LinearChange, QuadraticFamilyParams,
    SqrtSystemParams,
};
use crate::numeric::{rel_error, Cx, Sign};
use crate::pair::{DistinctZeroPair, PairState, ZeroPair};
use crate::ysystem::{exponents_integral, y_closed, y_closed_special, y_step, YParams, YState};

use super::report::{DiscrepancyNote, PropertyResult, SuiteReport, VerifyReport};
use super::sampling::{default_ellmax, Sampler, SAMPLING_SCALE};
use super::{
    check_branch_collapse, check_closed_vs_iterated, pair_distance, set_distance, ystate_residual,
    Family, Fragment,
};

/// Suite names in execution order. The position of a suite in this list
/// selects its random stream, so narrowing the selection does not change the
/// draws of the suites that remain.
pub const SUITES: &[&str] = &[
    "y-closed",
    "divisibility",
    "quad-family",
    "cubic-collapse",
    "generalized",
    "sqrt-systems",
    "double-step",
    "reductions",
    "conda",
    "conjugation",
    "yz",
    "prefactor",
    "printed-forms",
];

/// Suites made of algebraic identities rather than orbit enumeration.
const IDENTITY_SUITES: &[&str] = &[
    "y-closed",
    "divisibility",
    "double-step",
    "reductions",
    "conda",
    "conjugation",
    "yz",
    "prefactor",
    "printed-forms",
];

/// Skipped-draw fraction above which the report carries a warning.
const SKIP_WARNING_FRACTION: f64 = 0.2;

/// Magnitudes outside this window are treated as overflow/underflow when a
/// check compares values built from large powers.
const RANGE: (f64, f64) = (1e-200, 1e200);

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub suites: Vec<String>,
    pub scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            scale: SAMPLING_SCALE,
        }
    }
}

/// Runs the selected suites. Unknown names are rejected before anything runs.
pub fn run_suites(cfg: &VerifyConfig) -> Result<VerifyReport> {
    for name in &cfg.suites {
        if !SUITES.contains(&name.as_str()) {
            return Err(Error::InvalidParams(format!("unknown suite {name:?}")));
        }
    }
    let mut report = VerifyReport {
        seed: cfg.seed,
        sampling_scale: cfg.scale,
        suites: Vec::new(),
        discrepancies: Vec::new(),
        warnings: Vec::new(),
        pass: true,
    };
    for (idx, name) in SUITES.iter().enumerate() {
        if !cfg.suites.iter().any(|s| s == name) {
            continue;
        }
        let mut rng = Sampler::new(cfg.seed, idx as u64).with_scale(cfg.scale);
        let suite = run_one(name, &mut rng, &mut report.discrepancies);
        if suite.skipped_fraction() > SKIP_WARNING_FRACTION {
            report.warnings.push(format!(
                "suite {} skipped {} of {} draws; the sampling scale {} may be too large",
                suite.name, suite.draws_skipped, suite.draws_attempted, cfg.scale
            ));
        }
        report.suites.push(suite);
    }
    report.pass = report.suites.iter().all(|s| s.pass);
    Ok(report)
}

/// Runs every identity suite (closed forms, divisibility, double step,
/// reductions, Conda, conjugation, yz, printed-form comparisons).
pub fn check_identities(seed: u64) -> VerifyReport {
    let cfg = VerifyConfig {
        seed,
        suites: IDENTITY_SUITES.iter().map(|s| s.to_string()).collect(),
        scale: SAMPLING_SCALE,
    };
    run_suites(&cfg).expect("identity suite names are known")
}

fn run_one(name: &str, rng: &mut Sampler, notes: &mut Vec<DiscrepancyNote>) -> SuiteReport {
    match name {
        "y-closed" => suite_y_closed(rng),
        "divisibility" => suite_divisibility(),
        "quad-family" => suite_quad_family(rng),
        "cubic-collapse" => suite_cubic_collapse(rng),
        "generalized" => suite_generalized(rng),
        "sqrt-systems" => suite_sqrt_systems(rng),
        "double-step" => suite_double_step(rng),
        "reductions" => suite_reductions(rng),
        "conda" => suite_conda(rng),
        "conjugation" => suite_conjugation(rng),
        "yz" => suite_yz(rng),
        "prefactor" => suite_prefactor(rng, notes),
        "printed-forms" => suite_printed_forms(rng, notes),
        _ => unreachable!("suite names are validated by run_suites"),
    }
}

/// Condition estimate above which an orbit comparison is not attempted.
const CONDITION_LIMIT: f64 = 1e5;

/// Attempts per requested draw before a suite gives up on reaching its count.
const ATTEMPTS_PER_DRAW: usize = 3;

/// Why a draw did not contribute.
enum Skip {
    Failed(Error),
    IllConditioned,
}

impl From<Error> for Skip {
    fn from(e: Error) -> Self {
        Skip::Failed(e)
    }
}

impl Skip {
    fn kind(&self) -> &'static str {
        match self {
            Skip::Failed(e) => e.kind(),
            Skip::IllConditioned => "ill_conditioned",
        }
    }
}

/// Draws until `n` draws have contributed; each skipped draw is replaced by
/// a fresh one, up to `ATTEMPTS_PER_DRAW * n` attempts in total.
fn draws(report: &mut SuiteReport, n: usize, mut f: impl FnMut() -> std::result::Result<(), Skip>) {
    let mut done = 0;
    let mut attempts = 0;
    while done < n && attempts < ATTEMPTS_PER_DRAW * n {
        attempts += 1;
        report.draws_attempted += 1;
        match f() {
            Ok(()) => done += 1,
            Err(e) => report.skip(e.kind()),
        }
    }
}

fn in_range(v: Cx) -> bool {
    let n = v.norm();
    n.is_finite() && (n == 0.0 || (RANGE.0..=RANGE.1).contains(&n))
}

fn ystate_in_range(y: &YState) -> bool {
    in_range(y.y1) && in_range(y.y2)
}

fn y_rel(a: &YState, b: &YState) -> f64 {
    rel_error(a.y1, b.y1).max(rel_error(a.y2, b.y2))
}

fn random_generalized(rng: &mut Sampler, k: i64) -> Result<GeneralizedParams> {
    let (alpha, beta) = (rng.cx(), rng.cx());
    let b = [rng.cx(), rng.cx()];
    let c = [rng.cx(), rng.cx(), rng.cx()];
    GeneralizedParams::new(alpha, beta, b, c, k)
}

fn random_change(rng: &mut Sampler) -> Result<LinearChange> {
    LinearChange::new(rng.cx(), rng.cx(), rng.cx(), rng.cx())
}

fn random_sign(rng: &mut Sampler) -> Sign {
    rng.pick(&Sign::BOTH)
}

/// Records the residuals of a fragment; a fragment that compared nothing
/// beyond the initial state becomes a skipped draw.
fn record_fragment(
    frag: Fragment,
    ellmax: usize,
    main: &mut PropertyResult,
    shadow: &mut PropertyResult,
    distinct: Option<&mut PropertyResult>,
) -> std::result::Result<(), Skip> {
    if ellmax > 0 && frag.levels_checked == 0 {
        return Err(frag
            .error
            .unwrap_or(Error::Overflow { step: Some(1) })
            .into());
    }
    if frag.condition > CONDITION_LIMIT {
        return Err(Skip::IllConditioned);
    }
    main.record(frag.residual);
    shadow.record(frag.shadow_residual);
    if let Some(d) = distinct {
        d.record(frag.max_distinct as f64);
    }
    Ok(())
}

/// Ratio of the summed magnitudes of the terms making up `y2(ell)` to
/// `|y2(ell)|`. Every term of the closed form is a monomial, so evaluating it
/// on absolute values yields the sum of the term magnitudes.
fn y2_cancellation(p: &YParams, y0: &YState, ell: usize) -> Result<f64> {
    let abs = |v: Cx| Cx::new(v.norm(), 0.0);
    let pa = YParams::new(abs(p.alpha), abs(p.beta), abs(p.gamma), p.k, p.q, p.r)?;
    let bound = y_closed(&pa, &YState::new(abs(y0.y1), abs(y0.y2)), ell)?
        .state
        .y2
        .re;
    let value = y_closed(p, y0, ell)?.state.y2.norm();
    Ok(if bound == 0.0 { 1.0 } else { bound / value })
}

fn suite_y_closed(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("y-closed", "y");
    let mut chained = PropertyResult::new("closed form vs chained steps", 1e-9);
    let mut special = PropertyResult::new("special vs general closed form", 1e-9);
    let mut cut = 0usize;
    draws(&mut rep, 100, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let (q, r) = (rng.int(-3, 4), rng.int(-3, 4));
        let (alpha, beta, gamma) = (rng.cx(), rng.cx(), rng.cx());
        let y0 = YState::new(rng.cx(), rng.cx());
        let p = YParams::new(alpha, beta, gamma, k, q, r)?;
        let ps = YParams::special(alpha, beta, gamma, k)?;
        let mut general = Vec::new();
        let mut cur = y0;
        for ell in 1..=6 {
            let next = y_step(&p, &cur).map_err(|e| e.at_step(ell));
            let closed = y_closed(&p, &y0, ell);
            match (next, closed) {
                (Ok(n), Ok(c)) if ystate_in_range(&n) && ystate_in_range(&c.state) => {
                    if y2_cancellation(&p, &y0, ell)? > CONDITION_LIMIT {
                        return Err(Skip::IllConditioned);
                    }
                    general.push(y_rel(&n, &c.state));
                    cur = n;
                }
                (Err(e), _) | (_, Err(e)) if general.is_empty() => return Err(e.into()),
                _ => {
                    if general.is_empty() {
                        return Err(Error::Overflow { step: Some(ell) }.into());
                    }
                    cut += 1;
                    break;
                }
            }
        }
        let mut paired = Vec::new();
        for ell in 1..=6 {
            match (y_closed_special(&ps, &y0, ell), y_closed(&ps, &y0, ell)) {
                (Ok(a), Ok(b)) if ystate_in_range(&a.state) && ystate_in_range(&b.state) => {
                    if y2_cancellation(&ps, &y0, ell)? > CONDITION_LIMIT {
                        return Err(Skip::IllConditioned);
                    }
                    paired.push(y_rel(&a.state, &b.state));
                }
                _ => break,
            }
        }
        general.into_iter().for_each(|r| chained.record(r));
        paired.into_iter().for_each(|r| special.record(r));
        Ok(())
    });
    if cut > 0 {
        rep.notes.push(format!(
            "{cut} draws stopped before ell = 6 when values left [1e-200, 1e200]"
        ));
    }
    rep.finish(vec![chained, special])
}

fn suite_divisibility() -> SuiteReport {
    let mut rep = SuiteReport::new("divisibility", "y");
    let mut prop = PropertyResult::new("non-integral exponents", 0.0);
    for k in (-5..=5).filter(|&k| k != 0) {
        for ell in 0..=8 {
            rep.draws_attempted += 1;
            match exponents_integral(k, ell) {
                Ok((a, b)) => prop.record(if a && b { 0.0 } else { 1.0 }),
                Err(e) => rep.skip(e.kind()),
            }
        }
    }
    rep.finish(vec![prop])
}

fn suite_quad_family(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("quad-family", "quad-family");
    let mut swap = PropertyResult::new("sign flip swaps components", 0.0);
    let mut member = PropertyResult::new("orbits match closed form", 1e-8);
    let mut shadow = PropertyResult::new("coefficients match closed form", 1e-9);
    let mut distinct = PropertyResult::new("distinct unordered states", 1.0);
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = QuadraticFamilyParams::new(rng.cx(), rng.cx(), k);
        let x0 = rng.pair();
        let plus = step_quadratic_family(&p, Sign::Plus, &ZeroPair(x0))?;
        let minus = step_quadratic_family(&p, Sign::Minus, &ZeroPair(x0))?;
        // exact equality is required; any deviation counts at least the smallest positive residual
        swap.record(if plus.swapped() == minus {
            0.0
        } else {
            pair_distance(&plus.swapped().0, &minus.0, false).max(f64::MIN_POSITIVE)
        });
        let ellmax = default_ellmax(k, 5);
        let frag = check_closed_vs_iterated(&Family::QuadFamily(p), &x0, ellmax)?;
        record_fragment(frag, ellmax, &mut member, &mut shadow, Some(&mut distinct))
    });
    rep.finish(vec![swap, member, shadow, distinct])
}

fn worked_cubic() -> (CubicFamilyParams, [Cx; 2]) {
    let one = Cx::new(1.0, 0.0);
    (
        CubicFamilyParams::new(one, one, 1),
        [one, Cx::new(0.0, 0.0)],
    )
}

fn suite_cubic_collapse(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("cubic-collapse", "cubic-family");
    let mut worked = PropertyResult::new("worked instance", 1e-12);
    let mut distinct = PropertyResult::new("distinct states per step", 2.0);
    let mut set_eq = PropertyResult::new("reachable set equals branches", 1e-8);
    let mut shadow = PropertyResult::new("coefficients match closed form", 1e-9);
    let mut single = PropertyResult::new("single state when b = 0", 1.0);

    let (p, x0) = worked_cubic();
    let expect = [
        [Cx::new(-6.0, 0.0), Cx::new(0.0, 0.0)],
        [Cx::new(-2.0, 0.0), Cx::new(-8.0, 0.0)],
    ];
    let fam = Family::CubicFamily(p);
    match (
        super::enumerate_sign_orbits(&fam, &x0, 1),
        fam.solve(&x0, 1),
    ) {
        (Ok(o), Ok(sol)) => {
            let reached: Vec<_> = o.levels[1].iter().map(|r| r.state).collect();
            let e = &sol.entries[1];
            worked.record(set_distance(&reached, &expect, false));
            worked.record(set_distance(&[e.plus, e.minus], &expect, false));
            worked.record(y_rel(
                &e.y,
                &YState::new(Cx::new(12.0, 0.0), Cx::new(36.0, 0.0)),
            ));
        }
        _ => worked.record(f64::INFINITY),
    }

    draws(&mut rep, 25, || {
        let k = rng.pick(&[-2, -1, 1, 2, 3]);
        let fam = Family::CubicFamily(CubicFamilyParams::new(rng.cx(), rng.cx(), k));
        let x0 = rng.pair();
        let ellmax = default_ellmax(k, 5);
        let frag = check_branch_collapse(&fam, &x0, ellmax)?;
        record_fragment(frag, ellmax, &mut set_eq, &mut shadow, Some(&mut distinct))
    });
    draws(&mut rep, 5, || {
        let k = rng.pick(&[-1, 1]);
        let fam = Family::CubicFamily(CubicFamilyParams::new(rng.cx(), Cx::new(0.0, 0.0), k));
        let x0 = rng.pair();
        let frag = check_branch_collapse(&fam, &x0, 5)?;
        record_fragment(frag, 5, &mut set_eq, &mut shadow, Some(&mut single))
    });
    rep.finish(vec![worked, distinct, set_eq, shadow, single])
}

fn suite_generalized(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("generalized", "generalized");
    let mut distinct = PropertyResult::new("distinct states per step", 2.0);
    let mut set_eq = PropertyResult::new("reachable set equals branches", 1e-8);
    let mut shadow = PropertyResult::new("coefficients match closed form", 1e-9);
    let mut member = PropertyResult::new("orbits match closed form", 1e-8);
    let mut shadow_m = PropertyResult::new("coefficients along orbits", 1e-9);
    draws(&mut rep, 25, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let fam = Family::Generalized(random_generalized(rng, k)?);
        let z0 = rng.pair();
        let ellmax = default_ellmax(k, 5);
        let frag = check_branch_collapse(&fam, &z0, ellmax)?;
        record_fragment(frag, ellmax, &mut set_eq, &mut shadow, Some(&mut distinct))
    });
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let fam = Family::Generalized(random_generalized(rng, k)?);
        let z0 = rng.pair();
        let ellmax = default_ellmax(k, 4);
        let frag = check_closed_vs_iterated(&fam, &z0, ellmax)?;
        record_fragment(frag, ellmax, &mut member, &mut shadow_m, None)
    });
    rep.finish(vec![distinct, set_eq, shadow, member, shadow_m])
}

fn random_sqrt_params(rng: &mut Sampler, k: i64) -> SqrtSystemParams {
    SqrtSystemParams {
        alpha: rng.cx(),
        beta: rng.cx(),
        gamma: rng.cx(),
        k,
        q: rng.int(-3, 4),
        r: rng.int(-3, 4),
    }
}

fn suite_sqrt_systems(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("sqrt-systems", "sqrt-quad, sqrt-cubic");
    let mut quad = PropertyResult::new("sqrt-quad orbits match closed form", 1e-8);
    let mut quad_shadow = PropertyResult::new("sqrt-quad coefficients", 1e-9);
    let mut cubic = PropertyResult::new("sqrt-cubic reachable set = branches", 1e-8);
    let mut cubic_shadow = PropertyResult::new("sqrt-cubic coefficients", 1e-9);
    let mut distinct = PropertyResult::new("sqrt-cubic distinct states", 2.0);
    draws(&mut rep, 25, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let fam = Family::SqrtQuad(random_sqrt_params(rng, k));
        let x0 = rng.pair();
        let ellmax = default_ellmax(k, 4);
        let frag = check_closed_vs_iterated(&fam, &x0, ellmax)?;
        record_fragment(frag, ellmax, &mut quad, &mut quad_shadow, None)
    });
    draws(&mut rep, 25, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let fam = Family::SqrtCubic(random_sqrt_params(rng, k));
        let x0 = rng.pair();
        let ellmax = default_ellmax(k, 4);
        let frag = check_branch_collapse(&fam, &x0, ellmax)?;
        record_fragment(
            frag,
            ellmax,
            &mut cubic,
            &mut cubic_shadow,
            Some(&mut distinct),
        )
    });
    rep.finish(vec![quad, quad_shadow, cubic, cubic_shadow, distinct])
}

fn suite_double_step(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("double-step", "cubic-family");
    let mut hand = PropertyResult::new("hand instance", 0.0);
    let mut prop = PropertyResult::new("two steps equal double step", 1e-9);
    let (p, x0) = worked_cubic();
    let got = double_step_cubic(&p, Sign::Plus, &DistinctZeroPair::from_array(x0));
    hand.record(match got {
        Ok(d) => pair_distance(
            &d.to_array(),
            &[Cx::new(-216.0, 0.0), Cx::new(0.0, 0.0)],
            false,
        ),
        Err(_) => f64::INFINITY,
    });
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = CubicFamilyParams::new(rng.cx(), rng.cx(), k);
        let x = DistinctZeroPair::from_array(rng.pair());
        for s0 in Sign::BOTH {
            for s1 in Sign::BOTH {
                let two = step_cubic_family(&p, s1, &step_cubic_family(&p, s0, &x)?)?;
                let one = double_step_cubic(&p, s0.times(s1), &x)?;
                prop.record(pair_distance(&two.to_array(), &one.to_array(), false));
            }
        }
        Ok(())
    });
    rep.finish(vec![hand, prop])
}

fn image_set<F: Fn(Sign) -> Result<[Cx; 2]>>(f: F) -> Result<Vec<[Cx; 2]>> {
    Sign::BOTH.iter().map(|&s| f(s)).collect()
}

fn suite_reductions(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("reductions", "sqrt-quad, sqrt-cubic, generalized");
    let mut quad = PropertyResult::new("sqrt-quad reduces to quad family", 1e-9);
    let mut cubic = PropertyResult::new("sqrt-cubic reduces to cubic family", 1e-9);
    let mut gen = PropertyResult::new("generalized reduces to quad family", 1e-9);
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = QuadraticFamilyParams::new(rng.cx(), rng.cx(), k);
        let x = ZeroPair(rng.pair());
        let sp = p.sqrt_params();
        let a = image_set(|s| Ok(step_sqrt_quadratic(&sp, s, &x)?.0))?;
        let b = image_set(|s| Ok(step_quadratic_family(&p, s, &x)?.0))?;
        quad.record(set_distance(&a, &b, true));
        Ok(())
    });
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = CubicFamilyParams::new(rng.cx(), rng.cx(), k);
        let x = DistinctZeroPair::from_array(rng.pair());
        let sp = p.sqrt_params();
        let a = image_set(|s| Ok(step_sqrt_cubic(&sp, s, &x)?.to_array()))?;
        let b = image_set(|s| Ok(step_cubic_family(&p, s, &x)?.to_array()))?;
        cubic.record(set_distance(&a, &b, false));
        Ok(())
    });
    draws(&mut rep, 50, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let (a, b) = (rng.cx(), rng.cx());
        let p = QuadraticFamilyParams::new(a, b, k);
        let one = Cx::new(1.0, 0.0);
        let zero = Cx::new(0.0, 0.0);
        let g = GeneralizedParams::new(2.0 * a, 2.0 * b, [-one, -one], [zero, zero, one], k)?;
        let z = rng.pair();
        // ordered comparison: the generalized map at S equals the family at -S
        for s in Sign::BOTH {
            let x = step_generalized(&g, s, &z)?;
            let y = step_quadratic_family(&p, s.flip(), &ZeroPair(z))?.0;
            gen.record(pair_distance(&x, &y, false));
        }
        Ok(())
    });
    rep.finish(vec![quad, cubic, gen])
}

fn normalised_conda(t: &K1CoeffTable) -> f64 {
    let m = t.max_abs();
    if m == 0.0 {
        0.0
    } else {
        conda_residual(t).norm() / m.powi(4)
    }
}

fn suite_conda(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("conda", "conjugated, generalized");
    let mut control = PropertyResult::new("positive control equals 1", 0.0);
    let mut conj = PropertyResult::new("conjugated table residual", 1e-9);
    let mut table = PropertyResult::new("table reproduces step", 1e-9);
    let mut gen = PropertyResult::new("generalized table residual", 1e-9);
    let mut g3 = PropertyResult::new("g3 = -g1", 0.0);
    let (one, zero) = (Cx::new(1.0, 0.0), Cx::new(0.0, 0.0));
    let id = K1CoeffTable::new([[one, zero, zero], [zero, one, zero]]);
    control.record((conda_residual(&id) - one).norm());
    draws(&mut rep, 100, || {
        let a = random_change(rng)?;
        let p = CubicFamilyParams::new(rng.cx(), rng.cx(), 1);
        let s = random_sign(rng);
        let t = k1_coeff_table(&a, &p, s)?;
        conj.record(normalised_conda(&t));
        let z = rng.pair();
        table.record(pair_distance(
            &t.eval(&z),
            &step_conjugated(&a, &p, s, &z)?,
            false,
        ));
        Ok(())
    });
    draws(&mut rep, 100, || {
        let g = random_generalized(rng, 1)?;
        let s = random_sign(rng);
        let t = generalized_k1_table(&g, s)?;
        gen.record(normalised_conda(&t));
        let z = rng.pair();
        table.record(pair_distance(
            &t.eval(&z),
            &step_generalized(&g, s, &z)?,
            false,
        ));
        let [g1, _, g3v] = g.g();
        g3.record((g3v + g1).norm());
        Ok(())
    });
    rep.finish(vec![control, conj, table, gen, g3])
}

fn conjugate_oracle(
    a: &LinearChange,
    p: &CubicFamilyParams,
    s: Sign,
    z: &[Cx; 2],
) -> Result<[Cx; 2]> {
    let x = DistinctZeroPair::from_array(a.invert(z)?);
    Ok(a.apply(&step_cubic_family(p, s, &x)?.to_array()))
}

fn suite_conjugation(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("conjugation", "conjugated");
    let mut ident = PropertyResult::new("conjugation identity", 1e-9);
    let mut rational = PropertyResult::new("rational form at k = -1", 1e-9);
    let mut member = PropertyResult::new("orbits match closed form", 1e-8);
    let mut shadow = PropertyResult::new("coefficients match closed form", 1e-9);
    draws(&mut rep, 100, || {
        let a = random_change(rng)?;
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = CubicFamilyParams::new(rng.cx(), rng.cx(), k);
        let z = rng.pair();
        for s in Sign::BOTH {
            ident.record(pair_distance(
                &step_conjugated(&a, &p, s, &z)?,
                &conjugate_oracle(&a, &p, s, &z)?,
                false,
            ));
            let pm = CubicFamilyParams { k: -1, ..p };
            let r = step_conjugated_k_minus_one(&a, &pm, s, &z)?;
            rational.record(pair_distance(&r, &conjugate_oracle(&a, &pm, s, &z)?, false));
        }
        Ok(())
    });
    draws(&mut rep, 30, || {
        let change = random_change(rng)?;
        let k = rng.pick(&[-2, -1, 1, 2]);
        let fam = Family::Conjugated {
            change,
            params: CubicFamilyParams::new(rng.cx(), rng.cx(), k),
        };
        let z0 = rng.pair();
        let ellmax = default_ellmax(k, 4);
        let frag = check_closed_vs_iterated(&fam, &z0, ellmax)?;
        record_fragment(frag, ellmax, &mut member, &mut shadow, None)
    });
    rep.finish(vec![ident, rational, member, shadow])
}

fn suite_yz(rng: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("yz", "generalized");
    let mut z_trip = PropertyResult::new("z -> y -> z round trip", 1e-9);
    let mut y_trip = PropertyResult::new("y -> z -> y round trip", 1e-9);
    let mut sign_free = PropertyResult::new("y image independent of sign", 1e-9);
    let mut follows = PropertyResult::new("y image follows y step", 1e-9);
    draws(&mut rep, 100, || {
        let k = rng.pick(&[-2, -1, 1, 2]);
        let p = random_generalized(rng, k)?;
        let z = rng.pair();
        let y = yz_forward(&p, &z);
        let back = image_set(|s| yz_invert(&p, &y, Branch::from(s)))?;
        z_trip.record(
            back.iter()
                .map(|b| pair_distance(b, &z, false))
                .fold(f64::INFINITY, f64::min),
        );

        let yr = YState::new(rng.cx(), rng.cx());
        for b in Branch::BOTH {
            y_trip.record(ystate_residual(
                &yz_forward(&p, &yz_invert(&p, &yr, b)?),
                &yr,
            ));
        }

        let ip = yz_forward(&p, &step_generalized(&p, Sign::Plus, &z)?);
        let im = yz_forward(&p, &step_generalized(&p, Sign::Minus, &z)?);
        sign_free.record(ystate_residual(&ip, &im));
        let stepped = y_step(&p.y_params()?, &y)?;
        follows.record(ystate_residual(&ip, &stepped).max(ystate_residual(&im, &stepped)));
        Ok(())
    });
    rep.finish(vec![z_trip, y_trip, sign_free, follows])
}

fn cubic_round_trip(y: &YState, d: &DistinctZeroPair) -> f64 {
    let m = cubic_from_zeros(d);
    ystate_residual(&YState::new(m.y1, m.y2), y)
}

fn suite_prefactor(rng: &mut Sampler, notes: &mut Vec<DiscrepancyNote>) -> SuiteReport {
    let mut rep = SuiteReport::new("prefactor", "sqrt-cubic");
    let mut fixed = PropertyResult::new("1/3 form round trip at (-2, 1)", 1e-12);
    let mut random = PropertyResult::new("1/3 form round trip", 1e-9);
    let y = YState::new(Cx::new(-2.0, 0.0), Cx::new(1.0, 0.0));
    for b in Branch::BOTH {
        fixed.record(cubic_round_trip(&y, &cubic_zeros_branch(y.y1, y.y2, b)));
    }
    let printed = Sign::BOTH
        .iter()
        .map(|&s| cubic_round_trip(&y, &cubic_zeros_half_prefactor(y.y1, y.y2, s)))
        .fold(f64::INFINITY, f64::min);
    notes.push(DiscrepancyNote {
        name: "zero-formula-prefactor".into(),
        description: "zeros from (y1, y2) = (-2, 1) mapped back to coefficients: prefactor 1/3 \
                      against the displayed 1/2 (smallest residual over both signs)"
            .into(),
        derived_residual: fixed.max_residual,
        printed_residual: printed,
        printed_rejected: fixed.max_residual < 1e-12 && printed > 0.1,
    });
    draws(&mut rep, 100, || {
        let y = YState::new(rng.cx(), rng.cx());
        for b in Branch::BOTH {
            random.record(cubic_round_trip(&y, &cubic_zeros_branch(y.y1, y.y2, b)));
        }
        Ok(())
    });
    rep.finish(vec![fixed, random])
}

/// Accumulates a derived-vs-printed comparison over draws: the derived form's
/// worst residual and the printed form's best.
struct Comparison {
    derived: f64,
    printed: f64,
}

impl Comparison {
    fn new() -> Self {
        Self {
            derived: 0.0,
            printed: f64::INFINITY,
        }
    }

    fn add(&mut self, derived: f64, printed: f64) {
        self.derived = self.derived.max(derived);
        self.printed = self.printed.min(printed);
    }

    fn note(&self, name: &str, description: &str) -> DiscrepancyNote {
        DiscrepancyNote {
            name: name.into(),
            description: description.into(),
            derived_residual: self.derived,
            printed_residual: self.printed,
            printed_rejected: self.derived <= 1e-9 && self.printed > 1e-3,
        }
    }
}

fn suite_printed_forms(rng: &mut Sampler, notes: &mut Vec<DiscrepancyNote>) -> SuiteReport {
    let mut rep = SuiteReport::new("printed-forms", "sqrt-cubic, conjugated");
    let mut derived = PropertyResult::new("derived forms reproduce oracles", 1e-9);
    let mut sqrt_cubic = Comparison::new();
    let mut theta = Comparison::new();
    let mut eta = Comparison::new();
    let mut denom = Comparison::new();
    draws(&mut rep, 20, || {
        let k = rng.pick(&[-1, 1, 2]);
        let p = CubicFamilyParams::new(rng.cx(), rng.cx(), k);
        let x = DistinctZeroPair::from_array(rng.pair());
        let truth = image_set(|s| Ok(step_cubic_family(&p, s, &x)?.to_array()))?;
        let sp = p.sqrt_params();
        let form = |f| image_set(|s| Ok(step_sqrt_cubic_with(&sp, s, &x, f)?.to_array()));
        let d = set_distance(&form(CubicZeroForm::Corrected)?, &truth, false);
        sqrt_cubic.add(
            d,
            set_distance(&form(CubicZeroForm::Printed)?, &truth, false),
        );
        derived.record(d);

        let a = random_change(rng)?;
        let p1 = CubicFamilyParams { k: 1, ..p };
        let z = rng.pair();
        let s = random_sign(rng);
        let oracle = conjugate_oracle(&a, &p1, s, &z)?;
        let d = pair_distance(&step_conjugated(&a, &p1, s, &z)?, &oracle, false);
        theta.add(
            d,
            pair_distance(&step_conjugated_printed(&a, &p1, s, &z)?, &oracle, false),
        );
        derived.record(d);

        let d = pair_distance(&k1_coeff_table(&a, &p1, s)?.eval(&z), &oracle, false);
        eta.add(
            d,
            pair_distance(
                &k1_table_from_printed_eta(&a, &p1, s)?.eval(&z),
                &oracle,
                false,
            ),
        );
        derived.record(d);

        let pm = CubicFamilyParams { k: -1, ..p };
        let oracle = conjugate_oracle(&a, &pm, s, &z)?;
        let good = step_conjugated_k_minus_one(&a, &pm, s, &z)?;
        let [l1, l2] = conjugation_coefficients(&a, &pm, s).lambda;
        let ratio = (l2 * z[0] + l1 * z[1]) / (l1 * z[0] + l2 * z[1]);
        let swapped = [good[0] * ratio, good[1] * ratio];
        let d = pair_distance(&good, &oracle, false);
        denom.add(d, pair_distance(&swapped, &oracle, false));
        derived.record(d);
        Ok(())
    });
    notes.push(sqrt_cubic.note(
        "sqrt-cubic-discriminant",
        "square-root cubic step against the cubic family: x1(x1 + 2 x2) under the root with \
         prefactor 1/3 and factor n, against the displayed x1^2 x2 with prefactor 1/2",
    ));
    notes.push(theta.note(
        "conjugated-theta-indices",
        "conjugated step against A F(A^-1 z): theta indices (2,m;m) and (1,m;m+1) against \
         the displayed (2,n;1), (1,n;1), (1,n;0), (2,n;0)",
    ));
    notes.push(eta.note(
        "k1-eta-coefficients",
        "k = 1 coefficient table against the conjugated step: eta_n1 with theta_1(1,n;n+1) \
         on A21 against the displayed theta_1(1,n;n)",
    ));
    notes.push(denom.note(
        "k-minus-one-denominator",
        "rational k = -1 form against the conjugated step: denominator lambda2 z1 + lambda1 z2 \
         against the displayed lambda1 z1 + lambda2 z2",
    ));
    rep.finish(vec![derived])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_rejected() {
        let cfg = VerifyConfig {
            suites: vec!["nope".into()],
            ..Default::default()
        };
        assert!(run_suites(&cfg).is_err());
    }

    #[test]
    fn set_distance_symmetric() {
        let a = [[Cx::new(1.0, 0.0), Cx::new(2.0, 0.0)]];
        let b = [
            [Cx::new(1.0, 0.0), Cx::new(2.0, 0.0)],
            [Cx::new(5.0, 0.0), Cx::new(2.0, 0.0)],
        ];
        assert!(set_distance(&a, &b, false) > 0.5);
        assert_eq!(set_distance(&a, &a, false), 0.0);
    }
}
