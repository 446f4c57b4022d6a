use proptest::prelude::*;

use solvmaps::bridge::{
    cubic_from_zeros, cubic_zeros_branch, quad_from_zeros, quad_zeros, Branch, MonicQuadratic,
};
use solvmaps::cli::{parse_csv, parse_jsonl, to_csv, to_jsonl, Layout, Row};
use solvmaps::harness::{
    coefficient_residual, enumerate_sign_orbits, pair_distance, ystate_residual, Family,
};
use solvmaps::maps::{
    conda_residual, double_step_cubic, k1_coeff_table, step_conjugated, step_cubic_family,
    step_generalized, step_quadratic_family, yz_forward, CubicFamilyParams, GeneralizedParams,
    LinearChange, QuadraticFamilyParams,
};
use solvmaps::numeric::{cpow, monomial};
use solvmaps::pair::{DistinctZeroPair, ZeroPair};
use solvmaps::ysystem::{y_closed, y_step, YParams, YState};
use solvmaps::{Cx, Sign, SignSequence};

fn cx() -> impl Strategy<Value = Cx> {
    (-1.25f64..1.25, -1.25f64..1.25).prop_map(|(re, im)| Cx::new(re, im))
}

fn pair() -> impl Strategy<Value = [Cx; 2]> {
    (cx(), cx()).prop_map(|(a, b)| [a, b])
}

fn k_nonzero() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-2i64, -1, 1, 2])
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::sample::select(Sign::BOTH.to_vec())
}

fn dz(x: [Cx; 2]) -> DistinctZeroPair {
    DistinctZeroPair::new(x[0], x[1])
}

fn arr(d: DistinctZeroPair) -> [Cx; 2] {
    [d.x1, d.x2]
}

proptest! {
    #[test]
    fn quad_family_sign_flip_swaps_exactly(a in cx(), b in cx(), k in k_nonzero(), x in pair()) {
        let p = QuadraticFamilyParams::new(a, b, k);
        let plus = step_quadratic_family(&p, Sign::Plus, &ZeroPair(x));
        let minus = step_quadratic_family(&p, Sign::Minus, &ZeroPair(x));
        prop_assume!(plus.is_ok() && minus.is_ok());
        prop_assert_eq!(minus.unwrap(), plus.unwrap().swapped());
    }

    #[test]
    fn quad_family_reaches_one_unordered_state(a in cx(), b in cx(), x in pair(), depth in 1usize..5) {
        let fam = Family::QuadFamily(QuadraticFamilyParams::new(a, b, 1));
        let orbits = enumerate_sign_orbits(&fam, &x, depth).unwrap();
        prop_assume!(orbits.failures.is_empty());
        for level in &orbits.levels {
            prop_assert_eq!(level.len(), 1);
        }
    }

    #[test]
    fn double_step_matches_two_steps(a in cx(), b in cx(), k in k_nonzero(), x in pair(), s in sign(), t in sign()) {
        let p = CubicFamilyParams::new(a, b, k);
        let two = step_cubic_family(&p, s, &dz(x)).and_then(|y| step_cubic_family(&p, t, &y));
        let once = double_step_cubic(&p, s.times(t), &dz(x));
        prop_assume!(two.is_ok() && once.is_ok());
        let (two, once) = (arr(two.unwrap()), arr(once.unwrap()));
        prop_assume!(two.iter().chain(&once).all(|v| v.norm() < 1e150));
        prop_assert!(pair_distance(&two, &once, false) <= 1e-9);
    }

    #[test]
    fn vieta_generalized_is_quad_family_with_flipped_sign(a in cx(), b in cx(), k in k_nonzero(), z in pair(), s in sign()) {
        let one = Cx::new(1.0, 0.0);
        let zero = Cx::new(0.0, 0.0);
        let g = GeneralizedParams::new(2.0 * a, 2.0 * b, [-one, -one], [zero, zero, one], k).unwrap();
        let q = QuadraticFamilyParams::new(a, b, k);
        let lhs = step_generalized(&g, s, &z);
        let rhs = step_quadratic_family(&q, s.flip(), &ZeroPair(z));
        prop_assume!(lhs.is_ok() && rhs.is_ok());
        prop_assert!(pair_distance(&lhs.unwrap(), &rhs.unwrap().0, false) <= 1e-12);
    }

    #[test]
    fn generalized_coefficients_ignore_sign(alpha in cx(), beta in cx(), b in pair(), c in (cx(), cx(), cx()), z in pair()) {
        prop_assume!(b[1].norm() > 0.1);
        let p = GeneralizedParams::new(alpha, beta, b, [c.0, c.1, c.2], 1);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let yp = yz_forward(&p, &step_generalized(&p, Sign::Plus, &z).unwrap());
        let ym = yz_forward(&p, &step_generalized(&p, Sign::Minus, &z).unwrap());
        let scale = z[0].norm().max(z[1].norm()).powi(2);
        prop_assert!(coefficient_residual(&yp, &ym, scale * scale) <= 1e-9 || ystate_residual(&yp, &ym) <= 1e-9);
    }

    #[test]
    fn closed_form_at_one_step_is_one_step(
        alpha in cx(), beta in cx(), gamma in cx(), y1 in cx(), y2 in cx(),
        k in k_nonzero(), q in -3i64..4, r in -3i64..4,
    ) {
        prop_assume!(y1.norm() > 0.05);
        let p = YParams::new(alpha, beta, gamma, k, q, r).unwrap();
        let y0 = YState::new(y1, y2);
        let stepped = y_step(&p, &y0).unwrap();
        let closed = y_closed(&p, &y0, 1).unwrap().state;
        let terms = (beta * beta * y2 * cpow(y1, q).unwrap()).norm() + (gamma * cpow(y1, r).unwrap()).norm();
        let dev = (stepped.y2 - closed.y2).norm() / terms.max(f64::MIN_POSITIVE);
        prop_assert!((stepped.y1 - closed.y1).norm() <= 1e-12 * stepped.y1.norm());
        prop_assert!(dev <= 1e-12);
    }

    #[test]
    fn zero_plane_is_invariant_without_gamma(alpha in cx(), beta in cx(), y1 in cx(), k in k_nonzero(), q in 0i64..4, r in 0i64..4) {
        let p = YParams::new(alpha, beta, Cx::new(0.0, 0.0), k, q, r).unwrap();
        prop_assume!(y1.norm() > 0.05);
        let next = y_step(&p, &YState::new(y1, Cx::new(0.0, 0.0))).unwrap();
        prop_assert_eq!(next.y2, Cx::new(0.0, 0.0));
    }

    #[test]
    fn quadratic_bridge_round_trip(x in pair()) {
        let scale = x[0].norm().max(x[1].norm());
        prop_assume!((x[0] - x[1]).norm() > 0.1 * scale);
        let back = quad_zeros(&quad_from_zeros(&ZeroPair(x)));
        prop_assert!(pair_distance(&back.0, &x, true) <= 1e-12);
        let m = MonicQuadratic { y1: -(x[0] + x[1]), y2: x[0] * x[1] };
        prop_assert_eq!(quad_from_zeros(&ZeroPair(x)), m);
    }

    #[test]
    fn cubic_bridge_round_trip(y1 in cx(), y2 in cx()) {
        let y = YState::new(y1, y2);
        for b in Branch::BOTH {
            let m = cubic_from_zeros(&cubic_zeros_branch(y1, y2, b));
            let back = YState::new(m.y1, m.y2);
            prop_assert!(coefficient_residual(&back, &y, y1.norm().max(y2.norm().sqrt())) <= 1e-12);
        }
    }

    #[test]
    fn identity_change_reproduces_cubic_family(a in cx(), b in cx(), k in k_nonzero(), x in pair(), s in sign()) {
        let p = CubicFamilyParams::new(a, b, k);
        let direct = step_cubic_family(&p, s, &dz(x));
        let conj = step_conjugated(&LinearChange::identity(), &p, s, &x);
        prop_assume!(direct.is_ok() && conj.is_ok());
        let (direct, conj) = (arr(direct.unwrap()), conj.unwrap());
        prop_assume!(direct.iter().all(|v| v.norm() < 1e150));
        prop_assert!(pair_distance(&direct, &conj, false) <= 1e-12);
    }

    #[test]
    fn coefficient_tables_share_a_factor(a in (cx(), cx(), cx(), cx()), p in (cx(), cx()), s in sign()) {
        let change = LinearChange::new(a.0, a.1, a.2, a.3);
        prop_assume!(change.as_ref().is_ok_and(|c| c.det().norm() > 1e-3));
        let t = k1_coeff_table(&change.unwrap(), &CubicFamilyParams::new(p.0, p.1, 1), s).unwrap();
        prop_assert!(conda_residual(&t).norm() <= 1e-9 * t.max_abs().powi(4).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn power_of_negated_base_differs_by_parity(z in cx(), n in -40i64..40) {
        prop_assume!(z.norm() > 1e-3);
        let (pos, neg) = (cpow(z, n).unwrap(), cpow(-z, n).unwrap());
        prop_assert_eq!(neg, if n % 2 == 0 { pos } else { -pos });
    }

    #[test]
    fn monomial_matches_product_of_powers(z in cx(), w in cx(), m in -8i64..9, n in -8i64..9) {
        prop_assume!(z.norm() > 1e-2 && w.norm() > 1e-2);
        let direct = cpow(z, m).unwrap() * cpow(w, n).unwrap();
        let joint = monomial(&[(z, m), (w, n)]).unwrap();
        prop_assert!((direct - joint).norm() <= 1e-13 * direct.norm());
    }

    #[test]
    fn sign_sequences_round_trip(bits in any::<u64>(), len in 0usize..40) {
        let seq = SignSequence::from_bits(bits, len);
        prop_assert_eq!(seq.to_string().parse::<SignSequence>().unwrap(), seq);
    }

    #[test]
    fn output_rows_round_trip(values in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>(), any::<f64>()), 1..6), bits in any::<u64>()) {
        prop_assume!(values.iter().all(|v| [v.0, v.1, v.2, v.3].iter().all(|x| x.is_finite())));
        let rows: Vec<Row> = values
            .iter()
            .enumerate()
            .map(|(ell, v)| Row {
                ell,
                branch: Some(SignSequence::from_bits(bits, ell).to_string()),
                values: vec![Cx::new(v.0, v.1), Cx::new(v.2, v.3)],
            })
            .collect();
        prop_assert_eq!(parse_csv(Layout::Orbit, &to_csv(Layout::Orbit, &rows)).unwrap(), rows.clone());
        prop_assert_eq!(parse_jsonl(Layout::Orbit, &to_jsonl(Layout::Orbit, &rows)).unwrap(), rows);
    }
}
