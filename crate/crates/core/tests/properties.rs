//! Invariants checked on randomly drawn inputs.

use proptest::prelude::*;

use saddlenode::figures::{transition_figure, FigureId};
use saddlenode::integrate::{solve, ScalarField, SolveOptions};
use saddlenode::models::{preset, ModelSpec};
use saddlenode::signals::{cp_distance, membership_check, PSpaceParams, Signal};
use saddlenode::transitions::Verdict;

fn circuit_field(lambda: f64) -> ScalarField {
    preset("fig5", 0.0, 0.0)
        .unwrap()
        .build()
        .unwrap()
        .field(lambda)
}

fn signal_strategy() -> impl Strategy<Value = Signal> {
    prop_oneof![
        (0.0..20.0f64).prop_map(Signal::plateau_hat),
        (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, w)| Signal::sin(a, w)),
        (-1.0..1.0f64).prop_map(Signal::constant),
        (0.0..5.0f64, -1.0..1.0f64).prop_map(|(k, target)| Signal::arctan_blend(
            Signal::sin(1.0, 0.05),
            target,
            k
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cocycle(lambda in -1.0..0.5f64, x0 in -2.0..2.0f64, a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64) {
        let mut ts = [a, b, c];
        ts.sort_by(f64::total_cmp);
        let field = circuit_field(lambda);
        let tol = 1e-9;
        let opts = SolveOptions::with_tol(tol);
        let mid = solve(&field, ts[0], x0, ts[1], opts).unwrap().final_state();
        let two = solve(&field, ts[1], mid, ts[2], opts).unwrap().final_state();
        let one = solve(&field, ts[0], x0, ts[2], opts).unwrap().final_state();
        prop_assert!((two - one).abs() <= 100.0 * tol, "gap {}", (two - one).abs());
    }

    #[test]
    fn time_reversal(lambda in -1.0..0.5f64, x0 in -3.0..3.0f64, span in 0.1..1.0f64) {
        let field = circuit_field(lambda);
        let opts = SolveOptions::with_tol(1e-10);
        let there = solve(&field, 0.0, x0, span, opts).unwrap().final_state();
        let back = solve(&field, span, there, 0.0, opts).unwrap().final_state();
        prop_assert!((back - x0).abs() <= 1e-5, "{} vs {}", back, x0);
    }

    #[test]
    fn dense_output_matches_restarts(x0 in -2.0..2.0f64, t in 0.1..9.9f64) {
        let field = circuit_field(-0.5);
        let opts = SolveOptions::with_tol(1e-10);
        let traj = solve(&field, 0.0, x0, 10.0, opts).unwrap();
        let direct = solve(&field, 0.0, x0, t, opts).unwrap().final_state();
        prop_assert!((traj.eval(t).unwrap() - direct).abs() <= 1e-7);
    }

    #[test]
    fn kirchhoff_form_of_the_circuit(
        t in -20.0..20.0f64,
        q in -3.0..3.0f64,
        lambda in -3.0..3.0f64,
        r in 0.5..2.0f64,
        alpha in 1.0..8.0f64,
        beta in 0.5..2.0f64,
        v0 in -1.0..1.0f64,
    ) {
        let spec = ModelSpec::Circuit {
            e0: Signal::sum(vec![Signal::sin(1.0, 1.0), Signal::sin(1.0, 2f64.sqrt())]),
            c0: Signal::constant(1.0),
            p: Signal::plateau_hat(3.0),
            amplitude: 0.2,
            resistance: r,
            alpha,
            beta,
            v0,
            i0: None,
        };
        let field = spec.build().unwrap().field(lambda);
        // Q' = I1 - I2 with E = E0 + λR, V = Q/C and the cubic diode law.
        let i0 = beta * v0.powi(3) - alpha * v0;
        let diode = |v: f64| i0 - alpha * (v - v0) + beta * (v - v0).powi(3);
        let c = 1.0 + 0.2 * Signal::plateau_hat(3.0).eval(t);
        let e = t.sin() + (2f64.sqrt() * t).sin() + lambda * r;
        let v = q / c;
        let expected = (e - v) / r - diode(v);
        prop_assert!((field.h(t, q) - expected).abs() <= 1e-11 * (1.0 + expected.abs()));
    }

    #[test]
    fn analytic_derivatives(t in -30.0..30.0f64, x in -3.0..3.0f64, lambda in -0.5..0.5f64) {
        let specs = [
            preset("fig1", 2.0, 0.0).unwrap(),
            preset("fig3", 0.5, 0.0).unwrap(),
            preset("fig5", 1.0, 0.0).unwrap(),
            ModelSpec::hunting_concave(),
            ModelSpec::hunting_dconcave(),
            ModelSpec::GaussianCubicDemo { p: Signal::sin(0.5, 0.5) },
            ModelSpec::CubicDemo { b: 0.3, c: 1.0 },
        ];
        for spec in specs {
            let field = spec.build().unwrap().field(lambda);
            // Hunting and Holling laws are only smooth for x > 0.
            let x = if matches!(spec.id(), "holling" | "hunting-concave" | "hunting-dconcave") { x.abs() + 0.05 } else { x };
            let m = field.derivative_mismatch(&[(t, x)]);
            prop_assert!(m <= 1e-5, "{}: mismatch {}", spec.id(), m);
        }
    }

    #[test]
    fn shifts_compose(p in signal_strategy(), a in -50.0..50.0f64, b in -50.0..50.0f64, t in -50.0..50.0f64) {
        let lhs = p.shift(a).shift(b).eval(t);
        let rhs = p.eval(t + a + b);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn cp_distance_is_a_metric(p in signal_strategy(), q in signal_strategy(), r in signal_strategy()) {
        let d = |x: &Signal, y: &Signal| cp_distance(x, y, 8, 16).value;
        prop_assert!(d(&p, &p) == 0.0);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-15);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
        prop_assert!(d(&p, &q) <= 1.0);
    }

    #[test]
    fn hats_belong_to_p(k in 0.0..40.0f64, s in -20.0..20.0f64) {
        let report = membership_check(&Signal::plateau_hat(k).shift(s), PSpaceParams::default(), (-60.0, 60.0), 32);
        prop_assert!(report.pass, "{:?}", report);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn verdicts_are_monotone_in_lambda(a in 0.1..0.6f64, b in 0.1..0.6f64) {
        let fig = transition_figure(FigureId::Sec42).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let rank = |v: Verdict| match v {
            Verdict::Tracking => 0,
            Verdict::Boundary => 1,
            Verdict::Tipping => 2,
        };
        let v_lo = fig.problem.verdict(lo).unwrap().verdict;
        let v_hi = fig.problem.verdict(hi).unwrap().verdict;
        prop_assert!(rank(v_lo) <= rank(v_hi), "{lo} -> {v_lo:?}, {hi} -> {v_hi:?}");
    }
}
