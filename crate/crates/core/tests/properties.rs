//! Randomized checks of the solution invariants.
//!
//! With quadratic displacement, linear velocity and a constant source the
//! exact solution is a quadratic polynomial on each region, which every
//! quadrature and interpolation step of the solver reproduces exactly. The
//! solver then has to agree with the quadrature oracle to round-off.

use charwave::assembly::{
    classify_case, evaluate, generalized_dalembert_holds, jump_at_level, solve, CaseKind,
};
use charwave::cauchy::Side;
use charwave::geometry::classify_point;
use charwave::problem::{GridParams, PicardParams, ProblemSpec};
use charwave::verify::{check_definition1, linear_oracle, ToleranceProfile};
use proptest::prelude::*;

fn poly(c: &[f64]) -> String {
    c.iter()
        .enumerate()
        .map(|(k, v)| format!("({v})*x^{k}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Debug, Clone)]
struct Linear {
    a: f64,
    x0: f64,
    value: f64,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    psi1: Vec<f64>,
    psi2: Vec<f64>,
    source: f64,
}

impl Linear {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec::builder(self.a, self.x0, self.value)
            .phi1(&poly(&self.phi1))
            .phi2(&poly(&self.phi2))
            .psi1(&poly(&self.psi1))
            .psi2(&poly(&self.psi2))
            .source(&format!("{}", self.source))
            .build()
            .unwrap()
    }
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

fn linear_problem() -> impl Strategy<Value = Linear> {
    (
        0.5..2.0f64,
        -0.5..0.5f64,
        -2.0..2.0f64,
        coeffs(3),
        coeffs(3),
        coeffs(2),
        coeffs(2),
        -1.0..1.0f64,
    )
        .prop_map(|(a, x0, value, phi1, phi2, psi1, psi2, source)| Linear {
            a,
            x0,
            value,
            phi1,
            phi2,
            psi1,
            psi2,
            source,
        })
}

fn grid(nt: usize) -> GridParams {
    GridParams { t_final: 1.0, x_lo: -2.0, x_hi: 2.0, nt }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_oracle_on_polynomial_data(p in linear_problem(), nt in 8usize..20) {
        let spec = p.spec();
        let sol = solve(&spec, &grid(nt), &PicardParams::default()).unwrap();
        let g = *sol.grid();
        for (n, i, _, v) in sol.window_nodes().step_by(7) {
            let (t, x) = (g.t(n), g.x(i));
            let oracle = linear_oracle(&spec, t, x, 8).unwrap();
            prop_assert!((v.u - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()), "({t}, {x}): {} vs {oracle}", v.u);
        }
    }

    #[test]
    fn jumps_are_the_prescribed_constants(p in linear_problem(), nt in 8usize..20) {
        let spec = p.spec();
        let sol = solve(&spec, &grid(nt), &PicardParams::default()).unwrap();
        let j = *sol.jumps();
        let g = *sol.grid();
        for n in 1..=nt {
            if -(n as i64) >= g.i_lo {
                let l = jump_at_level(&sol, n, Side::Left).unwrap();
                prop_assert!((l - j.left).abs() <= 1e-9, "{n}: {l} {j:?}");
            }
            if (n as i64) <= g.i_hi {
                let r = jump_at_level(&sol, n, Side::Right).unwrap();
                prop_assert!((r - j.right).abs() <= 1e-9, "{n}: {r} {j:?}");
            }
        }
        let apex = evaluate(&sol, 0.0, spec.x0).unwrap();
        prop_assert!((apex.u - spec.value_at_x0).abs() <= 1e-12);
    }

    #[test]
    fn definition_checks_pass(p in linear_problem()) {
        let sol = solve(&p.spec(), &grid(16), &PicardParams::default()).unwrap();
        let rep = check_definition1(&sol, &ToleranceProfile::default());
        prop_assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn evaluation_region_follows_geometry(
        p in linear_problem(),
        t in 0.0..1.0f64,
        x in -1.9..1.9f64,
    ) {
        let spec = p.spec();
        let sol = solve(&spec, &grid(10), &PicardParams::default()).unwrap();
        let e = evaluate(&sol, t, x).unwrap();
        prop_assert_eq!(e.region, classify_point(spec.a, spec.x0, t, x).unwrap());
        let oracle = linear_oracle(&spec, t, x, 8).unwrap();
        // interpolation between exact nodes of a quadratic: O(h^2) with h = 0.1
        prop_assert!((e.u - oracle).abs() <= 0.1 * (1.0 + oracle.abs()));
    }

    #[test]
    fn solving_is_deterministic(p in linear_problem()) {
        let spec = p.spec();
        let a = solve(&spec, &grid(8), &PicardParams::default()).unwrap();
        let b = solve(&spec, &grid(8), &PicardParams::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn case_predicate_coherence(
        p1 in prop::sample::select(vec![-1.0, 0.0, 0.5, 1.0, 2.0, 3.0]),
        p2 in prop::sample::select(vec![-1.0, 0.0, 0.5, 1.0, 2.0, 3.0]),
        a in prop::sample::select(vec![-1.0, 0.0, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]),
    ) {
        let spec = ProblemSpec::builder(1.0, 0.0, a)
            .phi1(&format!("{p1} + sin(x)"))
            .phi2(&format!("{p2} + x^2"))
            .build()
            .unwrap();
        let case = classify_case(&spec).unwrap();
        let holds = generalized_dalembert_holds(&spec).unwrap();
        prop_assert_eq!(holds, matches!(case, CaseKind::Continuous | CaseKind::MidpointJump));
        let expected = if p1 == a && p2 == a {
            CaseKind::Continuous
        } else if p1 != p2 && a == 0.5 * (p1 + p2) {
            CaseKind::MidpointJump
        } else {
            CaseKind::GeneralJump
        };
        prop_assert_eq!(case, expected);
    }
}
