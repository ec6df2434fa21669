//! Property tests for the structural invariants: log-convexity, route
//! equivalence, the eigen-relation, sector membership, solver linearity.

use momentflow::growth;
use momentflow::kernel;
use momentflow::moments::MomentFamily;
use momentflow::solver;
use momentflow::spectral::{decompose, DecomposeOptions};
use momentflow::{Complex64, ComplexMatrix};
use proptest::prelude::*;

fn family_strategy() -> impl Strategy<Value = MomentFamily> {
    prop_oneof![
        Just(MomentFamily::Factorial),
        (0.3f64..2.5).prop_map(|s| MomentFamily::GammaScale { s }),
        ((0.5f64..2.0), (-1.5f64..1.5))
            .prop_map(|(alpha, beta)| MomentFamily::GevreyLog { alpha, beta }),
    ]
}

fn complex_in_disc(radius: f64) -> impl Strategy<Value = Complex64> {
    ((0.0f64..1.0), (0.0f64..std::f64::consts::TAU))
        .prop_map(move |(u, t)| Complex64::from_polar(radius * u.sqrt(), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_sequences_are_log_convex(family in family_strategy(), base in 1usize..400) {
        let lm = family.log_moments(base + 2);
        let gap = lm[base + 2] + lm[base] - 2.0 * lm[base + 1];
        prop_assert!(gap >= -1e-9 * (1.0 + lm[base + 1].abs()));
    }

    #[test]
    fn associated_m_is_monotone(family in family_strategy(), t in 0.0f64..50.0, dt in 0.01f64..5.0) {
        let lo = family.associated_m(t);
        let hi = family.associated_m(t + dt);
        prop_assert!(hi >= lo - 1e-10);
    }

    #[test]
    fn delta_routes_agree(
        family in family_strategy(),
        lambda in complex_in_disc(2.0),
        z in complex_in_disc(2.0),
        h in 1usize..=4,
    ) {
        prop_assume!(lambda.norm() > 1e-3);
        prop_assume!((lambda * z).norm() <= 4.0);
        let a = kernel::eval_delta_h(&family, lambda, h, z, 1e-12).unwrap();
        let b = kernel::eval_delta_h_via_derivative(&family, lambda, h, z, 1e-12).unwrap();
        let budget = 10.0 * (a.abs_error_bound + b.abs_error_bound) + 1e-12 * (1.0 + a.value.norm());
        prop_assert!((a.value - b.value).norm() <= budget,
            "direct {} vs derivative {}", a.value, b.value);
    }

    #[test]
    fn kernel_satisfies_eigen_relation(
        family in family_strategy(),
        lambda in complex_in_disc(1.5),
        z in complex_in_disc(1.5),
    ) {
        // moment derivative of the kernel series evaluates to lambda * E(lambda z)
        let series = kernel::delta_kernel_series(&family, lambda, 0, 70);
        let derived = series.moment_derivative().unwrap();
        let lhs = derived.eval(z).value;
        let rhs = lambda * kernel::eval_e(&family, lambda * z, 1e-13).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn decay_sector_membership_matches_per_arc_predicate(
        lambdas in proptest::collection::vec(complex_in_disc(2.0), 1..4),
        omega in 0.5f64..1.5,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        for l in &lambdas {
            prop_assume!(l.norm() > 0.05);
        }
        let a = ComplexMatrix::diagonal(&lambdas);
        let dec = decompose(&a, &DecomposeOptions::default()).unwrap();
        let sectors = growth::decay_sectors(&dec, omega);
        let direct = dec.eigenvalues.iter().all(|info| {
            let width = 2.0 * std::f64::consts::PI - omega * std::f64::consts::PI;
            let offset = (theta - (omega * std::f64::consts::PI / 2.0 - info.lambda.arg()))
                .rem_euclid(2.0 * std::f64::consts::PI);
            offset > 1e-9 && offset < width - 1e-9
        });
        let via_sectors = sectors.contains(theta);
        // skip hair-width boundary disagreements
        if direct != via_sectors {
            let near_boundary = dec.eigenvalues.iter().any(|info| {
                let lo = omega * std::f64::consts::PI / 2.0 - info.lambda.arg();
                let width = 2.0 * std::f64::consts::PI - omega * std::f64::consts::PI;
                let offset = (theta - lo).rem_euclid(2.0 * std::f64::consts::PI);
                offset < 1e-6 || (offset - width).abs() < 1e-6
            });
            prop_assert!(near_boundary, "membership mismatch away from boundaries");
        }
    }

    #[test]
    fn indicator_never_exceeds_modulus_power(
        lambda in complex_in_disc(2.0),
        rho in 0.4f64..2.5,
        theta in -7.0f64..7.0,
    ) {
        prop_assume!(lambda.norm() > 1e-6);
        let h = growth::theoretical_indicator(lambda, rho, theta);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= lambda.norm().powf(rho) + 1e-12);
        // 2π-periodic
        let shifted = growth::theoretical_indicator(lambda, rho, theta + std::f64::consts::TAU);
        prop_assert!((h - shifted).abs() <= 1e-9 * (1.0 + h));
        // peak at the conjugate direction
        let peak = growth::theoretical_indicator(lambda, rho, -lambda.arg());
        prop_assert!((peak - lambda.norm().powf(rho)).abs() <= 1e-10 * (1.0 + peak));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closed_form_matches_oracle_on_small_systems(
        seed_entries in proptest::collection::vec(complex_in_disc(0.8), 9),
        y0 in proptest::collection::vec(complex_in_disc(1.0), 3),
        z in complex_in_disc(1.5),
    ) {
        let a = ComplexMatrix::new(3, seed_entries).unwrap();
        let family = MomentFamily::Factorial;
        let dec = decompose(&a, &DecomposeOptions::default()).unwrap();
        let fund = solver::fundamental_system(&a, &dec, &family);
        let sol = solver::solve_cauchy(&fund, Complex64::ZERO, &y0, 1e-10).unwrap();
        let closed = sol.eval(z, 1e-12).unwrap();
        let oracle = solver::oracle_eval(&a, &family, &y0, z, 120).unwrap();
        let scale = 1.0 + oracle.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for j in 0..3 {
            prop_assert!((closed.values[j] - oracle[j]).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn solving_is_linear_in_the_data(
        diag in proptest::collection::vec(complex_in_disc(1.5), 2),
        y1 in proptest::collection::vec(complex_in_disc(1.0), 2),
        y2 in proptest::collection::vec(complex_in_disc(1.0), 2),
        z in complex_in_disc(1.5),
    ) {
        prop_assume!((diag[0] - diag[1]).norm() > 1e-3);
        let a = ComplexMatrix::diagonal(&diag);
        let family = MomentFamily::GammaScale { s: 0.8 };
        let dec = decompose(&a, &DecomposeOptions::default()).unwrap();
        let fund = solver::fundamental_system(&a, &dec, &family);
        let combo: Vec<Complex64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
        let s1 = solver::solve_cauchy(&fund, Complex64::ZERO, &y1, 1e-10).unwrap();
        let s2 = solver::solve_cauchy(&fund, Complex64::ZERO, &y2, 1e-10).unwrap();
        let sc = solver::solve_cauchy(&fund, Complex64::ZERO, &combo, 1e-10).unwrap();
        let v1 = s1.eval(z, 1e-12).unwrap();
        let v2 = s2.eval(z, 1e-12).unwrap();
        let vc = sc.eval(z, 1e-12).unwrap();
        for j in 0..2 {
            let want = v1.values[j] + v2.values[j];
            prop_assert!((vc.values[j] - want).norm() <= 1e-9 * (1.0 + want.norm()));
        }
    }
}
