mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use quadtwist::arith::{self, kronecker, FundamentalDiscriminant};
use quadtwist::central::{fit_exponent, ScanRecord};
use quadtwist::fewalk::{self, AffineStep, Move};
use quadtwist::lseries::conductor::twisted_conductor_raw;
use quadtwist::lseries::LSeriesSpec;
use quadtwist::mds::{self, Variant};

use common::oracles::kronecker_oracle;

fn record(param: f64, d: i64) -> ScanRecord {
    ScanRecord {
        param,
        d_min: Some(d),
        value: 1.0,
        tested: 1,
        ms: 0,
        error: None,
    }
}

proptest! {
    #[test]
    fn kronecker_matches_euler_criterion(a in -5000i64..5000, n in 1u64..5000) {
        prop_assert_eq!(kronecker(a, n as i64).unwrap() as i64, kronecker_oracle(a, n));
    }

    #[test]
    fn kronecker_multiplicative_in_n(a in -3000i64..3000, m in 1i64..3000, n in 1i64..3000) {
        let lhs = kronecker(a, m * n).unwrap();
        prop_assert_eq!(lhs, kronecker(a, m).unwrap() * kronecker(a, n).unwrap());
    }

    #[test]
    fn kronecker_multiplicative_in_top(a in -3000i64..3000, b in -3000i64..3000, n in 1i64..3000) {
        prop_assume!(n % 2 == 1);
        let lhs = kronecker(a * b, n).unwrap();
        prop_assert_eq!(lhs, kronecker(a, n).unwrap() * kronecker(b, n).unwrap());
    }

    #[test]
    fn quadratic_reciprocity(m in 1i64..4000, n in 1i64..4000) {
        prop_assume!(m % 2 == 1 && n % 2 == 1 && arith::gcd(m as u64, n as u64) == 1);
        let sign = if (m - 1) / 2 % 2 == 1 && (n - 1) / 2 % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(kronecker(m, n).unwrap() * kronecker(n, m).unwrap(), sign);
    }

    #[test]
    fn fundamental_discriminant_definition(d in -5000i64..5000) {
        prop_assume!(d != 0 && d != 1);
        let by_def = common::fundamental_discs(5000).binary_search(&d).is_ok();
        prop_assert_eq!(arith::is_fundamental_discriminant(d).unwrap(), by_def);
    }

    #[test]
    fn words_undo_in_reverse(r in 1u32..=5, letters in proptest::collection::vec(any::<bool>(), 0..12)) {
        let moves: Vec<Move> = letters.iter().map(|&b| if b { Move::Alpha } else { Move::Beta }).collect();
        let mut there_and_back = moves.clone();
        there_and_back.extend(moves.iter().rev());
        let st = fewalk::word_step(r, &there_and_back);
        prop_assert!(st.same_map(&AffineStep::identity()));
    }

    #[test]
    fn correction_polynomials_satisfy_their_functional_equation(
        qi in 0usize..4,
        pi in 0usize..5,
        chi1 in prop_oneof![Just(1i8), Just(-1i8)],
        chi2 in prop_oneof![Just(1i8), Just(-1i8)],
    ) {
        let q = [5i64, 13, -3, -4][qi];
        let p = [3u64, 5, 7, 11, 13][pi];
        prop_assume!(!q.unsigned_abs().is_multiple_of(p));
        let spec = LSeriesSpec::quadratic_char(q).unwrap();
        let fam = mds::solve_corrections(&spec, p, chi1, chi2, 2, Variant::Unramified).unwrap();
        for poly in &fam.p_polys {
            prop_assert_eq!(poly.fe_defect(), 0.0);
            for t in [0.3, 1.7] {
                let s = Complex64::new(t, 0.4);
                let scale = 1.0 + poly.eval(1.0 - s).norm();
                prop_assert!(poly.fe_residual_at(s) < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn fit_recovers_an_exact_line(theta in 0.05f64..1.5, shift in -2.0f64..2.0) {
        // log|d| = θ log N + shift, solved for N at integer d
        let recs: Vec<ScanRecord> = [3i64, -7, 11, 40, -97]
            .iter()
            .map(|&d| record((((d.unsigned_abs() as f64).ln() - shift) / theta).exp(), d))
            .collect();
        let (slope, resid) = fit_exponent(&recs).unwrap();
        prop_assert!((slope - theta).abs() < 1e-9, "{} {}", slope, theta);
        prop_assert!(resid < 1e-9);
    }

    #[test]
    fn unramified_conductor_is_n_times_d_to_the_r(r in 1u32..=3, level in 1u64..5000, di in 0usize..600) {
        let discs = common::fundamental_discs(1000);
        let d = discs[di % discs.len()];
        prop_assume!(arith::gcd(level, d.unsigned_abs()) == 1);
        let fd = FundamentalDiscriminant::new(d).unwrap();
        let got = twisted_conductor_raw(r, level, &[], &fd).unwrap();
        prop_assert_eq!(got, level as u128 * (d.unsigned_abs() as u128).pow(r));
    }
}
