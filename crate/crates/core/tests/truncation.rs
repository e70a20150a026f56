use gausscf::asym::{
    borwein_bound, chi_asym, correction_closed, dilation, dominant_asym_z_neg, dominant_asym_z_pos, error_asymptote,
    error_asymptote_star, error_estimate_components, recessive_asym,
};
use gausscf::cf::{convergent, truncation_error_actual, truncation_error_star, CfVariant, CoefficientStream};
use gausscf::hyp2f1::{chi_scaled, frobenius_sequence};
use gausscf::oracle::{cf_exact, log_closed_form, ratio_to_f64, rational_from_f64, series_highprec, RationalTriple};
use gausscf::{EvalContext, FrobeniusKind, ParamTriple, ShiftVector};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx() -> EvalContext {
    EvalContext::default()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn exact_convergent_examples() {
    let t = RationalTriple::new(q(1, 1), q(1, 1), q(2, 1));
    let s = CoefficientStream::exact(CfVariant::Original, &t, q(1, 2)).unwrap();
    assert_eq!(cf_exact(&s, 0).unwrap(), q(1, 1));
    assert_eq!(cf_exact(&s, 2).unwrap(), q(10, 9));
    assert_eq!(convergent(&s, 2).unwrap(), q(10, 9));
}

#[test]
fn frozen_reference_series_value() {
    let t = RationalTriple::new(q(1, 2), q(3, 2), q(9, 4));
    let v = series_highprec(&t, &q(1, 4), 60).unwrap();
    assert_eq!(
        v.to_scientific(58),
        "1.097897856212758006386773368703773179877250489617580032468e0"
    );
    assert_eq!(series_highprec(&t, &q(0, 1), 30).unwrap().to_f64(), 1.0);
}

#[test]
fn star_fraction_tends_to_the_logarithm() {
    let s = CoefficientStream::exact(CfVariant::Star, &RationalTriple::new(q(0, 1), q(1, 1), q(2, 1)), q(1, 2)).unwrap();
    let c = cf_exact(&s, 80).unwrap();
    let two_ln2 = log_closed_form(&q(1, 2), 40).unwrap();
    assert!((ratio_to_f64(&c) - two_ln2.to_f64()).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn float_convergents_track_exact_ones(a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.6f64..3.0, z in -3.0f64..0.9, n in 0usize..40) {
        let t = ParamTriple::new(a, b, c);
        let Ok(fs) = CoefficientStream::original(&t, z) else { return Ok(()) };
        let rt = RationalTriple::from_params(&t).unwrap();
        let es = CoefficientStream::exact(CfVariant::Original, &rt, rational_from_f64(z)).unwrap();
        let (Ok(x), Ok(y)) = (convergent(&fs, n), cf_exact(&es, n)) else { return Ok(()) };
        let y = ratio_to_f64(&y);
        prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{} vs {}", x, y);
    }

    #[test]
    fn dilation_is_a_contraction(z in -1e6f64..0.999_999) {
        let w = dilation(z);
        prop_assert!(w.abs() < 1.0);
        prop_assert_eq!(w.signum(), if z == 0.0 { w.signum() } else { z.signum() });
    }
}

#[test]
fn rescaled_fraction_is_a_multiple() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    let o = CoefficientStream::original(&t, 0.5).unwrap();
    let r = CoefficientStream::rescaled(&t, 0.5).unwrap();
    for n in [1, 5, 20] {
        let lhs = convergent(&r, n).unwrap();
        let rhs = convergent(&o, n).unwrap() * 0.5 / 2.25;
        assert!((lhs - rhs).abs() < 1e-13 * rhs.abs());
    }
}

#[test]
fn prediction_tracks_actual_with_shrinking_deviation() {
    let t = ParamTriple::new(1.0, 1.0, 2.0);
    let z = 0.5;
    let dev: Vec<f64> = [32usize, 64, 128, 256]
        .iter()
        .map(|&n| {
            let e = truncation_error_actual(&t, z, n, &ctx()).unwrap().error.to_scaled();
            let p = error_asymptote(&t, z, n as u64, &ctx()).unwrap();
            ((e / p).re() - 1.0).abs()
        })
        .collect();
    assert!(dev[0] < 0.5 / 32f64.sqrt());
    for w in dev.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn sign_of_the_error_for_negative_variable() {
    let t = ParamTriple::new(0.3, 0.7, 1.1);
    for z in [-0.5, -2.0] {
        for n in 1..40 {
            let e = truncation_error_actual(&t, z, n, &ctx()).unwrap().error.signum();
            let p = error_asymptote(&t, z, n as u64, &ctx()).unwrap().re().signum();
            assert_eq!(e as f64, p, "z={z} n={n}");
        }
    }
}

#[test]
fn star_prediction_for_the_logarithm() {
    let (b, c, z) = (1.0, 2.0, 0.5);
    let mut last = f64::INFINITY;
    for n in [16, 64, 256] {
        let e = truncation_error_star(b, c, z, n, &ctx()).unwrap().error.to_scaled();
        let r = (e / error_asymptote_star(b, c, z, n as u64).unwrap()).re();
        assert!((r - 1.0).abs() < last);
        last = (r - 1.0).abs();
    }
    assert!(error_asymptote_star(b, c, 0.0, 10).unwrap().is_zero());
}

#[test]
fn borwein_examples() {
    for (b, c, z, n) in [(2.0, 3.0, -1.0, 10usize), (2.0, 4.0, -0.5, 20)] {
        let e = truncation_error_star(b, c, z, n, &ctx()).unwrap().error.to_f64().abs();
        assert!(e <= borwein_bound(b, c, z, n as u64).unwrap(), "{b} {c} {z} {n}");
    }
}

#[test]
fn borwein_bound_dominates_in_its_regime() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let b = rng.gen_range(2.0..4.0);
        let c = rng.gen_range(b + 1.0..=2.0 * b);
        let z = rng.gen_range(-1.0..-0.01);
        let n = rng.gen_range(1..60);
        let e = truncation_error_star(b, c, z, n, &ctx()).unwrap().error.to_f64().abs();
        assert!(e <= borwein_bound(b, c, z, n as u64).unwrap());
    }
}

fn halving(devs: &[f64]) -> bool {
    devs.windows(2).all(|w| w[1] < 0.75 * w[0])
}

#[test]
fn recessive_solution_asymptotics() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    let devs: Vec<f64> = [8u64, 16, 32]
        .iter()
        .map(|&m| {
            let y = frobenius_sequence(FrobeniusKind::Y1_0, &t, 0.5, 2 * m, &ctx()).unwrap();
            ((y / recessive_asym(&t, 0.5, 2 * m).unwrap()).re() - 1.0).abs()
        })
        .collect();
    assert!(halving(&devs), "{devs:?}");
    // odd indices use the same formula
    let odd = frobenius_sequence(FrobeniusKind::Y1_0, &t, 0.5, 65, &ctx()).unwrap();
    assert!(((odd / recessive_asym(&t, 0.5, 65).unwrap()).re() - 1.0).abs() < 0.05);
}

#[test]
fn dominant_solution_asymptotics() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    let devs: Vec<f64> = [16u64, 32, 64]
        .iter()
        .map(|&n| {
            let y = frobenius_sequence(FrobeniusKind::Y1_1, &t, 0.5, n, &ctx()).unwrap();
            ((y / dominant_asym_z_pos(&t, 0.5, n).unwrap()).re() - 1.0).abs()
        })
        .collect();
    assert!(halving(&devs), "{devs:?}");
    let devs: Vec<f64> = [16u64, 32, 64]
        .iter()
        .map(|&n| {
            let y = frobenius_sequence(FrobeniusKind::Y1_INF, &t, -2.0, n, &ctx()).unwrap();
            let r = y / dominant_asym_z_neg(&t, -2.0, n).unwrap();
            (r.to_complex() - 1.0).norm()
        })
        .collect();
    assert!(halving(&devs), "{devs:?}");
}

#[test]
fn chi_asymptotics() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    let devs: Vec<f64> = [8i64, 16, 32, 64]
        .iter()
        .map(|&m| {
            let x = chi_scaled(&t.shift(ShiftVector::P, m)).unwrap();
            ((x / chi_asym(&t, m as u64).unwrap()).re() - 1.0).abs()
        })
        .collect();
    assert!(halving(&devs), "{devs:?}");
}

#[test]
fn assembled_estimate_agrees_with_closed_form() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    for z in [0.5, -0.5] {
        let comp = error_estimate_components(&t, z, 24, &ctx()).unwrap();
        assert!(comp.leading.rel_diff(&error_asymptote(&t, z, 24, &ctx()).unwrap()) < 1e-9);
        let cc = correction_closed(&t, z, 24, &ctx()).unwrap();
        assert!(comp.correction.rel_diff(&cc) < 1e-9, "{z}: {:?} vs {:?}", comp.correction.to_complex(), cc.to_complex());
        let next = error_estimate_components(&t, z, 25, &ctx()).unwrap();
        let rate = (next.correction / comp.correction).re();
        assert!((rate / dilation(z) - 1.0).abs() < 1e-12);
    }
}
