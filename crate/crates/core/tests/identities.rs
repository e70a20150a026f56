use gausscf::asym::{casoratian_closed, casoratian_numeric, Casoratian};
use gausscf::cf::recurrence_residual;
use gausscf::hyp2f1::{connection_residuals, contiguous_residual, frobenius_scaled, hyp2f1_real, Contiguous};
use gausscf::{EvalContext, FrobeniusKind, ParamTriple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn ctx() -> EvalContext {
    EvalContext::default()
}

fn grid() -> Vec<(ParamTriple, f64)> {
    let ts = [
        ParamTriple::new(0.5, 1.5, 2.25),
        ParamTriple::new(0.3, 0.7, 1.1),
        ParamTriple::new(1.2, 0.4, 2.6),
    ];
    let zs = [-2.0, -0.5, 0.25, 0.5, 0.75];
    ts.iter().flat_map(|t| zs.iter().map(move |&z| (*t, z))).collect()
}

#[test]
fn connection_formulas() {
    for (t, z) in grid() {
        let r = connection_residuals(&t, z, &ctx()).unwrap();
        if z > 0.0 {
            assert!(r.y1_1.unwrap() < TOL && r.y2_1.unwrap() < TOL, "{t} {z}: {r:?}");
            assert!(r.y1_inf.is_none());
        } else {
            assert!(r.y1_inf.unwrap() < TOL && r.y2_inf.unwrap() < TOL, "{t} {z}: {r:?}");
            assert!(r.y1_1.is_none());
        }
    }
}

#[test]
fn contiguous_relations_hold_for_every_solution() {
    for (t, z) in grid() {
        for kind in FrobeniusKind::ALL.into_iter().filter(|k| k.accepts(z)) {
            for rel in Contiguous::ALL {
                let r = contiguous_residual(&t, z, kind, rel, &ctx()).unwrap();
                assert!(r < TOL, "{t} z={z} {kind:?} {rel:?}: {r:e}");
            }
        }
    }
}

#[test]
fn rescaled_recurrence() {
    for (t, z) in grid() {
        for kind in FrobeniusKind::ALL.into_iter().filter(|k| k.accepts(z)) {
            for n in [0, 1, 2, 7, 30] {
                let r = recurrence_residual(kind, &t, z, n, &ctx()).unwrap();
                assert!(r < TOL, "{t} z={z} {kind:?} n={n}: {r:e}");
            }
        }
    }
}

#[test]
fn casoratians() {
    let t = ParamTriple::new(0.5, 1.5, 2.25);
    let z = 0.5;
    let w1 = casoratian_closed(&t, z, Casoratian::Omega1).unwrap();
    assert!(w1.rel_diff(&casoratian_numeric(&t, z, Casoratian::Omega1, &ctx()).unwrap()) < TOL);
    let w0 = casoratian_numeric(&t, z, Casoratian::Omega0, &ctx()).unwrap();
    assert!(w0.rel_diff(&-w1) < TOL);
    let wr = casoratian_numeric(&t, z, Casoratian::Wronskian, &ctx()).unwrap();
    assert!(wr.rel_diff(&casoratian_closed(&t, z, Casoratian::Wronskian).unwrap()) < TOL);
    let (_, b, c) = t.real().unwrap();
    assert!(w0.rel_diff(&(wr * (-(1.0 - z) / (c - b)))) < TOL);
    let wi = casoratian_closed(&t, -2.0, Casoratian::OmegaInf).unwrap();
    assert!(wi.rel_diff(&casoratian_numeric(&t, -2.0, Casoratian::OmegaInf, &ctx()).unwrap()) < TOL);
}

#[test]
fn casoratians_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 10 {
        let t = ParamTriple::new(rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.6..3.0));
        let zp = rng.gen_range(0.1..0.8);
        let zn = rng.gen_range(-3.0..-0.1);
        let Ok(w1) = casoratian_closed(&t, zp, Casoratian::Omega1) else { continue };
        let Ok(wi) = casoratian_closed(&t, zn, Casoratian::OmegaInf) else { continue };
        let n1 = casoratian_numeric(&t, zp, Casoratian::Omega1, &ctx()).unwrap();
        let ni = casoratian_numeric(&t, zn, Casoratian::OmegaInf, &ctx()).unwrap();
        let n0 = casoratian_numeric(&t, zp, Casoratian::Omega0, &ctx()).unwrap();
        assert!(w1.rel_diff(&n1) < TOL, "{t} {zp}");
        assert!(wi.rel_diff(&ni) < TOL, "{t} {zn}");
        assert!(n0.rel_diff(&-n1) < TOL, "{t} {zp}");
        checked += 1;
    }
}

#[test]
fn pfaff_invariance() {
    for (t, z) in grid() {
        let (a, b, c) = t.real().unwrap();
        let lhs = hyp2f1_real(a, b, c, z, &ctx()).unwrap();
        let rhs = hyp2f1_real(a, c - b, c, z / (z - 1.0), &ctx()).unwrap() * (1.0 - z).powf(-a);
        assert!(lhs.rel_diff(&rhs) < 1e-10, "{t} {z}");
    }
}

#[test]
fn derivative_is_the_unit_shift() {
    let h = 1e-5;
    for (t, z) in grid() {
        let y = |x: f64| frobenius_scaled(FrobeniusKind::Y1_0, &t, x, &ctx()).unwrap().re();
        let fd = (y(z + h) - y(z - h)) / (2.0 * h);
        let up = frobenius_scaled(FrobeniusKind::Y1_0, &t.shift(gausscf::ShiftVector::ONE, 1), z, &ctx())
            .unwrap()
            .re();
        assert!((fd / up - 1.0).abs() < 1e-6, "{t} {z}: {fd} vs {up}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connection_holds_in_a_box(a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.6f64..3.0, z in prop_oneof![-3.0f64..-0.1, 0.1f64..0.9]) {
        let t = ParamTriple::new(a, b, c);
        let r = connection_residuals(&t, z, &ctx());
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assert!(r.max() < 1e-8, "{:?}", r);
    }

    #[test]
    fn even_relation_in_a_box(a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.6f64..3.0, z in -3.0f64..0.9) {
        let t = ParamTriple::new(a, b, c);
        let r = contiguous_residual(&t, z, FrobeniusKind::Y1_0, Contiguous::Even, &ctx());
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() < 1e-9);
    }
}
