use disc_defect::circle::{cauchy_pv_at_one, check_lemma3, check_lemma4, winding_number, CircleFunction, Grid, Shape};
use disc_defect::random::TrigRng;
use disc_defect::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn real_trig(coeffs: &[(f64, f64)]) -> CircleFunction {
    let n = (coeffs.len() - 1) / 2;
    let raw: Vec<C64> = coeffs[..2 * n + 1].iter().map(|&(a, b)| C64::new(a, b)).collect();
    CircleFunction::from_coeffs(n, raw).real_part()
}

fn sup(f: &CircleFunction) -> f64 {
    f.sup_norm(Grid::for_degree(f.degree()))
}

proptest! {
    #[test]
    fn t0_squared_is_minus_identity_on_mean_free(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..34)) {
        let f = real_trig(&c);
        let mean = CircleFunction::constant(f.mean()[0]);
        let r = f.hilbert_t0().hilbert_t0().add(&f).sub(&mean);
        prop_assert!(sup(&r) <= 1e-11);
    }

    #[test]
    fn t1_squared_is_minus_identity_when_vanishing_at_one(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..34)) {
        let f = real_trig(&c);
        let f = f.sub(&CircleFunction::constant(f.at_one()[0]));
        let r = f.hilbert_t1().hilbert_t1().add(&f);
        prop_assert!(sup(&r) <= 1e-11);
    }

    #[test]
    fn t0_makes_boundary_values_holomorphic(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..34)) {
        let f = real_trig(&c);
        let h = f.add(&f.hilbert_t0().scale(C64::new(0.0, 1.0)));
        prop_assert!(h.negative_tail() <= 1e-14);
        prop_assert!(f.hilbert_t0().reality_defect() <= 1e-14);
    }

    #[test]
    fn t1_vanishes_at_one(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..34)) {
        let f = real_trig(&c);
        prop_assert!(f.hilbert_t1().at_one()[0].norm() <= 1e-13);
    }

    #[test]
    fn fit_recovers_coefficients(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..34)) {
        let f = real_trig(&c);
        let g = CircleFunction::fit_samples(Shape::Scalar, &f.samples(Grid::for_degree(f.degree())), f.degree());
        prop_assert!(g.function.sub(&f).l2_norm() <= 1e-14);
    }
}

#[test]
fn winding_is_multiplicative() {
    let mut rng = TrigRng::seeded(11);
    for s in -3..=3i64 {
        for t in -2..=2i64 {
            let f = rng.nonvanishing_with_winding(s, 0.2);
            let g = rng.nonvanishing_with_winding(t, 0.2);
            assert_eq!(winding_number(&f.mul(&g)).unwrap(), s + t);
            assert_eq!(winding_number(&f.conj()).unwrap(), -s);
        }
    }
}

#[test]
fn principal_value_against_quadrature() {
    // symmetric midpoint rule: the pairs theta, -theta cancel the pole exactly
    let mut rng = TrigRng::seeded(5);
    for _ in 0..10 {
        let f = rng.complex_trig(12, 1.0);
        let f = f.sub(&CircleFunction::constant(f.at_one()[0]));
        let m = 20000;
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..m {
            let theta = 2.0 * PI * (j as f64 + 0.5) / m as f64;
            let s = C64::from_polar(1.0, theta);
            sum += f.eval_scalar(theta) / (s - 1.0);
        }
        let integral = sum * (2.0 * PI / m as f64);
        let pv = cauchy_pv_at_one(&f).unwrap();
        assert!((pv + integral / PI).norm() < 1e-8, "{pv} vs {}", -integral / PI);
    }
}

#[test]
fn lemma3_and_lemma4_on_seeded_inputs() {
    let mut rng = TrigRng::seeded(2);
    for _ in 0..20 {
        let f = rng.real_trig_vanishing_at_one(16);
        let (a, b) = check_lemma3(&f).unwrap();
        assert!(a <= 1e-9 && b <= 1e-9);
        let f = rng.real_trig_mean_free(16);
        let g = rng.real_trig_vanishing_at_one(16);
        let (a, b) = check_lemma4(&f, &g).unwrap();
        assert!(a <= 1e-9 && b <= 1e-9);
    }
}

#[test]
fn circle_function_json_round_trip() {
    let f = TrigRng::seeded(9).complex_trig(4, 1.0);
    let s = serde_json::to_string(&f).unwrap();
    let g: CircleFunction = serde_json::from_str(&s).unwrap();
    assert_eq!(f, g);
}
