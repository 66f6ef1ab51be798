use disc_defect::bishop::{check_prop4, g_matrices, linear_w, size_proxy, solve_bishop, BishopOptions, BishopSolution};
use disc_defect::defect::{
    defect_bound_hypersurface, defect_conormal, fredholm_kernel_estimate, prop1_disc, prop1_example, tumanov_vphi,
    vf_dimension, vf_options, DefectOptions, FREDHOLM_LADDER,
};
use disc_defect::evaluation::{
    counterexample_instance, prop5_certificate, theorem2_check, v_of_zeta_extension, ExtensionOptions, DEFAULT_NP,
};
use disc_defect::manifold::{graph_to_implicit, parse_manifold, registry, GraphManifold};
use disc_defect::random::TrigRng;
use disc_defect::{CircleFunction, Error, C64};

fn lift(g: &GraphManifold, eps: f64) -> BishopSolution {
    solve_bishop(g, &linear_w(g.s(), eps), &BishopOptions::default()).unwrap()
}

fn small_graphs() -> Vec<(GraphManifold, f64)> {
    vec![
        (registry::flat(2).unwrap(), 0.1),
        (registry::quadric(2).unwrap(), 0.1),
        (registry::mixed(0.05, 2).unwrap(), 0.1),
        (registry::tilted(0.1).unwrap(), 0.1),
        (registry::pluriharmonic(0.5).unwrap(), 0.1),
        (registry::counterexample(2).unwrap(), 0.5),
    ]
}

#[test]
fn lemma2_on_graph_registry() {
    for (g, eps) in small_graphs() {
        let sol = lift(&g, eps);
        let gm = g_matrices(&g, &sol).unwrap();
        assert!(gm.constancy_residual <= 1e-9, "{}", g.name);
        assert!(gm.lemma2_residual <= 1e-9, "{}", g.name);
    }
}

#[test]
fn prop4_on_mixed() {
    let g = registry::mixed(0.05, 2).unwrap();
    let gm = g_matrices(&g, &lift(&g, 0.1)).unwrap();
    let mut rng = TrigRng::seeded(4);
    for _ in 0..5 {
        let x = rng.complex_vector_vanishing_at_one(1, 8);
        let (a, b) = check_prop4(&gm, &x).unwrap();
        assert!(a <= 1e-8 && b <= 1e-8);
    }
}

#[test]
fn conormal_defect_matches_tumanov() {
    for (g, eps) in small_graphs().into_iter().take(3) {
        let sol = lift(&g, eps);
        assert!(size_proxy(&sol.disc) <= 0.3);
        let gm = g_matrices(&g, &sol).unwrap();
        let d = defect_conormal(&graph_to_implicit(&g), &sol.disc, &DefectOptions::default()).unwrap();
        let v = tumanov_vphi(&g, &sol, &gm).unwrap();
        assert_eq!(d.dimension, v.dimension, "{}", g.name);
    }
}

#[test]
fn prop1_family() {
    for k in 0..=2 {
        let r = prop1_example(k, false).unwrap();
        assert!(r.passed);
        assert_eq!(r.defect.dimension, 2 * k as usize + 1);
        assert_eq!(r.bound.winding, k as i64);
    }
}

#[test]
fn vf_on_monomials_and_random() {
    let mut rng = TrigRng::seeded(0);
    for s in -2..=2i64 {
        let expected = (2 * s + 1).max(0) as usize;
        let mono = CircleFunction::monomial(s as isize, C64::new(1.0, 0.0));
        assert_eq!(vf_dimension(&mono, &vf_options()).unwrap().report.dimension, expected);
        let f = rng.nonvanishing_with_winding(s, 0.3);
        assert_eq!(vf_dimension(&f, &vf_options()).unwrap().report.dimension, expected);
    }
}

#[test]
fn bound_holds_on_small_discs() {
    for (g, eps) in small_graphs().into_iter().take(2) {
        let sol = lift(&g, eps);
        let mf = graph_to_implicit(&g);
        let d = defect_conormal(&mf, &sol.disc, &DefectOptions::default()).unwrap();
        let b = defect_bound_hypersurface(&mf, &sol.disc, 0).unwrap();
        assert!(d.dimension <= b.bound);
    }
}

#[test]
fn fredholm_contains_defect() {
    let mf = registry::prop1(1);
    let r = fredholm_kernel_estimate(&mf, &prop1_disc(), &[1], &FREDHOLM_LADDER).unwrap();
    assert!(r.report.dimension >= r.defect_dimension);
    assert_eq!(r.family_dimension, 3);
    assert!(r.family_certificate <= 1e-7);
}

#[test]
fn defect_is_mobius_invariant() {
    let mf = registry::prop1(1);
    let opts = DefectOptions::with_ladder(&[8, 16, 32, 64]);
    let mut rng = TrigRng::seeded(1);
    for _ in 0..3 {
        let (disc, residual) = prop1_disc().pullback(rng.point_in_disc(0.5), 64).unwrap();
        assert!(residual < 1e-12);
        assert_eq!(defect_conormal(&mf, &disc, &opts).unwrap().dimension, 3);
    }
}

#[test]
fn theorem2_on_flat() {
    let g = registry::flat(2).unwrap();
    let r = theorem2_check(&g, &lift(&g, 0.1), DEFAULT_NP).unwrap();
    assert!(r.codim_matches && r.stable);
    assert!(r.image.is_complex_subspace);
}

#[test]
fn extension_and_prop5_on_pluriharmonic() {
    let g = registry::pluriharmonic(0.5).unwrap();
    let sol = lift(&g, 0.3);
    let r = v_of_zeta_extension(&g, &sol, &[C64::new(0.1, 0.2)], &ExtensionOptions::default()).unwrap();
    assert!(r.passed, "cr {} boundary {}", r.cr_residual, r.boundary_residual);
    let p = prop5_certificate(&g, &sol, DEFAULT_NP).unwrap();
    assert!(p.certificate <= 1e-7);
}

#[test]
fn counterexample_construction() {
    let r = counterexample_instance(2).unwrap();
    assert!(r.checks.iter().all(|c| c.passed));
    assert_eq!(r.defect.dimension, 0);
    assert!(r.omega_max <= 1e-8);
    assert!(r.v_is_proper());
    assert!(!r.h_table.is_empty());
}

#[test]
fn manifold_spec_errors() {
    assert!(matches!(parse_manifold("nonsense"), Err(Error::InvalidSpec(_))));
    assert!(parse_manifold("quadric:n=2").is_ok());
}
