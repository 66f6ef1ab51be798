//! One function per subcommand; each returns its result and assertions.

use disc_defect::bishop::{
    check_prop4, g_matrices, linear_w, size_proxy, solve_bishop, AnalyticDisc, BishopOptions, BishopSolution,
};
use disc_defect::circle::{check_lemma3, check_lemma4, CircleFunction, Grid};
use disc_defect::defect::{
    defect_bound_hypersurface, defect_conormal, fredholm_kernel_estimate, prop1_disc, prop1_example, tumanov_vphi,
    vf_dimension, vf_options, DefectOptions, KernelReport, FREDHOLM_LADDER,
};
use disc_defect::evaluation::{
    counterexample_instance, prop5_certificate, theorem2_check, v_of_zeta_extension, ExtensionOptions, DEFAULT_NP,
};
use disc_defect::manifold::{parse_manifold, registry, GraphManifold, ImplicitManifold, Manifold};
use disc_defect::random::TrigRng;
use disc_defect::{Error, Result, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One CSV line: an experiment at one truncation, or a scalar value.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Row {
    pub experiment: String,
    pub truncation: Option<usize>,
    pub dimension: Option<usize>,
    pub gap_ratio: Option<f64>,
    pub value: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub assertions: Vec<Assertion>,
    pub rows: Vec<Row>,
    pub spectra: Vec<Spectrum>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        Outcome {
            result,
            ..Outcome::default()
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn first_failure(&self) -> Option<String> {
        self.assertions.iter().find(|a| !a.passed).map(|a| a.name.clone())
    }

    fn value_row(&mut self, experiment: &str, value: f64, passed: bool) {
        self.rows.push(Row {
            experiment: experiment.into(),
            value: Some(value),
            passed,
            ..Row::default()
        });
    }

    fn kernel_rows(&mut self, experiment: &str, report: &KernelReport) {
        let passed = !report.ambiguous && report.stabilized();
        for (&(n, dim), &(_, gap)) in report.stabilization.iter().zip(&report.rung_gaps) {
            self.rows.push(Row {
                experiment: experiment.into(),
                truncation: Some(n),
                dimension: Some(dim),
                gap_ratio: gap,
                value: None,
                passed,
            });
        }
        self.spectra.push(Spectrum {
            name: experiment.into(),
            values: report.singular_values.clone(),
        });
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn bishop_options(cfg: &ExperimentConfig) -> BishopOptions {
    BishopOptions {
        tol: cfg.tol,
        degree: cfg.degree,
        grid: (8 * cfg.degree).next_power_of_two(),
        ..BishopOptions::default()
    }
}

/// The test disc of a manifold: `(zeta, 0)` for the implicit examples, the
/// Bishop lift of `eps (sigma - 1)` for graphs.
pub struct Setup {
    pub name: String,
    pub implicit: ImplicitManifold,
    pub disc: AnalyticDisc,
    pub graph: Option<(GraphManifold, BishopSolution)>,
}

pub fn default_eps(g: &GraphManifold, cfg: &ExperimentConfig) -> f64 {
    cfg.eps.unwrap_or(if g.name.starts_with("counterexample") {
        1.0 / cfg.nu as f64
    } else {
        0.1
    })
}

pub fn setup(cfg: &ExperimentConfig, default: &str) -> Result<Setup> {
    let spec = cfg.manifold.clone().unwrap_or_else(|| default.to_string());
    match parse_manifold(&spec)? {
        Manifold::Implicit(m) => Ok(Setup {
            name: m.name.clone(),
            implicit: m,
            disc: prop1_disc(),
            graph: None,
        }),
        Manifold::Graph(g) => {
            let sol = solve_bishop(&g, &linear_w(g.s(), default_eps(&g, cfg)), &bishop_options(cfg))?;
            Ok(Setup {
                name: g.name.clone(),
                implicit: disc_defect::manifold::graph_to_implicit(&g),
                disc: sol.disc.clone(),
                graph: Some((g, sol)),
            })
        }
    }
}

fn require_graph(s: &Setup) -> Result<&(GraphManifold, BishopSolution)> {
    s.graph
        .as_ref()
        .ok_or_else(|| Error::PreconditionViolated(format!("`{}` is not a graph manifold", s.name)))
}

/// `T0^2 f + f - mean f` and `T1^2 f + f` over 100 seeded real polynomials.
pub fn transform_residuals(seed: u64) -> (f64, f64) {
    let mut rng = TrigRng::seeded(seed);
    let (mut r0, mut r1) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let degree = 1 + i % 16;
        let grid = Grid::for_degree(degree);
        let f = rng.real_trig(degree);
        let mean = CircleFunction::constant(f.mean()[0]);
        r0 = r0.max(f.hilbert_t0().hilbert_t0().add(&f).sub(&mean).sup_norm(grid));
        let f1 = f.sub(&CircleFunction::constant(f.at_one()[0]));
        r1 = r1.max(f1.hilbert_t1().hilbert_t1().add(&f1).sup_norm(grid));
    }
    (r0, r1)
}

pub fn transforms_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (r0, r1) = transform_residuals(cfg.seed);
    let mut o = Outcome::new(json!({ "samples": 100, "max_degree": 16, "t0_residual": r0, "t1_residual": r1 }));
    o.check("T0^2 f + f - mean f <= 1e-11", r0 <= 1e-11, format!("{r0:e}"));
    o.check("T1^2 f + f <= 1e-11 when f(1) = 0", r1 <= 1e-11, format!("{r1:e}"));
    o.value_row("t0_residual", r0, r0 <= 1e-11);
    o.value_row("t1_residual", r1, r1 <= 1e-11);
    Ok(o)
}

/// Largest Lemma 3 and Lemma 4 residuals over 100 seeded inputs each.
pub fn lemma_residuals(seed: u64) -> Result<(f64, f64)> {
    let mut rng = TrigRng::seeded(seed);
    let (mut l3, mut l4) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (a, b) = check_lemma3(&rng.real_trig_vanishing_at_one(16))?;
        l3 = l3.max(a).max(b);
    }
    for _ in 0..100 {
        let f = rng.real_trig_mean_free(16);
        let g = rng.real_trig_vanishing_at_one(16);
        let (a, b) = check_lemma4(&f, &g)?;
        l4 = l4.max(a).max(b);
    }
    Ok((l3, l4))
}

/// Largest Prop 4 residual over 20 seeded `X` with `X(1) = 0`.
pub fn prop4_residual(g: &GraphManifold, sol: &BishopSolution, seed: u64) -> Result<f64> {
    let gm = g_matrices(g, sol)?;
    let mut rng = TrigRng::seeded(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = check_prop4(&gm, &rng.complex_vector_vanishing_at_one(g.m, 8))?;
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}

pub fn identities(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (l3, l4) = lemma_residuals(cfg.seed)?;
    let s = setup(cfg, "mixed:eps=0.05,n=2")?;
    let (g, sol) = require_graph(&s)?;
    let p4 = prop4_residual(g, sol, cfg.seed)?;
    let mut o = Outcome::new(json!({
        "lemma3_residual": l3,
        "lemma4_residual": l4,
        "prop4_manifold": s.name,
        "prop4_residual": p4,
    }));
    o.check("lemma 3 residual <= 1e-9", l3 <= 1e-9, format!("{l3:e}"));
    o.check("lemma 4 residual <= 1e-9", l4 <= 1e-9, format!("{l4:e}"));
    o.check("prop 4 residual <= 1e-8", p4 <= 1e-8, format!("{p4:e}"));
    o.value_row("lemma3", l3, l3 <= 1e-9);
    o.value_row("lemma4", l4, l4 <= 1e-9);
    o.value_row("prop4", p4, p4 <= 1e-8);
    Ok(o)
}

pub fn bishop_solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = setup(cfg, "quadric:n=2")?;
    let (g, sol) = require_graph(&s)?;
    let gm = g_matrices(g, sol)?;
    let size = size_proxy(&sol.disc);
    let mut o = Outcome::new(json!({
        "manifold": s.name,
        "size_proxy": size,
        "size_proxy_bound": g.max_disc_size,
        "solution": to_value(sol),
        "g_matrices": to_value(&gm),
    }));
    let attach = sol.attachment_residual;
    o.check("attachment residual <= 1e-8", attach <= 1e-8, format!("{attach:e}"));
    o.check("G0 G^-1 constant to 1e-9", gm.constancy_residual <= 1e-9, format!("{:e}", gm.constancy_residual));
    o.check("lemma 2 residual <= 1e-9", gm.lemma2_residual <= 1e-9, format!("{:e}", gm.lemma2_residual));
    for (i, u) in sol.update_history.iter().enumerate() {
        o.rows.push(Row {
            experiment: "bishop_update".into(),
            truncation: Some(i + 1),
            value: Some(*u),
            passed: true,
            ..Row::default()
        });
    }
    Ok(o)
}

pub fn defect(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = setup(cfg, "quadric:n=2")?;
    let r = defect_conormal(&s.implicit, &s.disc, &DefectOptions::default())?;
    let mut o = Outcome::new(json!({
        "manifold": s.name,
        "dimension": r.dimension,
        "size_proxy": size_proxy(&s.disc),
        "report": to_value(&r),
    }));
    o.check("kernel dimension stabilized", r.stabilized(), format!("{:?}", r.stabilization));
    o.kernel_rows(&s.name, &r);
    Ok(o)
}

pub fn vphi(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = setup(cfg, "mixed:eps=0.05,n=2")?;
    let (g, sol) = require_graph(&s)?;
    let gm = g_matrices(g, sol)?;
    let d = defect_conormal(&s.implicit, &s.disc, &DefectOptions::default())?;
    let v = tumanov_vphi(g, sol, &gm)?;
    let size = size_proxy(&s.disc);
    let mut o = Outcome::new(json!({
        "manifold": s.name,
        "defect": d.dimension,
        "vphi_dimension": v.dimension,
        "size_proxy": size,
        "size_proxy_limit": 0.3,
        "defect_report": to_value(&d),
        "vphi_report": to_value(&v),
    }));
    o.check("disc is small (size proxy <= 0.3)", size <= 0.3, format!("{size:e}"));
    o.check(
        "defect = dim V_phi",
        d.dimension == v.dimension,
        format!("{} vs {}", d.dimension, v.dimension),
    );
    o.kernel_rows(&format!("{}/conormal", s.name), &d);
    o.kernel_rows(&format!("{}/vphi", s.name), &v);
    Ok(o)
}

/// `V_f` dimension for `sigma^s` and 20 seeded nonvanishing perturbations.
pub fn vf_family(s: i64, seed: u64) -> Result<(usize, Vec<usize>, usize)> {
    let expected = (2 * s + 1).max(0) as usize;
    let mono = CircleFunction::monomial(s as isize, C64::new(1.0, 0.0));
    let dim = vf_dimension(&mono, &vf_options())?.report.dimension;
    let mut rng = TrigRng::seeded(seed.wrapping_add(s.unsigned_abs() * 2 + (s < 0) as u64));
    let random = (0..20)
        .map(|_| vf_dimension(&rng.nonvanishing_with_winding(s, 0.3), &vf_options()).map(|r| r.report.dimension))
        .collect::<Result<Vec<_>>>()?;
    Ok((dim, random, expected))
}

pub fn vf_dim(cfg: &ExperimentConfig, winding: i64) -> Result<Outcome> {
    let (dim, random, expected) = vf_family(winding, cfg.seed)?;
    let failures = random.iter().filter(|&&d| d != expected).count();
    let mut o = Outcome::new(json!({
        "winding": winding,
        "dimension": dim,
        "expected": expected,
        "random_dimensions": random,
    }));
    o.check("dim V_f = sup(0, 2s+1) for sigma^s", dim == expected, format!("{dim} vs {expected}"));
    o.check("dim V_f = sup(0, 2s+1) on 20 seeded f", failures == 0, format!("{failures} failures"));
    o.rows.push(Row {
        experiment: format!("vf_s={winding}"),
        dimension: Some(dim),
        passed: dim == expected,
        ..Row::default()
    });
    Ok(o)
}

fn bound_direction(s: &Setup) -> usize {
    if s.graph.is_some() {
        0
    } else {
        1
    }
}

pub fn bound(cfg: &ExperimentConfig) -> Result<Outcome> {
    let default = format!("prop1:k={}", cfg.k);
    let s = setup(cfg, &default)?;
    let d = defect_conormal(&s.implicit, &s.disc, &DefectOptions::default())?;
    let b = defect_bound_hypersurface(&s.implicit, &s.disc, bound_direction(&s))?;
    let mut o = Outcome::new(json!({
        "manifold": s.name,
        "defect": d.dimension,
        "bound": to_value(&b),
    }));
    o.check("defect <= sup(0, 2s+1)", d.dimension <= b.bound, format!("{} <= {}", d.dimension, b.bound));
    if s.graph.is_none() {
        o.check("equality on the prop1 family", d.dimension == b.bound, format!("{} = {}", d.dimension, b.bound));
    }
    o.kernel_rows(&s.name, &d);
    Ok(o)
}

pub fn fredholm(cfg: &ExperimentConfig) -> Result<Outcome> {
    let default = format!("prop1:k={}", cfg.k);
    let s = setup(cfg, &default)?;
    let split: Vec<usize> = if s.graph.is_some() {
        (0..s.implicit.m).collect()
    } else {
        vec![1]
    };
    let r = fredholm_kernel_estimate(&s.implicit, &s.disc, &split, &FREDHOLM_LADDER)?;
    let mut o = Outcome::new(json!({ "manifold": s.name, "dimension": r.report.dimension, "report": to_value(&r) }));
    o.check(
        "Fredholm kernel >= defect",
        r.report.dimension >= r.defect_dimension,
        format!("{} >= {}", r.report.dimension, r.defect_dimension),
    );
    o.check(
        "defect family certified in the kernel (<= 1e-7)",
        r.family_certificate <= 1e-7,
        format!("{:e}", r.family_certificate),
    );
    o.kernel_rows(&s.name, &r.report);
    Ok(o)
}

pub fn theorem2(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = setup(cfg, "flat:n=2")?;
    let (g, sol) = require_graph(&s)?;
    let r = theorem2_check(g, sol, DEFAULT_NP)?;
    let mut o = Outcome::new(json!({ "manifold": s.name, "report": to_value(&r) }));
    o.check(
        "complex codim = defect",
        r.codim_matches,
        format!("{} vs {}", r.image.complex_codim, r.defect.dimension),
    );
    o.check("dims stable under doubling N_p", r.stable, format!("{} / {}", r.image.real_dim, r.image_doubled.real_dim));
    if g.m == 1 {
        o.check("image is a complex subspace", r.image.is_complex_subspace, format!("real dim {}", r.image.real_dim));
        if r.defect.dimension == 1 {
            let ext = v_of_zeta_extension(g, sol, &[C64::new(0.25, 0.0)], &ExtensionOptions::default())?;
            let p5 = prop5_certificate(g, sol, DEFAULT_NP)?;
            o.check(
                "V(zeta) extends holomorphically",
                ext.passed,
                format!("cr {:e}, boundary {:e}", ext.cr_residual, ext.boundary_residual),
            );
            o.check("prop 5 certificate <= 1e-7", p5.certificate <= 1e-7, format!("{:e}", p5.certificate));
            o.result["extension"] = to_value(&ext);
            o.result["prop5"] = to_value(&p5);
        }
    }
    o.rows.push(Row {
        experiment: format!("{}/codim", s.name),
        truncation: Some(DEFAULT_NP),
        dimension: Some(r.image.complex_codim),
        gap_ratio: r.image.complex_gap,
        passed: r.codim_matches,
        ..Row::default()
    });
    o.kernel_rows(&format!("{}/defect", s.name), &r.defect);
    o.spectra.push(Spectrum {
        name: format!("{}/image", s.name),
        values: r.image.real_singular_values.clone(),
    });
    Ok(o)
}

pub fn prop1(cfg: &ExperimentConfig) -> Result<Outcome> {
    let plain = prop1_example(cfg.k, false)?;
    let perturbed = prop1_example(cfg.k, true)?;
    let mut o = Outcome::new(json!({
        "k": cfg.k,
        "dimension": plain.defect.dimension,
        "expected": plain.expected,
        "plain": to_value(&plain),
        "perturbed": to_value(&perturbed),
    }));
    for r in [&plain, &perturbed] {
        let label = if r.perturbed { "perturbed" } else { "plain" };
        o.check(
            &format!("{label}: defect = 2k+1 with gap >= 1e6"),
            r.passed,
            format!("dim {} gap {:?}", r.defect.dimension, r.min_gap_resolved),
        );
        o.kernel_rows(&format!("prop1_{label}(k={})", cfg.k), &r.defect);
    }
    Ok(o)
}

pub fn counterexample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let r = counterexample_instance(cfg.nu)?;
    let real = r.image.real_dim;
    let mut o = Outcome::new(json!({
        "nu": cfg.nu,
        "defect": r.defect.dimension,
        "real_dim": real,
        "complex_span_dim": r.image.complex_span_dim,
        "report": to_value(&r),
    }));
    o.check("construction checks pass", r.checks.iter().all(|c| c.passed), format!("{} checks", r.checks.len()));
    o.check("defect = 0", r.defect.dimension == 0, format!("{}", r.defect.dimension));
    o.check("omega annihilates the image (<= 1e-8)", r.omega_max <= 1e-8, format!("{:e}", r.omega_max));
    o.check("real_dim <= 4", real <= 4, format!("{real}"));
    o.check("real_dim < 6", real < 6, format!("{real}"));
    o.kernel_rows(&format!("counterexample(nu={})", cfg.nu), &r.defect);
    o.spectra.push(Spectrum {
        name: format!("counterexample(nu={})/image", cfg.nu),
        values: r.image.real_singular_values.clone(),
    });
    Ok(o)
}

/// Graph examples of the registry with their test disc sizes.
pub fn graph_registry() -> Result<Vec<(GraphManifold, f64)>> {
    Ok(vec![
        (registry::flat(2)?, 0.1),
        (registry::quadric(2)?, 0.1),
        (registry::mixed(0.05, 2)?, 0.1),
        (registry::tilted(0.1)?, 0.1),
        (registry::pluriharmonic(0.5)?, 0.1),
        (registry::counterexample(2)?, 0.5),
        (registry::counterexample(3)?, 1.0 / 3.0),
    ])
}
