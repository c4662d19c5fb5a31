//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (visible with `--nocapture`; the per-test
//! result line doubles as the pass/fail record). Tolerances are pinned
//! here and follow the max(relative bound, 4·SE) policy so statistical
//! error never masquerades as discretization error.

use nodal::geometry::{
    geodesic_point, grid_region, GeodesicSegment, Geometry, Point, Region,
};
use nodal::harness::{
    run_density, run_matrix_oracle, run_spacing, run_universality, universality_cases,
    DensityConfig, MatrixOracleConfig, SpacingConfig,
};
use nodal::rice::{self, SpacingConvention};
use nodal::sampler::{empirical_covariance, sample, FieldSpec, SeedSpec};
use nodal::spectra::{covariance_matrix, mixture_covariance, SpectralMeasure, SpectralPoint};
use nodal::zeroset::{count_level_crossings, count_point_zeros_detailed, nodal_length};
use std::f64::consts::PI;

fn mono(geometry: Geometry, param: f64, dim_v: usize) -> FieldSpec {
    let sp = match geometry {
        Geometry::Sphere2 => SpectralPoint::sphere_degree(param as u32),
        Geometry::Hyperbolic2 => SpectralPoint::hyperbolic(param).unwrap(),
        _ => SpectralPoint::flat(geometry, param).unwrap(),
    };
    FieldSpec::new(geometry, SpectralMeasure::mono(sp), dim_v).unwrap()
}

/// Criterion 1: empirical covariance of 2000 replications matches the
/// analytic spherical function at 20 probe distances on all three
/// curvature signs, within max(0.02, 4·SE) per probe.
#[test]
fn criterion_1_covariance_fidelity() {
    let cases: Vec<(FieldSpec, f64)> = vec![
        (mono(Geometry::Plane2, 2.0 * PI, 1), 2.0),
        (mono(Geometry::Sphere2, 20.0, 1), 2.8),
        (mono(Geometry::Hyperbolic2, 8.0, 1).with_r_max(2.0), 2.0),
    ];
    for (spec, d_max) in cases {
        let g = spec.geometry;
        let base = Point::origin(g);
        let dir = vec![1.0, 0.0][..g.dim_x().min(2)].to_vec();
        let seg = GeodesicSegment::new(g, base, dir, d_max).unwrap();
        let pairs: Vec<(Point, Point)> = (1..=20)
            .map(|k| {
                let t = d_max * k as f64 / 20.0;
                (base, geodesic_point(g, &seg, t).unwrap())
            })
            .collect();
        let probes = empirical_covariance(&spec, 101, 0..2000, &pairs).unwrap();
        let mut worst = 0.0f64;
        for p in &probes {
            let exact = mixture_covariance(&spec.spectrum, p.distance).unwrap();
            let tol = (4.0 * p.std_error).max(0.02);
            let err = (p.mean - exact).abs();
            worst = worst.max(err);
            assert!(
                err <= tol,
                "{}: covariance at d = {:.3} off by {err:.4} > {tol:.4}",
                g.name(),
                p.distance
            );
        }
        println!(
            "criterion 1 [{}]: PASS — worst covariance error {worst:.4} over 20 probes",
            g.name()
        );
    }
}

/// Criterion 2: the measured zero density on the line matches √κ₂/π for a
/// monochromatic field (exact cosine-spacing oracle, strict 2%) and for
/// the equal mixture κ ∈ {1, 3} with κ₂ = 5 (linear spectral mixing).
/// R = 500 replications on segments 100 wavelengths long.
#[test]
fn criterion_2_line_rice_density() {
    let field = mono(Geometry::Line1, 1.0, 1).with_n_waves(8);
    let config = SpacingConfig::new(field, 100.0, 500, 271).unwrap();
    let report = run_spacing(&config, None).unwrap();
    let exact = 1.0 / PI; // cosine zeros are exactly π/κ apart
    assert!(report.pass);
    assert!(
        (report.summary.mean - exact).abs() / exact <= 0.02,
        "monochromatic density {} vs {exact}",
        report.summary.mean
    );
    println!(
        "criterion 2 [mono]: PASS — density {:.5} vs κ/π = {:.5}",
        report.summary.mean, exact
    );

    let mixture = FieldSpec::new(
        Geometry::Line1,
        SpectralMeasure::new(Geometry::Line1, vec![(1.0, 0.5), (3.0, 0.5)]).unwrap(),
        1,
    )
    .unwrap()
    .with_n_waves(8);
    assert_eq!(rice::second_moment(&mixture), 5.0);
    let config = SpacingConfig::new(mixture, 100.0, 500, 272).unwrap();
    let report = run_spacing(&config, None).unwrap();
    let target = 5.0f64.sqrt() / PI;
    let tol = (0.02 * target).max(4.0 * report.summary.std_error);
    assert!(
        (report.summary.mean - target).abs() <= tol,
        "mixture density {} vs √5/π = {target} (tol {tol})",
        report.summary.mean
    );
    assert!(report.pass);
    println!(
        "criterion 2 [mixture]: PASS — density {:.5} vs √5/π = {:.5} (κ₂ mixes linearly)",
        report.summary.mean, target
    );
}

/// Criterion 3: universality of the point-zero density for complex
/// monochromatic fields: count density × Λ² = π within 3% on the plane,
/// sphere and hyperbolic disk, with overlapping 95% CIs, plus the
/// closed-form full-sphere count ℓ(ℓ+1) = 110 at ℓ = 10.
#[test]
fn criterion_3_point_zero_universality() {
    let config = universality_cases(2, 120, 7).unwrap();
    let report = run_universality(&config, None).unwrap();
    assert!(report.intervals_overlap, "confidence intervals must overlap");
    for case in &report.cases {
        let cfg: DensityConfig = serde_json::from_value(case.config.clone()).unwrap();
        let rel = (case.summary.mean - PI).abs() / PI;
        assert!(
            rel <= 0.03,
            "{}: constant {} is {rel:.3} from π",
            cfg.field.geometry.name(),
            case.summary.mean
        );
        assert!(case.pass);
        if cfg.field.geometry == Geometry::Sphere2 {
            let raw = case.measured["raw_mean"];
            assert!(
                (raw - 110.0).abs() / 110.0 <= 0.03,
                "full-sphere count {raw} vs ℓ(ℓ+1) = 110"
            );
            println!("criterion 3 [sphere count]: PASS — mean count {raw:.2} vs 110");
        }
        println!(
            "criterion 3 [{}]: PASS — constant {:.4} vs π",
            cfg.field.geometry.name(),
            case.summary.mean
        );
    }
}

/// Criterion 4: nodal-length density of real fields: length density × Λ
/// equals the chi-derived π/√2 within 3% on all three geometries,
/// geometry-independent within CIs; the factorial value 2√(π/2) is
/// reported and measurably off.
#[test]
fn criterion_4_nodal_length_universality() {
    let config = universality_cases(1, 120, 19).unwrap();
    let report = run_universality(&config, None).unwrap();
    assert!(report.intervals_overlap);
    let chi_target = PI / 2.0f64.sqrt();
    for case in &report.cases {
        let cfg: DensityConfig = serde_json::from_value(case.config.clone()).unwrap();
        let rel = (case.summary.mean - chi_target).abs() / chi_target;
        assert!(
            rel <= 0.03,
            "{}: constant {} is {rel:.3} from π/√2",
            cfg.field.geometry.name(),
            case.summary.mean
        );
        assert!(case.pass);
        let paper = case.predictions["constant_paper"];
        assert!((paper - 2.0 * (PI / 2.0).sqrt()).abs() < 1e-12);
        let discrepancy = case.measured["discrepancy_vs_paper"];
        assert!(
            discrepancy.abs() > 0.08,
            "paper-constant discrepancy {discrepancy} should be measurable"
        );
        println!(
            "criterion 4 [{}]: PASS — constant {:.4} vs π/√2 = {:.4}; factorial value off by {:+.1}%",
            cfg.field.geometry.name(),
            case.summary.mean,
            chi_target,
            100.0 * discrepancy
        );
    }
}

/// Criterion 5: full-dimension counting in 3-space: the measured constant
/// matches the chi-derived 8π/3^{3/2} within 5% and clearly rejects the
/// factorial value 3!(π/2)^{3/2}.
#[test]
fn criterion_5_three_dimensional_counting() {
    let field = mono(Geometry::Space3, 2.0 * PI, 3);
    let mut config =
        DensityConfig::new(field, Region::centered_cube(2.5), 50, 42).unwrap();
    config.resolution = rice::spacing(&config.field, SpacingConvention::Wavelength).unwrap() / 8.0;
    config.tolerance_rel = 0.05;
    let report = run_density(&config, None).unwrap();
    let chi_target = 8.0 * PI / 3.0f64.powf(1.5);
    let paper = report.predictions["constant_paper"];
    assert!(report.pass);
    let rel = (report.summary.mean - chi_target).abs() / chi_target;
    assert!(rel <= 0.05, "constant {} is {rel:.3} from {chi_target}", report.summary.mean);
    assert!(
        (paper - report.summary.mean) / paper > 0.5,
        "measured {} should sit far below the factorial value {paper}",
        report.summary.mean
    );
    println!(
        "criterion 5: PASS — (3,3) constant {:.4} vs chi {:.4} (factorial value {:.4} rejected)",
        report.summary.mean, chi_target, paper
    );
}

/// Criterion 6: the matrix oracle: E[√det(MᵀM)] = 1.00 ± 1% for 2×2
/// standard Gaussian matrices with 10⁵ samples; the factorial value 2 is
/// refuted.
#[test]
fn criterion_6_matrix_oracle() {
    let config = MatrixOracleConfig {
        n: 2,
        k: 2,
        samples: 100_000,
        base_seed: 7,
        tolerance_rel: 0.01,
    };
    let report = run_matrix_oracle(&config, None).unwrap();
    assert!(report.pass);
    assert!((report.summary.mean - 1.0).abs() <= 0.01);
    assert!((report.summary.mean - 2.0).abs() >= 0.9);
    println!(
        "criterion 6: PASS — E[√det(MMᵀ)] = {:.4} ± {:.4} (≠ 2)",
        report.summary.mean, report.summary.std_error
    );
}

/// Criterion 7: scaling every component variance by 7.3 leaves each
/// zero-set estimate bit-identical at identical seeds.
#[test]
fn criterion_7_scale_invariance() {
    let base = mono(Geometry::Plane2, 2.0 * PI, 2);
    let scaled = base.clone().with_scales(vec![7.3, 7.3]);
    let seed = SeedSpec::new(9000, 4);
    let grid = grid_region(Geometry::Plane2, &Region::centered_square(4.0), 0.1).unwrap();
    let a = sample(&base, seed).unwrap();
    let b = sample(&scaled, seed).unwrap();

    let (ca, za) = count_point_zeros_detailed(&a, &grid).unwrap();
    let (cb, zb) = count_point_zeros_detailed(&b, &grid).unwrap();
    assert_eq!(ca.value.to_bits(), cb.value.to_bits());
    for (p, q) in za.iter().zip(&zb) {
        let (cp, n) = p.coords();
        let (cq, _) = q.coords();
        for d in 0..n {
            assert_eq!(cp[d].to_bits(), cq[d].to_bits());
        }
    }
    let la = nodal_length(&a, 0, &grid).unwrap();
    let lb = nodal_length(&b, 0, &grid).unwrap();
    assert_eq!(la.value.to_bits(), lb.value.to_bits());

    let seg =
        GeodesicSegment::new(Geometry::Plane2, Point::X2(-1.9, 0.3), vec![1.0, 0.0], 3.5)
            .unwrap();
    let na = count_level_crossings(&a, 1, &seg, 0.0, 0.03).unwrap();
    let nb = count_level_crossings(&b, 1, &seg, 0.0, 0.03).unwrap();
    assert_eq!(na.value.to_bits(), nb.value.to_bits());

    // sphere fields too, with unequal scales
    let sphere = mono(Geometry::Sphere2, 8.0, 1);
    let sphere_scaled = sphere.clone().with_scales(vec![7.3]);
    let sgrid = grid_region(Geometry::Sphere2, &Region::full_sphere(), 0.12).unwrap();
    let sa = sample(&sphere, SeedSpec::new(17, 2)).unwrap();
    let sb = sample(&sphere_scaled, SeedSpec::new(17, 2)).unwrap();
    let la = nodal_length(&sa, 0, &sgrid).unwrap();
    let lb = nodal_length(&sb, 0, &sgrid).unwrap();
    assert_eq!(la.value.to_bits(), lb.value.to_bits());

    println!("criterion 7: PASS — ×7.3 variance rescaling left every estimate bit-identical");
}

/// Criterion 8: rerunning `verify universality` with one and eight workers
/// produces byte-identical JSON reports.
#[test]
fn criterion_8_worker_determinism() {
    let bin = env!("CARGO_BIN_EXE_nodal");
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("w1");
    let out8 = tmp.path().join("w8");
    for (out, workers) in [(&out1, "1"), (&out8, "8")] {
        let status = std::process::Command::new(bin)
            .args([
                "verify",
                "universality",
                "--dimv",
                "2",
                "--reps",
                "8",
                "--seed",
                "3",
                "--workers",
                workers,
                "--out",
            ])
            .arg(out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.code().is_some());
    }
    let a = std::fs::read(out1.join("universality_report.json")).unwrap();
    let b = std::fs::read(out8.join("universality_report.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "reports differ between 1 and 8 workers");
    println!(
        "criterion 8: PASS — byte-identical reports ({} bytes) at worker counts 1 and 8",
        a.len()
    );
}

/// Criterion 9: the property suites — positive semidefiniteness of
/// covariance matrices, analytic gradients against finite differences at
/// 1e-6 relative, and quadratic decay of the eigenfunction residual.
#[test]
fn criterion_9_property_suites() {
    // (a) covariance matrices are positive semidefinite
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(321);
    let cases: Vec<(SpectralMeasure, Vec<Point>)> = vec![
        (
            SpectralMeasure::mono(SpectralPoint::sphere_degree(6)),
            (0..50)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    Point::sphere(z.acos(), rng.gen_range(0.0..2.0 * PI))
                })
                .collect(),
        ),
        (
            SpectralMeasure::new(Geometry::Plane2, vec![(1.0, 0.5), (3.0, 0.5)]).unwrap(),
            (0..50)
                .map(|_| Point::X2(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)))
                .collect(),
        ),
        (
            SpectralMeasure::mono(SpectralPoint::hyperbolic(5.0).unwrap()),
            (0..40)
                .map(|_| {
                    let s: f64 = rng.gen_range(0.0..0.75);
                    let a: f64 = rng.gen_range(0.0..2.0 * PI);
                    Point::Disk { x: s * a.cos(), y: s * a.sin() }
                })
                .collect(),
        ),
    ];
    for (measure, points) in &cases {
        let n = points.len();
        let m = covariance_matrix(measure, points).unwrap();
        let flat: Vec<f64> = m.iter().flatten().copied().collect();
        let mat = nalgebra::DMatrix::from_row_slice(n, n, &flat);
        let min = mat
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::MAX, f64::min);
        assert!(min >= -1e-8 * n as f64, "min eigenvalue {min}");
    }
    println!("criterion 9a: PASS — covariance matrices positive semidefinite");

    // (b) analytic gradients vs geodesic central differences
    let h = 1e-4;
    let grad_cases: Vec<(FieldSpec, Point)> = vec![
        (mono(Geometry::Line1, 1.7, 1), Point::X1(0.4)),
        (mono(Geometry::Plane2, 3.0, 2), Point::X2(0.3, -0.6)),
        (mono(Geometry::Space3, 2.0, 3), Point::X3(0.2, 0.1, -0.4)),
        (mono(Geometry::Sphere2, 12.0, 2), Point::sphere(1.2, 0.7)),
        (
            mono(Geometry::Hyperbolic2, 6.0, 2).with_r_max(2.0),
            Point::Disk { x: -0.2, y: 0.35 },
        ),
    ];
    for (spec, p) in grad_cases {
        let g = spec.geometry;
        let r = sample(&spec, SeedSpec::new(55, 0)).unwrap();
        let jac = r.eval_gradient(&p).unwrap();
        for comp in 0..spec.dim_v {
            for d in 0..g.dim_x() {
                let mut dir = vec![0.0; g.dim_x()];
                dir[d] = 1.0;
                let fwd = geodesic_point(
                    g,
                    &GeodesicSegment::new(g, p, dir.clone(), h).unwrap(),
                    h,
                )
                .unwrap();
                let bwd = geodesic_point(
                    g,
                    &GeodesicSegment::new(g, p, dir.iter().map(|v| -v).collect(), h).unwrap(),
                    h,
                )
                .unwrap();
                let fd = (r.eval(comp, &fwd).unwrap() - r.eval(comp, &bwd).unwrap()) / (2.0 * h);
                let an = jac.get(comp, d);
                assert!(
                    (an - fd).abs() / an.abs().max(1.0) <= 1e-6,
                    "{}: {an} vs {fd}",
                    g.name()
                );
            }
        }
    }
    println!("criterion 9b: PASS — gradients within 1e-6 of finite differences");

    // (c) eigenfunction residual decays quadratically in the stencil step
    let spectral = [
        SpectralPoint::flat(Geometry::Plane2, 2.0).unwrap(),
        SpectralPoint::flat(Geometry::Space3, 1.5).unwrap(),
        SpectralPoint::sphere_degree(6),
        SpectralPoint::hyperbolic(3.0).unwrap(),
    ];
    for sp in spectral {
        let k = nodal::spectra::eigenvalue(&sp);
        let r0 = 0.6;
        let f = |r: f64| nodal::spectra::covariance(&sp, r).unwrap();
        let residual = |h: f64| {
            let d2 = (f(r0 + h) - 2.0 * f(r0) + f(r0 - h)) / (h * h);
            let d1 = (f(r0 + h) - f(r0 - h)) / (2.0 * h);
            let dim = sp.geometry.dim_x() as f64;
            let radial = match sp.geometry {
                Geometry::Sphere2 => 1.0 / r0.tan(),
                Geometry::Hyperbolic2 => 1.0 / r0.tanh(),
                _ => (dim - 1.0) / r0,
            };
            (d2 + radial * d1 - k * f(r0)).abs()
        };
        let (e1, e2) = (residual(2e-3), residual(1e-3));
        assert!(
            e2 < e1 / 2.5 || e2 < 1e-7,
            "{:?}: residual {e1} -> {e2} not O(h²)",
            sp
        );
    }
    println!("criterion 9c: PASS — eigenfunction residuals decay at second order");
}
