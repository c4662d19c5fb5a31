//! Empirical covariance of sampled fields against the analytic spherical
//! functions, on all three curvature signs.
//!
//! ```bash
//! cargo run --release --example covariance_check
//! ```

use nodal::geometry::{geodesic_point, GeodesicSegment, Geometry, Point};
use nodal::sampler::{empirical_covariance, FieldSpec, SeedSpec};
use nodal::spectra::{mixture_covariance, SpectralMeasure, SpectralPoint};

fn probe_pairs(g: Geometry, d_max: f64, n: usize) -> nodal::Result<Vec<(Point, Point)>> {
    let base = match g {
        Geometry::Plane2 => Point::X2(0.0, 0.0),
        Geometry::Sphere2 => Point::sphere(0.0, 0.0),
        Geometry::Hyperbolic2 => Point::Disk { x: 0.0, y: 0.0 },
        _ => unreachable!(),
    };
    let dir = vec![1.0, 0.0];
    let seg = GeodesicSegment::new(g, base, dir, d_max)?;
    (1..=n)
        .map(|k| {
            let t = d_max * k as f64 / n as f64;
            Ok((base, geodesic_point(g, &seg, t)?))
        })
        .collect()
}

fn main() -> nodal::Result<()> {
    let _ = SeedSpec::new(0, 0);
    let cases: Vec<(FieldSpec, f64)> = vec![
        (
            FieldSpec::new(
                Geometry::Plane2,
                SpectralMeasure::mono(SpectralPoint::flat(
                    Geometry::Plane2,
                    2.0 * std::f64::consts::PI,
                )?),
                1,
            )?,
            1.5,
        ),
        (
            FieldSpec::new(
                Geometry::Sphere2,
                SpectralMeasure::mono(SpectralPoint::sphere_degree(20)),
                1,
            )?,
            1.2,
        ),
        (
            FieldSpec::new(
                Geometry::Hyperbolic2,
                SpectralMeasure::mono(SpectralPoint::hyperbolic(8.0)?),
                1,
            )?
            .with_r_max(2.0),
            2.0,
        ),
    ];

    for (spec, d_max) in cases {
        let pairs = probe_pairs(spec.geometry, d_max, 8)?;
        let probes = empirical_covariance(&spec, 2024, 0..800, &pairs)?;
        println!("\n{} (800 replications):", spec.geometry.name());
        println!("   d      empirical      analytic    pull");
        for p in &probes {
            let exact = mixture_covariance(&spec.spectrum, p.distance)?;
            let pull = (p.mean - exact) / p.std_error;
            println!(
                "{:.3}  {:+.4} ± {:.4}  {exact:+.4}  {pull:+.1}σ",
                p.distance, p.mean, p.std_error
            );
        }
    }
    Ok(())
}
