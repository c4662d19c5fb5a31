//! The analytic prediction report for a field spec: second spectral
//! moment, typical spacing in both conventions, elementary-cell volume,
//! the dimensionless constants in both modes, and absolute expected
//! zero-set measures for a region, as canonical JSON.
//!
//! ```bash
//! cargo run --release --example predictions
//! ```

use nodal::geometry::{Geometry, Region};
use nodal::harness::canonical_json;
use nodal::rice::predict;
use nodal::sampler::FieldSpec;
use nodal::spectra::{SpectralMeasure, SpectralPoint};

fn main() -> nodal::Result<()> {
    let spec = FieldSpec::new(
        Geometry::Hyperbolic2,
        SpectralMeasure::mono(SpectralPoint::hyperbolic(6.0)?),
        2,
    )?
    .with_r_max(2.0);
    let report = predict(&spec, Some(&Region::DiskBall { radius: 2.0 }))?;
    println!("{}", canonical_json(&report)?);

    let sphere = FieldSpec::new(
        Geometry::Sphere2,
        SpectralMeasure::mono(SpectralPoint::sphere_degree(10)),
        2,
    )?;
    let report = predict(&sphere, Some(&Region::full_sphere()))?;
    println!(
        "full-sphere expected count at degree 10 (chi mode): {:.3}",
        report.predicted_measure.as_ref().unwrap()["chi_wavelength"]
    );
    Ok(())
}
