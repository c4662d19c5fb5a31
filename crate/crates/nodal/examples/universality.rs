//! The central experiment: the zero-density constant of a complex
//! monochromatic field, in units of the squared wavelength-convention
//! spacing, comes out the same (π) on the plane, the sphere and the
//! hyperbolic disk — the symmetry group drops out.
//!
//! ```bash
//! cargo run --release --example universality
//! ```

use nodal::harness::{run_universality, universality_cases, DensityConfig};

fn main() -> nodal::Result<()> {
    let reps = 60;
    let config = universality_cases(2, reps, 7)?;
    println!("zero counts of complex monochromatic fields, {reps} replications per geometry\n");
    let report = run_universality(&config, None)?;
    println!("geometry      constant    95% CI             target");
    for case in &report.cases {
        let cfg: DensityConfig = serde_json::from_value(case.config.clone()).unwrap();
        println!(
            "{:<12} {:.4}     [{:.4}, {:.4}]   {:.4}",
            cfg.field.geometry.name(),
            case.summary.mean,
            case.summary.ci95[0],
            case.summary.ci95[1],
            case.predictions["constant_chi"],
        );
    }
    println!(
        "\nconfidence intervals mutually overlap: {}",
        if report.intervals_overlap { "yes" } else { "NO" }
    );
    println!("suite verdict: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
