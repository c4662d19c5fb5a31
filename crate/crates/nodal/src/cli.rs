//! Command-line surface: `field` (sample + dump), `spacing`, `zeros`,
//! `verify universality` and `oracle matrix`. Numeric output goes to files
//! in the output directory (canonical key-sorted JSON, RFC-4180 CSV,
//! binary PGM rasters, optional PNG); a human summary goes to standard
//! output. Every command is deterministic given `--seed`, and `--workers`
//! never changes results.
//!
//! Exit codes: 0 on success, 1 when a declared tolerance fails, 2 on
//! usage or configuration errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Region};
use crate::harness::{
    self, canonical_json, DensityConfig, MatrixOracleConfig, SpacingConfig, UniversalityConfig,
};
use crate::raster;
use crate::rice::{self, ConstantMode, SpacingConvention};
use crate::sampler::{sample, FieldSpec, SeedSpec};
use crate::spectra::SpectralMeasure;
use crate::zeroset;

#[derive(Parser, Debug)]
#[command(
    name = "nodal",
    version,
    about = "Invariant Gaussian fields on homogeneous spaces and their zero sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a field and write a CSV grid dump and a PGM/PNG raster
    Field(FieldArgs),
    /// Measure the typical zero spacing along a geodesic
    Spacing(SpacingArgs),
    /// Measure zero-set density (point counts or nodal length) in a region
    Zeros(ZerosArgs),
    /// Run verification suites; exit code 0 iff all tolerances pass
    Verify(VerifyArgs),
    /// Monte-Carlo oracles for the analytic constants
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// line | plane | space | sphere | hyperbolic
    #[arg(long)]
    geometry: String,
    /// mono:<param> or mixture:<file.json>
    #[arg(long)]
    spectrum: String,
    /// Number of independent real components
    #[arg(long, default_value_t = 1)]
    dimv: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Raster width in pixels
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Box side for plane domains (intrinsic units)
    #[arg(long)]
    r#box: Option<f64>,
    /// Validity radius for hyperbolic fields
    #[arg(long)]
    rmax: Option<f64>,
    /// Wave-superposition truncation
    #[arg(long)]
    nwaves: Option<usize>,
    /// Also write a PNG raster
    #[arg(long)]
    png: bool,
    #[arg(long, default_value = "nodal-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SpacingArgs {
    /// JSON experiment config; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    spectrum: Option<String>,
    /// Segment length in wavelength-convention spacings
    #[arg(long)]
    wavelengths: Option<f64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Crossing level in component standard deviations
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    nwaves: Option<usize>,
    /// Relative tolerance on the zero density
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "nodal-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    /// JSON experiment config; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    spectrum: Option<String>,
    /// 2 for point counting (complex field), 1 for nodal length
    #[arg(long)]
    dimv: Option<usize>,
    /// Box side for flat regions (intrinsic units); sphere runs use the
    /// full sphere, hyperbolic runs a centered ball of radius --rmax
    #[arg(long)]
    r#box: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    nwaves: Option<usize>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid node spacing (intrinsic units)
    #[arg(long)]
    resolution: Option<f64>,
    /// rice_def | wavelength
    #[arg(long)]
    convention: Option<String>,
    /// paper | chi: the pass/fail target
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Dump located zeros / nodal segments of replication 0 as CSV
    #[arg(long)]
    dump_zeros: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "nodal-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(subcommand)]
    suite: VerifySuite,
}

#[derive(Subcommand, Debug)]
enum VerifySuite {
    /// Cross-geometry universality of the zero-density constant
    Universality {
        #[arg(long, default_value_t = 2)]
        dimv: usize,
        #[arg(long, default_value_t = 200)]
        reps: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "nodal-out")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(subcommand)]
    oracle: OracleKind,
}

#[derive(Subcommand, Debug)]
enum OracleKind {
    /// E[√det(MᵀM)] of n×k standard Gaussian matrices
    Matrix {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "nodal-out")]
        out: PathBuf,
    },
}

/// Entry point used by the binary: parses `std::env::args`.
pub fn main() -> i32 {
    run_from(std::env::args())
}

/// Testable entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Field(args) => cmd_field(args),
        Command::Spacing(args) => cmd_spacing(args),
        Command::Zeros(args) => cmd_zeros(args),
        Command::Verify(args) => match args.suite {
            VerifySuite::Universality { dimv, reps, seed, workers, out } => {
                cmd_verify_universality(dimv, reps, seed, workers, &out)
            }
        },
        Command::Oracle(args) => match args.oracle {
            OracleKind::Matrix { n, k, samples, seed, workers, out } => {
                cmd_oracle_matrix(n, k, samples, seed, workers, &out)
            }
        },
    }
}

fn parse_geometry(s: &str) -> Result<Geometry> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "line" | "line1" => Geometry::Line1,
        "plane" | "plane2" => Geometry::Plane2,
        "space" | "space3" => Geometry::Space3,
        "sphere" | "sphere2" => Geometry::Sphere2,
        "hyperbolic" | "hyperbolic2" | "disk" => Geometry::Hyperbolic2,
        other => return Err(Error::config(format!("unknown geometry '{other}'"))),
    })
}

fn parse_spectrum(geometry: Geometry, s: &str) -> Result<SpectralMeasure> {
    if let Some(param) = s.strip_prefix("mono:") {
        let param: f64 = param
            .parse()
            .map_err(|_| Error::config(format!("bad spectral parameter '{param}'")))?;
        SpectralMeasure::new(geometry, vec![(param, 1.0)])
    } else if let Some(path) = s.strip_prefix("mixture:") {
        let text = fs::read_to_string(path)?;
        let measure: SpectralMeasure = serde_json::from_str(&text)?;
        if measure.geometry != geometry {
            return Err(Error::config("mixture file geometry differs from --geometry"));
        }
        measure.validate()?;
        Ok(measure)
    } else {
        Err(Error::config(
            "spectrum must be mono:<param> or mixture:<file.json>",
        ))
    }
}

fn parse_convention(s: &str) -> Result<SpacingConvention> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "rice_def" | "ricedef" | "rice" => SpacingConvention::RiceDef,
        "wavelength" => SpacingConvention::Wavelength,
        other => return Err(Error::config(format!("unknown convention '{other}'"))),
    })
}

fn parse_mode(s: &str) -> Result<ConstantMode> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "paper" => ConstantMode::Paper,
        "chi" => ConstantMode::Chi,
        other => return Err(Error::config(format!("unknown mode '{other}'"))),
    })
}

fn build_field_spec(
    geometry: &str,
    spectrum: &str,
    dim_v: usize,
    rmax: Option<f64>,
    nwaves: Option<usize>,
) -> Result<FieldSpec> {
    let g = parse_geometry(geometry)?;
    let measure = parse_spectrum(g, spectrum)?;
    let mut spec = FieldSpec::new(g, measure, dim_v)?;
    if let Some(r) = rmax {
        spec = spec.with_r_max(r);
    }
    if let Some(n) = nwaves {
        spec = spec.with_n_waves(n);
    }
    spec.validate()?;
    Ok(spec)
}

fn ensure_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_report(out: &Path, stem: &str, report: &harness::ExperimentReport) -> Result<()> {
    fs::write(out.join(format!("{stem}.json")), report.canonical_json()?)?;
    fs::write(out.join(format!("{stem}.csv")), report.csv())?;
    Ok(())
}

fn cmd_field(args: FieldArgs) -> Result<bool> {
    ensure_out(&args.out)?;
    let spec = build_field_spec(&args.geometry, &args.spectrum, args.dimv, args.rmax, args.nwaves)?;
    let realization = sample(&spec, SeedSpec::new(args.seed, 0))?;
    if spec.geometry == Geometry::Hyperbolic2 {
        println!(
            "covariance self-check passed at n_waves = {} (r_max = {})",
            spec.n_waves,
            spec.r_max.unwrap()
        );
    }

    let region = args.r#box.map(Region::centered_square);
    let meta = serde_json::json!({
        "spec": &spec,
        "seed": args.seed,
        "raster_width": args.grid,
        "box": args.r#box,
    });
    fs::write(args.out.join("field.meta.json"), canonical_json(&meta)?)?;

    let csv = raster::field_csv(&realization, 80, region.as_ref())?;
    fs::write(args.out.join("field.csv"), csv)?;

    let rasterizable = matches!(
        spec.geometry,
        Geometry::Plane2 | Geometry::Sphere2 | Geometry::Hyperbolic2
    );
    if rasterizable {
        let img = raster::raster_field(&realization, 0, args.grid, region.as_ref())?;
        let comment = format!(
            "nodal field geometry={} spectrum={} dimv={} seed={}",
            args.geometry, args.spectrum, args.dimv, args.seed
        );
        fs::write(args.out.join("field.pgm"), img.pgm_bytes(&comment))?;
        if args.png {
            img.write_png(&args.out.join("field.png"))?;
        }
        println!(
            "wrote field.csv, field.pgm{} and field.meta.json to {}",
            if args.png { ", field.png" } else { "" },
            args.out.display()
        );
    } else {
        println!(
            "wrote field.csv and field.meta.json to {} (no raster domain for {})",
            args.out.display(),
            spec.geometry.name()
        );
    }
    Ok(true)
}

fn cmd_spacing(args: SpacingArgs) -> Result<bool> {
    ensure_out(&args.out)?;
    let mut config: SpacingConfig = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => {
            let geometry = args
                .geometry
                .as_deref()
                .ok_or_else(|| Error::config("--geometry required without --config"))?;
            let spectrum = args
                .spectrum
                .as_deref()
                .ok_or_else(|| Error::config("--spectrum required without --config"))?;
            let field = build_field_spec(geometry, spectrum, 1, args.rmax, args.nwaves)?;
            SpacingConfig::new(
                field,
                args.wavelengths.unwrap_or(100.0),
                args.reps.unwrap_or(500),
                args.seed.unwrap_or(0),
            )?
        }
    };
    if args.config.is_some() {
        if let (Some(g), Some(s)) = (args.geometry.as_deref(), args.spectrum.as_deref()) {
            config.field = build_field_spec(g, s, 1, args.rmax, args.nwaves)?;
        }
        if let Some(w) = args.wavelengths {
            config.segment_length =
                w * rice::spacing(&config.field, SpacingConvention::Wavelength)?;
        }
        if let Some(r) = args.reps {
            config.replications = r;
        }
        if let Some(s) = args.seed {
            config.base_seed = s;
        }
    }
    if let Some(l) = args.level {
        config.level = l;
    }
    if let Some(t) = args.tol {
        config.tolerance_rel = t;
    }

    let report = harness::run_spacing(&config, args.workers)?;
    write_report(&args.out, "spacing_report", &report)?;
    println!(
        "zero density {:.6} ± {:.6}  (Rice prediction {:.6})",
        report.summary.mean, report.summary.std_error, report.predictions["density"]
    );
    if let Some(lambda) = report.measured.get("spacing") {
        println!(
            "measured spacing Λ = {:.6}  [rice_def {:.6}, wavelength {:.6}, prop41 {:.6}]",
            lambda,
            report.predictions["spacing_rice_def"],
            report.predictions["spacing_wavelength"],
            report.predictions["spacing_prop41"]
        );
    }
    println!(
        "{} in {:.1}s — report in {}",
        verdict(report.pass),
        report.wall_clock.as_secs_f64(),
        args.out.display()
    );
    Ok(report.pass)
}

fn cmd_zeros(args: ZerosArgs) -> Result<bool> {
    ensure_out(&args.out)?;
    let mut config: DensityConfig = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => {
            let geometry = args
                .geometry
                .as_deref()
                .ok_or_else(|| Error::config("--geometry required without --config"))?;
            let spectrum = args
                .spectrum
                .as_deref()
                .ok_or_else(|| Error::config("--spectrum required without --config"))?;
            let g = parse_geometry(geometry)?;
            let dim_v = args.dimv.unwrap_or_else(|| match g {
                Geometry::Space3 => 3,
                _ => 2,
            });
            let field = build_field_spec(geometry, spectrum, dim_v, args.rmax, args.nwaves)?;
            let lam = rice::spacing(&field, SpacingConvention::Wavelength)?;
            let region = match g {
                Geometry::Plane2 => Region::centered_square(args.r#box.unwrap_or(8.0 * lam)),
                Geometry::Space3 => Region::centered_cube(args.r#box.unwrap_or(3.0 * lam)),
                Geometry::Sphere2 => Region::full_sphere(),
                Geometry::Hyperbolic2 => Region::DiskBall {
                    radius: args.rmax.or(field.r_max).unwrap_or(2.0),
                },
                Geometry::Line1 => {
                    return Err(Error::config("use `nodal spacing` for 1-D zero counting"))
                }
            };
            DensityConfig::new(field, region, args.reps.unwrap_or(200), args.seed.unwrap_or(0))?
        }
    };
    if args.config.is_some() {
        if let Some(r) = args.reps {
            config.replications = r;
        }
        if let Some(s) = args.seed {
            config.base_seed = s;
        }
    }
    if let Some(r) = args.resolution {
        config.resolution = r;
    }
    if let Some(c) = &args.convention {
        config.convention = parse_convention(c)?;
    }
    if let Some(m) = &args.mode {
        config.target_mode = parse_mode(m)?;
    }
    if let Some(t) = args.tol {
        config.tolerance_rel = t;
    }

    let report = harness::run_density(&config, args.workers)?;
    write_report(&args.out, "zeros_report", &report)?;

    if args.dump_zeros {
        dump_zero_geometry(&config, &args.out)?;
    }

    println!(
        "dimensionless constant {:.5} ± {:.5}  [chi {:.5}, paper {:.5}]",
        report.summary.mean,
        report.summary.std_error,
        report.predictions["constant_chi"],
        report.predictions["constant_paper"]
    );
    println!(
        "{} in {:.1}s — report in {}",
        verdict(report.pass),
        report.wall_clock.as_secs_f64(),
        args.out.display()
    );
    Ok(report.pass)
}

/// CSV dumps of the located zeros (or nodal polyline segments) of
/// replication 0, for external plotting.
fn dump_zero_geometry(config: &DensityConfig, out: &Path) -> Result<()> {
    let grid = crate::geometry::grid_region(
        config.field.geometry,
        &config.region,
        config.resolution,
    )?;
    let realization = sample(&config.field, SeedSpec::new(config.base_seed, 0))?;
    if config.field.dim_v == config.field.geometry.dim_x() {
        let (_, zeros) = zeroset::count_point_zeros_detailed(&realization, &grid)?;
        let mut csv = String::from("c0,c1,c2\r\n");
        for z in zeros {
            let (c, dim) = z.coords();
            let row: Vec<String> = (0..3)
                .map(|d| {
                    if d < dim {
                        format!("{}", c[d])
                    } else {
                        String::new()
                    }
                })
                .collect();
            csv.push_str(&row.join(","));
            csv.push_str("\r\n");
        }
        fs::write(out.join("zeros_points.csv"), csv)?;
    } else {
        let (_, segments) = zeroset::nodal_length_detailed(&realization, 0, &grid)?;
        let mut csv = String::from("a0,a1,b0,b1\r\n");
        for (a, b) in segments {
            let (ca, _) = a.coords();
            let (cb, _) = b.coords();
            csv.push_str(&format!("{},{},{},{}\r\n", ca[0], ca[1], cb[0], cb[1]));
        }
        fs::write(out.join("nodal_segments.csv"), csv)?;
    }
    Ok(())
}

fn cmd_verify_universality(
    dimv: usize,
    reps: u64,
    seed: u64,
    workers: Option<usize>,
    out: &Path,
) -> Result<bool> {
    ensure_out(out)?;
    let config: UniversalityConfig = harness::universality_cases(dimv, reps, seed)?;
    let report = harness::run_universality(&config, workers)?;
    fs::write(out.join("universality_report.json"), report.canonical_json()?)?;

    let mut table = String::from(
        "geometry,constant,std_error,ci_lo,ci_hi,target,pass\r\n",
    );
    println!("universality of the zero-density constant (dim_v = {dimv}):");
    for case in &report.cases {
        let cfg: DensityConfig = serde_json::from_value(case.config.clone())?;
        let target = case.predictions[&format!("constant_{}", cfg.target_mode.name())];
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\r\n",
            cfg.field.geometry.name(),
            case.summary.mean,
            case.summary.std_error,
            case.summary.ci95[0],
            case.summary.ci95[1],
            target,
            case.pass
        ));
        println!(
            "  {:<12} {:.5} ± {:.5}   target {:.5}   {}",
            cfg.field.geometry.name(),
            case.summary.mean,
            case.summary.std_error,
            target,
            verdict(case.pass)
        );
    }
    fs::write(out.join("universality_table.csv"), table)?;
    println!(
        "confidence intervals overlap: {}",
        if report.intervals_overlap { "yes" } else { "NO" }
    );
    println!(
        "{} in {:.1}s — report in {}",
        verdict(report.pass),
        report.wall_clock.as_secs_f64(),
        out.display()
    );
    Ok(report.pass)
}

fn cmd_oracle_matrix(
    n: usize,
    k: usize,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
    out: &Path,
) -> Result<bool> {
    ensure_out(out)?;
    let config = MatrixOracleConfig { n, k, samples, base_seed: seed, tolerance_rel: 0.01 };
    let report = harness::run_matrix_oracle(&config, workers)?;
    write_report(out, "matrix_oracle_report", &report)?;
    println!(
        "E[√det(MᵀM)] for {n}×{k}: {:.5} ± {:.5}  [chi {:.5}, paper {:.5}]",
        report.summary.mean,
        report.summary.std_error,
        report.predictions["chi"],
        report.predictions["paper"]
    );
    println!(
        "{} in {:.1}s — report in {}",
        verdict(report.pass),
        report.wall_clock.as_secs_f64(),
        out.display()
    );
    Ok(report.pass)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
