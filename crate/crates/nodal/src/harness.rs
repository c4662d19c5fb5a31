//! Reproducible Monte-Carlo experiment runner.
//!
//! Four experiment kinds: geodesic spacing measurements, zero-set density
//! measurements (point counts or nodal length), the cross-geometry
//! universality suite, and the Gaussian-matrix oracle. Replications are
//! independent work units seeded by their replication index, run in
//! parallel and aggregated in index order, so a report is byte-identical
//! for any worker count. Wall-clock time is kept out of the serialized
//! report for the same reason.
//!
//! Pass/fail tolerances follow max(relative bound, 4·SE): the relative
//! bound expresses the discretization budget, the 4·SE floor keeps
//! statistical fluctuations from producing spurious failures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::geometry::{region_volume, GeodesicSegment, Geometry, Point, Region};
use crate::rice::{self, ConstantMode, SpacingConvention};
use crate::sampler::{sample, FieldSpec, SeedSpec};
use crate::zeroset;

/// Runs a closure on a dedicated rayon pool when a worker count is given.
/// Results do not depend on the choice.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(f)),
    }
}

/// Mean, standard error and normal 95% confidence interval of a sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        let se = (var / n as f64).sqrt();
        Summary {
            n,
            mean,
            std_error: se,
            ci95: [mean - 1.96 * se, mean + 1.96 * se],
        }
    }

    pub fn overlaps(&self, other: &Summary) -> bool {
        self.ci95[0] <= other.ci95[1] && other.ci95[0] <= self.ci95[1]
    }
}

/// Result of one experiment: full config echo, per-replication values,
/// aggregate statistics, analytic predictions in both modes and
/// conventions, and the declared pass/fail verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub per_replication: Vec<f64>,
    pub summary: Summary,
    pub predictions: BTreeMap<String, f64>,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub flags: BTreeMap<String, usize>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ExperimentReport {
    /// Canonical key-sorted JSON with a trailing newline.
    pub fn canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }

    /// RFC-4180 CSV of the per-replication values.
    pub fn csv(&self) -> String {
        let mut out = String::from("replication,value\r\n");
        for (i, v) in self.per_replication.iter().enumerate() {
            out.push_str(&format!("{i},{v}\r\n"));
        }
        out
    }
}

/// Serializes through `serde_json::Value` so map keys come out sorted.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

// ---------------------------------------------------------------------------
// spacing experiments
// ---------------------------------------------------------------------------

/// Configuration of a geodesic spacing experiment: count zero crossings of
/// component 0 on a fixed geodesic segment over many replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpacingConfig {
    pub field: FieldSpec,
    pub segment_length: f64,
    /// Crossing level in units of the component standard deviation.
    #[serde(default)]
    pub level: f64,
    /// Sampling step along the segment (intrinsic units).
    pub step: f64,
    pub replications: u64,
    pub base_seed: u64,
    /// Relative tolerance on the zero density (pass/fail floor is 4·SE).
    #[serde(default = "default_rel_tol")]
    pub tolerance_rel: f64,
}

fn default_rel_tol() -> f64 {
    0.02
}

/// A geodesic segment suitable for spacing runs: through the origin of the
/// chart, along the first frame direction (the equator on the sphere).
pub fn spacing_segment(g: Geometry, length: f64) -> Result<GeodesicSegment> {
    match g {
        Geometry::Line1 => GeodesicSegment::new(g, Point::X1(0.0), vec![1.0], length),
        Geometry::Plane2 => GeodesicSegment::new(g, Point::X2(0.0, 0.0), vec![1.0, 0.0], length),
        Geometry::Space3 => {
            GeodesicSegment::new(g, Point::X3(0.0, 0.0, 0.0), vec![1.0, 0.0, 0.0], length)
        }
        Geometry::Sphere2 => GeodesicSegment::new(
            g,
            Point::sphere(std::f64::consts::FRAC_PI_2, 0.0),
            vec![0.0, 1.0],
            length,
        ),
        Geometry::Hyperbolic2 => {
            // diameter through the origin so every point stays within
            // length/2 of the center
            let x0 = -((length / 4.0).tanh());
            GeodesicSegment::new(g, Point::Disk { x: x0, y: 0.0 }, vec![1.0, 0.0], length)
        }
    }
}

impl SpacingConfig {
    /// Step and tolerance defaults from the field's Rice spacing.
    pub fn new(field: FieldSpec, wavelengths: f64, replications: u64, base_seed: u64) -> Result<Self> {
        let lam = rice::spacing(&field, SpacingConvention::RiceDef)?;
        Ok(SpacingConfig {
            segment_length: wavelengths * rice::spacing(&field, SpacingConvention::Wavelength)?,
            step: lam / 20.0,
            level: 0.0,
            field,
            replications,
            base_seed,
            tolerance_rel: 0.02,
        })
    }

    fn validate(&self) -> Result<()> {
        self.field.validate()?;
        if self.replications < 2 {
            return Err(Error::config("need at least 2 replications"));
        }
        if !(self.segment_length > 0.0 && self.step > 0.0) {
            return Err(Error::config("segment length and step must be positive"));
        }
        if self.field.geometry == Geometry::Hyperbolic2 {
            let r_max = self.field.r_max.unwrap_or(0.0);
            if self.segment_length > 2.0 * r_max {
                return Err(Error::config(
                    "hyperbolic segments are limited to a diameter of the validity disk",
                ));
            }
        }
        Ok(())
    }
}

/// Measures the zero density along a geodesic (Rice/typical-spacing
/// experiment) and compares it with √κ₂·e^{−u²/2}/π.
pub fn run_spacing(config: &SpacingConfig, workers: Option<usize>) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let seg = spacing_segment(config.field.geometry, config.segment_length)?;
    let estimates: Vec<zeroset::ZeroSetEstimate> = with_workers(workers, || {
        (0..config.replications)
            .collect::<Vec<u64>>()
            .par_iter()
            .map(|&stream| {
                let r = sample(&config.field, SeedSpec::new(config.base_seed, stream))?;
                zeroset::count_level_crossings(&r, 0, &seg, config.level, config.step)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let counts: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let densities: Vec<f64> = counts.iter().map(|c| c / config.segment_length).collect();
    let summary = Summary::of(&densities);

    let kappa2 = rice::second_moment(&config.field);
    let predicted_density = rice::rice_level_density(config.level, kappa2);
    let mut predictions = BTreeMap::new();
    predictions.insert("density".into(), predicted_density);
    predictions.insert("kappa2".into(), kappa2);
    predictions.insert(
        "spacing_rice_def".into(),
        rice::spacing(&config.field, SpacingConvention::RiceDef)?,
    );
    predictions.insert(
        "spacing_wavelength".into(),
        rice::spacing(&config.field, SpacingConvention::Wavelength)?,
    );
    predictions.insert("spacing_prop41".into(), rice::prop41_spacing(&config.field));

    let mut measured = BTreeMap::new();
    measured.insert("mean_count".into(), Summary::of(&counts).mean);
    if summary.mean > 0.0 {
        measured.insert("spacing".into(), 1.0 / summary.mean);
        measured.insert("spacing_se".into(), summary.std_error / (summary.mean * summary.mean));
    }

    let tolerance = (config.tolerance_rel * predicted_density).max(4.0 * summary.std_error);
    let pass = (summary.mean - predicted_density).abs() <= tolerance;
    Ok(ExperimentReport {
        experiment: "spacing".into(),
        config: serde_json::to_value(config)?,
        per_replication: counts,
        summary,
        predictions,
        measured,
        tolerance,
        pass,
        flags: collect_flags(&estimates),
        wall_clock: start.elapsed(),
    })
}

fn collect_flags(estimates: &[zeroset::ZeroSetEstimate]) -> BTreeMap<String, usize> {
    let mut flags = BTreeMap::new();
    for e in estimates {
        if e.refinement_flag {
            *flags.entry("refinement".to_string()).or_insert(0) += 1;
        }
        for f in &e.flags {
            *flags.entry(f.clone()).or_insert(0) += 1;
        }
    }
    flags
}

// ---------------------------------------------------------------------------
// density experiments
// ---------------------------------------------------------------------------

/// Configuration of a zero-set density experiment: point-zero counts when
/// dim V = dim X, nodal length when dim V = 1 on a surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityConfig {
    pub field: FieldSpec,
    pub region: Region,
    /// Grid node spacing (intrinsic units).
    pub resolution: f64,
    pub replications: u64,
    pub base_seed: u64,
    /// Cell-volume convention for the dimensionless constant.
    #[serde(default = "default_convention")]
    pub convention: SpacingConvention,
    /// Mode whose constant is the pass/fail target.
    #[serde(default = "default_mode")]
    pub target_mode: ConstantMode,
    #[serde(default = "default_density_tol")]
    pub tolerance_rel: f64,
}

fn default_convention() -> SpacingConvention {
    SpacingConvention::Wavelength
}

fn default_mode() -> ConstantMode {
    ConstantMode::Chi
}

fn default_density_tol() -> f64 {
    0.03
}

/// Default grid resolutions: Λ/10 for point counting (dedup bias well
/// under 1%), Λ/16 for nodal length (first-order interpolation bias).
pub fn default_resolution(field: &FieldSpec) -> Result<f64> {
    let lam = rice::spacing(field, SpacingConvention::Wavelength)?;
    Ok(if field.dim_v == 1 { lam / 16.0 } else { lam / 10.0 })
}

impl DensityConfig {
    pub fn new(field: FieldSpec, region: Region, replications: u64, base_seed: u64) -> Result<Self> {
        Ok(DensityConfig {
            resolution: default_resolution(&field)?,
            field,
            region,
            replications,
            base_seed,
            convention: default_convention(),
            target_mode: default_mode(),
            tolerance_rel: default_density_tol(),
        })
    }

    fn kind(&self) -> Result<zeroset::ZeroKind> {
        let dim_x = self.field.geometry.dim_x();
        if self.field.dim_v == dim_x && dim_x >= 2 {
            Ok(zeroset::ZeroKind::CountPoints)
        } else if self.field.dim_v == 1 && dim_x == 2 {
            Ok(zeroset::ZeroKind::Length)
        } else {
            Err(Error::config(format!(
                "unsupported (dim_x, dim_v) = ({dim_x}, {})",
                self.field.dim_v
            )))
        }
    }

    fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.kind()?;
        if self.replications < 2 {
            return Err(Error::config("need at least 2 replications"));
        }
        if !self.region.geometry_matches(self.field.geometry) {
            return Err(Error::config("region does not match the field geometry"));
        }
        Ok(())
    }
}

/// Measures the zero-set density of the field over the region and reports
/// the dimensionless constant density × 𝒱 against both predicted modes.
pub fn run_density(config: &DensityConfig, workers: Option<usize>) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let kind = config.kind()?;
    let grid = crate::geometry::grid_region(
        config.field.geometry,
        &config.region,
        config.resolution,
    )?;
    let estimates: Vec<zeroset::ZeroSetEstimate> = with_workers(workers, || {
        (0..config.replications)
            .collect::<Vec<u64>>()
            .par_iter()
            .map(|&stream| {
                let r = sample(&config.field, SeedSpec::new(config.base_seed, stream))?;
                match kind {
                    zeroset::ZeroKind::CountPoints => zeroset::count_point_zeros(&r, &grid),
                    zeroset::ZeroKind::Length => zeroset::nodal_length(&r, 0, &grid),
                    zeroset::ZeroKind::Count1D => unreachable!(),
                }
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let volume = region_volume(config.field.geometry, &config.region)?;
    let cell = rice::cell_volume(&config.field, config.convention)?;
    let raw: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let constants: Vec<f64> = raw.iter().map(|v| v / volume * cell).collect();
    let summary = Summary::of(&constants);

    let dim_x = config.field.geometry.dim_x();
    let mut predictions = BTreeMap::new();
    for mode in ConstantMode::ALL {
        predictions.insert(
            format!("constant_{}", mode.name()),
            rice::predicted_constant(dim_x, config.field.dim_v, mode, config.convention),
        );
        predictions.insert(
            format!("measure_{}", mode.name()),
            rice::predicted_measure(&config.field, &config.region, mode, config.convention)?,
        );
    }
    predictions.insert("kappa2".into(), rice::second_moment(&config.field));
    predictions.insert("cell_volume".into(), cell);

    let raw_summary = Summary::of(&raw);
    let mut measured = BTreeMap::new();
    measured.insert("raw_mean".into(), raw_summary.mean);
    measured.insert("raw_se".into(), raw_summary.std_error);
    measured.insert("density".into(), raw_summary.mean / volume);
    measured.insert("region_volume".into(), volume);

    let target = predictions[&format!("constant_{}", config.target_mode.name())];
    let other_mode = match config.target_mode {
        ConstantMode::Chi => ConstantMode::Paper,
        ConstantMode::Paper => ConstantMode::Chi,
    };
    let other = predictions[&format!("constant_{}", other_mode.name())];
    measured.insert(
        format!("discrepancy_vs_{}", other_mode.name()),
        (summary.mean - other) / other,
    );

    let tolerance = (config.tolerance_rel * target).max(4.0 * summary.std_error);
    let pass = (summary.mean - target).abs() <= tolerance;
    Ok(ExperimentReport {
        experiment: "density".into(),
        config: serde_json::to_value(config)?,
        per_replication: raw,
        summary,
        predictions,
        measured,
        tolerance,
        pass,
        flags: collect_flags(&estimates),
        wall_clock: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// universality suite
// ---------------------------------------------------------------------------

/// Cross-geometry universality check: the same dimensionless constant must
/// come out of every geometry, with overlapping 95% confidence intervals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniversalityConfig {
    pub cases: Vec<DensityConfig>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalityReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub cases: Vec<ExperimentReport>,
    /// Pairwise 95% CI overlap of the per-geometry constants.
    pub intervals_overlap: bool,
    pub pass: bool,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl UniversalityReport {
    pub fn canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }
}

/// Runs the density experiment per geometry and tests that the measured
/// constants agree pairwise. A single-case config reduces to run_density.
pub fn run_universality(
    config: &UniversalityConfig,
    workers: Option<usize>,
) -> Result<UniversalityReport> {
    if config.cases.is_empty() {
        return Err(Error::config("universality needs at least one case"));
    }
    let dim_v = config.cases[0].field.dim_v;
    if config.cases.iter().any(|c| c.field.dim_v != dim_v) {
        return Err(Error::config("universality cases must share dim_v"));
    }
    let start = Instant::now();
    let cases: Vec<ExperimentReport> = config
        .cases
        .iter()
        .map(|c| run_density(c, workers))
        .collect::<Result<Vec<_>>>()?;
    let mut overlap = true;
    for i in 0..cases.len() {
        for j in i + 1..cases.len() {
            overlap &= cases[i].summary.overlaps(&cases[j].summary);
        }
    }
    let pass = overlap && cases.iter().all(|c| c.pass);
    Ok(UniversalityReport {
        experiment: "universality".into(),
        config: serde_json::to_value(config)?,
        cases,
        intervals_overlap: overlap,
        pass,
        wall_clock: start.elapsed(),
    })
}

/// The standard cross-geometry experiment battery: complex monochromatic
/// fields (dim_v = 2, zero counting) or real ones (dim_v = 1, nodal
/// length) on the plane (κ = 2π), the sphere (ℓ = 10) and the hyperbolic
/// disk (λ = 6, r_max = 2), at the default resolutions. Cases get distinct
/// seed offsets so they are independent.
pub fn universality_cases(
    dim_v: usize,
    replications: u64,
    base_seed: u64,
) -> Result<UniversalityConfig> {
    use crate::spectra::{SpectralMeasure, SpectralPoint};
    if !(dim_v == 1 || dim_v == 2) {
        return Err(Error::config("universality battery supports dim_v 1 or 2"));
    }
    let plane_side = if dim_v == 2 { 8.0 } else { 6.0 };
    let plane = FieldSpec::new(
        Geometry::Plane2,
        SpectralMeasure::mono(SpectralPoint::flat(Geometry::Plane2, 2.0 * std::f64::consts::PI)?),
        dim_v,
    )?;
    let sphere = FieldSpec::new(
        Geometry::Sphere2,
        SpectralMeasure::mono(SpectralPoint::sphere_degree(10)),
        dim_v,
    )?;
    let hyperbolic = FieldSpec::new(
        Geometry::Hyperbolic2,
        SpectralMeasure::mono(SpectralPoint::hyperbolic(6.0)?),
        dim_v,
    )?
    .with_r_max(2.0)
    .with_n_waves(128);
    let cases = vec![
        DensityConfig::new(
            plane,
            Region::centered_square(plane_side),
            replications,
            base_seed,
        )?,
        DensityConfig::new(sphere, Region::full_sphere(), replications, base_seed + 1)?,
        DensityConfig::new(
            hyperbolic,
            Region::DiskBall { radius: 2.0 },
            replications,
            base_seed + 2,
        )?,
    ];
    Ok(UniversalityConfig { cases })
}

// ---------------------------------------------------------------------------
// Gaussian-matrix oracle
// ---------------------------------------------------------------------------

/// Monte-Carlo oracle for E[√det(MᵀM)] over n×k standard Gaussian
/// matrices, the quantity that decides between the candidate
/// parallelotope-volume formulas.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixOracleConfig {
    pub n: usize,
    pub k: usize,
    pub samples: u64,
    pub base_seed: u64,
    #[serde(default = "default_oracle_tol")]
    pub tolerance_rel: f64,
}

fn default_oracle_tol() -> f64 {
    0.01
}

const ORACLE_CHUNK: u64 = 1000;

/// Estimates E[√det(MᵀM)] and checks it against the chi-mean product
/// (the paper-mode factorial value is reported alongside).
pub fn run_matrix_oracle(
    config: &MatrixOracleConfig,
    workers: Option<usize>,
) -> Result<ExperimentReport> {
    if !(1 <= config.k && config.k <= config.n && config.n <= 4) {
        return Err(Error::config("matrix oracle requires 1 ≤ k ≤ n ≤ 4"));
    }
    if config.samples < 10 * ORACLE_CHUNK {
        return Err(Error::config("matrix oracle needs at least 10^4 samples"));
    }
    let start = Instant::now();
    let chunks = config.samples / ORACLE_CHUNK;
    // chunk means are iid, so the summary over chunks is an honest CLT
    // estimate while keeping reports small
    let chunk_means: Vec<f64> = with_workers(workers, || {
        (0..chunks)
            .collect::<Vec<u64>>()
            .par_iter()
            .map(|&chunk| {
                use rand::SeedableRng;
                use rand_distr::Distribution;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.base_seed);
                rng.set_stream(chunk);
                let normal = rand_distr::StandardNormal;
                let mut total = 0.0;
                for _ in 0..ORACLE_CHUNK {
                    let mut m = [[0.0f64; 4]; 4];
                    for row in m.iter_mut().take(config.n) {
                        for item in row.iter_mut().take(config.k) {
                            *item = normal.sample(&mut rng);
                        }
                    }
                    total += parallelotope_volume(&m, config.n, config.k);
                }
                total / ORACLE_CHUNK as f64
            })
            .collect()
    })?;
    let summary = Summary::of(&chunk_means);

    let sigmas = vec![1.0; config.k];
    let mut predictions = BTreeMap::new();
    predictions.insert(
        "paper".into(),
        rice::expected_parallelotope_volume(config.n, config.k, &sigmas, ConstantMode::Paper)?,
    );
    predictions.insert(
        "chi".into(),
        rice::expected_parallelotope_volume(config.n, config.k, &sigmas, ConstantMode::Chi)?,
    );

    let target = predictions["chi"];
    let tolerance = (config.tolerance_rel * target).max(4.0 * summary.std_error);
    let pass = (summary.mean - target).abs() <= tolerance;
    let mut measured = BTreeMap::new();
    measured.insert("paper_error".into(), (summary.mean - predictions["paper"]).abs());
    measured.insert("chi_error".into(), (summary.mean - target).abs());
    Ok(ExperimentReport {
        experiment: "matrix_oracle".into(),
        config: serde_json::to_value(config)?,
        per_replication: chunk_means,
        summary,
        predictions,
        measured,
        tolerance,
        pass,
        flags: BTreeMap::new(),
        wall_clock: start.elapsed(),
    })
}

/// √det(MᵀM) for the leading n×k block: the k-volume of the parallelotope
/// spanned by the columns.
fn parallelotope_volume(m: &[[f64; 4]; 4], n: usize, k: usize) -> f64 {
    let mut gram = [[0.0f64; 4]; 4];
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for row in m.iter().take(n) {
                s += row[i] * row[j];
            }
            gram[i][j] = s;
        }
    }
    det_small(&mut gram, k).max(0.0).sqrt()
}

fn det_small(a: &mut [[f64; 4]; 4], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for kk in col..n {
                a[row][kk] -= f * a[col][kk];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{SpectralMeasure, SpectralPoint};
    use std::f64::consts::PI;

    fn line_spec(kappa: f64) -> FieldSpec {
        FieldSpec::new(
            Geometry::Line1,
            SpectralMeasure::mono(SpectralPoint::flat(Geometry::Line1, kappa).unwrap()),
            1,
        )
        .unwrap()
        .with_n_waves(1)
    }

    #[test]
    fn line_spacing_recovers_cosine_density() {
        let config = SpacingConfig::new(line_spec(1.0), 40.0, 150, 314).unwrap();
        let report = run_spacing(&config, None).unwrap();
        // deterministic cosine spacing π: density 1/π
        assert!(report.pass, "density {} vs 1/π", report.summary.mean);
        assert!((report.measured["spacing"] - PI).abs() / PI < 0.02);
        assert!((report.predictions["spacing_rice_def"] - PI).abs() < 1e-12);
    }

    #[test]
    fn plane_spacing_matches_rice_definition() {
        // zero counting along a plane geodesic measures Λ = π/√κ₂ = π√2/κ
        let kappa = 2.0;
        let field = FieldSpec::new(
            Geometry::Plane2,
            SpectralMeasure::mono(SpectralPoint::flat(Geometry::Plane2, kappa).unwrap()),
            1,
        )
        .unwrap()
        .with_n_waves(64);
        let config = SpacingConfig::new(field, 60.0, 200, 616).unwrap();
        let report = run_spacing(&config, None).unwrap();
        let lambda = report.measured["spacing"];
        let expected = PI * 2.0f64.sqrt() / kappa;
        let se = report.measured["spacing_se"];
        assert!(
            (lambda - expected).abs() <= (4.0 * se).max(0.02 * expected),
            "Λ = {lambda} vs {expected} (se {se})"
        );
        assert!(report.pass);
    }

    #[test]
    fn reports_are_worker_count_invariant() {
        let config = SpacingConfig::new(line_spec(2.0), 20.0, 24, 11).unwrap();
        let a = run_spacing(&config, Some(1)).unwrap().canonical_json().unwrap();
        let b = run_spacing(&config, Some(8)).unwrap().canonical_json().unwrap();
        assert_eq!(a, b);

        let dconfig = DensityConfig::new(
            FieldSpec::new(
                Geometry::Plane2,
                SpectralMeasure::mono(SpectralPoint::flat(Geometry::Plane2, 2.0 * PI).unwrap()),
                2,
            )
            .unwrap()
            .with_n_waves(64),
            Region::centered_square(2.0),
            6,
            5,
        )
        .unwrap();
        let a = run_density(&dconfig, Some(1)).unwrap().canonical_json().unwrap();
        let b = run_density(&dconfig, Some(8)).unwrap().canonical_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reports_embed_config_and_seed_for_replay() {
        let config = SpacingConfig::new(line_spec(1.5), 10.0, 8, 2718).unwrap();
        let report = run_spacing(&config, None).unwrap();
        let echoed: SpacingConfig = serde_json::from_value(report.config.clone()).unwrap();
        assert_eq!(echoed.base_seed, 2718);
        let replay = run_spacing(&echoed, None).unwrap();
        assert_eq!(
            report.canonical_json().unwrap(),
            replay.canonical_json().unwrap()
        );
    }

    #[test]
    fn matrix_oracle_decides_for_the_chi_value() {
        let config = MatrixOracleConfig {
            n: 2,
            k: 2,
            samples: 100_000,
            base_seed: 7,
            tolerance_rel: 0.01,
        };
        let report = run_matrix_oracle(&config, None).unwrap();
        assert!(report.pass);
        assert!((report.summary.mean - 1.0).abs() < 0.01, "mean {}", report.summary.mean);
        // the factorial value 2 is clearly refuted
        assert!((report.summary.mean - report.predictions["paper"]).abs() > 0.9);

        let c21 = MatrixOracleConfig { n: 2, k: 1, samples: 100_000, base_seed: 8, tolerance_rel: 0.01 };
        let r21 = run_matrix_oracle(&c21, None).unwrap();
        assert!((r21.summary.mean - rice::chi_mean(2)).abs() < 0.01);

        let c11 = MatrixOracleConfig { n: 1, k: 1, samples: 100_000, base_seed: 9, tolerance_rel: 0.01 };
        let r11 = run_matrix_oracle(&c11, None).unwrap();
        assert!((r11.summary.mean - (2.0 / PI).sqrt()).abs() < 0.01);
    }

    #[test]
    fn confidence_intervals_are_calibrated() {
        // synthetic data with known mean: the 95% CI must cover it in at
        // least 90 of 100 meta-runs
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let true_mean = 3.0;
        let mut covered = 0;
        for _ in 0..100 {
            let values: Vec<f64> = (0..200)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let v: f64 = rng.gen();
                    // Box-Muller
                    true_mean
                        + (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos() * 0.7
                })
                .collect();
            let s = Summary::of(&values);
            if s.ci95[0] <= true_mean && true_mean <= s.ci95[1] {
                covered += 1;
            }
        }
        assert!(covered >= 90, "CI covered the mean only {covered}/100 times");
    }

    #[test]
    fn universality_single_case_reduces_to_density() {
        let dconfig = DensityConfig::new(
            FieldSpec::new(
                Geometry::Plane2,
                SpectralMeasure::mono(SpectralPoint::flat(Geometry::Plane2, 2.0 * PI).unwrap()),
                2,
            )
            .unwrap()
            .with_n_waves(64),
            Region::centered_square(2.0),
            6,
            5,
        )
        .unwrap();
        let u = run_universality(&UniversalityConfig { cases: vec![dconfig.clone()] }, None)
            .unwrap();
        assert!(u.intervals_overlap);
        let d = run_density(&dconfig, None).unwrap();
        assert_eq!(
            u.cases[0].canonical_json().unwrap(),
            d.canonical_json().unwrap()
        );
    }

    #[test]
    fn config_validation() {
        assert!(run_matrix_oracle(
            &MatrixOracleConfig { n: 5, k: 2, samples: 100_000, base_seed: 0, tolerance_rel: 0.01 },
            None
        )
        .is_err());
        let bad = DensityConfig::new(
            FieldSpec::new(
                Geometry::Plane2,
                SpectralMeasure::mono(SpectralPoint::flat(Geometry::Plane2, 1.0).unwrap()),
                1,
            )
            .unwrap(),
            Region::full_sphere(),
            4,
            0,
        )
        .unwrap();
        assert!(run_density(&bad, None).is_err());
    }
}
