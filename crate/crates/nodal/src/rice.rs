//! Analytic predictions for zero-set statistics: second spectral moments,
//! typical spacings, elementary-cell volumes, level-crossing densities,
//! chi-mean parallelotope expectations and the dimensionless universal
//! constants.
//!
//! Two normalizations are first-class everywhere because the source
//! formulas are mutually inconsistent:
//!
//! * spacing conventions — `RiceDef` takes Λ = π/√κ₂ (the inverse Rice zero
//!   density of the unit-variance restricted process), `Wavelength` takes
//!   Λ = 2π/√(dim_x·κ₂) (the wavelength-style normalization that makes a
//!   planar monochromatic field have Λ equal to its wavelength);
//! * constant modes — `Paper` reproduces the published factorial constants,
//!   `Chi` assembles the constant from the Kac-Rice density with exact chi
//!   means E[χ_m] = √2·Γ((m+1)/2)/Γ(m/2).
//!
//! Every report carries both; the Monte-Carlo experiments arbitrate.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{region_volume, Region};
use crate::sampler::FieldSpec;
use crate::spectra::{eigenvalue, SpectralMeasure};

/// Normalization of the typical spacing Λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingConvention {
    /// Λ = π/√κ₂: the mean gap between zeros along a geodesic.
    RiceDef,
    /// Λ = 2π/√(dim_x·κ₂): the wavelength normalization.
    Wavelength,
}

impl SpacingConvention {
    pub const ALL: [SpacingConvention; 2] =
        [SpacingConvention::RiceDef, SpacingConvention::Wavelength];

    pub fn name(self) -> &'static str {
        match self {
            SpacingConvention::RiceDef => "rice_def",
            SpacingConvention::Wavelength => "wavelength",
        }
    }

    /// Λ·√κ₂, the spacing in units of the inverse root second moment.
    fn scaled_spacing(self, dim_x: usize) -> f64 {
        match self {
            SpacingConvention::RiceDef => std::f64::consts::PI,
            SpacingConvention::Wavelength => {
                2.0 * std::f64::consts::PI / (dim_x as f64).sqrt()
            }
        }
    }
}

/// Which constant enters a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// The published factorial constants.
    Paper,
    /// Constants assembled from the Kac-Rice density with exact chi means.
    Chi,
}

impl ConstantMode {
    pub const ALL: [ConstantMode; 2] = [ConstantMode::Paper, ConstantMode::Chi];

    pub fn name(self) -> &'static str {
        match self {
            ConstantMode::Paper => "paper",
            ConstantMode::Chi => "chi",
        }
    }
}

/// Mean of a chi random variable with m degrees of freedom,
/// E[χ_m] = √2·Γ((m+1)/2)/Γ(m/2), by the exact two-step recurrence
/// E[χ_{m}] = (m−1)/(m−2)·E[χ_{m−2}].
pub fn chi_mean(m: usize) -> f64 {
    assert!(m >= 1, "chi_mean requires m ≥ 1");
    let mut v = if m % 2 == 1 {
        (2.0 / std::f64::consts::PI).sqrt()
    } else {
        (std::f64::consts::PI / 2.0).sqrt()
    };
    let mut k = if m % 2 == 1 { 1 } else { 2 };
    while k < m {
        v *= (k + 1) as f64 / k as f64;
        k += 2;
    }
    v
}

/// Normalized directional second spectral moment of a unit-variance
/// component: κ₂ = Σ_i w_i |K_i| / dim_x. Independent of component scales.
pub fn second_moment(spec: &FieldSpec) -> f64 {
    spectral_second_moment(&spec.spectrum)
}

pub fn spectral_second_moment(measure: &SpectralMeasure) -> f64 {
    let dim = measure.geometry.dim_x() as f64;
    measure
        .points()
        .map(|(sp, w)| w * eigenvalue(&sp).abs())
        .sum::<f64>()
        / dim
}

/// Rice density of u-level crossings per unit length for a unit-variance
/// stationary process: e^{−u²/2}·√κ₂/π.
pub fn rice_level_density(u: f64, kappa2: f64) -> f64 {
    assert!(kappa2 > 0.0, "level density requires κ₂ > 0");
    (-u * u / 2.0).exp() * kappa2.sqrt() / std::f64::consts::PI
}

/// Typical spacing of the field in the chosen convention. Independent of
/// component scales; errors on the trivial spectrum (κ₂ = 0).
pub fn spacing(spec: &FieldSpec, convention: SpacingConvention) -> Result<f64> {
    let kappa2 = second_moment(spec);
    if !(kappa2 > 0.0) {
        return Err(Error::domain("trivial spectrum has undefined spacing"));
    }
    Ok(convention.scaled_spacing(spec.geometry.dim_x()) / kappa2.sqrt())
}

/// The literal closed form Λ = π/√(dim_x·β·|K|) with β the mean component
/// scale. Kept for comparison output only: it is scale-dependent and
/// disagrees with both conventions above except when dim_x·β = 1.
pub fn prop41_spacing(spec: &FieldSpec) -> f64 {
    let dim = spec.geometry.dim_x() as f64;
    let beta =
        spec.component_scales.iter().sum::<f64>() / spec.component_scales.len() as f64;
    let k_eff: f64 = spec
        .spectrum
        .points()
        .map(|(sp, w)| w * eigenvalue(&sp).abs())
        .sum();
    std::f64::consts::PI / (dim * beta * k_eff).sqrt()
}

/// Expected k-volume of the parallelotope spanned by k independent
/// isotropic Gaussian vectors in R^n with per-column standard deviations σ.
/// Paper mode returns n!/(n−k)!·∏σ; chi mode returns ∏σ·∏ E[χ_{n−i}].
pub fn expected_parallelotope_volume(
    n: usize,
    k: usize,
    sigma: &[f64],
    mode: ConstantMode,
) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    if sigma.len() != k {
        return Err(Error::domain("need one σ per column"));
    }
    let scale: f64 = sigma.iter().product();
    Ok(match mode {
        ConstantMode::Paper => {
            let mut f = 1.0;
            for i in (n - k + 1)..=n {
                f *= i as f64;
            }
            f * scale
        }
        ConstantMode::Chi => {
            let mut f = 1.0;
            for i in 0..k {
                f *= chi_mean(n - i);
            }
            f * scale
        }
    })
}

/// The dimensionless zero-set density constant: expected zero-set measure
/// per unit volume times the elementary-cell volume. Depends only on
/// (dim_x, dim_v, mode, convention) — never on the geometry.
pub fn predicted_constant(
    dim_x: usize,
    dim_v: usize,
    mode: ConstantMode,
    convention: SpacingConvention,
) -> f64 {
    assert!(dim_v <= dim_x, "predicted_constant requires dim_v ≤ dim_x");
    match mode {
        ConstantMode::Paper => {
            // (dim_x)!/(dim_x − dim_v)!·(π/2)^{dim_v/2}, stated in the
            // paper's own cell normalization (convention-independent).
            let mut f = 1.0;
            for i in (dim_x - dim_v + 1)..=dim_x {
                f *= i as f64;
            }
            f * (std::f64::consts::PI / 2.0).powf(dim_v as f64 / 2.0)
        }
        ConstantMode::Chi => {
            // (2π)^{−v/2} Λ^v κ₂^{v/2} ∏ E[χ_{dim_x−i}]; Λ√κ₂ depends only
            // on the convention, so κ₂ cancels.
            let lam = convention.scaled_spacing(dim_x);
            let mut c = (lam * lam / (2.0 * std::f64::consts::PI)).powf(dim_v as f64 / 2.0);
            for i in 0..dim_v {
                c *= chi_mean(dim_x - i);
            }
            c
        }
    }
}

/// Volume of an elementary cell, Λ(convention)^{dim_v}, with components
/// normalized to unit variance.
pub fn cell_volume(spec: &FieldSpec, convention: SpacingConvention) -> Result<f64> {
    Ok(spacing(spec, convention)?.powi(spec.dim_v as i32))
}

/// Predicted expected zero-set measure of the field in a region, in
/// absolute units: constant · Vol(A) / 𝒱(Φ). In chi mode this is the
/// Kac-Rice expectation and is convention-independent.
pub fn predicted_measure(
    spec: &FieldSpec,
    region: &Region,
    mode: ConstantMode,
    convention: SpacingConvention,
) -> Result<f64> {
    let dim_x = spec.geometry.dim_x();
    if spec.dim_v > dim_x {
        return Err(Error::domain("predicted_measure requires dim_v ≤ dim_x"));
    }
    let vol = region_volume(spec.geometry, region)?;
    Ok(predicted_constant(dim_x, spec.dim_v, mode, convention) * vol
        / cell_volume(spec, convention)?)
}

/// Everything the analytic layer has to say about one field spec, ready
/// for JSON reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionReport {
    pub geometry: String,
    pub dim_x: usize,
    pub dim_v: usize,
    pub kappa2: f64,
    pub spacing: BTreeMap<String, f64>,
    /// Literal published closed form, comparison only (scale-dependent).
    pub spacing_prop41: f64,
    pub cell_volume: BTreeMap<String, f64>,
    pub constant: BTreeMap<String, f64>,
    pub zero_density_at_zero_level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_measure: Option<BTreeMap<String, f64>>,
}

/// Assembles the full prediction report; when a region is given, absolute
/// expected measures for it are included per mode and convention.
pub fn predict(spec: &FieldSpec, region: Option<&Region>) -> Result<PredictionReport> {
    let kappa2 = second_moment(spec);
    if !(kappa2 > 0.0) {
        return Err(Error::domain("trivial spectrum has no predictions"));
    }
    let mut spacing_map = BTreeMap::new();
    let mut cell_map = BTreeMap::new();
    for conv in SpacingConvention::ALL {
        spacing_map.insert(conv.name().to_string(), spacing(spec, conv)?);
        cell_map.insert(conv.name().to_string(), cell_volume(spec, conv)?);
    }
    let mut const_map = BTreeMap::new();
    for mode in ConstantMode::ALL {
        for conv in SpacingConvention::ALL {
            const_map.insert(
                format!("{}_{}", mode.name(), conv.name()),
                predicted_constant(spec.geometry.dim_x(), spec.dim_v, mode, conv),
            );
        }
    }
    let (region_vol, measures) = match region {
        Some(r) => {
            let mut m = BTreeMap::new();
            for mode in ConstantMode::ALL {
                for conv in SpacingConvention::ALL {
                    m.insert(
                        format!("{}_{}", mode.name(), conv.name()),
                        predicted_measure(spec, r, mode, conv)?,
                    );
                }
            }
            (Some(region_volume(spec.geometry, r)?), Some(m))
        }
        None => (None, None),
    };
    Ok(PredictionReport {
        geometry: spec.geometry.name().to_string(),
        dim_x: spec.geometry.dim_x(),
        dim_v: spec.dim_v,
        kappa2,
        spacing: spacing_map,
        spacing_prop41: prop41_spacing(spec),
        cell_volume: cell_map,
        constant: const_map,
        zero_density_at_zero_level: rice_level_density(0.0, kappa2),
        region_volume: region_vol,
        predicted_measure: measures,
    })
}
