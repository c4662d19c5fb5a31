//! Construction of invariant Gaussian field realizations.
//!
//! Flat spaces superpose plane waves with Gaussian coefficient pairs on
//! equispaced wave directions plus one uniform random global rotation:
//! Φ(x) = √(β/N) Σ_j [a_j cos(κ u_j·x) + b_j sin(κ u_j·x)]. Each sample is
//! exactly Gaussian at any N and the ensemble is exactly isotropic.
//!
//! The sphere superposes real spherical harmonics of one degree with i.i.d.
//! standard Gaussian coefficients, Φ = √(4πβ/(2ℓ+1)) Σ_m ζ_m Y_{ℓm}; by the
//! addition theorem the covariance is exactly β P_ℓ(cos θ).
//!
//! The hyperbolic disk superposes boundary (Helgason) waves
//! e^{(iλ+1/2)⟨z,b_j⟩} at equispaced boundary points with circularly
//! symmetric Gaussian coefficients. The boundary integral must be
//! truncated, so hyperbolic specs carry a validity radius `r_max` and a
//! wave count certified by a deterministic covariance self-check.
//!
//! Reproducibility: the generator is pinned to ChaCha8 (`rand_chacha`),
//! keyed by the base seed via `seed_from_u64`, with the 64-bit stream index
//! selecting statistically independent replication streams. Identical
//! (seed, stream) pairs reproduce realizations bit-for-bit; this choice is
//! part of the crate contract and is never changed silently.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::geometry::{distance, Geometry, Point, MAX_HYPERBOLIC_RADIUS};
use crate::specfun::{assoc_legendre_row, busemann, busemann_grad};
use crate::spectra::{mixture_covariance, SpectralMeasure};

/// Largest deterministic covariance error tolerated by the hyperbolic
/// truncation self-check, well under the Monte-Carlo error budget.
pub const HYPERBOLIC_CERT_TOL: f64 = 5e-3;

/// Full description of an invariant Gaussian field to sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub geometry: Geometry,
    pub spectrum: SpectralMeasure,
    /// Number of independent real components (dim V), 1 to 3.
    pub dim_v: usize,
    /// Wave-superposition truncation for flat and hyperbolic samplers.
    pub n_waves: usize,
    /// Validity radius for hyperbolic realizations (required there).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Per-component variances β (defaults to all 1).
    pub component_scales: Vec<f64>,
}

impl FieldSpec {
    pub fn new(geometry: Geometry, spectrum: SpectralMeasure, dim_v: usize) -> Result<Self> {
        let n_waves = match geometry {
            Geometry::Sphere2 => 1,
            Geometry::Hyperbolic2 => 256,
            _ => 128,
        };
        let spec = FieldSpec {
            geometry,
            spectrum,
            dim_v,
            n_waves,
            r_max: if geometry == Geometry::Hyperbolic2 { Some(2.0) } else { None },
            component_scales: vec![1.0; dim_v],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_n_waves(mut self, n: usize) -> Self {
        self.n_waves = n;
        self
    }

    pub fn with_r_max(mut self, r: f64) -> Self {
        self.r_max = Some(r);
        self
    }

    pub fn with_scales(mut self, scales: Vec<f64>) -> Self {
        self.component_scales = scales;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spectrum.validate()?;
        if self.spectrum.geometry != self.geometry {
            return Err(Error::domain("spectrum geometry differs from field geometry"));
        }
        if !(1..=3).contains(&self.dim_v) {
            return Err(Error::domain("dim_v must be between 1 and 3"));
        }
        if self.component_scales.len() != self.dim_v {
            return Err(Error::domain("component_scales must have dim_v entries"));
        }
        if self.component_scales.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::domain("component scales must be positive"));
        }
        if self.n_waves == 0 {
            return Err(Error::domain("n_waves must be at least 1"));
        }
        if self.geometry == Geometry::Hyperbolic2 {
            match self.r_max {
                Some(r) if r > 0.0 && r <= MAX_HYPERBOLIC_RADIUS => {}
                Some(r) => {
                    return Err(Error::domain(format!(
                        "r_max {r} outside (0, {MAX_HYPERBOLIC_RADIUS}]"
                    )))
                }
                None => return Err(Error::domain("hyperbolic specs require r_max")),
            }
        }
        Ok(())
    }
}

/// Seed for one replication: a base seed identifying the experiment and a
/// stream index identifying the replication. Distinct streams are
/// statistically independent; identical pairs reproduce bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(base: u64, stream: u64) -> Self {
        SeedSpec { base, stream }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base);
        rng.set_stream(self.stream);
        rng
    }
}

/// Coefficient tables of one monochromatic constituent of one component.
#[derive(Debug, Clone)]
enum WaveTable {
    /// Plane-wave superposition; `wave_vectors` are κ·u_j.
    Flat {
        wave_vectors: Vec<[f64; 3]>,
        coeffs: Vec<(f64, f64)>,
        amp: f64,
    },
    /// One spherical-harmonic degree; coeffs ordered ζ_0, (ζ_m^cos, ζ_m^sin).
    Sphere { ell: u32, coeffs: Vec<f64>, amp: f64 },
    /// Boundary-wave superposition; `nodes` store (cos α_j, sin α_j).
    Hyperbolic {
        lambda: f64,
        nodes: Vec<(f64, f64)>,
        coeffs: Vec<(f64, f64)>,
        amp: f64,
    },
}

/// One sampled field: per component and per spectral atom, coefficient
/// tables enabling exact pointwise evaluation of value and derivatives.
#[derive(Debug, Clone)]
pub struct Realization {
    pub spec: FieldSpec,
    components: Vec<Vec<WaveTable>>,
}

/// Value-space Jacobian of a realization at a point, in the orthonormal
/// frame of the chart: `rows[c][d]` = derivative of component c along the
/// d-th frame direction. dim_v × dim_x, dims ≤ 3.
#[derive(Debug, Clone, Copy)]
pub struct Jacobian {
    pub dim_v: usize,
    pub dim_x: usize,
    rows: [[f64; 3]; 3],
}

impl Jacobian {
    fn zero(dim_v: usize, dim_x: usize) -> Self {
        Jacobian { dim_v, dim_x, rows: [[0.0; 3]; 3] }
    }

    pub fn from_rows(dim_v: usize, dim_x: usize, rows: [[f64; 3]; 3]) -> Self {
        Jacobian { dim_v, dim_x, rows }
    }

    pub fn get(&self, comp: usize, dir: usize) -> f64 {
        self.rows[comp][dir]
    }

    fn set(&mut self, comp: usize, dir: usize, v: f64) {
        self.rows[comp][dir] = v;
    }

    pub fn row(&self, comp: usize) -> [f64; 3] {
        self.rows[comp]
    }
}

/// Draws a realization of the field. Components are mutually independent;
/// spectral atoms combine as independent monochromatic fields with weights
/// √w_i. Hyperbolic specs are rejected (with the minimal admissible wave
/// count) when the truncation self-check fails at `spec.n_waves`.
pub fn sample(spec: &FieldSpec, seed: SeedSpec) -> Result<Realization> {
    spec.validate()?;
    if spec.geometry == Geometry::Hyperbolic2 {
        certify_hyperbolic(&spec.spectrum, spec.r_max.unwrap(), spec.n_waves)?;
    }
    let mut rng = seed.rng();
    let components = (0..spec.dim_v)
        .map(|_| {
            spec.spectrum
                .points()
                .map(|(sp, w)| draw_table(spec, sp.param, w, &mut rng))
                .collect()
        })
        .collect();
    Ok(Realization { spec: spec.clone(), components })
}

fn draw_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn draw_table(spec: &FieldSpec, param: f64, weight: f64, rng: &mut ChaCha8Rng) -> WaveTable {
    let n = spec.n_waves;
    match spec.geometry {
        Geometry::Line1 => {
            let wave_vectors = vec![[param, 0.0, 0.0]; n];
            let coeffs = (0..n).map(|_| (draw_normal(rng), draw_normal(rng))).collect();
            WaveTable::Flat { wave_vectors, coeffs, amp: (weight / n as f64).sqrt() }
        }
        Geometry::Plane2 => {
            let psi: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let wave_vectors = (0..n)
                .map(|j| {
                    let a = psi + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    [param * a.cos(), param * a.sin(), 0.0]
                })
                .collect();
            let coeffs = (0..n).map(|_| (draw_normal(rng), draw_normal(rng))).collect();
            WaveTable::Flat { wave_vectors, coeffs, amp: (weight / n as f64).sqrt() }
        }
        Geometry::Space3 => {
            let rot = random_rotation(rng);
            let wave_vectors = (0..n)
                .map(|j| {
                    let u = fibonacci_direction(j, n);
                    let r = apply_rotation(&rot, u);
                    [param * r[0], param * r[1], param * r[2]]
                })
                .collect();
            let coeffs = (0..n).map(|_| (draw_normal(rng), draw_normal(rng))).collect();
            WaveTable::Flat { wave_vectors, coeffs, amp: (weight / n as f64).sqrt() }
        }
        Geometry::Sphere2 => {
            let ell = param as u32;
            let coeffs = (0..2 * ell as usize + 1).map(|_| draw_normal(rng)).collect();
            let amp = (weight * 4.0 * std::f64::consts::PI / (2.0 * param + 1.0)).sqrt();
            WaveTable::Sphere { ell, coeffs, amp }
        }
        Geometry::Hyperbolic2 => {
            let psi: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let nodes = boundary_nodes(n, psi);
            let coeffs = (0..n).map(|_| (draw_normal(rng), draw_normal(rng))).collect();
            WaveTable::Hyperbolic {
                lambda: param,
                nodes,
                coeffs,
                amp: (weight / n as f64).sqrt(),
            }
        }
    }
}

fn boundary_nodes(n: usize, psi: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|j| {
            let a = psi + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .collect()
}

/// Quasi-uniform directions on S² (Fibonacci lattice).
fn fibonacci_direction(j: usize, n: usize) -> [f64; 3] {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let z = 1.0 - 2.0 * (j as f64 + 0.5) / n as f64;
    let r = (1.0 - z * z).sqrt();
    let phi = 2.0 * std::f64::consts::PI * (j as f64 / golden).fract();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Uniform random rotation of R³ from a normalized Gaussian quaternion.
fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let (w, x, y, z) = (
        draw_normal(rng),
        draw_normal(rng),
        draw_normal(rng),
        draw_normal(rng),
    );
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn apply_rotation(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

impl Realization {
    fn check_domain(&self, p: &Point) -> Result<()> {
        p.validate(self.spec.geometry)?;
        if self.spec.geometry == Geometry::Hyperbolic2 {
            let r_max = self.spec.r_max.unwrap();
            let d = distance(Geometry::Hyperbolic2, &Point::origin(Geometry::Hyperbolic2), p)?;
            if d > r_max + 1e-9 {
                return Err(Error::domain(format!(
                    "point at distance {d} outside the validity radius {r_max}"
                )));
            }
        }
        Ok(())
    }

    /// Value of a component with its variance normalized to 1. Zero sets
    /// and their statistics only ever see this normalization.
    pub fn eval_unit(&self, component: usize, p: &Point) -> Result<f64> {
        self.check_domain(p)?;
        Ok(self.eval_unit_unchecked(component, p))
    }

    pub(crate) fn eval_unit_unchecked(&self, component: usize, p: &Point) -> f64 {
        let mut total = 0.0;
        for table in &self.components[component] {
            total += eval_table(table, p);
        }
        total
    }

    /// Field value: component c has variance β_c.
    pub fn eval(&self, component: usize, p: &Point) -> Result<f64> {
        Ok(self.spec.component_scales[component].sqrt() * self.eval_unit(component, p)?)
    }

    /// Jacobian in the orthonormal frame at p, components at unit variance.
    pub fn jacobian_unit(&self, p: &Point) -> Result<Jacobian> {
        self.check_domain(p)?;
        Ok(self.jacobian_unit_unchecked(p))
    }

    pub(crate) fn jacobian_unit_unchecked(&self, p: &Point) -> Jacobian {
        let dim_x = self.spec.geometry.dim_x();
        let mut jac = Jacobian::zero(self.spec.dim_v, dim_x);
        for (c, tables) in self.components.iter().enumerate() {
            let mut row = [0.0; 3];
            for table in tables {
                let g = grad_table(table, p);
                for d in 0..dim_x {
                    row[d] += g[d];
                }
            }
            for d in 0..dim_x {
                jac.set(c, d, row[d]);
            }
        }
        jac
    }

    /// Gradient matrix (dim_v × dim_x) of the field in the orthonormal
    /// frame at p, with component scales applied.
    pub fn eval_gradient(&self, p: &Point) -> Result<Jacobian> {
        let mut jac = self.jacobian_unit(p)?;
        for c in 0..self.spec.dim_v {
            let s = self.spec.component_scales[c].sqrt();
            for d in 0..jac.dim_x {
                let v = jac.get(c, d);
                jac.set(c, d, s * v);
            }
        }
        Ok(jac)
    }
}

fn eval_table(table: &WaveTable, p: &Point) -> f64 {
    match table {
        WaveTable::Flat { wave_vectors, coeffs, amp } => {
            let (c, _) = p.coords();
            let mut sum = 0.0;
            for (k, (a, b)) in wave_vectors.iter().zip(coeffs) {
                let phase = k[0] * c[0] + k[1] * c[1] + k[2] * c[2];
                sum += a * phase.cos() + b * phase.sin();
            }
            amp * sum
        }
        WaveTable::Sphere { ell, coeffs, amp } => {
            let (theta, phi) = match *p {
                Point::Sphere { theta, phi } => (theta, phi),
                _ => unreachable!("sphere table evaluated off-sphere"),
            };
            let row = assoc_legendre_row(*ell, theta);
            let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
            let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
            let mut sum = coeffs[0] * row.values[0] * inv_sqrt_2pi;
            for m in 1..=*ell as usize {
                let (zc, zs) = (coeffs[2 * m - 1], coeffs[2 * m]);
                let (sin_m, cos_m) = (m as f64 * phi).sin_cos();
                sum += row.values[m] * inv_sqrt_pi * (zc * cos_m + zs * sin_m);
            }
            amp * sum
        }
        WaveTable::Hyperbolic { lambda, nodes, coeffs, amp } => {
            let (x, y) = match *p {
                Point::Disk { x, y } => (x, y),
                _ => unreachable!("hyperbolic table evaluated off-disk"),
            };
            let mut sum = 0.0;
            for ((nc, ns), (a, b)) in nodes.iter().zip(coeffs) {
                let bu = busemann(x, y, *nc, *ns);
                let growth = (0.5 * bu).exp();
                let (s, c) = (lambda * bu).sin_cos();
                sum += a * growth * c + b * growth * s;
            }
            amp * sum
        }
    }
}

/// Frame gradient of one table at p (3 entries, trailing ones zero).
fn grad_table(table: &WaveTable, p: &Point) -> [f64; 3] {
    match table {
        WaveTable::Flat { wave_vectors, coeffs, amp } => {
            let (c, _) = p.coords();
            let mut g = [0.0; 3];
            for (k, (a, b)) in wave_vectors.iter().zip(coeffs) {
                let phase = k[0] * c[0] + k[1] * c[1] + k[2] * c[2];
                let (s, co) = phase.sin_cos();
                let d = -a * s + b * co;
                g[0] += k[0] * d;
                g[1] += k[1] * d;
                g[2] += k[2] * d;
            }
            [amp * g[0], amp * g[1], amp * g[2]]
        }
        WaveTable::Sphere { ell, coeffs, amp } => {
            let (theta, phi) = match *p {
                Point::Sphere { theta, phi } => (theta, phi),
                _ => unreachable!(),
            };
            let row = assoc_legendre_row(*ell, theta);
            let s = theta.sin().max(1e-12);
            let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
            let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
            let mut d_theta = coeffs[0] * row.dtheta[0] * inv_sqrt_2pi;
            let mut d_phi_frame = 0.0;
            for m in 1..=*ell as usize {
                let (zc, zs) = (coeffs[2 * m - 1], coeffs[2 * m]);
                let (sin_m, cos_m) = (m as f64 * phi).sin_cos();
                d_theta += row.dtheta[m] * inv_sqrt_pi * (zc * cos_m + zs * sin_m);
                d_phi_frame +=
                    row.values[m] / s * inv_sqrt_pi * m as f64 * (-zc * sin_m + zs * cos_m);
            }
            [amp * d_theta, amp * d_phi_frame, 0.0]
        }
        WaveTable::Hyperbolic { lambda, nodes, coeffs, amp } => {
            let (x, y) = match *p {
                Point::Disk { x, y } => (x, y),
                _ => unreachable!(),
            };
            let mut gx = 0.0;
            let mut gy = 0.0;
            for ((nc, ns), (a, b)) in nodes.iter().zip(coeffs) {
                let bu = busemann(x, y, *nc, *ns);
                let growth = (0.5 * bu).exp();
                let (si, co) = (lambda * bu).sin_cos();
                let re = growth * co;
                let im = growth * si;
                // d/dB of (a Re e + b Im e) where e = e^{(iλ+1/2)B}
                let weight = a * (0.5 * re - lambda * im) + b * (0.5 * im + lambda * re);
                let (bx, by) = busemann_grad(x, y, *nc, *ns);
                gx += weight * bx;
                gy += weight * by;
            }
            // conformal frame: e_k = ((1 − |z|²)/2) ∂_k
            let conf = (1.0 - (x * x + y * y)) / 2.0;
            [amp * conf * gx, amp * conf * gy, 0.0]
        }
    }
}

/// Deterministic covariance of the truncated hyperbolic sum at boundary
/// rotation ψ, between two disk points, for a unit-variance component.
fn truncated_hyperbolic_cov(
    measure: &SpectralMeasure,
    n: usize,
    psi: f64,
    p: &Point,
    q: &Point,
) -> f64 {
    let (px, py) = match *p {
        Point::Disk { x, y } => (x, y),
        _ => unreachable!(),
    };
    let (qx, qy) = match *q {
        Point::Disk { x, y } => (x, y),
        _ => unreachable!(),
    };
    let nodes = boundary_nodes(n, psi);
    let mut total = 0.0;
    for a in &measure.atoms {
        let lambda = a.param;
        let mut sum = 0.0;
        for (nc, ns) in &nodes {
            let bp = busemann(px, py, *nc, *ns);
            let bq = busemann(qx, qy, *nc, *ns);
            sum += (0.5 * (bp + bq)).exp() * (lambda * (bp - bq)).cos();
        }
        total += a.weight * sum / n as f64;
    }
    total
}

/// Worst probe-pair error of the truncated covariance against the analytic
/// spherical function, over diameters through the origin (pair distances up
/// to 2·r_max) and coincident points out to r_max, at two boundary
/// rotations.
pub fn hyperbolic_truncation_error(
    measure: &SpectralMeasure,
    r_max: f64,
    n_waves: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let psis = [0.0, std::f64::consts::PI / n_waves as f64];
    for i in 0..=32 {
        let d = 2.0 * r_max * i as f64 / 32.0;
        let half = ((d / 2.0) / 2.0).tanh();
        let p = Point::Disk { x: half, y: 0.0 };
        let q = Point::Disk { x: -half, y: 0.0 };
        let exact = mixture_covariance(measure, d)?;
        for &psi in &psis {
            let approx = truncated_hyperbolic_cov(measure, n_waves, psi, &p, &q);
            worst = worst.max((approx - exact).abs());
        }
    }
    for i in 0..=16 {
        let r = r_max * i as f64 / 16.0;
        let s = (r / 2.0).tanh();
        let p = Point::Disk { x: s, y: 0.0 };
        for &psi in &psis {
            let approx = truncated_hyperbolic_cov(measure, n_waves, psi, &p, &p);
            worst = worst.max((approx - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Smallest power-of-two wave count whose truncation error is within
/// [`HYPERBOLIC_CERT_TOL`].
pub fn hyperbolic_min_waves(measure: &SpectralMeasure, r_max: f64) -> Result<usize> {
    let mut n = 16;
    while n <= (1 << 16) {
        if hyperbolic_truncation_error(measure, r_max, n)? <= HYPERBOLIC_CERT_TOL {
            return Ok(n);
        }
        n *= 2;
    }
    Err(Error::numeric(format!(
        "no admissible wave count up to 2^16 for r_max {r_max}"
    )))
}

// Certification is deterministic in (spectrum, r_max, n_waves); cache the
// verdicts so repeated sampling of one spec pays for it once.
fn certify_hyperbolic(measure: &SpectralMeasure, r_max: f64, n_waves: usize) -> Result<()> {
    static CACHE: Mutex<Option<HashMap<(Vec<(u64, u64)>, u64, usize), bool>>> = Mutex::new(None);
    let key = (
        measure
            .atoms
            .iter()
            .map(|a| (a.param.to_bits(), a.weight.to_bits()))
            .collect::<Vec<_>>(),
        r_max.to_bits(),
        n_waves,
    );
    {
        let cache = CACHE.lock().unwrap();
        if let Some(map) = cache.as_ref() {
            if let Some(&ok) = map.get(&key) {
                return if ok {
                    Ok(())
                } else {
                    // recompute the advice only on the failure path
                    Err(insufficient_waves(measure, r_max, n_waves))
                };
            }
        }
    }
    let err = hyperbolic_truncation_error(measure, r_max, n_waves)?;
    let ok = err <= HYPERBOLIC_CERT_TOL;
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, ok);
    if ok {
        Ok(())
    } else {
        Err(insufficient_waves(measure, r_max, n_waves))
    }
}

fn insufficient_waves(measure: &SpectralMeasure, r_max: f64, n_waves: usize) -> Error {
    let min = hyperbolic_min_waves(measure, r_max).map(|m| m.max(n_waves + 1));
    Error::InsufficientWaves {
        reason: format!(
            "covariance self-check failed at n_waves = {n_waves} for r_max = {r_max}"
        ),
        min_n_waves: min.unwrap_or(usize::MAX),
    }
}

/// One entry of an empirical covariance table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovarianceProbe {
    pub distance: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// Unbiased estimate of the covariance Γ(d) of a unit-variance component
/// over `streams` independent replications, with CLT standard errors.
pub fn empirical_covariance(
    spec: &FieldSpec,
    base_seed: u64,
    streams: std::ops::Range<u64>,
    pairs: &[(Point, Point)],
) -> Result<Vec<CovarianceProbe>> {
    let reps = streams.end.saturating_sub(streams.start) as usize;
    if reps < 100 {
        return Err(Error::domain("empirical covariance needs at least 100 replications"));
    }
    let products: Vec<Vec<f64>> = streams
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&stream| {
            let r = sample(spec, SeedSpec::new(base_seed, stream))?;
            pairs
                .iter()
                .map(|(p, q)| Ok(r.eval_unit(0, p)? * r.eval_unit(0, q)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(pairs
        .iter()
        .enumerate()
        .map(|(k, (p, q))| {
            let vals: Vec<f64> = products.iter().map(|row| row[k]).collect();
            let mean = vals.iter().sum::<f64>() / reps as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (reps as f64 - 1.0);
            CovarianceProbe {
                distance: distance(spec.geometry, p, q).expect("validated points"),
                mean,
                std_error: (var / reps as f64).sqrt(),
            }
        })
        .collect())
}
