//! Spectral parameters, Laplace–Beltrami eigenvalues and the elementary
//! spherical functions that serve as monochromatic covariance functions,
//! plus finitely supported spectral mixtures.
//!
//! The monochromatic covariances as functions of intrinsic distance r are
//! cos(κr) on the line, J₀(κr) on the plane, sin(κr)/(κr) in 3-space,
//! P_ℓ(cos r) on the sphere and φ_λ(r) on the hyperbolic disk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Geometry, Point};
use crate::specfun;

/// Spectral parameter of a monochromatic field: a wavenumber κ > 0 on flat
/// spaces, a degree ℓ on the sphere, a rate λ ≥ 0 on the hyperbolic disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub geometry: Geometry,
    pub param: f64,
}

impl SpectralPoint {
    pub fn new(geometry: Geometry, param: f64) -> Result<Self> {
        let sp = SpectralPoint { geometry, param };
        sp.validate()?;
        Ok(sp)
    }

    pub fn flat(geometry: Geometry, kappa: f64) -> Result<Self> {
        if !geometry.is_flat() {
            return Err(Error::domain("wavenumber parameters require a flat geometry"));
        }
        Self::new(geometry, kappa)
    }

    pub fn sphere_degree(ell: u32) -> Self {
        SpectralPoint { geometry: Geometry::Sphere2, param: ell as f64 }
    }

    pub fn hyperbolic(lambda: f64) -> Result<Self> {
        Self::new(Geometry::Hyperbolic2, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.geometry {
            Geometry::Line1 | Geometry::Plane2 | Geometry::Space3 => {
                self.param > 0.0 && self.param.is_finite()
            }
            Geometry::Sphere2 => self.param >= 0.0 && self.param.fract() == 0.0,
            Geometry::Hyperbolic2 => self.param >= 0.0 && self.param.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid spectral parameter {} for {}",
                self.param,
                self.geometry.name()
            )))
        }
    }

    pub fn degree(&self) -> u32 {
        debug_assert_eq!(self.geometry, Geometry::Sphere2);
        self.param as u32
    }
}

/// Laplace–Beltrami eigenvalue K ≤ 0 of the eigenspace a monochromatic
/// field lives in: −κ² (flat), −ℓ(ℓ+1) (sphere), −(λ² + 1/4) (disk).
pub fn eigenvalue(sp: &SpectralPoint) -> f64 {
    match sp.geometry {
        Geometry::Line1 | Geometry::Plane2 | Geometry::Space3 => -sp.param * sp.param,
        Geometry::Sphere2 => -sp.param * (sp.param + 1.0),
        Geometry::Hyperbolic2 => {
            let rho = sp.geometry.rho();
            -(sp.param * sp.param + rho * rho)
        }
    }
}

/// Monochromatic covariance at intrinsic distance r ≥ 0. Always lies in
/// [−1, 1] and equals 1 at r = 0.
pub fn covariance(sp: &SpectralPoint, r: f64) -> Result<f64> {
    sp.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain("covariance requires r ≥ 0"));
    }
    Ok(match sp.geometry {
        Geometry::Line1 => (sp.param * r).cos(),
        Geometry::Plane2 => specfun::bessel_j0(sp.param * r),
        Geometry::Space3 => {
            let x = sp.param * r;
            if x.abs() < 1e-8 {
                1.0 - x * x / 6.0
            } else {
                x.sin() / x
            }
        }
        Geometry::Sphere2 => specfun::legendre_p(sp.degree(), r.cos()),
        Geometry::Hyperbolic2 => specfun::hyperbolic_phi(sp.param, r)?,
    })
}

/// A discrete probability measure on spectral parameters. All atoms share
/// one geometry and the weights sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub geometry: Geometry,
    pub atoms: Vec<SpectralAtom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtom {
    pub param: f64,
    pub weight: f64,
}

impl SpectralMeasure {
    pub fn new(geometry: Geometry, atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = SpectralMeasure {
            geometry,
            atoms: atoms
                .into_iter()
                .map(|(param, weight)| SpectralAtom { param, weight })
                .collect(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Single-atom measure.
    pub fn mono(sp: SpectralPoint) -> Self {
        SpectralMeasure {
            geometry: sp.geometry,
            atoms: vec![SpectralAtom { param: sp.param, weight: 1.0 }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::domain("spectral measure needs at least one atom"));
        }
        let mut total = 0.0;
        for a in &self.atoms {
            SpectralPoint { geometry: self.geometry, param: a.param }.validate()?;
            if !(a.weight > 0.0) {
                return Err(Error::domain("atom weights must be positive"));
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "atom weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = (SpectralPoint, f64)> + '_ {
        self.atoms.iter().map(move |a| {
            (
                SpectralPoint { geometry: self.geometry, param: a.param },
                a.weight,
            )
        })
    }
}

/// Mixture covariance Γ(r) = Σ_i w_i φ_{λ_i}(r).
pub fn mixture_covariance(m: &SpectralMeasure, r: f64) -> Result<f64> {
    let mut total = 0.0;
    for (sp, w) in m.points() {
        total += w * covariance(&sp, r)?;
    }
    Ok(total)
}

/// The covariance function of a standard invariant field with the given
/// spectrum, as a function of intrinsic distance. Γ(0) = 1.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    pub measure: SpectralMeasure,
}

impl CovarianceModel {
    pub fn new(measure: SpectralMeasure) -> Result<Self> {
        measure.validate()?;
        Ok(CovarianceModel { measure })
    }

    pub fn geometry(&self) -> Geometry {
        self.measure.geometry
    }

    pub fn gamma(&self, r: f64) -> Result<f64> {
        mixture_covariance(&self.measure, r)
    }
}

/// Covariance matrix Γ(d(p_i, p_j)) over a finite point set, row-major.
/// Positive semidefinite by construction (up to rounding).
pub fn covariance_matrix(m: &SpectralMeasure, points: &[Point]) -> Result<Vec<Vec<f64>>> {
    if points.len() > 1000 {
        return Err(Error::domain("covariance matrices limited to 10^3 points"));
    }
    let g = m.geometry;
    let n = points.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = mixture_covariance(m, distance(g, &points[i], &points[j])?)?;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}
