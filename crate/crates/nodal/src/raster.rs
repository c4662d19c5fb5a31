//! Grid dumps of sampled fields: CSV tables of node coordinates and
//! values, and 8-bit rasters (binary PGM P5, optionally PNG) with values
//! clipped to ±3√β and mapped linearly onto [0, 255].

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point, Region};
use crate::sampler::Realization;

/// An 8-bit grayscale image.
#[derive(Debug, Clone)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    /// Binary PGM (P5) bytes; the comment line carries the config echo.
    pub fn pgm_bytes(&self, comment: &str) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() + 128);
        out.extend_from_slice(b"P5\n");
        for line in comment.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        out.extend_from_slice(format!("{} {}\n255\n", self.width, self.height).as_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write_png(&self, path: &std::path::Path) -> Result<()> {
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.pixels.clone())
            .ok_or_else(|| Error::numeric("raster buffer size mismatch"))?;
        img.save(path).map_err(|e| Error::config(format!("png write failed: {e}")))?;
        Ok(())
    }
}

fn to_pixel(v: f64, scale: f64) -> u8 {
    let clipped = v.clamp(-scale, scale);
    ((clipped + scale) / (2.0 * scale) * 255.0).round() as u8
}

/// Renders one component over the natural raster domain of the geometry:
/// a coordinate box on the plane, the full θ×φ rectangle on the sphere,
/// the bounding square of the validity disk on the hyperbolic plane
/// (pixels outside the disk stay mid-gray).
pub fn raster_field(
    r: &Realization,
    component: usize,
    width: usize,
    region: Option<&Region>,
) -> Result<Raster> {
    if component >= r.spec.dim_v {
        return Err(Error::domain("component index out of range"));
    }
    let scale = 3.0 * r.spec.component_scales[component].sqrt();
    match r.spec.geometry {
        Geometry::Plane2 => {
            let (x, y) = match region {
                Some(Region::Box2 { x, y }) => (*x, *y),
                None => ([-2.0, 2.0], [-2.0, 2.0]),
                _ => return Err(Error::domain("plane rasters need a box region")),
            };
            let height = ((y[1] - y[0]) / (x[1] - x[0]) * width as f64).round() as usize;
            let height = height.max(1);
            let mut pixels = Vec::with_capacity(width * height);
            for row in 0..height {
                // image rows go top-down
                let py = y[1] - (y[1] - y[0]) * (row as f64 + 0.5) / height as f64;
                for col in 0..width {
                    let px = x[0] + (x[1] - x[0]) * (col as f64 + 0.5) / width as f64;
                    let v = r.eval(component, &Point::X2(px, py))?;
                    pixels.push(to_pixel(v, scale));
                }
            }
            Ok(Raster { width, height, pixels })
        }
        Geometry::Sphere2 => {
            let height = (width / 2).max(1);
            let mut pixels = Vec::with_capacity(width * height);
            for row in 0..height {
                let theta = std::f64::consts::PI * (row as f64 + 0.5) / height as f64;
                for col in 0..width {
                    let phi = 2.0 * std::f64::consts::PI * (col as f64 + 0.5) / width as f64;
                    let v = r.eval(component, &Point::sphere(theta, phi))?;
                    pixels.push(to_pixel(v, scale));
                }
            }
            Ok(Raster { width, height, pixels })
        }
        Geometry::Hyperbolic2 => {
            let r_max = r.spec.r_max.expect("validated hyperbolic spec");
            let s = (r_max / 2.0).tanh();
            let mut pixels = Vec::with_capacity(width * width);
            for row in 0..width {
                let py = s - 2.0 * s * (row as f64 + 0.5) / width as f64;
                for col in 0..width {
                    let px = -s + 2.0 * s * (col as f64 + 0.5) / width as f64;
                    if px * px + py * py >= s * s {
                        pixels.push(127);
                    } else {
                        let v = r.eval(component, &Point::Disk { x: px, y: py })?;
                        pixels.push(to_pixel(v, scale));
                    }
                }
            }
            Ok(Raster { width, height: width, pixels })
        }
        g => Err(Error::domain(format!("no raster domain for {}", g.name()))),
    }
}

fn chart_header(g: Geometry) -> &'static str {
    match g {
        Geometry::Line1 => "x",
        Geometry::Plane2 | Geometry::Hyperbolic2 => "x,y",
        Geometry::Space3 => "x,y,z",
        Geometry::Sphere2 => "theta,phi",
    }
}

/// CSV dump (RFC-4180, CRLF, header row) of all components on a lattice of
/// `n` samples per axis over the same domains as [`raster_field`]
/// (a 1-D/3-D coordinate box for the line and space).
pub fn field_csv(r: &Realization, n: usize, region: Option<&Region>) -> Result<String> {
    let g = r.spec.geometry;
    let mut out = String::from(chart_header(g));
    for c in 0..r.spec.dim_v {
        out.push_str(&format!(",phi_{c}"));
    }
    out.push_str("\r\n");
    let emit = |p: &Point, out: &mut String| -> Result<()> {
        let (coords, dim) = p.coords();
        let row: Vec<String> = coords[..dim]
            .iter()
            .map(|v| format!("{v}"))
            .chain((0..r.spec.dim_v).map(|c| format!("{}", r.eval(c, p).unwrap())))
            .collect();
        out.push_str(&row.join(","));
        out.push_str("\r\n");
        Ok(())
    };
    match g {
        Geometry::Line1 => {
            for i in 0..n {
                let x = -2.0 + 4.0 * i as f64 / (n - 1).max(1) as f64;
                emit(&Point::X1(x), &mut out)?;
            }
        }
        Geometry::Plane2 => {
            let (xb, yb) = match region {
                Some(Region::Box2 { x, y }) => (*x, *y),
                _ => ([-2.0, 2.0], [-2.0, 2.0]),
            };
            for i in 0..n {
                let x = xb[0] + (xb[1] - xb[0]) * i as f64 / (n - 1).max(1) as f64;
                for j in 0..n {
                    let y = yb[0] + (yb[1] - yb[0]) * j as f64 / (n - 1).max(1) as f64;
                    emit(&Point::X2(x, y), &mut out)?;
                }
            }
        }
        Geometry::Space3 => {
            for i in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1).max(1) as f64;
                for j in 0..n {
                    let y = -1.0 + 2.0 * j as f64 / (n - 1).max(1) as f64;
                    for k in 0..n {
                        let z = -1.0 + 2.0 * k as f64 / (n - 1).max(1) as f64;
                        emit(&Point::X3(x, y, z), &mut out)?;
                    }
                }
            }
        }
        Geometry::Sphere2 => {
            for i in 0..n {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                for j in 0..2 * n {
                    let phi = std::f64::consts::PI * j as f64 / n as f64;
                    emit(&Point::sphere(theta, phi), &mut out)?;
                }
            }
        }
        Geometry::Hyperbolic2 => {
            let r_max = r.spec.r_max.expect("validated hyperbolic spec");
            let s = (r_max / 2.0).tanh();
            for i in 0..n {
                let x = -s + 2.0 * s * (i as f64 + 0.5) / n as f64;
                for j in 0..n {
                    let y = -s + 2.0 * s * (j as f64 + 0.5) / n as f64;
                    if x * x + y * y < s * s {
                        emit(&Point::Disk { x, y }, &mut out)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample, FieldSpec, SeedSpec};
    use crate::spectra::{SpectralMeasure, SpectralPoint};

    #[test]
    fn pgm_has_valid_header_and_range() {
        let spec = FieldSpec::new(
            Geometry::Plane2,
            SpectralMeasure::mono(
                SpectralPoint::flat(Geometry::Plane2, 2.0 * std::f64::consts::PI).unwrap(),
            ),
            1,
        )
        .unwrap();
        let r = sample(&spec, SeedSpec::new(1, 0)).unwrap();
        let region = Region::Box2 { x: [-2.0, 2.0], y: [-1.5, 1.5] };
        let raster = raster_field(&r, 0, 64, Some(&region)).unwrap();
        assert_eq!((raster.width, raster.height), (64, 48));
        let bytes = raster.pgm_bytes("test");
        assert!(bytes.starts_with(b"P5\n# test\n64 48\n255\n"));
        assert_eq!(bytes.len() - b"P5\n# test\n64 48\n255\n".len(), 64 * 48);
    }

    #[test]
    fn degree_zero_sphere_raster_is_constant_gray() {
        let spec = FieldSpec::new(
            Geometry::Sphere2,
            SpectralMeasure::mono(SpectralPoint::sphere_degree(0)),
            1,
        )
        .unwrap();
        let r = sample(&spec, SeedSpec::new(3, 0)).unwrap();
        let raster = raster_field(&r, 0, 32, None).unwrap();
        let first = raster.pixels[0];
        assert!(raster.pixels.iter().all(|&p| p == first));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let spec = FieldSpec::new(
            Geometry::Sphere2,
            SpectralMeasure::mono(SpectralPoint::sphere_degree(3)),
            2,
        )
        .unwrap();
        let r = sample(&spec, SeedSpec::new(5, 0)).unwrap();
        let csv = field_csv(&r, 8, None).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "theta,phi,phi_0,phi_1");
        assert_eq!(csv.lines().count(), 1 + 8 * 16);
    }
}
