//! The supported homogeneous spaces and their metric geometry.
//!
//! Five spaces are provided: the line R¹, the plane R², the space R³, the
//! unit sphere S² and the hyperbolic disk H² (Poincaré model, curvature −1).
//! Each comes with intrinsic distances, unit-speed geodesics, exact area
//! elements and quadrilateral/hexahedral region grids. Everything here is a
//! pure function of immutable values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest geodesic radius accepted for hyperbolic regions and samplers.
/// Boundary-wave sums lose accuracy far from the origin, so the disk is
/// only used within this bound.
pub const MAX_HYPERBOLIC_RADIUS: f64 = 6.0;

/// Sign of the sectional curvature of a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curvature {
    Flat,
    Positive,
    Negative,
}

/// One of the supported homogeneous spaces, with its metric conventions.
///
/// The sphere has radius 1 (Laplace–Beltrami eigenvalues −ℓ(ℓ+1)) and the
/// hyperbolic disk has curvature −1, so its half-sum-of-roots constant is
/// ρ = 1/2 and eigenvalues read −(λ² + 1/4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Line1,
    Plane2,
    Space3,
    Sphere2,
    Hyperbolic2,
}

impl Geometry {
    /// Dimension of the space itself.
    pub fn dim_x(self) -> usize {
        match self {
            Geometry::Line1 => 1,
            Geometry::Plane2 | Geometry::Sphere2 | Geometry::Hyperbolic2 => 2,
            Geometry::Space3 => 3,
        }
    }

    pub fn curvature_sign(self) -> Curvature {
        match self {
            Geometry::Line1 | Geometry::Plane2 | Geometry::Space3 => Curvature::Flat,
            Geometry::Sphere2 => Curvature::Positive,
            Geometry::Hyperbolic2 => Curvature::Negative,
        }
    }

    /// Half-sum-of-positive-roots constant: 1/2 on the hyperbolic disk,
    /// 0 in the flat and sphere conventions used here.
    pub fn rho(self) -> f64 {
        match self {
            Geometry::Hyperbolic2 => 0.5,
            _ => 0.0,
        }
    }

    pub fn is_flat(self) -> bool {
        self.curvature_sign() == Curvature::Flat
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Line1 => "line1",
            Geometry::Plane2 => "plane2",
            Geometry::Space3 => "space3",
            Geometry::Sphere2 => "sphere2",
            Geometry::Hyperbolic2 => "hyperbolic2",
        }
    }
}

/// A point of one of the five spaces, in its fixed chart.
///
/// Flat spaces use Cartesian coordinates, the sphere uses
/// (colatitude θ ∈ [0,π], longitude φ ∈ [0,2π)) and the hyperbolic disk uses
/// the complex disk coordinate z = x + iy with |z| < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    X1(f64),
    X2(f64, f64),
    X3(f64, f64, f64),
    Sphere { theta: f64, phi: f64 },
    Disk { x: f64, y: f64 },
}

impl Point {
    /// Normalizes a longitude into [0, 2π).
    pub fn sphere(theta: f64, phi: f64) -> Point {
        Point::Sphere {
            theta,
            phi: wrap_angle(phi),
        }
    }

    pub fn origin(geometry: Geometry) -> Point {
        match geometry {
            Geometry::Line1 => Point::X1(0.0),
            Geometry::Plane2 => Point::X2(0.0, 0.0),
            Geometry::Space3 => Point::X3(0.0, 0.0, 0.0),
            Geometry::Sphere2 => Point::Sphere { theta: 0.0, phi: 0.0 },
            Geometry::Hyperbolic2 => Point::Disk { x: 0.0, y: 0.0 },
        }
    }

    /// Checks that the point is finite and lies in the chart domain of `g`.
    pub fn validate(&self, g: Geometry) -> Result<()> {
        let ok = match (g, self) {
            (Geometry::Line1, Point::X1(x)) => x.is_finite(),
            (Geometry::Plane2, Point::X2(x, y)) => x.is_finite() && y.is_finite(),
            (Geometry::Space3, Point::X3(x, y, z)) => {
                x.is_finite() && y.is_finite() && z.is_finite()
            }
            (Geometry::Sphere2, Point::Sphere { theta, phi }) => {
                theta.is_finite()
                    && phi.is_finite()
                    && (-1e-12..=std::f64::consts::PI + 1e-12).contains(theta)
            }
            (Geometry::Hyperbolic2, Point::Disk { x, y }) => {
                x.is_finite() && y.is_finite() && x * x + y * y < 1.0
            }
            _ => {
                return Err(Error::domain(format!(
                    "point {self:?} does not belong to the {} chart",
                    g.name()
                )))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "coordinates of {self:?} outside the {} chart domain",
                g.name()
            )))
        }
    }

    /// Chart coordinates as a slice-compatible array (length = chart dim).
    pub fn coords(&self) -> ([f64; 3], usize) {
        match *self {
            Point::X1(x) => ([x, 0.0, 0.0], 1),
            Point::X2(x, y) => ([x, y, 0.0], 2),
            Point::X3(x, y, z) => ([x, y, z], 3),
            Point::Sphere { theta, phi } => ([theta, phi, 0.0], 2),
            Point::Disk { x, y } => ([x, y, 0.0], 2),
        }
    }

    /// Rebuilds a point of geometry `g` from chart coordinates.
    pub fn from_chart(g: Geometry, c: &[f64]) -> Point {
        match g {
            Geometry::Line1 => Point::X1(c[0]),
            Geometry::Plane2 => Point::X2(c[0], c[1]),
            Geometry::Space3 => Point::X3(c[0], c[1], c[2]),
            Geometry::Sphere2 => Point::sphere(c[0].clamp(0.0, std::f64::consts::PI), c[1]),
            Geometry::Hyperbolic2 => Point::Disk { x: c[0], y: c[1] },
        }
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut p = phi % two_pi;
    if p < 0.0 {
        p += two_pi;
    }
    p
}

/// Unit vector in R³ for a sphere point.
fn sphere_embed(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    [st * cp, st * sp, ct]
}

/// Intrinsic distance between two points of `g`.
///
/// The sphere uses the great-circle distance; the hyperbolic disk uses
/// d = arccosh(1 + 2|z−w|² / ((1−|z|²)(1−|w|²))).
pub fn distance(g: Geometry, p: &Point, q: &Point) -> Result<f64> {
    p.validate(g)?;
    q.validate(g)?;
    Ok(match (p, q) {
        (Point::X1(a), Point::X1(b)) => (a - b).abs(),
        (Point::X2(ax, ay), Point::X2(bx, by)) => (ax - bx).hypot(ay - by),
        (Point::X3(ax, ay, az), Point::X3(bx, by, bz)) => {
            let (dx, dy, dz) = (ax - bx, ay - by, az - bz);
            (dx * dx + dy * dy + dz * dz).sqrt()
        }
        (Point::Sphere { theta: t1, phi: p1 }, Point::Sphere { theta: t2, phi: p2 }) => {
            let a = sphere_embed(*t1, *p1);
            let b = sphere_embed(*t2, *p2);
            let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let cross = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            cn.atan2(dot)
        }
        (Point::Disk { x: ax, y: ay }, Point::Disk { x: bx, y: by }) => {
            let d2 = (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
            let pa = 1.0 - (ax * ax + ay * ay);
            let pb = 1.0 - (bx * bx + by * by);
            let arg = 1.0 + 2.0 * d2 / (pa * pb);
            arg.max(1.0).acosh()
        }
        _ => unreachable!("validated points match the geometry chart"),
    })
}

/// A geodesic segment: base point, unit tangent direction expressed in the
/// orthonormal frame of the chart at the base, and intrinsic length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub base: Point,
    pub direction: Vec<f64>,
    pub length: f64,
}

impl GeodesicSegment {
    pub fn new(g: Geometry, base: Point, direction: Vec<f64>, length: f64) -> Result<Self> {
        base.validate(g)?;
        if direction.len() != g.dim_x() {
            return Err(Error::domain(format!(
                "direction must have {} components for {}",
                g.dim_x(),
                g.name()
            )));
        }
        let norm2: f64 = direction.iter().map(|d| d * d).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::domain("direction must be a unit frame vector"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain("segment length must be positive"));
        }
        Ok(GeodesicSegment { base, direction, length })
    }
}

/// Point at arc length `t` along the segment, t ∈ [0, length].
///
/// Orthonormal frames used for directions: flat spaces use the Cartesian
/// frame; the sphere uses (e_θ, e_φ) with e_φ = (1/sin θ)∂_φ (along the
/// φ = 0 meridian at the poles); the disk uses the conformal frame
/// ((1−|z|²)/2)·(∂_x, ∂_y).
pub fn geodesic_point(g: Geometry, seg: &GeodesicSegment, t: f64) -> Result<Point> {
    seg.base.validate(g)?;
    if !(t >= -1e-12 && t <= seg.length + 1e-9) {
        return Err(Error::domain(format!(
            "arc length {t} outside [0, {}]",
            seg.length
        )));
    }
    let d = &seg.direction;
    Ok(match seg.base {
        Point::X1(x) => Point::X1(x + t * d[0]),
        Point::X2(x, y) => Point::X2(x + t * d[0], y + t * d[1]),
        Point::X3(x, y, z) => Point::X3(x + t * d[0], y + t * d[1], z + t * d[2]),
        Point::Sphere { theta, phi } => {
            let p = sphere_embed(theta, phi);
            let (st, ct) = (theta.sin(), theta.cos());
            let (sp, cp) = (phi.sin(), phi.cos());
            let e_theta = [ct * cp, ct * sp, -st];
            let e_phi = [-sp, cp, 0.0];
            let v = [
                d[0] * e_theta[0] + d[1] * e_phi[0],
                d[0] * e_theta[1] + d[1] * e_phi[1],
                d[0] * e_theta[2] + d[1] * e_phi[2],
            ];
            let (c, s) = (t.cos(), t.sin());
            let q = [
                c * p[0] + s * v[0],
                c * p[1] + s * v[1],
                c * p[2] + s * v[2],
            ];
            let theta_new = q[2].clamp(-1.0, 1.0).acos();
            let phi_new = q[1].atan2(q[0]);
            Point::sphere(theta_new, phi_new)
        }
        Point::Disk { x, y } => {
            // Transport the base to the origin by a Möbius map; the frame
            // direction becomes the Euclidean direction there, geodesics
            // through the origin are straight with w(t) = tanh(t/2)·u.
            let (zx, zy) = (x, y);
            let r = (t / 2.0).tanh();
            let (wx, wy) = (r * d[0], r * d[1]);
            // z(t) = (w + z) / (1 + conj(z) w), complex arithmetic inlined.
            let (nx, ny) = (wx + zx, wy + zy);
            let (dx, dy) = (1.0 + zx * wx + zy * wy, zx * wy - zy * wx);
            let den = dx * dx + dy * dy;
            Point::Disk {
                x: (nx * dx + ny * dy) / den,
                y: (ny * dx - nx * dy) / den,
            }
        }
    })
}

/// A region of one of the spaces: coordinate boxes on flat spaces, a
/// colatitude/longitude box on the sphere, a centered geodesic ball on the
/// hyperbolic disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Box2 { x: [f64; 2], y: [f64; 2] },
    Box3 { x: [f64; 2], y: [f64; 2], z: [f64; 2] },
    SphereBox { theta: [f64; 2], phi: [f64; 2] },
    DiskBall { radius: f64 },
}

impl Region {
    pub fn full_sphere() -> Region {
        Region::SphereBox {
            theta: [0.0, std::f64::consts::PI],
            phi: [0.0, 2.0 * std::f64::consts::PI],
        }
    }

    /// Centered square of the given side on the plane.
    pub fn centered_square(side: f64) -> Region {
        let h = side / 2.0;
        Region::Box2 { x: [-h, h], y: [-h, h] }
    }

    /// Centered cube of the given side in R³.
    pub fn centered_cube(side: f64) -> Region {
        let h = side / 2.0;
        Region::Box3 { x: [-h, h], y: [-h, h], z: [-h, h] }
    }

    pub fn geometry_matches(&self, g: Geometry) -> bool {
        matches!(
            (self, g),
            (Region::Box2 { .. }, Geometry::Plane2)
                | (Region::Box3 { .. }, Geometry::Space3)
                | (Region::SphereBox { .. }, Geometry::Sphere2)
                | (Region::DiskBall { .. }, Geometry::Hyperbolic2)
        )
    }

    fn validate(&self, g: Geometry) -> Result<()> {
        if !self.geometry_matches(g) {
            return Err(Error::domain(format!(
                "region {self:?} does not match geometry {}",
                g.name()
            )));
        }
        let ordered = |[a, b]: &[f64; 2]| b > a;
        match self {
            Region::Box2 { x, y } => {
                if !(ordered(x) && ordered(y)) {
                    return Err(Error::domain("box bounds must be increasing"));
                }
            }
            Region::Box3 { x, y, z } => {
                if !(ordered(x) && ordered(y) && ordered(z)) {
                    return Err(Error::domain("box bounds must be increasing"));
                }
            }
            Region::SphereBox { theta, phi } => {
                if !(ordered(theta) && ordered(phi)) {
                    return Err(Error::domain("sphere box bounds must be increasing"));
                }
                if theta[0] < -1e-12
                    || theta[1] > std::f64::consts::PI + 1e-12
                    || phi[1] - phi[0] > 2.0 * std::f64::consts::PI + 1e-12
                {
                    return Err(Error::domain("sphere box outside chart bounds"));
                }
            }
            Region::DiskBall { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::domain("ball radius must be positive"));
                }
                if *radius > MAX_HYPERBOLIC_RADIUS {
                    return Err(Error::domain(format!(
                        "hyperbolic radius {radius} beyond the validity bound {MAX_HYPERBOLIC_RADIUS}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Closed-form volume (area/length) of a region in the invariant metric.
pub fn region_volume(g: Geometry, region: &Region) -> Result<f64> {
    region.validate(g)?;
    Ok(match region {
        Region::Box2 { x, y } => (x[1] - x[0]) * (y[1] - y[0]),
        Region::Box3 { x, y, z } => (x[1] - x[0]) * (y[1] - y[0]) * (z[1] - z[0]),
        Region::SphereBox { theta, phi } => (phi[1] - phi[0]) * (theta[0].cos() - theta[1].cos()),
        Region::DiskBall { radius } => 2.0 * std::f64::consts::PI * (radius.cosh() - 1.0),
    })
}

/// A structured grid over a region: a tensor-product lattice in chart
/// coordinates with quadrilateral (2-D) or hexahedral (3-D) cells and exact
/// per-cell area/volume weights.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub geometry: Geometry,
    pub region: Region,
    pub resolution: f64,
    /// Lattice coordinates per chart axis. For the sphere these are (θ, φ);
    /// for the disk they are geodesic polar coordinates (r, α).
    pub axes: Vec<Vec<f64>>,
    /// Whether the last axis is periodic (full-longitude sphere boxes and
    /// disk balls): the last node column wraps onto column 0.
    pub wrap_last: bool,
    /// Exact integral of the area/volume element over each cell, row-major.
    pub cell_weights: Vec<f64>,
}

impl RegionGrid {
    /// Number of nodes along each axis.
    pub fn node_counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    /// Number of cells along each axis.
    pub fn cell_counts(&self) -> Vec<usize> {
        let n = self.axes.len();
        self.axes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i == n - 1 && self.wrap_last {
                    a.len()
                } else {
                    a.len() - 1
                }
            })
            .collect()
    }

    pub fn n_nodes(&self) -> usize {
        self.node_counts().iter().product()
    }

    pub fn n_cells(&self) -> usize {
        self.cell_counts().iter().product()
    }

    /// Row-major node index.
    pub fn node_index(&self, idx: &[usize]) -> usize {
        let counts = self.node_counts();
        let mut flat = 0;
        for (i, &k) in idx.iter().enumerate() {
            flat = flat * counts[i] + k;
        }
        flat
    }

    /// Chart coordinates of a node.
    pub fn node_chart(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(axis, &k)| self.axes[axis][k])
            .collect()
    }

    /// The point of the underlying space at given chart coordinates.
    /// Disk grids use geodesic polar chart coordinates (r, α).
    pub fn point_at(&self, chart: &[f64]) -> Point {
        match self.geometry {
            Geometry::Hyperbolic2 => {
                let rad = (chart[0] / 2.0).tanh();
                Point::Disk {
                    x: rad * chart[1].cos(),
                    y: rad * chart[1].sin(),
                }
            }
            g => Point::from_chart(g, chart),
        }
    }

    pub fn node_point(&self, idx: &[usize]) -> Point {
        self.point_at(&self.node_chart(idx))
    }

    /// All points of the grid in row-major node order.
    pub fn node_points(&self) -> Vec<Point> {
        let counts = self.node_counts();
        let mut points = Vec::with_capacity(self.n_nodes());
        match counts.len() {
            2 => {
                for i in 0..counts[0] {
                    for j in 0..counts[1] {
                        points.push(self.node_point(&[i, j]));
                    }
                }
            }
            3 => {
                for i in 0..counts[0] {
                    for j in 0..counts[1] {
                        for k in 0..counts[2] {
                            points.push(self.node_point(&[i, j, k]));
                        }
                    }
                }
            }
            _ => unreachable!("grids are 2-D or 3-D"),
        }
        points
    }

    /// Node indices of the corners of a cell, in marching order for 2-D
    /// ((i,j), (i,j+1), (i+1,j+1), (i+1,j)) and lexicographic pairs for 3-D.
    pub fn cell_corner_nodes(&self, cell: &[usize]) -> Vec<usize> {
        let counts = self.node_counts();
        let n = counts.len();
        let next = |axis: usize, k: usize| -> usize {
            if axis == n - 1 && self.wrap_last {
                (k + 1) % counts[axis]
            } else {
                k + 1
            }
        };
        match cell {
            [i, j] => {
                let (i, j) = (*i, *j);
                vec![
                    self.node_index(&[i, j]),
                    self.node_index(&[i, next(1, j)]),
                    self.node_index(&[i + 1, next(1, j)]),
                    self.node_index(&[i + 1, j]),
                ]
            }
            [i, j, k] => {
                let (i, j, k) = (*i, *j, *k);
                let mut out = Vec::with_capacity(8);
                for di in 0..2usize {
                    for dj in 0..2usize {
                        for dk in 0..2usize {
                            let jj = if dj == 1 { j + 1 } else { j };
                            let kk = if dk == 1 { next(2, k) } else { k };
                            out.push(self.node_index(&[i + di, jj, kk]));
                        }
                    }
                }
                out
            }
            _ => unreachable!("grids are 2-D or 3-D"),
        }
    }

    /// Chart coordinates of the lower corner and of the extent of a cell.
    pub fn cell_bounds(&self, cell: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let n = self.axes.len();
        let mut lo = Vec::with_capacity(n);
        let mut ext = Vec::with_capacity(n);
        for (axis, &c) in cell.iter().enumerate() {
            let a = &self.axes[axis];
            let low = a[c];
            let high = if axis == n - 1 && self.wrap_last && c + 1 == a.len() {
                // wrapped interval closes the period
                a[0] + self.axis_period(axis)
            } else {
                a[c + 1]
            };
            lo.push(low);
            ext.push(high - low);
        }
        (lo, ext)
    }

    fn axis_period(&self, _axis: usize) -> f64 {
        2.0 * std::f64::consts::PI
    }

    pub fn total_weight(&self) -> f64 {
        self.cell_weights.iter().sum()
    }

    /// Same region gridded at half the node spacing.
    pub fn refine(&self) -> RegionGrid {
        grid_region(self.geometry, &self.region, self.resolution / 2.0)
            .expect("refining a valid grid cannot fail")
    }
}

fn linspace(a: f64, b: f64, cells: usize) -> Vec<f64> {
    let n = cells.max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Builds a structured grid with node spacing at most `resolution` in the
/// intrinsic metric; cell weights integrate the exact area element
/// (sin θ dθ dφ on S², the polar hyperbolic element sinh r dr dα on H²).
pub fn grid_region(g: Geometry, region: &Region, resolution: f64) -> Result<RegionGrid> {
    region.validate(g)?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::domain("resolution must be positive"));
    }
    let cells_for = |extent: f64| ((extent / resolution).ceil() as usize).max(1);

    let (axes, wrap_last): (Vec<Vec<f64>>, bool) = match region {
        Region::Box2 { x, y } => (
            vec![
                linspace(x[0], x[1], cells_for(x[1] - x[0])),
                linspace(y[0], y[1], cells_for(y[1] - y[0])),
            ],
            false,
        ),
        Region::Box3 { x, y, z } => (
            vec![
                linspace(x[0], x[1], cells_for(x[1] - x[0])),
                linspace(y[0], y[1], cells_for(y[1] - y[0])),
                linspace(z[0], z[1], cells_for(z[1] - z[0])),
            ],
            false,
        ),
        Region::SphereBox { theta, phi } => {
            let span = phi[1] - phi[0];
            let full_turn = (span - 2.0 * std::f64::consts::PI).abs() < 1e-12;
            // Longitude spacing is measured at the widest colatitude.
            let max_sin = if theta[0] <= std::f64::consts::FRAC_PI_2
                && theta[1] >= std::f64::consts::FRAC_PI_2
            {
                1.0
            } else {
                theta[0].sin().max(theta[1].sin())
            };
            let n_phi = cells_for(span * max_sin).max(4);
            let phis = if full_turn {
                (0..n_phi)
                    .map(|j| phi[0] + span * j as f64 / n_phi as f64)
                    .collect()
            } else {
                linspace(phi[0], phi[1], n_phi)
            };
            (
                vec![linspace(theta[0], theta[1], cells_for(theta[1] - theta[0])), phis],
                full_turn,
            )
        }
        Region::DiskBall { radius } => {
            let n_r = cells_for(*radius);
            let n_alpha = cells_for(2.0 * std::f64::consts::PI * radius.sinh()).max(4);
            let alphas = (0..n_alpha)
                .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_alpha as f64)
                .collect();
            (vec![linspace(0.0, *radius, n_r), alphas], true)
        }
    };

    let mut grid = RegionGrid {
        geometry: g,
        region: region.clone(),
        resolution,
        axes,
        wrap_last,
        cell_weights: Vec::new(),
    };
    grid.cell_weights = cell_weights(&grid);
    Ok(grid)
}

fn cell_weights(grid: &RegionGrid) -> Vec<f64> {
    let cells = grid.cell_counts();
    let mut weights = Vec::with_capacity(grid.n_cells());
    match grid.region {
        Region::Box2 { .. } | Region::Box3 { .. } => {
            let spans: Vec<Vec<f64>> = grid
                .axes
                .iter()
                .map(|a| a.windows(2).map(|w| w[1] - w[0]).collect())
                .collect();
            if cells.len() == 2 {
                for dx in &spans[0] {
                    for dy in &spans[1] {
                        weights.push(dx * dy);
                    }
                }
            } else {
                for dx in &spans[0] {
                    for dy in &spans[1] {
                        for dz in &spans[2] {
                            weights.push(dx * dy * dz);
                        }
                    }
                }
            }
        }
        Region::SphereBox { .. } => {
            let thetas = &grid.axes[0];
            let phis = &grid.axes[1];
            for i in 0..cells[0] {
                let band = thetas[i].cos() - thetas[i + 1].cos();
                for j in 0..cells[1] {
                    let dphi = if grid.wrap_last {
                        let span = 2.0 * std::f64::consts::PI;
                        span / cells[1] as f64
                    } else {
                        phis[j + 1] - phis[j]
                    };
                    weights.push(band * dphi);
                }
            }
        }
        Region::DiskBall { .. } => {
            let rs = &grid.axes[0];
            let dalpha = 2.0 * std::f64::consts::PI / cells[1] as f64;
            for i in 0..cells[0] {
                let band = rs[i + 1].cosh() - rs[i].cosh();
                for _ in 0..cells[1] {
                    weights.push(band * dalpha);
                }
            }
        }
    }
    weights
}
