//! Scalar special functions used by the spectral layer and the samplers:
//! Bessel J₀/J₁, Legendre polynomials, normalized associated Legendre
//! functions with θ-derivatives, and the hyperbolic spherical function
//! computed by quadrature of Helgason waves over the boundary circle.

use crate::error::{Error, Result};

/// Bessel function of the first kind, order 0.
///
/// Power series for moderate arguments, Miller's downward recurrence with
/// the Σ-normalization J₀ + 2ΣJ₂ₖ = 1 beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        j0_series(x)
    } else {
        bessel_miller(x).0
    }
}

/// Bessel function of the first kind, order 1.
pub fn bessel_j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    let v = if x <= 12.0 { j1_series(x) } else { bessel_miller(x).1 };
    s * v
}

fn j0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum * x / 2.0
}

/// Downward recurrence J_{n−1} = (2n/x) J_n − J_{n+1}, started high enough
/// that the seed error has decayed, normalized by J₀ + 2 Σ J_{2k} = 1.
fn bessel_miller(x: f64) -> (f64, f64) {
    let start = (x as usize) + (15.0 * (x as f64).powf(1.0 / 3.0)) as usize + 20;
    let start = if start % 2 == 0 { start } else { start + 1 };
    let mut jp = 0.0f64; // J_{n+1}
    let mut jc = 1e-300f64; // J_n (arbitrary seed)
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    let mut norm = 0.0;
    for n in (0..=start).rev() {
        let jm = (2.0 * (n + 1) as f64 / x) * jc - jp;
        jp = jc;
        jc = jm;
        // jc now holds J_n
        if n % 2 == 0 && n > 0 {
            norm += 2.0 * jc;
        }
        if n == 1 {
            j1 = jc;
        }
        if n == 0 {
            j0 = jc;
        }
        // rescale to avoid overflow of the unnormalized recurrence
        if jc.abs() > 1e250 {
            jp /= 1e250;
            jc /= 1e250;
            norm /= 1e250;
            j0 /= 1e250;
            j1 /= 1e250;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

/// Legendre polynomial P_ℓ(x) by the three-term recurrence
/// (ℓ+1) P_{ℓ+1} = (2ℓ+1) x P_ℓ − ℓ P_{ℓ−1}, stable on [−1, 1].
pub fn legendre_p(ell: u32, x: f64) -> f64 {
    match ell {
        0 => 1.0,
        1 => x,
        _ => {
            let mut pm = 1.0;
            let mut pc = x;
            for l in 1..ell {
                let l = l as f64;
                let pn = ((2.0 * l + 1.0) * x * pc - l * pm) / (l + 1.0);
                pm = pc;
                pc = pn;
            }
            pc
        }
    }
}

/// θ-normalized associated Legendre functions of fixed degree:
/// `values[m]` is P̄_{ℓm}(cos θ) with ∫₀^π P̄² sin θ dθ = 1, for m = 0..=ℓ,
/// and `dtheta[m]` its θ-derivative.
///
/// The sampler assembles real spherical harmonics from these as
/// Y_{ℓ0} = P̄_{ℓ0}/√(2π), Y_{ℓm} = P̄_{ℓm}·cos(mφ)/√π (and sin for m < 0).
#[derive(Debug, Clone)]
pub struct AssocLegendreRow {
    pub ell: u32,
    pub values: Vec<f64>,
    pub dtheta: Vec<f64>,
}

pub fn assoc_legendre_row(ell: u32, theta: f64) -> AssocLegendreRow {
    let l = ell as usize;
    let x = theta.cos();
    // Keep the derivative formula finite at the poles; the harmonics and
    // their θ-derivatives are smooth there, this only guards 0/0.
    let s = theta.sin().max(1e-12);

    // prev[m], curr[m]: P̄ at degrees ℓ−1 and ℓ built by diagonal + upward
    // recurrences.
    let mut diag = (0.5f64).sqrt(); // P̄_{00}
    let mut values = vec![0.0; l + 1];
    let mut prev = vec![0.0; l + 1];

    for m in 0..=l {
        // climb degrees m..ℓ at fixed order m
        let mut pm_prev = 0.0f64; // P̄_{m-1+..}, two-back value
        let mut pm_curr = diag; // P̄_{mm}
        if m == l {
            prev[m] = 0.0;
            values[m] = pm_curr;
        } else {
            let mut deg = m;
            while deg < l {
                let lf = (deg + 1) as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = if deg as f64 - 1.0 >= mf || deg > m {
                    let lm = deg as f64;
                    (((lm * lm - mf * mf) * (2.0 * lf + 1.0))
                        / ((2.0 * lm - 1.0) * (lf * lf - mf * mf)))
                        .sqrt()
                } else {
                    0.0
                };
                let next = a * x * pm_curr - b * pm_prev;
                pm_prev = pm_curr;
                pm_curr = next;
                deg += 1;
            }
            prev[m] = pm_prev;
            values[m] = pm_curr;
        }
        // next diagonal P̄_{m+1,m+1}
        let mf = (m + 1) as f64;
        diag *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * theta.sin();
    }

    // dP̄_{ℓm}/dθ = (ℓ x P̄_{ℓm} − c_{ℓm} P̄_{ℓ−1,m}) / sin θ
    // with c_{ℓm} = √((2ℓ+1)/(2ℓ−1) · (ℓ²−m²)).
    let mut dtheta = vec![0.0; l + 1];
    let lf = ell as f64;
    for m in 0..=l {
        let mf = m as f64;
        let c = if ell == 0 {
            0.0
        } else {
            ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt()
        };
        dtheta[m] = (lf * x * values[m] - c * prev[m]) / s;
    }

    AssocLegendreRow { ell, values, dtheta }
}

/// Busemann bracket ⟨z, b⟩ = log((1 − |z|²) / |z − b|²) on the unit disk,
/// with b = (cos α, sin α) on the boundary circle. The Helgason wave with
/// spectral parameter λ is e^{(iλ + 1/2)⟨z,b⟩}.
pub fn busemann(x: f64, y: f64, b_cos: f64, b_sin: f64) -> f64 {
    let one_minus = 1.0 - (x * x + y * y);
    let dx = x - b_cos;
    let dy = y - b_sin;
    (one_minus / (dx * dx + dy * dy)).ln()
}

/// Gradient of the Busemann bracket in disk chart coordinates.
pub fn busemann_grad(x: f64, y: f64, b_cos: f64, b_sin: f64) -> (f64, f64) {
    let one_minus = 1.0 - (x * x + y * y);
    let dx = x - b_cos;
    let dy = y - b_sin;
    let d2 = dx * dx + dy * dy;
    (
        -2.0 * x / one_minus - 2.0 * dx / d2,
        -2.0 * y / one_minus - 2.0 * dy / d2,
    )
}

/// Elementary spherical function of the hyperbolic disk,
/// φ_λ(r) = (1/2π) ∫₀^{2π} e^{(iλ + 1/2)⟨z_r, e^{iθ}⟩} dθ with
/// z_r = tanh(r/2), evaluated with the trapezoid rule on the circle and
/// node doubling until the change is below `tol` (default 1e-9 via
/// [`hyperbolic_phi`]). The integrand is analytic and periodic, so the
/// trapezoid rule converges spectrally.
pub fn hyperbolic_phi_with_tol(lambda: f64, r: f64, tol: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(1.0);
    }
    let z = (r / 2.0).tanh();
    let mut n = 64usize;
    let mut prev_re = f64::NAN;
    loop {
        let mut re = 0.0;
        let mut im = 0.0;
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let b = busemann(z, 0.0, theta.cos(), theta.sin());
            let growth = (0.5 * b).exp();
            re += growth * (lambda * b).cos();
            im += growth * (lambda * b).sin();
        }
        re /= n as f64;
        im /= n as f64;
        if (re - prev_re).abs() <= tol {
            if im.abs() > 1e-10 {
                return Err(Error::numeric(format!(
                    "hyperbolic spherical function lost symmetry: |Im| = {im:e}"
                )));
            }
            return Ok(re);
        }
        prev_re = re;
        n *= 2;
        if n > 1 << 22 {
            return Err(Error::numeric(format!(
                "hyperbolic quadrature did not converge to {tol:e} at λ={lambda}, r={r}"
            )));
        }
    }
}

pub fn hyperbolic_phi(lambda: f64, r: f64) -> Result<f64> {
    hyperbolic_phi_with_tol(lambda, r, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent oracle: J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ. The
    /// integrand extends to a smooth periodic function, so the trapezoid
    /// rule is spectrally accurate.
    fn j0_integral(x: f64, n: usize) -> f64 {
        let mut sum = 0.0;
        for k in 0..n {
            let theta = PI * (k as f64 + 0.5) / n as f64;
            sum += (x * theta.sin()).cos();
        }
        sum / n as f64
    }

    fn j1_integral(x: f64, n: usize) -> f64 {
        let mut sum = 0.0;
        for k in 0..n {
            let theta = PI * (k as f64 + 0.5) / n as f64;
            sum += (theta - x * theta.sin()).cos();
        }
        sum / n as f64
    }

    #[test]
    fn bessel_matches_integral_oracle() {
        for &x in &[0.0, 0.3, 1.0, 2.404825557695773, 5.0, 11.9, 12.1, 30.0, 88.0] {
            let o0 = j0_integral(x, 4096);
            let o1 = j1_integral(x, 4096);
            assert!(
                (bessel_j0(x) - o0).abs() < 1e-11,
                "J0({x}) = {} vs oracle {o0}",
                bessel_j0(x)
            );
            assert!(
                (bessel_j1(x) - o1).abs() < 1e-11,
                "J1({x}) = {} vs oracle {o1}",
                bessel_j1(x)
            );
        }
    }

    #[test]
    fn bessel_first_zero() {
        // First zero of J₀ from the oracle-validated series.
        assert!(bessel_j0(2.404825557695773).abs() < 1e-12);
    }

    /// Independent oracle: explicit binomial sum
    /// P_ℓ(x) = 2^{−ℓ} Σ_k C(ℓ,k)² (x−1)^{ℓ−k} (x+1)^k.
    fn legendre_binomial(ell: u32, x: f64) -> f64 {
        let l = ell as i64;
        let mut sum = 0.0;
        for k in 0..=l {
            let mut c = 1.0f64;
            for i in 0..k {
                c *= (l - i) as f64 / (i + 1) as f64;
            }
            sum += c * c * (x - 1.0).powi((l - k) as i32) * (x + 1.0).powi(k as i32);
        }
        sum / 2f64.powi(l as i32)
    }

    #[test]
    fn legendre_matches_binomial_oracle() {
        for ell in [0u32, 1, 2, 3, 6, 10, 20] {
            for i in 0..=20 {
                let x = -1.0 + 0.1 * i as f64;
                let a = legendre_p(ell, x);
                let b = legendre_binomial(ell, x);
                assert!((a - b).abs() < 1e-10, "P_{ell}({x}): {a} vs {b}");
            }
        }
        assert_eq!(legendre_p(4, 0.0), 0.375);
    }

    #[test]
    fn assoc_legendre_normalization() {
        // ∫₀^π P̄_{ℓm}(cos θ)² sin θ dθ = 1 by midpoint quadrature.
        let n = 20_000;
        for ell in [1u32, 3, 10] {
            let mut norms = vec![0.0; ell as usize + 1];
            for i in 0..n {
                let theta = PI * (i as f64 + 0.5) / n as f64;
                let row = assoc_legendre_row(ell, theta);
                for (m, v) in row.values.iter().enumerate() {
                    norms[m] += v * v * theta.sin() * PI / n as f64;
                }
            }
            for (m, norm) in norms.iter().enumerate() {
                assert!((norm - 1.0).abs() < 1e-6, "ℓ={ell} m={m}: {norm}");
            }
        }
    }

    #[test]
    fn assoc_legendre_dtheta_matches_finite_differences() {
        let h = 1e-6;
        for ell in [1u32, 5, 12] {
            for i in 1..40 {
                let theta = PI * i as f64 / 40.0;
                let row = assoc_legendre_row(ell, theta);
                let plus = assoc_legendre_row(ell, theta + h);
                let minus = assoc_legendre_row(ell, theta - h);
                for m in 0..=ell as usize {
                    let fd = (plus.values[m] - minus.values[m]) / (2.0 * h);
                    assert!(
                        (row.dtheta[m] - fd).abs() < 1e-5 * (1.0 + fd.abs()),
                        "ℓ={ell} m={m} θ={theta}: {} vs fd {fd}",
                        row.dtheta[m]
                    );
                }
            }
        }
    }

    /// Independent oracle: Mehler–Dirichlet representation
    /// φ_λ(r) = (√2/π) ∫₀^r cos(λt)/√(cosh r − cosh t) dt, after the
    /// substitution t = r − u² that removes the endpoint singularity.
    fn phi_mehler(lambda: f64, r: f64, n: usize) -> f64 {
        let umax = r.sqrt();
        let mut sum = 0.0;
        for i in 0..n {
            let u = umax * (i as f64 + 0.5) / n as f64;
            let t = r - u * u;
            let denom = (r.cosh() - t.cosh()).sqrt();
            sum += (lambda * t).cos() * 2.0 * u / denom * (umax / n as f64);
        }
        sum * (2.0f64).sqrt() / PI
    }

    #[test]
    fn hyperbolic_phi_matches_mehler_oracle() {
        for &(lambda, r) in &[(0.0, 0.5), (1.0, 1.0), (4.0, 0.7), (8.0, 0.5), (8.0, 2.0), (6.0, 3.0)] {
            let quad = hyperbolic_phi(lambda, r).unwrap();
            let oracle = phi_mehler(lambda, r, 400_000);
            assert!(
                (quad - oracle).abs() < 1e-6,
                "φ_{lambda}({r}): {quad} vs Mehler {oracle}"
            );
        }
    }

    #[test]
    fn hyperbolic_phi_at_zero_is_one() {
        assert_eq!(hyperbolic_phi(8.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn busemann_grad_matches_finite_differences() {
        let h = 1e-7;
        for &(x, y) in &[(0.1, 0.2), (-0.5, 0.3), (0.7, -0.1)] {
            for k in 0..8 {
                let a = 2.0 * PI * k as f64 / 8.0;
                let (bc, bs) = (a.cos(), a.sin());
                let (gx, gy) = busemann_grad(x, y, bc, bs);
                let fx = (busemann(x + h, y, bc, bs) - busemann(x - h, y, bc, bs)) / (2.0 * h);
                let fy = (busemann(x, y + h, bc, bs) - busemann(x, y - h, bc, bs)) / (2.0 * h);
                assert!((gx - fx).abs() < 1e-5 && (gy - fy).abs() < 1e-5);
            }
        }
    }
}
