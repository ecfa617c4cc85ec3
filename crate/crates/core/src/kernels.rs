//! Scalar kernels of one kinetic Langevin step and the 4×4 covariance of its
//! Gaussian increments.
//!
//! With `x = γh`:
//!
//! ```text
//! ψ₀(h) = e^{-x}
//! ψ₁(h) = h (1 - e^{-x}) / x
//! ψ₂(h) = h² (x - 1 + e^{-x}) / x²
//! φ₂(h) = h² (1 - e^{-x}(1 + x)) / x²
//! φ₃(h) = h³ (x - 2 + e^{-x}(2 + x)) / x³
//! ```
//!
//! The closed forms cancel catastrophically when `x` is small, so every kernel
//! uses its Taylor series for `x < 1` (truncated well below 1e-16 relative).
//!
//! The covariance `C_ij = ∫₀ʰ vᵢ(t)vⱼ(t) dt` with `v = [ψ₀, ψ₁, φ₂, φ₃]` is
//! computed in the scaled form `S = D C D`, `D = diag(h^{-1/2}, h^{-3/2},
//! h^{-5/2}, h^{-7/2})`, whose entries are O(1) for every `h`. `S` is factored
//! and the factor rescaled, so `C` never has to be factored directly even when
//! its entries span 80 orders of magnitude.

use nalgebra::Matrix4;

use crate::error::{ensure_positive, Error, Result};

/// Below this value of `γh` every kernel is evaluated by its power series.
const SERIES_THRESHOLD: f64 = 1.0;
const SERIES_TERMS: usize = 26;

/// `ψ₀, ψ₁, ψ₂, φ₂, φ₃` evaluated at the step size `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticKernels {
    pub gamma: f64,
    pub h: f64,
    pub psi0: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// Evaluates `Σₙ cₙ xⁿ` by Horner's rule for `cₙ = (-1)ⁿ num(n)/den(n)`.
fn alternating_series(x: f64, num: impl Fn(usize) -> f64, den_offset: usize) -> f64 {
    // den(n) = (n + den_offset)!
    let mut fact = vec![1.0f64; SERIES_TERMS + den_offset + 1];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut acc = 0.0;
    for n in (0..SERIES_TERMS).rev() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * x + sign * num(n) / fact[n + den_offset];
    }
    acc
}

/// `(1 - e^{-x})/x`.
fn f1(x: f64) -> f64 {
    if x < SERIES_THRESHOLD {
        alternating_series(x, |_| 1.0, 1)
    } else {
        -(-x).exp_m1() / x
    }
}

/// `(x - 1 + e^{-x})/x²`.
fn f_psi2(x: f64) -> f64 {
    if x < SERIES_THRESHOLD {
        alternating_series(x, |_| 1.0, 2)
    } else {
        (x - 1.0 + (-x).exp()) / (x * x)
    }
}

/// `(1 - e^{-x}(1 + x))/x²`.
fn f2(x: f64) -> f64 {
    if x < SERIES_THRESHOLD {
        alternating_series(x, |n| (n + 1) as f64, 2)
    } else {
        (1.0 - (-x).exp() * (1.0 + x)) / (x * x)
    }
}

/// `(x - 2 + e^{-x}(2 + x))/x³`.
fn f3(x: f64) -> f64 {
    if x < SERIES_THRESHOLD {
        alternating_series(x, |n| (n + 1) as f64, 3)
    } else {
        (x - 2.0 + (-x).exp() * (2.0 + x)) / (x * x * x)
    }
}

pub fn eval_kernels(gamma: f64, h: f64) -> Result<KineticKernels> {
    ensure_positive("gamma", gamma)?;
    ensure_positive("h", h)?;
    let x = gamma * h;
    Ok(KineticKernels {
        gamma,
        h,
        psi0: (-x).exp(),
        psi1: h * f1(x),
        psi2: h * h * f_psi2(x),
        phi2: h * h * f2(x),
        phi3: h * h * h * f3(x),
    })
}

/// Covariance `C_{h,γ}` of `(ξ⁽¹⁾, ξ⁽²⁾, ξ⁽³⁾, ξ⁽⁴⁾)` per coordinate (before the
/// `√(2γ)` factor) and a lower-triangular `L` with `C ≈ L Lᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCovariance {
    pub gamma: f64,
    pub h: f64,
    pub c: [[f64; 4]; 4],
    pub l: [[f64; 4]; 4],
    /// Diagonal jitter (relative to `tr S`) that the factorization needed.
    pub jitter: f64,
}

impl NoiseCovariance {
    /// Returns `L·g`.
    #[inline]
    pub fn correlate(&self, g: &[f64; 4]) -> [f64; 4] {
        let l = &self.l;
        [
            l[0][0] * g[0],
            l[1][0] * g[0] + l[1][1] * g[1],
            l[2][0] * g[0] + l[2][1] * g[1] + l[2][2] * g[2],
            l[3][0] * g[0] + l[3][1] * g[1] + l[3][2] * g[2] + l[3][3] * g[3],
        ]
    }
}

/// Taylor coefficients of `Fᵢ` where `uᵢ(s) = sⁱ Fᵢ(xs)` is the scaled `vᵢ(hs)`.
fn series_coefficients(i: usize, n_terms: usize) -> Vec<f64> {
    let mut fact = vec![1.0f64; n_terms + 4];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1] * k as f64;
    }
    (0..n_terms)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * match i {
                0 => 1.0 / fact[n],
                1 => 1.0 / fact[n + 1],
                2 => (n + 1) as f64 / fact[n + 2],
                _ => (n + 1) as f64 / fact[n + 3],
            }
        })
        .collect()
}

fn scaled_covariance_series(x: f64) -> [[f64; 4]; 4] {
    const N: usize = 40;
    let coefs: Vec<Vec<f64>> = (0..4).map(|i| series_coefficients(i, N)).collect();
    let mut powers = vec![1.0f64; 2 * N];
    for k in 1..powers.len() {
        powers[k] = powers[k - 1] * x;
    }
    let mut s = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut acc = 0.0;
            // sum by total degree, highest first, to add small terms before large ones
            for total in (0..2 * N - 1).rev() {
                let mut layer = 0.0;
                for n in total.saturating_sub(N - 1)..=total.min(N - 1) {
                    layer += coefs[i][n] * coefs[j][total - n];
                }
                acc += layer * powers[total] / (i + j + total + 1) as f64;
            }
            s[i][j] = acc;
            s[j][i] = acc;
        }
    }
    s
}

/// `∫₀ˣ zⁿ e^{-kz} dz` for `n ≤ 4`.
fn monomial_exp_integral(n: usize, k: f64, x: f64) -> f64 {
    if k == 0.0 {
        return x.powi(n as i32 + 1) / (n + 1) as f64;
    }
    let kx = k * x;
    let mut partial = 0.0;
    let mut term = 1.0;
    let mut fact = 1.0;
    for j in 0..=n {
        if j > 0 {
            term *= kx / j as f64;
            fact *= j as f64;
        }
        partial += term;
    }
    fact / k.powi(n as i32 + 1) * (1.0 - (-kx).exp() * partial)
}

/// `zⁱFᵢ(z) = Pᵢ(z) + Eᵢ(z)e^{-z}` with polynomial coefficient lists.
fn closed_form_parts(i: usize) -> (Vec<f64>, Vec<f64>) {
    match i {
        0 => (vec![], vec![1.0]),
        1 => (vec![1.0], vec![-1.0]),
        2 => (vec![1.0], vec![-1.0, -1.0]),
        _ => (vec![-2.0, 1.0], vec![2.0, 1.0]),
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_exp_integral(poly: &[f64], k: f64, x: f64) -> f64 {
    poly.iter().enumerate().map(|(n, c)| c * monomial_exp_integral(n, k, x)).sum()
}

fn scaled_covariance_closed(x: f64) -> [[f64; 4]; 4] {
    let parts: Vec<_> = (0..4).map(closed_form_parts).collect();
    let mut s = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let (pi, ei) = &parts[i];
            let (pj, ej) = &parts[j];
            let cross: Vec<f64> = {
                let a = poly_mul(pi, ej);
                let b = poly_mul(pj, ei);
                let len = a.len().max(b.len());
                (0..len).map(|n| a.get(n).unwrap_or(&0.0) + b.get(n).unwrap_or(&0.0)).collect()
            };
            let integral = poly_exp_integral(&poly_mul(pi, pj), 0.0, x)
                + poly_exp_integral(&cross, 1.0, x)
                + poly_exp_integral(&poly_mul(ei, ej), 2.0, x);
            let v = integral / x.powi((i + j + 1) as i32);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

/// `S = D C D`, i.e. `S_ij = ∫₀¹ uᵢ(s)uⱼ(s) ds`.
fn scaled_covariance(x: f64) -> [[f64; 4]; 4] {
    if x < 2.0 {
        scaled_covariance_series(x)
    } else {
        scaled_covariance_closed(x)
    }
}

fn to_matrix(a: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| a[i][j])
}

pub fn noise_covariance(gamma: f64, h: f64) -> Result<NoiseCovariance> {
    ensure_positive("gamma", gamma)?;
    ensure_positive("h", h)?;
    let s = scaled_covariance(gamma * h);
    let dinv = [h.sqrt(), h.powf(1.5), h.powf(2.5), h.powf(3.5)];

    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = s[i][j] * dinv[i] * dinv[j];
        }
    }

    let trace: f64 = (0..4).map(|i| s[i][i]).sum();
    let s_mat = to_matrix(&s);
    let mut jitters = std::iter::once(0.0).chain((0..=4).map(|k| 10f64.powi(-16 + k)));
    let (factor, jitter) = loop {
        let Some(jitter) = jitters.next() else {
            return Err(Error::NumericDegeneracy { gamma, h });
        };
        let shifted = s_mat + Matrix4::identity() * (jitter * trace);
        if let Some(ch) = shifted.cholesky() {
            break (ch.l(), jitter);
        }
    };

    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            l[i][j] = factor[(i, j)] * dinv[i];
        }
    }
    Ok(NoiseCovariance { gamma, h, c, l, jitter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, GaussLegendre};

    /// Builds ψ₀..φ₃ at time `t` by nested quadrature of the defining integrals.
    fn kernels_by_quadrature(gamma: f64, t: f64) -> [f64; 5] {
        let tol = 1e-14;
        let psi0 = |s: f64| (-gamma * s).exp();
        let psi1 = |s: f64| adaptive(psi0, 0.0, s, &[], tol, tol).unwrap().value;
        let psi2 = |s: f64| adaptive(psi1, 0.0, s, &[], tol * 1e-3, tol).unwrap().value;
        let phi2 = adaptive(|s| (-gamma * (t - s)).exp() * psi1(s), 0.0, t, &[], tol * 1e-3, tol).unwrap().value;
        let phi3 = adaptive(|s| (-gamma * (t - s)).exp() * psi2(s), 0.0, t, &[], tol * 1e-4, tol).unwrap().value;
        [psi0(t), psi1(t), psi2(t), phi2, phi3]
    }

    fn as_array(k: &KineticKernels) -> [f64; 5] {
        [k.psi0, k.psi1, k.psi2, k.phi2, k.phi3]
    }

    #[test]
    fn unit_friction_unit_step() {
        let k = eval_kernels(1.0, 1.0).unwrap();
        assert!((k.psi0 - (-1f64).exp()).abs() < 1e-16);
        assert!((k.psi1 - (1.0 - (-1f64).exp())).abs() < 1e-16);
    }

    #[test]
    fn tiny_step_limits() {
        let k = eval_kernels(1.0, 1e-10).unwrap();
        assert!((k.psi0 - 1.0).abs() < 1e-9);
        assert!((k.psi1 / 1e-10 - 1.0).abs() < 1e-9);
        assert!((k.psi2 / 5e-21 - 1.0).abs() < 1e-9);
        assert!((k.phi2 / 5e-21 - 1.0).abs() < 1e-9);
        assert!((k.phi3 / (1e-30 / 6.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_quadrature() {
        for (gamma, h) in [(2.0, 0.3), (0.5, 1.0), (4.0, 2.0), (1.0, 0.9), (10.0, 0.12)] {
            let k = as_array(&eval_kernels(gamma, h).unwrap());
            let q = kernels_by_quadrature(gamma, h);
            for i in 0..5 {
                assert!((k[i] - q[i]).abs() <= 1e-10 * (1.0 + q[i].abs()), "γ={gamma} h={h} i={i}: {} vs {}", k[i], q[i]);
            }
        }
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        for x in [0.999_999, 1.0, 1.000_001] {
            let series = [
                alternating_series(x, |_| 1.0, 1),
                alternating_series(x, |_| 1.0, 2),
                alternating_series(x, |n| (n + 1) as f64, 2),
                alternating_series(x, |n| (n + 1) as f64, 3),
            ];
            let closed = [
                -(-x).exp_m1() / x,
                (x - 1.0 + (-x).exp()) / (x * x),
                (1.0 - (-x).exp() * (1.0 + x)) / (x * x),
                (x - 2.0 + (-x).exp() * (2.0 + x)) / (x * x * x),
            ];
            for i in 0..4 {
                assert!(((series[i] - closed[i]) / closed[i]).abs() < 1e-14, "x={x} i={i}");
            }
        }
    }

    #[test]
    fn kernel_ranges() {
        for &gamma in &[0.5, 1.0, 4.0, 16.0] {
            for e in -12..=1 {
                let h = 10f64.powi(e).min(50.0 / gamma);
                let k = eval_kernels(gamma, h).unwrap();
                assert!(k.psi0 > 0.0 && k.psi0 <= 1.0);
                assert!(k.psi1 >= 0.0 && k.psi1 <= h);
                assert!(k.psi2 >= 0.0 && k.psi2 <= h * h / 2.0);
                assert!(k.phi2 >= 0.0 && k.phi3 >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(eval_kernels(0.0, 1.0).is_err());
        assert!(eval_kernels(1.0, -1.0).is_err());
        assert!(noise_covariance(-1.0, 1.0).is_err());
    }

    fn covariance_by_gauss_legendre(gamma: f64, h: f64) -> [[f64; 4]; 4] {
        let gl = GaussLegendre::new(64);
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = gl.integrate(
                    |t| {
                        let k = eval_kernels(gamma, t).unwrap();
                        let v = [k.psi0, k.psi1, k.phi2, k.phi3];
                        v[i] * v[j]
                    },
                    0.0,
                    h,
                );
            }
        }
        c
    }

    #[test]
    fn first_entry_closed_form() {
        let cov = noise_covariance(1.0, 0.5).unwrap();
        assert!((cov.c[0][0] - (1.0 - (-1f64).exp()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_matches_gauss_legendre() {
        for (gamma, h) in [(2.0, 0.1), (1.0, 1.0), (4.0, 1.0), (0.5, 0.01), (16.0, 1.0)] {
            let cov = noise_covariance(gamma, h).unwrap();
            let q = covariance_by_gauss_legendre(gamma, h);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((cov.c[i][j] - q[i][j]).abs() < 1e-12, "γ={gamma} h={h} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn factor_reproduces_covariance_and_scaling() {
        for &gamma in &[0.5, 1.0, 4.0, 16.0] {
            for e in -6..=0 {
                let h = 10f64.powi(e);
                let cov = noise_covariance(gamma, h).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        let llt: f64 = (0..4).map(|k| cov.l[i][k] * cov.l[j][k]).sum();
                        let scale = h.powi((i + j + 1) as i32);
                        assert!((llt - cov.c[i][j]).abs() <= 1e-12 * scale.max(1e-300));
                        assert!(cov.c[i][j].powi(2) <= cov.c[i][i] * cov.c[j][j] * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn entries_scale_with_expected_powers() {
        let gamma = 1.0;
        let (h, h2) = (1e-4, 5e-5);
        let a = noise_covariance(gamma, h).unwrap();
        let b = noise_covariance(gamma, h2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ratio = a.c[i][j] / b.c[i][j];
                let expected = 2f64.powi((i + j + 1) as i32);
                assert!((ratio / expected - 1.0).abs() < 1e-3, "({i},{j}) ratio {ratio}");
            }
        }
    }
}
