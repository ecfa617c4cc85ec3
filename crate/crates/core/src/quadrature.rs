//! One-dimensional numerical integration.
//!
//! Three tools: fixed Gauss–Legendre rules of any order, an adaptive
//! Gauss–Kronrod (7/15) integrator with global bisection, and a panel-marching
//! integrator for decaying integrands on `[a, ∞)`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre polynomial, starting
/// from the Chebyshev-like guess `cos(π(i - 1/4)/(n + 1/2))`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let s = f(mid - dx) + f(mid + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

#[derive(PartialEq)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the total error is
/// below `max(abs_tol, rel_tol·|value|)`. `breakpoints` inside `(a, b)` seed the
/// initial partition, which matters for integrands with kinks or jumps.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numeric(format!("non-finite integration limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > lo && c < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0;
    let mut left = lo;
    for right in cuts.into_iter().chain(std::iter::once(hi)) {
        let (v, e) = kronrod15(&mut f, left, right);
        evals += 15;
        total += v;
        total_err += e;
        heap.push(Panel { err: e, a: left, b: right, value: v });
        left = right;
    }

    const MAX_PANELS: usize = 4000;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Numeric(format!(
                "adaptive quadrature on [{lo}, {hi}] did not converge: estimate {total}, error {total_err}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { err: e1, a: worst.a, b: mid, value: v1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, value: v2 });
    }
    // Re-sum to shed accumulated rounding from the incremental updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.err).sum();
    if !value.is_finite() {
        return Err(Error::Numeric(format!("non-finite integral on [{lo}, {hi}]")));
    }
    Ok(Estimate { value: sign * value, error, evaluations: evals })
}

/// Integrates a nonnegative integrand over `[a, ∞)` by marching panels of
/// doubling width (starting at `scale`) until a panel adds less than
/// `rel_tol` of the running total or the integrand drops below `1e-300`.
pub fn tail_integral<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    breakpoints: &[f64],
    rel_tol: f64,
) -> Result<Estimate> {
    let mut width = scale.max(f64::MIN_POSITIVE);
    let mut left = a;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    for _ in 0..2000 {
        let right = left + width;
        let est = adaptive(&mut f, left, right, breakpoints, 0.0, rel_tol * 0.1)?;
        total += est.value;
        error += est.error;
        evals += est.evaluations;
        let edge = f(right).abs();
        evals += 1;
        let negligible_panel = est.value.abs() <= rel_tol * total.abs();
        let decaying = edge <= f(left).abs() || edge < 1e-300;
        if (negligible_panel && decaying) || (edge < 1e-300 && est.value.abs() < 1e-300) {
            return Ok(Estimate { value: total, error, evaluations: evals });
        }
        left = right;
        if est.value.abs() <= 0.25 * total.abs() {
            width *= 2.0;
        }
    }
    Err(Error::Numeric(format!(
        "tail integral from {a} did not settle after 2000 panels (running total {total})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // degree 15 is integrated exactly by an 8-node rule
        let v = gl.integrate(|x| x.powi(14) + 3.0 * x.powi(15), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_kink() {
        let est = adaptive(|x: f64| x.abs(), -1.0, 2.0, &[], 1e-13, 1e-13).unwrap();
        assert!((est.value - 2.5).abs() < 1e-12, "{:?}", est);
    }

    #[test]
    fn adaptive_reversed_limits_flip_sign() {
        let est = adaptive(f64::exp, 1.0, 0.0, &[], 1e-14, 1e-14).unwrap();
        assert!((est.value + (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn tail_integral_of_gaussian() {
        let est = tail_integral(|x: f64| (-0.5 * x * x).exp(), 0.0, 1.0, &[], 1e-15).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((est.value - exact).abs() < 1e-12, "{}", est.value);
    }
}
