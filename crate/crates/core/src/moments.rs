//! Moment bounds for log-concave targets.
//!
//! Upper bounds on `μ_a* = E‖θ - θ*‖^a` when the potential is strongly convex
//! everywhere, only inside a ball, or only outside a ball; the general
//! tail-integral bound driven by a curvature profile `m(r)`; a quadrature
//! oracle for radial targets; and the constant `A_k` of the moment inequality
//! `μ_k ≤ A_k μ₂^{k/2}` valid for every log-concave measure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Error, Result};
use crate::optimize::nelder_mead;
use crate::potentials::{Potential, RadialProfile};
use crate::quadrature::adaptive;
use crate::special::{gamma, ln_gamma, upper_incomplete_gamma};

pub use crate::special::upper_incomplete_gamma as incomplete_gamma_upper;

/// A regime's moment bound with its named terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundReport {
    pub a: f64,
    pub regime: String,
    pub bound: f64,
    pub components: BTreeMap<String, f64>,
    pub dominating_term: String,
}

/// `B x^{q-1} e^{-x}`, an upper bound on `Γ(q, x)` valid for
/// `x ≥ (B/(B-1))(q-1)`. With `verify`, also checks the bound against `Γ(q, x)`.
pub fn incomplete_gamma_tail_bound(b: f64, q: f64, x: f64, verify: bool) -> Result<f64> {
    if !(b > 1.0) || !(q >= 1.0) {
        return Err(Error::Domain(format!("need B > 1 and q >= 1 (B={b}, q={q})")));
    }
    let threshold = b / (b - 1.0) * (q - 1.0);
    if !(x >= threshold) {
        return Err(Error::Domain(format!("need x >= {threshold} (x={x})")));
    }
    let bound = b * x.powf(q - 1.0) * (-x).exp();
    if verify {
        let exact = upper_incomplete_gamma(q, x)?;
        if exact > bound * (1.0 + 1e-12) {
            return Err(Error::Numeric(format!("Γ({q}, {x}) = {exact} exceeds bound {bound}")));
        }
    }
    Ok(bound)
}

/// Bound on `μ_a*` for an `m`-strongly convex potential.
pub fn moment_bound_strong(p: usize, m: f64, a: f64) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    ensure_positive("m", m)?;
    ensure_positive("a", a)?;
    let pf = p as f64;
    let base = (pf / m).powf(a / 2.0);
    if a <= 2.0 {
        Ok(base)
    } else {
        Ok(base * 2f64.powf(a - 1.0) * (1.0 + (1.0 + a / pf).powf(a / 2.0 - 1.0)))
    }
}

fn log_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

fn largest(entries: &[(&str, f64)]) -> String {
    entries
        .iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|e| e.0.to_string())
        .expect("entries are non-empty")
}

/// Bound on `μ_a*` when `∇²f ⪰ mI` on the ball of radius `R` around `θ*`.
pub fn moment_bound_inside_ball(p: usize, m: f64, radius: f64, big_m: f64, a: f64) -> Result<MomentBoundReport> {
    ensure_positive("R", radius)?;
    ensure_positive("M", big_m)?;
    let b = moment_bound_strong(p, m, a)?;
    let pf = p as f64;
    let mr = m * radius;
    let a_term = (3.0 / mr * ((pf + a) * (pf + a).ln() + pf * log_plus(2.0 * big_m / (mr * mr)))).powf(a);
    // 2^{a+1}/((mR)^a Γ(p/2)) in log space so that R → ∞ underflows gracefully
    let residual = ((a + 1.0) * 2f64.ln() - a * mr.ln() - ln_gamma(pf / 2.0)).exp();
    let bound = a_term.max(b) + residual;
    let comps = [("A", a_term), ("B", b), ("residual", residual)];
    Ok(MomentBoundReport {
        a,
        regime: "strong_inside_ball".into(),
        bound,
        dominating_term: largest(&comps),
        components: comps.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    })
}

/// Bound on `μ_a*` when `∇²f ⪰ mI` outside the ball of radius `R` (needs `p ≥ 3`).
pub fn moment_bound_outside_ball(p: usize, m: f64, radius: f64, big_m: f64, a: f64) -> Result<MomentBoundReport> {
    if p < 3 {
        return Err(Error::Domain(format!("outside-ball bound needs p >= 3, got {p}")));
    }
    ensure_positive("m", m)?;
    ensure_positive("R", radius)?;
    ensure_positive("M", big_m)?;
    ensure_positive("a", a)?;
    if big_m < m {
        return Err(invalid(format!("M = {big_m} must be at least m = {m}")));
    }
    let pf = p as f64;
    let prefactor = 1.0 + 2.0 / gamma(pf / 2.0);
    let radius_term = 4.0 * radius;
    let curvature_term = (4.0 * (pf + a) / m * (pf * big_m / m).ln()).sqrt();
    let bound = prefactor * radius_term.max(curvature_term).powf(a);
    let comps = [("radius", radius_term), ("curvature", curvature_term)];
    let mut components: BTreeMap<String, f64> = comps.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    components.insert("prefactor".into(), prefactor);
    Ok(MomentBoundReport {
        a,
        regime: "strong_outside_ball".into(),
        bound,
        dominating_term: largest(&comps),
        components,
    })
}

/// `e^{mR²/2}` times the strongly convex bound, for strong convexity outside a ball.
pub fn moment_bound_outside_ball_general(p: usize, m: f64, radius: f64, a: f64) -> Result<f64> {
    ensure_nonnegative("R", radius)?;
    Ok((m * radius * radius / 2.0).exp() * moment_bound_strong(p, m, a)?)
}

/// A curvature lower bound `∇²f(θ) ⪰ m(‖θ - θ*‖) I` with `0 ≤ m(r) ≤ M`.
pub trait CurvatureProfile: Sync {
    fn curvature(&self, r: f64) -> f64;

    /// `M = sup m`.
    fn upper(&self) -> f64;

    /// Radii where `m` may jump.
    fn breakpoints(&self) -> Vec<f64> {
        vec![]
    }
}

/// Built-in curvature profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Curvature {
    Constant { m: f64 },
    /// `m·1{r < R}`.
    InsideBall { m: f64, radius: f64 },
    /// `m·1{r > R}`.
    OutsideBall { m: f64, radius: f64 },
}

impl CurvatureProfile for Curvature {
    fn curvature(&self, r: f64) -> f64 {
        match *self {
            Curvature::Constant { m } => m,
            Curvature::InsideBall { m, radius } => {
                if r < radius {
                    m
                } else {
                    0.0
                }
            }
            Curvature::OutsideBall { m, radius } => {
                if r > radius {
                    m
                } else {
                    0.0
                }
            }
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            Curvature::Constant { m } | Curvature::InsideBall { m, .. } | Curvature::OutsideBall { m, .. } => m,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Curvature::Constant { .. } => vec![],
            Curvature::InsideBall { radius, .. } | Curvature::OutsideBall { radius, .. } => vec![radius],
        }
    }
}

/// `m̃(r) = 2∫₀¹ m(ry)(1-y) dy`, by adaptive quadrature.
pub fn averaged_curvature(profile: &dyn CurvatureProfile, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(profile.curvature(0.0));
    }
    let cuts: Vec<f64> = profile.breakpoints().iter().map(|b| b / r).collect();
    let est = adaptive(|y| profile.curvature(r * y) * (1.0 - y), 0.0, 1.0, &cuts, 1e-15, 1e-13)?;
    Ok(2.0 * est.value)
}

/// Log of `∫ₐᵇ exp(g(x)) dx` (with `b = ∞` allowed), accumulated panel by
/// panel with a per-panel shift so that neither huge nor tiny integrands
/// overflow. Marching stops once a panel adds less than `rel_tol` of the
/// running total while the integrand decays, or `g` falls 745 below the peak.
pub fn log_integral<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, scale: f64, breakpoints: &[f64], rel_tol: f64) -> Result<f64> {
    let mut left = a;
    let mut width = scale;
    let mut log_total = f64::NEG_INFINITY;
    let mut peak = f64::NEG_INFINITY;
    for _ in 0..4000 {
        let right = (left + width).min(b);
        let shift = (0..=8)
            .map(|i| g(left + (right - left) * i as f64 / 8.0))
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let log_panel = if shift == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let est = adaptive(|x| (g(x) - shift).exp(), left, right, breakpoints, 0.0, rel_tol * 0.1)?;
            est.value.ln() + shift
        };
        if log_panel > f64::NEG_INFINITY {
            let hi = log_total.max(log_panel);
            log_total = hi + ((log_total - hi).exp() + (log_panel - hi).exp()).ln();
        }
        peak = peak.max(shift);
        if right >= b {
            return Ok(log_total);
        }
        let g_right = g(right);
        let decaying = g_right <= g(left);
        let negligible = log_panel - log_total <= rel_tol.ln();
        if (decaying && negligible) || (log_total.is_finite() && g_right < peak - 745.0) {
            return Ok(log_total);
        }
        left = right;
        if log_panel - log_total <= (0.25f64).ln() {
            width *= 2.0;
        }
    }
    Err(Error::Numeric(format!("log-domain integral from {a} did not settle")))
}

/// `(2(M/2)^{p/2}/Γ(p/2)) ∫_A^∞ r^{p+a-1} e^{-m̃(r)r²/2} dr`, the tail part
/// `∫_{‖θ-θ*‖>A} ‖θ-θ*‖^a dπ` is bounded by.
pub fn tail_moment_integral(profile: &dyn CurvatureProfile, p: usize, a: f64, lower: f64) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    ensure_positive("a", a)?;
    ensure_positive("A", lower)?;
    let big_m = profile.upper();
    ensure_positive("M", big_m)?;
    let pf = p as f64;
    let exponent = pf + a - 1.0;
    let g = |r: f64| {
        let mt = averaged_curvature(profile, r).unwrap_or(f64::NAN);
        exponent * r.ln() - mt * r * r / 2.0
    };
    // probe m̃ once so that quadrature failures surface as errors
    averaged_curvature(profile, lower)?;
    let scale = lower.max(1.0 / big_m.sqrt());
    let log_int = log_integral(g, lower, f64::INFINITY, scale, &profile.breakpoints(), 1e-12)?;
    let log_prefactor = 2f64.ln() + pf / 2.0 * (big_m / 2.0).ln() - ln_gamma(pf / 2.0);
    Ok((log_prefactor + log_int).exp())
}

/// `∫_{ℝ^p} ‖θ‖^a e^{-φ(‖θ‖)} dθ / ∫ e^{-φ(‖θ‖)} dθ` for a radial potential.
pub fn radial_moment<F: Fn(f64) -> f64>(phi: F, breakpoints: &[f64], p: usize, a: f64) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    ensure_nonnegative("a", a)?;
    let pf = p as f64;
    let log_num = log_integral(|r| (pf + a - 1.0) * r.ln() - phi(r), 0.0, f64::INFINITY, 1.0, breakpoints, 1e-13)?;
    let log_den = log_integral(|r| (pf - 1.0) * r.ln() - phi(r), 0.0, f64::INFINITY, 1.0, breakpoints, 1e-13)?;
    Ok((log_num - log_den).exp())
}

/// Quadrature moment of the capped-quadratic target and the lower bound
/// `0.1 Γ(p+a)/Γ(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundOracle {
    pub numeric_moment: f64,
    pub closed_form_lower_bound: f64,
}

pub fn lower_bound_moment_oracle(p: usize, a: f64) -> Result<LowerBoundOracle> {
    ensure_positive("a", a)?;
    let pf = p as f64;
    if p < 2 || pf < a - 1.0 {
        return Err(Error::Domain(format!("need p >= max(2, a - 1), got p={p}, a={a}")));
    }
    let profile = RadialProfile::CappedQuadratic;
    let numeric_moment = radial_moment(|r| profile.value(r), &profile.breakpoints(), p, a)?;
    let closed_form_lower_bound = 0.1 * (ln_gamma(pf + a) - ln_gamma(pf)).exp();
    Ok(LowerBoundOracle { numeric_moment, closed_form_lower_bound })
}

/// `μ₂(π_γ)` for each penalty `γ`, where `π_γ ∝ exp(-f - γ‖θ‖²/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mu2Sweep {
    pub gammas: Vec<f64>,
    pub mu2: Vec<f64>,
    /// Whether `mu2` is non-increasing along `gammas` (sorted ascending).
    pub non_increasing: bool,
}

fn second_moment_1d<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let f0 = f(0.0);
    let side = |sign: f64| -> Result<(f64, f64)> {
        let num = log_integral(|x| 2.0 * x.ln() - (f(sign * x) - f0), 0.0, f64::INFINITY, 1.0, &[], 1e-13)?;
        let den = log_integral(|x| -(f(sign * x) - f0), 0.0, f64::INFINITY, 1.0, &[], 1e-13)?;
        Ok((num, den))
    };
    let (n1, d1) = side(1.0)?;
    let (n2, d2) = side(-1.0)?;
    let lse = |x: f64, y: f64| {
        let hi = x.max(y);
        hi + ((x - hi).exp() + (y - hi).exp()).ln()
    };
    Ok((lse(n1, n2) - lse(d1, d2)).exp())
}

pub fn mu2_monotonicity_check(potential: &dyn Potential, gammas: &[f64]) -> Result<Mu2Sweep> {
    for &g in gammas {
        ensure_nonnegative("gamma", g)?;
    }
    let p = potential.dim();
    let mu2: Vec<f64> = gammas
        .iter()
        .map(|&g| {
            if let Some(profile) = potential.radial_profile() {
                radial_moment(|r| profile.value(r) + g * r * r / 2.0, &profile.breakpoints(), p, 2.0)
            } else if let Some(lambda) = potential.quadratic_precision() {
                lambda.iter().map(|&l| second_moment_1d(|x| (l + g) * x * x / 2.0)).sum()
            } else if p == 1 {
                second_moment_1d(|x| potential.value(&[x]) + g * x * x / 2.0)
            } else {
                Err(Error::Capability("μ₂ quadrature needs a radial, diagonal-quadratic or 1-D potential".into()))
            }
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by(|&i, &j| gammas[i].total_cmp(&gammas[j]));
    let non_increasing = order.windows(2).all(|w| mu2[w[1]] <= mu2[w[0]] * (1.0 + 1e-10));
    Ok(Mu2Sweep { gammas: gammas.to_vec(), mu2, non_increasing })
}

/// Minimizer of `A_k(λ, γ)` over `λ > 2, γ > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhintchineResult {
    pub k: f64,
    pub lambda_opt: Option<f64>,
    pub gamma_opt: Option<f64>,
    #[serde(rename = "A_k")]
    pub a_k: f64,
    pub grid_resolution: String,
}

/// `A_k(λ, γ)` of the log-concave moment inequality.
pub fn khintchine_objective(k: f64, lambda: f64, gamma_: f64) -> Result<f64> {
    if !(k > 2.0) {
        return Err(Error::Domain(format!("A_k needs k > 2, got {k}")));
    }
    if !(lambda > 2.0) || !(gamma_ > 1.0) {
        return Err(Error::Domain(format!("A_k needs λ > 2 and γ > 1 (λ={lambda}, γ={gamma_})")));
    }
    let ll = (lambda - 1.0).ln();
    let x = gamma_.sqrt() * ll / 2.0;
    let first = (lambda - 1.0).sqrt() / lambda * (2.0 * lambda.sqrt() / ll).powf(k) * k * upper_incomplete_gamma(k, x)?;
    let second = (k * (gamma_ * lambda).powf(k / 2.0 - 1.0) - 2.0) / (k - 2.0);
    Ok(first + second)
}

const GRID: usize = 200;
const LAMBDA_RANGE: (f64, f64) = (2.1, 200.0);
const GAMMA_RANGE: (f64, f64) = (1.01, 50.0);

fn log_grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
}

/// `A_k = min A_k(λ, γ)`: a 200×200 log grid over `λ ∈ [2.1, 200]`,
/// `γ ∈ [1.01, 50]`, then Nelder–Mead from the best grid point. `k = 2`
/// returns the trivial constant 1.
pub fn khintchine_constant(k: f64) -> Result<KhintchineResult> {
    if k == 2.0 {
        return Ok(KhintchineResult {
            k,
            lambda_opt: None,
            gamma_opt: None,
            a_k: 1.0,
            grid_resolution: "none (k = 2)".into(),
        });
    }
    if !(k > 2.0) || !k.is_finite() {
        return Err(Error::Domain(format!("A_k needs k > 2, got {k}")));
    }
    let best = (0..GRID * GRID)
        .into_par_iter()
        .map(|idx| {
            let lambda = log_grid(LAMBDA_RANGE.0, LAMBDA_RANGE.1, GRID, idx / GRID);
            let g = log_grid(GAMMA_RANGE.0, GAMMA_RANGE.1, GRID, idx % GRID);
            let v = khintchine_objective(k, lambda, g).unwrap_or(f64::INFINITY);
            (v, lambda, g)
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY, f64::INFINITY),
            |x, y| {
                // ties broken lexicographically on (λ, γ) so the reduction order is irrelevant
                match x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2)) {
                    std::cmp::Ordering::Greater => y,
                    _ => x,
                }
            },
        );
    if !best.0.is_finite() {
        return Err(Error::Numeric(format!("A_{k} is not finite anywhere on the grid")));
    }
    // λ = 2 + e^u, γ = 1 + e^w keeps the search inside the domain
    let objective = |z: &[f64]| khintchine_objective(k, 2.0 + z[0].exp(), 1.0 + z[1].exp()).unwrap_or(f64::INFINITY);
    let start = [(best.1 - 2.0).ln(), (best.2 - 1.0).ln()];
    let refined = nelder_mead(objective, &start, 0.05, 1e-10, 10_000);
    let (lambda, g, a_k) = if refined.value < best.0 {
        (2.0 + refined.x[0].exp(), 1.0 + refined.x[1].exp(), refined.value)
    } else {
        (best.1, best.2, best.0)
    };
    Ok(KhintchineResult {
        k,
        lambda_opt: Some(lambda),
        gamma_opt: Some(g),
        a_k,
        grid_resolution: format!(
            "{GRID}x{GRID} log grid, lambda in [{}, {}], gamma in [{}, {}], then Nelder-Mead",
            LAMBDA_RANGE.0, LAMBDA_RANGE.1, GAMMA_RANGE.0, GAMMA_RANGE.1
        ),
    })
}
