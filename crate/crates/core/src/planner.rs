//! Tuning recipes and error-bound evaluators for the penalized samplers.
//!
//! Every sampler's error after `K` steps is bounded by three terms:
//! a contraction term that decays in `K` (finiteness), a discretization term
//! that grows with `h`, and the bias `W_q(π, π_α) ≤ (C_q α μ₂^{(q+2)/2})^{1/q}`
//! from replacing `π` by the penalized surrogate. The planners pick `α` to
//! balance the last two, `h` so that they consume 99% of the target
//! `ε√μ₂`, and `K` so that the contraction term is below the remaining 1%.
//!
//! | recipe        | finiteness                      | discretization                                   |
//! |---------------|---------------------------------|--------------------------------------------------|
//! | LMC           | `√μ₂ (1-αh)^{K/2}`              | `(2.1hMp/α)^{1/2}`                               |
//! | LMC (Hessian) | `√μ₂ (1-αh)^K`                  | `M₂hp/(2α) + 2.8M^{3/2}hp^{1/2}/α`               |
//! | KLMC          | `√(2μ₂) (1-3αh/(4γ))^K`         | `1.5Mp^{1/2}h/α`                                 |
//! | KLMC2         | `√(2μ₂) (1-αh/(4γ))^K`          | `2h²Qp/α + (1.6/√M)exp{-(α/h)²/(160M₂²)}`        |
//!
//! `K` is the ceiling of the real-valued recipe, and the bounds are evaluated
//! at that integer.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Error, Result};
use crate::samplers::{Algorithm, SamplerConfig};

/// Constants `C_q` of the bias bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasConstants {
    pub c1: f64,
    pub c2: f64,
}

pub const BIAS_CONSTANTS: BiasConstants = BiasConstants { c1: 22.0, c2: 111.0 };

impl BiasConstants {
    pub fn c_q(&self, q: u8) -> Result<f64> {
        match q {
            1 => Ok(self.c1),
            2 => Ok(self.c2),
            _ => Err(invalid(format!("metric order q must be 1 or 2, got {q}"))),
        }
    }
}

/// Upper bounds on the distance between `π` and `π_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasBounds {
    /// `d_TV(π, π_α) ≤ α μ₂`.
    pub tv_bound: f64,
    /// `W_q(π, π_α) ≤ (C_q α μ₂^{(q+2)/2})^{1/q}`.
    pub wq_bound: f64,
}

pub fn bias_bounds(alpha: f64, mu2: f64, q: u8) -> Result<BiasBounds> {
    ensure_nonnegative("alpha", alpha)?;
    ensure_positive("mu2", mu2)?;
    let cq = BIAS_CONSTANTS.c_q(q)?;
    Ok(BiasBounds { tv_bound: alpha * mu2, wq_bound: wq_bias(cq, alpha, mu2, q) })
}

fn wq_bias(cq: f64, alpha: f64, mu2: f64, q: u8) -> f64 {
    let qf = q as f64;
    (cq * alpha * mu2.powf((qf + 2.0) / 2.0)).powf(1.0 / qf)
}

/// `ε √μ₂`, the absolute error corresponding to scaled precision `ε`.
pub fn scaled_error_target(mu2: f64, epsilon: f64) -> Result<f64> {
    ensure_positive("mu2", mu2)?;
    ensure_positive("epsilon", epsilon)?;
    Ok(epsilon * mu2.sqrt())
}

/// Problem constants consumed by the planners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerInputs {
    pub p: usize,
    /// Gradient-Lipschitz constant `M`.
    #[serde(rename = "M")]
    pub m: f64,
    /// Hessian-Lipschitz constant `M₂`.
    #[serde(rename = "M2", default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    /// Second moment `μ₂(π)` or an upper bound on it; takes precedence over `D p^β`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu2: Option<f64>,
    /// Flatness constants with `μ₂ ≤ D p^β`.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(rename = "eps")]
    pub epsilon: f64,
    pub q: u8,
}

impl PlannerInputs {
    pub fn new(p: usize, m: f64, mu2: f64, epsilon: f64, q: u8) -> Self {
        Self { p, m, m2: None, mu2: Some(mu2), d: None, beta: None, epsilon, q }
    }

    pub fn with_hess_lipschitz(mut self, m2: f64) -> Self {
        self.m2 = Some(m2);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(invalid("p must be positive"));
        }
        ensure_positive("M", self.m)?;
        if let Some(m2) = self.m2 {
            ensure_nonnegative("M2", m2)?;
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("eps must lie in (0, 1), got {}", self.epsilon)));
        }
        BIAS_CONSTANTS.c_q(self.q)?;
        self.mu2_value().map(|_| ())
    }

    /// `μ₂` used by the recipes: the direct value when given, else `D p^β`.
    pub fn mu2_value(&self) -> Result<f64> {
        if let Some(mu2) = self.mu2 {
            ensure_positive("mu2", mu2)?;
            return Ok(mu2);
        }
        match (self.d, self.beta) {
            (Some(d), Some(beta)) => {
                ensure_positive("D", d)?;
                ensure_positive("beta", beta)?;
                Ok(d * (self.p as f64).powf(beta))
            }
            _ => Err(invalid("either mu2 or both D and beta are required")),
        }
    }

    /// `κ = M D`, when `D` is known.
    pub fn kappa(&self) -> Option<f64> {
        self.d.map(|d| self.m * d)
    }

    /// `κ₂ = M₂^{2/3} D`, when both are known.
    pub fn kappa2(&self) -> Option<f64> {
        Some(self.m2?.powf(2.0 / 3.0) * self.d?)
    }

    fn hess_lipschitz(&self) -> Result<f64> {
        self.m2
            .ok_or_else(|| Error::Capability("this recipe needs the Hessian-Lipschitz constant M2".into()))
    }
}

/// The four tuning recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    Lmc,
    LmcHessian,
    Klmc,
    Klmc2,
}

impl Recipe {
    pub fn sampler(self) -> Algorithm {
        match self {
            Recipe::Lmc | Recipe::LmcHessian => Algorithm::Lmc,
            Recipe::Klmc => Algorithm::Klmc,
            Recipe::Klmc2 => Algorithm::Klmc2,
        }
    }
}

/// The three-term error decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub finiteness: f64,
    pub discretization: f64,
    pub lack_of_strong_convexity: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.finiteness + self.discretization + self.lack_of_strong_convexity
    }
}

/// Tuned parameters together with the bound they guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub recipe: Recipe,
    pub q: u8,
    pub alpha: f64,
    pub h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Number of steps (ceiling of `k_real`).
    #[serde(rename = "K")]
    pub k: u64,
    /// Real-valued step count from the recipe, before the ceiling.
    pub k_real: f64,
    pub bound_terms: BoundTerms,
    /// Sum of the three bound terms at `(α, h, γ, K)`.
    pub predicted_error: f64,
    /// Scaled target `ε√μ₂`.
    pub target: f64,
    /// Closed-form upper estimate of `K` for this recipe.
    pub complexity_formula_value: f64,
}

impl Plan {
    pub fn sampler_config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            algorithm: self.recipe.sampler(),
            alpha: self.alpha,
            h: self.h,
            gamma: self.gamma,
            steps: usize::try_from(self.k).unwrap_or(usize::MAX),
            seed,
            initial_theta: None,
            stride: 1,
        }
    }
}

fn infeasible(constraint: &str, detail: String) -> Error {
    Error::Infeasible { constraint: constraint.into(), detail }
}

fn check_common(m: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(infeasible("alpha > 0", format!("alpha = {alpha}")));
    }
    if alpha > m / 20.0 {
        return Err(infeasible("alpha <= M/20", format!("alpha = {alpha}, M/20 = {}", m / 20.0)));
    }
    Ok(())
}

fn check_positive_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(infeasible("h > 0", format!("h = {h}")))
    }
}

/// Preconditions of the LMC bounds: `α ≤ M/20`, `h ≤ 1/(M+α)`.
pub fn check_lmc_preconditions(m: f64, alpha: f64, h: f64) -> Result<()> {
    check_common(m, alpha)?;
    check_positive_step(h)?;
    let cap = 1.0 / (m + alpha);
    if h > cap {
        return Err(infeasible("h <= 1/(M+alpha)", format!("h = {h}, cap = {cap}")));
    }
    Ok(())
}

fn check_friction(m: f64, alpha: f64, gamma: f64) -> Result<()> {
    let min = (m + 2.0 * alpha).sqrt();
    if !(gamma >= min) {
        return Err(infeasible("gamma >= sqrt(M+2alpha)", format!("gamma = {gamma}, minimum = {min}")));
    }
    Ok(())
}

/// Preconditions of the KLMC bound: `α ≤ M/20`, `γ ≥ √(M+2α)`, `h ≤ α/(4γ(M+α))`.
pub fn check_klmc_preconditions(m: f64, alpha: f64, h: f64, gamma: f64) -> Result<()> {
    check_common(m, alpha)?;
    check_positive_step(h)?;
    check_friction(m, alpha, gamma)?;
    let cap = alpha / (4.0 * gamma * (m + alpha));
    if h > cap {
        return Err(infeasible("h <= alpha/(4 gamma (M+alpha))", format!("h = {h}, cap = {cap}")));
    }
    Ok(())
}

/// Preconditions of the KLMC2 bound: `α ≤ M/20`, `γ ≥ √(M+2α)` and
/// `h ≤ α/(5γ(M+α)) ∧ α/(4M₂√(5p))` (the second cap is void when `M₂ = 0`).
pub fn check_klmc2_preconditions(m: f64, m2: f64, p: usize, alpha: f64, h: f64, gamma: f64) -> Result<()> {
    check_common(m, alpha)?;
    check_positive_step(h)?;
    check_friction(m, alpha, gamma)?;
    let cap1 = alpha / (5.0 * gamma * (m + alpha));
    if h > cap1 {
        return Err(infeasible("h <= alpha/(5 gamma (M+alpha))", format!("h = {h}, cap = {cap1}")));
    }
    if m2 > 0.0 {
        let cap2 = alpha / (4.0 * m2 * (5.0 * p as f64).sqrt());
        if h > cap2 {
            return Err(infeasible("h <= alpha/(4 M2 sqrt(5p))", format!("h = {h}, cap = {cap2}")));
        }
    }
    Ok(())
}

/// `(1 - r)^n` computed as `exp(n·log1p(-r))`, accurate when `r` is tiny and `n` huge.
fn contraction(r: f64, n: f64) -> f64 {
    (n * (-r).ln_1p()).exp()
}

/// Error bound of α-LMC in the gradient-Lipschitz setting.
#[allow(clippy::too_many_arguments)]
pub fn lmc_bound(m: f64, p: usize, mu2: f64, alpha: f64, h: f64, k: f64, q: u8) -> Result<BoundTerms> {
    check_lmc_preconditions(m, alpha, h)?;
    let p = p as f64;
    Ok(BoundTerms {
        finiteness: mu2.sqrt() * contraction(alpha * h, k / 2.0),
        discretization: (2.1 * h * m * p / alpha).sqrt(),
        lack_of_strong_convexity: wq_bias(BIAS_CONSTANTS.c_q(q)?, alpha, mu2, q),
    })
}

/// Error bound of α-LMC in the Hessian-Lipschitz setting.
#[allow(clippy::too_many_arguments)]
pub fn lmc_hessian_bound(m: f64, m2: f64, p: usize, mu2: f64, alpha: f64, h: f64, k: f64, q: u8) -> Result<BoundTerms> {
    check_lmc_preconditions(m, alpha, h)?;
    let p = p as f64;
    Ok(BoundTerms {
        finiteness: mu2.sqrt() * contraction(alpha * h, k),
        discretization: m2 * h * p / (2.0 * alpha) + 2.8 * m.powf(1.5) * h * p.sqrt() / alpha,
        lack_of_strong_convexity: wq_bias(BIAS_CONSTANTS.c_q(q)?, alpha, mu2, q),
    })
}

/// Error bound of α-KLMC.
#[allow(clippy::too_many_arguments)]
pub fn klmc_bound(m: f64, p: usize, mu2: f64, alpha: f64, h: f64, gamma: f64, k: f64, q: u8) -> Result<BoundTerms> {
    check_klmc_preconditions(m, alpha, h, gamma)?;
    let p = p as f64;
    Ok(BoundTerms {
        finiteness: (2.0 * mu2).sqrt() * contraction(3.0 * alpha * h / (4.0 * gamma), k),
        discretization: 1.5 * m * p.sqrt() * h / alpha,
        lack_of_strong_convexity: wq_bias(BIAS_CONSTANTS.c_q(q)?, alpha, mu2, q),
    })
}

/// `Q = M₂ + M^{3/2} p^{-1/2}` of the KLMC2 bound.
pub fn klmc2_q(m: f64, m2: f64, p: usize) -> f64 {
    m2 + m.powf(1.5) / (p as f64).sqrt()
}

/// `Q = M₂ + 5.6 M^{3/2} p^{-1/2}` of the Hessian-Lipschitz LMC recipe.
pub fn lmc_hessian_q(m: f64, m2: f64, p: usize) -> f64 {
    m2 + 5.6 * m.powf(1.5) / (p as f64).sqrt()
}

/// Error bound of α-KLMC2.
#[allow(clippy::too_many_arguments)]
pub fn klmc2_bound(
    m: f64,
    m2: f64,
    p: usize,
    mu2: f64,
    alpha: f64,
    h: f64,
    gamma: f64,
    k: f64,
    q: u8,
) -> Result<BoundTerms> {
    check_klmc2_preconditions(m, m2, p, alpha, h, gamma)?;
    let qq = klmc2_q(m, m2, p);
    let tail = if m2 == 0.0 {
        0.0
    } else {
        1.6 / m.sqrt() * (-(alpha / h).powi(2) / (160.0 * m2 * m2)).exp()
    };
    Ok(BoundTerms {
        finiteness: (2.0 * mu2).sqrt() * contraction(alpha * h / (4.0 * gamma), k),
        discretization: 2.0 * h * h * qq * p as f64 / alpha + tail,
        lack_of_strong_convexity: wq_bias(BIAS_CONSTANTS.c_q(q)?, alpha, mu2, q),
    })
}

/// Parameters at which to evaluate a recipe's error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundQuery {
    #[serde(rename = "alg")]
    pub recipe: Recipe,
    pub p: usize,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "M2", default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    pub mu2: f64,
    pub alpha: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: u8,
}

/// Three-term bound of `query.recipe` at the given parameters, after its preconditions are checked.
pub fn evaluate_bound(query: &BoundQuery) -> Result<BoundTerms> {
    let BoundQuery { recipe, p, m, m2, mu2, alpha, h, gamma, k, q } = *query;
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    ensure_positive("M", m)?;
    ensure_positive("mu2", mu2)?;
    ensure_nonnegative("K", k)?;
    let need_m2 = || m2.ok_or_else(|| Error::Capability(format!("{recipe:?} bound needs M2")));
    let need_gamma = || gamma.ok_or_else(|| invalid(format!("{recipe:?} bound needs gamma")));
    match recipe {
        Recipe::Lmc => lmc_bound(m, p, mu2, alpha, h, k, q),
        Recipe::LmcHessian => lmc_hessian_bound(m, need_m2()?, p, mu2, alpha, h, k, q),
        Recipe::Klmc => klmc_bound(m, p, mu2, alpha, h, need_gamma()?, k, q),
        Recipe::Klmc2 => klmc2_bound(m, need_m2()?, p, mu2, alpha, h, need_gamma()?, k, q),
    }
}

/// Closed-form upper estimates of `K` (before any ceiling) per recipe and `q`.
pub fn k_upper_estimate(recipe: Recipe, m: f64, m2: Option<f64>, p: usize, mu2: f64, epsilon: f64, q: u8) -> Result<f64> {
    let pf = p as f64;
    let e = epsilon;
    BIAS_CONSTANTS.c_q(q)?;
    let need_m2 = || m2.ok_or_else(|| Error::Capability("M2 is required".into()));
    Ok(match (recipe, q) {
        (Recipe::Lmc, 1) => 4.3e4 * m * mu2 * pf / e.powi(4) * (100.0 / e).ln(),
        (Recipe::Lmc, _) => 3.6e6 * m * mu2 * pf / e.powi(6) * (100.0 / e).ln(),
        (Recipe::LmcHessian, _) => {
            let qq = lmc_hessian_q(m, need_m2()?, p);
            let (c, pow) = if q == 1 { (2e3, 3) } else { (9.9e4, 5) };
            c * mu2.powf(1.5) * qq * pf / e.powi(pow) * (100.0 / e).ln()
        }
        (Recipe::Klmc, _) => {
            let (c, pow) = if q == 1 { (9.2e3, 3) } else { (4.4e5, 5) };
            c * (m * mu2).powf(1.5) * pf.sqrt() / e.powi(pow) * (150.0 / e).ln()
        }
        (Recipe::Klmc2, _) => {
            let m2 = need_m2()?;
            let qq = klmc2_q(m, m2, p);
            let log_term = 1.6 * (160.0 / (e * (m * mu2).sqrt())).ln();
            let (c, pow, other) = if q == 1 {
                (2.2e4, 2, qq * pf / (23.0 * mu2.powf(1.5)))
            } else {
                (5.4e6, 4, e * qq * pf / (116.0 * mu2.powf(1.5)))
            };
            // M₂·{L ∨ X/M₂²}^{1/2} written as {M₂²L ∨ X}^{1/2} so that M₂ = 0 is finite
            c * m.sqrt() * mu2 * mu2 / e.powi(pow) * (m2 * m2 * log_term).max(other).sqrt() * (142.0 / e).ln()
        }
    })
}

fn finish(
    recipe: Recipe,
    inputs: &PlannerInputs,
    alpha: f64,
    h: f64,
    gamma: Option<f64>,
    k_real: f64,
    bound: impl FnOnce(f64) -> Result<BoundTerms>,
) -> Result<Plan> {
    let mu2 = inputs.mu2_value()?;
    if !(k_real.is_finite() && k_real > 0.0) {
        return Err(Error::Numeric(format!("step count {k_real} is not a positive finite number")));
    }
    let k = k_real.ceil();
    let terms = bound(k)?;
    Ok(Plan {
        recipe,
        q: inputs.q,
        alpha,
        h,
        gamma,
        k: if k >= u64::MAX as f64 { u64::MAX } else { k as u64 },
        k_real,
        bound_terms: terms,
        predicted_error: terms.total(),
        target: scaled_error_target(mu2, inputs.epsilon)?,
        complexity_formula_value: k_upper_estimate(recipe, inputs.m, inputs.m2, inputs.p, mu2, inputs.epsilon, inputs.q)?,
    })
}

/// α-LMC recipe under a Lipschitz gradient.
pub fn plan_lmc(inputs: &PlannerInputs) -> Result<Plan> {
    inputs.validate()?;
    let (m, p, e, mu2) = (inputs.m, inputs.p as f64, inputs.epsilon, inputs.mu2_value()?);
    let (alpha, h) = if inputs.q == 1 {
        let h = e.powi(3) / (322.0 * m * p);
        (((2.1 * h * m * p).powf(1.0 / 3.0)) / (44f64.powf(2.0 / 3.0) * mu2), h)
    } else {
        let h = e.powi(4) / (3900.0 * m * p);
        ((2.1 * h * m * p).sqrt() / (111f64.sqrt() * mu2), h)
    };
    let k_real = 2.0 / (alpha * h) * (100.0 / e).ln();
    finish(Recipe::Lmc, inputs, alpha, h, None, k_real, |k| lmc_bound(m, inputs.p, mu2, alpha, h, k, inputs.q))
}

/// α-LMC recipe under a Lipschitz Hessian.
pub fn plan_lmc_hessian(inputs: &PlannerInputs) -> Result<Plan> {
    inputs.validate()?;
    let m2 = inputs.hess_lipschitz()?;
    let (m, p, e, mu2) = (inputs.m, inputs.p as f64, inputs.epsilon, inputs.mu2_value()?);
    let qq = lmc_hessian_q(m, m2, inputs.p);
    let (alpha, h) = if inputs.q == 1 {
        let h = e * e / (45.0 * mu2.sqrt() * qq * p);
        ((h * qq * p / (44.0 * mu2.powf(1.5))).sqrt(), h)
    } else {
        let h = e.powi(3) / (387.0 * mu2.sqrt() * qq * p);
        ((h * qq * p).powf(2.0 / 3.0) / (111.0 * mu2 * mu2).powf(1.0 / 3.0), h)
    };
    let k_real = 2.0 / (alpha * h) * (100.0 / e).ln();
    finish(Recipe::LmcHessian, inputs, alpha, h, None, k_real, |k| {
        lmc_hessian_bound(m, m2, inputs.p, mu2, alpha, h, k, inputs.q)
    })
}

/// α-KLMC recipe with the lowest admissible friction `γ = √(M+2α)`.
pub fn plan_klmc(inputs: &PlannerInputs) -> Result<Plan> {
    inputs.validate()?;
    let (m, p, e, mu2) = (inputs.m, inputs.p as f64, inputs.epsilon, inputs.mu2_value()?);
    let (alpha, h) = if inputs.q == 1 {
        let h = e * e / (143.0 * m * (mu2 * p).sqrt());
        ((1.5 * h * m * p.sqrt()).sqrt() / (22.0 * mu2.powf(1.5)).sqrt(), h)
    } else {
        let h = e.powi(4) / (1200.0 * m * (mu2 * p).sqrt());
        ((3.0 * h * m * p.sqrt()).powf(2.0 / 3.0) / (111.0 * mu2 * mu2).powf(1.0 / 3.0), h)
    };
    let gamma = (m + 2.0 * alpha).sqrt();
    let k_real = 4.0 * gamma / (3.0 * alpha * h) * (150.0 / e).ln();
    finish(Recipe::Klmc, inputs, alpha, h, Some(gamma), k_real, |k| {
        klmc_bound(m, inputs.p, mu2, alpha, h, gamma, k, inputs.q)
    })
}

/// α-KLMC2 recipe with `γ = √(M+2α)`.
pub fn plan_klmc2(inputs: &PlannerInputs) -> Result<Plan> {
    inputs.validate()?;
    let m2 = inputs.hess_lipschitz()?;
    let (m, p, e, mu2) = (inputs.m, inputs.p as f64, inputs.epsilon, inputs.mu2_value()?);
    let qq = klmc2_q(m, m2, inputs.p);
    let alpha = if inputs.q == 1 { e / (23.0 * mu2) } else { e * e / (116.0 * mu2) };
    let log_branch = 160.0 * m2 * m2 * (160.0 / (e * (m * mu2).sqrt())).ln();
    let moment_branch = 100.0 * alpha * qq * p / (e * mu2.sqrt());
    let h = alpha / log_branch.max(moment_branch).sqrt();
    let gamma = (m + 2.0 * alpha).sqrt();
    let k_real = 4.0 * gamma / (alpha * h) * (142.0 / e).ln();
    finish(Recipe::Klmc2, inputs, alpha, h, Some(gamma), k_real, |k| {
        klmc2_bound(m, m2, inputs.p, mu2, alpha, h, gamma, k, inputs.q)
    })
}

pub fn plan(recipe: Recipe, inputs: &PlannerInputs) -> Result<Plan> {
    match recipe {
        Recipe::Lmc => plan_lmc(inputs),
        Recipe::LmcHessian => plan_lmc_hessian(inputs),
        Recipe::Klmc => plan_klmc(inputs),
        Recipe::Klmc2 => plan_klmc2(inputs),
    }
}

/// Sampling-error criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "TV")]
    Tv,
    W1,
    W2,
}

impl Metric {
    pub fn order(self) -> Option<u8> {
        match self {
            Metric::Tv => None,
            Metric::W1 => Some(1),
            Metric::W2 => Some(2),
        }
    }
}

/// Algorithms of the complexity reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityAlgorithm {
    /// LMC with averaging.
    Lmca,
    Lmc,
    LmcHessian,
    Klmc,
    Klmc2,
    /// Metropolis-adjusted Langevin, quoted for comparison.
    Mala,
}

/// Problem description for the complexity reference, in condition-number form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityInputs {
    pub kappa: f64,
    #[serde(default)]
    pub kappa2: Option<f64>,
    pub p: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(rename = "eps")]
    pub epsilon: f64,
}

fn default_beta() -> f64 {
    1.0
}

/// Iteration-count formula of `algorithm` for `metric`, logarithmic factors
/// included. The recipe formulas are expressed through `κ`, `κ₂` and
/// `μ₂ = D p^β`; they do not depend on `D`, which is set to 1.
pub fn complexity_reference(inputs: &ComplexityInputs, algorithm: ComplexityAlgorithm, metric: Metric) -> Result<f64> {
    let ComplexityInputs { kappa, kappa2, p, beta, epsilon } = *inputs;
    ensure_positive("kappa", kappa)?;
    ensure_positive("eps", epsilon)?;
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    let pf = p as f64;
    let unsupported = || {
        Err(Error::Unsupported(format!("no tabulated complexity for {algorithm:?} under {metric:?}")))
    };
    let recipe = |r: Recipe, q: u8| {
        let m2 = kappa2.map(|k2| k2.powf(1.5));
        k_upper_estimate(r, kappa, m2, p, pf.powf(beta), epsilon, q)
    };
    match (algorithm, metric) {
        (ComplexityAlgorithm::Lmca, Metric::Tv) => Ok(kappa * pf.powf(1.0 + beta) / (2.0 * epsilon.powi(4))),
        (ComplexityAlgorithm::Mala, Metric::Tv) => {
            Ok(pf.powi(3) * kappa.powf(1.5) * epsilon.powf(-1.5) * (pf * kappa / epsilon).ln().powf(1.5))
        }
        (ComplexityAlgorithm::Lmc, Metric::Tv) if beta == 1.0 => Ok(pf.powi(3) / epsilon.powi(4)),
        (ComplexityAlgorithm::Lmc, Metric::W1 | Metric::W2)
        | (ComplexityAlgorithm::Klmc, Metric::W1 | Metric::W2) => {
            let r = if algorithm == ComplexityAlgorithm::Lmc { Recipe::Lmc } else { Recipe::Klmc };
            recipe(r, metric.order().expect("Wasserstein metric"))
        }
        (ComplexityAlgorithm::LmcHessian | ComplexityAlgorithm::Klmc2, Metric::W1 | Metric::W2) => {
            if kappa2.is_none() {
                return Err(Error::Capability("this row needs kappa2".into()));
            }
            let r = if algorithm == ComplexityAlgorithm::LmcHessian { Recipe::LmcHessian } else { Recipe::Klmc2 };
            recipe(r, metric.order().expect("Wasserstein metric"))
        }
        _ => unsupported(),
    }
}
