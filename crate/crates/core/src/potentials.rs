//! Target potentials `f = -log π` (up to a constant) and the ridge-penalized
//! surrogate `f_α(θ) = f(θ) + α‖θ‖²/2`.
//!
//! A [`Potential`] bundles the value/gradient oracles, an optional
//! Hessian-vector oracle, and the smoothness metadata (gradient-Lipschitz
//! constant `M`, Hessian-Lipschitz constant `M₂`, convexity class) that the
//! planner and the moment bounds consume.
//!
//! Built-in targets: diagonal Gaussians (exact oracles for every sampler), the
//! radial "capped quadratic" `½r²·1{r≤1} + r·1{r>1}` used for the moment lower
//! bound, and a smoothed-Huber family that is `m`-strongly convex inside a ball.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Error, Result};

/// Where (if anywhere) the potential is strongly convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ConvexityClass {
    Convex,
    StronglyConvex { m: f64 },
    StrongInsideBall { m: f64, radius: f64 },
    StrongOutsideBall { m: f64, radius: f64 },
}

impl ConvexityClass {
    /// Global strong-convexity modulus, zero when only convex.
    pub fn global_modulus(&self) -> f64 {
        match *self {
            ConvexityClass::StronglyConvex { m } => m,
            _ => 0.0,
        }
    }
}

/// Smoothness metadata attached to a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    /// `M`: Lipschitz constant of `∇f`.
    pub grad_lipschitz: f64,
    /// `M₂`: Lipschitz constant of `∇²f` in spectral norm, when known.
    pub hess_lipschitz: Option<f64>,
    pub convexity: ConvexityClass,
    pub minimizer: Option<Vec<f64>>,
}

/// A target potential. Oracles must be pure: implementations are shared by
/// reference across concurrently running chains.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, theta: &[f64]) -> f64;

    /// Writes `∇f(θ)` into `out`.
    fn grad(&self, theta: &[f64], out: &mut [f64]);

    fn has_hess_vec(&self) -> bool {
        false
    }

    /// Writes `∇²f(θ)·v` into `out`.
    fn hess_vec(&self, _theta: &[f64], _v: &[f64], _out: &mut [f64]) -> Result<()> {
        Err(Error::Capability("potential has no Hessian-vector oracle".into()))
    }

    fn smoothness(&self) -> &Smoothness;

    /// Diagonal of the precision matrix when `f(θ) = ½ Σ λᵢ θᵢ²`.
    fn quadratic_precision(&self) -> Option<&[f64]> {
        None
    }

    /// Radial profile `φ` when `f(θ) = φ(‖θ‖₂)`.
    fn radial_profile(&self) -> Option<RadialProfile> {
        None
    }
}

impl<P: Potential + ?Sized> Potential for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, theta: &[f64]) -> f64 {
        (**self).value(theta)
    }
    fn grad(&self, theta: &[f64], out: &mut [f64]) {
        (**self).grad(theta, out)
    }
    fn has_hess_vec(&self) -> bool {
        (**self).has_hess_vec()
    }
    fn hess_vec(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).hess_vec(theta, v, out)
    }
    fn smoothness(&self) -> &Smoothness {
        (**self).smoothness()
    }
    fn quadratic_precision(&self) -> Option<&[f64]> {
        (**self).quadratic_precision()
    }
    fn radial_profile(&self) -> Option<RadialProfile> {
        (**self).radial_profile()
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `f(θ) = ½ Σ λᵢ θᵢ²` with every `λᵢ > 0`.
#[derive(Debug, Clone)]
pub struct GaussianPotential {
    precision: Vec<f64>,
    smoothness: Smoothness,
}

pub fn make_gaussian_potential(p: usize, precision_diagonal: &[f64]) -> Result<GaussianPotential> {
    if p == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if precision_diagonal.len() != p {
        return Err(invalid(format!(
            "precision has {} entries, expected p = {p}",
            precision_diagonal.len()
        )));
    }
    for (i, &l) in precision_diagonal.iter().enumerate() {
        ensure_positive(&format!("precision[{i}]"), l)?;
    }
    let max = precision_diagonal.iter().copied().fold(f64::MIN, f64::max);
    let min = precision_diagonal.iter().copied().fold(f64::MAX, f64::min);
    Ok(GaussianPotential {
        precision: precision_diagonal.to_vec(),
        smoothness: Smoothness {
            grad_lipschitz: max,
            hess_lipschitz: Some(0.0),
            convexity: ConvexityClass::StronglyConvex { m: min },
            minimizer: Some(vec![0.0; p]),
        },
    })
}

impl GaussianPotential {
    /// Standard Gaussian `N(0, I_p)`.
    pub fn standard(p: usize) -> Result<Self> {
        make_gaussian_potential(p, &vec![1.0; p])
    }

    pub fn precision(&self) -> &[f64] {
        &self.precision
    }

    /// `μ₂(π) = E‖θ‖² = Σ 1/λᵢ`.
    pub fn second_moment(&self) -> f64 {
        self.precision.iter().map(|l| 1.0 / l).sum()
    }
}

impl Potential for GaussianPotential {
    fn dim(&self) -> usize {
        self.precision.len()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        0.5 * self.precision.iter().zip(theta).map(|(l, t)| l * t * t).sum::<f64>()
    }

    fn grad(&self, theta: &[f64], out: &mut [f64]) {
        for ((o, l), t) in out.iter_mut().zip(&self.precision).zip(theta) {
            *o = l * t;
        }
    }

    fn has_hess_vec(&self) -> bool {
        true
    }

    fn hess_vec(&self, _theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        for ((o, l), x) in out.iter_mut().zip(&self.precision).zip(v) {
            *o = l * x;
        }
        Ok(())
    }

    fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }

    fn quadratic_precision(&self) -> Option<&[f64]> {
        Some(&self.precision)
    }

    fn radial_profile(&self) -> Option<RadialProfile> {
        let l0 = self.precision[0];
        self.precision
            .iter()
            .all(|&l| l == l0)
            .then_some(RadialProfile::Quadratic { curvature: l0 })
    }
}

/// Scalar profiles `φ(r)` of the built-in radial potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `φ(r) = c r²/2`.
    Quadratic { curvature: f64 },
    /// `φ(r) = r²/2` for `r ≤ 1`, `r` for `r > 1`. The gradient is continuous
    /// at `r = 1`; the value jumps from `1/2` to `1`.
    CappedQuadratic,
    /// `φ(r) = m r²/2` for `r ≤ R`, `mRr - mR²/2` for `r > R` (C¹, convex).
    SmoothedHuber { m: f64, radius: f64 },
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Quadratic { curvature } => 0.5 * curvature * r * r,
            RadialProfile::CappedQuadratic => {
                if r <= 1.0 {
                    0.5 * r * r
                } else {
                    r
                }
            }
            RadialProfile::SmoothedHuber { m, radius } => {
                if r <= radius {
                    0.5 * m * r * r
                } else {
                    m * radius * r - 0.5 * m * radius * radius
                }
            }
        }
    }

    /// `φ'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Quadratic { curvature } => curvature * r,
            RadialProfile::CappedQuadratic => r.min(1.0),
            RadialProfile::SmoothedHuber { m, radius } => m * r.min(radius),
        }
    }

    /// `φ''(r)`, taking the inner branch at a seam.
    pub fn second_derivative(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Quadratic { curvature } => curvature,
            RadialProfile::CappedQuadratic => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RadialProfile::SmoothedHuber { m, radius } => {
                if r <= radius {
                    m
                } else {
                    0.0
                }
            }
        }
    }

    /// `φ'(r)/r`, with the analytic limit `φ''(0)` at the origin.
    fn derivative_over_r(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.second_derivative(0.0)
        } else {
            self.derivative(r) / r
        }
    }

    /// Radii where the profile changes branch.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            RadialProfile::Quadratic { .. } => vec![],
            RadialProfile::CappedQuadratic => vec![1.0],
            RadialProfile::SmoothedHuber { radius, .. } => vec![radius],
        }
    }
}

/// `f(θ) = φ(‖θ‖₂)` for one of the built-in profiles.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    p: usize,
    profile: RadialProfile,
    smoothness: Smoothness,
}

pub fn make_capped_quadratic_potential(p: usize) -> Result<RadialPotential> {
    if p == 0 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(RadialPotential {
        p,
        profile: RadialProfile::CappedQuadratic,
        smoothness: Smoothness {
            grad_lipschitz: 1.0,
            hess_lipschitz: None,
            convexity: ConvexityClass::StrongInsideBall { m: 1.0, radius: 1.0 },
            minimizer: Some(vec![0.0; p]),
        },
    })
}

pub fn make_smoothed_huber_potential(p: usize, m: f64, radius: f64) -> Result<RadialPotential> {
    if p == 0 {
        return Err(invalid("dimension must be positive"));
    }
    ensure_positive("m", m)?;
    ensure_positive("R", radius)?;
    Ok(RadialPotential {
        p,
        profile: RadialProfile::SmoothedHuber { m, radius },
        smoothness: Smoothness {
            grad_lipschitz: m,
            hess_lipschitz: None,
            convexity: ConvexityClass::StrongInsideBall { m, radius },
            minimizer: Some(vec![0.0; p]),
        },
    })
}

impl RadialPotential {
    pub fn profile(&self) -> RadialProfile {
        self.profile
    }
}

impl Potential for RadialPotential {
    fn dim(&self) -> usize {
        self.p
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.profile.value(norm2(theta))
    }

    fn grad(&self, theta: &[f64], out: &mut [f64]) {
        let s = self.profile.derivative_over_r(norm2(theta));
        for (o, t) in out.iter_mut().zip(theta) {
            *o = s * t;
        }
    }

    fn has_hess_vec(&self) -> bool {
        true
    }

    fn hess_vec(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        let r = norm2(theta);
        let tangential = self.profile.derivative_over_r(r);
        if r == 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o = tangential * x;
            }
            return Ok(());
        }
        let radial = self.profile.second_derivative(r);
        let proj = dot(theta, v) / (r * r);
        for ((o, x), t) in out.iter_mut().zip(v).zip(theta) {
            *o = tangential * x + (radial - tangential) * proj * t;
        }
        Ok(())
    }

    fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }

    fn radial_profile(&self) -> Option<RadialProfile> {
        Some(self.profile)
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type HessVecFn = Box<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;

/// A potential assembled from user closures.
pub struct FnPotential {
    p: usize,
    value: ValueFn,
    grad: GradFn,
    hess_vec: Option<HessVecFn>,
    smoothness: Smoothness,
}

impl FnPotential {
    pub fn new(
        p: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        smoothness: Smoothness,
    ) -> Result<Self> {
        if p == 0 {
            return Err(invalid("dimension must be positive"));
        }
        ensure_nonnegative("grad_lipschitz", smoothness.grad_lipschitz)?;
        Ok(Self { p, value: Box::new(value), grad: Box::new(grad), hess_vec: None, smoothness })
    }

    pub fn with_hess_vec(mut self, hv: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.hess_vec = Some(Box::new(hv));
        self
    }
}

impl std::fmt::Debug for FnPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnPotential")
            .field("p", &self.p)
            .field("has_hess_vec", &self.hess_vec.is_some())
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl Potential for FnPotential {
    fn dim(&self) -> usize {
        self.p
    }
    fn value(&self, theta: &[f64]) -> f64 {
        (self.value)(theta)
    }
    fn grad(&self, theta: &[f64], out: &mut [f64]) {
        (self.grad)(theta, out)
    }
    fn has_hess_vec(&self) -> bool {
        self.hess_vec.is_some()
    }
    fn hess_vec(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.hess_vec {
            Some(hv) => {
                hv(theta, v, out);
                Ok(())
            }
            None => Err(Error::Capability("potential has no Hessian-vector oracle".into())),
        }
    }
    fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }
}

/// `f_α(θ) = f(θ) + α‖θ‖²/2`, which is `α`-strongly convex whenever `f` is convex.
pub struct SurrogatePotential<'a> {
    base: &'a dyn Potential,
    alpha: f64,
    smoothness: Smoothness,
}

pub fn surrogate(base: &dyn Potential, alpha: f64) -> Result<SurrogatePotential<'_>> {
    ensure_nonnegative("alpha", alpha)?;
    let s = base.smoothness();
    let convexity = if alpha == 0.0 {
        s.convexity
    } else {
        ConvexityClass::StronglyConvex { m: s.convexity.global_modulus() + alpha }
    };
    let minimizer = match &s.minimizer {
        Some(t) if alpha == 0.0 || t.iter().all(|&x| x == 0.0) => Some(t.clone()),
        _ => None,
    };
    Ok(SurrogatePotential {
        base,
        alpha,
        smoothness: Smoothness {
            grad_lipschitz: s.grad_lipschitz + alpha,
            hess_lipschitz: s.hess_lipschitz,
            convexity,
            minimizer,
        },
    })
}

impl<'a> SurrogatePotential<'a> {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base(&self) -> &'a dyn Potential {
        self.base
    }

    /// Writes `g_α = ∇f(θ) + αθ`.
    pub fn penalized_grad(&self, theta: &[f64], out: &mut [f64]) {
        self.grad(theta, out)
    }
}

impl Potential for SurrogatePotential<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let v = self.base.value(theta);
        if self.alpha == 0.0 {
            return v;
        }
        v + self.alpha * dot(theta, theta) / 2.0
    }

    fn grad(&self, theta: &[f64], out: &mut [f64]) {
        self.base.grad(theta, out);
        if self.alpha != 0.0 {
            for (o, t) in out.iter_mut().zip(theta) {
                *o += self.alpha * t;
            }
        }
    }

    fn has_hess_vec(&self) -> bool {
        self.base.has_hess_vec()
    }

    fn hess_vec(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        self.base.hess_vec(theta, v, out)?;
        if self.alpha != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += self.alpha * x;
            }
        }
        Ok(())
    }

    fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }
}

/// JSON description of a built-in target, e.g.
/// `{"kind": "gaussian", "p": 4, "precision": [1, 2, 3, 4]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Gaussian {
        p: usize,
        /// Diagonal precision; defaults to the identity.
        #[serde(default)]
        precision: Option<Vec<f64>>,
    },
    CappedQuadratic {
        p: usize,
    },
    SmoothedHuber {
        p: usize,
        m: f64,
        #[serde(rename = "R")]
        radius: f64,
    },
}

impl TargetSpec {
    pub fn dim(&self) -> usize {
        match *self {
            TargetSpec::Gaussian { p, .. }
            | TargetSpec::CappedQuadratic { p }
            | TargetSpec::SmoothedHuber { p, .. } => p,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Potential>> {
        Ok(match self {
            TargetSpec::Gaussian { p, precision } => {
                let lambda = precision.clone().unwrap_or_else(|| vec![1.0; *p]);
                Box::new(make_gaussian_potential(*p, &lambda)?)
            }
            TargetSpec::CappedQuadratic { p } => Box::new(make_capped_quadratic_potential(*p)?),
            TargetSpec::SmoothedHuber { p, m, radius } => {
                Box::new(make_smoothed_huber_potential(*p, *m, *radius)?)
            }
        })
    }
}

/// Relative error between `∇f(θ)` and a 5-point central finite difference of
/// the value oracle with step `1e-4·(1 + ‖θ‖)`, measured as
/// `‖g - g_fd‖ / max(‖g‖, 1e-8)`.
pub fn finite_difference_gradient_error(potential: &dyn Potential, theta: &[f64]) -> f64 {
    let p = potential.dim();
    let step = 1e-4 * (1.0 + norm2(theta));
    let mut g = vec![0.0; p];
    potential.grad(theta, &mut g);
    let mut probe = theta.to_vec();
    let mut err2 = 0.0;
    for i in 0..p {
        let mut eval = |offset: f64| {
            probe[i] = theta[i] + offset;
            let v = potential.value(&probe);
            probe[i] = theta[i];
            v
        };
        let fd = (-eval(2.0 * step) + 8.0 * eval(step) - 8.0 * eval(-step) + eval(-2.0 * step)) / (12.0 * step);
        err2 += (g[i] - fd).powi(2);
    }
    err2.sqrt() / norm2(&g).max(1e-8)
}

/// `‖∇f(θ) - ∇f(θ')‖ / ‖θ - θ'‖`, a lower estimate of `M`.
pub fn gradient_lipschitz_ratio(potential: &dyn Potential, theta: &[f64], theta2: &[f64]) -> f64 {
    let p = potential.dim();
    let mut g1 = vec![0.0; p];
    let mut g2 = vec![0.0; p];
    potential.grad(theta, &mut g1);
    potential.grad(theta2, &mut g2);
    let dg: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
    let dt: Vec<f64> = theta.iter().zip(theta2).map(|(a, b)| a - b).collect();
    norm2(&dg) / norm2(&dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        let g = make_gaussian_potential(1, &[1.0]).unwrap();
        assert_eq!(g.value(&[2.0]), 2.0);
        let mut out = [0.0];
        g.grad(&[2.0], &mut out);
        assert_eq!(out, [2.0]);

        let g = make_gaussian_potential(2, &[1.0, 4.0]).unwrap();
        assert_eq!(g.smoothness().grad_lipschitz, 4.0);
        assert_eq!(g.smoothness().convexity, ConvexityClass::StronglyConvex { m: 1.0 });

        let g = make_gaussian_potential(3, &[2.0; 3]).unwrap();
        assert_eq!(g.value(&[1.0; 3]), 3.0);
        let mut out = [0.0; 3];
        g.grad(&[1.0; 3], &mut out);
        assert_eq!(out, [2.0; 3]);
        assert_eq!(g.smoothness().hess_lipschitz, Some(0.0));
    }

    #[test]
    fn gaussian_rejects_nonpositive_precision() {
        assert!(matches!(make_gaussian_potential(2, &[1.0, 0.0]), Err(Error::InvalidArgument(_))));
        assert!(make_gaussian_potential(2, &[1.0, -3.0]).is_err());
        assert!(make_gaussian_potential(2, &[1.0]).is_err());
        assert!(make_gaussian_potential(0, &[]).is_err());
    }

    #[test]
    fn capped_quadratic_branches() {
        let f = make_capped_quadratic_potential(2).unwrap();
        assert!((f.value(&[0.3, 0.4]) - 0.125).abs() < 1e-15);
        assert!((f.value(&[0.0, 2.0]) - 2.0).abs() < 1e-15);
        // at the seam the inner branch applies
        assert_eq!(f.value(&[0.6, 0.8]), 0.5);
        let mut g_in = [0.0; 2];
        let mut g_out = [0.0; 2];
        f.grad(&[0.6 * (1.0 - 1e-12), 0.8 * (1.0 - 1e-12)], &mut g_in);
        f.grad(&[0.6 * (1.0 + 1e-12), 0.8 * (1.0 + 1e-12)], &mut g_out);
        assert!((norm2(&g_in) - 1.0).abs() < 1e-11);
        assert!((norm2(&g_out) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn huber_specializes_to_capped_gradient() {
        let h = make_smoothed_huber_potential(3, 1.0, 1.0).unwrap();
        let c = make_capped_quadratic_potential(3).unwrap();
        for theta in [[0.1, 0.2, -0.3], [1.5, -2.0, 0.5], [0.0, 0.0, 0.0]] {
            let mut a = [0.0; 3];
            let mut b = [0.0; 3];
            h.grad(&theta, &mut a);
            c.grad(&theta, &mut b);
            assert_eq!(a, b);
            // values agree up to the constant offset 1/2 outside the ball
            let r = norm2(&theta);
            let offset = if r > 1.0 { 0.5 } else { 0.0 };
            assert!((c.value(&theta) - h.value(&theta) - offset).abs() < 1e-15);
        }
    }

    #[test]
    fn huber_interior_curvature() {
        let (m, radius) = (2.5, 2.0);
        let h = make_smoothed_huber_potential(4, m, radius).unwrap();
        let theta = [radius / 2.0, 0.0, 0.0, 0.0];
        for e in 0..4 {
            let mut v = [0.0; 4];
            v[e] = 1.0;
            let mut out = [0.0; 4];
            h.hess_vec(&theta, &v, &mut out).unwrap();
            assert!((out[e] - m).abs() < 1e-14);
        }
        assert!(make_smoothed_huber_potential(2, 0.0, 1.0).is_err());
        assert!(make_smoothed_huber_potential(2, 1.0, -1.0).is_err());
    }

    #[test]
    fn radial_gradient_at_origin_is_zero() {
        let h = make_smoothed_huber_potential(3, 1.0, 1.0).unwrap();
        let mut g = [1.0; 3];
        h.grad(&[0.0; 3], &mut g);
        assert_eq!(g, [0.0; 3]);
    }

    #[test]
    fn surrogate_identity_and_definition() {
        let g = make_gaussian_potential(2, &[1.0, 3.0]).unwrap();
        let s0 = surrogate(&g, 0.0).unwrap();
        let theta = [0.7, -1.3];
        assert_eq!(s0.value(&theta), g.value(&theta));

        let s = surrogate(&g, 0.1).unwrap();
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        s.grad(&theta, &mut a);
        g.grad(&theta, &mut b);
        for i in 0..2 {
            assert_eq!(a[i], b[i] + 0.1 * theta[i]);
        }
        assert_eq!(s.smoothness().grad_lipschitz, 3.1);
        assert!(surrogate(&g, -0.1).is_err());
    }

    #[test]
    fn surrogate_of_unit_gaussian_has_precision_two() {
        let g = make_gaussian_potential(1, &[1.0]).unwrap();
        let s = surrogate(&g, 1.0).unwrap();
        for x in [-3.0, 0.5, 2.0] {
            let mut out = [0.0];
            s.grad(&[x], &mut out);
            assert_eq!(out[0], 2.0 * x);
            let mut hv = [0.0];
            s.hess_vec(&[x], &[1.0], &mut hv).unwrap();
            assert_eq!(hv[0], 2.0);
        }
    }

    #[test]
    fn target_spec_json() {
        let spec: TargetSpec =
            serde_json::from_str(r#"{"kind": "gaussian", "p": 2, "precision": [1.0, 2.0]}"#).unwrap();
        let pot = spec.build().unwrap();
        assert_eq!(pot.dim(), 2);
        assert_eq!(pot.quadratic_precision(), Some(&[1.0, 2.0][..]));
        let spec: TargetSpec = serde_json::from_str(r#"{"kind": "smoothed_huber", "p": 3, "m": 1, "R": 2}"#).unwrap();
        assert_eq!(spec.build().unwrap().smoothness().grad_lipschitz, 1.0);
        assert!(serde_json::from_str::<TargetSpec>(r#"{"kind": "banana", "p": 2}"#).is_err());
    }
}
