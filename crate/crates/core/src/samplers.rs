//! The α-LMC, α-KLMC and α-KLMC2 chains.
//!
//! All three target the surrogate `π_α ∝ exp(-f - α‖θ‖²/2)`:
//!
//! ```text
//! LMC    θ' = (1 - αh)θ - h∇f(θ) + √(2h) ξ
//! KLMC   v' = ψ₀v - ψ₁g_α + √(2γ) ξ⁽¹⁾
//!        θ' = θ + ψ₁v - ψ₂g_α + √(2γ) ξ⁽²⁾
//! KLMC2  v' = ψ₀v - ψ₁g_α - φ₂H_αv + √(2γ)(ξ⁽¹⁾ - H_αξ⁽³⁾)
//!        θ' = θ + ψ₁v - ψ₂g_α - φ₃H_αv + √(2γ)(ξ⁽²⁾ - H_αξ⁽⁴⁾)
//! ```
//!
//! with `g_α = ∇f(θ) + αθ` and `H_α = ∇²f(θ) + αI`, both taken at the pre-step
//! position. `H_α` is only ever applied to vectors. Per coordinate,
//! `(ξ⁽¹⁾..ξ⁽⁴⁾) ~ N(0, C_{h,γ})`, drawn as `L·g` with `g` standard normal.
//!
//! Chains start at `θ₀` (default 0) and, for the kinetic samplers, `v₀ ~ N(0, I)`.
//! Randomness is addressed by `(seed, chain, step)` so every chain is
//! reproducible bit for bit and chains can run in any order on any thread.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Error, Result};
use crate::kernels::{eval_kernels, noise_covariance, KineticKernels, NoiseCovariance};
use crate::potentials::{surrogate, Potential, SurrogatePotential};
use crate::rng::NormalStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lmc,
    Klmc,
    Klmc2,
}

impl Algorithm {
    pub fn is_kinetic(self) -> bool {
        !matches!(self, Algorithm::Lmc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lmc => "lmc",
            Algorithm::Klmc => "klmc",
            Algorithm::Klmc2 => "klmc2",
        }
    }
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub h: f64,
    /// Friction; required by the kinetic samplers, ignored by LMC.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Number of steps `K`.
    #[serde(alias = "K")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Starting position; the origin when absent.
    #[serde(default)]
    pub initial_theta: Option<Vec<f64>>,
    /// Keep every `stride`-th iterate (the initial and final ones always).
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl SamplerConfig {
    pub fn lmc(alpha: f64, h: f64, steps: usize, seed: u64) -> Self {
        Self { algorithm: Algorithm::Lmc, alpha, h, gamma: None, steps, seed, initial_theta: None, stride: 1 }
    }

    pub fn kinetic(algorithm: Algorithm, alpha: f64, h: f64, gamma: f64, steps: usize, seed: u64) -> Self {
        Self { algorithm, alpha, h, gamma: Some(gamma), steps, seed, initial_theta: None, stride: 1 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_initial_theta(mut self, theta: Vec<f64>) -> Self {
        self.initial_theta = Some(theta);
        self
    }

    /// Friction of a kinetic config.
    pub fn friction(&self) -> Result<f64> {
        let gamma = self
            .gamma
            .ok_or_else(|| invalid(format!("{} needs a friction gamma", self.algorithm.name())))?;
        ensure_positive("gamma", gamma)?;
        Ok(gamma)
    }

    pub fn validate(&self, potential: &dyn Potential) -> Result<()> {
        ensure_nonnegative("alpha", self.alpha)?;
        ensure_positive("h", self.h)?;
        if self.stride == 0 {
            return Err(invalid("stride must be at least 1"));
        }
        if self.algorithm.is_kinetic() {
            self.friction()?;
        }
        if self.algorithm == Algorithm::Klmc2 && !potential.has_hess_vec() {
            return Err(Error::Capability("klmc2 needs a Hessian-vector oracle".into()));
        }
        if let Some(t) = &self.initial_theta {
            if t.len() != potential.dim() {
                return Err(invalid(format!("initial_theta has {} entries, expected {}", t.len(), potential.dim())));
            }
            if t.iter().any(|x| !x.is_finite()) {
                return Err(invalid("initial_theta must be finite"));
            }
        }
        Ok(())
    }
}

/// Position and velocity of a kinetic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticState {
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Recorded iterates of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub chain: u64,
    /// Step index of every recorded iterate.
    pub steps: Vec<usize>,
    pub states: Vec<Vec<f64>>,
    /// Velocities at the same steps, kinetic samplers only.
    pub velocities: Option<Vec<Vec<f64>>>,
    pub config: SamplerConfig,
    /// Standard normals consumed, including the initial velocity.
    pub rng_draw_count: u64,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory always holds its initial state")
    }
}

fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

fn diverged<T>() -> Result<T> {
    Err(Error::Divergence { step: 0, last_state: vec![] })
}

/// One α-LMC step. `noise` must be standard normal.
pub fn lmc_step(theta: &[f64], surrogate: &SurrogatePotential<'_>, h: f64, noise: &[f64]) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; theta.len()];
    let mut out = vec![0.0; theta.len()];
    lmc_step_into(theta, surrogate, h, noise, &mut grad, &mut out)?;
    Ok(out)
}

fn lmc_step_into(
    theta: &[f64],
    surrogate: &SurrogatePotential<'_>,
    h: f64,
    noise: &[f64],
    grad: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    surrogate.base().grad(theta, grad);
    let shrink = 1.0 - surrogate.alpha() * h;
    let scale = (2.0 * h).sqrt();
    for i in 0..theta.len() {
        out[i] = shrink * theta[i] - h * grad[i] + scale * noise[i];
    }
    if all_finite(out) {
        Ok(())
    } else {
        diverged()
    }
}

/// One α-KLMC step. `noise4[4i..4i + 4]` is the correlated increment
/// `(ξ⁽¹⁾..ξ⁽⁴⁾)` of coordinate `i`; only the first two components are used.
pub fn klmc_step(
    state: &KineticState,
    surrogate: &SurrogatePotential<'_>,
    kernels: &KineticKernels,
    noise4: &[f64],
) -> Result<KineticState> {
    let p = state.theta.len();
    let mut ws = Workspace::new(p);
    let mut out = KineticState { v: vec![0.0; p], theta: vec![0.0; p] };
    klmc_step_into(state, surrogate, kernels, noise4, &mut ws, &mut out)?;
    Ok(out)
}

/// One α-KLMC2 step; consumes all four noise components per coordinate.
pub fn klmc2_step(
    state: &KineticState,
    surrogate: &SurrogatePotential<'_>,
    kernels: &KineticKernels,
    noise4: &[f64],
) -> Result<KineticState> {
    let p = state.theta.len();
    let mut ws = Workspace::new(p);
    let mut out = KineticState { v: vec![0.0; p], theta: vec![0.0; p] };
    klmc2_step_into(state, surrogate, kernels, noise4, &mut ws, &mut out)?;
    Ok(out)
}

struct Workspace {
    grad: Vec<f64>,
    hv: Vec<f64>,
    h_xi3: Vec<f64>,
    h_xi4: Vec<f64>,
    xi3: Vec<f64>,
    xi4: Vec<f64>,
}

impl Workspace {
    fn new(p: usize) -> Self {
        Self {
            grad: vec![0.0; p],
            hv: vec![0.0; p],
            h_xi3: vec![0.0; p],
            h_xi4: vec![0.0; p],
            xi3: vec![0.0; p],
            xi4: vec![0.0; p],
        }
    }
}

fn klmc_step_into(
    state: &KineticState,
    surrogate: &SurrogatePotential<'_>,
    k: &KineticKernels,
    noise4: &[f64],
    ws: &mut Workspace,
    out: &mut KineticState,
) -> Result<()> {
    let (v, theta) = (&state.v, &state.theta);
    surrogate.grad(theta, &mut ws.grad);
    let g = &ws.grad;
    let s = (2.0 * k.gamma).sqrt();
    for i in 0..theta.len() {
        let xi1 = noise4[4 * i];
        let xi2 = noise4[4 * i + 1];
        out.v[i] = k.psi0 * v[i] - k.psi1 * g[i] + s * xi1;
        out.theta[i] = theta[i] + k.psi1 * v[i] - k.psi2 * g[i] + s * xi2;
    }
    if all_finite(&out.v) && all_finite(&out.theta) {
        Ok(())
    } else {
        diverged()
    }
}

fn klmc2_step_into(
    state: &KineticState,
    surrogate: &SurrogatePotential<'_>,
    k: &KineticKernels,
    noise4: &[f64],
    ws: &mut Workspace,
    out: &mut KineticState,
) -> Result<()> {
    let (v, theta) = (&state.v, &state.theta);
    let p = theta.len();
    for i in 0..p {
        ws.xi3[i] = noise4[4 * i + 2];
        ws.xi4[i] = noise4[4 * i + 3];
    }
    surrogate.grad(theta, &mut ws.grad);
    surrogate.hess_vec(theta, v, &mut ws.hv)?;
    surrogate.hess_vec(theta, &ws.xi3, &mut ws.h_xi3)?;
    surrogate.hess_vec(theta, &ws.xi4, &mut ws.h_xi4)?;
    let (g, hv) = (&ws.grad, &ws.hv);
    let s = (2.0 * k.gamma).sqrt();
    for i in 0..p {
        let xi1 = noise4[4 * i];
        let xi2 = noise4[4 * i + 1];
        out.v[i] = k.psi0 * v[i] - k.psi1 * g[i] - k.phi2 * hv[i] + s * (xi1 - ws.h_xi3[i]);
        out.theta[i] = theta[i] + k.psi1 * v[i] - k.psi2 * g[i] - k.phi3 * hv[i] + s * (xi2 - ws.h_xi4[i]);
    }
    if all_finite(&out.v) && all_finite(&out.theta) {
        Ok(())
    } else {
        diverged()
    }
}

/// Which iterates to keep.
#[derive(Debug, Clone, Copy)]
enum Keep {
    Strided(usize),
    FinalOnly,
}

impl Keep {
    fn records(self, k: usize, steps: usize) -> bool {
        match self {
            Keep::Strided(s) => k.is_multiple_of(s) || k == steps,
            Keep::FinalOnly => k == steps,
        }
    }
}

fn attach_step(err: Error, step: usize, last: &[f64]) -> Error {
    match err {
        Error::Divergence { .. } => Error::Divergence { step, last_state: last.to_vec() },
        other => other,
    }
}

fn run_impl(config: &SamplerConfig, potential: &dyn Potential, chain: u64, keep: Keep) -> Result<Trajectory> {
    config.validate(potential)?;
    let p = potential.dim();
    let sur = surrogate(potential, config.alpha)?;
    let theta0 = config.initial_theta.clone().unwrap_or_else(|| vec![0.0; p]);
    let steps = config.steps;

    let mut traj = Trajectory {
        chain,
        steps: vec![],
        states: vec![],
        velocities: None,
        config: config.clone(),
        rng_draw_count: 0,
    };

    match config.algorithm {
        Algorithm::Lmc => {
            let mut stream = NormalStream::new(config.seed, chain, p);
            let mut noise = vec![0.0; p];
            let mut grad = vec![0.0; p];
            let mut theta = theta0;
            let mut next = vec![0.0; p];
            if keep.records(0, steps) {
                traj.steps.push(0);
                traj.states.push(theta.clone());
            }
            for k in 1..=steps {
                stream.fill_slot(k as u64, &mut noise);
                lmc_step_into(&theta, &sur, config.h, &noise, &mut grad, &mut next)
                    .map_err(|e| attach_step(e, k, &theta))?;
                std::mem::swap(&mut theta, &mut next);
                if keep.records(k, steps) {
                    traj.steps.push(k);
                    traj.states.push(theta.clone());
                }
            }
            traj.rng_draw_count = stream.draw_count();
        }
        Algorithm::Klmc | Algorithm::Klmc2 => {
            let gamma = config.friction()?;
            let kernels = eval_kernels(gamma, config.h)?;
            let cov = noise_covariance(gamma, config.h)?;
            let mut stream = NormalStream::new(config.seed, chain, 4 * p);
            let mut raw = vec![0.0; 4 * p];
            let mut noise4 = vec![0.0; 4 * p];

            stream.fill_slot(0, &mut raw);
            let mut state = KineticState { v: raw[..p].to_vec(), theta: theta0 };
            // only the first p normals of slot 0 are used
            let mut draws = p as u64;
            let mut next = state.clone();
            let mut ws = Workspace::new(p);
            let mut velocities = vec![];
            if keep.records(0, steps) {
                traj.steps.push(0);
                traj.states.push(state.theta.clone());
                velocities.push(state.v.clone());
            }
            for k in 1..=steps {
                stream.fill_slot(k as u64, &mut raw);
                draws += 4 * p as u64;
                correlate_noise(&cov, &raw, &mut noise4);
                let stepped = if config.algorithm == Algorithm::Klmc {
                    klmc_step_into(&state, &sur, &kernels, &noise4, &mut ws, &mut next)
                } else {
                    klmc2_step_into(&state, &sur, &kernels, &noise4, &mut ws, &mut next)
                };
                stepped.map_err(|e| attach_step(e, k, &state.theta))?;
                std::mem::swap(&mut state, &mut next);
                if keep.records(k, steps) {
                    traj.steps.push(k);
                    traj.states.push(state.theta.clone());
                    velocities.push(state.v.clone());
                }
            }
            traj.velocities = Some(velocities);
            traj.rng_draw_count = draws;
        }
    }
    Ok(traj)
}

/// Maps per-coordinate standard normals to `L·g` in place of `out`.
pub fn correlate_noise(cov: &NoiseCovariance, raw: &[f64], out: &mut [f64]) {
    for (g, xi) in raw.chunks_exact(4).zip(out.chunks_exact_mut(4)) {
        xi.copy_from_slice(&cov.correlate(&[g[0], g[1], g[2], g[3]]));
    }
}

/// Runs chain 0.
pub fn run(config: &SamplerConfig, potential: &dyn Potential) -> Result<Trajectory> {
    run_chain(config, potential, 0)
}

/// Runs chain `chain`, keeping iterates per `config.stride`.
pub fn run_chain(config: &SamplerConfig, potential: &dyn Potential, chain: u64) -> Result<Trajectory> {
    run_impl(config, potential, chain, Keep::Strided(config.stride))
}

/// Runs chains `0..n_chains` on the current rayon pool. The result is ordered
/// by chain id; on failure the error of the lowest failing chain is returned.
pub fn run_chains(config: &SamplerConfig, potential: &dyn Potential, n_chains: usize) -> Result<Vec<Trajectory>> {
    collect_ordered((0..n_chains as u64).into_par_iter().map(|c| run_chain(config, potential, c)).collect())
}

/// Final positions of chains `0..n_chains`, without storing intermediate iterates.
pub fn final_states(config: &SamplerConfig, potential: &dyn Potential, n_chains: usize) -> Result<Vec<Vec<f64>>> {
    let results: Vec<Result<Vec<f64>>> = (0..n_chains as u64)
        .into_par_iter()
        .map(|c| {
            run_impl(config, potential, c, Keep::FinalOnly)
                .map(|mut t| t.states.pop().expect("final state is always kept"))
        })
        .collect();
    collect_ordered(results)
}

fn collect_ordered<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}
