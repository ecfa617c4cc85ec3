//! Discretized Langevin samplers for log-concave targets.
//!
//! - [`potentials`]: target potentials with gradient, Hessian-vector and
//!   smoothness metadata, and the `α`-penalized surrogate.
//! - [`kernels`]: the kinetic step kernels and per-coordinate noise covariance.
//! - [`samplers`]: `α`-LMC, `α`-KLMC and `α`-KLMC2 with reproducible
//!   counter-based noise.
//! - [`planner`]: tuning recipes `(α, h, γ, K)` and the error-bound evaluators.
//! - [`moments`]: moment bounds, their quadrature oracles and the
//!   moment-inequality constant.
//! - [`metrics`]: exact empirical Wasserstein distances and exact Gaussian
//!   chain laws.
//! - [`cli`]: the `langevin` command-line front end.
//!
//! ```
//! use langevin::metrics::{gaussian_chain_law, gaussian_w2, GaussianLaw};
//! use langevin::planner::{plan, PlannerInputs, Recipe};
//! use langevin::potentials::make_gaussian_potential;
//! use langevin::samplers::final_states;
//!
//! # fn main() -> langevin::Result<()> {
//! let pot = make_gaussian_potential(2, &[1.0, 1.0])?;
//! let planned = plan(Recipe::Klmc, &PlannerInputs::new(2, 1.0, 2.0, 0.5, 1))?;
//! let mut config = planned.sampler_config(7);
//! config.steps = 20_000;
//! let states = final_states(&config, &pot, 10)?;
//! assert_eq!(states.len(), 10);
//! let law = gaussian_chain_law(&config, &pot)?;
//! let w2 = gaussian_w2(&law.theta, &GaussianLaw::target_of(&pot)?)?;
//! assert!(w2 < planned.target);
//! # Ok(())
//! # }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod metrics;
pub mod moments;
pub mod optimize;
pub mod planner;
pub mod potentials;
pub mod quadrature;
pub mod rng;
pub mod samplers;
pub mod special;

pub use error::{Error, Result};
