//! Monte Carlo machinery for heat-kernel estimates on meta-abelian solvable
//! Lie groups of the form N ⋊ A, where N = exp(𝔪 ⊕ 𝔳) is simply connected
//! nilpotent and A ≅ ℝᵏ acts diagonally through a family of roots.
//!
//! The crate follows a variance-2s convention throughout: the driving
//! Brownian motion `b` satisfies Var b_s = 2s, so its generator is the full
//! Laplacian Δ (not Δ/2) and the transition density at time s is
//! (4πs)^{-1/2} e^{-x²/4s}.  Every Gaussian formula below inherits this
//! normalization.
//!
//! Module map:
//! - [`randpath`]  — drifted Brownian paths and time-changed Brownian bridges
//! - [`reflect`]   — reflection-principle probabilities and tail bounds
//! - [`expfun`]    — exponential functionals ∫ e^{dℓ(σ_u)} du and their
//!   inverse-gamma limit laws
//! - [`liegroup`]  — the group model: roots, adjoint action, dilations,
//!   homogeneous norms
//! - [`evolker`]   — Gaussian evolution kernels and the skew-product
//!   estimator for P^σ(0,t)
//! - [`bounds`]    — closed-form kernel upper bounds and decay exponents
//! - [`poisson`]   — Poisson-kernel estimation and decay-rate regression
//!
//! Support modules: [`rng`] (reproducible seed streams), [`mc`] (estimate
//! summaries), [`exec`] (data-parallel map with a sequential fallback,
//! gated on the `parallel` feature).

pub mod bounds;
pub mod error;
pub mod evolker;
pub mod exec;
pub mod expfun;
pub mod liegroup;
pub mod mc;
pub mod poisson;
pub mod randpath;
pub mod reflect;
pub mod rng;

pub use error::{Error, Result};
