//! Exponential functionals of drifted Brownian paths and their limit laws.
//!
//! For a path σ in ℝᵏ and a linear form ℓ, the basic object is the
//! integral ∫ₛᵗ e^{d·ℓ(σ_u)} du, evaluated by trapezoidal quadrature on
//! the path grid.  Since the exponents d·ℓ(σ_u) reach hundreds in either
//! direction, all integrals are accumulated in the log domain
//! (log-sum-exp over the trapezoid terms) and products of integrals are
//! sums of logs.
//!
//! For σ_u = b_u − 2αu with ℓ(α) > 0, the perpetuity ∫₀^∞ e^{dℓ(σ_u)} du
//! follows an inverse-gamma law with shape 2ℓ(α)/(d‖ℓ‖²) and scale
//! 1/(d²‖ℓ‖²); the one-dimensional case ℓ = id, α = μ/2, d = 2 is the
//! classical identity I_{2,μ} ~ InverseGamma(μ/2, 1/4).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::liegroup::{LinearForm, RootSystem};
use crate::randpath::DiscretePath;
use crate::rng;

/// Safety factor applied to the analytic tail estimate when deciding
/// whether a perpetuity sample's horizon can stop growing.  The estimate
/// e^{dℓ(σ_T)}/(d·ℓ(2α)) tracks the drift-only continuation; the factor
/// absorbs ordinary fluctuations around it.
pub const PERPETUITY_TAIL_SAFETY: f64 = 8.0;

/// Hard cap on the adaptive horizon, in time units.  With ℓ(α) > 0 the
/// tail criterion triggers almost surely long before this; the cap only
/// guards against runaway loops.
const PERPETUITY_MAX_UNITS: f64 = 10_000.0;

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// ln ∫ₛᵗ e^{d·ℓ(path(u))} du by trapezoidal quadrature in the log domain.
///
/// `s` and `t` may fall inside grid cells; the path is evaluated there by
/// linear interpolation (consistent with the piecewise-linear path model).
pub fn log_integrate_exponential(
    path: &DiscretePath,
    form: &LinearForm,
    d: f64,
    s: f64,
    t: f64,
) -> Result<f64> {
    if form.dim() != path.dim() {
        return Err(Error::invalid(format!(
            "form acts on dimension {}, path has dimension {}",
            form.dim(),
            path.dim()
        )));
    }
    if !(d.is_finite() && d != 0.0) {
        return Err(Error::invalid(format!("exponent scale d must be finite and nonzero, got {d}")));
    }
    if !(s.is_finite() && t.is_finite() && 0.0 <= s && s < t && t <= path.horizon()) {
        return Err(Error::invalid(format!(
            "need 0 ≤ s < t ≤ horizon ({}), got s = {s}, t = {t}",
            path.horizon()
        )));
    }

    // Walk the grid nodes strictly inside (s, t), with interpolated
    // endpoint values at s and t themselves.
    let grid = path.grid();
    let exponent_at_node = |l: usize| d * form.eval(path.node(l));
    let exponent_interp = |u: f64| {
        let value = path.at(u).expect("u inside path range");
        d * form.eval(&value)
    };

    let first_inside = grid.partition_point(|&g| g <= s);
    let last_inside = grid.partition_point(|&g| g < t); // grid[last_inside-1] < t
    let mut times = Vec::with_capacity(last_inside - first_inside + 2);
    let mut exps = Vec::with_capacity(last_inside - first_inside + 2);
    times.push(s);
    exps.push(exponent_interp(s));
    for l in first_inside..last_inside {
        times.push(grid[l]);
        exps.push(exponent_at_node(l));
    }
    times.push(t);
    exps.push(exponent_interp(t));

    let mut terms = Vec::with_capacity(2 * (times.len() - 1));
    for w in 0..times.len() - 1 {
        let width = times[w + 1] - times[w];
        if width <= 0.0 {
            continue;
        }
        let log_half_width = (0.5 * width).ln();
        terms.push(log_half_width + exps[w]);
        terms.push(log_half_width + exps[w + 1]);
    }
    Ok(log_sum_exp(&terms))
}

/// ∫ₛᵗ e^{d·ℓ(path(u))} du; see [`log_integrate_exponential`].
pub fn integrate_exponential(
    path: &DiscretePath,
    form: &LinearForm,
    d: f64,
    s: f64,
    t: f64,
) -> Result<f64> {
    Ok(log_integrate_exponential(path, form, d, s, t)?.exp())
}

/// The family of exponential functionals of one path over one window:
/// per-root integrals A_{M,i} = ∫ e^{2ξ_i(σ)} and A_{V,j} = ∫ e^{2ϑ_j(σ)},
/// their sums, and their products (kept as logs).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFunctionalSet {
    /// A_{M,i}, one per m-coordinate root ξ_i.
    pub per_root_m: Vec<f64>,
    /// A_{V,j}, one per v-coordinate root ϑ_j.
    pub per_root_v: Vec<f64>,
    /// ln A_{M,i} (authoritative; the linear values above may underflow).
    pub log_per_root_m: Vec<f64>,
    /// ln A_{V,j}.
    pub log_per_root_v: Vec<f64>,
    /// A_{M,Σ} = Σ_i A_{M,i}.
    pub sum_m: f64,
    /// A_{V,Σ} = Σ_j A_{V,j}.
    pub sum_v: f64,
    /// ln A_{M,Π} = Σ_i ln A_{M,i}.
    pub log_prod_m: f64,
    /// ln A_{V,Π} = Σ_j ln A_{V,j}.
    pub log_prod_v: f64,
}

impl ExpFunctionalSet {
    /// A_{N,Σ} = A_{M,Σ} + A_{V,Σ}.
    pub fn sum_n(&self) -> f64 {
        self.sum_m + self.sum_v
    }

    /// ln A_{N,Π} = ln A_{M,Π} + ln A_{V,Π}.
    pub fn log_prod_n(&self) -> f64 {
        self.log_prod_m + self.log_prod_v
    }

    pub fn prod_m(&self) -> f64 {
        self.log_prod_m.exp()
    }

    pub fn prod_v(&self) -> f64 {
        self.log_prod_v.exp()
    }

    pub fn prod_n(&self) -> f64 {
        self.log_prod_n().exp()
    }
}

/// Evaluates every per-root exponential functional of `path` over [s, t]
/// (exponent scale d = 2 throughout) together with the aggregates.
pub fn functional_set(
    path: &DiscretePath,
    roots: &RootSystem,
    s: f64,
    t: f64,
) -> Result<ExpFunctionalSet> {
    if path.dim() != roots.rank() {
        return Err(Error::invalid(format!(
            "path dimension {} does not match root-system rank {}",
            path.dim(),
            roots.rank()
        )));
    }
    let mut log_per_root_m = Vec::with_capacity(roots.m_dim());
    for form in roots.xi() {
        log_per_root_m.push(log_integrate_exponential(path, form, 2.0, s, t)?);
    }
    let mut log_per_root_v = Vec::with_capacity(roots.v_dim());
    for form in roots.theta() {
        log_per_root_v.push(log_integrate_exponential(path, form, 2.0, s, t)?);
    }
    let per_root_m: Vec<f64> = log_per_root_m.iter().map(|l| l.exp()).collect();
    let per_root_v: Vec<f64> = log_per_root_v.iter().map(|l| l.exp()).collect();
    Ok(ExpFunctionalSet {
        sum_m: per_root_m.iter().sum(),
        sum_v: per_root_v.iter().sum(),
        log_prod_m: log_per_root_m.iter().sum(),
        log_prod_v: log_per_root_v.iter().sum(),
        per_root_m,
        per_root_v,
        log_per_root_m,
        log_per_root_v,
    })
}

/// Inverse-gamma law with density h(x) = γ^μ/Γ(μ) · x^{−μ−1} e^{−γ/x} on
/// x > 0, where μ is the shape and γ the scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGammaLaw {
    shape: f64,
    scale: f64,
}

impl InverseGammaLaw {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::invalid(format!("inverse-gamma shape must be positive, got {shape}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid(format!("inverse-gamma scale must be positive, got {scale}")));
        }
        Ok(InverseGammaLaw { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_density(x).exp()
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (mu, gamma) = (self.shape, self.scale);
        mu * gamma.ln() - statrs::function::gamma::ln_gamma(mu) - (mu + 1.0) * x.ln() - gamma / x
    }

    /// P(X ≤ x) = Q(μ, γ/x), the regularized upper incomplete gamma.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        statrs::function::gamma::gamma_ur(self.shape, self.scale / x)
    }

    /// Mean γ/(μ−1) for μ > 1, `None` otherwise (the law is heavy-tailed).
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }

    /// Mode γ/(μ+1).
    pub fn mode(&self) -> f64 {
        self.scale / (self.shape + 1.0)
    }
}

/// Limit law of the perpetuity ∫₀^∞ e^{dℓ(σ_u)} du for σ_u = b_u − 2αu:
/// InverseGamma(2ℓ(α)/(d‖ℓ‖²), 1/(d²‖ℓ‖²)).  Requires ℓ(α) > 0.
pub fn perpetuity_law(d: f64, form: &LinearForm, alpha: &[f64]) -> Result<InverseGammaLaw> {
    if form.dim() != alpha.len() {
        return Err(Error::invalid(format!(
            "form acts on dimension {}, drift has dimension {}",
            form.dim(),
            alpha.len()
        )));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid(format!("exponent scale d must be positive, got {d}")));
    }
    let l_alpha = form.eval(alpha);
    if !(l_alpha > 0.0) {
        return Err(Error::DivergentFunctional { value: l_alpha });
    }
    let norm_sq = form.norm_sq();
    InverseGammaLaw::new(2.0 * l_alpha / (d * norm_sq), 1.0 / (d * d * norm_sq))
}

/// Draws one sample of the perpetuity ∫₀^∞ e^{dℓ(σ_u)} du,
/// σ_u = b_u − 2αu, by simulating σ with step 1/`n_steps_per_unit` and
/// growing the horizon until the scaled analytic tail estimate drops
/// below `tol` times the integral accumulated so far.
pub fn sample_perpetuity(
    d: f64,
    form: &LinearForm,
    alpha: &[f64],
    n_steps_per_unit: usize,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    if form.dim() != alpha.len() {
        return Err(Error::invalid(format!(
            "form acts on dimension {}, drift has dimension {}",
            form.dim(),
            alpha.len()
        )));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid(format!("exponent scale d must be positive, got {d}")));
    }
    if n_steps_per_unit == 0 {
        return Err(Error::invalid("need at least one step per time unit"));
    }
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("tolerance must be in (0, 1), got {tol}")));
    }
    let l_alpha = form.eval(alpha);
    if !(l_alpha > 0.0) {
        return Err(Error::DivergentFunctional { value: l_alpha });
    }

    let k = form.dim();
    let dt = 1.0 / n_steps_per_unit as f64;
    let sd = (2.0 * dt).sqrt();
    let denominator = d * 2.0 * l_alpha; // d · ℓ(2α)
    let max_steps = (PERPETUITY_MAX_UNITS * n_steps_per_unit as f64) as usize;

    let mut generator = rng::stream(seed);
    let mut sigma = vec![0.0f64; k];
    let mut integral = 0.0f64;
    let mut f_prev = 1.0f64; // e^{dℓ(0)}
    for _step in 0..max_steps {
        for (j, s) in sigma.iter_mut().enumerate() {
            let z: f64 = generator.sample(StandardNormal);
            *s += -2.0 * alpha[j] * dt + sd * z;
        }
        let f = (d * form.eval(&sigma)).exp();
        integral += 0.5 * dt * (f_prev + f);
        f_prev = f;
        let tail_estimate = PERPETUITY_TAIL_SAFETY * f / denominator;
        if tail_estimate < tol * integral {
            return Ok(integral);
        }
    }
    Err(Error::invalid(format!(
        "perpetuity sample did not meet the tail criterion within {PERPETUITY_MAX_UNITS} time units"
    )))
}
