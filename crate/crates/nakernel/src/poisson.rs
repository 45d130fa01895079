//! Poisson-kernel estimation on the group by the long-horizon limit
//! ν(x) = lim_{T→∞} E[P^σ(0,T)(x⁻¹)], and regression of the decay rate of
//! ν against homogeneous-norm radii.
//!
//! The outer Monte Carlo averages over σ-paths with drift −2α started at
//! the origin of the abelian factor; each σ contributes one skew-product
//! kernel estimate (itself an inner average over η-bridges).  The t→∞
//! limit is replaced by a doubling test: the same σ-paths are evaluated
//! at horizons T and T/2 and the estimate is flagged converged when the
//! two values agree within 3·combined standard error.  With drift −2α and
//! α in the positive chamber the exponential clocks converge almost
//! surely, so the doubling test is a faithful finite surrogate for the
//! limit.
//!
//! The per-σ kernel values inherit the polynomial tails of reciprocal
//! exponential functionals, so both the plain mean and a median-of-means
//! summary are reported; decay regressions fit the median-of-means
//! values.

use crate::error::{Error, Result};
use crate::evolker::estimate_p_sigma;
use crate::exec;
use crate::liegroup::{GroupElement, MetaAbelianGroup};
use crate::mc::{McEstimate, DEFAULT_MOM_BLOCKS};
use crate::randpath::sample_bm_drift;
use crate::rng;

/// Sampling budget for one nested Poisson-kernel estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorBudget {
    /// Outer horizon T; the doubling test also evaluates T/2.
    pub horizon: f64,
    /// Number of outer σ-paths.
    pub n_sigma: usize,
    /// Number of inner η-bridges per σ.
    pub n_eta: usize,
    /// Time steps per σ-path over [0, T]; must be even so that T/2 is a
    /// grid node.
    pub n_steps: usize,
}

impl EstimatorBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::invalid(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.n_sigma == 0 || self.n_eta == 0 {
            return Err(Error::invalid("n_sigma and n_eta must be at least 1"));
        }
        if self.n_steps < 2 || self.n_steps % 2 != 0 {
            return Err(Error::invalid(format!(
                "n_steps must be even and at least 2 (T/2 must be a grid node), got {}",
                self.n_steps
            )));
        }
        Ok(())
    }
}

/// A nested Monte Carlo estimate of ν at one group element.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonEstimate {
    pub point: GroupElement,
    /// Plain outer mean over σ-paths at horizon T.
    pub value: McEstimate,
    /// Median-of-means summary of the same per-σ values.
    pub value_mom: McEstimate,
    /// Plain outer mean at horizon T/2 (basis of the doubling test).
    pub value_half: McEstimate,
    pub horizon: f64,
    pub n_sigma: usize,
    pub n_eta: usize,
    /// True when |ν̂(T) − ν̂(T/2)| < 3·√(se(T)² + se(T/2)²).
    pub convergence_flag: bool,
}

/// ν̂ at `x`: outer average over σ-paths (drift −2α from the origin) of
/// the skew-product kernel estimate at x⁻¹, with the doubling test at
/// T/2.  σ-path i uses the derived stream `derive_seed(seed, i)`; results
/// are bit-identical for any worker count.
///
/// The defining large-horizon limit is a weak limit (against test
/// functions); evaluating it pointwise is an interpretation that leans on
/// the smoothness of the evolution kernels, which are nondegenerate
/// Gaussians here.
pub fn estimate_nu(
    group: &MetaAbelianGroup,
    x: &GroupElement,
    budget: &EstimatorBudget,
    seed: u64,
) -> Result<PoissonEstimate> {
    let origin = vec![0.0; group.roots().rank()];
    estimate_nu_from(group, x, &origin, budget, seed)
}

/// Same estimator with the σ-paths started at `start` instead of the
/// origin (the shifted-start kernel ν^a with a = start).
fn estimate_nu_from(
    group: &MetaAbelianGroup,
    x: &GroupElement,
    start: &[f64],
    budget: &EstimatorBudget,
    seed: u64,
) -> Result<PoissonEstimate> {
    group.roots().require_alpha_positive()?;
    budget.validate()?;
    if x.m.len() != group.m_dim() || x.v.len() != group.v_dim() {
        return Err(Error::invalid(format!(
            "point has dimensions ({}, {}), group is ({}, {})",
            x.m.len(),
            x.v.len(),
            group.m_dim(),
            group.v_dim()
        )));
    }
    let rank = group.roots().rank();
    if start.len() != rank {
        return Err(Error::invalid("σ start point must have the rank dimension"));
    }
    let target = group.inverse(x);
    let drift: Vec<f64> = group.roots().alpha().iter().map(|a| -2.0 * a).collect();
    let t_full = budget.horizon;
    let t_half = 0.5 * t_full;

    let draws: Vec<Result<(f64, f64)>> = exec::map_indexed(budget.n_sigma, |i| {
        let sigma_stream = rng::derive_seed(seed, i as u64);
        let sigma = sample_bm_drift(
            rank,
            start,
            &drift,
            t_full,
            budget.n_steps,
            rng::derive_seed(sigma_stream, 0),
        )?;
        // The same η-stream at both horizons pairs the doubling test.
        let eta_seed = rng::derive_seed(sigma_stream, 1);
        let full = estimate_p_sigma(group, &sigma, &target, t_full, budget.n_eta, eta_seed)?;
        let half = estimate_p_sigma(group, &sigma, &target, t_half, budget.n_eta, eta_seed)?;
        Ok((full.plain.mean, half.plain.mean))
    });
    let mut full_values = Vec::with_capacity(budget.n_sigma);
    let mut half_values = Vec::with_capacity(budget.n_sigma);
    for draw in draws {
        let (f, h) = draw?;
        full_values.push(f);
        half_values.push(h);
    }

    let value = McEstimate::from_samples(&full_values, seed);
    let value_mom = McEstimate::median_of_means(&full_values, DEFAULT_MOM_BLOCKS, seed);
    let value_half = McEstimate::from_samples(&half_values, seed);
    let combined = (value.stderr.powi(2) + value_half.stderr.powi(2)).sqrt();
    let convergence_flag = (value.mean - value_half.mean).abs() < 3.0 * combined;
    Ok(PoissonEstimate {
        point: x.clone(),
        value,
        value_mom,
        value_half,
        horizon: t_full,
        n_sigma: budget.n_sigma,
        n_eta: budget.n_eta,
        convergence_flag,
    })
}

fn require_unit_norm(
    group: &MetaAbelianGroup,
    rho: &[f64],
    x0: &GroupElement,
) -> Result<()> {
    let norm = group.homogeneous_norm(rho, x0)?;
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "point must lie on the unit ρ-sphere, got |x0|_ρ = {norm}"
        )));
    }
    Ok(())
}

/// ν̂ at the dilated point δ^ρ_{e^{−s}}(x0) for a unit-ρ-norm x0 and
/// s ≤ 0 (s = 0 is the sphere itself; more negative s moves outward).
pub fn nu_at_dilated(
    group: &MetaAbelianGroup,
    rho: &[f64],
    x0: &GroupElement,
    s: f64,
    budget: &EstimatorBudget,
    seed: u64,
) -> Result<PoissonEstimate> {
    if !(s.is_finite() && s <= 0.0) {
        return Err(Error::invalid(format!("need s <= 0, got {s}")));
    }
    require_unit_norm(group, rho, x0)?;
    let point = group.dilate(rho, (-s).exp(), x0)?;
    estimate_nu(group, &point, budget, seed)
}

/// Outcome of the two-route scaling identity
/// ν(δ^ρ_{e^{−s}} x0) = e^{ρ₀(sρ)} · ν^{sρ}(x0).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    /// Route A: direct estimate at the dilated point.
    pub direct: PoissonEstimate,
    /// Route B: σ-paths started at sρ, estimate at x0, pre-multiplied by
    /// the character factor.
    pub shifted: PoissonEstimate,
    /// e^{ρ₀(sρ)}, the factor already applied to `shifted`.
    pub factor: f64,
    /// True when the two routes agree within 3·combined standard error.
    pub consistent: bool,
}

/// Verifies the dilation/shift scaling identity by running both estimator
/// routes with independent derived seeds.
pub fn scaling_check(
    group: &MetaAbelianGroup,
    rho: &[f64],
    x0: &GroupElement,
    s: f64,
    budget: &EstimatorBudget,
    seed: u64,
) -> Result<ScalingCheck> {
    if !(s.is_finite() && s <= 0.0) {
        return Err(Error::invalid(format!("need s <= 0, got {s}")));
    }
    require_unit_norm(group, rho, x0)?;
    let point = group.dilate(rho, (-s).exp(), x0)?;
    let direct = estimate_nu(group, &point, budget, rng::derive_seed(seed, 0))?;

    let srho: Vec<f64> = rho.iter().map(|c| s * c).collect();
    let factor = group.roots().rho_zero(&srho).exp();
    let raw = estimate_nu_from(group, x0, &srho, budget, rng::derive_seed(seed, 1))?;
    let shifted = PoissonEstimate {
        value: raw.value.scaled(factor),
        value_mom: raw.value_mom.scaled(factor),
        value_half: raw.value_half.scaled(factor),
        ..raw
    };
    let combined = (direct.value.stderr.powi(2) + shifted.value.stderr.powi(2)).sqrt();
    let consistent = (direct.value.mean - shifted.value.mean).abs() < 3.0 * combined;
    Ok(ScalingCheck {
        direct,
        shifted,
        factor,
        consistent,
    })
}

/// Weighted least-squares fit of ln ν̂ against ln(1 + r).
///
/// Weights are 1/se_log² with se_log = stderr/value (the delta-method
/// standard error of ln ν̂); zero stderrs get a tiny floor so exact
/// synthetic inputs reduce to an unweighted fit.  Returns (slope,
/// slope standard error).
pub fn fit_log_slope(radii: &[f64], values: &[f64], stderrs: &[f64]) -> Result<(f64, f64)> {
    let n = radii.len();
    if n < 2 {
        return Err(Error::invalid("slope fit needs at least two points"));
    }
    if values.len() != n || stderrs.len() != n {
        return Err(Error::invalid("radii, values, and stderrs must have equal length"));
    }
    for i in 0..n {
        if !(radii[i].is_finite() && radii[i] >= 1.0) {
            return Err(Error::invalid(format!("radius {} must be >= 1", radii[i])));
        }
        if i > 0 && radii[i] <= radii[i - 1] {
            return Err(Error::invalid("radii must be strictly increasing"));
        }
        if !(values[i].is_finite() && values[i] > 0.0) {
            return Err(Error::invalid(format!(
                "value at radius {} must be positive, got {}",
                radii[i], values[i]
            )));
        }
        if !(stderrs[i].is_finite() && stderrs[i] >= 0.0) {
            return Err(Error::invalid("stderrs must be nonnegative"));
        }
    }
    let xs: Vec<f64> = radii.iter().map(|r| (1.0 + r).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let ws: Vec<f64> = (0..n)
        .map(|i| {
            let se_log = stderrs[i] / values[i];
            1.0 / se_log.powi(2).max(1e-30)
        })
        .collect();
    let sw: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ybar = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - xbar).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| ws[i] * (xs[i] - xbar) * (ys[i] - ybar)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("degenerate design: all radii map to one abscissa"));
    }
    Ok((sxy / sxx, sxx.sqrt().recip()))
}

/// A fitted radial decay law for ν along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Unit-ρ-norm direction on the sphere.
    pub direction: GroupElement,
    pub rho: Vec<f64>,
    /// Radii actually used in the fit (converged estimates only).
    pub radii: Vec<f64>,
    /// ln of the median-of-means ν̂ at those radii.
    pub log_values: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    /// All per-radius estimates, including non-converged ones.
    pub estimates: Vec<PoissonEstimate>,
    /// Radii excluded from the fit (failed the doubling test or had a
    /// non-positive summary value).
    pub excluded_radii: Vec<f64>,
}

/// Estimates ν at δ^ρ_r(direction) for each radius and fits the log-log
/// slope on the converged median-of-means values.  Radius k uses the
/// derived stream `derive_seed(seed, k)`.
pub fn decay_regression(
    group: &MetaAbelianGroup,
    rho: &[f64],
    direction: &GroupElement,
    radii: &[f64],
    budget: &EstimatorBudget,
    seed: u64,
) -> Result<DecayFit> {
    if radii.len() < 2 {
        return Err(Error::invalid("decay regression needs at least two radii"));
    }
    for (i, r) in radii.iter().enumerate() {
        if !(r.is_finite() && *r >= 1.0) {
            return Err(Error::invalid(format!("radius {r} must be >= 1")));
        }
        if i > 0 && radii[i] <= radii[i - 1] {
            return Err(Error::invalid("radii must be strictly increasing"));
        }
    }
    require_unit_norm(group, rho, direction)?;

    let mut estimates = Vec::with_capacity(radii.len());
    for (k, r) in radii.iter().enumerate() {
        let point = group.dilate(rho, *r, direction)?;
        estimates.push(estimate_nu(
            group,
            &point,
            budget,
            rng::derive_seed(seed, k as u64),
        )?);
    }

    let mut kept_radii = Vec::new();
    let mut kept_values = Vec::new();
    let mut kept_stderrs = Vec::new();
    let mut excluded_radii = Vec::new();
    for (r, est) in radii.iter().zip(&estimates) {
        if est.convergence_flag && est.value_mom.mean > 0.0 {
            kept_radii.push(*r);
            kept_values.push(est.value_mom.mean);
            kept_stderrs.push(est.value_mom.stderr);
        } else {
            excluded_radii.push(*r);
        }
    }
    if kept_radii.len() < 2 {
        return Err(Error::FitFailure);
    }
    let (slope, slope_stderr) = fit_log_slope(&kept_radii, &kept_values, &kept_stderrs)?;
    Ok(DecayFit {
        direction: direction.clone(),
        rho: rho.to_vec(),
        log_values: kept_values.iter().map(|v| v.ln()).collect(),
        radii: kept_radii,
        slope,
        slope_stderr,
        estimates,
        excluded_radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::{heisenberg_instance, LinearForm};
    use approx::assert_relative_eq;

    fn heisenberg(alpha: Vec<f64>) -> MetaAbelianGroup {
        heisenberg_instance(
            1,
            LinearForm::new(vec![1.0, 0.0]).unwrap(),
            LinearForm::new(vec![0.0, 1.0]).unwrap(),
            alpha,
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    fn small_budget() -> EstimatorBudget {
        EstimatorBudget {
            horizon: 4.0,
            n_sigma: 48,
            n_eta: 16,
            n_steps: 64,
        }
    }

    #[test]
    fn synthetic_power_law_is_recovered_exactly() {
        let radii = [2.0f64, 4.0, 8.0, 16.0];
        let values: Vec<f64> = radii.iter().map(|r| (1.0 + r).powi(-3)).collect();
        let stderrs = [0.0; 4];
        let (slope, se) = fit_log_slope(&radii, &values, &stderrs).unwrap();
        assert_relative_eq!(slope, -3.0, epsilon = 1e-10);
        assert!(se < 1e-10);
        // Constant values fit a zero slope.
        let flat = [0.25; 4];
        let (slope, _) = fit_log_slope(&radii, &flat, &stderrs).unwrap();
        assert!(slope.abs() < 1e-12);
    }

    #[test]
    fn slope_fit_weights_follow_the_stderrs() {
        // Three points on slope −2 plus an outlier with huge stderr: the
        // weighted fit ignores the outlier.
        let radii = [1.0f64, 3.0, 7.0, 15.0];
        let mut values: Vec<f64> = radii.iter().map(|r| (1.0 + r).powi(-2)).collect();
        values[2] *= 50.0;
        let stderrs = [1e-6 * values[0], 1e-6 * values[1], 1e3 * values[2], 1e-6 * values[3]];
        let (slope, _) = fit_log_slope(&radii, &values, &stderrs).unwrap();
        assert_relative_eq!(slope, -2.0, epsilon = 1e-4);
    }

    #[test]
    fn slope_fit_validates_inputs() {
        assert!(fit_log_slope(&[2.0], &[1.0], &[0.0]).is_err());
        assert!(fit_log_slope(&[2.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(fit_log_slope(&[0.5, 2.0], &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(fit_log_slope(&[2.0, 4.0], &[1.0, -1.0], &[0.0, 0.0]).is_err());
        assert!(fit_log_slope(&[2.0, 4.0], &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn estimate_at_the_identity_is_positive_and_reproducible() {
        let group = heisenberg(vec![1.0, 1.0]);
        let budget = small_budget();
        let x = group.identity();
        let a = estimate_nu(&group, &x, &budget, 2024).unwrap();
        assert!(a.value.mean > 0.0);
        assert!(a.value.stderr.is_finite() && a.value.stderr > 0.0);
        assert!(a.value_mom.mean > 0.0);
        assert_eq!(a.n_sigma, 48);
        let b = estimate_nu(&group, &x, &budget, 2024).unwrap();
        assert_eq!(a, b);
        let c = estimate_nu(&group, &x, &budget, 2025).unwrap();
        assert_ne!(a.value.mean, c.value.mean);
    }

    #[test]
    fn long_horizon_converges_and_short_does_not() {
        let group = heisenberg(vec![1.0, 1.0]);
        let x = group.identity();
        let long = estimate_nu(
            &group,
            &x,
            &EstimatorBudget {
                horizon: 8.0,
                n_sigma: 64,
                n_eta: 16,
                n_steps: 128,
            },
            7,
        )
        .unwrap();
        assert!(long.convergence_flag, "doubling gap not within tolerance");
        // A very short horizon is far from the limit: the kernel mass is
        // still spreading (density at 0 scales like t^{−3/2}), while the
        // per-σ values are nearly deterministic, so T vs T/2 differ by a
        // factor ≈ 2^{3/2} against a tiny standard error.
        let short = estimate_nu(
            &group,
            &x,
            &EstimatorBudget {
                horizon: 0.1,
                n_sigma: 256,
                n_eta: 8,
                n_steps: 64,
            },
            7,
        )
        .unwrap();
        assert!(!short.convergence_flag, "short horizon should fail the test");
    }

    #[test]
    fn v_reflection_symmetry_within_noise() {
        // ν((0,0), (x)) = ν((0,0), (−x)): all Gaussian factors are even in
        // the v-block when m = 0.
        let group = heisenberg(vec![1.0, 1.0]);
        let budget = EstimatorBudget {
            horizon: 6.0,
            n_sigma: 96,
            n_eta: 24,
            n_steps: 96,
        };
        let plus = GroupElement::new(vec![0.0, 0.0], vec![0.8]);
        let minus = GroupElement::new(vec![0.0, 0.0], vec![-0.8]);
        let a = estimate_nu(&group, &plus, &budget, 11).unwrap();
        let b = estimate_nu(&group, &minus, &budget, 12).unwrap();
        let tol = 3.0 * (a.value.stderr.powi(2) + b.value.stderr.powi(2)).sqrt();
        assert!(
            (a.value.mean - b.value.mean).abs() < tol,
            "asymmetry {} vs {} exceeds {tol}",
            a.value.mean,
            b.value.mean
        );
    }

    #[test]
    fn doubling_n_sigma_halves_the_outer_variance() {
        let group = heisenberg(vec![1.0, 1.0]);
        let x = GroupElement::new(vec![0.5, 0.0], vec![0.5]);
        let base = EstimatorBudget {
            horizon: 4.0,
            n_sigma: 256,
            n_eta: 8,
            n_steps: 64,
        };
        let double = EstimatorBudget {
            n_sigma: 512,
            ..base
        };
        let small = estimate_nu(&group, &x, &base, 3001).unwrap();
        let large = estimate_nu(&group, &x, &double, 3001).unwrap();
        let ratio = large.value.stderr.powi(2) / small.value.stderr.powi(2);
        assert!(
            (ratio - 0.5).abs() < 0.2 * 0.5,
            "variance ratio {ratio} not close to 1/2"
        );
    }

    #[test]
    fn drift_and_budget_preconditions() {
        let bad = heisenberg_instance(
            1,
            LinearForm::new(vec![1.0, 0.0]).unwrap(),
            LinearForm::new(vec![0.0, 1.0]).unwrap(),
            vec![-1.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        let budget = small_budget();
        match estimate_nu(&bad, &bad.identity(), &budget, 0) {
            Err(Error::DivergentDrift(msg)) => assert!(msg.contains("xi[")),
            other => panic!("expected DivergentDrift, got {other:?}"),
        }
        let group = heisenberg(vec![1.0, 1.0]);
        for broken in [
            EstimatorBudget { horizon: 0.0, ..budget },
            EstimatorBudget { n_sigma: 0, ..budget },
            EstimatorBudget { n_eta: 0, ..budget },
            EstimatorBudget { n_steps: 65, ..budget },
        ] {
            assert!(estimate_nu(&group, &group.identity(), &broken, 0).is_err());
        }
        let wrong_dim = GroupElement::new(vec![0.0], vec![0.0]);
        assert!(estimate_nu(&group, &wrong_dim, &budget, 0).is_err());
    }

    #[test]
    fn dilated_estimate_at_s_zero_matches_the_plain_one() {
        let group = heisenberg(vec![1.0, 1.0]);
        let budget = small_budget();
        let rho = [1.0, 1.0];
        // v-coordinate has root ξ₁, so |(0, (1))|_ρ = 1.
        let x0 = GroupElement::new(vec![0.0, 0.0], vec![1.0]);
        let via_dilation = nu_at_dilated(&group, &rho, &x0, 0.0, &budget, 99).unwrap();
        let direct = estimate_nu(&group, &x0, &budget, 99).unwrap();
        assert_eq!(via_dilation, direct);
        // s > 0 and off-sphere points are rejected.
        assert!(nu_at_dilated(&group, &rho, &x0, 0.5, &budget, 0).is_err());
        let off = GroupElement::new(vec![0.0, 0.0], vec![2.0]);
        assert!(nu_at_dilated(&group, &rho, &off, -1.0, &budget, 0).is_err());
    }

    #[test]
    fn two_route_scaling_identity_holds() {
        let group = heisenberg(vec![1.0, 1.0]);
        let rho = [1.0, 1.0];
        let x0 = GroupElement::new(vec![0.0, 0.0], vec![1.0]);
        let budget = EstimatorBudget {
            horizon: 6.0,
            n_sigma: 96,
            n_eta: 24,
            n_steps: 96,
        };
        let s = -(2.0f64.ln());
        let check = scaling_check(&group, &rho, &x0, s, &budget, 404).unwrap();
        // ρ₀((1,1)) = 1 + 1 + 2 = 4, so the factor is 2^{−4}.
        assert_relative_eq!(check.factor, (-4.0 * 2.0f64.ln()).exp(), max_relative = 1e-12);
        assert!(
            check.consistent,
            "routes disagree: direct {} vs shifted {}",
            check.direct.value.mean,
            check.shifted.value.mean
        );
    }

    #[test]
    fn decay_regression_produces_a_negative_slope() {
        let group = heisenberg(vec![1.0, 1.0]);
        let rho = [1.0, 1.0];
        let direction = GroupElement::new(vec![0.0, 0.0], vec![1.0]);
        let budget = EstimatorBudget {
            horizon: 6.0,
            n_sigma: 64,
            n_eta: 16,
            n_steps: 96,
        };
        let fit =
            decay_regression(&group, &rho, &direction, &[2.0, 4.0, 8.0], &budget, 555).unwrap();
        assert!(fit.slope < 0.0, "slope {} not negative", fit.slope);
        assert_eq!(fit.estimates.len(), 3);
        assert_eq!(fit.radii.len() + fit.excluded_radii.len(), 3);
        assert!(fit.slope_stderr.is_finite() && fit.slope_stderr > 0.0);
        // Validation of the radius list.
        assert!(decay_regression(&group, &rho, &direction, &[2.0], &budget, 0).is_err());
        assert!(
            decay_regression(&group, &rho, &direction, &[4.0, 2.0], &budget, 0).is_err()
        );
    }
}
