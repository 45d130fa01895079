//! Reflection-principle probabilities for variance-2s Brownian motion:
//! exact hit-then-end-below probabilities, closed-form upper bounds for
//! sup-of-modulus events with the endpoint in an interval, the density
//! limit of such events at a far endpoint, and the running-sup tail bound.
//!
//! Everything is expressed through the survival function
//! sf(z) = W₀(b_t > z√t) = ½ erfc(z/2) of the variance-2 Gaussian, which
//! stays accurate deep in the tails where CDF differences would cancel.
//!
//! A Monte Carlo verifier ([`sample_path_extremes`]) simulates paths and
//! records (sup, inf, endpoint) triples so that every closed form in this
//! module can be checked for dominance/agreement against simulation.

use crate::error::{Error, Result};
use crate::exec;
use crate::randpath::{phi_sf};
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Default multiplicative constant in [`sup_tail_bound`].
pub const DEFAULT_SUP_TAIL_CONSTANT: f64 = 2.0;

/// A sup-of-modulus event: P(sup_{s≤t} |b_s| ≥ barrier, b_t ∈ [lower, upper]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEventQuery {
    /// Barrier a ≥ 0 for the modulus of the path.
    pub barrier: f64,
    /// Lower endpoint x of the terminal interval.
    pub lower: f64,
    /// Upper endpoint y > x of the terminal interval.
    pub upper: f64,
    /// Time horizon t > 0.
    pub horizon: f64,
}

/// The four endpoint-interval regions covered by the closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointRegion {
    /// R1: −a ≤ x < y ≤ a (interval inside the barrier band).
    Inner,
    /// R2: x < y < −a (interval below the band).
    Below,
    /// R3: a < x < y (interval above the band).
    Above,
    /// R4: 0 < x < a < y (interval straddling the upper barrier).
    Straddle,
}

/// Exact probability that the path reaches `a` by time `t` and ends at or
/// below `x`:  W₀(sup_{s≤t} b_s ≥ a, b_t ≤ x).
///
/// Two reflection branches, continuous at x = a:
/// - x ≥ a: 2·W₀(b_t > a) − W₀(b_t > x)
/// - x < a: W₀(b_t > 2a − x)
pub fn prob_hit_then_below(a: f64, x: f64, t: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::invalid(format!("barrier must be positive, got {a}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("endpoint threshold must be finite"));
    }
    let s = t.sqrt();
    let p = if x >= a {
        2.0 * phi_sf(a / s) - phi_sf(x / s)
    } else {
        phi_sf((2.0 * a - x) / s)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Classifies the endpoint interval of a query into one of the four
/// covered regions, or `None` if it lies in none of them.
///
/// For a = 0 the band degenerates and the sup event is certain; intervals
/// touching 0 are then classified `Inner`, whose combination still
/// dominates (it equals four times the interval mass).
pub fn classify_region(a: f64, x: f64, y: f64) -> Option<EndpointRegion> {
    if a == 0.0 {
        if y < 0.0 {
            return Some(EndpointRegion::Below);
        }
        if x > 0.0 {
            return Some(EndpointRegion::Above);
        }
        return Some(EndpointRegion::Inner);
    }
    if -a <= x && y <= a {
        Some(EndpointRegion::Inner)
    } else if y < -a {
        Some(EndpointRegion::Below)
    } else if a < x {
        Some(EndpointRegion::Above)
    } else if 0.0 < x && x < a && a < y {
        Some(EndpointRegion::Straddle)
    } else {
        None
    }
}

/// Closed-form upper bound for P(sup_{s≤t} |b_s| ≥ a, b_t ∈ [x, y]) on the
/// four covered endpoint regions; unsupported regions are an error.
///
/// Each region combines the reflected image intervals of [x, y] at the
/// barriers ±a.  Writing sf(z) for W₀(b_t > z):
/// - Inner:    2[sf(2a−y) − sf(2a−x)] + 2[sf(2a+x) − sf(2a+y)]
/// - Below:    2[sf(2a−y) − sf(2a−x)] + sf(x) − sf(y)
/// - Above:    sf(x) − sf(y) + 2[sf(2a+x) − sf(2a+y)]
/// - Straddle: 2sf(a) − sf(y) − sf(2a−x) + sf(2a+x) − sf(2a+y)
///
/// (arguments scaled by 1/√t).  The straddle combination is the exact
/// union bound: full upper-hit probability 2sf(a), minus the upper-hit
/// mass escaping the interval, plus the reflected lower-hit mass.
pub fn bound_abs_sup_interval(q: &SupEventQuery) -> Result<f64> {
    let SupEventQuery {
        barrier: a,
        lower: x,
        upper: y,
        horizon: t,
    } = *q;
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::invalid(format!(
            "barrier must be nonnegative, got {a}"
        )));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    if !(x.is_finite() && y.is_finite() && x < y) {
        return Err(Error::invalid(format!(
            "endpoint interval must be finite with lower < upper, got [{x}, {y}]"
        )));
    }
    let region = classify_region(a, x, y).ok_or(Error::UnsupportedRegion {
        barrier: a,
        lower: x,
        upper: y,
    })?;
    let s = t.sqrt();
    let sf = |z: f64| phi_sf(z / s);
    let value = match region {
        EndpointRegion::Inner => {
            2.0 * (sf(2.0 * a - y) - sf(2.0 * a - x)) + 2.0 * (sf(2.0 * a + x) - sf(2.0 * a + y))
        }
        EndpointRegion::Below => {
            2.0 * (sf(2.0 * a - y) - sf(2.0 * a - x)) + sf(x) - sf(y)
        }
        EndpointRegion::Above => {
            sf(x) - sf(y) + 2.0 * (sf(2.0 * a + x) - sf(2.0 * a + y))
        }
        EndpointRegion::Straddle => {
            2.0 * sf(a) - sf(y) - sf(2.0 * a - x) + sf(2.0 * a + x) - sf(2.0 * a + y)
        }
    };
    Ok(value.max(0.0))
}

/// Large-|n| limit bound for the density of a sup-of-modulus event at
/// endpoint n: the event probability over a shrinking endpoint window
/// around n, divided by the window width, is asymptotically at most
///
/// - (2/√(πt)) e^{−(2a−|n|)²/4t}  for |n| < a,
/// - (2/√(πt)) e^{−n²/4t}         for |n| ≥ a,
///
/// continuous at |n| = a.
pub fn density_limit_bound(a: f64, n: f64, t: f64) -> Result<f64> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::invalid(format!(
            "barrier must be nonnegative, got {a}"
        )));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    if !n.is_finite() {
        return Err(Error::invalid("endpoint must be finite"));
    }
    let n = n.abs();
    let prefactor = 2.0 / (std::f64::consts::PI * t).sqrt();
    let exponent = if n < a {
        -(2.0 * a - n).powi(2) / (4.0 * t)
    } else {
        -n * n / (4.0 * t)
    };
    Ok(prefactor * exponent.exp())
}

/// Tail bound c·e^{−(y−x)²/4t} for the probability that a path started at
/// x reaches y ≥ x by time t, with the default constant c = 2.
pub fn sup_tail_bound(x: f64, y: f64, t: f64) -> Result<f64> {
    sup_tail_bound_with_constant(x, y, t, DEFAULT_SUP_TAIL_CONSTANT)
}

/// [`sup_tail_bound`] with an explicit constant c > 0.
pub fn sup_tail_bound_with_constant(x: f64, y: f64, t: f64, c: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {t}")));
    }
    if !(x.is_finite() && y.is_finite() && y >= x) {
        return Err(Error::invalid(format!(
            "levels must be finite with y ≥ x, got x = {x}, y = {y}"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!("constant must be positive, got {c}")));
    }
    Ok(c * (-(y - x).powi(2) / (4.0 * t)).exp())
}

/// Running extremes and endpoint of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathExtremes {
    pub sup: f64,
    pub inf: f64,
    pub end: f64,
}

/// Simulates `n_paths` variance-2s Brownian paths from 0 over `[0, t]`
/// with `n_steps` steps each, recording running sup, running inf, and the
/// endpoint.  Path i uses the derived stream `derive_seed(seed, i)`, so
/// the result is independent of scheduling.
///
/// The discrete-grid sup slightly undershoots the continuous sup, so the
/// empirical probability of any sup event is biased low; comparisons
/// against closed forms must leave a one-sided allowance for this.
pub fn sample_path_extremes(t: f64, n_steps: usize, n_paths: usize, seed: u64) -> Vec<PathExtremes> {
    assert!(t > 0.0 && n_steps > 0 && n_paths > 0);
    let dt = t / n_steps as f64;
    let sd = (2.0 * dt).sqrt();
    exec::map_indexed(n_paths, move |i| {
        let mut r = rng::stream(rng::derive_seed(seed, i as u64));
        let mut value = 0.0f64;
        let mut sup = 0.0f64;
        let mut inf = 0.0f64;
        for _ in 0..n_steps {
            let z: f64 = r.sample(StandardNormal);
            value += sd * z;
            sup = sup.max(value);
            inf = inf.min(value);
        }
        PathExtremes {
            sup,
            inf,
            end: value,
        }
    })
}

/// Empirical probability of a predicate over simulated extremes, with its
/// binomial standard error.
pub fn empirical_probability(
    extremes: &[PathExtremes],
    predicate: impl Fn(&PathExtremes) -> bool,
) -> (f64, f64) {
    let n = extremes.len();
    assert!(n > 0);
    let hits = extremes.iter().filter(|e| predicate(e)).count();
    let p = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    (p, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Frozen against a 30-digit independent evaluation of the same
    // erfc-combinations (mpmath).
    #[test]
    fn hit_then_below_matches_frozen_values() {
        assert_relative_eq!(
            prob_hit_then_below(1.0, 2.0, 1.0).unwrap(),
            0.4008505186618109,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            prob_hit_then_below(1.0, 0.5, 1.0).unwrap(),
            0.14442218317324243,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            prob_hit_then_below(2.0, -1.0, 4.0).unwrap(),
            0.038549935871770885,
            epsilon = 1e-14
        );
    }

    #[test]
    fn hit_then_below_branches_agree_at_the_boundary() {
        // At x = a the two branches reduce to the same expression; check
        // both the exact boundary value and near-boundary continuity.
        for i in 0..100 {
            let a = 0.1 + 0.033 * i as f64;
            let t = 0.5 + 0.041 * (i % 37) as f64;
            let exact = prob_hit_then_below(a, a, t).unwrap();
            assert_relative_eq!(exact, phi_sf(a / t.sqrt()), epsilon = 1e-15);
            let eps = 1e-12 * a.max(1.0);
            let left = prob_hit_then_below(a, a - eps, t).unwrap();
            let right = prob_hit_then_below(a, a + eps, t).unwrap();
            assert!(
                (left - right).abs() < 1e-10,
                "discontinuity {} at a = {a}, t = {t}",
                (left - right).abs()
            );
        }
        assert_relative_eq!(
            prob_hit_then_below(1.0, 1.0, 1.0).unwrap(),
            0.23975006109347673,
            epsilon = 1e-14
        );
    }

    #[test]
    fn hit_then_below_is_monotone_in_x_and_bounded() {
        let a = 0.8;
        let t = 2.0;
        let mut prev = 0.0;
        let mut x = -6.0;
        while x <= 6.0 {
            let p = prob_hit_then_below(a, x, t).unwrap();
            assert!((0.0..=1.0).contains(&p));
            assert!(p >= prev - 1e-15, "not monotone at x = {x}");
            prev = p;
            x += 0.05;
        }
        // x → ∞ recovers the full hitting probability 2·W₀(b_t > a).
        let full = prob_hit_then_below(a, 1e6, t).unwrap();
        assert_relative_eq!(full, 2.0 * phi_sf(a / t.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn hit_then_below_rejects_bad_arguments() {
        assert!(prob_hit_then_below(0.0, 0.5, 1.0).is_err());
        assert!(prob_hit_then_below(-1.0, 0.5, 1.0).is_err());
        assert!(prob_hit_then_below(1.0, 0.5, 0.0).is_err());
        assert!(prob_hit_then_below(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn region_classification_covers_the_four_cases() {
        assert_eq!(classify_region(2.0, -1.0, 1.0), Some(EndpointRegion::Inner));
        assert_eq!(classify_region(2.0, -2.0, 2.0), Some(EndpointRegion::Inner));
        assert_eq!(classify_region(1.0, -4.0, -2.0), Some(EndpointRegion::Below));
        assert_eq!(classify_region(1.0, 2.0, 3.0), Some(EndpointRegion::Above));
        assert_eq!(classify_region(1.0, 0.5, 2.0), Some(EndpointRegion::Straddle));
        // Not covered: interval spanning the whole band, straddling the
        // lower barrier, or with x on the wrong side of 0.
        assert_eq!(classify_region(1.0, -3.0, 3.0), None);
        assert_eq!(classify_region(1.0, -2.0, 0.5), None);
        assert_eq!(classify_region(1.0, -0.5, 2.0), None);
        assert_eq!(classify_region(1.0, 1.0, 2.0), None); // x = a exactly
    }

    #[test]
    fn degenerate_zero_barrier_dominates_interval_mass() {
        // With a = 0 the sup event is certain, so any valid bound must
        // dominate the plain interval probability.
        let q = SupEventQuery {
            barrier: 0.0,
            lower: -1.0,
            upper: 1.0,
            horizon: 1.0,
        };
        let bound = bound_abs_sup_interval(&q).unwrap();
        let mass = crate::randpath::phi_cdf(1.0) - crate::randpath::phi_cdf(-1.0);
        assert!(bound >= mass, "bound {bound} < interval mass {mass}");
        // The Inner combination at a = 0 is exactly four times the mass.
        assert_relative_eq!(bound, 4.0 * mass, max_relative = 1e-12);
    }

    #[test]
    fn interval_bounds_match_frozen_values() {
        let cases = [
            (2.0, -1.0, 1.0, 1.0, 0.066975803014488628),
            (1.0, -4.0, -2.0, 1.0, 0.080966380518667613),
            (1.0, 2.0, 3.0, 2.0, 0.12492898590740513),
            (1.0, 0.5, 2.0, 1.0, 0.29263940386981571),
        ];
        for &(a, x, y, t, expected) in &cases {
            let q = SupEventQuery {
                barrier: a,
                lower: x,
                upper: y,
                horizon: t,
            };
            assert_relative_eq!(bound_abs_sup_interval(&q).unwrap(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn unsupported_regions_error() {
        let q = SupEventQuery {
            barrier: 1.0,
            lower: -3.0,
            upper: 3.0,
            horizon: 1.0,
        };
        match bound_abs_sup_interval(&q) {
            Err(Error::UnsupportedRegion { .. }) => {}
            other => panic!("expected UnsupportedRegion, got {other:?}"),
        }
        let bad = SupEventQuery {
            barrier: 1.0,
            lower: 1.0,
            upper: 0.0,
            horizon: 1.0,
        };
        assert!(bound_abs_sup_interval(&bad).is_err());
    }

    #[test]
    fn density_limit_bound_matches_frozen_values_and_is_continuous() {
        assert_relative_eq!(
            density_limit_bound(1.0, 0.5, 1.0).unwrap(),
            0.64293106919520733,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            density_limit_bound(1.0, 3.0, 2.0).unwrap(),
            0.25903519133178346,
            epsilon = 1e-14
        );
        // Symmetric in n and continuous at |n| = a.
        for i in 0..100 {
            let a = 0.2 + 0.05 * i as f64;
            let t = 0.3 + 0.07 * (i % 23) as f64;
            let inside = density_limit_bound(a, a - 1e-12, t).unwrap();
            let outside = density_limit_bound(a, a + 1e-12, t).unwrap();
            assert!((inside - outside).abs() < 1e-10);
            assert_eq!(
                density_limit_bound(a, 0.3, t).unwrap(),
                density_limit_bound(a, -0.3, t).unwrap()
            );
        }
    }

    #[test]
    fn sup_tail_bound_matches_frozen_value_and_dominates_the_exact_tail() {
        assert_relative_eq!(
            sup_tail_bound(0.0, 3.0, 1.0).unwrap(),
            0.21079844912372867,
            epsilon = 1e-14
        );
        // Exact hitting probability is 2·W₀(b_t > y − x) = erfc((y−x)/2√t),
        // always below c·e^{−(y−x)²/4t} for c = 2.
        for &(x, y, t) in &[(0.0f64, 1.0f64, 1.0f64), (-2.0, 1.5, 0.7), (1.0, 6.0, 3.0)] {
            let exact = 2.0 * phi_sf((y - x) / t.sqrt());
            assert!(sup_tail_bound(x, y, t).unwrap() >= exact);
        }
        assert_eq!(sup_tail_bound(0.0, 0.0, 1.0).unwrap(), 2.0);
        let custom = sup_tail_bound_with_constant(0.0, 3.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(custom, 0.21079844912372867 / 2.0, epsilon = 1e-14);
        assert!(sup_tail_bound(1.0, 0.0, 1.0).is_err());
    }

    // ---- Monte Carlo cross-checks (smaller budgets than the acceptance
    // suite; these catch sign/branch errors, the acceptance run pins the
    // 0.02 tolerance at full budget). ----

    #[test]
    fn closed_forms_agree_with_simulation() {
        let t = 1.0;
        let extremes = sample_path_extremes(t, 800, 20_000, 0xACCE55);

        // prob_hit_then_below on both branches.
        for &(a, x) in &[(1.0, 0.5), (1.0, 2.0), (0.7, -0.3)] {
            let closed = prob_hit_then_below(a, x, t).unwrap();
            let (mc, se) = empirical_probability(&extremes, |e| e.sup >= a && e.end <= x);
            assert!(
                (closed - mc).abs() < 0.03 && closed >= mc - 3.0 * se,
                "a={a} x={x}: closed {closed}, mc {mc} ± {se}"
            );
        }

        // Interval bounds dominate the simulated probabilities.
        let queries = [
            (0.8, -0.5, 0.5),
            (0.8, -2.5, -1.0),
            (0.8, 1.0, 2.0),
            (0.8, 0.4, 1.3),
            (1.5, -1.0, 1.0),
        ];
        for &(a, x, y) in &queries {
            let q = SupEventQuery {
                barrier: a,
                lower: x,
                upper: y,
                horizon: t,
            };
            let bound = bound_abs_sup_interval(&q).unwrap();
            let (mc, se) = empirical_probability(&extremes, |e| {
                e.sup.max(-e.inf) >= a && e.end >= x && e.end <= y
            });
            assert!(
                bound >= mc - 3.0 * se,
                "bound {bound} below simulation {mc} ± {se} for a={a}, [{x},{y}]"
            );
        }

        // Density limit bound dominates a small-window empirical density.
        let eps = 0.2;
        for &(a, n) in &[(1.0, 0.4), (1.0, 2.2), (0.5, 1.0)] {
            let bound = density_limit_bound(a, n, t).unwrap();
            let (mc, se) = empirical_probability(&extremes, |e| {
                e.sup.max(-e.inf) >= a && (e.end - n).abs() <= eps / 2.0
            });
            let density = mc / eps;
            let density_se = se / eps;
            assert!(
                bound >= density - 3.0 * density_se - 0.02,
                "a={a} n={n}: bound {bound}, empirical density {density} ± {density_se}"
            );
        }
    }

    #[test]
    fn simulation_is_deterministic_and_order_independent() {
        let a = sample_path_extremes(1.0, 50, 64, 7);
        let b = sample_path_extremes(1.0, 50, 64, 7);
        assert_eq!(a, b);
    }
}
