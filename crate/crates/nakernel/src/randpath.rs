//! Drifted Brownian paths on a discrete grid, time-changed Brownian
//! bridges, and the Gaussian CDF in the crate's variance-2s normalization.
//!
//! A path is stored as its values on a strictly increasing time grid
//! starting at 0, together with the seed that produced it.  Each
//! coordinate of a drifted path evolves independently with increments
//! N(μ_j Δ, 2Δ) over a step of length Δ, matching Var b_s = 2s.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;

/// CDF of the crate's centred Gaussian with variance 2:
/// Φ(x) = ½(1 + erf(x/2)).
///
/// Equivalently Φ(x) = Φ_std(x/√2) for the standard normal CDF Φ_std.
/// Uses libm's erf (≈1 ulp) rather than statrs's series (≈1e-11).
pub fn phi_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(0.5 * x))
}

/// Survival function 1 − Φ(x) = ½ erfc(x/2), accurate in the far tail
/// where `1.0 - phi_cdf(x)` would cancel.
pub fn phi_sf(x: f64) -> f64 {
    0.5 * libm::erfc(0.5 * x)
}

/// A sampled path: values of a `dim`-dimensional process on a strictly
/// increasing time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    grid: Vec<f64>,
    /// Node-major flat storage: `values[l * dim + j]` is coordinate j at node l.
    values: Vec<f64>,
    dim: usize,
    seed: u64,
}

impl DiscretePath {
    /// Builds a path from explicit grid and values (node-major flat layout).
    ///
    /// The grid must be strictly increasing, start at 0, and have at least
    /// two nodes; all entries must be finite.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("path dimension must be at least 1"));
        }
        if grid.len() < 2 {
            return Err(Error::invalid("path grid needs at least two nodes"));
        }
        if grid[0] != 0.0 {
            return Err(Error::invalid(format!(
                "path grid must start at 0, got {}",
                grid[0]
            )));
        }
        if !grid.windows(2).all(|w| w[0] < w[1] && w[1].is_finite()) {
            return Err(Error::invalid("path grid must be strictly increasing and finite"));
        }
        if values.len() != grid.len() * dim {
            return Err(Error::invalid(format!(
                "expected {} path values ({} nodes × dim {}), got {}",
                grid.len() * dim,
                grid.len(),
                dim,
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("path values must be finite"));
        }
        Ok(DiscretePath {
            grid,
            values,
            dim,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grid nodes (steps + 1).
    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Final grid time.
    pub fn horizon(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Path value at grid node `l`.
    pub fn node(&self, l: usize) -> &[f64] {
        &self.values[l * self.dim..(l + 1) * self.dim]
    }

    /// Coordinate `j` at grid node `l`.
    pub fn coord(&self, l: usize, j: usize) -> f64 {
        self.values[l * self.dim + j]
    }

    /// Value at an arbitrary time in the grid range, by linear
    /// interpolation between the neighbouring nodes.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let (l, frac) = self.locate(t)?;
        let lo = self.node(l);
        if frac == 0.0 {
            return Ok(lo.to_vec());
        }
        let hi = self.node(l + 1);
        Ok(lo
            .iter()
            .zip(hi)
            .map(|(a, b)| a + frac * (b - a))
            .collect())
    }

    /// Grid index of the time `t` if it coincides with a node (within a
    /// 1e-9·horizon tolerance), else an invalid-argument error.
    pub fn node_index(&self, t: f64) -> Result<usize> {
        let (l, frac) = self.locate(t)?;
        let step = self.grid[l + 1] - self.grid[l];
        let tol = 1e-9 * self.horizon().max(1.0);
        if frac * step <= tol {
            Ok(l)
        } else if (1.0 - frac) * step <= tol {
            Ok(l + 1)
        } else {
            Err(Error::invalid(format!(
                "time {t} does not coincide with a grid node"
            )))
        }
    }

    /// Returns (node index l, fractional position within [t_l, t_{l+1}]).
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let last = self.horizon();
        if !t.is_finite() || t < 0.0 || t > last {
            return Err(Error::invalid(format!(
                "time {t} outside the path range [0, {last}]"
            )));
        }
        if t == last {
            return Ok((self.grid.len() - 2, 1.0));
        }
        // partition_point: first index with grid[i] > t, so l = idx - 1.
        let idx = self.grid.partition_point(|&g| g <= t);
        let l = idx - 1;
        let step = self.grid[l + 1] - self.grid[l];
        Ok((l, (t - self.grid[l]) / step))
    }
}

/// Samples a `dim`-dimensional Brownian path with constant drift on a
/// uniform grid over `[0, horizon]`.
///
/// Coordinate j starts at `start[j]` and gains independent increments
/// N(drift[j]·Δ, 2Δ) per step of length Δ = horizon/n_steps.
pub fn sample_bm_drift(
    dim: usize,
    start: &[f64],
    drift: &[f64],
    horizon: f64,
    n_steps: usize,
    seed: u64,
) -> Result<DiscretePath> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if start.len() != dim || drift.len() != dim {
        return Err(Error::invalid(format!(
            "start/drift must have length {dim}, got {}/{}",
            start.len(),
            drift.len()
        )));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n_steps == 0 {
        return Err(Error::invalid("need at least one step"));
    }
    if !start.iter().chain(drift).all(|v| v.is_finite()) {
        return Err(Error::invalid("start and drift must be finite"));
    }

    let dt = horizon / n_steps as f64;
    let sd = (2.0 * dt).sqrt();
    let mut rng = rng::stream(seed);
    let mut grid = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity((n_steps + 1) * dim);
    grid.push(0.0);
    values.extend_from_slice(start);
    let mut current = start.to_vec();
    for l in 1..=n_steps {
        // l·dt rather than cumulative addition keeps the grid exact at the ends.
        grid.push(if l == n_steps { horizon } else { l as f64 * dt });
        for (j, c) in current.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *c += drift[j] * dt + sd * z;
        }
        values.extend_from_slice(&current);
    }
    DiscretePath::new(grid, values, dim, seed)
}

/// A one-dimensional Brownian bridge in a deterministic time change.
///
/// The bridge starts at `start` at clock 0 and is conditioned to hit `end`
/// at clock `clock_total`; [`sample_bridge`] returns its values at the
/// requested clock times.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSpec {
    pub start: f64,
    pub end: f64,
    /// Total clock at which the bridge is pinned to `end`.
    pub clock_total: f64,
    /// Non-decreasing clock times in [0, clock_total] at which values are
    /// returned.  Repeated clocks are allowed: over a zero-increment
    /// segment the time-changed bridge is almost surely constant (this
    /// happens routinely when a decaying integrand drops below f64
    /// resolution), so the previous value is carried through exactly.
    pub clock_grid: Vec<f64>,
}

/// Samples a variance-2s Brownian bridge at the clock times of `spec`.
///
/// Sequential conditioning: given the value x at clock c and the terminal
/// pin e at clock C, the value at the next clock c' is Gaussian with mean
/// x + (e − x)(c' − c)/(C − c) and variance 2(c' − c)(C − c')/(C − c).
/// When c' = C both collapse, so the last returned value equals `end`
/// exactly whenever `clock_grid` ends at `clock_total`.  Zero-increment
/// segments draw no randomness and repeat the current value.
pub fn sample_bridge(spec: &BridgeSpec, seed: u64) -> Result<Vec<f64>> {
    if !(spec.clock_total.is_finite() && spec.clock_total > 0.0) {
        return Err(Error::invalid(format!(
            "bridge clock_total must be positive, got {}",
            spec.clock_total
        )));
    }
    if !(spec.start.is_finite() && spec.end.is_finite()) {
        return Err(Error::invalid("bridge endpoints must be finite"));
    }
    if spec.clock_grid.is_empty() {
        return Err(Error::invalid("bridge clock grid is empty"));
    }
    let non_decreasing = spec.clock_grid.windows(2).all(|w| w[0] <= w[1]);
    if !non_decreasing
        || spec.clock_grid[0] < 0.0
        || *spec.clock_grid.last().unwrap() > spec.clock_total
    {
        return Err(Error::invalid(
            "bridge clock grid must be non-decreasing within [0, clock_total]",
        ));
    }

    let mut rng = rng::stream(seed);
    let big_c = spec.clock_total;
    let mut c_prev = 0.0;
    let mut x = spec.start;
    let mut out = Vec::with_capacity(spec.clock_grid.len());
    for &c in &spec.clock_grid {
        let dc = c - c_prev;
        if dc == 0.0 {
            out.push(x);
            continue;
        }
        let remaining = big_c - c_prev;
        let mean = x + (spec.end - x) * dc / remaining;
        let var = 2.0 * dc * (big_c - c) / remaining;
        let z: f64 = rng.sample(StandardNormal);
        x = mean + var.max(0.0).sqrt() * z;
        out.push(x);
        c_prev = c;
    }
    Ok(out)
}
