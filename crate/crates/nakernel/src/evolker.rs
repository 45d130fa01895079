//! Gaussian evolution kernels and the skew-product Monte Carlo estimator
//! for the heat kernel P^σ(0,t) of the time-dependent generator attached
//! to an A-path σ.
//!
//! Conditionally on σ, the V-part of the diffusion is a centred Gaussian
//! whose coordinate j runs on the clock c_j(u) = ∫₀ᵘ e^{2ϑ_j(σ_r)} dr, so
//! its time-t law has covariance diag(2·c_j(t)).  Conditionally on σ and
//! on the whole V-trajectory η, the M-part is centred Gaussian with
//! covariance
//!
//!   A^{σ,η}(t) = ∫₀ᵗ 2·[Ad(η_u)S(σ_u)][Ad(η_u)S(σ_u)]ᵀ du,
//!   S(σ) = diag(e^{ξ_i(σ)}),
//!
//! (the factor 2 matches the variance-2s Brownian convention: each
//! coordinate generator is e^{2λ(σ)}∂², i.e. a(u) = 2e^{2λ(σ_u)}).
//! The estimator therefore writes the kernel at g = (m, v) as
//!
//!   P^σ(0,t)(m, v) = E[ K^{M,σ,η}(0, m) | η(t) = v ] · K^{V,σ}(0, v),
//!
//! samples η as per-coordinate Brownian bridges in the clocks c_j pinned
//! at v, and averages the M-kernel density over the bridge draws.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::exec;
use crate::liegroup::{GroupElement, MetaAbelianGroup, RootSystem};
use crate::mc::{McEstimate, DEFAULT_MOM_BLOCKS};
use crate::randpath::{sample_bridge, BridgeSpec, DiscretePath};
use crate::rng;

/// A centred-or-shifted Gaussian kernel: covariance A (symmetric positive
/// definite) and mean B, with the Cholesky factor cached for density
/// evaluation.
#[derive(Debug, Clone)]
pub struct GaussianKernel {
    a: DMatrix<f64>,
    b: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl GaussianKernel {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d {
            return Err(Error::invalid(format!(
                "covariance must be square and nonempty, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.len() != d {
            return Err(Error::invalid(format!(
                "mean has dimension {}, covariance is {d}×{d}",
                b.len()
            )));
        }
        if !a.iter().chain(b.iter()).all(|x| x.is_finite()) {
            return Err(Error::SingularKernel("non-finite kernel parameters".into()));
        }
        let scale = a.amax();
        for i in 0..d {
            for j in (i + 1)..d {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale.max(1e-300) {
                    return Err(Error::invalid(format!(
                        "covariance is not symmetric at ({i}, {j}): {} vs {}",
                        a[(i, j)],
                        a[(j, i)]
                    )));
                }
            }
        }
        let chol = Cholesky::new(a.clone()).ok_or_else(|| {
            Error::SingularKernel("covariance is not positive definite".into())
        })?;
        let log_det = 2.0 * (0..d).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>();
        Ok(GaussianKernel { a, b, chol, log_det })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.b
    }

    /// ln det A.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// ln of the density (2π)^{−d/2} (det A)^{−1/2} e^{−½ (x−B)·A⁻¹(x−B)}.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        let mut centered = DVector::from_row_slice(x);
        centered -= &self.b;
        let solved = self.chol.solve(&centered);
        let quad = centered.dot(&solved);
        -0.5 * (self.dim() as f64 * (2.0 * std::f64::consts::PI).ln() + self.log_det + quad)
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }
}

/// Per-coordinate clocks c_j(u) = ∫ₛᵘ e^{2ϑ_j(σ_r)} dr on the grid nodes
/// of the underlying σ-path window.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSet {
    /// Grid nodes of the window [s, t] (shared with the σ-path).
    pub grid: Vec<f64>,
    /// clocks[j][l] is c_j at grid node l; clocks[j][0] = 0.
    pub clocks: Vec<Vec<f64>>,
}

impl ClockSet {
    /// Total clock c_j(t) of coordinate j over the window.
    pub fn total(&self, j: usize) -> f64 {
        *self.clocks[j].last().unwrap()
    }
}

/// V-part evolution kernel over [s, t]: centred Gaussian with covariance
/// diag(2·c_j(t)), plus the clocks themselves (needed to bridge η).
///
/// `s` and `t` must coincide with σ-grid nodes.
pub fn kernel_v(
    roots: &RootSystem,
    sigma: &DiscretePath,
    s: f64,
    t: f64,
) -> Result<(GaussianKernel, ClockSet)> {
    if sigma.dim() != roots.rank() {
        return Err(Error::invalid(format!(
            "σ-path dimension {} does not match root-system rank {}",
            sigma.dim(),
            roots.rank()
        )));
    }
    if !(s < t) {
        return Err(Error::invalid(format!("need s < t, got s = {s}, t = {t}")));
    }
    let l_start = sigma.node_index(s)?;
    let l_end = sigma.node_index(t)?;
    let nodes = l_end - l_start + 1;
    let grid: Vec<f64> = sigma.grid()[l_start..=l_end].to_vec();

    let n = roots.v_dim();
    let mut clocks = vec![Vec::with_capacity(nodes); n];
    let mut integrands = vec![0.0f64; n];
    for (j, form) in roots.theta().iter().enumerate() {
        integrands[j] = (2.0 * form.eval(sigma.node(l_start))).exp();
        clocks[j].push(0.0);
    }
    for l in (l_start + 1)..=l_end {
        let width = sigma.grid()[l] - sigma.grid()[l - 1];
        for (j, form) in roots.theta().iter().enumerate() {
            let next = (2.0 * form.eval(sigma.node(l))).exp();
            let increment = 0.5 * width * (integrands[j] + next);
            let prev = *clocks[j].last().unwrap();
            clocks[j].push(prev + increment);
            integrands[j] = next;
        }
    }

    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        let total = *clocks[j].last().unwrap();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::SingularKernel(format!(
                "clock {j} accumulated {total} over [{s}, {t}]"
            )));
        }
        a[(j, j)] = 2.0 * total;
    }
    let kernel = GaussianKernel::new(a, DVector::zeros(n))?;
    Ok((kernel, ClockSet { grid, clocks }))
}

/// M-part evolution kernel over [0, t] conditionally on σ and the full
/// V-trajectory η (given on the same grid): centred Gaussian with
/// covariance ∫ 2·[Ad(η)S(σ)][Ad(η)S(σ)]ᵀ du, trapezoidal in u.
pub fn kernel_m_given_eta(
    group: &MetaAbelianGroup,
    sigma: &DiscretePath,
    eta: &DiscretePath,
    t: f64,
) -> Result<GaussianKernel> {
    let roots = group.roots();
    if sigma.dim() != roots.rank() {
        return Err(Error::invalid("σ-path dimension does not match root-system rank"));
    }
    if eta.dim() != group.v_dim() {
        return Err(Error::invalid(format!(
            "η-path dimension {} does not match v-dimension {}",
            eta.dim(),
            group.v_dim()
        )));
    }
    let l_end = sigma.node_index(t)?;
    if eta.n_nodes() != l_end + 1 || eta.grid() != &sigma.grid()[..=l_end] {
        return Err(Error::invalid(
            "η must be given on the σ-grid nodes of the window [0, t]",
        ));
    }

    let m = group.m_dim();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut scaled = DMatrix::<f64>::zeros(m, m);
    for l in 0..=l_end {
        let weight = trapezoid_weight(sigma.grid(), l, l_end);
        // M = Ad(η_l) · diag(e^{ξ_i(σ_l)}): scale the columns of Ad.
        let ad = group.adjoint_on_m(eta.node(l));
        scaled.copy_from(&ad);
        for (i, form) in roots.xi().iter().enumerate() {
            let factor = form.eval(sigma.node(l)).exp();
            scaled.column_mut(i).scale_mut(factor);
        }
        // A += 2·w · M Mᵀ
        a.gemm(2.0 * weight, &scaled, &scaled.transpose(), 1.0);
    }
    GaussianKernel::new(a, DVector::zeros(m))
}

fn trapezoid_weight(grid: &[f64], l: usize, l_end: usize) -> f64 {
    let left = if l == 0 { 0.0 } else { grid[l] - grid[l - 1] };
    let right = if l == l_end { 0.0 } else { grid[l + 1] - grid[l] };
    0.5 * (left + right)
}

/// Λ^η(0,t): the sup of the Euclidean norm of η over its grid.
pub fn lambda_sup(eta: &DiscretePath) -> f64 {
    (0..eta.n_nodes())
        .map(|l| eta.node(l).iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Point estimate of P^σ(0,t)(m, v): plain mean and median-of-means over
/// the η-bridge draws, both scaled by the exact V-marginal density.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPointEstimate {
    pub plain: McEstimate,
    pub median_of_means: McEstimate,
}

impl KernelPointEstimate {
    /// The default reported value (plain mean).
    pub fn value(&self) -> &McEstimate {
        &self.plain
    }
}

/// Samples one η-trajectory (all coordinates bridged to `v_target` at
/// time t) on the window grid, using one derived stream per coordinate.
fn sample_eta_bridge(
    clocks: &ClockSet,
    v_target: &[f64],
    eta_seed: u64,
) -> Result<DiscretePath> {
    let n = clocks.clocks.len();
    let nodes = clocks.grid.len();
    let mut values = vec![0.0f64; nodes * n];
    for (j, target) in v_target.iter().enumerate() {
        let spec = BridgeSpec {
            start: 0.0,
            end: *target,
            clock_total: *clocks.clocks[j].last().unwrap(),
            clock_grid: clocks.clocks[j][1..].to_vec(),
        };
        let coords = sample_bridge(&spec, rng::derive_seed(eta_seed, j as u64))?;
        for (l, value) in coords.into_iter().enumerate() {
            values[(l + 1) * n + j] = value;
        }
    }
    DiscretePath::new(clocks.grid.clone(), values, n, eta_seed)
}

/// Monte Carlo estimate of P^σ(0,t) at the group element `target`,
/// averaging the conditional M-kernel density over `n_eta` η-bridges.
///
/// η-draw i uses the derived stream `derive_seed(seed, i)`; the average is
/// taken sequentially over the collected draws, so the result is
/// bit-identical for any worker count.
pub fn estimate_p_sigma(
    group: &MetaAbelianGroup,
    sigma: &DiscretePath,
    target: &GroupElement,
    t: f64,
    n_eta: usize,
    seed: u64,
) -> Result<KernelPointEstimate> {
    if target.m.len() != group.m_dim() || target.v.len() != group.v_dim() {
        return Err(Error::invalid(format!(
            "target has dimensions ({}, {}), group is ({}, {})",
            target.m.len(),
            target.v.len(),
            group.m_dim(),
            group.v_dim()
        )));
    }
    if n_eta == 0 {
        return Err(Error::invalid("need at least one η-draw"));
    }
    let (v_kernel, clocks) = kernel_v(group.roots(), sigma, 0.0, t)?;
    let v_density = v_kernel.density(target.v.as_slice());

    let m_target: Vec<f64> = target.m.iter().cloned().collect();
    let v_target: Vec<f64> = target.v.iter().cloned().collect();
    let draws: Vec<Result<f64>> = exec::map_indexed(n_eta, |i| {
        let eta_seed = rng::derive_seed(seed, i as u64);
        let eta = sample_eta_bridge(&clocks, &v_target, eta_seed)?;
        let kernel = kernel_m_given_eta(group, sigma, &eta, t)?;
        Ok(kernel.density(&m_target))
    });
    let mut samples = Vec::with_capacity(n_eta);
    for draw in draws {
        samples.push(draw?);
    }
    Ok(KernelPointEstimate {
        plain: McEstimate::from_samples(&samples, seed).scaled(v_density),
        median_of_means: McEstimate::median_of_means(&samples, DEFAULT_MOM_BLOCKS, seed)
            .scaled(v_density),
    })
}

/// Grid evaluation of P^σ(0,t) over a product of m-points and v-points.
///
/// Row v reuses one set of η-bridges pinned at that v for every m-point
/// (the conditional M-kernel does not depend on m), so
/// `out[vi][mi]` equals `estimate_p_sigma` at (m_points[mi], v_points[vi])
/// with seed `derive_seed(seed, vi)`, at a fraction of the cost.
pub fn estimate_p_sigma_grid(
    group: &MetaAbelianGroup,
    sigma: &DiscretePath,
    m_points: &[Vec<f64>],
    v_points: &[Vec<f64>],
    t: f64,
    n_eta: usize,
    seed: u64,
) -> Result<Vec<Vec<KernelPointEstimate>>> {
    if m_points.is_empty() || v_points.is_empty() {
        return Err(Error::invalid("grid must contain at least one point per block"));
    }
    for p in m_points {
        if p.len() != group.m_dim() {
            return Err(Error::invalid("m-point dimension mismatch"));
        }
    }
    for p in v_points {
        if p.len() != group.v_dim() {
            return Err(Error::invalid("v-point dimension mismatch"));
        }
    }
    if n_eta == 0 {
        return Err(Error::invalid("need at least one η-draw"));
    }
    let (v_kernel, clocks) = kernel_v(group.roots(), sigma, 0.0, t)?;

    let mut out = Vec::with_capacity(v_points.len());
    for (vi, v_point) in v_points.iter().enumerate() {
        let row_seed = rng::derive_seed(seed, vi as u64);
        let v_density = v_kernel.density(v_point);
        // One M-kernel per η-draw, shared across all m-points of the row.
        let kernels: Vec<Result<GaussianKernel>> = exec::map_indexed(n_eta, |i| {
            let eta_seed = rng::derive_seed(row_seed, i as u64);
            let eta = sample_eta_bridge(&clocks, v_point, eta_seed)?;
            kernel_m_given_eta(group, sigma, &eta, t)
        });
        let mut resolved = Vec::with_capacity(n_eta);
        for k in kernels {
            resolved.push(k?);
        }
        let mut row = Vec::with_capacity(m_points.len());
        let mut samples = vec![0.0f64; n_eta];
        for m_point in m_points {
            for (i, kernel) in resolved.iter().enumerate() {
                samples[i] = kernel.density(m_point);
            }
            row.push(KernelPointEstimate {
                plain: McEstimate::from_samples(&samples, row_seed).scaled(v_density),
                median_of_means: McEstimate::median_of_means(
                    &samples,
                    DEFAULT_MOM_BLOCKS,
                    row_seed,
                )
                .scaled(v_density),
            });
        }
        out.push(row);
    }
    Ok(out)
}
