//! Experiment configuration: a single TOML file drives every command.
//!
//! Unknown keys are rejected everywhere, so a typo fails loudly instead of
//! silently running defaults.  Every section has complete defaults; the
//! built-in configuration (no `--config` flag) runs the rank-one
//! Heisenberg-type instance with drift α = (1, 1).

use crate::CliError;
use nakernel::liegroup::{heisenberg_instance, LinearForm, MetaAbelianGroup, RootSystem};
use nakernel::poisson::EstimatorBudget;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every command derives its streams from this value.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default)]
    pub dufresne: DufresneConfig,
    #[serde(default)]
    pub reflection: ReflectionConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub poisson: PoissonConfig,
    #[serde(default)]
    pub exponents: ExponentsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config must deserialize via defaults")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Serializes the resolved configuration; this exact string is hashed
    /// into the result record and reproduces the run when loaded back.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }
}

fn default_seed() -> u64 {
    42
}

/// Group model: either the `heisenberg` preset (size n, two base roots)
/// or explicit root data with adjoint matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `"heisenberg"` or absent for an explicit group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Preset size: n pairs (X_j, Y_j) plus the common centre Z.
    #[serde(default = "default_one")]
    pub n: usize,
    /// Preset base root acting on the v-block.
    #[serde(default = "default_xi1")]
    pub xi1: Vec<f64>,
    /// Preset base root acting on the y-part of the m-block.
    #[serde(default = "default_xi2")]
    pub xi2: Vec<f64>,
    /// Drift vector α of the Brownian motion on A.
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    /// Witness that the positive chamber is nonempty; defaults to α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_o: Option<Vec<f64>>,
    /// Explicit m-block roots (one coefficient vector per m-coordinate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<Vec<f64>>>,
    /// Explicit v-block roots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<f64>>>,
    /// Explicit adjoint matrices ad(X_j), row-major m_dim × m_dim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ads: Option<Vec<Vec<Vec<f64>>>>,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig {
            preset: Some("heisenberg".to_string()),
            n: 1,
            xi1: default_xi1(),
            xi2: default_xi2(),
            alpha: default_alpha(),
            h_o: None,
            xi: None,
            theta: None,
            ads: None,
        }
    }
}

fn default_one() -> usize {
    1
}
fn default_xi1() -> Vec<f64> {
    vec![1.0, 0.0]
}
fn default_xi2() -> Vec<f64> {
    vec![0.0, 1.0]
}
fn default_alpha() -> Vec<f64> {
    vec![1.0, 1.0]
}

impl GroupConfig {
    pub fn build(&self) -> Result<MetaAbelianGroup, CliError> {
        let h_o = self.h_o.clone().unwrap_or_else(|| self.alpha.clone());
        let explicit = self.xi.is_some() || self.theta.is_some() || self.ads.is_some();
        match self.preset.as_deref() {
            // An omitted preset with no explicit root data still means the
            // default preset, so `[group]` with just an alpha override works.
            Some("heisenberg") | None if !explicit => {
                let xi1 = LinearForm::new(self.xi1.clone())?;
                let xi2 = LinearForm::new(self.xi2.clone())?;
                Ok(heisenberg_instance(self.n, xi1, xi2, self.alpha.clone(), h_o)?)
            }
            Some("heisenberg") => Err(CliError::Config(
                "group: preset and explicit root data are mutually exclusive".into(),
            )),
            Some(other) => Err(CliError::Config(format!(
                "group: unknown preset {other:?} (supported: \"heisenberg\")"
            ))),
            None => {
                let (Some(xi), Some(theta), Some(ads)) = (&self.xi, &self.theta, &self.ads)
                else {
                    return Err(CliError::Config(
                        "group: explicit groups need xi, theta, and ads together".into(),
                    ));
                };
                let forms = |rows: &[Vec<f64>]| -> Result<Vec<LinearForm>, CliError> {
                    rows.iter()
                        .map(|r| LinearForm::new(r.clone()).map_err(CliError::from))
                        .collect()
                };
                let roots =
                    RootSystem::new(forms(xi)?, forms(theta)?, self.alpha.clone(), h_o)?;
                let m_dim = roots.m_dim();
                let mut matrices = Vec::with_capacity(ads.len());
                for (j, rows) in ads.iter().enumerate() {
                    if rows.len() != m_dim || rows.iter().any(|r| r.len() != m_dim) {
                        return Err(CliError::Config(format!(
                            "group: ads[{j}] must be a {m_dim}×{m_dim} matrix"
                        )));
                    }
                    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                    matrices.push(DMatrix::from_row_slice(m_dim, m_dim, &flat));
                }
                Ok(MetaAbelianGroup::new(roots, matrices)?)
            }
        }
    }
}

/// Monte Carlo budget for the boundary-kernel estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub horizon: f64,
    pub n_sigma: usize,
    pub n_eta: usize,
    pub n_steps: usize,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig {
            horizon: 8.0,
            n_sigma: 256,
            n_eta: 64,
            n_steps: 256,
        }
    }
}

impl BudgetConfig {
    pub fn to_budget(&self) -> EstimatorBudget {
        EstimatorBudget {
            horizon: self.horizon,
            n_sigma: self.n_sigma,
            n_eta: self.n_eta,
            n_steps: self.n_steps,
        }
    }
}

/// `verify-dufresne`: scalar perpetuities against their inverse-gamma law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DufresneConfig {
    /// Drift strengths μ; each case samples ∫e^{2σ} du with σ-drift −μ.
    pub mus: Vec<f64>,
    pub n_samples: usize,
    pub steps_per_unit: usize,
    /// Relative tail tolerance of the adaptive horizon rule.
    pub tail_tol: f64,
    pub ks_limit: f64,
}

impl Default for DufresneConfig {
    fn default() -> Self {
        DufresneConfig {
            mus: vec![1.0, 2.0, 4.0],
            n_samples: 20_000,
            steps_per_unit: 256,
            tail_tol: 1e-3,
            ks_limit: 0.03,
        }
    }
}

/// `verify-reflection`: closed forms against a shared path simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    /// (barrier, endpoint) pairs for the exact hit probability.
    pub hit_queries: Vec<[f64; 2]>,
    /// Two-sided tolerance for the exact hit probability.
    pub hit_tolerance: f64,
    /// (barrier, lower, upper) triples for the region bounds; queries in
    /// no region are reported as skipped, not failed.
    pub region_queries: Vec<[f64; 3]>,
    /// Dominance slack for upper bounds: bound ≥ estimate − margin.
    pub dominance_margin: f64,
    /// Barrier for the endpoint-density checks.
    pub density_barrier: f64,
    /// (endpoint, window width) pairs for the endpoint-density bound.
    pub density_points: Vec<[f64; 2]>,
    /// Levels for the one-sided sup tail bound.
    pub tail_levels: Vec<f64>,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        ReflectionConfig {
            n_paths: 100_000,
            n_steps: 4000,
            horizon: 1.0,
            hit_queries: vec![[1.0, 0.5], [1.0, 1.7], [0.8, 0.8]],
            hit_tolerance: 0.02,
            region_queries: vec![
                [1.2, -0.6, 0.6],
                [1.0, -3.0, -1.5],
                [1.0, 1.5, 3.0],
                [1.2, 0.6, 1.9],
                [1.0, -1.5, 1.5],
            ],
            dominance_margin: 0.005,
            density_barrier: 1.2,
            density_points: vec![[0.0, 0.2], [0.5, 0.2]],
            tail_levels: vec![2.0, 3.0],
        }
    }
}

/// `kernel`: skew-product estimates on a product grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub t: f64,
    pub n_eta: usize,
    /// σ-path steps over [0, t].
    pub n_steps: usize,
    /// Fixed σ-path values, one row of rank coordinates per grid node
    /// (n_steps + 1 rows); absent means σ is sampled with drift −2α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_values: Option<Vec<Vec<f64>>>,
    /// Grid covers [−half_width, half_width] per coordinate.
    pub half_width: f64,
    pub points_per_axis: usize,
    pub normalization_tolerance: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            t: 1.0,
            n_eta: 256,
            n_steps: 128,
            sigma_values: None,
            half_width: 8.0,
            points_per_axis: 33,
            normalization_tolerance: 0.05,
        }
    }
}

/// `verify-bounds`: fit envelope constants, validate on holdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub n_fit: usize,
    pub n_holdout: usize,
    pub n_eta: usize,
    pub t: f64,
    pub n_steps: usize,
    /// Evaluation points are uniform in this box per coordinate.
    pub box_half_width: f64,
    pub violation_limit: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            n_fit: 500,
            n_holdout: 500,
            n_eta: 64,
            t: 1.0,
            n_steps: 100,
            box_half_width: 4.0,
            violation_limit: 0.01,
        }
    }
}

/// A single evaluation point for the `poisson` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

/// `poisson`: boundary-kernel values and radial decay regression.
///
/// `points` is last so that the serialized TOML keeps plain values ahead
/// of the array-of-tables section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonConfig {
    /// Dilation weights; defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Unit-norm direction for the decay regression.
    pub direction_m: Vec<f64>,
    pub direction_v: Vec<f64>,
    /// Radii for the regression; empty disables the regression.
    pub radii: Vec<f64>,
    /// Slack added to the sharp exponent: slope must be ≤ −exponent + margin.
    pub slope_margin: f64,
    /// Extra points to estimate ν at (reported, not pass/fail).
    pub points: Vec<PointConfig>,
}

impl Default for PoissonConfig {
    fn default() -> Self {
        PoissonConfig {
            rho: None,
            direction_m: vec![0.0, 0.0],
            direction_v: vec![1.0],
            radii: vec![2.0, 4.0, 8.0, 16.0],
            slope_margin: 0.5,
            points: Vec::new(),
        }
    }
}

/// `exponents`: the closed-form decay exponent table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    /// Dilation weights; defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Integrability orders for the squared-ratio family (each > 1).
    pub q_values: Vec<f64>,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        ExponentsConfig {
            rho: None,
            q_values: vec![2.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_toml_gives_the_builtin_default() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.group.preset.as_deref(), Some("heisenberg"));
        cfg.group.build().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("n_sampels = 3").unwrap_err();
        assert!(err.to_string().contains("n_sampels"), "{err}");
        let err = ExperimentConfig::from_toml("[dufresne]\nks_limt = 0.03").unwrap_err();
        assert!(err.to_string().contains("ks_limt"), "{err}");
    }

    #[test]
    fn config_round_trips_through_toml() {
        let mut cfg = ExperimentConfig {
            seed: 7,
            ..Default::default()
        };
        cfg.dufresne.mus = vec![2.5];
        cfg.poisson.rho = Some(vec![1.0, 2.0]);
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn preset_with_explicit_roots_is_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.group.xi = Some(vec![vec![0.0, 1.0]]);
        let err = cfg.group.build().unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"), "{err}");
    }

    #[test]
    fn group_section_with_only_alpha_keeps_the_preset() {
        let cfg = ExperimentConfig::from_toml("[group]\nalpha = [2.0, 0.5]").unwrap();
        assert_eq!(cfg.group.preset, None);
        let group = cfg.group.build().unwrap();
        assert!(!group.is_abelian());
        assert_eq!(group.roots().alpha(), &[2.0, 0.5]);
    }

    #[test]
    fn partial_explicit_group_is_rejected() {
        let cfg = ExperimentConfig::from_toml("[group]\nxi = [[0.0, 1.0]]").unwrap();
        let err = cfg.group.build().unwrap_err();
        assert!(err.to_string().contains("together"), "{err}");
    }

    #[test]
    fn unknown_preset_is_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.group.preset = Some("nilpotent".into());
        let err = cfg.group.build().unwrap_err();
        assert!(err.to_string().contains("unknown preset"), "{err}");
    }

    #[test]
    fn explicit_group_builds() {
        let text = r#"
[group]
alpha = [1.0, 1.0]
xi = [[0.0, 1.0], [1.0, 1.0]]
theta = [[1.0, 0.0]]
ads = [[[0.0, 0.0], [1.0, 0.0]]]
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let group = cfg.group.build().unwrap();
        assert_eq!(group.m_dim(), 2);
        assert_eq!(group.v_dim(), 1);
        assert!(!group.is_abelian());
    }

    #[test]
    fn explicit_group_with_bad_ad_shape_is_rejected() {
        let text = r#"
[group]
alpha = [1.0, 1.0]
xi = [[0.0, 1.0], [1.0, 1.0]]
theta = [[1.0, 0.0]]
ads = [[[0.0, 0.0]]]
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let err = cfg.group.build().unwrap_err();
        assert!(err.to_string().contains("2×2"), "{err}");
    }
}
