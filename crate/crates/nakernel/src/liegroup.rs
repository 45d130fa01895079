//! The algebraic model: a meta-abelian nilpotent group N = exp(𝔪 ⊕ 𝔳) in
//! exponential coordinates, together with the root data of a diagonal
//! ℝᵏ-action on it.
//!
//! 𝔪 is an abelian ideal, 𝔳 an abelian complement acting on 𝔪 through
//! commuting strictly lower-triangular matrices ad_j = ad(V_j)|𝔪.  In the
//! coordinates (m, v) the group law reads
//!
//!   (m₁, v₁)·(m₂, v₂) = (m₁ + Ad(v₁)m₂, v₁ + v₂),
//!   Ad(v) = exp(Σ_j v_j ad_j)  (a finite sum: the series terminates at
//!   the nilpotency degree k₀),
//!
//! with inverse (m, v)⁻¹ = (−Ad(−v)m, −v).  Each m-coordinate i carries a
//! root ξ_i and each v-coordinate j a root ϑ_j ∈ (ℝᵏ)*; the element
//! a ∈ ℝᵏ acts by scaling coordinate c with weight λ_c(a), and the
//! anisotropic dilation δ_t^ρ scales coordinate c by t^{λ_c(ρ)}.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A linear form on ℝᵏ, given by its coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    coeffs: Vec<f64>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("linear form needs at least one coefficient"));
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("linear form coefficients must be finite"));
        }
        Ok(LinearForm { coeffs })
    }

    /// λ(a) = Σ_i coeffs_i · a_i.
    pub fn eval(&self, a: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.coeffs.len());
        self.coeffs.iter().zip(a).map(|(c, x)| c * x).sum()
    }

    /// Squared Euclidean norm ‖λ‖² of the coefficient vector.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Dimension k of the domain.
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Pointwise sum of two forms on the same space.
    pub fn sum(&self, other: &LinearForm) -> Result<LinearForm> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("cannot add forms on different spaces"));
        }
        LinearForm::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Which family of roots an operation ranges over: the V-block roots Θ, or
/// the full multiset Λ = Ξ ∪ Θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSubset {
    Theta,
    Lambda,
}

/// Root data of the ℝᵏ-action: one form ξ_i per m-coordinate, one form
/// ϑ_j per v-coordinate, the drift parameter α, and a witness H_o with
/// λ(H_o) > 0 for every root (so that all roots lie in one open
/// half-space).
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    xi: Vec<LinearForm>,
    theta: Vec<LinearForm>,
    alpha: Vec<f64>,
    h_o: Vec<f64>,
}

impl RootSystem {
    pub fn new(
        xi: Vec<LinearForm>,
        theta: Vec<LinearForm>,
        alpha: Vec<f64>,
        h_o: Vec<f64>,
    ) -> Result<Self> {
        if xi.is_empty() || theta.is_empty() {
            return Err(Error::invalid(
                "root system needs at least one ξ and one ϑ root",
            ));
        }
        let k = alpha.len();
        if k == 0 {
            return Err(Error::invalid("drift parameter must be nonempty"));
        }
        if h_o.len() != k {
            return Err(Error::invalid(format!(
                "positivity witness has dimension {}, drift has {k}",
                h_o.len()
            )));
        }
        if !alpha.iter().chain(&h_o).all(|c| c.is_finite()) {
            return Err(Error::invalid("drift and witness must be finite"));
        }
        for (name, family) in [("xi", &xi), ("theta", &theta)] {
            for (i, form) in family.iter().enumerate() {
                if form.dim() != k {
                    return Err(Error::invalid(format!(
                        "root {name}[{i}] has dimension {}, expected {k}",
                        form.dim()
                    )));
                }
                let at_witness = form.eval(&h_o);
                if !(at_witness > 0.0) {
                    return Err(Error::invalid(format!(
                        "root {name}[{i}] = {:?} has value {at_witness} at the \
                         positivity witness; all roots must be positive there",
                        form.coeffs()
                    )));
                }
            }
        }
        Ok(RootSystem {
            xi,
            theta,
            alpha,
            h_o,
        })
    }

    /// Dimension k of the acting abelian group A.
    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    pub fn m_dim(&self) -> usize {
        self.xi.len()
    }

    pub fn v_dim(&self) -> usize {
        self.theta.len()
    }

    pub fn xi(&self) -> &[LinearForm] {
        &self.xi
    }

    pub fn theta(&self) -> &[LinearForm] {
        &self.theta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn h_o(&self) -> &[f64] {
        &self.h_o
    }

    /// All roots Λ = Ξ ∪ Θ, with multiplicity.
    pub fn all_roots(&self) -> impl Iterator<Item = &LinearForm> {
        self.xi.iter().chain(self.theta.iter())
    }

    fn subset(&self, subset: RootSubset) -> Vec<&LinearForm> {
        match subset {
            RootSubset::Theta => self.theta.iter().collect(),
            RootSubset::Lambda => self.all_roots().collect(),
        }
    }

    /// ρ₀(a) = Σ_{λ∈Λ} λ(a), the trace of the action on 𝔫.
    pub fn rho_zero(&self, a: &[f64]) -> f64 {
        self.all_roots().map(|l| l.eval(a)).sum()
    }

    /// Modular-type character χ(a) = e^{ρ₀(a)}.
    pub fn chi(&self, a: &[f64]) -> f64 {
        self.rho_zero(a).exp()
    }

    /// γ_{Λo}(a) = min_{λ∈Λo} λ(a).
    pub fn gamma_min(&self, subset: RootSubset, a: &[f64]) -> f64 {
        self.subset(subset)
            .iter()
            .map(|l| l.eval(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// γ̄_{Λo}(a) = min_{λ∈Λo} λ(a)/‖λ‖².
    pub fn gamma_bar(&self, subset: RootSubset, a: &[f64]) -> f64 {
        self.subset(subset)
            .iter()
            .map(|l| l.eval(a) / l.norm_sq())
            .fold(f64::INFINITY, f64::min)
    }

    /// First root with λ(a) ≤ 0, as (family, index, value, form), if any.
    fn first_nonpositive(&self, a: &[f64]) -> Option<(&'static str, usize, f64, &LinearForm)> {
        for (name, family) in [("xi", &self.xi), ("theta", &self.theta)] {
            for (i, form) in family.iter().enumerate() {
                let value = form.eval(a);
                if !(value > 0.0) {
                    return Some((name, i, value, form));
                }
            }
        }
        None
    }

    /// Checks α ∈ A⁺, i.e. λ(α) > 0 for every root; the error names the
    /// first violating root.
    pub fn require_alpha_positive(&self) -> Result<()> {
        match self.first_nonpositive(&self.alpha) {
            None => Ok(()),
            Some((name, i, value, form)) => Err(Error::DivergentDrift(format!(
                "drift alpha = {:?} is not in the positive chamber: \
                 root {name}[{i}] = {:?} gives lambda(alpha) = {value}",
                self.alpha,
                form.coeffs()
            ))),
        }
    }

    /// Checks that an arbitrary direction lies in A⁺ (λ(a) > 0 for every
    /// root); `what` names the argument in the error message.
    pub fn require_direction_positive(&self, a: &[f64], what: &str) -> Result<()> {
        if a.len() != self.rank() {
            return Err(Error::invalid(format!(
                "{what} has dimension {}, expected {}",
                a.len(),
                self.rank()
            )));
        }
        match self.first_nonpositive(a) {
            None => Ok(()),
            Some((name, i, value, form)) => Err(Error::invalid(format!(
                "{what} = {a:?} is not in the positive chamber: \
                 root {name}[{i}] = {:?} gives {value}",
                form.coeffs()
            ))),
        }
    }
}

/// A group element in exponential coordinates: the 𝔪-part and the 𝔳-part.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub m: DVector<f64>,
    pub v: DVector<f64>,
}

impl GroupElement {
    pub fn new(m: Vec<f64>, v: Vec<f64>) -> Self {
        GroupElement {
            m: DVector::from_vec(m),
            v: DVector::from_vec(v),
        }
    }

    pub fn zero(m_dim: usize, v_dim: usize) -> Self {
        GroupElement {
            m: DVector::zeros(m_dim),
            v: DVector::zeros(v_dim),
        }
    }
}

/// Nilpotency degree of commuting strictly lower-triangular matrices:
/// the largest p ≥ 1 for which some product of p basis matrices is
/// nonzero.  Abelian input (all matrices zero) is an error — there is no
/// finite degree to report.
///
/// Because the matrices commute, products are determined by multisets of
/// factors, and vanishing of all length-(p+1) basis products is
/// equivalent to (Σ c_j ad_j)^{p+1} = 0 for every coefficient vector c.
pub fn compute_k_o(ads: &[DMatrix<f64>]) -> Result<usize> {
    let nonzero: Vec<&DMatrix<f64>> = ads.iter().filter(|a| a.amax() > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::DegenerateGroup(
            "all structure maps are zero (abelian nilpotent part), \
             nilpotency degree is undefined"
                .into(),
        ));
    }
    // Products of length p, indexed by non-decreasing factor multisets.
    // Strict lower-triangularity guarantees termination after < m steps.
    let mut current: Vec<(usize, DMatrix<f64>, f64)> = nonzero
        .iter()
        .enumerate()
        .map(|(j, a)| (j, (*a).clone(), a.amax()))
        .collect();
    let mut degree = 1;
    loop {
        let mut next = Vec::new();
        for (last, product, scale) in &current {
            for (j, ad) in nonzero.iter().enumerate().skip(*last) {
                let candidate = product * *ad;
                let candidate_scale = scale * ad.amax();
                // Treat as zero when at rounding level relative to the
                // factors' magnitudes.
                if candidate.amax() > 1e-12 * candidate_scale {
                    next.push((j, candidate, candidate_scale));
                }
            }
        }
        if next.is_empty() {
            return Ok(degree);
        }
        degree += 1;
        current = next;
    }
}

/// The group N with its root data.  Construction validates shape, strict
/// lower-triangularity and pairwise commutation of the structure maps
/// (commutation is what makes v ↦ Ad(v) a homomorphism and the group law
/// associative), and precomputes the nilpotency degree k₀ (0 for the
/// abelian degeneration, where k₀-dependent quantities are undefined).
#[derive(Debug, Clone, PartialEq)]
pub struct MetaAbelianGroup {
    roots: RootSystem,
    ad: Vec<DMatrix<f64>>,
    k_o: usize,
}

impl MetaAbelianGroup {
    pub fn new(roots: RootSystem, ad: Vec<DMatrix<f64>>) -> Result<Self> {
        let m = roots.m_dim();
        if ad.len() != roots.v_dim() {
            return Err(Error::invalid(format!(
                "need one structure map per v-coordinate: got {}, expected {}",
                ad.len(),
                roots.v_dim()
            )));
        }
        for (j, a) in ad.iter().enumerate() {
            if a.nrows() != m || a.ncols() != m {
                return Err(Error::invalid(format!(
                    "structure map {j} is {}×{}, expected {m}×{m}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if !a.iter().all(|e| e.is_finite()) {
                return Err(Error::invalid(format!("structure map {j} has non-finite entries")));
            }
            for r in 0..m {
                for c in r..m {
                    if a[(r, c)] != 0.0 {
                        return Err(Error::invalid(format!(
                            "structure map {j} is not strictly lower triangular: \
                             entry ({r}, {c}) = {}",
                            a[(r, c)]
                        )));
                    }
                }
            }
        }
        for i in 0..ad.len() {
            for j in (i + 1)..ad.len() {
                let comm = &ad[i] * &ad[j] - &ad[j] * &ad[i];
                let scale = (ad[i].amax() * ad[j].amax()).max(f64::MIN_POSITIVE);
                if comm.amax() > 1e-12 * scale {
                    return Err(Error::invalid(format!(
                        "structure maps {i} and {j} do not commute; \
                         the v-block must act through commuting maps"
                    )));
                }
            }
        }
        let k_o = match compute_k_o(&ad) {
            Ok(k) => k,
            Err(Error::DegenerateGroup(_)) => 0,
            Err(e) => return Err(e),
        };
        Ok(MetaAbelianGroup { roots, ad, k_o })
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn ad(&self) -> &[DMatrix<f64>] {
        &self.ad
    }

    pub fn m_dim(&self) -> usize {
        self.roots.m_dim()
    }

    pub fn v_dim(&self) -> usize {
        self.roots.v_dim()
    }

    /// Nilpotency degree; 0 exactly for the abelian degeneration.
    pub fn k_o(&self) -> usize {
        self.k_o
    }

    /// Nilpotency degree as required by the k₀-dependent bounds, erroring
    /// on the abelian degeneration.
    pub fn nilpotency_degree(&self) -> Result<usize> {
        if self.k_o == 0 {
            Err(Error::DegenerateGroup(
                "abelian nilpotent part has no k₀-dependent bounds".into(),
            ))
        } else {
            Ok(self.k_o)
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.k_o == 0
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::zero(self.m_dim(), self.v_dim())
    }

    /// Ad(v)|𝔪 = exp(Σ_j v_j ad_j), evaluated as the exact finite series
    /// Σ_{p≤k₀} N^p/p! (N^{k₀+1} = 0, so truncation loses nothing).
    pub fn adjoint_on_m(&self, v: &[f64]) -> DMatrix<f64> {
        debug_assert_eq!(v.len(), self.v_dim());
        let m = self.m_dim();
        let mut n = DMatrix::zeros(m, m);
        for (c, ad) in v.iter().zip(&self.ad) {
            if *c != 0.0 {
                n += ad * *c;
            }
        }
        let mut result = DMatrix::identity(m, m);
        let mut power = DMatrix::identity(m, m);
        let mut factorial = 1.0;
        for p in 1..=self.k_o {
            power = &power * &n;
            factorial *= p as f64;
            result += &power / factorial;
        }
        result
    }

    /// Group product (m₁ + Ad(v₁)m₂, v₁ + v₂).
    pub fn multiply(&self, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
        let ad = self.adjoint_on_m(g1.v.as_slice());
        GroupElement {
            m: &g1.m + ad * &g2.m,
            v: &g1.v + &g2.v,
        }
    }

    /// Group inverse (−Ad(−v)m, −v).
    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let neg_v: Vec<f64> = g.v.iter().map(|x| -x).collect();
        let ad = self.adjoint_on_m(&neg_v);
        GroupElement {
            m: -(ad * &g.m),
            v: -&g.v,
        }
    }

    /// Anisotropic dilation δ_t^ρ: coordinate with root λ scales by t^{λ(ρ)}.
    pub fn dilate(&self, rho: &[f64], t: f64, g: &GroupElement) -> Result<GroupElement> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("dilation parameter must be positive, got {t}")));
        }
        self.check_direction(rho)?;
        let m = DVector::from_iterator(
            self.m_dim(),
            g.m.iter()
                .zip(self.roots.xi())
                .map(|(x, form)| x * t.powf(form.eval(rho))),
        );
        let v = DVector::from_iterator(
            self.v_dim(),
            g.v.iter()
                .zip(self.roots.theta())
                .map(|(x, form)| x * t.powf(form.eval(rho))),
        );
        Ok(GroupElement { m, v })
    }

    /// Homogeneous quasi-norm |g|_ρ = max_c |g_c|^{1/λ_c(ρ)}, homogeneous
    /// of degree 1 under δ_t^ρ.  Requires λ(ρ) > 0 for every root.
    pub fn homogeneous_norm(&self, rho: &[f64], g: &GroupElement) -> Result<f64> {
        self.check_direction(rho)?;
        for (name, family) in [("xi", self.roots.xi()), ("theta", self.roots.theta())] {
            for (i, form) in family.iter().enumerate() {
                if !(form.eval(rho) > 0.0) {
                    return Err(Error::invalid(format!(
                        "homogeneous norm needs lambda(rho) > 0 for all roots; \
                         {name}[{i}] gives {}",
                        form.eval(rho)
                    )));
                }
            }
        }
        let mut norm = 0.0f64;
        for (x, form) in g.m.iter().zip(self.roots.xi()) {
            norm = norm.max(x.abs().powf(1.0 / form.eval(rho)));
        }
        for (x, form) in g.v.iter().zip(self.roots.theta()) {
            norm = norm.max(x.abs().powf(1.0 / form.eval(rho)));
        }
        Ok(norm)
    }

    fn check_direction(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.roots.rank() {
            return Err(Error::invalid(format!(
                "direction has dimension {}, expected {}",
                rho.len(),
                self.roots.rank()
            )));
        }
        if !rho.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("direction must be finite"));
        }
        Ok(())
    }
}

/// The damping factor φ_k(m) = (s/(s+1))^k with s = ‖m‖^{1/k}; ranges over
/// [0, 1), vanishes only at m = 0, and tends to 1 as ‖m‖ → ∞.
pub fn phi_k(m: &[f64], k: usize) -> f64 {
    assert!(k >= 1, "phi_k needs k >= 1");
    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let s = norm.powf(1.0 / k as f64);
    (s / (s + 1.0)).powi(k as i32)
}

/// The Heisenberg-type instance: N = ℝⁿ × ℝⁿ × ℝ with coordinates
/// (x, y, z) and product (x₁+x₂, y₁+y₂, z₁+z₂+x₁·y₂).
///
/// 𝔪 = span{Y₁..Y_n, Z} (roots ξ₂ on each Y and ξ₁+ξ₂ on Z), 𝔳 =
/// span{X₁..X_n} (roots ξ₁), and ad(X_j) maps Y_j ↦ Z.  The drift α and
/// the positivity witness are supplied by the caller; with the standard
/// choice ξ₁ = (1,0), ξ₂ = (0,1) any α with positive entries is its own
/// witness.
pub fn heisenberg_instance(
    n: usize,
    xi1: LinearForm,
    xi2: LinearForm,
    alpha: Vec<f64>,
    h_o: Vec<f64>,
) -> Result<MetaAbelianGroup> {
    if n == 0 {
        return Err(Error::invalid("Heisenberg instance needs n >= 1"));
    }
    if xi1.dim() != xi2.dim() {
        return Err(Error::invalid("xi1 and xi2 must act on the same space"));
    }
    let xi3 = xi1.sum(&xi2)?;
    // m-coordinates: y_1..y_n then z.
    let mut xi = vec![xi2; n];
    xi.push(xi3);
    let theta = vec![xi1; n];
    let roots = RootSystem::new(xi, theta, alpha, h_o)?;
    let m_dim = n + 1;
    let mut ads = Vec::with_capacity(n);
    for j in 0..n {
        let mut a = DMatrix::zeros(m_dim, m_dim);
        a[(n, j)] = 1.0; // X_j sends Y_j to Z
        ads.push(a);
    }
    MetaAbelianGroup::new(roots, ads)
}
