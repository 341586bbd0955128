//! Petz and sandwiched Rényi divergences, the derived conditional entropies
//! and mutual informations of classical-quantum states, information
//! variances, and the density-operator simplex minimizer behind the
//! starred (`H*`, `I*`) quantities.
//!
//! All quantities are in nats. A guard band `|α − 1| < ALPHA_GUARD`
//! dispatches to the von Neumann limits to avoid the `1/(α−1)` blow-up.
//!
//! Classical-quantum structure is exploited throughout: for
//! `ρ_XE = Σ_x p(x)|x⟩⟨x| ⊗ ρ_E^x` every divergence against a block-diagonal
//! reference factors into per-symbol traces, so nothing here ever builds the
//! full `|X|·d_E` matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cq::{marginal_e, CQState};
use crate::error::{Error, Result};
use crate::operator::{
    mat_log_support, mat_power_spec, spectral, support_contained, CMat, DensityOperator,
    HermitianOperator,
};
use crate::tolerances;

/// The two α-families of quantum Rényi divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    Petz,
    Sandwiched,
}

/// Conditional-entropy flavors: `H^↓` (Petz against ρ_E), `H*` (sandwiched,
/// optimized over σ_E), and `H^↓*` (sandwiched against the fixed ρ_E).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    Down,
    Star,
    DownStar,
}

/// Mutual-information flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutualKind {
    Down,
    Star,
}

fn check_alpha_positive(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::validation(format!(
            "Rényi order must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

fn near_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < tolerances::ALPHA_GUARD
}

/// `Tr[ρ^α σ^{1−α}]` via spectral calculus; powers act on supports only.
fn petz_trace(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<f64> {
    let rs = spectral(rho);
    let ss = spectral(sigma);
    let ra = mat_power_spec(&rs, alpha);
    let sb = mat_power_spec(&ss, 1.0 - alpha);
    Ok((ra.matrix() * sb.matrix()).trace().re)
}

/// `Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`, the sandwiched trace functional.
fn sandwiched_trace(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<f64> {
    let ss = spectral(sigma);
    let c = (1.0 - alpha) / (2.0 * alpha);
    let pinch = mat_power_spec(&ss, c);
    let m = pinch.matrix() * rho.matrix() * pinch.matrix();
    let m = HermitianOperator::from_hermitian_parts(m);
    let spec = spectral(&m);
    let cut = spec.support_cutoff();
    Ok(spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| l.powf(alpha))
        .sum())
}

/// Rényi divergence of either kind.
///
/// `petz = (1/(α−1)) log Tr[ρ^α σ^{1−α}]`;
/// `sandwiched = (1/(α−1)) log Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`.
/// Requires `supp(ρ) ⊆ supp(σ)`; α within the guard band of 1 dispatches to
/// [`relative_entropy`].
pub fn divergence(
    kind: DivergenceKind,
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    alpha: f64,
) -> Result<f64> {
    check_alpha_positive(alpha)?;
    if !support_contained(rho.as_hermitian(), sigma)? {
        return Err(Error::domain(
            "divergence: supp(ρ) is not contained in supp(σ)",
        ));
    }
    if near_one(alpha) {
        return relative_entropy(rho, sigma);
    }
    let trace = match kind {
        DivergenceKind::Petz => petz_trace(rho.as_hermitian(), sigma, alpha)?,
        DivergenceKind::Sandwiched => sandwiched_trace(rho.as_hermitian(), sigma, alpha)?,
    };
    Ok(trace.ln() / (alpha - 1.0))
}

/// Umegaki relative entropy `D(ρ‖σ) = Tr[ρ(log ρ − log σ)]` in nats.
pub fn relative_entropy(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<f64> {
    if !support_contained(rho.as_hermitian(), sigma)? {
        return Err(Error::domain(
            "relative_entropy: supp(ρ) is not contained in supp(σ)",
        ));
    }
    let log_rho = mat_log_support(rho.as_hermitian())?;
    let log_sigma = mat_log_support(sigma)?;
    let delta = log_rho.matrix() - log_sigma.matrix();
    Ok((rho.matrix() * delta).trace().re)
}

/// Centered relative entropy variance
/// `V(ρ‖σ) = Tr[ρ(log ρ − log σ)²] − D(ρ‖σ)²`.
pub fn relative_entropy_variance(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<f64> {
    let (second, mean) = log_ratio_moments(rho, sigma)?;
    Ok((second - mean * mean).max(0.0))
}

/// Uncentered second moment `Tr[ρ(log ρ − log σ)²]`, exposed as a diagnostic
/// alongside the centered variance.
pub fn relative_entropy_second_moment(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
) -> Result<f64> {
    Ok(log_ratio_moments(rho, sigma)?.0)
}

fn log_ratio_moments(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<(f64, f64)> {
    if !support_contained(rho.as_hermitian(), sigma)? {
        return Err(Error::domain(
            "variance: supp(ρ) is not contained in supp(σ)",
        ));
    }
    let log_rho = mat_log_support(rho.as_hermitian())?;
    let log_sigma = mat_log_support(sigma)?;
    let delta = log_rho.matrix() - log_sigma.matrix();
    let mean = (rho.matrix() * &delta).trace().re;
    let second = (rho.matrix() * &delta * &delta).trace().re;
    Ok((second, mean))
}

// ---------------------------------------------------------------------------
// Block reductions for c-q states
// ---------------------------------------------------------------------------

/// `Σ_x p(x)^α Tr[(ρ_E^x)^α ρ_E^{1−α}]`, the Petz trace of a c-q state
/// against `1_X ⊗ ρ_E`.
fn petz_cond_trace(s: &CQState, alpha: f64) -> Result<f64> {
    let rho_e = marginal_e(s);
    let se = spectral(rho_e.as_hermitian());
    let e_pow = mat_power_spec(&se, 1.0 - alpha);
    let mut acc = 0.0;
    for x in s.support() {
        let rs = spectral(s.rho(x));
        let ra = mat_power_spec(&rs, alpha);
        acc += s.prob(x).powf(alpha) * (ra.matrix() * e_pow.matrix()).trace().re;
    }
    Ok(acc)
}

/// Von Neumann conditional entropy `H(X|E) = −D(ρ_XE ‖ 1_X ⊗ ρ_E)` in nats.
pub fn von_neumann_conditional(s: &CQState) -> f64 {
    // H(XE) − H(E) via block entropies
    let rho_e = marginal_e(s);
    let h_e = -spectral(rho_e.as_hermitian())
        .eigenvalues
        .iter()
        .filter(|&&l| l > tolerances::SUPPORT_CUTOFF)
        .map(|&l| l * l.ln())
        .sum::<f64>();
    let mut h_xe = 0.0;
    for x in s.support() {
        let p = s.prob(x);
        let h_block = -spectral(s.rho(x))
            .eigenvalues
            .iter()
            .filter(|&&l| l > tolerances::SUPPORT_CUTOFF)
            .map(|&l| l * l.ln())
            .sum::<f64>();
        h_xe += -p * p.ln() + p * h_block;
    }
    h_xe - h_e
}

/// Von Neumann mutual information `I(X:E) = H(E) − Σ_x p(x) H(ρ_E^x)` in nats.
pub fn von_neumann_mutual(s: &CQState) -> f64 {
    let rho_e = marginal_e(s);
    let h_e = -spectral(rho_e.as_hermitian())
        .eigenvalues
        .iter()
        .filter(|&&l| l > tolerances::SUPPORT_CUTOFF)
        .map(|&l| l * l.ln())
        .sum::<f64>();
    let mut avg = 0.0;
    for x in s.support() {
        let h_block = -spectral(s.rho(x))
            .eigenvalues
            .iter()
            .filter(|&&l| l > tolerances::SUPPORT_CUTOFF)
            .map(|&l| l * l.ln())
            .sum::<f64>();
        avg += s.prob(x) * h_block;
    }
    h_e - avg
}

fn check_star_alpha(alpha: f64) -> Result<()> {
    if alpha <= 0.5 {
        return Err(Error::validation(format!(
            "sandwiched conditional quantities need α > 1/2, got {alpha}"
        )));
    }
    Ok(())
}

/// `H^↓_order` extended continuously to order 0, where it becomes the
/// min-relative-entropy limit `log Σ_x Tr[Π_{ρ_E^x} ρ_E]`. The exponent
/// envelopes evaluate the closed α-hull, whose left endpoint maps to order 0.
pub(crate) fn down_conditional_extended(s: &CQState, order: f64) -> Result<f64> {
    if !order.is_finite() || order < 0.0 {
        return Err(Error::validation(format!(
            "Petz order must be nonnegative, got {order}"
        )));
    }
    if near_one(order) {
        return Ok(von_neumann_conditional(s));
    }
    Ok(-petz_cond_trace(s, order)?.ln() / (order - 1.0))
}

/// `I^↓_order` extended continuously to order 0 (see
/// [`down_conditional_extended`]).
pub(crate) fn down_mutual_extended(s: &CQState, order: f64) -> Result<f64> {
    if !order.is_finite() || order < 0.0 {
        return Err(Error::validation(format!(
            "Petz order must be nonnegative, got {order}"
        )));
    }
    if near_one(order) {
        return Ok(von_neumann_mutual(s));
    }
    let rho_e = marginal_e(s);
    let se = spectral(rho_e.as_hermitian());
    let e_pow = mat_power_spec(&se, 1.0 - order);
    let mut acc = 0.0;
    for x in s.support() {
        let rs = spectral(s.rho(x));
        let ra = mat_power_spec(&rs, order);
        acc += s.prob(x) * (ra.matrix() * e_pow.matrix()).trace().re;
    }
    Ok(acc.ln() / (order - 1.0))
}

/// Conditional Rényi entropy of a c-q state.
///
/// `down` is `−D_α(ρ_XE ‖ 1⊗ρ_E)` via the closed block form; `star` solves
/// the minimization over σ_E; `down_star` fixes `σ = ρ_E` inside the
/// sandwiched form.
pub fn conditional_entropy(kind: EntropyKind, s: &CQState, alpha: f64) -> Result<f64> {
    conditional_entropy_opt(kind, s, alpha, &MinimizeOptions::default())
}

/// [`conditional_entropy`] with explicit minimizer options (only the `star`
/// kind runs a minimization).
pub fn conditional_entropy_opt(
    kind: EntropyKind,
    s: &CQState,
    alpha: f64,
    opts: &MinimizeOptions,
) -> Result<f64> {
    check_alpha_positive(alpha)?;
    if near_one(alpha) {
        return Ok(von_neumann_conditional(s));
    }
    match kind {
        EntropyKind::Down => Ok(-petz_cond_trace(s, alpha)?.ln() / (alpha - 1.0)),
        EntropyKind::DownStar => {
            check_star_alpha(alpha)?;
            let rho_e = marginal_e(s);
            let mut acc = 0.0;
            for x in s.support() {
                acc += s.prob(x).powf(alpha)
                    * sandwiched_trace(s.rho(x), rho_e.as_hermitian(), alpha)?;
            }
            Ok(-acc.ln() / (alpha - 1.0))
        }
        EntropyKind::Star => {
            check_star_alpha(alpha)?;
            Ok(star_conditional(s, alpha, opts)?.0)
        }
    }
}

/// Rényi mutual information of a c-q state.
pub fn mutual_information(kind: MutualKind, s: &CQState, alpha: f64) -> Result<f64> {
    mutual_information_opt(kind, s, alpha, &MinimizeOptions::default())
}

/// [`mutual_information`] with explicit minimizer options.
pub fn mutual_information_opt(
    kind: MutualKind,
    s: &CQState,
    alpha: f64,
    opts: &MinimizeOptions,
) -> Result<f64> {
    check_alpha_positive(alpha)?;
    if near_one(alpha) {
        return Ok(von_neumann_mutual(s));
    }
    match kind {
        MutualKind::Down => {
            let rho_e = marginal_e(s);
            let se = spectral(rho_e.as_hermitian());
            let e_pow = mat_power_spec(&se, 1.0 - alpha);
            let mut acc = 0.0;
            for x in s.support() {
                let rs = spectral(s.rho(x));
                let ra = mat_power_spec(&rs, alpha);
                acc += s.prob(x) * (ra.matrix() * e_pow.matrix()).trace().re;
            }
            Ok(acc.ln() / (alpha - 1.0))
        }
        MutualKind::Star => {
            check_star_alpha(alpha)?;
            Ok(star_mutual(s, alpha, opts)?.0)
        }
    }
}

/// `H*_α` with its optimizing `σ_E`.
pub fn star_conditional(
    s: &CQState,
    alpha: f64,
    opts: &MinimizeOptions,
) -> Result<(f64, DensityOperator)> {
    check_star_alpha(alpha)?;
    let weights: Vec<f64> = s.support().map(|x| s.prob(x).powf(alpha)).collect();
    let states: Vec<&HermitianOperator> = s.support().map(|x| s.rho(x)).collect();
    let obj = SigmaObjective::new(&weights, &states, alpha)?;
    let opt = minimize_sigma(&obj, opts)?;
    Ok((-opt.value, opt.sigma))
}

/// `I*_α` with its optimizing `σ_E`.
pub fn star_mutual(
    s: &CQState,
    alpha: f64,
    opts: &MinimizeOptions,
) -> Result<(f64, DensityOperator)> {
    check_star_alpha(alpha)?;
    let weights: Vec<f64> = s.support().map(|x| s.prob(x)).collect();
    let states: Vec<&HermitianOperator> = s.support().map(|x| s.rho(x)).collect();
    let obj = SigmaObjective::new(&weights, &states, alpha)?;
    let opt = minimize_sigma(&obj, opts)?;
    Ok((opt.value, opt.sigma))
}

/// The c-q evaluation
/// `D*_α(ρ_XE ‖ ρ_X ⊗ τ) = (1/(α−1)) log Σ_x p(x) e^{(α−1) D*_α(ρ_E^x ‖ τ)}`,
/// the scalar sum that the starred minimizations extremize.
pub fn cq_sandwiched_reduction(s: &CQState, tau: &DensityOperator, alpha: f64) -> Result<f64> {
    check_star_alpha(alpha)?;
    for x in s.support() {
        if !support_contained(s.rho(x), tau.as_hermitian())? {
            return Err(Error::domain(format!(
                "cq_sandwiched_reduction: supp(ρ_E^{x}) is not contained in supp(τ)"
            )));
        }
    }
    if near_one(alpha) {
        let mut acc = 0.0;
        for x in s.support() {
            let rho = DensityOperator::new(s.rho(x).clone())?;
            acc += s.prob(x) * relative_entropy(&rho, tau.as_hermitian())?;
        }
        return Ok(acc);
    }
    let mut acc = 0.0;
    for x in s.support() {
        acc += s.prob(x) * sandwiched_trace(s.rho(x), tau.as_hermitian(), alpha)?;
    }
    Ok(acc.ln() / (alpha - 1.0))
}

/// Conditional information variance `V(X|E) = V(ρ_XE ‖ 1 ⊗ ρ_E)` (centered).
pub fn cond_var(s: &CQState) -> f64 {
    let rho_e = marginal_e(s);
    let log_e = mat_log_support(rho_e.as_hermitian()).expect("marginal is PSD");
    block_variance(s, |_x| log_e.matrix().clone())
}

/// Mutual information variance `V(X:E) = V(ρ_XE ‖ ρ_X ⊗ ρ_E)` (centered).
pub fn mi_var(s: &CQState) -> f64 {
    let rho_e = marginal_e(s);
    let log_e = mat_log_support(rho_e.as_hermitian()).expect("marginal is PSD");
    block_variance(s, |x| {
        // log(p_x ρ_E) on its support = log p_x · Π_E + log ρ_E
        let se = spectral(rho_e.as_hermitian());
        let proj = se.support_projector();
        log_e.matrix() + proj.matrix() * Complex64::new(s.prob(x).ln(), 0.0)
    })
}

/// Shared block computation of `Tr[ρ Δ²] − (Tr[ρ Δ])²` where the reference
/// log-block for symbol x is supplied by `log_ref`.
fn block_variance(s: &CQState, log_ref: impl Fn(usize) -> CMat) -> f64 {
    let mut mean = 0.0;
    let mut second = 0.0;
    for x in s.support() {
        let w = s.weighted_block(x);
        let w_op = HermitianOperator::from_hermitian_parts(w.clone());
        let log_w = mat_log_support(&w_op).expect("weighted block is PSD");
        let delta = log_w.matrix() - log_ref(x);
        mean += (&w * &delta).trace().re;
        second += (&w * &delta * &delta).trace().re;
    }
    (second - mean * mean).max(0.0)
}

// ---------------------------------------------------------------------------
// Minimization over the density-operator simplex
// ---------------------------------------------------------------------------

/// The objective `σ ↦ (1/(α−1)) log Σ_x w_x Q*_α(ρ_x ‖ σ)` over density
/// operators, where `Q*_α(ρ‖σ) = Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`.
///
/// Both starred quantities reduce to this: `H*_α` uses `w_x = p(x)^α`,
/// `I*_α` uses `w_x = p(x)`. The problem is restricted to the joint support
/// of the ensemble, where it is convex (α > 1) or concave (α < 1) in the
/// trace functional, so any stationary point is the global optimum.
pub struct SigmaObjective {
    weights: Vec<f64>,
    /// States rotated into the support basis, dimension `rank`.
    states: Vec<CMat>,
    alpha: f64,
    /// Isometry from the support basis back to the ambient space.
    basis: CMat,
    rank: usize,
    ambient_dim: usize,
}

impl SigmaObjective {
    pub fn new(weights: &[f64], states: &[&HermitianOperator], alpha: f64) -> Result<Self> {
        check_alpha_positive(alpha)?;
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::validation(
                "objective needs matching, non-empty weights and states",
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::validation("objective weights must be nonnegative"));
        }
        let dim = states[0].dim();
        if dim > tolerances::SIGMA_DIM_LIMIT {
            return Err(Error::capacity(format!(
                "minimize_sigma handles dimension ≤ {}, got {dim}",
                tolerances::SIGMA_DIM_LIMIT
            )));
        }
        // joint support of the weighted ensemble
        let mut avg = CMat::zeros(dim, dim);
        let mut kept_weights = Vec::new();
        let mut kept_states = Vec::new();
        for (&w, st) in weights.iter().zip(states) {
            if st.dim() != dim {
                return Err(Error::validation("ensemble states differ in dimension"));
            }
            if w > 0.0 {
                avg += st.matrix() * Complex64::new(w, 0.0);
                kept_weights.push(w);
                kept_states.push(*st);
            }
        }
        if kept_weights.is_empty() {
            return Err(Error::validation("objective has no positive weights"));
        }
        let avg = HermitianOperator::from_hermitian_parts(avg);
        let spec = spectral(&avg);
        let rank = spec.rank();
        let basis = spec.eigenvectors.columns(0, rank).clone_owned();
        let states = kept_states
            .iter()
            .map(|st| {
                let rotated = basis.adjoint() * st.matrix() * &basis;
                (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0)
            })
            .collect();
        Ok(SigmaObjective {
            weights: kept_weights,
            states,
            alpha,
            basis,
            rank,
            ambient_dim: dim,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimension of the reduced problem.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Weighted trace sum `S(σ)` and, when requested, the fixed-point map
    /// image `T(σ) = Σ_x w_x (σ^c ρ_x σ^c)^α` (unnormalized), both in the
    /// support basis.
    fn trace_sum(&self, sigma: &CMat, with_map: bool) -> (f64, Option<CMat>) {
        let c = (1.0 - self.alpha) / (2.0 * self.alpha);
        let ss = spectral(&HermitianOperator::from_hermitian_parts(sigma.clone()));
        let pinch = mat_power_spec(&ss, c);
        let mut total = 0.0;
        let mut image = if with_map {
            Some(CMat::zeros(self.rank, self.rank))
        } else {
            None
        };
        for (w, rho) in self.weights.iter().zip(&self.states) {
            let m = pinch.matrix() * rho * pinch.matrix();
            let m = HermitianOperator::from_hermitian_parts(m);
            let spec = spectral(&m);
            let cut = spec.support_cutoff();
            let q: f64 = spec
                .eigenvalues
                .iter()
                .filter(|&&l| l > cut)
                .map(|&l| l.powf(self.alpha))
                .sum();
            total += w * q;
            if let Some(acc) = image.as_mut() {
                let powered = mat_power_spec(&spec, self.alpha);
                *acc += powered.matrix() * Complex64::new(*w, 0.0);
            }
        }
        (total, image)
    }

    /// Objective value on the divergence scale, `(1/(α−1)) log S(σ)`, for a
    /// density operator in the ambient space.
    pub fn value(&self, sigma: &DensityOperator) -> Result<f64> {
        if sigma.dim() != self.ambient_dim {
            return Err(Error::validation("objective: σ dimension mismatch"));
        }
        let reduced = self.basis.adjoint() * sigma.matrix() * &self.basis;
        let tr = reduced.trace().re;
        if tr < 1e-12 {
            return Err(Error::domain(
                "objective: σ has no mass on the ensemble support",
            ));
        }
        let reduced = reduced * Complex64::new(1.0 / tr, 0.0);
        let (s, _) = self.trace_sum(&reduced, false);
        Ok(s.ln() / (self.alpha - 1.0))
    }

    fn embed(&self, sigma: &CMat) -> DensityOperator {
        let full = &self.basis * sigma * self.basis.adjoint();
        DensityOperator::new(HermitianOperator::from_hermitian_parts(full))
            .expect("embedded minimizer is a density operator")
    }
}

/// Options for [`minimize_sigma`]. `starts` counts the deterministic starts
/// in addition to the maximally mixed one; a warm start, when supplied, is
/// tried first.
#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub starts: u32,
    pub seed: u64,
    pub warm_start: Option<CMat>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            tol: tolerances::MINIMIZER_TOL,
            max_iters: tolerances::MINIMIZER_MAX_ITERS,
            starts: 4,
            seed: 0x5EED,
            warm_start: None,
        }
    }
}

impl MinimizeOptions {
    /// Cheap single-start configuration used inside envelope sweeps, where
    /// convexity makes multi-start redundant and the previous grid point
    /// supplies a warm start.
    pub fn warm(warm: Option<CMat>) -> Self {
        MinimizeOptions {
            starts: 0,
            warm_start: warm,
            ..Default::default()
        }
    }
}

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct SigmaOptimum {
    /// Optimizing density operator in the ambient space.
    pub sigma: DensityOperator,
    /// Optimal objective on the divergence scale.
    pub value: f64,
    /// Optimal weighted trace sum `S(σ*)`.
    pub trace_sum: f64,
    /// Fixed-point residual `½‖T̂(σ) − σ‖₁` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes the sandwiched objective over density operators by damped
/// multiplicative fixed-point iteration
/// `σ ← normalize(Σ_x w_x (σ^c ρ_x σ^c)^α)`,
/// whose fixed points are exactly the stationary points of the objective.
///
/// Runs the warm start (if any), the maximally mixed start, and `starts`
/// seeded full-rank random starts; returns the best. Errors with the best
/// value and residual when no start reaches the tolerance.
pub fn minimize_sigma(obj: &SigmaObjective, opts: &MinimizeOptions) -> Result<SigmaOptimum> {
    use rand::Rng;
    use rand::SeedableRng;

    let r = obj.rank;
    let mut candidates: Vec<CMat> = Vec::new();
    if let Some(warm) = &opts.warm_start {
        if warm.nrows() == obj.ambient_dim {
            let reduced = obj.basis.adjoint() * warm * &obj.basis;
            let tr = reduced.trace().re;
            if tr > 1e-9 {
                // mix toward the identity so the start is full rank
                let mixed = reduced * Complex64::new(0.95 / tr, 0.0)
                    + CMat::identity(r, r) * Complex64::new(0.05 / r as f64, 0.0);
                candidates.push(mixed);
            }
        }
    }
    candidates.push(CMat::identity(r, r) * Complex64::new(1.0 / r as f64, 0.0));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.starts {
        let g = CMat::from_fn(r, r, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let psd = &g * g.adjoint() + CMat::identity(r, r) * Complex64::new(0.05, 0.0);
        let tr = psd.trace().re;
        candidates.push(psd * Complex64::new(1.0 / tr, 0.0));
    }

    let mut best: Option<SigmaOptimum> = None;
    for start in candidates {
        let run = run_fixed_point(obj, start, opts.tol, opts.max_iters);
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value - 1e-15 || (run.converged && !b.converged),
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    if !best.converged {
        return Err(Error::Convergence {
            message: "simplex minimizer exhausted its iteration budget".into(),
            best: best.value,
            residual: best.residual,
        });
    }
    Ok(best)
}

fn run_fixed_point(
    obj: &SigmaObjective,
    start: CMat,
    tol: f64,
    max_iters: usize,
) -> SigmaOptimum {
    let r = obj.rank;
    let mut sigma = start;
    let sign = if obj.alpha > 1.0 { 1.0 } else { -1.0 };
    // work on S(σ) directly: minimize for α>1, maximize for α<1
    let (mut s_cur, mut image) = obj.trace_sum(&sigma, true);
    // Averaged (Krasnoselskii–Mann) step: the raw map linearizes to a factor
    // 1−α around the optimum in the commuting case, which cycles at α = 2;
    // averaging with weight 1/α cancels it for every admissible α.
    let gamma_cap = (1.0 / obj.alpha).min(1.0);
    let mut gamma = gamma_cap;
    let mut iters = 0;
    let mut residual = f64::INFINITY;
    while iters < max_iters {
        iters += 1;
        let img = image.take().expect("map image computed");
        let tr = img.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            break;
        }
        let target = img * Complex64::new(1.0 / tr, 0.0);
        residual = 0.5 * crate::operator::trace_norm_raw(&(&target - &sigma));
        if residual <= tol {
            break;
        }
        // Damped step with deterministic backtracking on the trace sum. The
        // problem is convex/concave on the support, so the pure fixed-point
        // step is sound near the optimum; backtracking only guards the early
        // large steps, and the acceptance test tolerates evaluation noise.
        let noise = 1e-13 * s_cur.abs().max(f64::MIN_POSITIVE);
        let mut accepted = false;
        let mut g = gamma;
        while g >= 1e-4 {
            let trial = &sigma * Complex64::new(1.0 - g, 0.0) + &target * Complex64::new(g, 0.0);
            let (s_trial, img_trial) = obj.trace_sum(&trial, true);
            if sign * s_trial <= sign * s_cur + noise {
                sigma = trial;
                s_cur = s_trial;
                image = img_trial;
                gamma = (g * 2.0).min(gamma_cap);
                accepted = true;
                break;
            }
            g *= 0.5;
        }
        if !accepted {
            if residual < 1e-4 {
                // objective flat to machine precision; take the averaged step
                let trial = &sigma * Complex64::new(1.0 - gamma_cap, 0.0)
                    + &target * Complex64::new(gamma_cap, 0.0);
                let (s_next, img_next) = obj.trace_sum(&trial, true);
                sigma = trial;
                s_cur = s_next;
                image = img_next;
                gamma = gamma_cap;
            } else {
                break;
            }
        }
    }
    if image.is_none() {
        let (s, img) = obj.trace_sum(&sigma, true);
        s_cur = s;
        image = img;
    }
    if let Some(img) = image {
        let tr = img.trace().re;
        if tr.is_finite() && tr > 0.0 {
            let target = img * Complex64::new(1.0 / tr, 0.0);
            residual = 0.5 * crate::operator::trace_norm_raw(&(&target - &sigma));
        }
    }
    let _ = r;
    SigmaOptimum {
        sigma: obj.embed(&sigma),
        value: s_cur.ln() / (obj.alpha - 1.0),
        trace_sum: s_cur,
        residual,
        iterations: iters,
        converged: residual <= tol,
    }
}

/// Brute-force reference for qubit minimizations: scans density operators on
/// a Bloch-ball grid of the given resolution and returns the best objective
/// value found. Independent of the fixed-point path; the fallback oracle for
/// `d ≤ 2`.
pub fn bloch_grid_search(obj: &SigmaObjective, resolution: f64) -> Result<(DensityOperator, f64)> {
    if obj.rank > 2 {
        return Err(Error::capacity(
            "bloch_grid_search only covers rank ≤ 2 problems",
        ));
    }
    if obj.rank == 1 {
        let sigma = obj.embed(&CMat::identity(1, 1));
        let value = obj.value(&sigma)?;
        return Ok((sigma, value));
    }
    let steps = (2.0 / resolution).round() as i64;
    let mut best_val = f64::INFINITY;
    let mut best_sigma: Option<CMat> = None;
    for ix in 0..=steps {
        let rx = -1.0 + ix as f64 * resolution;
        for iy in 0..=steps {
            let ry = -1.0 + iy as f64 * resolution;
            for iz in 0..=steps {
                let rz = -1.0 + iz as f64 * resolution;
                let norm2 = rx * rx + ry * ry + rz * rz;
                if norm2 > 1.0 {
                    continue;
                }
                // shrink boundary points slightly inside so negative powers stay finite
                let shrink = if norm2 > (1.0 - 1e-9) { 1.0 - 1e-9 } else { 1.0 };
                let mut m = CMat::zeros(2, 2);
                m[(0, 0)] = Complex64::new(0.5 * (1.0 + shrink * rz), 0.0);
                m[(1, 1)] = Complex64::new(0.5 * (1.0 - shrink * rz), 0.0);
                m[(0, 1)] = Complex64::new(0.5 * shrink * rx, -0.5 * shrink * ry);
                m[(1, 0)] = Complex64::new(0.5 * shrink * rx, 0.5 * shrink * ry);
                let (s, _) = obj.trace_sum(&m, false);
                let val = s.ln() / (obj.alpha - 1.0);
                if val < best_val {
                    best_val = val;
                    best_sigma = Some(m);
                }
            }
        }
    }
    let sigma = obj.embed(&best_sigma.expect("grid is non-empty"));
    Ok((sigma, best_val))
}
