//! Numeric oracles for the inequalities and identities the bounds rest on,
//! runnable as a seeded property-test battery.
//!
//! Every check is deterministic given `(trials, dims, seed)` and emits a
//! machine-readable [`CheckReport`]. Violations are measured scale-free as
//! `(LHS − RHS)/max(1, |RHS|)`. Random positive operators come from Ginibre
//! sampling (`G·G†`), which is full-rank almost surely and so avoids spurious
//! support errors.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cq::{iid_extend, marginal_e, CQState};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::operator::{
    abs_op, mat_power, spectral, tensor, trace_norm, CMat, HermitianOperator,
};
use crate::renyi::{
    cond_var, conditional_entropy, divergence, mi_var, mutual_information, relative_entropy,
    star_mutual, von_neumann_conditional, von_neumann_mutual, DivergenceKind, EntropyKind,
    MinimizeOptions, MutualKind,
};

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: u64,
    /// Largest scale-free violation observed; `pass ⇔ worst ≤ slack`.
    pub worst_violation: f64,
    /// The check's stated slack.
    pub slack: f64,
    pub pass: bool,
    pub seed: u64,
    /// Trials excluded for minimizer non-convergence (counted, bounded).
    pub excluded: u64,
}

fn violation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / rhs.abs().max(1.0)
}

fn ginibre_psd(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::from_hermitian_parts(&g * g.adjoint() * Complex64::new(scale, 0.0))
}

/// Verifies the trace-inequality chain
/// `Tr[K(K+L)^{-1/2}L(K+L)^{-1/2}] ≤ Tr[(K+L−|K−L|)/2] ≤ Tr[K^{1−s}L^s]`
/// on random PSD pairs, and that the first inequality is strict in at least
/// 1% of trials (so the sampler is not sitting on an equality artifact).
pub fn check_trace_inequality(trials: u64, dims: (usize, usize), seed: u64) -> Result<CheckReport> {
    if dims.0 < 2 || dims.1 > 8 || dims.0 > dims.1 {
        return Err(Error::validation(
            "check_trace_inequality needs a dimension range inside [2, 8]",
        ));
    }
    let slack = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut strict = 0u64;
    for _ in 0..trials {
        let dim = rng.gen_range(dims.0..=dims.1);
        let k = ginibre_psd(dim, rng.gen_range(0.2..1.5), &mut rng);
        let l = ginibre_psd(dim, rng.gen_range(0.2..1.5), &mut rng);
        let s = rng.gen_range(1e-3..1.0 - 1e-3);

        let m = HermitianOperator::from_hermitian_parts(k.matrix() + l.matrix());
        let inv_root = mat_power(&m, -0.5)?;
        let t1 = (k.matrix() * inv_root.matrix() * l.matrix() * inv_root.matrix())
            .trace()
            .re;
        let diff = HermitianOperator::from_hermitian_parts(k.matrix() - l.matrix());
        let t2 = 0.5 * (m.trace() - abs_op(&diff).trace());
        let t3 = (mat_power(&k, 1.0 - s)?.matrix() * mat_power(&l, s)?.matrix())
            .trace()
            .re;

        worst = worst
            .max(violation(t1, t2))
            .max(violation(t2, t3))
            .max(violation(t1, t3));
        if violation(t2, t1) > slack {
            strict += 1;
        }
    }
    let pass = worst <= slack && strict >= trials / 100;
    Ok(CheckReport {
        name: "trace_inequality".into(),
        trials,
        worst_violation: worst,
        slack,
        pass,
        seed,
        excluded: 0,
    })
}

/// Verifies midpoint concavity of `σ_X ↦ e^{((α−1)/α) I*_α(X:E)}` in the
/// prior, on random qubit ensembles of 2–4 symbols. Non-convergent
/// minimizations are excluded (and the check fails if more than 1% are).
pub fn check_concavity(trials: u64, seed: u64) -> Result<CheckReport> {
    let slack = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut excluded = 0u64;
    let alphas = [1.3, 1.7, 2.0];
    let lambdas = [0.25, 0.5, 0.75];
    for t in 0..trials {
        let alpha = alphas[(t % 3) as usize];
        let lambda = lambdas[((t / 3) % 3) as usize];
        let symbols = rng.gen_range(2..=4usize);
        let states: Vec<HermitianOperator> = (0..symbols)
            .map(|_| fixtures::random_density(2, &mut rng).into_hermitian())
            .collect();
        let p = random_prior(symbols, &mut rng);
        let q = random_prior(symbols, &mut rng);
        let mix: Vec<f64> = p
            .iter()
            .zip(&q)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();

        let exp_value = |prior: &[f64]| -> Result<f64> {
            let s = CQState::new(prior.to_vec(), states.clone())?;
            let (i_star, _) = star_mutual(&s, alpha, &MinimizeOptions::default())?;
            Ok(((alpha - 1.0) / alpha * i_star).exp())
        };
        let (gp, gq, gmix) = match (exp_value(&p), exp_value(&q), exp_value(&mix)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(Error::Convergence { .. }), _, _)
            | (_, Err(Error::Convergence { .. }), _)
            | (_, _, Err(Error::Convergence { .. })) => {
                excluded += 1;
                continue;
            }
            (Err(e), _, _) => return Err(e),
            (_, Err(e), _) => return Err(e),
            (_, _, Err(e)) => return Err(e),
        };
        worst = worst.max(violation(lambda * gp + (1.0 - lambda) * gq, gmix));
    }
    let pass = worst <= slack && excluded <= trials / 100;
    Ok(CheckReport {
        name: "concavity".into(),
        trials,
        worst_violation: worst,
        slack,
        pass,
        seed,
        excluded,
    })
}

fn random_prior(symbols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..symbols).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// Verifies the derivative identities at α = 1:
/// `dH*_α/dα = −V(X|E)/2`, `dI*_α/dα = +V(X:E)/2`, and the same values for
/// the `2−1/α`-reparametrized Petz quantities. Central differences at steps
/// 1e-2 and 1e-3 with Richardson extrapolation.
pub fn check_derivatives(s: &CQState) -> Result<CheckReport> {
    type Slope<'a> = Box<dyn Fn(f64) -> Result<f64> + 'a>;
    let slack = 1e-4;
    let v_cond = cond_var(s);
    let v_mut = mi_var(s);
    let checks: [(&str, Slope, f64); 4] = [
        (
            "h_star",
            Box::new(|a| conditional_entropy(EntropyKind::Star, s, a)),
            -v_cond / 2.0,
        ),
        (
            "i_star",
            Box::new(|a| mutual_information(MutualKind::Star, s, a)),
            v_mut / 2.0,
        ),
        (
            "h_down_reparam",
            Box::new(|a| conditional_entropy(EntropyKind::Down, s, 2.0 - 1.0 / a)),
            -v_cond / 2.0,
        ),
        (
            "i_down_reparam",
            Box::new(|a| mutual_information(MutualKind::Down, s, 2.0 - 1.0 / a)),
            v_mut / 2.0,
        ),
    ];
    let mut worst = f64::NEG_INFINITY;
    for (_name, f, analytic) in &checks {
        let numeric = richardson_slope(f.as_ref())?;
        worst = worst.max((numeric - analytic).abs() / analytic.abs().max(1.0));
    }
    Ok(CheckReport {
        name: "derivatives".into(),
        trials: 4,
        worst_violation: worst,
        slack,
        pass: worst <= slack,
        seed: 0,
        excluded: 0,
    })
}

fn richardson_slope(f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(1.0 + h)? - f(1.0 - h)?) / (2.0 * h)) };
    let d1 = d(1e-2)?;
    let d2 = d(1e-3)?;
    // central differences have O(h²) error; steps differ by 10×
    Ok((100.0 * d2 - d1) / 99.0)
}

/// Verifies α-monotonicity of both divergences on the state's own
/// `(ρ_XE, 1⊗ρ_E)` and `(ρ_XE, ρ_X⊗ρ_E)` pairs, and the α → 1 limits of all
/// conditional-entropy, mutual-information, and divergence quantities.
///
/// Violations are reported in units of each sub-check's slack (1e-9 for
/// monotonicity, 1e-3 for the limits), so the stated slack is 1.
pub fn check_monotone_and_limits(s: &CQState) -> Result<CheckReport> {
    const MONO_SLACK: f64 = 1e-9;
    const LIMIT_SLACK: f64 = 1e-3;
    let mut worst = f64::NEG_INFINITY;
    let rho_xe = s.to_dense();
    let rho_e = marginal_e(s);
    let one_x = HermitianOperator::identity(s.alphabet_size());
    let refs = [
        tensor(&one_x, rho_e.as_hermitian()),
        tensor(
            &HermitianOperator::from_diagonal(s.probabilities()),
            rho_e.as_hermitian(),
        ),
    ];
    let grid = [0.6, 0.8, 1.2, 1.5, 2.0];
    for reference in &refs {
        for kind in [DivergenceKind::Petz, DivergenceKind::Sandwiched] {
            let vals: Vec<f64> = grid
                .iter()
                .map(|&a| divergence(kind, &rho_xe, reference, a))
                .collect::<Result<Vec<_>>>()?;
            for w in vals.windows(2) {
                worst = worst.max(violation(w[0], w[1]) / MONO_SLACK);
            }
        }
    }

    // α → 1 limits at α = 1 ± 1e-4
    let h = von_neumann_conditional(s);
    let i = von_neumann_mutual(s);
    for a in [1.0 - 1e-4, 1.0 + 1e-4] {
        for kind in [EntropyKind::Down, EntropyKind::Star, EntropyKind::DownStar] {
            let val = conditional_entropy(kind, s, a)?;
            worst = worst.max((val - h).abs() / LIMIT_SLACK);
        }
        for kind in [MutualKind::Down, MutualKind::Star] {
            let val = mutual_information(kind, s, a)?;
            worst = worst.max((val - i).abs() / LIMIT_SLACK);
        }
    }
    // relative-entropy limit of the raw divergences on the same pairs
    for reference in &refs {
        let d = relative_entropy(&rho_xe, reference)?;
        for kind in [DivergenceKind::Petz, DivergenceKind::Sandwiched] {
            for a in [1.0 - 1e-4, 1.0 + 1e-4] {
                let val = divergence(kind, &rho_xe, reference, a)?;
                worst = worst.max((val - d).abs() / LIMIT_SLACK);
            }
        }
    }
    Ok(CheckReport {
        name: "monotone_and_limits".into(),
        trials: 1,
        worst_violation: worst,
        slack: 1.0,
        pass: worst <= 1.0,
        seed: 0,
        excluded: 0,
    })
}

/// Verifies two-copy additivity of the Petz quantities:
/// `H^↓_α(ρ⊗ρ) = 2·H^↓_α(ρ)` and likewise for `I^↓_α`, over an α-grid.
pub fn check_additivity(s: &CQState, alpha_grid: &[f64]) -> Result<CheckReport> {
    let slack = 1e-9;
    let s2 = iid_extend(s, 2)?;
    let mut worst = f64::NEG_INFINITY;
    for &alpha in alpha_grid {
        let h1 = conditional_entropy(EntropyKind::Down, s, alpha)?;
        let h2 = conditional_entropy(EntropyKind::Down, &s2, alpha)?;
        worst = worst.max((h2 - 2.0 * h1).abs() / h1.abs().max(1.0));
        let i1 = mutual_information(MutualKind::Down, s, alpha)?;
        let i2 = mutual_information(MutualKind::Down, &s2, alpha)?;
        worst = worst.max((i2 - 2.0 * i1).abs() / i1.abs().max(1.0));
    }
    Ok(CheckReport {
        name: "additivity".into(),
        trials: alpha_grid.len() as u64,
        worst_violation: worst,
        slack,
        pass: worst <= slack,
        seed: 0,
        excluded: 0,
    })
}

/// Verifies Helstrom attainment: the projector onto the nonnegative
/// eigenspace of `ρ₀ − ρ₁` achieves `Tr[Π(ρ₀−ρ₁)] = ½‖ρ₀−ρ₁‖₁` for
/// equal-trace pairs.
pub fn check_helstrom_attainment(trials: u64, seed: u64) -> Result<CheckReport> {
    let slack = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let dim = rng.gen_range(2..=4usize);
        let rho0 = fixtures::random_density(dim, &mut rng);
        let rho1 = fixtures::random_density(dim, &mut rng);
        let diff = HermitianOperator::from_hermitian_parts(rho0.matrix() - rho1.matrix());
        let spec = spectral(&diff);
        let proj = spec.map_eigenvalues(|l| if l >= 0.0 { 1.0 } else { 0.0 });
        let lhs = (proj.matrix() * diff.matrix()).trace().re;
        let rhs = 0.5 * trace_norm(&diff);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(CheckReport {
        name: "helstrom_attainment".into(),
        trials,
        worst_violation: worst,
        slack,
        pass: worst <= slack,
        seed,
        excluded: 0,
    })
}

/// Battery configuration with the default trial counts.
#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub trace_trials: u64,
    pub trace_dims: (usize, usize),
    pub concavity_trials: u64,
    pub helstrom_trials: u64,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            trace_trials: 10_000,
            trace_dims: (2, 6),
            concavity_trials: 1_000,
            helstrom_trials: 1_000,
            seed: 2024,
        }
    }
}

/// Names accepted by [`run_battery`]'s selection.
pub const CHECK_NAMES: [&str; 6] = [
    "trace_inequality",
    "concavity",
    "derivatives",
    "monotone_and_limits",
    "additivity",
    "helstrom_attainment",
];

/// Runs the selected checks (all of them when `selection` is empty) on the
/// bundled fixtures plus seeded random states, and returns their reports.
pub fn run_battery(selection: &[String], cfg: &BatteryConfig) -> Result<Vec<CheckReport>> {
    let want = |name: &str| selection.is_empty() || selection.iter().any(|s| s == name);
    for sel in selection {
        if !CHECK_NAMES.contains(&sel.as_str()) {
            return Err(Error::validation(format!(
                "unknown check '{sel}' (expected one of {CHECK_NAMES:?})"
            )));
        }
    }
    let mut reports = Vec::new();
    if want("trace_inequality") {
        reports.push(check_trace_inequality(
            cfg.trace_trials,
            cfg.trace_dims,
            cfg.seed,
        )?);
    }
    if want("concavity") {
        reports.push(check_concavity(cfg.concavity_trials, cfg.seed + 1)?);
    }
    if want("derivatives") {
        reports.push(check_derivatives(&fixtures::classical_quarter())?);
        reports.push(check_derivatives(&fixtures::random_qubit_state())?);
    }
    if want("monotone_and_limits") {
        reports.push(check_monotone_and_limits(&fixtures::random_qubit_state())?);
        reports.push(check_monotone_and_limits(&fixtures::classical_quarter())?);
    }
    if want("additivity") {
        reports.push(check_additivity(
            &fixtures::correlated_bit(),
            &[0.75, 1.5, 2.0],
        )?);
        reports.push(check_additivity(
            &fixtures::random_qubit_state(),
            &[0.75, 1.5, 2.0],
        )?);
    }
    if want("helstrom_attainment") {
        reports.push(check_helstrom_attainment(cfg.helstrom_trials, cfg.seed + 2)?);
    }
    Ok(reports)
}
