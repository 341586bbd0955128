//! Exact and Monte-Carlo evaluation of the operational trace-distance
//! quantities (the privacy-amplification distance ε_PA and the wiretap
//! leakage d₁), plus the sandwich harness that pins the exact values between
//! the achievability and strong-converse bounds.
//!
//! All family and codebook loops are embarrassingly parallel; per-index
//! results are collected into vectors and combined with an order-independent
//! pairwise summation tree, so values are bit-stable across thread counts.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cq::{hashed_weighted_blocks, induced_cq, iid_extend, marginal_e, CQState, Subsystem,
    WiretapChannel};
use crate::error::{Error, Result};
use crate::exponents::{pa_achievability_exponent, pa_converse_exponent, ExponentReport};
use crate::hashing::{enumerate_family, AffineHash, GFContext};
use crate::operator::{pairwise_sum, trace_norm_raw, CMat};

/// Result of an ε_PA evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct PaResult {
    /// True for full-family enumeration, false for Monte-Carlo sampling.
    pub exact: bool,
    /// The (estimated) distance `½ E_h ‖R^h(ρ_XE) − π_Z ⊗ ρ_E‖₁ ∈ [0,1]`.
    pub value: f64,
    /// Sample standard error (Monte-Carlo only).
    pub std_error: Option<f64>,
    /// Number of members of the hash family.
    pub family_size: u64,
    /// Number of evaluated hashes (= family_size when exact).
    pub evaluated: u64,
    /// Optional per-hash breakdown `(a, b, distance)`.
    pub per_hash: Option<Vec<(u64, u64, f64)>>,
}

fn check_alphabet(s: &CQState, ctx: GFContext) -> Result<()> {
    if s.alphabet_size() as u64 != ctx.order() {
        return Err(Error::validation(format!(
            "state alphabet {} does not match hash domain 2^{} = {}",
            s.alphabet_size(),
            ctx.u(),
            ctx.order()
        )));
    }
    Ok(())
}

/// Distance of one hashed state from the randomizing target, block by block:
/// `½ Σ_z ‖Σ_{x∈h⁻¹(z)} p(x)ρ_E^x − ρ_E/|Z|‖₁`.
fn per_hash_distance(s: &CQState, h: &AffineHash, target_block: &CMat) -> f64 {
    let blocks = hashed_weighted_blocks(s, h);
    let mut acc = Vec::with_capacity(blocks.len());
    for b in &blocks {
        acc.push(trace_norm_raw(&(b - target_block)));
    }
    0.5 * pairwise_sum(&acc)
}

/// Exact ε_PA by enumerating the whole affine family over GF(2^u) with `v`
/// output bits: the uniform average of per-hash block trace distances.
pub fn exact_pa_distance(
    s: &CQState,
    ctx: GFContext,
    v: u32,
    breakdown: bool,
) -> Result<PaResult> {
    check_alphabet(s, ctx)?;
    let family = enumerate_family(ctx, v)?;
    let zsize = 1usize << v;
    let rho_e = marginal_e(s);
    let target = rho_e.matrix() * Complex64::new(1.0 / zsize as f64, 0.0);
    let len = family.len();
    let distances: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|i| per_hash_distance(s, &family.member(i), &target))
        .collect();
    let value = pairwise_sum(&distances) / len as f64;
    let per_hash = breakdown.then(|| {
        distances
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let h = family.member(i as u64);
                (h.a, h.b, d)
            })
            .collect()
    });
    Ok(PaResult {
        exact: true,
        value,
        std_error: None,
        family_size: len,
        evaluated: len,
        per_hash,
    })
}

/// Monte-Carlo estimate of ε_PA over `trials` sampled hashes. Deterministic
/// per seed: trial `i` draws from an independent counter-indexed stream.
pub fn sampled_pa_distance(
    s: &CQState,
    ctx: GFContext,
    v: u32,
    trials: u64,
    seed: u64,
) -> Result<PaResult> {
    check_alphabet(s, ctx)?;
    if trials == 0 {
        return Err(Error::validation("sampled_pa_distance needs trials ≥ 1"));
    }
    if v == 0 || v > ctx.u() {
        return Err(Error::validation(format!(
            "output width v={v} must satisfy 1 ≤ v ≤ u={}",
            ctx.u()
        )));
    }
    let zsize = 1usize << v;
    let rho_e = marginal_e(s);
    let target = rho_e.matrix() * Complex64::new(1.0 / zsize as f64, 0.0);
    let distances: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let h = AffineHash {
                ctx,
                v,
                a: rng.gen_range(0..ctx.order()),
                b: rng.gen_range(0..ctx.order()),
            };
            per_hash_distance(s, &h, &target)
        })
        .collect();
    let mean = pairwise_sum(&distances) / trials as f64;
    let std_error = if trials > 1 {
        let sq: Vec<f64> = distances.iter().map(|d| (d - mean) * (d - mean)).collect();
        let var = pairwise_sum(&sq) / (trials - 1) as f64;
        Some((var / trials as f64).sqrt())
    } else {
        None
    };
    Ok(PaResult {
        exact: false,
        value: mean,
        std_error,
        family_size: 1u64 << (2 * ctx.u()),
        evaluated: trials,
        per_hash: None,
    })
}

/// Verdict of comparing an exact operational value against both bounds.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub n: u32,
    /// Rate per copy in nats, `R = v·log 2`.
    pub rate: f64,
    /// Exact ε_PA on the n-fold state.
    pub exact: f64,
    /// Achievability bound `min(1, e^{−n·E_ach})`.
    pub upper: f64,
    /// Strong-converse bound `max(0, 1 − 4e^{−n·E_conv})`.
    pub lower: f64,
    pub pass_upper: bool,
    pub pass_lower: bool,
    pub achievability: ExponentReport,
    pub converse: ExponentReport,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.pass_upper && self.pass_lower
    }
}

/// Slack allowed when comparing the exact value against the bounds.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Computes exact ε_PA on the `n`-fold extension with an `(n·u → n·v)`-bit
/// hash family, the achievability and converse bounds at rate `R = v·log 2`
/// per copy, and the pass/fail verdict per side.
pub fn sandwich_check(s: &CQState, u: u32, v: u32, n: u32) -> Result<SandwichReport> {
    if n == 0 {
        return Err(Error::validation("sandwich_check needs n ≥ 1"));
    }
    let single_ctx = GFContext::new(u)?;
    check_alphabet(s, single_ctx)?;
    if v == 0 || v > u {
        return Err(Error::validation(format!(
            "output width v={v} must satisfy 1 ≤ v ≤ u={u}"
        )));
    }
    let extended = iid_extend(s, n)?;
    let ctx_n = GFContext::new(n * u)?;
    let exact = exact_pa_distance(&extended, ctx_n, n * v, false)?;
    let rate = v as f64 * std::f64::consts::LN_2;
    let ach = pa_achievability_exponent(s, rate)?;
    let conv = pa_converse_exponent(s, rate)?;
    let upper = ach.bound_at(n as u64);
    let lower = conv.bound_at(n as u64);
    Ok(SandwichReport {
        n,
        rate,
        exact: exact.value,
        upper,
        lower,
        pass_upper: exact.value <= upper + SANDWICH_SLACK,
        pass_lower: exact.value >= lower - SANDWICH_SLACK,
        achievability: ach,
        converse: conv,
    })
}

/// Evaluation mode for [`wiretap_d1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WiretapD1Mode {
    Exact,
    MonteCarlo,
}

/// Estimate of `E_{C,h}[d₁]` with both unbalanced-hash conventions reported.
#[derive(Debug, Clone, Serialize)]
pub struct WiretapD1Result {
    pub mode: WiretapD1Mode,
    /// Unbalanced hashes contribute the announced-message distance `1 − 1/M`.
    pub actual: f64,
    /// Unbalanced hashes are charged the worst-case distance 1.
    pub worst_case: f64,
    /// Sample standard error of `actual` (Monte-Carlo only).
    pub std_error: Option<f64>,
    pub m_size: u64,
    pub l_size: u64,
    pub family_size: u64,
    /// Codebooks enumerated (exact) or sampled (Monte-Carlo).
    pub codebooks: u64,
}

/// `d₁` of one realized protocol `(codebook, balanced hash)`:
/// `½ Σ_m (1/M) ‖σ̄_m − σ̄‖₁` over Eve's per-message states.
fn d1_of_realization(
    eve_states: &[CMat],
    codebook: &[usize],
    h: &AffineHash,
    d_e: usize,
) -> f64 {
    let m_size = h.output_size() as usize;
    let l_size = codebook.len() / m_size;
    let mut per_message = vec![CMat::zeros(d_e, d_e); m_size];
    let mut global = CMat::zeros(d_e, d_e);
    for (k, &x) in codebook.iter().enumerate() {
        let m = h.eval_unchecked(k as u64) as usize;
        per_message[m] += &eve_states[x];
        global += &eve_states[x];
    }
    let inv_l = Complex64::new(1.0 / l_size as f64, 0.0);
    let inv_ml = Complex64::new(1.0 / codebook.len() as f64, 0.0);
    let global = global * inv_ml;
    let mut acc = Vec::with_capacity(m_size);
    for block in per_message {
        acc.push(trace_norm_raw(&(block * inv_l - &global)));
    }
    0.5 * pairwise_sum(&acc) / m_size as f64
}

/// Expected distinguishability of Eve's state, `E_{C,h}[d₁]`, with codebooks
/// drawn i.i.d. from the prior and hashes from the affine family mapping
/// `[ML] → [M]`.
///
/// Unbalanced hashes (`a = 0`) cannot encode; following the convention that
/// Alice then announces the message publicly, they contribute exactly
/// `1 − 1/M` to `actual`, while `worst_case` charges them the worst-case
/// distance 1 (the accounting used by the bounds).
pub fn wiretap_d1(
    channel: &WiretapChannel,
    prior: &[f64],
    m_size: u64,
    l_size: u64,
    mode: WiretapD1Mode,
    trials: u64,
    seed: u64,
) -> Result<WiretapD1Result> {
    if !m_size.is_power_of_two() || !l_size.is_power_of_two() || m_size < 2 {
        return Err(Error::validation(
            "wiretap_d1 needs M ≥ 2 and L powers of two (the hash family maps bit strings)",
        ));
    }
    let ml = m_size * l_size;
    let u = ml.trailing_zeros();
    let v = m_size.trailing_zeros();
    let ctx = GFContext::new(u)?;
    let eve = induced_cq(channel, prior, Subsystem::E)?;
    let d_e = eve.dim_e();
    let eve_states: Vec<CMat> = (0..eve.alphabet_size())
        .map(|x| eve.rho(x).matrix().clone())
        .collect();
    let family = enumerate_family(ctx, v)?;
    let announced = 1.0 - 1.0 / m_size as f64;

    match mode {
        WiretapD1Mode::Exact => {
            let alphabet = channel.alphabet_size() as u64;
            let cb_count = (alphabet as f64).powi(ml as i32);
            let work = cb_count * family.len() as f64;
            if work > 1_048_576.0 {
                return Err(Error::capacity(format!(
                    "exact wiretap_d1 would evaluate {work:.3e} (codebook, hash) pairs; \
                     limit is 2^20"
                )));
            }
            let cb_count = cb_count as u64;
            // weighted averages over codebooks (prob Π p(x_k)) and hashes (uniform)
            let pairs: Vec<(f64, f64)> = (0..cb_count)
                .into_par_iter()
                .map(|ci| {
                    let mut codebook = vec![0usize; ml as usize];
                    let mut rem = ci;
                    let mut weight = 1.0;
                    for slot in (0..ml as usize).rev() {
                        let x = (rem % alphabet) as usize;
                        rem /= alphabet;
                        codebook[slot] = x;
                        weight *= prior[x];
                    }
                    if weight == 0.0 {
                        return (0.0, 0.0);
                    }
                    let mut vals = Vec::with_capacity(family.len() as usize);
                    let mut worst_vals = Vec::with_capacity(family.len() as usize);
                    for h in family.iter() {
                        if h.is_balanced() {
                            let d = d1_of_realization(&eve_states, &codebook, &h, d_e);
                            vals.push(d);
                            worst_vals.push(d);
                        } else {
                            vals.push(announced);
                            worst_vals.push(1.0);
                        }
                    }
                    let f = family.len() as f64;
                    (
                        weight * pairwise_sum(&vals) / f,
                        weight * pairwise_sum(&worst_vals) / f,
                    )
                })
                .collect();
            let actual = pairwise_sum(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
            let worst_case = pairwise_sum(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
            Ok(WiretapD1Result {
                mode,
                actual,
                worst_case,
                std_error: None,
                m_size,
                l_size,
                family_size: family.len(),
                codebooks: cb_count,
            })
        }
        WiretapD1Mode::MonteCarlo => {
            if trials == 0 {
                return Err(Error::validation("Monte-Carlo mode needs trials ≥ 1"));
            }
            let cum: Vec<f64> = prior
                .iter()
                .scan(0.0, |acc, &p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect();
            let samples: Vec<(f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i);
                    let codebook: Vec<usize> = (0..ml)
                        .map(|_| {
                            let r: f64 = rng.gen();
                            cum.iter().position(|&c| r < c).unwrap_or(cum.len() - 1)
                        })
                        .collect();
                    let h = AffineHash {
                        ctx,
                        v,
                        a: rng.gen_range(0..ctx.order()),
                        b: rng.gen_range(0..ctx.order()),
                    };
                    if h.is_balanced() {
                        let d = d1_of_realization(&eve_states, &codebook, &h, d_e);
                        (d, d)
                    } else {
                        (announced, 1.0)
                    }
                })
                .collect();
            let actual =
                pairwise_sum(&samples.iter().map(|s| s.0).collect::<Vec<_>>()) / trials as f64;
            let worst_case =
                pairwise_sum(&samples.iter().map(|s| s.1).collect::<Vec<_>>()) / trials as f64;
            let std_error = if trials > 1 {
                let sq: Vec<f64> = samples
                    .iter()
                    .map(|s| (s.0 - actual) * (s.0 - actual))
                    .collect();
                let var = pairwise_sum(&sq) / (trials - 1) as f64;
                Some((var / trials as f64).sqrt())
            } else {
                None
            };
            Ok(WiretapD1Result {
                mode,
                actual,
                worst_case,
                std_error,
                m_size,
                l_size,
                family_size: family.len(),
                codebooks: trials,
            })
        }
    }
}
