//! Exponent envelopes, thresholds, finite-blocklength bound values,
//! entropy-accumulation bounds, and moderate-deviation tables.
//!
//! Each exponent is a supremum of `±((1−α)/α)(rate − entropic quantity)` over
//! a closed α-interval, evaluated on a 512-point grid with golden-section
//! refinement. Suprema stated on open intervals are computed on the closed
//! hull; every objective extends continuously to the endpoints and vanishes
//! at α = 1, so the supremum value is unchanged.
//!
//! Exponents are clamped at 0 and bounds clamped into `[0,1]` for reporting;
//! raw values are retained alongside.

use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::cq::CQState;
use crate::error::{Error, Result};
use crate::renyi::{
    cond_var, down_conditional_extended, down_mutual_extended, mi_var, star_conditional,
    star_mutual, von_neumann_conditional, von_neumann_mutual, MinimizeOptions,
};

/// Grid size for the α sweep.
const ALPHA_GRID: usize = 512;
/// Golden-section bracket width on α.
const ALPHA_TOL: f64 = 1e-9;
/// Dead band for exponent positivity checks.
const POSITIVITY_BAND: f64 = 1e-8;

/// Which theorem's bound an [`ExponentReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    /// `ε_PA ≤ e^{−nE}`, positive when the rate is below `H(X|E)`.
    PaAchievability,
    /// `ε_PA ≥ 1 − 4e^{−nE}`, positive when the rate is above `H(X|E)`.
    PaConverse,
    /// `E[d₁] ≤ 2e^{−nE}`, positive when `log L` is above `I(X:E)`.
    WiretapSecrecy,
    /// `E[d₁] ≥ 1 − 5e^{−nE}`, positive when `log L` is below `I(X:E)`.
    WiretapConverse,
    /// `E[ε] ≤ 4e^{−nE}`, positive when `log ML` is below `I(X:B)`.
    WiretapError,
}

impl ExponentKind {
    /// Constant in front of the exponential.
    pub fn prefactor(&self) -> f64 {
        match self {
            ExponentKind::PaAchievability => 1.0,
            ExponentKind::PaConverse => 4.0,
            ExponentKind::WiretapSecrecy => 2.0,
            ExponentKind::WiretapConverse => 5.0,
            ExponentKind::WiretapError => 4.0,
        }
    }

    /// True when the bound reads `1 − c·e^{−nE}` (a converse pushing the
    /// operational quantity toward 1), false for `c·e^{−nE}` decay bounds.
    pub fn is_converse(&self) -> bool {
        matches!(
            self,
            ExponentKind::PaConverse | ExponentKind::WiretapConverse
        )
    }

    /// Side of the threshold on which the exponent is positive.
    fn positive_above_threshold(&self) -> bool {
        matches!(
            self,
            ExponentKind::PaConverse | ExponentKind::WiretapSecrecy
        )
    }
}

/// Raw (unclamped) companion values of a report.
#[derive(Debug, Clone, Serialize)]
pub struct RawExponent {
    pub exponent: f64,
    pub bounds: BTreeMap<u64, f64>,
}

/// One exponent evaluation: rate, optimal α, exponent, the first-order
/// threshold, and (optionally) bound values at requested blocklengths.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub kind: ExponentKind,
    /// Rate argument in nats (`R`, `log L`, or `log ML` depending on kind).
    pub rate: f64,
    /// Clamped exponent, `max(0, sup_α …)`.
    pub exponent: f64,
    /// Maximizing α on the closed interval.
    pub alpha_star: f64,
    /// The first-order quantity the rate is compared against.
    pub threshold: f64,
    /// Clamped bound values per blocklength.
    pub bounds: BTreeMap<u64, f64>,
    pub raw: RawExponent,
}

impl ExponentReport {
    fn new(
        kind: ExponentKind,
        rate: f64,
        raw_exponent: f64,
        alpha_star: f64,
        threshold: f64,
    ) -> Result<Self> {
        // snap numerically-zero suprema so vacuous bounds report exactly 0
        let exponent = if raw_exponent > 1e-12 { raw_exponent } else { 0.0 };
        if exponent > POSITIVITY_BAND {
            let above = rate > threshold - POSITIVITY_BAND;
            let below = rate < threshold + POSITIVITY_BAND;
            let ok = if kind.positive_above_threshold() { above } else { below };
            if !ok {
                return Err(Error::validation(format!(
                    "{kind:?}: exponent {exponent:.3e} positive but rate {rate} is on the wrong \
                     side of threshold {threshold}"
                )));
            }
        }
        Ok(ExponentReport {
            kind,
            rate,
            exponent,
            alpha_star,
            threshold,
            bounds: BTreeMap::new(),
            raw: RawExponent {
                exponent: raw_exponent,
                bounds: BTreeMap::new(),
            },
        })
    }

    /// Unclamped bound value at blocklength `n`.
    pub fn raw_bound_at(&self, n: u64) -> f64 {
        let decay = self.kind.prefactor() * (-(n as f64) * self.raw.exponent).exp();
        if self.kind.is_converse() {
            1.0 - decay
        } else {
            decay
        }
    }

    /// Bound value at blocklength `n`, clamped into [0, 1].
    pub fn bound_at(&self, n: u64) -> f64 {
        let decay = self.kind.prefactor() * (-(n as f64) * self.exponent).exp();
        let raw = if self.kind.is_converse() { 1.0 - decay } else { decay };
        raw.clamp(0.0, 1.0)
    }

    /// Fills the per-`n` bound maps.
    pub fn with_bounds(mut self, ns: &[u64]) -> Self {
        for &n in ns {
            self.bounds.insert(n, self.bound_at(n));
            self.raw.bounds.insert(n, self.raw_bound_at(n));
        }
        self
    }
}

/// Maximizes a continuous objective on a closed interval: 512-point uniform
/// grid, then golden-section refinement around the best grid cell down to an
/// α-width of 1e-9. Returns `(alpha_star, value)`.
pub fn sup_alpha(
    objective: &mut dyn FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    assert!(lo < hi, "sup_alpha needs a proper interval");
    let step = (hi - lo) / (ALPHA_GRID - 1) as f64;
    let mut best_idx = 0;
    let mut best_alpha = lo;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..ALPHA_GRID {
        let alpha = if i + 1 == ALPHA_GRID { hi } else { lo + i as f64 * step };
        let v = objective(alpha)?;
        if v > best_val {
            best_val = v;
            best_idx = i;
            best_alpha = alpha;
        }
    }
    // golden-section refinement inside the two cells around the best point
    let mut a = lo + best_idx.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best_idx + 1) as f64 * step).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > ALPHA_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1)?;
        }
        let (xc, fc) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        if fc > best_val {
            best_val = fc;
            best_alpha = xc;
        }
    }
    Ok((best_alpha, best_val))
}

/// Strong-converse exponent of privacy amplification:
/// `sup_{α∈[1/2,1]} ((1−α)/α)(R − H^↓_{2−1/α}(X|E))`, threshold `H(X|E)`.
pub fn pa_converse_exponent(s: &CQState, rate: f64) -> Result<ExponentReport> {
    check_rate(rate)?;
    let mut obj = |alpha: f64| -> Result<f64> {
        let h = down_conditional_extended(s, 2.0 - 1.0 / alpha)?;
        Ok((1.0 - alpha) / alpha * (rate - h))
    };
    let (alpha_star, raw) = sup_alpha(&mut obj, 0.5, 1.0)?;
    ExponentReport::new(
        ExponentKind::PaConverse,
        rate,
        raw,
        alpha_star,
        von_neumann_conditional(s),
    )
}

/// Achievability (decay) exponent of privacy amplification:
/// `sup_{α∈[1,2]} ((α−1)/α)(H*_α(X|E) − R)`, threshold `H(X|E)`.
pub fn pa_achievability_exponent(s: &CQState, rate: f64) -> Result<ExponentReport> {
    check_rate(rate)?;
    let warm: RefCell<Option<crate::operator::CMat>> = RefCell::new(None);
    let mut obj = |alpha: f64| -> Result<f64> {
        let h = if (alpha - 1.0).abs() < crate::tolerances::ALPHA_GUARD {
            von_neumann_conditional(s)
        } else {
            let opts = MinimizeOptions::warm(warm.borrow().clone());
            let (h, sigma) = star_conditional(s, alpha, &opts)?;
            *warm.borrow_mut() = Some(sigma.matrix().clone());
            h
        };
        Ok((alpha - 1.0) / alpha * (h - rate))
    };
    let (alpha_star, raw) = sup_alpha(&mut obj, 1.0, 2.0)?;
    ExponentReport::new(
        ExponentKind::PaAchievability,
        rate,
        raw,
        alpha_star,
        von_neumann_conditional(s),
    )
}

/// Secrecy exponent of wiretap channel coding:
/// `sup_{α∈[1,2]} ((α−1)/α)(log L − I*_α(X:E))`, threshold `I(X:E)`.
pub fn wiretap_secrecy_exponent(s: &CQState, log_l: f64) -> Result<ExponentReport> {
    check_log_size(log_l)?;
    let warm: RefCell<Option<crate::operator::CMat>> = RefCell::new(None);
    let mut obj = |alpha: f64| -> Result<f64> {
        let i = if (alpha - 1.0).abs() < crate::tolerances::ALPHA_GUARD {
            von_neumann_mutual(s)
        } else {
            let opts = MinimizeOptions::warm(warm.borrow().clone());
            let (i, sigma) = star_mutual(s, alpha, &opts)?;
            *warm.borrow_mut() = Some(sigma.matrix().clone());
            i
        };
        Ok((alpha - 1.0) / alpha * (log_l - i))
    };
    let (alpha_star, raw) = sup_alpha(&mut obj, 1.0, 2.0)?;
    ExponentReport::new(
        ExponentKind::WiretapSecrecy,
        log_l,
        raw,
        alpha_star,
        von_neumann_mutual(s),
    )
}

/// Strong-converse exponent of wiretap channel coding:
/// `sup_{α∈[1/2,1]} ((1−α)/α)(I^↓_{2−1/α}(X:E) − log L)`, threshold `I(X:E)`.
pub fn wiretap_converse_exponent(s: &CQState, log_l: f64) -> Result<ExponentReport> {
    check_log_size(log_l)?;
    let mut obj = |alpha: f64| -> Result<f64> {
        let i = down_mutual_extended(s, 2.0 - 1.0 / alpha)?;
        Ok((1.0 - alpha) / alpha * (i - log_l))
    };
    let (alpha_star, raw) = sup_alpha(&mut obj, 0.5, 1.0)?;
    ExponentReport::new(
        ExponentKind::WiretapConverse,
        log_l,
        raw,
        alpha_star,
        von_neumann_mutual(s),
    )
}

/// Transmission-error exponent of the wiretap protocol, evaluated on the
/// Bob-side state: `sup_{α∈[1/2,1]} ((1−α)/α)(I^↓_{2−1/α}(X:B) − log ML)`.
pub fn wiretap_error_exponent(s_xb: &CQState, log_ml: f64) -> Result<ExponentReport> {
    check_log_size(log_ml)?;
    let mut obj = |alpha: f64| -> Result<f64> {
        let i = down_mutual_extended(s_xb, 2.0 - 1.0 / alpha)?;
        Ok((1.0 - alpha) / alpha * (i - log_ml))
    };
    let (alpha_star, raw) = sup_alpha(&mut obj, 0.5, 1.0)?;
    ExponentReport::new(
        ExponentKind::WiretapError,
        log_ml,
        raw,
        alpha_star,
        von_neumann_mutual(s_xb),
    )
}

fn check_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() {
        return Err(Error::validation("rate must be finite"));
    }
    Ok(())
}

fn check_log_size(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::validation(format!(
            "log-size must be finite and nonnegative, got {v}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Entropy accumulation
// ---------------------------------------------------------------------------

/// Inputs to the entropy-accumulation bounds: tradeoff-function value `f(w)`,
/// the constant `V > 2`, the weight probability `Pr[wt(T₁ⁿ) = w]`, the rate,
/// and the number of rounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EaParams {
    pub f_w: f64,
    pub v_const: f64,
    pub prob_w: f64,
    pub rate: f64,
    pub n: u64,
}

impl EaParams {
    pub fn new(f_w: f64, v_const: f64, prob_w: f64, rate: f64, n: u64) -> Result<Self> {
        if !v_const.is_finite() || v_const <= 2.0 {
            return Err(Error::validation(format!(
                "the constant V must exceed 2, got {v_const}"
            )));
        }
        if !prob_w.is_finite() || prob_w <= 0.0 || prob_w > 1.0 {
            return Err(Error::validation(format!(
                "prob_w must lie in (0,1], got {prob_w}"
            )));
        }
        if !f_w.is_finite() || !rate.is_finite() {
            return Err(Error::validation("f(w) and rate must be finite"));
        }
        Ok(EaParams {
            f_w,
            v_const,
            prob_w,
            rate,
            n,
        })
    }
}

/// An entropy-accumulation bound value: raw formula output plus its `[0,1]`
/// clamp for display.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EaBound {
    pub raw: f64,
    pub clamped: f64,
}

/// Strong-converse bound `1 − (4/Pr[w]) e^{−(n/2)((R−f(w))/V)²}`, valid on
/// the window `0 < R − f(w) < V`. The raw value may be negative (vacuous).
pub fn ea_converse_bound(p: &EaParams) -> Result<EaBound> {
    let gap = p.rate - p.f_w;
    if gap <= 0.0 {
        return Err(Error::domain(format!(
            "ea_converse_bound needs 0 < R − f(w); got R − f(w) = {gap}"
        )));
    }
    if gap >= p.v_const {
        return Err(Error::domain(format!(
            "ea_converse_bound needs R − f(w) < V; got {gap} ≥ {}",
            p.v_const
        )));
    }
    let raw = 1.0 - (4.0 / p.prob_w) * ea_decay(p);
    Ok(EaBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// Achievability bound `(1/Pr[w]) e^{−(n/2)((R−f(w))/V)²}`, valid on the
/// window `0 < f(w) − R ≤ V²/2`.
pub fn ea_achievability_bound(p: &EaParams) -> Result<EaBound> {
    let gap = p.f_w - p.rate;
    if gap <= 0.0 {
        return Err(Error::domain(format!(
            "ea_achievability_bound needs 0 < f(w) − R; got f(w) − R = {gap}"
        )));
    }
    if gap > p.v_const * p.v_const / 2.0 {
        return Err(Error::domain(format!(
            "ea_achievability_bound needs f(w) − R ≤ V²/2; got {gap} > {}",
            p.v_const * p.v_const / 2.0
        )));
    }
    let raw = ea_decay(p) / p.prob_w;
    Ok(EaBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

fn ea_decay(p: &EaParams) -> f64 {
    let ratio = (p.rate - p.f_w) / p.v_const;
    (-(p.n as f64) / 2.0 * ratio * ratio).exp()
}

// ---------------------------------------------------------------------------
// Moderate deviations
// ---------------------------------------------------------------------------

/// The rate schedule `a_n = n^{−t}` with `t ∈ (0, 1/2)`, ensuring `a_n → 0`
/// and `n·a_n² → ∞`.
#[derive(Debug, Clone, Serialize)]
pub struct ModerateSchedule {
    pub exponent_t: f64,
    pub n_list: Vec<u64>,
}

impl ModerateSchedule {
    pub fn new(exponent_t: f64, n_list: Vec<u64>) -> Result<Self> {
        if !(exponent_t > 0.0 && exponent_t < 0.5) {
            return Err(Error::validation(format!(
                "moderate-deviation exponent t must lie in (0, 1/2), got {exponent_t}"
            )));
        }
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(Error::validation("n_list must be non-empty and positive"));
        }
        if n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("n_list must be strictly increasing"));
        }
        Ok(ModerateSchedule { exponent_t, n_list })
    }

    pub fn a_n(&self, n: u64) -> f64 {
        (n as f64).powf(-self.exponent_t)
    }
}

/// Which bound a moderate-deviation table tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModerateKind {
    PaAch,
    PaConv,
    WtAch,
    WtConv,
}

impl ModerateKind {
    fn exponent_kind(&self) -> ExponentKind {
        match self {
            ModerateKind::PaAch => ExponentKind::PaAchievability,
            ModerateKind::PaConv => ExponentKind::PaConverse,
            ModerateKind::WtAch => ExponentKind::WiretapSecrecy,
            ModerateKind::WtConv => ExponentKind::WiretapConverse,
        }
    }

    /// Sign of the rate offset: the rate approaches the threshold from the
    /// side where the corresponding exponent is positive.
    fn offset_sign(&self) -> f64 {
        if self.exponent_kind().positive_above_threshold() {
            1.0
        } else {
            -1.0
        }
    }
}

/// One row of a moderate-deviation table.
#[derive(Debug, Clone, Serialize)]
pub struct ModerateRow {
    pub n: u64,
    pub a_n: f64,
    pub rate: f64,
    pub exponent: f64,
    /// Clamped bound value at this `n`.
    pub bound: f64,
    /// `−(1/(n a_n²)) log(c·e^{−nE})` where `c` is the bound's prefactor.
    pub normalized_exponent: f64,
}

/// Moderate-deviation table for a state-based bound.
#[derive(Debug, Clone, Serialize)]
pub struct ModerateTable {
    pub kind: ModerateKind,
    pub exponent_t: f64,
    pub threshold: f64,
    pub variance: f64,
    /// The limiting constant `1/(2V)`.
    pub limit_constant: f64,
    pub rows: Vec<ModerateRow>,
}

/// Evaluates the chosen bound along the schedule `R_n = threshold ∓ a_n` and
/// reports the normalized exponents next to their limit `1/(2V)`.
///
/// Needs the relevant information variance to be positive.
pub fn moderate_table(
    s: &CQState,
    kind: ModerateKind,
    sched: &ModerateSchedule,
) -> Result<ModerateTable> {
    let variance = match kind {
        ModerateKind::PaAch | ModerateKind::PaConv => cond_var(s),
        ModerateKind::WtAch | ModerateKind::WtConv => mi_var(s),
    };
    if variance < 1e-12 {
        return Err(Error::domain(format!(
            "moderate_table({kind:?}): information variance {variance:.3e} is zero; \
             the moderate-deviation limit is undefined"
        )));
    }
    let ekind = kind.exponent_kind();
    let threshold = match kind {
        ModerateKind::PaAch | ModerateKind::PaConv => von_neumann_conditional(s),
        ModerateKind::WtAch | ModerateKind::WtConv => von_neumann_mutual(s),
    };
    let mut rows = Vec::with_capacity(sched.n_list.len());
    for &n in &sched.n_list {
        let a_n = sched.a_n(n);
        let rate = threshold + kind.offset_sign() * a_n;
        let report = match kind {
            ModerateKind::PaAch => pa_achievability_exponent(s, rate)?,
            ModerateKind::PaConv => pa_converse_exponent(s, rate)?,
            ModerateKind::WtAch => wiretap_secrecy_exponent(s, rate)?,
            ModerateKind::WtConv => wiretap_converse_exponent(s, rate)?,
        };
        let n_f = n as f64;
        // the decaying term c·e^{−nE}: the bound itself for achievability
        // kinds, one minus the bound for converse kinds
        let log_term = ekind.prefactor().ln() - n_f * report.exponent;
        let normalized = -log_term / (n_f * a_n * a_n);
        rows.push(ModerateRow {
            n,
            a_n,
            rate,
            exponent: report.exponent,
            bound: report.bound_at(n),
            normalized_exponent: normalized,
        });
    }
    Ok(ModerateTable {
        kind,
        exponent_t: sched.exponent_t,
        threshold,
        variance,
        limit_constant: 1.0 / (2.0 * variance),
        rows,
    })
}

/// Side of the entropy-accumulation bound pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EaSide {
    Ach,
    Conv,
}

/// One row of the entropy-accumulation moderate-deviation table. Rows whose
/// `(R_n, n)` fall outside the bound's validity window are flagged, not
/// dropped; their bound value is absent.
#[derive(Debug, Clone, Serialize)]
pub struct EaModerateRow {
    pub n: u64,
    pub a_n: f64,
    pub rate: f64,
    pub in_window: bool,
    pub bound: Option<f64>,
    pub normalized_exponent: f64,
}

/// Moderate-deviation table for the entropy-accumulation bounds.
#[derive(Debug, Clone, Serialize)]
pub struct EaModerateTable {
    pub side: EaSide,
    pub exponent_t: f64,
    pub f_w: f64,
    pub v_const: f64,
    pub prob_w: f64,
    /// The limiting constant `1/(2V²)`.
    pub limit_constant: f64,
    pub rows: Vec<EaModerateRow>,
}

/// Evaluates the EA bounds along `R_n = f(w) ∓ a_n`. The normalized exponent
/// is `−(1/(n a_n²)) log((c/Pr[w]) e^{−(n/2)(a_n/V)²})`, whose limit is
/// `1/(2V²)`.
pub fn moderate_ea_table(
    f_w: f64,
    v_const: f64,
    prob_w: f64,
    side: EaSide,
    sched: &ModerateSchedule,
) -> Result<EaModerateTable> {
    // parameter validation via a throwaway EaParams
    EaParams::new(f_w, v_const, prob_w, f_w, 1)?;
    let mut rows = Vec::with_capacity(sched.n_list.len());
    for &n in &sched.n_list {
        let a_n = sched.a_n(n);
        let (rate, prefactor) = match side {
            EaSide::Ach => (f_w - a_n, 1.0),
            EaSide::Conv => (f_w + a_n, 4.0),
        };
        let params = EaParams::new(f_w, v_const, prob_w, rate, n)?;
        let bound = match side {
            EaSide::Ach => ea_achievability_bound(&params),
            EaSide::Conv => ea_converse_bound(&params),
        };
        let (in_window, bound) = match bound {
            Ok(b) => (true, Some(b.clamped)),
            Err(Error::Domain(_)) => (false, None),
            Err(e) => return Err(e),
        };
        let n_f = n as f64;
        let log_term = (prefactor / prob_w).ln() - (n_f / 2.0) * (a_n / v_const).powi(2);
        rows.push(EaModerateRow {
            n,
            a_n,
            rate,
            in_window,
            bound,
            normalized_exponent: -log_term / (n_f * a_n * a_n),
        });
    }
    Ok(EaModerateTable {
        side,
        exponent_t: sched.exponent_t,
        f_w,
        v_const,
        prob_w,
        limit_constant: 1.0 / (2.0 * v_const * v_const),
        rows,
    })
}
