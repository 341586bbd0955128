//! Numeric tolerances and capacity limits, collected in one record.
//!
//! Every threshold used by validation and iteration lives here as a named
//! constant; the [`Tolerances`] record surfaces the full set so reports and
//! tests can pin them.

use serde::Serialize;

/// Relative Hermiticity tolerance: `|A - A†|` entries measured against the
/// largest absolute entry of `A`.
pub const HERMITICITY: f64 = 1e-10;

/// Eigenvalue floor for positive semi-definiteness checks.
pub const PSD_FLOOR: f64 = -1e-10;

/// Allowed deviation of a density operator's trace from 1.
pub const UNIT_TRACE: f64 = 1e-10;

/// Relative spectral reconstruction error `‖A − UΛU†‖₂ / ‖A‖₂`.
pub const SPECTRAL_RECONSTRUCTION: f64 = 1e-9;

/// Support cutoff: an eigenvalue λ of a PSD operator is treated as exactly 0
/// when `λ < SUPPORT_CUTOFF · max(|λ_max|, 1)`.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Tolerance of the projector comparison deciding `supp(A) ⊆ supp(B)`.
pub const SUPPORT_CHECK: f64 = 1e-8;

/// Completeness tolerance for Kraus sets (`Σ K†K = 1`) and isometries.
pub const KRAUS_COMPLETENESS: f64 = 1e-9;

/// Guard band around α = 1: Rényi quantities dispatch to their von Neumann
/// limits when `|α − 1|` falls below this.
pub const ALPHA_GUARD: f64 = 1e-6;

/// Default first-order stationarity residual for the simplex minimizer.
pub const MINIMIZER_TOL: f64 = 1e-7;

/// Default iteration budget per minimizer start.
pub const MINIMIZER_MAX_ITERS: usize = 2000;

/// Probability-vector normalization tolerance.
pub const PROB_SUM: f64 = 1e-10;

/// Explicit-size limit for i.i.d. tensor extension: `|X|^n · d_E^n` must not
/// exceed this.
pub const IID_CAPACITY: usize = 4096;

/// Largest field exponent for exhaustive hash-family enumeration (2^{2u} members).
pub const FAMILY_ENUM_MAX_U: u32 = 12;

/// Largest field exponent for the exact universality table.
pub const UNIVERSALITY_MAX_U: u32 = 6;

/// Dimension limit for the density-operator simplex minimizer.
pub const SIGMA_DIM_LIMIT: usize = 8;

/// The full tolerance record with the defaults above.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub psd_floor: f64,
    pub unit_trace: f64,
    pub spectral_reconstruction: f64,
    pub support_cutoff: f64,
    pub support_check: f64,
    pub kraus_completeness: f64,
    pub alpha_guard: f64,
    pub minimizer_tol: f64,
    pub minimizer_max_iters: usize,
    pub prob_sum: f64,
    pub iid_capacity: usize,
    pub family_enum_max_u: u32,
    pub universality_max_u: u32,
    pub sigma_dim_limit: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: HERMITICITY,
            psd_floor: PSD_FLOOR,
            unit_trace: UNIT_TRACE,
            spectral_reconstruction: SPECTRAL_RECONSTRUCTION,
            support_cutoff: SUPPORT_CUTOFF,
            support_check: SUPPORT_CHECK,
            kraus_completeness: KRAUS_COMPLETENESS,
            alpha_guard: ALPHA_GUARD,
            minimizer_tol: MINIMIZER_TOL,
            minimizer_max_iters: MINIMIZER_MAX_ITERS,
            prob_sum: PROB_SUM,
            iid_capacity: IID_CAPACITY,
            family_enum_max_u: FAMILY_ENUM_MAX_U,
            universality_max_u: UNIVERSALITY_MAX_U,
            sigma_dim_limit: SIGMA_DIM_LIMIT,
        }
    }
}
