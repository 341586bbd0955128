//! Entropic exponents and one-shot/finite-blocklength bounds for privacy
//! amplification against quantum side information, verified against exact
//! brute-force simulation of strongly 2-universal hashing on small
//! classical-quantum states.
//!
//! Module map:
//!
//! - [`operator`]: dense Hermitian linear algebra and spectral calculus;
//! - [`cq`]: classical-quantum states, wiretap channels, and the channels
//!   acting on them;
//! - [`renyi`]: Petz and sandwiched Rényi divergences, conditional
//!   entropies, mutual informations, variances, and the simplex minimizer
//!   behind the starred quantities;
//! - [`hashing`]: GF(2^u) arithmetic and the affine strongly 2-universal
//!   hash family;
//! - [`exponents`]: exponent envelopes, thresholds, finite-blocklength
//!   bounds, entropy-accumulation bounds, and moderate-deviation tables;
//! - [`simulator`]: exact and Monte-Carlo evaluation of the operational
//!   trace-distance quantities and the bound-sandwich harness;
//! - [`verifier`]: a seeded battery of numeric oracles for the inequalities
//!   the bounds rest on;
//! - [`fixtures`]: the named example states used by tests and the CLI.

pub mod cq;
pub mod error;
pub mod exponents;
pub mod fixtures;
pub mod hashing;
pub mod operator;
pub mod renyi;
pub mod simulator;
pub mod tolerances;
pub mod verifier;

pub use cq::{
    apply_hash, iid_extend, induced_cq, marginal_e, randomized_target, stinespring, BlockDiagonal,
    CQState, CQStateJson, Codebook, KrausChannel, StinespringDilation, Subsystem, WiretapChannel,
    WiretapChannelJson,
};
pub use error::{Error, Result};
pub use exponents::{
    ea_achievability_bound, ea_converse_bound, moderate_ea_table, moderate_table,
    pa_achievability_exponent, pa_converse_exponent, sup_alpha, wiretap_converse_exponent,
    wiretap_error_exponent, wiretap_secrecy_exponent, EaBound, EaParams, EaSide, ExponentKind,
    ExponentReport, ModerateKind, ModerateSchedule, ModerateTable,
};
pub use hashing::{
    enumerate_family, sample_hash, universality_check, AffineHash, GFContext, HashFamily,
    HashSpec, UniversalityTable,
};
pub use operator::{
    abs_op, mat_log_support, mat_power, nc_quotient, pairwise_sum, partial_trace, positive_part,
    spectral, tensor, trace_distance, trace_norm, CMat, DensityOperator, HermitianOperator,
    MatrixJson, SpectralDecomposition,
};
pub use renyi::{
    bloch_grid_search, cond_var, conditional_entropy, cq_sandwiched_reduction, divergence, mi_var,
    minimize_sigma, mutual_information, relative_entropy, relative_entropy_second_moment,
    relative_entropy_variance, star_conditional, star_mutual, von_neumann_conditional,
    von_neumann_mutual, DivergenceKind, EntropyKind, MinimizeOptions, MutualKind, SigmaObjective,
    SigmaOptimum,
};
pub use simulator::{
    exact_pa_distance, sampled_pa_distance, sandwich_check, wiretap_d1, PaResult, SandwichReport,
    WiretapD1Mode, WiretapD1Result,
};
pub use tolerances::Tolerances;
pub use verifier::{
    check_additivity, check_concavity, check_derivatives, check_helstrom_attainment,
    check_monotone_and_limits, check_trace_inequality, run_battery, BatteryConfig, CheckReport,
};
