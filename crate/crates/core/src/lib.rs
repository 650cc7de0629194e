//! A laboratory for graph matchability under heterogeneous edge structure.
//!
//! The pipeline: sample a correlated random graph pair with per-pair edge
//! probabilities and correlations ([`corr_er`]), optionally remove the
//! edge-probability structure by singular value thresholding ([`usvt`]),
//! match with a Frank-Wolfe relaxation of the quadratic assignment objective
//! ([`faq`] on top of [`assignment`]), and measure whether the latent
//! alignment is recoverable — exactly at small n ([`matchability`]), or
//! empirically through the seeded Monte-Carlo runners ([`harness`]).

pub mod assignment;
pub mod corr_er;
pub mod error;
pub mod faq;
pub mod harness;
pub mod linalg;
pub mod matchability;
pub mod rng;
pub mod usvt;

pub use assignment::{brute_force_lap, solve_lap_max, Permutation};
pub use corr_er::{
    bibern_params, max_feasible_correlation, sbm_spec, validate_spec, CorrSpec, GraphPair,
    ProbMatrix, Violation,
};
pub use error::{Error, Result};
pub use faq::{
    exact_line_search, faq_match, gm_objective, relaxed_gradient, DoublyStochastic, Init,
    MatchOptions, MatchResult,
};
pub use matchability::{
    accuracy, brute_force_gmp, count_pi_n_k, epsilon_bound, frobenius_concentration_check,
    is_matchable, matchability_verdict, moved_pair_count, tau_id, x_p, Flavor,
    MatchabilityVerdict, PermClass,
};
pub use usvt::{center, elbow_rank, scaled_threshold, usvt_estimate, ThresholdRule, UsvtEstimate, UsvtOptions};
