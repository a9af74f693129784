//! Means and inequalities of positive definite matrices.
//!
//! This crate computes Cartan barycenters (Karcher means) of finitely
//! supported probability measures on the manifold of positive definite
//! Hermitian matrices, together with the machinery needed to check the
//! classical inequalities around them: Wasserstein contraction, stochastic
//! monotonicity, log-majorization through antisymmetric tensor powers,
//! arithmetic-geometric-harmonic sandwiches, and the Lie-Trotter limit of
//! measure powers.

pub mod barycenter;
pub mod compound;
pub mod error;
pub mod linalg;
pub mod majorization;
pub mod io;
pub mod measure;
pub mod randgen;
pub mod trotter;
pub mod verify;

pub use barycenter::{
    agh_check, barycenter_1d, cartan_barycenter, karcher_residual, AghReport, BarycenterResult,
    Initialization, SolverOptions,
};
pub use compound::{
    binomial, compound, compound_hermitian, compound_pushforward, lipschitz_bound,
    top_eigen_product, verify_commuting_diagram, CommutingDiagramReport, CompoundIndex,
};
pub use error::{Error, Result};
pub use majorization::{
    check_corollary_chain, check_main_theorem, log_majorize, ChainLink, MajorizationReport,
    NormCheck, PowerMajorization,
};
pub use measure::{
    loewner_leq, stochastic_leq, wasserstein, Coupling, DiscreteMeasure, TruncationAnchor,
};
pub use trotter::{
    integrability_profile, lie_trotter_curve, lie_trotter_target, log_log_slope, power_mean,
    power_mean_comparisons, power_mean_curve, sandwich_check, IntegrabilityProfile,
    PowerMeanComparison, SandwichReport, TrotterCurve,
};
pub use linalg::{
    eigh, exp_m, geodesic, log_m, matrix_function, norm, power_m, riem_exp, riem_log,
    sqrt_invsqrt, trace_metric, EigenSystem, HermitianMatrix, NormSpec, SpdMatrix,
};
