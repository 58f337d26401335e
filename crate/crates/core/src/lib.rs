//! Variance-based sensitivity indices for models with Gaussian inputs.
//!
//! The crate computes exact Sobol indices, closed Sobol indices and Shapley
//! effects for linear Gaussian models `Y = βᵀX`, `X ~ N(μ, Γ)`, by tabulating
//! every conditional variance `Var(Y | X_u)` over the subset lattice. When `Γ`
//! is block diagonal the lattice splits into one small lattice per block, so
//! only `Σ_j 2^{|C_j|}` conditional variances are needed instead of `2^p`.
//!
//! For general (black-box) models with Gaussian inputs it provides the
//! random-permutation Shapley estimator driven by double Monte Carlo
//! conditional variances, and a block-additive variant that estimates each
//! block separately and recombines the results.
//!
//! Subset labels follow the usual convention of input indices `1..=p`, and
//! the subset `u` is stored as the integer `Σ_{i∈u} 2^{i-1}` (see
//! [`subset::SubsetId`]). Plain vectors (`beta`, Shapley vectors) are indexed
//! from zero.
//!
//! ```
//! use nalgebra::{dmatrix, dvector};
//! use shapley_lg::{lg_indices, LinearGaussianModel};
//!
//! let model = LinearGaussianModel::new(
//!     dvector![1.0, 1.0],
//!     dmatrix![1.0, 0.5; 0.5, 1.0],
//!     None,
//! )
//! .unwrap();
//! let report = lg_indices(&model).unwrap();
//! assert!((report.shapley[0] - 0.5).abs() < 1e-12);
//! assert!((report.sobol[3] + 0.5).abs() < 1e-12);
//! ```

pub mod blocks;
pub mod cli;
pub mod condvar;
pub mod error;
pub mod expr;
pub mod gaussian;
pub mod indices;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod permutation;
pub mod seed;
pub mod subset;

pub use blocks::{
    combine_block_shapley, detect_blocks, group_weight, lg_groups_indices,
    verify_cross_block_zeros, BlockPartition, CrossBlockViolation, GroupedReport,
};
pub use condvar::{all_conditional_variances, conditional_variance, CondVarTable};
pub use error::{Error, ModelValidationError, ValidationKind};
pub use gaussian::GaussianInput;
pub use indices::{
    closed_sobol_from_table, lg_indices, shapley_from_table, sobol_from_table, SensitivityReport,
};
pub use mc::{
    block_additive_shapley, double_mc_cond_var, mc_shapley, sample_conditional, BlackBoxModel,
    Block, McConfig,
};
pub use model::{generate_block_instance, generate_random_instance, validate_model, LinearGaussianModel};
pub use permutation::{
    cv_experiment, exact_permutation_shapley, random_permutation_shapley, CvSummary,
    PermutationEstimate,
};
pub use subset::SubsetId;

/// Largest dimension for which the full `2^p` lattice is ever materialized.
pub const LATTICE_CAP: usize = 25;

/// Absolute tolerance on normalized quantities (index sums, ranges).
pub const NUM_TOL: f64 = 1e-10;

pub type Result<T, E = Error> = std::result::Result<T, E>;
