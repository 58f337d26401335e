//! Linear Gaussian models and random benchmark instances.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ModelValidationError, ValidationKind};
use crate::linalg::eigen_range;
use crate::seed;

/// Relative symmetry tolerance: `|Γ_ij − Γ_ji| ≤ SYM_TOL · max|Γ|`.
pub const SYM_TOL: f64 = 1e-10;
/// Relative PSD tolerance: `λ_min ≥ −PSD_TOL · λ_max`.
pub const PSD_TOL: f64 = 1e-8;

/// `Y = βᵀX` with `X ~ N(μ, Γ)`.
///
/// The mean is carried along for file round-trips only; no index depends on
/// it, nor on an additive constant in the model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianModel {
    beta: DVector<f64>,
    gamma: DMatrix<f64>,
    mu: DVector<f64>,
}

impl LinearGaussianModel {
    /// Same as [`validate_model`].
    pub fn new(
        beta: DVector<f64>,
        gamma: DMatrix<f64>,
        mu: Option<DVector<f64>>,
    ) -> Result<Self, ModelValidationError> {
        validate_model(beta, gamma, mu)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    /// `Var(Y) = βᵀΓβ`.
    pub fn total_variance(&self) -> f64 {
        self.beta.dot(&(&self.gamma * &self.beta))
    }

    /// Restriction to the 0-based coordinates `idx` (`β_C`, `Γ_{C,C}`, `μ_C`),
    /// without re-validation.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self {
            beta: crate::linalg::subvector(&self.beta, idx),
            gamma: crate::linalg::submatrix(&self.gamma, idx, idx),
            mu: crate::linalg::subvector(&self.mu, idx),
        }
    }

    /// Copy with `β` replaced by `c·β`. Panics on `c = 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c != 0.0, "scaling by zero gives a degenerate model");
        Self {
            beta: &self.beta * c,
            ..self.clone()
        }
    }

    /// Relabels inputs: new input `k` is old input `perm[k]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        self.restrict(perm)
    }
}

pub fn total_variance(model: &LinearGaussianModel) -> f64 {
    model.total_variance()
}

/// Checks dimensions, symmetry, positive semi-definiteness and `βᵀΓβ > 0`.
/// `Γ` is symmetrized to `(Γ + Γᵀ)/2` before the spectral checks.
pub fn validate_model(
    beta: DVector<f64>,
    gamma: DMatrix<f64>,
    mu: Option<DVector<f64>>,
) -> Result<LinearGaussianModel, ModelValidationError> {
    use ValidationKind::*;

    let p = beta.len();
    if p == 0 {
        return Err(ModelValidationError::new(DimensionMismatch, "empty coefficient vector"));
    }
    if gamma.nrows() != p || gamma.ncols() != p {
        return Err(ModelValidationError::new(
            DimensionMismatch,
            format!(
                "beta has length {p} but gamma is {}x{}",
                gamma.nrows(),
                gamma.ncols()
            ),
        ));
    }
    let mu = match mu {
        Some(m) if m.len() != p => {
            return Err(ModelValidationError::new(
                DimensionMismatch,
                format!("beta has length {p} but mu has length {}", m.len()),
            ))
        }
        Some(m) => m,
        None => DVector::zeros(p),
    };
    if beta.iter().chain(gamma.iter()).chain(mu.iter()).any(|x| !x.is_finite()) {
        return Err(ModelValidationError::new(NonFinite, "NaN or infinite entry"));
    }

    let scale = gamma.amax();
    let asym = (&gamma - gamma.transpose()).amax();
    if asym > SYM_TOL * scale {
        return Err(ModelValidationError::new(
            NotSymmetric,
            format!("max |G_ij - G_ji| = {asym:e} exceeds {SYM_TOL:e} * {scale:e}"),
        ));
    }
    let gamma = (&gamma + gamma.transpose()) * 0.5;

    let (lmin, lmax) = eigen_range(&gamma);
    if lmin < -PSD_TOL * lmax.max(0.0) {
        return Err(ModelValidationError::new(
            NotPSD,
            format!("smallest eigenvalue {lmin:e}, largest {lmax:e}"),
        ));
    }

    let var_y = beta.dot(&(&gamma * &beta));
    let var_scale = beta.norm_squared() * lmax.max(0.0);
    if !(var_y > f64::EPSILON * var_scale) {
        return Err(ModelValidationError::new(
            ZeroOutputVariance,
            format!("beta' G beta = {var_y:e}"),
        ));
    }

    Ok(LinearGaussianModel { beta, gamma, mu })
}

fn normal_matrix<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    // Row-major draw order so the stream layout is easy to state.
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    a
}

/// `β ~ N(0, I_p)` and `Γ = AAᵀ` with i.i.d. standard normal `A` (p×p).
pub fn generate_random_instance(p: usize, seed: u64) -> LinearGaussianModel {
    generate_block_instance(1, p, seed)
}

/// `k` independent groups of `n` inputs: `Γ = diag(A_1A_1ᵀ, …, A_kA_kᵀ)`,
/// `β ~ N(0, I_{kn})`. With `k = 1` this is exactly
/// [`generate_random_instance`] with the same seed.
pub fn generate_block_instance(k: usize, n: usize, seed: u64) -> LinearGaussianModel {
    assert!(k >= 1 && n >= 1, "k and n must be positive");
    let p = k * n;
    let mut rng = seed::rng(seed);
    let beta = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut gamma = DMatrix::zeros(p, p);
    for b in 0..k {
        let a = normal_matrix(&mut rng, n);
        let block = &a * a.transpose();
        gamma.view_mut((b * n, b * n), (n, n)).copy_from(&block);
    }
    let gamma = (&gamma + gamma.transpose()) * 0.5;
    LinearGaussianModel {
        beta,
        gamma,
        mu: DVector::zeros(p),
    }
}
