//! Gaussian input distributions and their conditional laws.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ModelValidationError, ValidationKind};
use crate::linalg::{eigen_range, psd_sqrt, submatrix, subvector, sym_pinv};
use crate::model::{PSD_TOL, SYM_TOL};
use crate::subset::SubsetId;

/// `N(μ, Γ)` with a cached square-root factor `F`, `F Fᵀ = Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianInput {
    mu: DVector<f64>,
    gamma: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl GaussianInput {
    pub fn new(mu: DVector<f64>, gamma: DMatrix<f64>) -> Result<Self, ModelValidationError> {
        use ValidationKind::*;
        let p = mu.len();
        if gamma.nrows() != p || gamma.ncols() != p {
            return Err(ModelValidationError::new(
                DimensionMismatch,
                format!("mu has length {p} but gamma is {}x{}", gamma.nrows(), gamma.ncols()),
            ));
        }
        if mu.iter().chain(gamma.iter()).any(|x| !x.is_finite()) {
            return Err(ModelValidationError::new(NonFinite, "NaN or infinite entry"));
        }
        let scale = gamma.amax();
        let asym = (&gamma - gamma.transpose()).amax();
        if asym > SYM_TOL * scale {
            return Err(ModelValidationError::new(
                NotSymmetric,
                format!("max |G_ij - G_ji| = {asym:e}"),
            ));
        }
        let gamma = (&gamma + gamma.transpose()) * 0.5;
        if p > 0 {
            let (lmin, lmax) = eigen_range(&gamma);
            if lmin < -PSD_TOL * lmax.max(0.0) {
                return Err(ModelValidationError::new(
                    NotPSD,
                    format!("smallest eigenvalue {lmin:e}, largest {lmax:e}"),
                ));
            }
        }
        let factor = psd_sqrt(&gamma);
        Ok(Self { mu, gamma, factor })
    }

    /// Centered input `N(0, Γ)`.
    pub fn centered(gamma: DMatrix<f64>) -> Result<Self, ModelValidationError> {
        Self::new(DVector::zeros(gamma.nrows()), gamma)
    }

    pub fn p(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.p(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mu + &self.factor * z
    }

    /// Marginal law of the 0-based coordinates `idx`.
    pub fn marginal(&self, idx: &[usize]) -> Self {
        let gamma = submatrix(&self.gamma, idx, idx);
        let factor = psd_sqrt(&gamma);
        Self {
            mu: subvector(&self.mu, idx),
            gamma,
            factor,
        }
    }

    pub fn conditional_sampler(&self, given: SubsetId) -> ConditionalSampler {
        ConditionalSampler::new(self, given)
    }
}

/// Draws `X_u` from its marginal and `X_{−u}` given `X_u = x_u` from
/// `N(μ_r + K (x_u − μ_u), Γ_rr − K Γ_ur)` with `K = Γ_ru Γ_uu⁺`.
#[derive(Debug, Clone)]
pub struct ConditionalSampler {
    given: Vec<usize>,
    free: Vec<usize>,
    mu_given: DVector<f64>,
    mu_free: DVector<f64>,
    given_factor: DMatrix<f64>,
    gain: DMatrix<f64>,
    cond_factor: DMatrix<f64>,
}

impl ConditionalSampler {
    fn new(input: &GaussianInput, given: SubsetId) -> Self {
        let p = input.p();
        assert_eq!(given.dim(), p, "subset dimension does not match input");
        let (u, r): (Vec<usize>, Vec<usize>) = (0..p).partition(|&i| (given.value() >> i) & 1 == 1);
        let gamma = input.gamma();
        let g_uu = submatrix(gamma, &u, &u);
        let g_ru = submatrix(gamma, &r, &u);
        let g_rr = submatrix(gamma, &r, &r);
        let gain = &g_ru * sym_pinv(&g_uu);
        let cond_cov = &g_rr - &gain * g_ru.transpose();
        let cond_cov = (&cond_cov + cond_cov.transpose()) * 0.5;
        Self {
            mu_given: subvector(input.mu(), &u),
            mu_free: subvector(input.mu(), &r),
            given_factor: psd_sqrt(&g_uu),
            cond_factor: psd_sqrt(&cond_cov),
            gain,
            given: u,
            free: r,
        }
    }

    /// 0-based coordinates conditioned on.
    pub fn given(&self) -> &[usize] {
        &self.given
    }

    /// 0-based coordinates drawn conditionally.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn conditional_mean(&self, x_given: &DVector<f64>) -> DVector<f64> {
        &self.mu_free + &self.gain * (x_given - &self.mu_given)
    }

    pub fn conditional_covariance(&self) -> DMatrix<f64> {
        &self.cond_factor * self.cond_factor.transpose()
    }

    pub fn sample_given<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.given.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mu_given + &self.given_factor * z
    }

    /// One draw of `X_{−u}` from the conditional mean `cond_mean`.
    pub fn sample_free<R: Rng + ?Sized>(&self, cond_mean: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.free.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        cond_mean + &self.cond_factor * z
    }

    /// Writes `x_u` and `x_r` into their positions of a full-length vector.
    pub fn assemble(&self, x_given: &DVector<f64>, x_free: &DVector<f64>, out: &mut [f64]) {
        for (k, &i) in self.given.iter().enumerate() {
            out[i] = x_given[k];
        }
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = x_free[k];
        }
    }
}
