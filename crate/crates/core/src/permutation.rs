//! Permutation formulations of the Shapley effects for linear Gaussian models.
//!
//! For a permutation `σ`, walking its elements in order and conditioning on
//! one more input at each step gives a chain of conditional variances
//! `Var(Y) = E_∅ ≥ … ≥ E_{[1:p]} = 0`. Element `i` is credited with the drop
//! `E_{P} − E_{P∪{i}}` where `P` holds its predecessors in `σ`. Averaging over
//! all `p!` permutations gives `η_i · Var(Y)` exactly; averaging over `m`
//! uniform permutations gives an unbiased estimate. Conditional variances are
//! evaluated in closed form at every step.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condvar::cond_var_mask;
use crate::model::LinearGaussianModel;
use crate::seed;
use crate::{Error, Result};

/// Largest `p` accepted by [`exact_permutation_shapley`].
pub const EXACT_PERM_MAX_P: usize = 8;

/// Components whose replicate mean is below this are left out of the CV.
pub const CV_MEAN_FLOOR: f64 = 1e-12;

const TAG_RANDOM_PERM: u64 = 0x5045_524d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationEstimate {
    pub shapley_hat: Vec<f64>,
    pub m: usize,
    pub seed: u64,
    /// Estimated variance of each component of `shapley_hat`, from the
    /// spread of the per-permutation credits (`None` when `m < 2`).
    pub per_i_variance: Option<Vec<f64>>,
}

/// Credits of one permutation chain, in units of variance.
fn chain_credits<F>(order: &[usize], p: usize, var_y: f64, mut cond_var: F, out: &mut [f64])
where
    F: FnMut(u64) -> f64,
{
    let mut mask = 0u64;
    let mut prev = var_y;
    for (step, &i) in order.iter().enumerate() {
        mask |= 1u64 << i;
        let next = if step + 1 == p { 0.0 } else { cond_var(mask) };
        out[i] = prev - next;
        prev = next;
    }
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Exact Shapley effects by enumerating all `p!` permutations.
pub fn exact_permutation_shapley(model: &LinearGaussianModel) -> Result<Vec<f64>> {
    let p = model.p();
    if p > EXACT_PERM_MAX_P {
        return Err(Error::PermutationGuard {
            p,
            max: EXACT_PERM_MAX_P,
        });
    }
    let var_y = model.total_variance();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut sums = vec![0.0; p];
    let mut credits = vec![0.0; p];
    let mut count = 0u64;
    loop {
        chain_credits(&perm, p, var_y, |mask| cond_var_mask(model, mask).0, &mut credits);
        for (s, c) in sums.iter_mut().zip(&credits) {
            *s += c;
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let norm = count as f64 * var_y;
    Ok(sums.into_iter().map(|s| s / norm).collect())
}

/// Estimate from `m` uniformly drawn permutations (Fisher–Yates on a seeded
/// generator). Each permutation credits all `p` inputs, so the components
/// always sum to one.
pub fn random_permutation_shapley(
    model: &LinearGaussianModel,
    m: usize,
    seed: u64,
) -> Result<PermutationEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let p = model.p();
    let var_y = model.total_variance();
    let mut rng = seed::sub_rng(seed, &[TAG_RANDOM_PERM]);
    let mut perm: Vec<usize> = (0..p).collect();
    let mut credits = vec![0.0; p];
    let mut sum = vec![0.0; p];
    let mut sum_sq = vec![0.0; p];
    for _ in 0..m {
        perm.shuffle(&mut rng);
        chain_credits(&perm, p, var_y, |mask| cond_var_mask(model, mask).0, &mut credits);
        for i in 0..p {
            let c = credits[i] / var_y;
            sum[i] += c;
            sum_sq[i] += c * c;
        }
    }
    let mf = m as f64;
    let shapley_hat: Vec<f64> = sum.iter().map(|s| s / mf).collect();
    let per_i_variance = (m >= 2).then(|| {
        (0..p)
            .map(|i| ((sum_sq[i] - mf * shapley_hat[i].powi(2)) / (mf - 1.0)).max(0.0) / mf)
            .collect()
    });
    Ok(PermutationEstimate {
        shapley_hat,
        m,
        seed,
        per_i_variance,
    })
}

/// Spread of repeated Shapley estimates, in percent of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    /// `100 · sd_i / |mean_i|`; `None` for components with a vanishing mean.
    pub per_i_cv: Vec<Option<f64>>,
    /// Mean of the defined entries of `per_i_cv`.
    pub mean_cv: f64,
    pub per_i_mean: Vec<f64>,
    pub per_i_std: Vec<f64>,
    /// 0-based components excluded because their mean is below
    /// [`CV_MEAN_FLOOR`].
    pub excluded: Vec<usize>,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
}

/// Coefficients of variation of a set of replicate estimates.
pub fn cv_from_estimates(estimates: &[Vec<f64>], m: usize, seed: u64) -> Result<CvSummary> {
    let reps = estimates.len();
    if reps < 2 {
        return Err(Error::InvalidArgument("at least two replicates are needed".into()));
    }
    let p = estimates[0].len();
    if estimates.iter().any(|e| e.len() != p) {
        return Err(Error::Dimension("replicates have different lengths".into()));
    }
    let n = reps as f64;
    let per_i_mean: Vec<f64> = (0..p)
        .map(|i| estimates.iter().map(|e| e[i]).sum::<f64>() / n)
        .collect();
    let per_i_std: Vec<f64> = (0..p)
        .map(|i| {
            let ss: f64 = estimates.iter().map(|e| (e[i] - per_i_mean[i]).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        })
        .collect();
    let mut excluded = Vec::new();
    let per_i_cv: Vec<Option<f64>> = (0..p)
        .map(|i| {
            if per_i_mean[i].abs() < CV_MEAN_FLOOR {
                excluded.push(i);
                None
            } else {
                Some(100.0 * per_i_std[i] / per_i_mean[i].abs())
            }
        })
        .collect();
    let defined: Vec<f64> = per_i_cv.iter().flatten().copied().collect();
    let mean_cv = if defined.is_empty() {
        f64::NAN
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    };
    Ok(CvSummary {
        per_i_cv,
        mean_cv,
        per_i_mean,
        per_i_std,
        excluded,
        m,
        reps,
        seed,
    })
}

/// Seed of replicate `r` in a CV experiment.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    seed::derive(seed, &[r as u64])
}

/// `reps` independent runs of [`random_permutation_shapley`], in parallel.
pub fn replicate_random_permutation(
    model: &LinearGaussianModel,
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<PermutationEstimate>> {
    (0..reps)
        .into_par_iter()
        .map(|r| random_permutation_shapley(model, m, replicate_seed(seed, r)))
        .collect()
}

/// Coefficients of variation of the random-permutation estimator over
/// `reps` replicates.
pub fn cv_experiment(model: &LinearGaussianModel, m: usize, reps: usize, seed: u64) -> Result<CvSummary> {
    if reps < 2 {
        return Err(Error::InvalidArgument("reps must be at least 2".into()));
    }
    let runs = replicate_random_permutation(model, m, reps, seed)?;
    let estimates: Vec<Vec<f64>> = runs.into_iter().map(|r| r.shapley_hat).collect();
    cv_from_estimates(&estimates, m, seed)
}
