//! Shapley estimation for black-box models with Gaussian inputs.
//!
//! `E(Var(Y | X_u))` is estimated by double Monte Carlo: an outer draw of
//! `X_u` from its marginal, then `n_inner` conditional draws of `X_{−u}` and
//! the unbiased sample variance of `f` over them. The random-permutation
//! estimator plugs these estimates into each permutation chain.
//!
//! For block-additive models `f = Σ_j g_j(X_{C_j})` over independent groups,
//! [`block_additive_shapley`] estimates every block on its own (much smaller)
//! input space and recombines with the variance shares of the blocks.
//!
//! Every task draws from its own generator derived from the seed and the
//! task's coordinates, so results are identical whatever the thread count.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::blocks::{combine_block_shapley, BlockPartition};
use crate::condvar::CondVarTable;
use crate::gaussian::{ConditionalSampler, GaussianInput};
use crate::permutation::PermutationEstimate;
use crate::seed;
use crate::subset::{check_lattice_dim, full_mask, SubsetId};
use crate::{Error, Result};

const TAG_VAR: u64 = 1;
const TAG_ORDER: u64 = 2;
const TAG_STEP: u64 = 3;
const TAG_BLOCK: u64 = 4;
const TAG_TABLE: u64 = 5;
const TAG_SAMPLE: u64 = 6;

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A scalar function of `p` real inputs.
#[derive(Clone)]
pub struct BlackBoxModel {
    p: usize,
    eval: Arc<EvalFn>,
}

impl BlackBoxModel {
    pub fn new<F>(p: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            p,
            eval: Arc::new(f),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.p);
        (self.eval)(x)
    }
}

impl fmt::Debug for BlackBoxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxModel").field("p", &self.p).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Number of random permutations.
    pub m: usize,
    /// Sample size for `Var(Y)`.
    pub n_var: usize,
    /// Outer (`X_u`) draws per conditional variance.
    pub n_outer: usize,
    /// Inner (`X_{−u} | X_u`) draws per outer draw; at least 2.
    pub n_inner: usize,
    pub seed: u64,
    /// Upper bound on model evaluations for one run.
    pub budget: u128,
    /// Evaluate the model from a single thread.
    pub serial: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            m: 1000,
            n_var: 10_000,
            n_outer: 1,
            n_inner: 3,
            seed: 0,
            budget: 1_000_000_000,
            serial: false,
        }
    }
}

impl McConfig {
    /// Model evaluations of [`mc_shapley`] in dimension `p`.
    pub fn evaluations(&self, p: usize) -> u128 {
        let steps = p.saturating_sub(1) as u128;
        self.n_var as u128 + self.m as u128 * steps * self.n_outer as u128 * self.n_inner as u128
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n_var < 2 || self.n_outer == 0 {
            return Err(Error::InvalidArgument(
                "m and n_outer must be at least 1, n_var at least 2".into(),
            ));
        }
        if self.n_inner < 2 {
            return Err(Error::InvalidArgument(
                "n_inner must be at least 2 for a sample variance".into(),
            ));
        }
        Ok(())
    }

    fn check_budget(&self, required: u128) -> Result<()> {
        if required > self.budget {
            Err(Error::BudgetExceeded {
                required,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

fn check_dims(model: &BlackBoxModel, input: &GaussianInput) -> Result<()> {
    if model.p() != input.p() {
        return Err(Error::Dimension(format!(
            "model takes {} inputs, distribution has {}",
            model.p(),
            input.p()
        )));
    }
    Ok(())
}

/// Running mean and unbiased variance.
#[derive(Debug, Default, Clone, Copy)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// `n` i.i.d. draws of `X_{−u}` given `X_u = x_u` (coordinates of `x_u` in
/// increasing index order). Each draw lists the free coordinates in
/// increasing index order.
pub fn sample_conditional(
    input: &GaussianInput,
    u: SubsetId,
    x_u: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if u.dim() != input.p() {
        return Err(Error::Dimension("subset dimension does not match input".into()));
    }
    if x_u.len() != u.cardinality() {
        return Err(Error::Dimension(format!(
            "x_u has length {} but |u| = {}",
            x_u.len(),
            u.cardinality()
        )));
    }
    let sampler = input.conditional_sampler(u);
    let mean = sampler.conditional_mean(&DVector::from_column_slice(x_u));
    let mut rng = seed::sub_rng(seed, &[TAG_SAMPLE]);
    Ok((0..n)
        .map(|_| sampler.sample_free(&mean, &mut rng).as_slice().to_vec())
        .collect())
}

fn double_mc_with(
    model: &BlackBoxModel,
    sampler: &ConditionalSampler,
    n_outer: usize,
    n_inner: usize,
    seed: u64,
) -> f64 {
    if sampler.free().is_empty() {
        return 0.0;
    }
    let mut x = vec![0.0; model.p()];
    let mut total = 0.0;
    for outer in 0..n_outer {
        let mut rng = seed::sub_rng(seed, &[outer as u64]);
        let x_given = sampler.sample_given(&mut rng);
        let mean = sampler.conditional_mean(&x_given);
        let mut w = Welford::default();
        for _ in 0..n_inner {
            let x_free = sampler.sample_free(&mean, &mut rng);
            sampler.assemble(&x_given, &x_free, &mut x);
            w.push(model.eval(&x));
        }
        total += w.variance();
    }
    total / n_outer as f64
}

/// Double Monte Carlo estimate of `E(Var(Y | X_u))`.
pub fn double_mc_cond_var(
    model: &BlackBoxModel,
    input: &GaussianInput,
    u: SubsetId,
    n_outer: usize,
    n_inner: usize,
    seed: u64,
) -> Result<f64> {
    check_dims(model, input)?;
    if n_inner < 2 {
        return Err(Error::InvalidArgument(
            "n_inner must be at least 2 for a sample variance".into(),
        ));
    }
    if n_outer == 0 {
        return Err(Error::InvalidArgument("n_outer must be at least 1".into()));
    }
    if u.dim() != input.p() {
        return Err(Error::Dimension("subset dimension does not match input".into()));
    }
    let sampler = input.conditional_sampler(u);
    Ok(double_mc_with(model, &sampler, n_outer, n_inner, seed))
}

/// Unbiased sample variance of `f(X)` over `n` draws.
pub fn estimate_variance(model: &BlackBoxModel, input: &GaussianInput, n: usize, seed: u64) -> f64 {
    let mut rng = seed::sub_rng(seed, &[TAG_VAR]);
    let mut w = Welford::default();
    for _ in 0..n {
        let x = input.sample(&mut rng);
        w.push(model.eval(x.as_slice()));
    }
    w.variance()
}

/// Conditional samplers built on first use, one per subset.
struct SamplerCache<'a> {
    input: &'a GaussianInput,
    samplers: Mutex<HashMap<u64, Arc<ConditionalSampler>>>,
}

impl<'a> SamplerCache<'a> {
    fn new(input: &'a GaussianInput) -> Self {
        Self {
            input,
            samplers: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, mask: u64) -> Arc<ConditionalSampler> {
        if let Some(s) = self.samplers.lock().unwrap().get(&mask) {
            return Arc::clone(s);
        }
        let u = SubsetId::new(mask, self.input.p()).expect("mask within lattice");
        let built = Arc::new(self.input.conditional_sampler(u));
        Arc::clone(self.samplers.lock().unwrap().entry(mask).or_insert(built))
    }
}

/// Random-permutation Shapley estimate where every conditional variance is
/// a double Monte Carlo estimate. The chain starts at the estimated `Var(Y)`
/// and ends at zero, so the components sum to one.
pub fn mc_shapley(
    model: &BlackBoxModel,
    input: &GaussianInput,
    cfg: &McConfig,
) -> Result<PermutationEstimate> {
    check_dims(model, input)?;
    cfg.check()?;
    let p = model.p();
    cfg.check_budget(cfg.evaluations(p))?;

    let var_y = estimate_variance(model, input, cfg.n_var, cfg.seed);
    if !(var_y > 0.0) {
        return Err(Error::ZeroVariance(format!(
            "estimated Var(Y) = {var_y} over {} samples",
            cfg.n_var
        )));
    }

    let cache = SamplerCache::new(input);
    let chain = |j: usize| -> Vec<f64> {
        let mut order: Vec<usize> = (0..p).collect();
        order.shuffle(&mut seed::sub_rng(cfg.seed, &[TAG_ORDER, j as u64]));
        let mut credits = vec![0.0; p];
        let mut mask = 0u64;
        let mut prev = var_y;
        for (step, &i) in order.iter().enumerate() {
            mask |= 1u64 << i;
            let next = if step + 1 == p {
                0.0
            } else {
                let step_seed = seed::derive(cfg.seed, &[TAG_STEP, j as u64, step as u64]);
                double_mc_with(model, &cache.get(mask), cfg.n_outer, cfg.n_inner, step_seed)
            };
            credits[i] = (prev - next) / var_y;
            prev = next;
        }
        credits
    };
    let chains: Vec<Vec<f64>> = if cfg.serial {
        (0..cfg.m).map(chain).collect()
    } else {
        (0..cfg.m).into_par_iter().map(chain).collect()
    };

    let mf = cfg.m as f64;
    let mut shapley_hat = vec![0.0; p];
    for c in &chains {
        for (s, x) in shapley_hat.iter_mut().zip(c) {
            *s += x;
        }
    }
    for s in &mut shapley_hat {
        *s /= mf;
    }
    let per_i_variance = (cfg.m >= 2).then(|| {
        (0..p)
            .map(|i| {
                let ss: f64 = chains.iter().map(|c| (c[i] - shapley_hat[i]).powi(2)).sum();
                ss / (mf - 1.0) / mf
            })
            .collect()
    });
    Ok(PermutationEstimate {
        shapley_hat,
        m: cfg.m,
        seed: cfg.seed,
        per_i_variance,
    })
}

/// Double Monte Carlo estimate of every `E(Var(Y | X_u))`, `u ⊆ [1:p]`.
/// Entry 0 is the plain variance estimate and the last entry is zero.
pub fn estimate_cond_var_table(
    model: &BlackBoxModel,
    input: &GaussianInput,
    cfg: &McConfig,
) -> Result<CondVarTable> {
    check_dims(model, input)?;
    cfg.check()?;
    let p = model.p();
    check_lattice_dim(p)?;
    let n = 1usize << p;
    let required = cfg.n_var as u128
        + (n.saturating_sub(2)) as u128 * cfg.n_outer as u128 * cfg.n_inner as u128;
    cfg.check_budget(required)?;

    let var_y = estimate_variance(model, input, cfg.n_var, cfg.seed);
    let entry = |mask: usize| -> f64 {
        let mask = mask as u64;
        if mask == 0 {
            var_y
        } else if mask == full_mask(p) {
            0.0
        } else {
            let u = SubsetId::new(mask, p).expect("mask within lattice");
            let sampler = input.conditional_sampler(u);
            let s = seed::derive(cfg.seed, &[TAG_TABLE, mask]);
            double_mc_with(model, &sampler, cfg.n_outer, cfg.n_inner, s)
        }
    };
    let values: Vec<f64> = if cfg.serial {
        (0..n).map(entry).collect()
    } else {
        (0..n).into_par_iter().map(entry).collect()
    };
    CondVarTable::from_values(values, var_y)
}

/// One block `g_j` of a block-additive model: a function of the group's own
/// inputs, listed by their 0-based global indices.
#[derive(Debug, Clone)]
pub struct Block {
    pub indices: Vec<usize>,
    pub model: BlackBoxModel,
    pub input: GaussianInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockAdditiveEstimate {
    /// Global Shapley estimate, 0-based.
    pub shapley: Vec<f64>,
    /// Normalized variance shares `Var(g_j) / Σ_l Var(g_l)`.
    pub weights: Vec<f64>,
    /// Estimated `Var(g_j)`.
    pub block_variances: Vec<f64>,
    /// Per-block Shapley estimates in the blocks' local coordinates.
    pub block_estimates: Vec<PermutationEstimate>,
    pub partition: BlockPartition,
}

/// Shapley effects of `Σ_j g_j(X_{C_j})` for independent groups `C_j`:
/// `η_i = Ŝ_{j(i)} · η̂_i^{(j(i))}`, each block estimated with
/// [`mc_shapley`] on its own inputs.
pub fn block_additive_shapley(blocks: &[Block], cfg: &McConfig) -> Result<BlockAdditiveEstimate> {
    cfg.check()?;
    let p: usize = blocks.iter().map(|b| b.indices.len()).sum();
    let partition = BlockPartition::new(blocks.iter().map(|b| b.indices.clone()).collect(), p)?;
    for b in blocks {
        if b.model.p() != b.indices.len() {
            return Err(Error::Dimension(format!(
                "block over {} inputs has a model of dimension {}",
                b.indices.len(),
                b.model.p()
            )));
        }
        check_dims(&b.model, &b.input)?;
    }
    let required: u128 = blocks.iter().map(|b| cfg.evaluations(b.indices.len())).sum();
    cfg.check_budget(required)?;

    // Blocks ordered like the partition's groups.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&b| blocks[b].indices.iter().min().copied().unwrap_or(usize::MAX));

    let run = |j: usize| -> Result<(f64, PermutationEstimate)> {
        let b = &blocks[j];
        let block_cfg = McConfig {
            seed: seed::derive(cfg.seed, &[TAG_BLOCK, j as u64]),
            ..cfg.clone()
        };
        let var = estimate_variance(&b.model, &b.input, cfg.n_var, block_cfg.seed);
        if !(var > 0.0) {
            return Err(Error::ZeroVariance(format!(
                "block {j} has estimated variance {var}"
            )));
        }
        Ok((var, mc_shapley(&b.model, &b.input, &block_cfg)?))
    };
    let results: Vec<(f64, PermutationEstimate)> = if cfg.serial {
        order.iter().map(|&j| run(j)).collect::<Result<_>>()?
    } else {
        order.par_iter().map(|&j| run(j)).collect::<Result<_>>()?
    };

    let total: f64 = results.iter().map(|(v, _)| v).sum();
    let block_variances: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
    let weights: Vec<f64> = block_variances.iter().map(|v| v / total).collect();
    let local: Vec<Vec<f64>> = order
        .iter()
        .zip(&results)
        .map(|(&j, (_, est))| {
            // mc_shapley sees the block's indices in the caller's order;
            // the partition stores them sorted.
            let idx = &blocks[j].indices;
            let mut pairs: Vec<(usize, f64)> =
                idx.iter().copied().zip(est.shapley_hat.iter().copied()).collect();
            pairs.sort_by_key(|(i, _)| *i);
            pairs.into_iter().map(|(_, s)| s).collect()
        })
        .collect();
    let shapley = combine_block_shapley(&weights, &local, &partition)?;
    Ok(BlockAdditiveEstimate {
        shapley,
        weights,
        block_variances,
        block_estimates: results.into_iter().map(|(_, e)| e).collect(),
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector, DMatrix};

    fn linear(beta: Vec<f64>) -> BlackBoxModel {
        BlackBoxModel::new(beta.len(), move |x| beta.iter().zip(x).map(|(b, x)| b * x).sum())
    }

    #[test]
    fn conditioning_on_everything_draws_nothing() {
        let input = GaussianInput::centered(DMatrix::identity(3, 3)).unwrap();
        let s = sample_conditional(&input, SubsetId::full(3), &[0.1, 0.2, 0.3], 5, 1).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(Vec::is_empty));
    }

    #[test]
    fn independent_inputs_ignore_condition() {
        let input = GaussianInput::centered(DMatrix::from_diagonal(&dvector![1.0, 4.0])).unwrap();
        let u = SubsetId::encode(&[1], 2).unwrap();
        let a = sample_conditional(&input, u, &[100.0], 4000, 3).unwrap();
        let b = sample_conditional(&input, u, &[-100.0], 4000, 3).unwrap();
        assert_eq!(a, b);
        let mean: f64 = a.iter().map(|v| v[0]).sum::<f64>() / 4000.0;
        let var: f64 = a.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / 3999.0;
        // sd of the mean is 2/sqrt(4000) ≈ 0.032
        assert!(mean.abs() < 0.13);
        assert!((var - 4.0).abs() < 0.4);
    }

    #[test]
    fn conditional_sample_moments() {
        // mean 0.5 * 2 = 1, variance 1 - 0.25 = 0.75
        let input = GaussianInput::centered(dmatrix![1.0, 0.5; 0.5, 1.0]).unwrap();
        let u = SubsetId::encode(&[1], 2).unwrap();
        let n = 20_000;
        let s = sample_conditional(&input, u, &[2.0], n, 7).unwrap();
        let mean: f64 = s.iter().map(|v| v[0]).sum::<f64>() / n as f64;
        let var: f64 = s.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se_mean = (0.75 / n as f64).sqrt();
        let se_var = 0.75 * (2.0 / (n - 1) as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se_mean, "{mean}");
        assert!((var - 0.75).abs() < 4.0 * se_var, "{var}");
    }

    #[test]
    fn double_mc_edge_cases() {
        let input = GaussianInput::centered(dmatrix![1.0, 0.5; 0.5, 1.0]).unwrap();
        let f = linear(vec![1.0, 1.0]);
        assert_eq!(double_mc_cond_var(&f, &input, SubsetId::full(2), 10, 5, 1).unwrap(), 0.0);
        assert!(double_mc_cond_var(&f, &input, SubsetId::empty(2), 10, 1, 1).is_err());
        // u = ∅, one outer draw: a plain variance estimate of Y (Var Y = 3)
        let n = 50_000;
        let v = double_mc_cond_var(&f, &input, SubsetId::empty(2), 1, n, 2).unwrap();
        assert!((v - 3.0).abs() < 4.0 * 3.0 * (2.0 / n as f64).sqrt(), "{v}");
    }

    #[test]
    fn constant_model_has_no_variance() {
        let input = GaussianInput::centered(DMatrix::identity(3, 3)).unwrap();
        let f = BlackBoxModel::new(3, |_| 4.2);
        let cfg = McConfig {
            m: 10,
            n_var: 100,
            ..McConfig::default()
        };
        assert!(matches!(mc_shapley(&f, &input, &cfg), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn budget_enforced() {
        let input = GaussianInput::centered(DMatrix::identity(3, 3)).unwrap();
        let f = linear(vec![1.0, 2.0, 3.0]);
        let cfg = McConfig {
            m: 100,
            n_var: 100,
            n_outer: 10,
            n_inner: 10,
            budget: 1000,
            ..McConfig::default()
        };
        assert!(matches!(
            mc_shapley(&f, &input, &cfg),
            Err(Error::BudgetExceeded { required: 20_100, budget: 1000 })
        ));
    }

    #[test]
    fn mc_shapley_deterministic_and_serial_equivalent() {
        let input = GaussianInput::centered(dmatrix![1.0, 0.3, 0.0; 0.3, 1.0, 0.2; 0.0, 0.2, 1.0])
            .unwrap();
        let f = BlackBoxModel::new(3, |x| x[0] + x[1] * x[2] + (x[2]).sin());
        let cfg = McConfig {
            m: 50,
            n_var: 500,
            n_outer: 4,
            n_inner: 3,
            seed: 9,
            ..McConfig::default()
        };
        let a = mc_shapley(&f, &input, &cfg).unwrap();
        let b = mc_shapley(&f, &input, &cfg).unwrap();
        let c = mc_shapley(&f, &input, &McConfig { serial: true, ..cfg.clone() }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!((a.shapley_hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_block_reduces_to_mc_shapley() {
        let input = GaussianInput::centered(dmatrix![1.0, 0.4; 0.4, 2.0]).unwrap();
        let f = BlackBoxModel::new(2, |x| x[0] * x[0] + x[1]);
        let cfg = McConfig {
            m: 40,
            n_var: 1000,
            n_outer: 5,
            n_inner: 4,
            seed: 3,
            ..McConfig::default()
        };
        let est = block_additive_shapley(
            &[Block {
                indices: vec![0, 1],
                model: f.clone(),
                input: input.clone(),
            }],
            &cfg,
        )
        .unwrap();
        let block_cfg = McConfig {
            seed: seed::derive(cfg.seed, &[TAG_BLOCK, 0]),
            ..cfg
        };
        let direct = mc_shapley(&f, &input, &block_cfg).unwrap();
        assert_eq!(est.weights, vec![1.0]);
        assert_eq!(est.shapley, direct.shapley_hat);
    }

    #[test]
    fn blocks_listed_out_of_order() {
        let cfg = McConfig {
            m: 50,
            n_var: 20_000,
            n_outer: 50,
            n_inner: 10,
            seed: 1,
            ..McConfig::default()
        };
        let blocks = vec![
            Block {
                indices: vec![2],
                model: linear(vec![2.0]),
                input: GaussianInput::centered(dmatrix![1.0]).unwrap(),
            },
            Block {
                indices: vec![1, 0],
                model: linear(vec![1.0, 0.0]),
                input: GaussianInput::centered(dmatrix![1.0, 0.0; 0.0, 1.0]).unwrap(),
            },
        ];
        let est = block_additive_shapley(&blocks, &cfg).unwrap();
        // global input 1 (local 0 of the second block) carries that block's
        // variance, global input 0 only Monte Carlo noise; exact values 0, 0.2, 0.8
        assert!(est.shapley[0].abs() < 0.05, "{:?}", est.shapley);
        assert!((est.shapley[1] - 0.2).abs() < 0.05, "{:?}", est.shapley);
        assert!((est.shapley[2] - 0.8).abs() < 0.05, "{:?}", est.shapley);
        assert!((est.shapley.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let overlapping = vec![blocks[0].clone(), Block { indices: vec![2, 0], ..blocks[1].clone() }];
        assert!(block_additive_shapley(&overlapping, &cfg).is_err());
    }

    #[test]
    fn zero_variance_block_rejected() {
        let cfg = McConfig {
            m: 5,
            n_var: 100,
            ..McConfig::default()
        };
        let blocks = vec![
            Block {
                indices: vec![0],
                model: linear(vec![1.0]),
                input: GaussianInput::centered(dmatrix![1.0]).unwrap(),
            },
            Block {
                indices: vec![1],
                model: BlackBoxModel::new(1, |_| 1.0),
                input: GaussianInput::centered(dmatrix![1.0]).unwrap(),
            },
        ];
        assert!(matches!(block_additive_shapley(&blocks, &cfg), Err(Error::ZeroVariance(_))));
    }
}
