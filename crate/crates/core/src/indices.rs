//! Sobol indices, closed Sobol indices and Shapley effects from a table of
//! expected conditional variances `E_u = E(Var(Y | X_u))`.
//!
//! With `V_u = Var(Y) − E_u`:
//!
//! * `S_u = (−1)^{|u|} Σ_{v⊆u} (−1)^{|v|+1} E_v / Var(Y)` for `u ≠ ∅`, `S_∅ = 0`;
//! * `S^cl_u = V_u / Var(Y)`;
//! * `η_i = 1/(p Var(Y)) Σ_{u ⊆ −i} C(p−1, |u|)⁻¹ (E_u − E_{u∪{i}})`.
//!
//! The extractors only need the table, so they work equally for exact tables
//! (linear Gaussian case) and Monte Carlo estimates.

use rayon::prelude::*;

use crate::condvar::{all_conditional_variances, CondVarTable};
use crate::model::LinearGaussianModel;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub var_y: f64,
    /// `S_u` indexed by `h(u)`.
    pub sobol: Vec<f64>,
    /// `S^cl_u` indexed by `h(u)`.
    pub closed_sobol: Vec<f64>,
    /// `η_i`, 0-based.
    pub shapley: Vec<f64>,
    /// Number of conditional variances evaluated to build the report.
    pub eval_count: usize,
}

impl SensitivityReport {
    pub fn p(&self) -> usize {
        self.shapley.len()
    }

    /// Builds all three index families from a table.
    pub fn from_table(table: &CondVarTable, method: SobolMethod) -> Self {
        Self {
            var_y: table.var_y(),
            sobol: sobol_from_table_with(table, method),
            closed_sobol: closed_sobol_from_table(table),
            shapley: shapley_from_table(table),
            eval_count: table.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SobolMethod {
    /// `O(p·2^p)` subset-sum transform.
    #[default]
    Fast,
    /// The literal `O(3^p)` loop accumulating each `E_v` into every superset.
    Naive,
}

#[inline]
fn sign(card: u32) -> f64 {
    if card.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn sobol_from_table(table: &CondVarTable) -> Vec<f64> {
    sobol_from_table_with(table, SobolMethod::Fast)
}

pub fn sobol_from_table_with(table: &CondVarTable, method: SobolMethod) -> Vec<f64> {
    let values = table.values();
    let n = values.len();
    let mut acc: Vec<f64> = match method {
        SobolMethod::Fast => {
            let mut a: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(v, &e)| -sign((v as u64).count_ones()) * e)
                .collect();
            let mut bit = 1usize;
            while bit < n {
                for mask in 0..n {
                    if mask & bit != 0 {
                        a[mask] += a[mask ^ bit];
                    }
                }
                bit <<= 1;
            }
            a
        }
        SobolMethod::Naive => {
            let full = (n - 1) as u64;
            let mut s = vec![0.0; n];
            for (j, &e) in values.iter().enumerate() {
                let j = j as u64;
                let term = -sign(j.count_ones()) * e;
                let comp = full & !j;
                let mut sub = comp;
                loop {
                    s[(j | sub) as usize] += term;
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & comp;
                }
            }
            s
        }
    };
    acc[0] = 0.0;
    let var_y = table.var_y();
    for (u, s) in acc.iter_mut().enumerate().skip(1) {
        *s *= sign((u as u64).count_ones()) / var_y;
    }
    acc
}

pub fn closed_sobol_from_table(table: &CondVarTable) -> Vec<f64> {
    let var_y = table.var_y();
    table.values().iter().map(|&e| (var_y - e) / var_y).collect()
}

/// `C(n, k)` in exact integer arithmetic; fine for `n ≤ 60`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

pub fn shapley_from_table(table: &CondVarTable) -> Vec<f64> {
    let p = table.p();
    let values = table.values();
    let var_y = table.var_y();
    let inv_binom: Vec<f64> = (0..p as u64)
        .map(|s| 1.0 / binomial(p as u64 - 1, s) as f64)
        .collect();
    (0..p)
        .into_par_iter()
        .map(|i| {
            let bit = 1usize << i;
            let mut eta = 0.0;
            for k in 0..values.len() {
                if k & bit == 0 {
                    let size = (k as u64).count_ones() as usize;
                    eta += inv_binom[size] * (values[k] - values[k + bit]);
                }
            }
            eta / (p as f64 * var_y)
        })
        .collect()
}

/// Exact Sobol indices, closed Sobol indices and Shapley effects of a linear
/// Gaussian model from its `2^p` conditional variances.
pub fn lg_indices(model: &LinearGaussianModel) -> Result<SensitivityReport> {
    lg_indices_with(model, SobolMethod::Fast)
}

pub fn lg_indices_with(model: &LinearGaussianModel, method: SobolMethod) -> Result<SensitivityReport> {
    let table = all_conditional_variances(model)?;
    Ok(SensitivityReport::from_table(&table, method))
}

/// Shapley effects only, skipping the Sobol transforms.
pub fn lg_shapley(model: &LinearGaussianModel) -> Result<Vec<f64>> {
    Ok(shapley_from_table(&all_conditional_variances(model)?))
}
