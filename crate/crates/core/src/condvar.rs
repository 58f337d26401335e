//! Closed-form Gaussian conditional variances.
//!
//! For `Y = βᵀX`, `X ~ N(μ, Γ)` and `r = −u` (the complement of `u`):
//!
//! ```text
//! Var(Y | X_u) = β_rᵀ (Γ_rr − Γ_ru Γ_uu⁻¹ Γ_ur) β_r
//! ```
//!
//! which does not depend on the value of `X_u`, so it is also
//! `E(Var(Y | X_u))`. A singular `Γ_uu` is handled through the symmetric
//! generalized inverse.

use log::warn;
use nalgebra::DVector;
use rayon::prelude::*;

use crate::linalg::{inverse_quad_form, submatrix, subvector, InverseMethod};
use crate::model::LinearGaussianModel;
use crate::subset::{check_lattice_dim, full_mask, SubsetId};
use crate::{Error, Result};

/// Results below `-NEG_FLAG_REL · Var(Y)` are flagged before clamping.
pub const NEG_FLAG_REL: f64 = 1e-9;

/// `values[j] = Var(Y | X_{h⁻¹(j)})` for every `j < 2^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondVarTable {
    values: Vec<f64>,
    var_y: f64,
    p: usize,
    flagged: usize,
}

impl CondVarTable {
    /// Wraps externally computed (e.g. estimated) conditional variances.
    /// Only the shape and `var_y > 0` are checked.
    pub fn from_values(values: Vec<f64>, var_y: f64) -> Result<Self> {
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(Error::Dimension(format!(
                "table length {} is not a power of two",
                values.len()
            )));
        }
        if !(var_y > 0.0) {
            return Err(Error::ZeroVariance(format!("var_y = {var_y}")));
        }
        let p = values.len().trailing_zeros() as usize;
        Ok(Self {
            values,
            var_y,
            p,
            flagged: 0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn var_y(&self) -> f64 {
        self.var_y
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of entries that came out noticeably negative before clamping.
    pub fn flagged(&self) -> usize {
        self.flagged
    }

    pub fn get(&self, u: SubsetId) -> f64 {
        self.values[u.index()]
    }
}

/// Raw Schur-complement value for the subset mask, unclamped.
pub(crate) fn schur_quad_form(model: &LinearGaussianModel, mask: u64, method: InverseMethod) -> f64 {
    let p = model.p();
    if mask == 0 {
        return model.total_variance();
    }
    if mask == full_mask(p) {
        return 0.0;
    }
    let (u, r): (Vec<usize>, Vec<usize>) = (0..p).partition(|&i| (mask >> i) & 1 == 1);
    let gamma = model.gamma();
    let beta_r: DVector<f64> = subvector(model.beta(), &r);
    let g_rr = submatrix(gamma, &r, &r);
    let g_ur = submatrix(gamma, &u, &r);
    let g_uu = submatrix(gamma, &u, &u);
    let w = &g_ur * &beta_r;
    beta_r.dot(&(&g_rr * &beta_r)) - inverse_quad_form(g_uu, &w, method)
}

fn clamp(model: &LinearGaussianModel, mask: u64, raw: f64) -> (f64, bool) {
    if raw >= 0.0 {
        return (raw, false);
    }
    let flag = raw < -NEG_FLAG_REL * model.total_variance();
    if flag {
        warn!(
            "conditional variance for subset mask {mask} is {raw:e} before clamping; \
             the covariance block is badly conditioned"
        );
    }
    (0.0, flag)
}

/// `Var(Y | X_u)`, clamped to be non-negative.
pub fn conditional_variance(model: &LinearGaussianModel, u: SubsetId) -> f64 {
    conditional_variance_with(model, u, InverseMethod::Auto)
}

/// [`conditional_variance`] with an explicit choice of inverse.
pub fn conditional_variance_with(
    model: &LinearGaussianModel,
    u: SubsetId,
    method: InverseMethod,
) -> f64 {
    assert_eq!(u.dim(), model.p(), "subset dimension does not match model");
    clamp(model, u.value(), schur_quad_form(model, u.value(), method)).0
}

/// Clamped value and flag for the raw mask. Hot path for all table builders.
pub(crate) fn cond_var_mask(model: &LinearGaussianModel, mask: u64) -> (f64, bool) {
    clamp(model, mask, schur_quad_form(model, mask, InverseMethod::Auto))
}

/// The full table of `2^p` conditional variances, evaluated in parallel.
/// Each entry is computed independently, so the output does not depend on
/// the thread count.
pub fn all_conditional_variances(model: &LinearGaussianModel) -> Result<CondVarTable> {
    let p = model.p();
    check_lattice_dim(p)?;
    let n = 1usize << p;
    let evaluated: Vec<(f64, bool)> = (0..n as u64)
        .into_par_iter()
        .map(|mask| cond_var_mask(model, mask))
        .collect();
    let flagged = evaluated.iter().filter(|(_, f)| *f).count();
    let values = evaluated.into_iter().map(|(v, _)| v).collect();
    Ok(CondVarTable {
        values,
        var_y: model.total_variance(),
        p,
        flagged,
    })
}
