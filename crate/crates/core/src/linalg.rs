//! Small symmetric linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// Relative eigenvalue cut-off for the symmetric generalized inverse.
pub const PINV_REL_TOL: f64 = 1e-12;

/// Condition estimate above which the Cholesky path is abandoned.
pub const COND_LIMIT: f64 = 1e12;

/// How `wᵀ A⁻¹ w` is evaluated for a symmetric PSD block `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMethod {
    /// Cholesky when well conditioned, generalized inverse otherwise.
    #[default]
    Auto,
    /// Cholesky only; panics if the block is not positive definite.
    Direct,
    /// Eigendecomposition-based generalized inverse.
    Generalized,
}

pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

pub fn subvector(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_fn(idx.len(), |r, _| v[idx[r]])
}

/// Moore–Penrose inverse of a symmetric matrix: eigenvalues at or below
/// `PINV_REL_TOL · λ_max` are treated as zero.
pub fn sym_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(a.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let tau = PINV_REL_TOL * lmax;
    let mut out = DMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > tau && lambda > 0.0 {
            let q = eig.eigenvectors.column(k);
            out += (q * q.transpose()) / lambda;
        }
    }
    out
}

fn cholesky_condition(chol: &Cholesky<f64, nalgebra::Dyn>) -> f64 {
    let l = chol.l_dirty();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..l.nrows() {
        let d = l[(i, i)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).powi(2)
    }
}

/// `wᵀ A⁻ w` for symmetric PSD `A`, where `A⁻` is the inverse or, for a
/// singular or badly conditioned `A`, the symmetric generalized inverse.
pub fn inverse_quad_form(a: DMatrix<f64>, w: &DVector<f64>, method: InverseMethod) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    match method {
        InverseMethod::Generalized => {
            let pinv = sym_pinv(&a);
            w.dot(&(pinv * w))
        }
        InverseMethod::Direct => {
            let chol = Cholesky::new(a).expect("block is not positive definite");
            w.dot(&chol.solve(w))
        }
        InverseMethod::Auto => match Cholesky::new(a.clone()) {
            Some(chol) if cholesky_condition(&chol) <= COND_LIMIT => w.dot(&chol.solve(w)),
            _ => {
                let pinv = sym_pinv(&a);
                w.dot(&(pinv * w))
            }
        },
    }
}

/// A factor `F` with `F Fᵀ = A` for symmetric PSD `A`, built from the
/// eigendecomposition so that singular matrices are accepted. Tiny negative
/// eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if let Some(chol) = Cholesky::new(a.clone()) {
        if cholesky_condition(&chol) <= COND_LIMIT {
            return chol.unpack();
        }
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut f = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        f.column_mut(k).scale_mut(s);
    }
    f
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a symmetric matrix.
pub fn eigen_range(a: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(a.clone());
    eig.eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        })
}
