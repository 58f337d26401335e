//! Conditional Gaussian sampling and the double Monte Carlo estimate of
//! `E(Var(Y | X_u))`, checked against the closed form of a linear model.
//!
//! ```bash
//! cargo run -p shapley-lg --example double_mc
//! ```

use nalgebra::{dmatrix, dvector};
use shapley_lg::{
    conditional_variance, double_mc_cond_var, sample_conditional, BlackBoxModel, GaussianInput,
    LinearGaussianModel, SubsetId,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beta = dvector![1.0, -2.0, 0.5];
    let gamma = dmatrix![
        1.0, 0.5, 0.2;
        0.5, 2.0, -0.3;
        0.2, -0.3, 1.5
    ];
    let model = LinearGaussianModel::new(beta.clone(), gamma.clone(), None)?;
    let input = GaussianInput::centered(gamma)?;
    let b: Vec<f64> = beta.iter().copied().collect();
    let f = BlackBoxModel::new(3, move |x| b.iter().zip(x).map(|(b, x)| b * x).sum());

    // Draws of (X2, X3) given X1 = 1.5.
    let u = SubsetId::encode(&[1], 3)?;
    let draws = sample_conditional(&input, u, &[1.5], 5, 0)?;
    println!("X2, X3 | X1 = 1.5:");
    for d in &draws {
        println!("  {:>8.4} {:>8.4}", d[0], d[1]);
    }

    println!();
    println!("{:<10} {:>10} {:>12}", "u", "exact", "double MC");
    for labels in [vec![1], vec![2], vec![1, 3], vec![2, 3]] {
        let u = SubsetId::encode(&labels, 3)?;
        let exact = conditional_variance(&model, u);
        let est = double_mc_cond_var(&f, &input, u, 2000, 50, 3)?;
        println!("{:<10} {exact:>10.5} {est:>12.5}", format!("{labels:?}"));
    }
    Ok(())
}
