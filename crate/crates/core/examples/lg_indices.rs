//! Exact Sobol indices, closed Sobol indices and Shapley effects of a small
//! linear Gaussian model.
//!
//! ```bash
//! cargo run -p shapley-lg --example lg_indices
//! ```

use nalgebra::{dmatrix, dvector};
use shapley_lg::subset::elements;
use shapley_lg::{lg_indices, LinearGaussianModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // X1 and X2 strongly correlated, X3 independent of both.
    let model = LinearGaussianModel::new(
        dvector![1.0, 1.0, 0.5],
        dmatrix![
            1.0, 0.8, 0.0;
            0.8, 1.0, 0.0;
            0.0, 0.0, 4.0
        ],
        None,
    )?;
    let report = lg_indices(&model)?;

    println!("Var(Y) = {:.6}", report.var_y);
    println!("{:<10} {:>12} {:>12}", "subset", "Sobol", "closed");
    for mask in 1..report.sobol.len() {
        println!(
            "{:<10} {:>12.6} {:>12.6}",
            format!("{:?}", elements(mask as u64)),
            report.sobol[mask],
            report.closed_sobol[mask]
        );
    }
    println!();
    for (i, eta) in report.shapley.iter().enumerate() {
        println!("eta_{} = {eta:.6}", i + 1);
    }
    println!("sum    = {:.6}", report.shapley.iter().sum::<f64>());
    Ok(())
}
