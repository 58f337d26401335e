//! Shapley effects of a nonlinear model with correlated Gaussian inputs,
//! estimated by random permutations and double Monte Carlo.
//!
//! ```bash
//! cargo run --release -p shapley-lg --example mc_shapley
//! ```

use nalgebra::dmatrix;
use shapley_lg::{mc_shapley, BlackBoxModel, GaussianInput, McConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = GaussianInput::centered(dmatrix![
        1.0, 0.6, 0.0, 0.0;
        0.6, 1.0, 0.0, 0.0;
        0.0, 0.0, 1.0, -0.4;
        0.0, 0.0, -0.4, 1.0
    ])?;
    let f = BlackBoxModel::new(4, |x| x[0] * x[1] + x[2].sin() + 0.3 * x[3] * x[3]);
    let cfg = McConfig {
        m: 2000,
        n_var: 50_000,
        n_outer: 1,
        n_inner: 3,
        seed: 2024,
        ..McConfig::default()
    };
    println!("model evaluations: {}", cfg.evaluations(4));
    let est = mc_shapley(&f, &input, &cfg)?;
    let var = est.per_i_variance.unwrap_or_default();
    for (i, eta) in est.shapley_hat.iter().enumerate() {
        println!("eta_{} = {eta:.4} ± {:.4}", i + 1, var[i].sqrt());
    }
    println!("sum   = {:.6}", est.shapley_hat.iter().sum::<f64>());
    Ok(())
}
