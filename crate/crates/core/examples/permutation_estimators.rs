//! Exact permutation enumeration against the random-permutation estimator,
//! and the coefficient of variation of the latter as `m` grows.
//!
//! ```bash
//! cargo run -p shapley-lg --example permutation_estimators
//! ```

use shapley_lg::{
    cv_experiment, exact_permutation_shapley, generate_random_instance, lg_indices,
    random_permutation_shapley,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = generate_random_instance(5, 7);
    let lg = lg_indices(&model)?.shapley;
    let exact = exact_permutation_shapley(&model)?;
    let est = random_permutation_shapley(&model, 200, 1)?;
    let var = est.per_i_variance.clone().unwrap_or_default();

    println!("{:<4} {:>10} {:>12} {:>14}", "i", "LG", "exact perm", "random (m=200)");
    for i in 0..model.p() {
        println!(
            "{:<4} {:>10.6} {:>12.6} {:>8.6} ± {:.4}",
            i + 1,
            lg[i],
            exact[i],
            est.shapley_hat[i],
            var.get(i).map_or(f64::NAN, |v| v.sqrt())
        );
    }

    println!();
    println!("{:>6} {:>10}", "m", "mean CV %");
    for m in [25, 100, 400, 1600] {
        let cv = cv_experiment(&model, m, 200, 11)?;
        println!("{m:>6} {:>10.3}", cv.mean_cv);
    }
    Ok(())
}
