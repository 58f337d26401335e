//! Black-box models written in the small expression language used by the
//! `mc` command.
//!
//! ```bash
//! cargo run --release -p shapley-lg --example expression_model
//! ```

use nalgebra::DMatrix;
use shapley_lg::expr::parse_program;
use shapley_lg::{mc_shapley, GaussianInput, McConfig};

const SOURCE: &str = "
# a scaled-down version of a classic test function
z = x1^2 + 1.2*x2^2 + 1.4*x3^2 + 1.6*x4^2 + 1.8*x5^2 + 2*x6^2
f = cos(z) + z - 100 + 0.2*sin(10*z)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let program = parse_program(SOURCE)?;
    let p = program.max_input;
    let f = program.output_model(p).expect("the source defines f");
    let input = GaussianInput::centered(DMatrix::identity(p, p))?;
    println!("f(1, ..., 1) = {:.6}", f.eval(&vec![1.0; p]));

    let est = mc_shapley(&f, &input, &McConfig { m: 500, seed: 1, ..McConfig::default() })?;
    for (i, eta) in est.shapley_hat.iter().enumerate() {
        println!("eta_{} = {eta:.4}", i + 1);
    }

    match parse_program("f = cos(x1 +") {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
    Ok(())
}
