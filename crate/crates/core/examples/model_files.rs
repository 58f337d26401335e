//! Model and report files: generate an instance, write it, read it back and
//! emit the report the `compute` command would produce.
//!
//! ```bash
//! cargo run -p shapley-lg --example model_files
//! ```

use shapley_lg::io::{from_json_str, to_json_string, ModelFile, ReportFile};
use shapley_lg::{generate_random_instance, lg_indices};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = generate_random_instance(2, 1);
    let text = to_json_string(&ModelFile::from_model(&model))?;
    println!("model file:\n{text}");

    let back: ModelFile = from_json_str(&text)?;
    let model_back = back.to_model()?;
    assert_eq!(model_back, model);

    let report = ReportFile::from_report(&lg_indices(&model_back)?, "lg-indices");
    report.validate()?;
    println!("report file:\n{}", to_json_string(&report)?);
    Ok(())
}
