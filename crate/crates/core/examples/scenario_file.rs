// Define a Monte Carlo scenario in TOML, run it and round-trip the CSV report.

use weak_moments::simharness::{run_scenario, McReport, ScenarioFile};

const SCENARIO: &str = r#"
name = "t5-demo"
description = "t5 location-scale, clean and with a far shift"
family = "t"
nu = 5.0
theta = [0.0, 1.0]
sample_sizes = [200]
replications = 30
seed = 9

[[settings]]
label = "clean"

[[settings]]
label = "shifted"
epsilon = 0.05
contaminant = [10.0, 1.0]

[[estimators]]
label = "GMM-2S"
method = "gmm-2s"
moments = ["1", "2"]

[[estimators]]
label = "MLE"
method = "mle"
"#;

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let file = ScenarioFile::parse(SCENARIO)?;
    let report = run_scenario(&file.build()?)?;
    let csv = report.to_csv()?;
    print!("{csv}");
    let back = McReport::from_csv(&csv)?;
    if back.rows.len() != report.rows.len() {
        return Err("CSV round trip lost rows".into());
    }
    Ok(())
}
