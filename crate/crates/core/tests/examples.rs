#[allow(dead_code)]
mod weak_moments_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/weak_moments.rs"));
}

#[test]
fn weak_moments_example_runs() {
    weak_moments_example::run_example().expect("weak_moments example should run");
}

#[allow(dead_code)]
mod estimate_cauchy_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/estimate_cauchy.rs"));
}

#[test]
fn estimate_cauchy_example_runs() {
    estimate_cauchy_example::run_example().expect("estimate_cauchy example should run");
}

#[allow(dead_code)]
mod contamination_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contamination.rs"));
}

#[test]
fn contamination_example_runs() {
    contamination_example::run_example().expect("contamination example should run");
}

#[allow(dead_code)]
mod bivariate_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bivariate.rs"));
}

#[test]
fn bivariate_example_runs() {
    bivariate_example::run_example().expect("bivariate example should run");
}

#[allow(dead_code)]
mod influence_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/influence.rs"));
}

#[test]
fn influence_example_runs() {
    influence_example::run_example().expect("influence example should run");
}

#[allow(dead_code)]
mod sandwich_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sandwich.rs"));
}

#[test]
fn sandwich_example_runs() {
    sandwich_example::run_example().expect("sandwich example should run");
}

#[allow(dead_code)]
mod reconstruction_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reconstruction.rs"));
}

#[test]
fn reconstruction_example_runs() {
    reconstruction_example::run_example().expect("reconstruction example should run");
}

#[allow(dead_code)]
mod monte_carlo_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/monte_carlo.rs"));
}

#[test]
fn monte_carlo_example_runs() {
    monte_carlo_example::run_example().expect("monte_carlo example should run");
}

#[allow(dead_code)]
mod scenario_file_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenario_file.rs"));
}

#[test]
fn scenario_file_example_runs() {
    scenario_file_example::run_example().expect("scenario_file example should run");
}

#[allow(dead_code)]
mod command_line_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/command_line.rs"));
}

#[test]
fn command_line_example_runs() {
    command_line_example::run_example().expect("command_line example should run");
}
