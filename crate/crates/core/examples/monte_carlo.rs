// A small, seeded run of a built-in Monte Carlo scenario.

use weak_moments::simharness::{builtin_scenario, run_scenario, ReportFormat};

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = builtin_scenario("table2")
        .ok_or("missing scenario")?
        .with_replications(40)
        .with_sample_sizes(vec![100, 500])
        .with_seed(42);
    let report = run_scenario(&scenario)?;
    print!("{}", report.render(ReportFormat::Markdown)?);
    if let Some(row) = report.get("contaminated", "Median", 500, "mu") {
        println!("median bias at n = 500: {:+.3}", row.bias);
    }
    Ok(())
}
