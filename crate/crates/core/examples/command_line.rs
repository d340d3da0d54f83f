// Drive the `weakmom` command line in-process.

use weak_moments::cli;

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("weakmom-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let data = dir.join("sample.txt");
    std::fs::write(&data, weak_moments::ParametricModel::cauchy(1.0).sample(300, 2).to_text())?;
    let data = data.to_string_lossy().into_owned();

    let commands: Vec<Vec<&str>> = vec![
        vec!["weakmom", "estimate", &data, "--method", "gmm-2s", "--j", "1,2"],
        vec!["weakmom", "diagnose", "--family", "cauchy", "--theta", "0"],
        vec!["weakmom", "reconstruct", "--synthetic", "normal", "--lambda", "1e-5"],
        vec!["weakmom", "scenarios"],
    ];
    for args in commands {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(&args, &mut out, &mut err);
        println!("$ {}\n{}", args[1..].join(" "), String::from_utf8_lossy(&out));
        if code != cli::EXIT_OK {
            return Err(format!("`{}` exited with {code}: {}", args[1], String::from_utf8_lossy(&err)).into());
        }
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
