// Driving the command-line verbs from code: a configuration file, a kernel
// run, eigenvalues and the verification table.
//
// ```bash
// cargo run --example command_line
// ```

use std::fs;
use std::io;

use transmutation::cli;

pub fn run_example() -> transmutation::Result<()> {
    let dir = std::env::temp_dir().join(format!("transmutation-example-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let config = dir.join("run.cfg");
    fs::write(
        &config,
        "# unit potential\na = 1\nn = 400\npotential = const:1\nk_max = 64\nlambdas = -5\n",
    )?;
    let cfg = config.to_string_lossy().into_owned();
    let out = dir.to_string_lossy().into_owned();

    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    for verb in ["kernel", "eig", "verify"] {
        let code = cli::run(["transmutation", verb, "--config", &cfg, "--out", &out], &mut stdout, &mut stderr);
        println!("`{verb}` exited with {code}");
    }
    print!("{}", fs::read_to_string(dir.join("eigenvalues.csv"))?);
    fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("command_line example failed");
}
