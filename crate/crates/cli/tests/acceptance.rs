//! Runs every acceptance criterion and prints one PASS/FAIL line per item.
//! Uses its own `main` so the lines appear without `--nocapture`.

use std::process::ExitCode;

use flowlab_cli::verify::run_all;

fn main() -> ExitCode {
    let results = run_all();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.ok()).map(|r| r.id).collect();
    if results.len() != 12 || !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        return ExitCode::FAILURE;
    }
    println!("acceptance: {} of {} criteria passed", results.len(), results.len());
    ExitCode::SUCCESS
}
