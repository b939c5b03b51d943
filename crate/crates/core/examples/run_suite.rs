//! Runs one verification suite and prints the JSON report.
//!
//! `cargo run --example run_suite -- weights`

use rlct::suite::{exit_code, report_value, run_suite, to_pretty, SuiteConfig};

fn main() -> rlct::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "embeddings".to_string());
    let cfg = SuiteConfig::new(name, 3);
    let checks = run_suite(&cfg)?;
    print!("{}", to_pretty(&report_value(&cfg, &checks)));
    std::process::exit(exit_code(&checks));
}
