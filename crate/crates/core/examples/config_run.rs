//! Parses an experiment description, runs it and writes its CSV traces.
//!
//! `cargo run --example config_run -- configs/river.cfg /tmp/river`

use std::path::PathBuf;

use hadamard_ergodic::experiment::{parse_config, run, serialize_config};

const DEFAULT: &str = "
[run]
space = euclidean:2
map = rotation:theta=1.0
start = (1, 0)
N = 1024
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let mut config = parse_config(&text)?;
    config.out = args.next().map(PathBuf::from).or(config.out);
    println!("{}", serialize_config(&config));

    let report = run(&config)?;
    print!("{}", report.summary());
    std::process::exit(report.exit_code());
}
