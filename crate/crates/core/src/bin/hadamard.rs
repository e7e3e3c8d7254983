//! Command-line front end: geometry checks, one-off Karcher means and
//! config-driven ergodic and semigroup runs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hadamard_ergodic::experiment::{
    checks_table, emit_traces, parse_config, read_table, run, ExperimentKind, Table,
};
use hadamard_ergodic::frechet::{karcher_mean, FrechetProblem};
use hadamard_ergodic::metric::{geometry_suite, tol, ViolationReport};
use hadamard_ergodic::spaces::CircleArc;
use hadamard_ergodic::{Error, SpaceHandle};

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hadamard",
    version,
    about = "Karcher-mean ergodic averages on Hadamard spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// RNG seed for samplers and certificate probes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Violation tolerance for `verify-space`, solver tolerance otherwise.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for CSV traces.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `geometric` or a comma-separated list of n (or T) values.
    #[arg(long, global = true)]
    schedule: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the metric, geodesic, CAT(0), Cauchy-Schwarz, quasi-inner and
    /// Q4-bar checks. `circle` selects the positively curved control space.
    VerifySpace {
        space: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Karcher mean of the points in a file (one `x, y` per line, optional `; w`).
    Mean { space: SpaceHandle, points: PathBuf },
    /// Mean sequence of a nonexpansive map's orbit.
    Ergodic { config: PathBuf },
    /// Time averages of a semigroup trajectory.
    Semigroup { config: PathBuf },
    /// Summarize the traces in a directory.
    Report { dir: PathBuf },
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(run_error_code(&e))
        }
    }
}

fn run_error_code(e: &Error) -> u8 {
    match e {
        Error::CertificateFailed { .. }
        | Error::StepInstability { .. }
        | Error::BoundaryExcursion { .. } => EXIT_VIOLATION,
        Error::NonConvergence { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let seed = cli.seed;
    match cli.command {
        Command::VerifySpace { space, samples } => {
            let tolerance = cli.tol.unwrap_or(tol::CONTRACT);
            let seed = seed.unwrap_or(1);
            let reports = if space == "circle" {
                geometry_suite(&CircleArc, seed, samples, tolerance)?
            } else {
                let s: SpaceHandle = space
                    .parse()
                    .map_err(|e: Error| Failure::Usage(e.to_string()))?;
                geometry_suite(&s, seed, samples, tolerance)?
            };
            println!("{space}: {samples} samples per check, seed {seed}");
            for r in &reports {
                println!("  {r}");
                if let Some(w) = &r.witness {
                    let pts: Vec<String> = w.points.iter().map(ToString::to_string).collect();
                    println!("    witness {} params {:?}", pts.join(" "), w.params);
                }
            }
            if let Some(dir) = &cli.out {
                write(&[checks_table(&reports)], dir)?;
            }
            Ok(if reports.iter().all(ViolationReport::passed) {
                0
            } else {
                EXIT_VIOLATION
            })
        }
        Command::Mean { space, points } => {
            let text = read(&points)?;
            let problem = FrechetProblem::parse_points(space, &text)?;
            let (mean, cert) = karcher_mean(&problem, cli.tol.unwrap_or(1e-10))?;
            println!("mean              {mean}");
            println!("frechet value     {}", cert.functional_value);
            println!("worst gap         {:e}", cert.worst_gap);
            println!("worst slack       {:e}", cert.worst_slack);
            println!("probes            {}", cert.probes);
            if let Some(dir) = &cli.out {
                let mut header: Vec<String> = (0..mean.coords().len())
                    .map(|i| format!("mean_{i}"))
                    .collect();
                header.extend(
                    ["frechet_value", "worst_gap", "worst_slack", "probes"].map(String::from),
                );
                let mut t = Table::new("mean.csv", header);
                let mut row: Vec<String> = mean.coords().iter().map(|c| c.to_string()).collect();
                row.extend([
                    cert.functional_value.to_string(),
                    cert.worst_gap.to_string(),
                    cert.worst_slack.to_string(),
                    cert.probes.to_string(),
                ]);
                t.rows.push(row);
                write(&[t], dir)?;
            }
            Ok(if cert.passes() { 0 } else { EXIT_VIOLATION })
        }
        Command::Ergodic { config } => experiment(
            &config,
            false,
            &cli.out,
            seed,
            cli.tol,
            cli.schedule.as_deref(),
        ),
        Command::Semigroup { config } => experiment(
            &config,
            true,
            &cli.out,
            seed,
            cli.tol,
            cli.schedule.as_deref(),
        ),
        Command::Report { dir } => report(&dir),
    }
}

fn experiment(
    path: &Path,
    semigroup: bool,
    out: &Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
    schedule: Option<&str>,
) -> Result<u8, Failure> {
    let text = read(path)?;
    let mut config =
        parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let is_semigroup = matches!(config.kind, ExperimentKind::Semigroup { .. });
    if is_semigroup != semigroup {
        let expected = if semigroup { "a `field`" } else { "a `map`" };
        return Err(Failure::Usage(format!(
            "{} does not describe {expected} experiment",
            path.display()
        )));
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        config.tol = t;
    }
    if let Some(s) = schedule {
        config = config
            .with_schedule(s)
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if out.is_some() {
        config.out = out.clone();
    }
    let rep = run(&config)?;
    print!("{}", rep.summary());
    Ok(rep.exit_code() as u8)
}

fn report(dir: &Path) -> Result<u8, Failure> {
    let mut code = 0;
    let verdict = dir.join("verdict.csv");
    if verdict.exists() {
        let t = read_table(&verdict)?;
        for row in &t.rows {
            println!("{:<18}{}", row[0], row.get(1).map_or("", String::as_str));
        }
        if t.lookup("status") != Some("converged") {
            code = EXIT_INCONCLUSIVE;
        }
    }
    let checks = dir.join("checks.csv");
    if checks.exists() {
        let t = read_table(&checks)?;
        let col = t.column("violations").ok_or_else(|| {
            Failure::Usage(format!("{}: no `violations` column", checks.display()))
        })?;
        for row in &t.rows {
            let failed = row[col] != "0";
            let fields: Vec<String> = t
                .header
                .iter()
                .zip(row)
                .skip(1)
                .map(|(h, v)| format!("{h}={v}"))
                .collect();
            println!(
                "[{}] {:<32}{}",
                if failed { "FAIL" } else { "ok" },
                row[0],
                fields.join("  ")
            );
            if failed {
                code = EXIT_VIOLATION;
            }
        }
    }
    if !verdict.exists() && !checks.exists() {
        return Err(Failure::Usage(format!(
            "{}: no verdict.csv or checks.csv",
            dir.display()
        )));
    }
    Ok(code)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|source| {
        Failure::Run(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn write(tables: &[Table], dir: &Path) -> Result<(), Failure> {
    for p in emit_traces(tables, dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
