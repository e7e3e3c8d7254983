//! Running a parsed experiment end to end.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use super::config::{ExperimentConfig, ExperimentKind};
use super::traces::{emit_traces, num, opt, Table};
use crate::ergodic::{
    default_schedule, generate_orbit, mean_sequence_with, projection_trace, verdict,
    AgreementBasis, MeanOptions, Verdict, VerdictStatus,
};
use crate::error::Result;
use crate::metric::{tol, GeodesicSpace, ViolationReport, Witness};
use crate::nonexpansive::MappingSpec;
use crate::semigroup::{
    check_monotone, check_semigroup_axioms, flow, semigroup_diagnostics, semigroup_verdict,
    SemigroupSpec,
};

/// Sampled pairs for the monotonicity check of a semigroup run.
const MONOTONE_PAIRS: usize = 1000;
/// Sampled tuples for the semigroup axiom checks.
const AXIOM_SAMPLES: usize = 20;

#[derive(Debug, Clone)]
pub struct RunReport {
    /// `ergodic` or `semigroup`.
    pub kind: &'static str,
    pub verdict: Verdict,
    pub final_residual: f64,
    pub agreement: f64,
    /// Smallest certificate margin over every mean of the run.
    pub worst_cert_gap: f64,
    /// Invariant checks made along the run.
    pub checks: Vec<ViolationReport>,
    pub tables: Vec<Table>,
    pub trace_files: Vec<PathBuf>,
    /// Not written to any trace, so traces stay reproducible.
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn violations(&self) -> impl Iterator<Item = &ViolationReport> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// 0 converged, 2 inconclusive, 3 an invariant was violated.
    pub fn exit_code(&self) -> i32 {
        if self.violations().next().is_some() {
            3
        } else if self.verdict.status == VerdictStatus::Converged {
            0
        } else {
            2
        }
    }

    pub fn summary(&self) -> String {
        let v = &self.verdict;
        let mut s = String::new();
        let _ = writeln!(s, "{} run: {}", self.kind, v.status.as_str());
        let _ = writeln!(s, "  limit candidate   {}", v.limit_candidate);
        let basis = match v.agreement_basis {
            AgreementBasis::ProjectionLimit => "distance to the projection limit",
            AgreementBasis::PreviousMean => "distance to the previous mean",
        };
        let _ = writeln!(s, "  agreement         {:e} ({basis})", self.agreement);
        let _ = writeln!(s, "  final residual    {:e}", self.final_residual);
        let _ = writeln!(s, "  tol_verdict       {}", v.tol_verdict);
        if let Some(at) = v.converged_at {
            let _ = writeln!(s, "  converged at      {at}");
        }
        let _ = writeln!(s, "  worst cert gap    {:e}", self.worst_cert_gap);
        for c in &self.checks {
            let _ = writeln!(s, "  {c}");
        }
        for p in &self.trace_files {
            let _ = writeln!(s, "  wrote {}", p.display());
        }
        let _ = writeln!(
            s,
            "  wall clock        {:.3}s",
            self.wall_clock.as_secs_f64()
        );
        s
    }
}

/// `10, 100, …` below the horizon, then the horizon itself.
pub fn default_times(horizon: f64) -> Vec<f64> {
    let mut t: Vec<f64> = std::iter::successors(Some(10.0f64), |t| Some(t * 10.0))
        .take_while(|&t| t < horizon)
        .collect();
    t.push(horizon);
    t
}

fn coord_header(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}_{i}")).collect()
}

fn gap_report(
    name: &str,
    tolerance: f64,
    values: impl Iterator<Item = (f64, f64)>,
) -> ViolationReport {
    let mut r = ViolationReport::new(name, tolerance);
    for (at, v) in values {
        r.record(v, || Witness {
            points: vec![],
            params: vec![at],
        });
    }
    r
}

fn verdict_table(v: &Verdict, final_residual: f64, worst_cert_gap: f64) -> Table {
    let mut t = Table::new("verdict.csv", vec!["key".into(), "value".into()]);
    let mut row = |k: &str, val: String| t.rows.push(vec![k.to_string(), val]);
    row("status", v.status.as_str().into());
    for (i, c) in v.limit_candidate.coords().iter().enumerate() {
        row(&format!("limit_{i}"), num(*c));
    }
    row("agreement", num(v.agreement));
    row(
        "agreement_basis",
        match v.agreement_basis {
            AgreementBasis::ProjectionLimit => "projection_limit".into(),
            AgreementBasis::PreviousMean => "previous_mean".into(),
        },
    );
    row("final_residual", num(final_residual));
    row("converged_at", opt(v.converged_at));
    row("tol_verdict", num(v.tol_verdict));
    row("worst_cert_gap", num(worst_cert_gap));
    t
}

/// One row per check: name, samples, worst violation, tolerance, count.
pub fn checks_table(checks: &[ViolationReport]) -> Table {
    let header = [
        "check",
        "samples",
        "worst_violation",
        "tolerance",
        "violations",
    ];
    let mut t = Table::new("checks.csv", header.iter().map(|h| h.to_string()).collect());
    for c in checks {
        t.rows.push(vec![
            c.check.clone(),
            c.samples_tested.to_string(),
            num(c.worst_violation),
            num(c.tolerance),
            c.violations.to_string(),
        ]);
    }
    t
}

/// Runs the experiment and, when `config.out` is set, writes its traces.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let clock = Instant::now();
    let mut report = match &config.kind {
        ExperimentKind::Ergodic {
            map,
            horizon,
            schedule,
            k_list,
        } => run_ergodic(config, map, *horizon, schedule.as_deref(), k_list)?,
        ExperimentKind::Semigroup {
            field,
            horizon,
            schedule,
            s_list,
            r,
            h,
        } => run_semigroup(config, field, *horizon, schedule.as_deref(), s_list, *r, *h)?,
    };
    if let Some(dir) = &config.out {
        report.trace_files = emit_traces(&report.tables, dir)?;
    }
    report.wall_clock = clock.elapsed();
    Ok(report)
}

fn run_ergodic(
    config: &ExperimentConfig,
    map_text: &str,
    horizon: usize,
    schedule: Option<&[usize]>,
    k_list: &[usize],
) -> Result<RunReport> {
    let space = config.space;
    let map = MappingSpec::parse(space, map_text)?;
    let start = space.point(config.start.clone())?;
    let orbit = generate_orbit(&map, &start, horizon)?;
    let schedule = schedule.map_or_else(|| default_schedule(horizon, k_list), <[usize]>::to_vec);
    let opts = MeanOptions {
        probe_seed: config.seed,
        ..MeanOptions::new(config.tol)
    };
    let (means, diag) = mean_sequence_with(&orbit, &schedule, k_list, &opts)?;
    let proj = match map.fixed_set() {
        Some(_) => Some(projection_trace(&orbit)?),
        None => None,
    };
    let v = verdict(&means, &diag, proj.as_ref(), config.tol_verdict)?;

    let worst_cert_gap = diag
        .records
        .iter()
        .map(|r| r.cert_gap)
        .fold(f64::INFINITY, f64::min);
    let mut checks = Vec::new();
    if let Some(b) = &orbit.boundedness {
        checks.push(b.clone());
    }
    if let Some(p) = &proj {
        checks.push(p.monotone.clone());
    }
    checks.push(gap_report(
        "mean certificates",
        tol::CERTIFICATE,
        diag.records.iter().map(|r| (r.n as f64, -r.cert_gap)),
    ));
    checks.push(gap_report(
        "convex hull proxy",
        tol::CONTRACT,
        diag.records.iter().map(|r| (r.n as f64, r.hull_gap)),
    ));
    if diag.records.iter().any(|r| r.fixed_point_excess.is_some()) {
        checks.push(gap_report(
            "means within d(x, p) of the fixed point",
            tol::CERTIFICATE,
            diag.records
                .iter()
                .filter_map(|r| r.fixed_point_excess.map(|e| (r.n as f64, e))),
        ));
    }

    let dim = space.coord_len();
    let mut header = vec!["n".to_string()];
    header.extend(coord_header("sigma", dim));
    header.push("residual".into());
    header.extend(k_list.iter().map(|k| format!("shift_gap_k{k}")));
    header.extend(["proj_dist", "cert_gap", "frechet_value"].map(String::from));
    let mut means_t = Table::new("means.csv", header);
    let mut diag_t = Table::new(
        "diagnostics.csv",
        ["n", "hull_gap", "fixed_point_excess"]
            .map(String::from)
            .to_vec(),
    );
    for (e, r) in means.entries.iter().zip(&diag.records) {
        let mut row = vec![e.n.to_string()];
        row.extend(e.mean.coords().iter().map(|c| num(*c)));
        row.push(num(r.residual));
        row.extend(r.shift_gaps.iter().map(|g| num(*g)));
        row.extend([
            opt(r.orbit_proj_dist),
            num(r.cert_gap),
            num(r.frechet_value),
        ]);
        means_t.rows.push(row);
        diag_t.rows.push(vec![
            r.n.to_string(),
            num(r.hull_gap),
            opt(r.fixed_point_excess),
        ]);
    }
    let mut tables = vec![means_t, diag_t];
    if let Some(p) = &proj {
        let mut header = vec!["n".to_string()];
        header.extend(coord_header("proj", dim));
        header.push("dist".into());
        let mut t = Table::new("projection.csv", header);
        for (i, (pt, d)) in p.points.iter().zip(&p.distances).enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(pt.coords().iter().map(|c| num(*c)));
            row.push(num(*d));
            t.rows.push(row);
        }
        tables.push(t);
    }
    tables.push(checks_table(&checks));
    tables.push(verdict_table(&v, v.residual, worst_cert_gap));
    Ok(RunReport {
        kind: "ergodic",
        final_residual: v.residual,
        agreement: v.agreement,
        verdict: v,
        worst_cert_gap,
        checks,
        tables,
        trace_files: Vec::new(),
        wall_clock: Duration::ZERO,
    })
}

fn run_semigroup(
    config: &ExperimentConfig,
    field: &str,
    horizon: f64,
    schedule: Option<&[f64]>,
    s_list: &[f64],
    r: f64,
    h: f64,
) -> Result<RunReport> {
    let space = config.space;
    let spec = SemigroupSpec::parse(space, field, h)?;
    let start = space.point(config.start.clone())?;
    let t_list = schedule.map_or_else(|| default_times(horizon), <[f64]>::to_vec);
    let t_max = t_list.iter().copied().fold(horizon, f64::max);
    let s_max = s_list.iter().copied().fold(0.0, f64::max);
    let curve = flow(&spec, &start, t_max + s_max)?;
    let diag = semigroup_diagnostics(&spec, &curve, &t_list, s_list, r)?;
    let v = semigroup_verdict(&diag, config.tol_verdict);

    let worst_cert_gap = diag
        .records
        .iter()
        .map(|r| r.cert_gap)
        .fold(f64::INFINITY, f64::min);
    let axioms = check_semigroup_axioms(&spec, config.seed, AXIOM_SAMPLES)?;
    let mut checks = vec![
        diag.projection_monotone.clone(),
        gap_report(
            "mean certificates",
            tol::CERTIFICATE,
            diag.records.iter().map(|r| (r.t, -r.cert_gap)),
        ),
        check_monotone(&spec, config.seed, MONOTONE_PAIRS, tol::CONTRACT),
    ];
    checks.extend(axioms.all().into_iter().cloned());

    let dim = space.coord_len();
    let mut header = vec!["T".to_string()];
    header.extend(coord_header("mean", dim));
    header.push("residual_r".into());
    header.extend(s_list.iter().map(|s| format!("shift_gap_s{s}")));
    header.extend(["proj_dist", "cert_gap"].map(String::from));
    let mut means_t = Table::new("means.csv", header);
    let mut diag_t = Table::new(
        "diagnostics.csv",
        ["T", "limit_dist", "state_residual"]
            .map(String::from)
            .to_vec(),
    );
    for rec in &diag.records {
        let mut row = vec![num(rec.t)];
        row.extend(rec.mean.coords().iter().map(|c| num(*c)));
        row.push(num(rec.residual_r));
        row.extend(rec.shift_gaps.iter().map(|g| num(*g)));
        row.extend([num(rec.proj_dist), num(rec.cert_gap)]);
        means_t.rows.push(row);
        diag_t.rows.push(vec![
            num(rec.t),
            num(rec.limit_dist),
            num(rec.state_residual),
        ]);
    }
    let tables = vec![
        means_t,
        diag_t,
        checks_table(&checks),
        verdict_table(&v, v.residual, worst_cert_gap),
    ];
    Ok(RunReport {
        kind: "semigroup",
        final_residual: v.residual,
        agreement: v.agreement,
        verdict: v,
        worst_cert_gap,
        checks,
        tables,
        trace_files: Vec::new(),
        wall_clock: Duration::ZERO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{parse_config, read_table};

    #[test]
    fn identity_converges_at_one() {
        let c = parse_config("space=euclidean:2\nmap=identity\nstart=(0.3,0.4)\nN=64").unwrap();
        let rep = run(&c).unwrap();
        assert_eq!(rep.verdict.status, VerdictStatus::Converged);
        assert_eq!(rep.verdict.converged_at, Some(1.0));
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn traces_are_deterministic_and_carry_the_report() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let text = "space=euclidean:2\nmap=rotation:theta=1.0\nstart=(1,0)\nN=10000\nseed=5";
        let mut c = parse_config(text).unwrap();
        c.out = Some(a.path().to_path_buf());
        let ra = run(&c).unwrap();
        c.out = Some(b.path().to_path_buf());
        let rb = run(&c).unwrap();
        assert_eq!(ra.trace_files.len(), rb.trace_files.len());
        for (pa, pb) in ra.trace_files.iter().zip(&rb.trace_files) {
            assert_eq!(
                std::fs::read(pa).unwrap(),
                std::fs::read(pb).unwrap(),
                "{}",
                pa.display()
            );
        }
        let means = read_table(&a.path().join("means.csv")).unwrap();
        assert_eq!(means.rows.len(), 14);
        assert!(means.column("shift_gap_k1").is_some() && means.column("shift_gap_k8").is_some());
        assert!(means.rows.iter().all(|r| r.iter().all(|c| !c.is_empty())));

        let v = read_table(&a.path().join("verdict.csv")).unwrap();
        assert_eq!(v.lookup("status"), Some("converged"));
        assert_eq!(
            v.lookup("agreement").unwrap().parse::<f64>().unwrap(),
            ra.agreement
        );
        assert_eq!(
            v.lookup("final_residual").unwrap().parse::<f64>().unwrap(),
            ra.final_residual
        );
        assert_eq!(
            v.lookup("worst_cert_gap").unwrap().parse::<f64>().unwrap(),
            ra.worst_cert_gap
        );
        assert!(ra.agreement <= 3e-4);
    }

    #[test]
    fn semigroup_skew_run() {
        let text = "space=euclidean:2\nfield=skew2d\nstart=(1,0)\nT=1000";
        let rep = run(&parse_config(text).unwrap()).unwrap();
        assert_eq!(
            rep.verdict.status,
            VerdictStatus::Converged,
            "{}",
            rep.summary()
        );
        assert!(rep.agreement <= 1e-2);
        assert_eq!(rep.exit_code(), 0, "{}", rep.summary());
        assert_eq!(rep.tables[0].rows.len(), 3);
        assert_eq!(default_times(20.0), vec![10.0, 20.0]);
        assert_eq!(default_times(5.0), vec![5.0]);
    }

    #[test]
    fn expansive_field_is_a_violation() {
        let text = "space=euclidean:2\nfield=decay:-0.01\nstart=(1,0)\nT=20";
        let rep = run(&parse_config(text).unwrap()).unwrap();
        assert_eq!(rep.exit_code(), 3);
    }
}
