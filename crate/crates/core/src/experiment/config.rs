//! Experiment description files.
//!
//! The format is flat `key = value` lines grouped under optional section
//! headers. Blank lines and lines starting with `#` are ignored. Keys placed
//! before the first header may come from any section.
//!
//! ```text
//! [run]
//! space = euclidean:2
//! map = rotation:theta=1.0      # or: field = skew2d
//! start = (1, 0)
//! N = 10000                     # or: T = 1000 for a semigroup
//! seed = 7
//!
//! [means]
//! schedule = 100, 1000, 10000   # default: geometric
//! k_list = 1, 8                 # semigroups use s_list, r and h
//! tol = 1e-10
//!
//! [verdict]
//! tol_verdict = 0.01
//!
//! [output]
//! out = traces/rotation
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::ergodic::{DEFAULT_K_LIST, DEFAULT_TOL_VERDICT};
use crate::error::{Error, Result};
use crate::metric::GeodesicSpace;
use crate::nonexpansive::MappingSpec;
use crate::semigroup::SemigroupSpec;
use crate::spaces::SpaceHandle;
use crate::text::{format_tuple, parse_tuple};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_R: f64 = 1.0;
pub const DEFAULT_S_LIST: [f64; 2] = [1.0, 8.0];

const SECTIONS: [(&str, &[&str]); 4] = [
    ("run", &["space", "map", "field", "start", "N", "T", "seed"]),
    ("means", &["schedule", "k_list", "s_list", "r", "h", "tol"]),
    ("verdict", &["tol_verdict"]),
    ("output", &["out"]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentKind {
    /// Orbit of a nonexpansive map.
    Ergodic {
        map: String,
        horizon: usize,
        /// Explicit `n` values; `None` for the geometric default.
        schedule: Option<Vec<usize>>,
        k_list: Vec<usize>,
    },
    /// Flow of a monotone field.
    Semigroup {
        field: String,
        horizon: f64,
        /// Explicit `T` values; `None` for `10, 100, …` up to the horizon.
        schedule: Option<Vec<f64>>,
        s_list: Vec<f64>,
        r: f64,
        h: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub space: SpaceHandle,
    pub kind: ExperimentKind,
    pub start: Vec<f64>,
    pub seed: u64,
    /// Karcher solver tolerance.
    pub tol: f64,
    pub tol_verdict: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Replaces the schedule with `geometric` (the default) or a
    /// comma-separated list of `n` or `T` values.
    pub fn with_schedule(mut self, text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidProblem(format!("malformed schedule `{text}`"));
        match &mut self.kind {
            ExperimentKind::Ergodic { schedule, .. } => {
                *schedule = match text {
                    "geometric" => None,
                    _ => Some(
                        text.split(',')
                            .map(|t| t.trim().parse())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|_| bad())?,
                    ),
                }
            }
            ExperimentKind::Semigroup { schedule, .. } => {
                *schedule = match text {
                    "geometric" => None,
                    _ => Some(
                        text.split(',')
                            .map(|t| t.trim().parse())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|_| bad())?,
                    ),
                }
            }
        }
        Ok(self)
    }
}

struct Entry {
    line: usize,
    column: usize,
    value: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        column,
        message: message.into(),
    }
}

/// Parses and validates a config. Errors point at the offending line and
/// column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: Vec<(String, Entry)> = Vec::new();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, indent + 1, "unterminated section header"))?
                .trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .map(|(s, _)| *s)
                    .ok_or_else(|| err(line, indent + 2, format!("unknown section `{name}`")))?,
            );
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, indent + 1, "expected `key = value`"))?;
        let key = key.trim();
        let eq = content.find('=').unwrap();
        let value_col = eq + 2 + (value.len() - value.trim_start().len());
        let home = SECTIONS
            .iter()
            .find(|(_, keys)| keys.contains(&key))
            .map(|(s, _)| *s);
        match (home, section) {
            (None, _) => return Err(err(line, indent + 1, format!("unknown key `{key}`"))),
            (Some(h), Some(s)) if h != s => {
                return Err(err(
                    line,
                    indent + 1,
                    format!("key `{key}` belongs in section [{h}]"),
                ))
            }
            _ => {}
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(err(line, indent + 1, format!("duplicate key `{key}`")));
        }
        entries.push((
            key.to_string(),
            Entry {
                line,
                column: value_col,
                value: value.trim().to_string(),
            },
        ));
    }
    build(&entries)
}

fn build(entries: &[(String, Entry)]) -> Result<ExperimentConfig> {
    let get = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, e)| e);
    let at =
        |e: &Entry, key: &str, msg: String| err(e.line, e.column, format!("key `{key}`: {msg}"));
    let missing = |key: &str| err(0, 0, format!("missing required key `{key}`"));
    let number = |key: &str| -> Result<Option<f64>> {
        get(key)
            .map(|e| {
                e.value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| at(e, key, format!("malformed number `{}`", e.value)))
            })
            .transpose()
    };
    let integer = |key: &str| -> Result<Option<u64>> {
        get(key)
            .map(|e| {
                e.value
                    .parse::<u64>()
                    .map_err(|_| at(e, key, format!("malformed integer `{}`", e.value)))
            })
            .transpose()
    };
    fn list<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<Vec<T>> {
        if e.value.is_empty() {
            return Ok(Vec::new());
        }
        e.value
            .split(',')
            .map(|t| t.trim().parse::<T>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                err(
                    e.line,
                    e.column,
                    format!("key `{key}`: malformed list `{}`", e.value),
                )
            })
    }

    let space_e = get("space").ok_or_else(|| missing("space"))?;
    let space: SpaceHandle = space_e
        .value
        .parse()
        .map_err(|x: Error| at(space_e, "space", x.to_string()))?;

    let start_e = get("start").ok_or_else(|| missing("start"))?;
    let start = parse_tuple(&start_e.value).ok_or_else(|| {
        at(
            start_e,
            "start",
            format!("malformed point `{}`", start_e.value),
        )
    })?;
    space
        .point(start.clone())
        .map_err(|x| at(start_e, "start", x.to_string()))?;

    let seed = integer("seed")?.unwrap_or(DEFAULT_SEED);
    let tol = number("tol")?.unwrap_or(DEFAULT_TOL);
    if tol <= 0.0 {
        return Err(at(get("tol").unwrap(), "tol", "must be positive".into()));
    }
    let tol_verdict = number("tol_verdict")?.unwrap_or(DEFAULT_TOL_VERDICT);
    if tol_verdict <= 0.0 {
        return Err(at(
            get("tol_verdict").unwrap(),
            "tol_verdict",
            "must be positive".into(),
        ));
    }
    let out = get("out").map(|e| PathBuf::from(&e.value));

    let schedule_e = get("schedule").filter(|e| e.value != "geometric");
    let forbid = |keys: &[&str], kind: &str| -> Result<()> {
        for key in keys {
            if let Some(e) = get(key) {
                return Err(at(e, key, format!("not used by {kind} experiments")));
            }
        }
        Ok(())
    };

    let kind = match (get("map"), get("field")) {
        (Some(m), None) => {
            forbid(&["T", "s_list", "r", "h"], "ergodic")?;
            MappingSpec::parse(space, &m.value).map_err(|x| at(m, "map", x.to_string()))?;
            let n_e = get("N").ok_or_else(|| missing("N"))?;
            let horizon = integer("N")?.unwrap() as usize;
            if horizon == 0 {
                return Err(at(n_e, "N", "must be at least 1".into()));
            }
            let k_list = match get("k_list") {
                Some(e) => list::<usize>(e, "k_list")?,
                None => DEFAULT_K_LIST.to_vec(),
            };
            let schedule = schedule_e
                .map(|e| list::<usize>(e, "schedule"))
                .transpose()?;
            ExperimentKind::Ergodic {
                map: m.value.clone(),
                horizon,
                schedule,
                k_list,
            }
        }
        (None, Some(f)) => {
            forbid(&["N", "k_list"], "semigroup")?;
            let h = number("h")?.unwrap_or(DEFAULT_STEP);
            SemigroupSpec::parse(space, &f.value, h).map_err(|x| at(f, "field", x.to_string()))?;
            let t_e = get("T").ok_or_else(|| missing("T"))?;
            let horizon = number("T")?.unwrap();
            if horizon <= 0.0 {
                return Err(at(t_e, "T", "must be positive".into()));
            }
            let r = number("r")?.unwrap_or(DEFAULT_R);
            if r <= 0.0 {
                return Err(at(get("r").unwrap(), "r", "must be positive".into()));
            }
            let s_list = match get("s_list") {
                Some(e) => list::<f64>(e, "s_list")?,
                None => DEFAULT_S_LIST.to_vec(),
            };
            let schedule = schedule_e.map(|e| list::<f64>(e, "schedule")).transpose()?;
            ExperimentKind::Semigroup {
                field: f.value.clone(),
                horizon,
                schedule,
                s_list,
                r,
                h,
            }
        }
        (Some(_), Some(f)) => {
            return Err(at(
                f,
                "field",
                "give either `map` or `field`, not both".into(),
            ))
        }
        (None, None) => return Err(missing("map` or `field")),
    };
    Ok(ExperimentConfig {
        space,
        kind,
        start,
        seed,
        tol,
        tol_verdict,
        out,
    })
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text form; parsing it gives back an equal config.
pub fn serialize_config(config: &ExperimentConfig) -> String {
    let mut s = String::from("[run]\n");
    let _ = writeln!(s, "space = {}", config.space);
    match &config.kind {
        ExperimentKind::Ergodic { map, horizon, .. } => {
            let _ = writeln!(s, "map = {map}");
            let _ = writeln!(s, "start = {}", format_tuple(&config.start));
            let _ = writeln!(s, "N = {horizon}");
        }
        ExperimentKind::Semigroup { field, horizon, .. } => {
            let _ = writeln!(s, "field = {field}");
            let _ = writeln!(s, "start = {}", format_tuple(&config.start));
            let _ = writeln!(s, "T = {horizon}");
        }
    }
    let _ = writeln!(s, "seed = {}\n\n[means]", config.seed);
    match &config.kind {
        ExperimentKind::Ergodic {
            schedule, k_list, ..
        } => {
            let _ = writeln!(
                s,
                "schedule = {}",
                schedule.as_deref().map_or("geometric".into(), join)
            );
            let _ = writeln!(s, "k_list = {}", join(k_list));
        }
        ExperimentKind::Semigroup {
            schedule,
            s_list,
            r,
            h,
            ..
        } => {
            let _ = writeln!(
                s,
                "schedule = {}",
                schedule.as_deref().map_or("geometric".into(), join)
            );
            let _ = writeln!(s, "s_list = {}", join(s_list));
            let _ = writeln!(s, "r = {r}");
            let _ = writeln!(s, "h = {h}");
        }
    }
    let _ = writeln!(
        s,
        "tol = {}\n\n[verdict]\ntol_verdict = {}",
        config.tol, config.tol_verdict
    );
    if let Some(out) = &config.out {
        let _ = writeln!(s, "\n[output]\nout = {}", out.display());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "space=euclidean:2\nmap=rotation:theta=1.0\nstart=(1,0)\nN=1024\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.space, SpaceHandle::euclidean(2));
        assert_eq!(c.start, vec![1.0, 0.0]);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.tol, DEFAULT_TOL);
        assert_eq!(c.tol_verdict, DEFAULT_TOL_VERDICT);
        assert_eq!(c.out, None);
        assert_eq!(
            c.kind,
            ExperimentKind::Ergodic {
                map: "rotation:theta=1.0".into(),
                horizon: 1024,
                schedule: None,
                k_list: vec![1, 8],
            }
        );
    }

    #[test]
    fn round_trip() {
        let semigroup = "\
# rotation flow
[run]
space = euclidean:2
field = skew2d
start = (1, 0)
T = 1000
seed = 3

[means]
schedule = 10, 100, 1000
s_list = 1, 8
h = 0.01

[output]
out = traces/skew
";
        for text in [MINIMAL, semigroup] {
            let c = parse_config(text).unwrap();
            let again = parse_config(&serialize_config(&c)).unwrap();
            assert_eq!(c, again);
            assert_eq!(serialize_config(&again), serialize_config(&c));
        }
    }

    #[test]
    fn errors_name_key_and_position() {
        let text = "space = euclidean:2\nmap = rotation:theta=abc\nstart=(1,0)\nN=10\n";
        match parse_config(text) {
            Err(Error::Config {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (2, 7));
                assert!(message.contains("`map`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let cases = [
            ("space=sphere\nmap=identity\nstart=(0)\nN=1", 1, "space"),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,x)\nN=1",
                3,
                "start",
            ),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,0)\nN=ten",
                4,
                "N",
            ),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,0)\nN=1\ncolour=red",
                5,
                "colour",
            ),
            ("[verdict]\nspace=euclidean:2", 2, "space"),
            ("[plot]", 1, "plot"),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,0)\nN=1\nN=2",
                5,
                "N",
            ),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,0)\nN=1\nh=0.1",
                5,
                "h",
            ),
            (
                "space=euclidean:2\nmap=identity\nstart=(0,0)\nN=1\nk_list=1,x",
                5,
                "k_list",
            ),
        ];
        for (text, want_line, needle) in cases {
            match parse_config(text) {
                Err(Error::Config { line, message, .. }) => {
                    assert_eq!(line, want_line, "{text}: {message}");
                    assert!(message.contains(needle), "{text}: {message}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_config("space=euclidean:2\nstart=(0,0)\nN=1"),
            Err(Error::Config { line: 0, .. })
        ));
    }

    #[test]
    fn schedule_override() {
        let c = parse_config("space=euclidean:2\nmap=identity\nstart=(0,0)\nN=100").unwrap();
        let c = c.with_schedule("10, 100").unwrap();
        assert!(
            matches!(&c.kind, ExperimentKind::Ergodic { schedule: Some(s), .. } if s == &[10, 100])
        );
        let c = c.with_schedule("geometric").unwrap();
        assert!(matches!(
            &c.kind,
            ExperimentKind::Ergodic { schedule: None, .. }
        ));
        assert!(c.with_schedule("1.5").is_err());
    }
}
