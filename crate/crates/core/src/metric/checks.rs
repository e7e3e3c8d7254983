//! Sampling checks for the metric inequalities a Hadamard space must satisfy.
//!
//! Every check returns a [`ViolationReport`] whose `worst_violation` is the
//! largest observed excess `lhs − rhs` of the tested inequality (negative when
//! every sample holds with room to spare). A sample counts as a violation only
//! when its excess exceeds the report tolerance.

use std::fmt;

use rand::Rng;

use super::{quasi_inner_coords, seeded_rng, GeodesicSpace, Point, SpaceId};
use crate::error::{Error, Result};

/// The offending tuple of a failed sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub points: Vec<Point>,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub check: String,
    pub samples_tested: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub violations: usize,
    /// Tuple attaining `worst_violation`, recorded only when it exceeds the
    /// tolerance.
    pub witness: Option<Witness>,
}

impl ViolationReport {
    pub fn new(check: impl Into<String>, tolerance: f64) -> Self {
        ViolationReport {
            check: check.into(),
            samples_tested: 0,
            worst_violation: f64::NEG_INFINITY,
            tolerance,
            violations: 0,
            witness: None,
        }
    }

    /// Records one sample. `witness` is only built when the sample becomes
    /// the new worst offender beyond tolerance.
    pub fn record(&mut self, excess: f64, witness: impl FnOnce() -> Witness) {
        self.samples_tested += 1;
        let excess = if excess.is_nan() {
            f64::INFINITY
        } else {
            excess
        };
        if excess > self.tolerance {
            self.violations += 1;
        }
        if excess > self.worst_violation {
            self.worst_violation = excess;
            if excess > self.tolerance {
                self.witness = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Combines two reports of the same check.
    pub fn merge(mut self, other: ViolationReport) -> ViolationReport {
        self.samples_tested += other.samples_tested;
        self.violations += other.violations;
        if other.worst_violation > self.worst_violation {
            self.worst_violation = other.worst_violation;
            self.witness = other.witness;
        }
        self
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {:>7} samples  worst {:>+11.3e}  tol {:.0e}  {}",
            self.check,
            self.samples_tested,
            self.worst_violation,
            self.tolerance,
            if self.passed() {
                "ok".to_string()
            } else {
                format!("{} VIOLATIONS", self.violations)
            }
        )
    }
}

fn witness(id: SpaceId, pts: &[&[f64]], params: &[f64]) -> Witness {
    Witness {
        points: pts
            .iter()
            .map(|c| Point::from_raw(id, c.to_vec()))
            .collect(),
        params: params.to_vec(),
    }
}

/// Strong convexity of `d²(y, ·)` along geodesics:
/// `d²(y,x_t) ≤ (1−t)d²(y,x₀) + t d²(y,x₁) − t(1−t)d²(x₀,x₁)`.
pub fn check_cat0_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> ViolationReport {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("cat0 strong convexity", tol);
    let id = space.id();
    for _ in 0..n_samples {
        let x0 = space.sample_coords(&mut rng);
        let x1 = space.sample_coords(&mut rng);
        let y = space.sample_coords(&mut rng);
        let t: f64 = rng.random();
        let xt = space.geodesic_coords(&x0, &x1, t);
        let sq = |a: &[f64], b: &[f64]| space.dist_coords(a, b).powi(2);
        let lhs = sq(&y, &xt);
        let rhs = (1.0 - t) * sq(&y, &x0) + t * sq(&y, &x1) - t * (1.0 - t) * sq(&x0, &x1);
        report.record(lhs - rhs, || witness(id, &[&x0, &x1, &y], &[t]));
    }
    report
}

/// `⟨ab, cd⟩ ≤ d(a,b) d(c,d)`.
pub fn check_cauchy_schwarz_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> ViolationReport {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("cauchy-schwarz", tol);
    let id = space.id();
    for _ in 0..n_samples {
        let [a, b, c, d] = std::array::from_fn(|_| space.sample_coords(&mut rng));
        let lhs = quasi_inner_coords(space, &a, &b, &c, &d);
        let rhs = space.dist_coords(&a, &b) * space.dist_coords(&c, &d);
        report.record(lhs - rhs, || witness(id, &[&a, &b, &c, &d], &[]));
    }
    report
}

/// The symmetry, antisymmetry and additivity identities of the quasi-inner
/// product on random 5-tuples. The excess is the largest absolute defect.
pub fn check_quasi_identities_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> ViolationReport {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("quasi-inner identities", tol);
    let id = space.id();
    for _ in 0..n_samples {
        let [a, b, c, d, e] = std::array::from_fn(|_| space.sample_coords(&mut rng));
        let q = |w: &[f64], x: &[f64], y: &[f64], z: &[f64]| quasi_inner_coords(space, w, x, y, z);
        let abcd = q(&a, &b, &c, &d);
        let defects = [
            (abcd - q(&c, &d, &a, &b)).abs(),
            (abcd + q(&a, &b, &d, &c)).abs(),
            (abcd + q(&b, &a, &c, &d)).abs(),
            (abcd - q(&a, &e, &c, &d) - q(&e, &b, &c, &d)).abs(),
        ];
        let worst = defects.into_iter().fold(0.0, f64::max);
        report.record(worst, || witness(id, &[&a, &b, &c, &d, &e], &[]));
    }
    report
}

/// The (Q̄₄) four-point condition: for admissible `x, y, p, q` with
/// `d(p,x) ≤ d(x,q)` and `d(p,y) ≤ d(y,q)`, every `m ∈ [x,y]` on a grid of
/// `grid` parameters satisfies `d(p,m) ≤ d(m,q)`.
pub fn check_q4bar_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    grid: usize,
    tol: f64,
) -> Result<ViolationReport> {
    if grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: grid as f64,
            reason: "the t-grid needs at least both endpoints",
        });
    }
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("q4bar condition", tol);
    let id = space.id();
    let max_draws = n_samples.saturating_mul(1000).max(1000);
    let mut draws = 0;
    let mut admitted = 0;
    while admitted < n_samples && draws < max_draws {
        draws += 1;
        let [x, y, mut p, mut q] = std::array::from_fn(|_| space.sample_coords(&mut rng));
        let admissible = |p: &[f64], q: &[f64]| {
            space.dist_coords(p, &x) <= space.dist_coords(&x, q)
                && space.dist_coords(p, &y) <= space.dist_coords(&y, q)
        };
        if !admissible(&p, &q) {
            std::mem::swap(&mut p, &mut q);
            if !admissible(&p, &q) {
                continue;
            }
        }
        admitted += 1;
        let mut worst = f64::NEG_INFINITY;
        let mut worst_t = 0.0;
        for i in 0..grid {
            let t = i as f64 / (grid - 1) as f64;
            let m = space.geodesic_coords(&x, &y, t);
            let excess = space.dist_coords(&p, &m) - space.dist_coords(&m, &q);
            if excess > worst {
                worst = excess;
                worst_t = t;
            }
        }
        report.record(worst, || witness(id, &[&x, &y, &p, &q], &[worst_t]));
    }
    Ok(report)
}

/// Metric axioms on random triples: symmetry, `d(a,a) = 0`, nonnegativity and
/// the triangle inequality.
pub fn check_metric_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> ViolationReport {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("metric axioms", tol);
    let id = space.id();
    for _ in 0..n_samples {
        let [a, b, c] = std::array::from_fn(|_| space.sample_coords(&mut rng));
        let ab = space.dist_coords(&a, &b);
        let defects = [
            (ab - space.dist_coords(&b, &a)).abs(),
            space.dist_coords(&a, &a),
            -ab,
            space.dist_coords(&a, &c) - ab - space.dist_coords(&b, &c),
        ];
        let worst = defects.into_iter().fold(f64::NEG_INFINITY, f64::max);
        report.record(worst, || witness(id, &[&a, &b, &c], &[]));
    }
    report
}

/// Geodesic contracts: exact endpoints and `d(x_t, x_s) = |t − s| d(a, b)`,
/// measured relative to `max(1, d(a, b))`.
pub fn check_geodesic_sample<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> ViolationReport {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("geodesic consistency", tol);
    let id = space.id();
    for _ in 0..n_samples {
        let a = space.sample_coords(&mut rng);
        let b = space.sample_coords(&mut rng);
        let t: f64 = rng.random();
        let s: f64 = rng.random();
        let d = space.dist_coords(&a, &b);
        let scale = d.max(1.0);
        let xt = space.geodesic_coords(&a, &b, t);
        let xs = space.geodesic_coords(&a, &b, s);
        let defects = [
            space.dist_coords(&space.geodesic_coords(&a, &b, 0.0), &a),
            space.dist_coords(&space.geodesic_coords(&a, &b, 1.0), &b),
            (space.dist_coords(&xt, &a) - t * d).abs() / scale,
            (space.dist_coords(&xt, &b) - (1.0 - t) * d).abs() / scale,
            (space.dist_coords(&xt, &xs) - (t - s).abs() * d).abs() / scale,
        ];
        let worst = defects.into_iter().fold(0.0, f64::max);
        report.record(worst, || witness(id, &[&a, &b], &[t, s]));
    }
    report
}
/// Grid resolution used by [`geometry_suite`] for the (Q̄₄) sampler.
pub const SUITE_Q4_GRID: usize = 17;

/// Every geometry sampler at `n_samples` draws each, in a fixed order:
/// metric axioms, geodesics, CAT(0), Cauchy–Schwarz, quasi-inner identities
/// and (Q̄₄).
pub fn geometry_suite<S: GeodesicSpace + ?Sized>(
    space: &S,
    rng_seed: u64,
    n_samples: usize,
    tol: f64,
) -> Result<Vec<ViolationReport>> {
    Ok(vec![
        check_metric_sample(space, rng_seed, n_samples, tol),
        check_geodesic_sample(space, rng_seed, n_samples, tol),
        check_cat0_sample(space, rng_seed, n_samples, tol),
        check_cauchy_schwarz_sample(space, rng_seed, n_samples, tol),
        check_quasi_identities_sample(space, rng_seed, n_samples, tol),
        check_q4bar_sample(space, rng_seed, n_samples, SUITE_Q4_GRID, tol)?,
    ])
}
