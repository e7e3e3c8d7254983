//! Orbits of nonexpansive maps and their Karcher-mean averages.
//!
//! For an orbit `x₀ = x, x₁ = T x, …` the mean `σₙ` is the Karcher mean of
//! `x₀ … x_{n−1}` and the shifted mean `σₙᵏ` that of `x_k … x_{k+n−1}`.
//! [`mean_sequence`] computes both along a schedule of `n` together with the
//! diagnostics that should vanish or stay monotone as `n` grows:
//!
//! * residual `d(σₙ, Tσₙ)`,
//! * shift gaps `d(σₙ, σₙᵏ)`,
//! * `d(PTⁿx, Tⁿx)` with `P` the projection onto the fixed set,
//! * a convex-hull gap: for proxy points `c` built from the window, the
//!   excess of `d(σ, c)` over the window's radius about `c`. Each such ball
//!   contains the closed convex hull, so a positive value refutes hull
//!   membership.
//!
//! Convergence is measured as strong convergence of `σₙ` plus agreement
//! with the limit of `PTⁿx`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::frechet::{
    certify_at, FrechetProblem, KarcherSolver, MeanCertificate, DEFAULT_PROBES, DEFAULT_PROBE_SEED,
};
use crate::metric::{seeded_rng, tol, GeodesicSpace, Point, ViolationReport, Witness};
use crate::nonexpansive::{apply, project_fixed_set, residual, MappingSpec};
use crate::spaces::SpaceHandle;

/// Default shift values `k`.
pub const DEFAULT_K_LIST: [usize; 2] = [1, 8];
/// Default agreement and residual threshold of a verdict.
pub const DEFAULT_TOL_VERDICT: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub map: MappingSpec,
    pub start: Point,
    /// `T⁰x … T^N x`.
    pub points: Vec<Point>,
    /// `d(Tⁿx, p)` for the fixed point `p` nearest the origin, when known.
    pub fixed_point_distances: Option<Vec<f64>>,
    /// Increases of `d(Tⁿx, p)` from one step to the next.
    pub boundedness: Option<ViolationReport>,
}

impl OrbitTrace {
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }

    /// Recomputes every step and reports the largest deviation.
    pub fn replay_check(&self, tol: f64) -> Result<ViolationReport> {
        let space = self.map.space();
        let mut report = ViolationReport::new("orbit replay", tol);
        for (i, w) in self.points.windows(2).enumerate() {
            let next = apply(&self.map, &w[0])?;
            let dev = space.dist_coords(next.coords(), w[1].coords());
            report.record(dev, || Witness {
                points: vec![w[0].clone(), w[1].clone(), next.clone()],
                params: vec![i as f64],
            });
        }
        Ok(report)
    }
}

/// Iterates `map` `n` times from `start`.
pub fn generate_orbit(map: &MappingSpec, start: &Point, n: usize) -> Result<OrbitTrace> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "N",
            value: 0.0,
            reason: "horizon must be at least 1",
        });
    }
    let space = map.space();
    space.check(start)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(start.clone());
    for _ in 0..n {
        let next = apply(map, points.last().unwrap())?;
        points.push(next);
    }
    let (fixed_point_distances, boundedness) = match map.fixed_point() {
        Some(p) => {
            let d: Vec<f64> = points
                .iter()
                .map(|x| space.dist_coords(x.coords(), p.coords()))
                .collect();
            let mut report = ViolationReport::new("orbit distance to a fixed point", tol::CONTRACT);
            for (i, w) in d.windows(2).enumerate() {
                report.record(w[1] - w[0], || Witness {
                    points: vec![points[i].clone(), points[i + 1].clone(), p.clone()],
                    params: vec![i as f64],
                });
            }
            (Some(d), Some(report))
        }
        None => (None, None),
    };
    Ok(OrbitTrace {
        map: map.clone(),
        start: start.clone(),
        points,
        fixed_point_distances,
        boundedness,
    })
}

/// Powers of two `n` with `n + max(k) ≤ N + 1`.
pub fn default_schedule(horizon: usize, k_list: &[usize]) -> Vec<usize> {
    let cap = (horizon + 1)
        .saturating_sub(k_list.iter().copied().max().unwrap_or(0))
        .min(horizon);
    std::iter::successors(Some(1usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= cap)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMean {
    pub k: usize,
    pub mean: Point,
    pub certificate: MeanCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanEntry {
    pub n: usize,
    pub mean: Point,
    pub certificate: MeanCertificate,
    /// One per configured `k`, in `k_list` order.
    pub shifted: Vec<ShiftedMean>,
}

impl MeanEntry {
    /// Every mean at this `n` with its shift, `σₙ` first with `k = 0`.
    pub fn all(&self) -> impl Iterator<Item = (usize, &Point, &MeanCertificate)> {
        std::iter::once((0, &self.mean, &self.certificate))
            .chain(self.shifted.iter().map(|s| (s.k, &s.mean, &s.certificate)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanTrace {
    pub space: SpaceHandle,
    pub k_list: Vec<usize>,
    pub entries: Vec<MeanEntry>,
}

impl MeanTrace {
    pub fn schedule(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.n).collect()
    }

    pub fn entry(&self, n: usize) -> Option<&MeanEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn last(&self) -> &MeanEntry {
        self.entries.last().expect("mean trace is never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub n: usize,
    /// `d(σₙ, Tσₙ)`.
    pub residual: f64,
    /// `d(σₙ, σₙᵏ)` in `k_list` order.
    pub shift_gaps: Vec<f64>,
    /// `d(PTⁿx, Tⁿx)`.
    pub orbit_proj_dist: Option<f64>,
    pub proj_point: Option<Point>,
    /// Worst hull-proxy excess over the means at this `n`.
    pub hull_gap: f64,
    /// Smaller of the two certificate margins over the means at this `n`.
    pub cert_gap: f64,
    /// `F(σₙ)`.
    pub frechet_value: f64,
    /// `max d(σ, p) − d(x, p)` over the means at this `n`, for the fixed
    /// point `p` nearest the origin.
    pub fixed_point_excess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsTrace {
    pub records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsTrace {
    pub fn record(&self, n: usize) -> Option<&DiagnosticsRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

/// Tuning for [`mean_sequence_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeanOptions {
    pub tol: f64,
    pub probes: usize,
    pub probe_seed: u64,
    /// Proxy points per window for the hull gap; they also join the
    /// certificate probes.
    pub hull_proxies: usize,
    /// Geodesic combination steps per proxy point.
    pub hull_depth: usize,
}

impl MeanOptions {
    pub fn new(tol: f64) -> Self {
        MeanOptions {
            tol,
            probes: DEFAULT_PROBES,
            probe_seed: DEFAULT_PROBE_SEED,
            hull_proxies: 16,
            hull_depth: 12,
        }
    }
}

/// Means and diagnostics with default options.
pub fn mean_sequence(
    orbit: &OrbitTrace,
    schedule: &[usize],
    k_list: &[usize],
    tol: f64,
) -> Result<(MeanTrace, DiagnosticsTrace)> {
    mean_sequence_with(orbit, schedule, k_list, &MeanOptions::new(tol))
}

pub fn mean_sequence_with(
    orbit: &OrbitTrace,
    schedule: &[usize],
    k_list: &[usize],
    opts: &MeanOptions,
) -> Result<(MeanTrace, DiagnosticsTrace)> {
    let horizon = orbit.horizon();
    validate_schedule(schedule, k_list, horizon)?;
    let map = &orbit.map;
    let space = *map.space();
    let fixed = map.fixed_point();
    let start_radius = fixed
        .as_ref()
        .map(|p| space.dist_coords(orbit.start.coords(), p.coords()));

    let mut warm: Vec<Option<Point>> = vec![None; k_list.len() + 1];
    let mut entries = Vec::with_capacity(schedule.len());
    let mut records = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let mut solved = Vec::with_capacity(k_list.len() + 1);
        let mut hull_gap = f64::NEG_INFINITY;
        for (slot, k) in std::iter::once(0).chain(k_list.iter().copied()).enumerate() {
            let window = &orbit.points[k..k + n];
            let problem = FrechetProblem::uniform(space, window.to_vec())?;
            let mut rng = seeded_rng(opts.probe_seed ^ ((n as u64) << 20) ^ k as u64);
            let proxies =
                hull_proxies(&space, window, opts.hull_proxies, opts.hull_depth, &mut rng);
            let (mean, cert) = solve_certified(&problem, warm[slot].take(), &proxies, opts)?;
            for c in &proxies {
                let radius = window
                    .iter()
                    .map(|x| space.dist_coords(x.coords(), c))
                    .fold(0.0, f64::max);
                hull_gap = hull_gap.max(space.dist_coords(mean.coords(), c) - radius);
            }
            warm[slot] = Some(mean.clone());
            solved.push((k, mean, cert));
        }

        let (_, mean, certificate) = solved.remove(0);
        let shifted: Vec<ShiftedMean> = solved
            .into_iter()
            .map(|(k, mean, certificate)| ShiftedMean {
                k,
                mean,
                certificate,
            })
            .collect();
        let entry = MeanEntry {
            n,
            mean,
            certificate,
            shifted,
        };

        let (proj_point, orbit_proj_dist) = if map.fixed_set().is_some() {
            let xn = &orbit.points[n];
            let p = project_fixed_set(map, xn)?;
            let d = space.dist_coords(p.coords(), xn.coords());
            (Some(p), Some(d))
        } else {
            (None, None)
        };
        let fixed_point_excess = fixed.as_ref().zip(start_radius).map(|(p, r0)| {
            entry
                .all()
                .map(|(_, m, _)| space.dist_coords(m.coords(), p.coords()) - r0)
                .fold(f64::NEG_INFINITY, f64::max)
        });
        records.push(DiagnosticsRecord {
            n,
            residual: residual(map, &entry.mean)?,
            shift_gaps: entry
                .shifted
                .iter()
                .map(|s| space.dist_coords(entry.mean.coords(), s.mean.coords()))
                .collect(),
            orbit_proj_dist,
            proj_point,
            hull_gap: hull_gap.max(0.0),
            cert_gap: entry
                .all()
                .map(|(_, _, c)| c.worst_gap.min(c.worst_slack))
                .fold(f64::INFINITY, f64::min),
            frechet_value: entry.certificate.functional_value,
            fixed_point_excess,
        });
        entries.push(entry);
    }
    Ok((
        MeanTrace {
            space,
            k_list: k_list.to_vec(),
            entries,
        },
        DiagnosticsTrace { records },
    ))
}

fn validate_schedule(schedule: &[usize], k_list: &[usize], horizon: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidProblem(msg));
    if schedule.is_empty() {
        return bad("empty schedule".into());
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return bad("schedule must be strictly increasing positive indices".into());
    }
    let n_max = *schedule.last().unwrap();
    let k_max = k_list.iter().copied().max().unwrap_or(0);
    if n_max > horizon || n_max + k_max > horizon + 1 {
        return bad(format!(
            "schedule entry {n_max} with shift {k_max} needs a horizon of at least {}, have {horizon}",
            (n_max + k_max).saturating_sub(1).max(n_max)
        ));
    }
    Ok(())
}

/// Random iterated geodesic combinations of window points.
fn hull_proxies<S: GeodesicSpace>(
    space: &S,
    window: &[Point],
    count: usize,
    depth: usize,
    rng: &mut crate::metric::SampleRng,
) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let mut z = window[rng.random_range(0..window.len())].coords().to_vec();
            for _ in 0..depth {
                let target = window[rng.random_range(0..window.len())].coords();
                let t: f64 = rng.random();
                z = space.geodesic_coords(&z, target, t);
            }
            z
        })
        .collect()
}

/// Solves with a warm start and certifies against the standard probes plus
/// `extra`; a failing certificate triggers one retry at a tolerance 10³
/// times tighter.
fn solve_certified(
    problem: &FrechetProblem,
    warm: Option<Point>,
    extra: &[Vec<f64>],
    opts: &MeanOptions,
) -> Result<(Point, MeanCertificate)> {
    let space = problem.space();
    let mut probes: Vec<Vec<f64>> = {
        let n = problem.anchors().len();
        let n_anchor = n.min(opts.probes.div_ceil(2));
        (0..n_anchor)
            .map(|j| problem.anchors()[j * n / n_anchor].coords().to_vec())
            .collect()
    };
    let mut rng = seeded_rng(opts.probe_seed);
    while probes.len() < opts.probes {
        probes.push(space.sample_coords(&mut rng));
    }
    probes.extend_from_slice(extra);

    let mut last = None;
    for tol in [opts.tol, opts.tol * 1e-3] {
        let mut solver = KarcherSolver::new(tol);
        if let Some(w) = &warm {
            solver = solver.warm_start(w.clone());
        }
        let mean = solver.minimize(problem)?;
        let cert = certify_at(problem, &mean, &probes)?;
        if cert.passes() {
            return Ok((mean, cert));
        }
        last = Some(cert);
    }
    let cert = last.unwrap();
    Err(Error::CertificateFailed {
        worst_gap: cert.worst_gap,
        worst_slack: cert.worst_slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTrace {
    /// `PTⁿx` for every `n` in `0..=N`.
    pub points: Vec<Point>,
    /// `d(PTⁿx, Tⁿx)`.
    pub distances: Vec<f64>,
    /// Step-to-step increases of `distances`.
    pub monotone: ViolationReport,
}

impl ProjectionTrace {
    pub fn limit(&self) -> &Point {
        self.points.last().expect("orbit is never empty")
    }
}

/// Projects every orbit point onto the fixed set.
pub fn projection_trace(orbit: &OrbitTrace) -> Result<ProjectionTrace> {
    let map = &orbit.map;
    let space = map.space();
    let mut points = Vec::with_capacity(orbit.points.len());
    let mut distances = Vec::with_capacity(orbit.points.len());
    for x in &orbit.points {
        let p = project_fixed_set(map, x)?;
        distances.push(space.dist_coords(p.coords(), x.coords()));
        points.push(p);
    }
    let mut monotone = ViolationReport::new("projection distance nonincreasing", tol::CONTRACT);
    for (i, w) in distances.windows(2).enumerate() {
        monotone.record(w[1] - w[0], || Witness {
            points: vec![orbit.points[i].clone(), orbit.points[i + 1].clone()],
            params: vec![i as f64],
        });
    }
    Ok(ProjectionTrace {
        points,
        distances,
        monotone,
    })
}

/// Checks `d(z, p) ≤ d(z, v)` for orbit points `Tᵏx` with `k ≥ k0` and, when
/// given, for every shifted mean `σₙᵏ` with `k ≥ k0`. Witness parameters
/// are `[k]` for orbit points and `[n, k]` for means.
pub fn halfspace_membership_check(
    orbit: &OrbitTrace,
    means: Option<&MeanTrace>,
    p: &Point,
    v: &Point,
    k0: usize,
) -> Result<ViolationReport> {
    let space = orbit.map.space();
    space.check(p)?;
    space.check(v)?;
    let excess = |z: &Point| {
        space.dist_coords(z.coords(), p.coords()) - space.dist_coords(z.coords(), v.coords())
    };
    let mut report = ViolationReport::new(format!("half-space F({p}, {v})"), tol::CONTRACT);
    for (k, z) in orbit.points.iter().enumerate().skip(k0) {
        report.record(excess(z), || Witness {
            points: vec![z.clone()],
            params: vec![k as f64],
        });
    }
    for entry in means.into_iter().flat_map(|m| &m.entries) {
        for s in entry.shifted.iter().filter(|s| s.k >= k0) {
            report.record(excess(&s.mean), || Witness {
                points: vec![s.mean.clone()],
                params: vec![entry.n as f64, s.k as f64],
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Converged,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::Converged => "converged",
            VerdictStatus::Inconclusive => "inconclusive",
        }
    }
}

/// What the agreement distance compares the last mean with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgreementBasis {
    /// The last projection `PT^N x`.
    ProjectionLimit,
    /// The previous scheduled mean; used when the fixed set is unknown.
    PreviousMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub limit_candidate: Point,
    pub agreement: f64,
    pub agreement_basis: AgreementBasis,
    /// `d(σₙ, Tσₙ)` at the last scheduled `n`.
    pub residual: f64,
    pub status: VerdictStatus,
    /// First schedule value (`n`, or `T` for semigroups) meeting both
    /// thresholds.
    pub converged_at: Option<f64>,
    pub tol_verdict: f64,
}

/// Converged when the last mean is within `tol_verdict` of the limit
/// candidate and its residual is within `tol_verdict` as well.
pub fn verdict(
    means: &MeanTrace,
    diagnostics: &DiagnosticsTrace,
    projection: Option<&ProjectionTrace>,
    tol_verdict: f64,
) -> Result<Verdict> {
    if means.entries.len() != diagnostics.records.len()
        || means
            .entries
            .iter()
            .zip(&diagnostics.records)
            .any(|(e, r)| e.n != r.n)
    {
        return Err(Error::InvalidProblem(
            "mean and diagnostics traces have different schedules".into(),
        ));
    }
    let last = means.last();
    let residual = diagnostics.records.last().unwrap().residual;
    let dist = |a: &Point, b: &Point| means.space.dist_coords(a.coords(), b.coords());

    let (limit, basis) = match projection {
        Some(p) => (p.limit().clone(), AgreementBasis::ProjectionLimit),
        None => (last.mean.clone(), AgreementBasis::PreviousMean),
    };
    let agreement_at = |i: usize| -> f64 {
        match basis {
            AgreementBasis::ProjectionLimit => dist(&means.entries[i].mean, &limit),
            AgreementBasis::PreviousMean if i == 0 => f64::INFINITY,
            AgreementBasis::PreviousMean => {
                dist(&means.entries[i].mean, &means.entries[i - 1].mean)
            }
        }
    };
    let last_idx = means.entries.len() - 1;
    let agreement = agreement_at(last_idx);
    let ok =
        |i: usize| agreement_at(i) <= tol_verdict && diagnostics.records[i].residual <= tol_verdict;
    let status = if ok(last_idx) {
        VerdictStatus::Converged
    } else {
        VerdictStatus::Inconclusive
    };
    let converged_at = (0..=last_idx)
        .find(|&i| ok(i))
        .map(|i| means.entries[i].n as f64);
    Ok(Verdict {
        limit_candidate: limit,
        agreement,
        agreement_basis: basis,
        residual,
        status,
        converged_at,
        tol_verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonexpansive::PiecewiseLinear;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn e2() -> SpaceHandle {
        SpaceHandle::euclidean(2)
    }

    fn rotation_orbit(n: usize) -> OrbitTrace {
        let map = MappingSpec::rotation(e2(), 1.0).unwrap();
        generate_orbit(&map, &e2().point(vec![1.0, 0.0]).unwrap(), n).unwrap()
    }

    fn river_halving() -> MappingSpec {
        MappingSpec::river_product(PiecewiseLinear::scale(0.5), PiecewiseLinear::scale(0.5))
            .unwrap()
    }

    #[test]
    fn orbit_examples() {
        let id = MappingSpec::identity(e2());
        let x = e2().point(vec![0.3, 0.4]).unwrap();
        let orbit = generate_orbit(&id, &x, 5).unwrap();
        assert!(orbit.points.iter().all(|p| *p == x));

        let quarter = MappingSpec::rotation(e2(), std::f64::consts::FRAC_PI_2).unwrap();
        let orbit = generate_orbit(&quarter, &e2().point(vec![1.0, 0.0]).unwrap(), 4).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]];
        for (p, q) in orbit.points.iter().zip(expected) {
            assert_abs_diff_eq!(p.coords()[0], q[0], epsilon = 1e-15);
            assert_abs_diff_eq!(p.coords()[1], q[1], epsilon = 1e-15);
        }
        assert!(orbit.boundedness.as_ref().unwrap().passed());
        assert!(orbit.replay_check(1e-12).unwrap().passed());

        let r = SpaceHandle::river();
        let orbit = generate_orbit(&river_halving(), &r.point(vec![2.0, 2.0]).unwrap(), 2).unwrap();
        let coords: Vec<&[f64]> = orbit.points.iter().map(|p| p.coords()).collect();
        assert_eq!(coords, vec![&[2.0, 2.0][..], &[1.0, 1.0], &[0.5, 0.5]]);

        assert!(generate_orbit(&id, &x, 0).is_err());
    }

    #[test]
    fn default_schedule_respects_shifts() {
        let s = default_schedule(10_000, &DEFAULT_K_LIST);
        assert_eq!(s.len(), 14);
        assert_eq!(*s.last().unwrap(), 8192);
        assert_eq!(default_schedule(8, &[]), vec![1, 2, 4, 8]);
        assert_eq!(default_schedule(8, &[1]), vec![1, 2, 4, 8]);
        assert_eq!(default_schedule(8, &[2]), vec![1, 2, 4]);
    }

    #[test]
    fn schedule_validation() {
        let orbit = rotation_orbit(16);
        assert!(mean_sequence(&orbit, &[4, 16], &[2], 1e-10).is_err());
        assert!(mean_sequence(&orbit, &[4, 16], &[1], 1e-10).is_ok());
        assert!(mean_sequence(&orbit, &[4, 16], &[], 1e-10).is_ok());
        assert!(mean_sequence(&orbit, &[4, 4], &[], 1e-10).is_err());
        assert!(mean_sequence(&orbit, &[0, 4], &[], 1e-10).is_err());
        assert!(mean_sequence(&orbit, &[], &[], 1e-10).is_err());
    }

    #[test]
    fn rotation_means_obey_the_geometric_sum_bound() {
        let orbit = rotation_orbit(2000);
        let schedule = default_schedule(2000, &DEFAULT_K_LIST);
        let (means, diag) = mean_sequence(&orbit, &schedule, &DEFAULT_K_LIST, 1e-10).unwrap();
        let bound = 2.0 / (2.0 * 0.5f64.sin());
        assert_abs_diff_eq!(bound, 2.0857, epsilon = 2e-4);
        for entry in &means.entries {
            let n = entry.n;
            // Direct complex summation of e^{im}, m < n.
            let oracle: Complex64 = (0..n)
                .map(|m| Complex64::from_polar(1.0, m as f64))
                .sum::<Complex64>()
                / n as f64;
            let m = entry.mean.coords();
            assert_abs_diff_eq!(m[0], oracle.re, epsilon = 1e-12);
            assert_abs_diff_eq!(m[1], oracle.im, epsilon = 1e-12);
            assert!(oracle.norm() <= bound / n as f64 + 1e-12);
            assert!(entry.all().all(|(_, _, c)| c.passes()));
        }
        for r in &diag.records {
            assert!(r.hull_gap <= 1e-9, "hull gap {} at n = {}", r.hull_gap, r.n);
            assert!(r.fixed_point_excess.unwrap() <= 1e-6);
            assert_abs_diff_eq!(r.orbit_proj_dist.unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_orbit_has_zero_diagnostics() {
        let r = SpaceHandle::river();
        let p = r.point(vec![1.5, -2.0]).unwrap();
        let orbit = generate_orbit(&MappingSpec::identity(r), &p, 20).unwrap();
        let (means, diag) = mean_sequence(&orbit, &[1, 4, 16], &[1, 4], 1e-10).unwrap();
        for (e, d) in means.entries.iter().zip(&diag.records) {
            assert_eq!(e.mean, p);
            assert_eq!(d.residual, 0.0);
            assert!(d.shift_gaps.iter().all(|g| *g == 0.0));
            assert_eq!(d.orbit_proj_dist, Some(0.0));
        }
        let proj = projection_trace(&orbit).unwrap();
        let v = verdict(&means, &diag, Some(&proj), DEFAULT_TOL_VERDICT).unwrap();
        assert_eq!(v.status, VerdictStatus::Converged);
        assert_eq!(v.converged_at, Some(1.0));
        assert_eq!(v.limit_candidate, p);
    }

    #[test]
    fn river_halving_converges_to_the_origin() {
        let r = SpaceHandle::river();
        let orbit =
            generate_orbit(&river_halving(), &r.point(vec![2.0, 2.0]).unwrap(), 1024).unwrap();
        let (means, diag) = mean_sequence(&orbit, &[4, 8, 16, 1000], &[1, 8], 1e-10).unwrap();
        assert!(diag.record(1000).unwrap().residual <= 1e-2);
        let proj = projection_trace(&orbit).unwrap();
        assert!(proj.monotone.passed());
        let v = verdict(&means, &diag, Some(&proj), DEFAULT_TOL_VERDICT).unwrap();
        assert_eq!(v.status, VerdictStatus::Converged);
        assert_eq!(v.limit_candidate.coords(), &[0.0, 0.0]);

        // Grid oracle over the tree: spine abscissa and leg height.
        for n in [4, 8, 16] {
            let anchors = &orbit.points[..n];
            let f = |x: f64, y: f64| -> f64 {
                anchors
                    .iter()
                    .map(|a| r.dist_coords(a.coords(), &[x, y]).powi(2))
                    .sum::<f64>()
                    / n as f64
            };
            let mut best = (f64::INFINITY, 0.0, 0.0);
            for i in 0..=2000 {
                let x = i as f64 * 1e-3;
                for (xx, yy) in [(x, 0.0), (0.5, x - 1.0), (1.0, x - 1.0), (2.0, x - 1.0)] {
                    let v = f(xx, yy);
                    if v < best.0 {
                        best = (v, xx, yy);
                    }
                }
            }
            let m = means.entry(n).unwrap().mean.coords();
            assert!(
                r.dist_coords(m, &[best.1, best.2]) <= 2e-3,
                "n = {n}: {m:?} vs {best:?}"
            );
            assert!(means.entry(n).unwrap().certificate.functional_value <= best.0 + 1e-12);
        }
    }

    #[test]
    fn projection_trace_examples() {
        let orbit = rotation_orbit(10);
        let proj = projection_trace(&orbit).unwrap();
        assert!(proj.points.iter().all(|p| p.coords() == [0.0, 0.0]));
        assert!(proj.distances.iter().all(|d| (d - 1.0).abs() < 1e-15));

        let r = SpaceHandle::river();
        let map =
            MappingSpec::river_product(PiecewiseLinear::identity(), PiecewiseLinear::scale(0.5))
                .unwrap();
        let orbit = generate_orbit(&map, &r.point(vec![3.0, 2.0]).unwrap(), 4).unwrap();
        let proj = projection_trace(&orbit).unwrap();
        assert!(proj.points.iter().all(|p| p.coords() == [3.0, 0.0]));
        assert_eq!(proj.distances, vec![2.0, 1.0, 0.5, 0.25, 0.125]);

        let orbit = generate_orbit(&map, &r.point(vec![3.0, 0.0]).unwrap(), 4).unwrap();
        assert!(projection_trace(&orbit)
            .unwrap()
            .distances
            .iter()
            .all(|d| *d == 0.0));

        let comp = MappingSpec::composition(e2(), vec![MappingSpec::identity(e2())]).unwrap();
        let orbit = generate_orbit(&comp, &e2().point(vec![1.0, 0.0]).unwrap(), 2).unwrap();
        assert!(matches!(
            projection_trace(&orbit),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn halfspace_examples() {
        let orbit = rotation_orbit(200);
        let p = e2().point(vec![0.0, 0.0]).unwrap();
        let same = halfspace_membership_check(&orbit, None, &p, &p, 0).unwrap();
        assert!(same.passed());
        assert_eq!(same.worst_violation, 0.0);

        let v = e2().point(vec![2.0, 0.0]).unwrap();
        let (means, _) = mean_sequence(&orbit, &[8, 64], &[1, 8], 1e-10).unwrap();
        assert!(halfspace_membership_check(&orbit, Some(&means), &p, &v, 0)
            .unwrap()
            .passed());

        let inside = e2().point(vec![0.5, 0.0]).unwrap();
        let rep = halfspace_membership_check(&orbit, None, &p, &inside, 0).unwrap();
        assert!(!rep.passed());
        let w = rep.witness.unwrap();
        let k = w.params[0] as usize;
        assert!(orbit.points[k].coords()[0] > 0.25);
    }

    #[test]
    fn verdict_examples() {
        let orbit = rotation_orbit(10);
        let (means, diag) = mean_sequence(&orbit, &default_schedule(10, &[]), &[], 1e-10).unwrap();
        let proj = projection_trace(&orbit).unwrap();
        let v = verdict(&means, &diag, Some(&proj), DEFAULT_TOL_VERDICT).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert!(v.agreement > 0.1);

        let orbit = rotation_orbit(10_000);
        let (means, diag) = mean_sequence(&orbit, &[100, 1000, 10_000], &[], 1e-10).unwrap();
        let proj = projection_trace(&orbit).unwrap();
        let v = verdict(&means, &diag, Some(&proj), DEFAULT_TOL_VERDICT).unwrap();
        assert_eq!(v.status, VerdictStatus::Converged);
        assert!(v.agreement <= 3e-4);
        assert_eq!(v.agreement_basis, AgreementBasis::ProjectionLimit);
        assert_eq!(v.limit_candidate.coords(), &[0.0, 0.0]);
        assert!(residual(&orbit.map, &v.limit_candidate).unwrap() <= DEFAULT_TOL_VERDICT);

        // Without a known fixed set the last two means are compared.
        let comp = MappingSpec::composition(e2(), vec![MappingSpec::rotation(e2(), 1.0).unwrap()])
            .unwrap();
        let orbit = generate_orbit(&comp, &e2().point(vec![1.0, 0.0]).unwrap(), 4096).unwrap();
        let (means, diag) = mean_sequence(&orbit, &[1024, 4096], &[], 1e-10).unwrap();
        let v = verdict(&means, &diag, None, DEFAULT_TOL_VERDICT).unwrap();
        assert_eq!(v.agreement_basis, AgreementBasis::PreviousMean);
        assert_eq!(v.status, VerdictStatus::Converged);
        assert_eq!(v.converged_at, Some(4096.0));
    }

    #[test]
    fn disk_rotation_means_shrink() {
        let d = SpaceHandle::disk(0.05).unwrap();
        let map = MappingSpec::rotation(d, 1.0).unwrap();
        let orbit = generate_orbit(&map, &d.point(vec![0.5, 0.0]).unwrap(), 512).unwrap();
        let (means, diag) = mean_sequence(&orbit, &[8, 64, 512], &[1], 1e-10).unwrap();
        let norms: Vec<f64> = means
            .entries
            .iter()
            .map(|e| d.dist_coords(e.mean.coords(), &[0.0, 0.0]))
            .collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
        assert!(diag
            .records
            .iter()
            .all(|r| r.hull_gap <= 1e-9 && r.cert_gap >= -1e-6));
    }
}
