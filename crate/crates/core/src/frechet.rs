//! Weighted Fréchet functionals and their minimizers (Karcher means).
//!
//! For anchors `x₁ … xₙ` with weights `w₁ … wₙ` summing to one,
//! `F(x) = Σ wᵢ d²(xᵢ, x)` is 1-strongly convex along geodesics, so the
//! minimizer `σ` is unique and satisfies the variance inequality
//! `d²(σ, y) ≤ F(y) − F(σ)` for every `y`. [`certify_mean`] probes that
//! inequality, together with `d(σ, y) ≤ Σ wᵢ d(xᵢ, y)`, to certify a
//! candidate.
//!
//! Solvers:
//! * Euclidean space: the weighted arithmetic mean.
//! * River plane: an exact solver exploiting the tree structure. The minimizer
//!   lies on the river at the stationary point of a convex piecewise
//!   quadratic, or on the vertical leg above or below that point.
//! * Poincaré disk: preconditioned Riemannian gradient iteration
//!   `x ← exp_x(α Σ wᵢ log_x xᵢ)`, falling back to the generic solver if it
//!   stalls.
//! * Generic: incremental proximal passes over the anchors, each prox step a
//!   move along a geodesic, followed by exact line searches along geodesics
//!   toward the anchors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::{seeded_rng, tol, GeodesicSpace, Point};
use crate::spaces::{dist_c, exp_c, log_c, to_complex, SpaceHandle};

/// Default probe count for certificates.
pub const DEFAULT_PROBES: usize = 256;
/// Default seed for certificate probes.
pub const DEFAULT_PROBE_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetProblem {
    space: SpaceHandle,
    anchors: Vec<Point>,
    weights: Vec<f64>,
}

impl FrechetProblem {
    pub fn uniform(space: SpaceHandle, anchors: Vec<Point>) -> Result<Self> {
        let n = anchors.len();
        Self::weighted(space, anchors, vec![1.0 / n.max(1) as f64; n])
    }

    /// Weights must be nonnegative and sum to one (within `1e-9`); they are
    /// renormalized exactly.
    pub fn weighted(space: SpaceHandle, anchors: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidProblem("no anchors".into()));
        }
        if anchors.len() != weights.len() {
            return Err(Error::InvalidProblem(format!(
                "{} anchors but {} weights",
                anchors.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidProblem("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProblem(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        for a in &anchors {
            space.check(a)?;
            if !space.contains(a.coords()) {
                return Err(Error::NotInSpace {
                    space: space.id(),
                    coords: a.coords().to_vec(),
                });
            }
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(FrechetProblem {
            space,
            anchors,
            weights,
        })
    }

    /// Reads anchors from text, one point per line as `x, y` or `(x, y)`,
    /// optionally followed by `; weight`. Either every line carries a weight
    /// or none does. Blank lines and `#` comments are skipped.
    pub fn parse_points(space: SpaceHandle, text: &str) -> Result<Self> {
        let mut anchors = Vec::new();
        let mut weights = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad =
                |what: &str| Error::InvalidProblem(format!("line {}: {what} `{line}`", i + 1));
            let (coords, weight) = match line.split_once(';') {
                Some((c, w)) => (
                    c,
                    Some(
                        w.trim()
                            .parse::<f64>()
                            .map_err(|_| bad("malformed weight in"))?,
                    ),
                ),
                None => (line, None),
            };
            let coords = coords.trim();
            let coords = coords
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(coords);
            let coords = coords
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("malformed point"))?;
            anchors.push(space.point(coords)?);
            weights.push(weight);
        }
        if weights.iter().all(Option::is_none) {
            return Self::uniform(space, anchors);
        }
        let weights: Option<Vec<f64>> = weights.into_iter().collect();
        let mut weights = weights.ok_or_else(|| {
            Error::InvalidProblem("weights must be given on every line or none".into())
        })?;
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Self::weighted(space, anchors, weights)
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn value_coords(&self, x: &[f64]) -> f64 {
        self.anchors
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w * self.space.dist_coords(a.coords(), x).powi(2))
            .sum()
    }

    fn mean_distance_coords(&self, y: &[f64]) -> f64 {
        self.anchors
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w * self.space.dist_coords(a.coords(), y))
            .sum()
    }
}

/// `F(x) = Σ wᵢ d²(xᵢ, x)`.
pub fn frechet_value(problem: &FrechetProblem, x: &Point) -> Result<f64> {
    problem.space.check(x)?;
    Ok(problem.value_coords(x.coords()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanCertificate {
    pub candidate: Point,
    pub functional_value: f64,
    /// `min_y F(y) − F(σ) − d²(σ, y)` over the probes.
    pub worst_gap: f64,
    /// `min_y Σ wᵢ d(xᵢ, y) − d(σ, y)` over the probes.
    pub worst_slack: f64,
    pub probes: usize,
}

impl MeanCertificate {
    pub fn passes(&self) -> bool {
        self.worst_gap >= -tol::CERTIFICATE && self.worst_slack >= -tol::CERTIFICATE
    }
}

/// Probes the variance inequality and the mean-distance bound at up to half
/// of `n_probes` evenly strided anchors plus random points of the space.
pub fn certify_mean(
    problem: &FrechetProblem,
    candidate: &Point,
    n_probes: usize,
    rng_seed: u64,
) -> Result<MeanCertificate> {
    problem.space.check(candidate)?;
    let space = &problem.space;
    let n_probes = n_probes.max(1);

    let n = problem.anchors.len();
    let n_anchor_probes = n.min(n_probes.div_ceil(2));
    let mut probes: Vec<Vec<f64>> = (0..n_anchor_probes)
        .map(|j| problem.anchors[j * n / n_anchor_probes].coords().to_vec())
        .collect();
    let mut rng = seeded_rng(rng_seed);
    while probes.len() < n_probes {
        probes.push(space.sample_coords(&mut rng));
    }
    certify_at(problem, candidate, &probes)
}

/// Certificate against an explicit probe list (raw coordinates).
pub fn certify_at(
    problem: &FrechetProblem,
    candidate: &Point,
    probes: &[Vec<f64>],
) -> Result<MeanCertificate> {
    let space = &problem.space;
    space.check(candidate)?;
    let c = candidate.coords();
    let fc = problem.value_coords(c);
    let mut worst_gap = f64::INFINITY;
    let mut worst_slack = f64::INFINITY;
    for y in probes {
        let d_cy = space.dist_coords(c, y);
        let gap = problem.value_coords(y) - fc - d_cy * d_cy;
        let slack = problem.mean_distance_coords(y) - d_cy;
        worst_gap = worst_gap.min(gap);
        worst_slack = worst_slack.min(slack);
    }
    Ok(MeanCertificate {
        candidate: candidate.clone(),
        functional_value: fc,
        worst_gap,
        worst_slack,
        probes: probes.len(),
    })
}

/// Slack `Σ wᵢ d(xᵢ, y) − d(candidate, y)` of the mean-distance bound.
pub fn mean_distance_bound_check(
    problem: &FrechetProblem,
    candidate: &Point,
    y: &Point,
) -> Result<f64> {
    problem.space.check(candidate)?;
    problem.space.check(y)?;
    Ok(problem.mean_distance_coords(y.coords())
        - problem.space.dist_coords(candidate.coords(), y.coords()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Closed form or specialised solver where the space has one.
    #[default]
    Auto,
    /// Proximal passes plus geodesic line searches, in any space.
    Generic,
}

/// Configurable Karcher-mean solver.
#[derive(Debug, Clone)]
pub struct KarcherSolver {
    pub tol: f64,
    pub init: Option<Point>,
    pub method: SolverMethod,
    pub max_sweeps: usize,
    pub probes: usize,
    pub probe_seed: u64,
}

impl KarcherSolver {
    pub fn new(tol: f64) -> Self {
        KarcherSolver {
            tol,
            init: None,
            method: SolverMethod::Auto,
            max_sweeps: 10_000,
            probes: DEFAULT_PROBES,
            probe_seed: DEFAULT_PROBE_SEED,
        }
    }

    pub fn warm_start(mut self, init: Point) -> Self {
        self.init = Some(init);
        self
    }

    pub fn method(mut self, method: SolverMethod) -> Self {
        self.method = method;
        self
    }

    /// Minimizes without certifying.
    pub fn minimize(&self, problem: &FrechetProblem) -> Result<Point> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::OutOfRange {
                name: "tol",
                value: self.tol,
                reason: "solver tolerance must be positive",
            });
        }
        let space = &problem.space;
        if let Some(init) = &self.init {
            space.check(init)?;
        }
        let init = self
            .init
            .clone()
            .unwrap_or_else(|| problem.anchors[0].clone());
        let id = space.id();
        match (self.method, space) {
            (SolverMethod::Auto, SpaceHandle::Euclidean(e)) => {
                let mut mean = vec![0.0; e.dim()];
                for (a, w) in problem.anchors.iter().zip(&problem.weights) {
                    if *w > 0.0 {
                        for (m, c) in mean.iter_mut().zip(a.coords()) {
                            *m += w * c;
                        }
                    }
                }
                Ok(Point::from_raw(id, mean))
            }
            (SolverMethod::Auto, SpaceHandle::River(_)) => {
                Ok(Point::from_raw(id, river_mean(problem).to_vec()))
            }
            (SolverMethod::Auto, SpaceHandle::Disk(_)) => match disk_mean(problem, &init, self.tol)
            {
                Some(z) => Ok(Point::from_raw(id, vec![z.re, z.im])),
                None => generic_mean(problem, init, self.tol, self.max_sweeps),
            },
            (SolverMethod::Generic, _) => generic_mean(problem, init, self.tol, self.max_sweeps),
        }
    }

    /// Minimizes and certifies; a failing certificate is an error.
    pub fn solve(&self, problem: &FrechetProblem) -> Result<(Point, MeanCertificate)> {
        let mean = self.minimize(problem)?;
        let cert = certify_mean(problem, &mean, self.probes, self.probe_seed)?;
        if !cert.passes() {
            return Err(Error::CertificateFailed {
                worst_gap: cert.worst_gap,
                worst_slack: cert.worst_slack,
            });
        }
        Ok((mean, cert))
    }
}

/// Certified Karcher mean with default solver settings.
pub fn karcher_mean(problem: &FrechetProblem, tol: f64) -> Result<(Point, MeanCertificate)> {
    KarcherSolver::new(tol).solve(problem)
}

/// Exact minimizer in the river plane.
fn river_mean(problem: &FrechetProblem) -> [f64; 2] {
    let mut items: Vec<(f64, f64, f64)> = problem
        .anchors
        .iter()
        .zip(&problem.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(a, w)| (a.coords()[0], a.coords()[1], *w))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Group by abscissa: (abscissa, Σw, Σw|y|).
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for &(x, y, w) in &items {
        match groups.last_mut() {
            Some(g) if g.0 == x => {
                g.1 += w;
                g.2 += w * y.abs();
            }
            _ => groups.push((x, w, w * y.abs())),
        }
    }
    let total_w: f64 = groups.iter().map(|g| g.1).sum();
    let sum_wx: f64 = groups.iter().map(|g| g.1 * g.0).sum();
    let total_wy: f64 = groups.iter().map(|g| g.2).sum();

    // On the river, F(s) = Σ w (|y| + |x − s|)². Between consecutive
    // abscissas its derivative is 2(W s − Σ w x + Y_left − Y_right), so the
    // minimizer is the clamped stationary point of the first piece whose
    // stationary point does not lie to its right.
    let mut s_star = f64::NAN;
    let mut y_left = 0.0;
    for j in 0..=groups.len() {
        let lo = if j == 0 {
            f64::NEG_INFINITY
        } else {
            groups[j - 1].0
        };
        let hi = if j == groups.len() {
            f64::INFINITY
        } else {
            groups[j].0
        };
        let stationary = (sum_wx - y_left + (total_wy - y_left)) / total_w;
        if stationary <= hi {
            s_star = stationary.clamp(lo, hi);
            break;
        }
        if j < groups.len() {
            y_left += groups[j].2;
        }
    }

    // The minimizer may sit on the vertical line through s*, which only
    // exists as a branch when anchors share that abscissa. Along the upper
    // leg F(h) = Σ_up w (y − h)² + Σ_rest w (D + h)², with D the distance
    // to (s*, 0); likewise below.
    let (mut up, mut down, mut rest_up, mut rest_down) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y, w) in &items {
        let dist_to_foot = y.abs() + (x - s_star).abs();
        if x == s_star && y > 0.0 {
            up += w * y;
            rest_down += w * dist_to_foot;
        } else if x == s_star && y < 0.0 {
            down += w * -y;
            rest_up += w * dist_to_foot;
        } else {
            rest_up += w * dist_to_foot;
            rest_down += w * dist_to_foot;
        }
    }
    let h_up = (up - rest_up) / total_w;
    let h_down = (down - rest_down) / total_w;
    if h_up > 0.0 {
        [s_star, h_up]
    } else if h_down > 0.0 {
        [s_star, -h_down]
    } else {
        [s_star, 0.0]
    }
}

/// Preconditioned Riemannian gradient iteration on the disk. Returns `None`
/// when the iteration stalls.
fn disk_mean(problem: &FrechetProblem, init: &Point, tol: f64) -> Option<Complex64> {
    let anchors: Vec<(Complex64, f64)> = problem
        .anchors
        .iter()
        .zip(&problem.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(a, w)| (to_complex(a.coords()), *w))
        .collect();
    let value =
        |x: Complex64| -> f64 { anchors.iter().map(|(a, w)| w * dist_c(*a, x).powi(2)).sum() };

    let mut x = to_complex(init.coords());
    let mut fx = value(x);
    for _ in 0..10_000 {
        // g = −½ grad F; Λ bounds the largest eigenvalue of ½ Hess F.
        let mut g = Complex64::new(0.0, 0.0);
        let mut lambda = 0.0;
        for (a, w) in &anchors {
            let l = log_c(x, *a);
            let rho = l.norm();
            g += l * *w;
            lambda += w * if rho < 1e-8 { 1.0 } else { rho / rho.tanh() };
        }
        let mut alpha = 2.0 / (1.0 + lambda);
        if alpha * g.norm() < tol {
            return Some(x);
        }
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = exp_c(x, g * alpha);
            let fc = value(candidate);
            if candidate.norm() < 1.0 && fc <= fx + 1e-14 * fx.max(1.0) {
                x = candidate;
                fx = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Incremental proximal passes followed by geodesic line searches.
fn generic_mean(
    problem: &FrechetProblem,
    init: Point,
    tol: f64,
    max_sweeps: usize,
) -> Result<Point> {
    let space = &problem.space;
    let active: Vec<(&[f64], f64)> = problem
        .anchors
        .iter()
        .zip(&problem.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(a, w)| (a.coords(), *w))
        .collect();
    let mut x = init.into_coords();

    // The prox of w·d²(a, ·) with step λ moves toward a by 2λw / (1 + 2λw).
    let mut last_move = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let lambda = 1.0 / sweep as f64;
        let start = x.clone();
        for (a, w) in &active {
            let frac = 2.0 * lambda * w / (1.0 + 2.0 * lambda * w);
            x = space.geodesic_coords(&x, a, frac);
        }
        last_move = space.dist_coords(&start, &x);
        if last_move < tol {
            break;
        }
    }
    if !last_move.is_finite() {
        return Err(Error::NonConvergence {
            solver: "incremental proximal",
            iterations: max_sweeps,
            last_step: last_move,
        });
    }

    // Exact line searches toward each anchor. Along a geodesic F is convex,
    // so golden-section search finds the minimizing parameter.
    let mut fx = problem.value_coords(&x);
    for _ in 0..2_000 {
        let before = fx;
        for (a, _) in &active {
            let phi = |t: f64| problem.value_coords(&space.geodesic_coords(&x, a, t));
            let t = golden_section(phi, 0.0, 1.0, 1e-14);
            let candidate = space.geodesic_coords(&x, a, t);
            let fc = problem.value_coords(&candidate);
            if fc < fx {
                x = candidate;
                fx = fc;
            }
        }
        if before - fx <= 1e-16 * before.max(1e-300) {
            break;
        }
    }
    Ok(Point::from_raw(space.id(), x))
}

/// Minimizer of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(lo, f(lo)), (mid, f(mid)), (hi, f(hi))]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}
